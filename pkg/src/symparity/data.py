"""Finite data sorts and data expressions.

Values are plain Python objects: ``bool``, ``int``, enum constants as
``str`` and lists as ``tuple``.  ``UNDEF`` marks the result of a partial
operation (head/tail of the empty list, out-of-range arithmetic assigned to
a bounded sort).  Comparisons involving ``UNDEF`` are false and a guard that
evaluates to ``UNDEF`` counts as false.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Mapping


class _Undef:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNDEF"

    def __reduce__(self):
        return (_Undef, ())


UNDEF = _Undef()


class EvalError(Exception):
    pass


class SortError(Exception):
    pass


# -- sorts ---------------------------------------------------------------------


@dataclass(frozen=True)
class Sort:
    name: str
    kind: str  # bool | enum | int | list
    constants: tuple[str, ...] = ()
    lo: int = 0
    hi: int = 0
    elem: "Sort | None" = None
    maxlen: int = 0

    def contains(self, value: Any) -> bool:
        k = self.kind
        if k == "bool":
            return isinstance(value, bool)
        if k == "enum":
            return isinstance(value, str) and value in self.constants
        if k == "int":
            return (isinstance(value, int) and not isinstance(value, bool)
                    and self.lo <= value <= self.hi)
        if k == "list":
            return (isinstance(value, tuple) and len(value) <= self.maxlen
                    and all(self.elem.contains(x) for x in value))
        return False

    def text(self) -> str:
        """Sort expression as written in spec files."""
        k = self.kind
        if k == "bool":
            return "Bool"
        if k == "enum":
            return "{" + ", ".join(self.constants) + "}"
        if k == "int":
            return f"int[{self.lo}..{self.hi}]"
        return f"list({self.elem.ref()}, {self.maxlen})"

    def ref(self) -> str:
        """How another declaration refers to this sort."""
        if self.kind == "bool":
            return "Bool"
        if self.name:
            return self.name
        return self.text()


BOOL = Sort("Bool", "bool")


def enum_sort(name: str, constants) -> Sort:
    constants = tuple(constants)
    if not constants:
        raise SortError(f"enum sort {name} is empty")
    if len(set(constants)) != len(constants):
        raise SortError(f"enum sort {name} has duplicate constants")
    return Sort(name, "enum", constants=constants)


def int_sort(name: str, lo: int, hi: int) -> Sort:
    if lo > hi:
        raise SortError(f"int sort {name} is empty ({lo}..{hi})")
    return Sort(name, "int", lo=lo, hi=hi)


def list_sort(name: str, elem: Sort, maxlen: int) -> Sort:
    if maxlen < 0:
        raise SortError("list bound must be non-negative")
    return Sort(name, "list", elem=elem, maxlen=maxlen)


_enum_cache: dict[Sort, list] = {}


def enumerate_sort(s: Sort) -> list:
    """All values of ``s`` in the canonical order.

    Enums keep declaration order, integers ascend, lists go by length and
    then lexicographically by element order.
    """
    got = _enum_cache.get(s)
    if got is not None:
        return list(got)
    k = s.kind
    if k == "bool":
        vals = [False, True]
    elif k == "enum":
        vals = list(s.constants)
    elif k == "int":
        vals = list(range(s.lo, s.hi + 1))
    elif k == "list":
        elems = enumerate_sort(s.elem)
        vals = []
        for n in range(s.maxlen + 1):
            vals.extend(itertools.product(elems, repeat=n))
    else:
        raise SortError(f"unknown sort kind {k}")
    _enum_cache[s] = vals
    return list(vals)


def sort_size(s: Sort) -> int:
    k = s.kind
    if k == "bool":
        return 2
    if k == "enum":
        return len(s.constants)
    if k == "int":
        return s.hi - s.lo + 1
    n = sort_size(s.elem)
    return sum(n ** j for j in range(s.maxlen + 1))


def format_value(v: Any) -> str:
    if v is UNDEF:
        return "undef"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return "[" + ", ".join(format_value(x) for x in v) + "]"
    return str(v)


# -- expressions ---------------------------------------------------------------


class Expr:
    """Base class of data expressions; subclasses are frozen dataclasses."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: Any


@dataclass(frozen=True)
class Var(Expr):
    name: str
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ListLit(Expr):
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class Op(Expr):
    """Operator application.

    Binary: eq ne lt le gt ge add sub mul and or imp snoc concat.
    Unary: not neg len head tail.  Ternary: if.
    """

    op: str
    args: tuple[Expr, ...]
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


TRUE_E = Const(True)
FALSE_E = Const(False)

BINARY_SYMBOLS = {
    "eq": "==", "ne": "!=", "lt": "<", "le": "<=", "gt": ">", "ge": ">=",
    "add": "+", "sub": "-", "mul": "*", "and": "&&", "or": "||", "imp": "=>",
    "snoc": "++", "concat": "++",
}
_PREC = {"imp": 1, "or": 2, "and": 3, "eq": 4, "ne": 4, "lt": 4, "le": 4,
         "gt": 4, "ge": 4, "add": 5, "sub": 5, "snoc": 5, "concat": 5, "mul": 6}


def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, ListLit):
        return frozenset().union(*(free_vars(x) for x in e.items))
    return frozenset().union(*(free_vars(x) for x in e.args))


def substitute(e: Expr, sub: Mapping[str, Expr]) -> Expr:
    if not sub:
        return e
    if isinstance(e, Var):
        return sub.get(e.name, e)
    if isinstance(e, Const):
        return e
    if isinstance(e, ListLit):
        return ListLit(tuple(substitute(x, sub) for x in e.items))
    return Op(e.op, tuple(substitute(x, sub) for x in e.args), e.pos)


def show(e: Expr, prec: int = 0) -> str:
    """Render an expression in spec-file syntax."""
    if isinstance(e, Const):
        return format_value(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, ListLit):
        return "[" + ", ".join(show(x) for x in e.items) + "]"
    op, a = e.op, e.args
    if op in BINARY_SYMBOLS:
        p = _PREC[op]
        # comparisons do not chain; imp is right-associative
        lp = p + 1 if op in ("imp",) or p == 4 else p
        rp = p if op == "imp" else p + 1
        s = f"{show(a[0], lp)} {BINARY_SYMBOLS[op]} {show(a[1], rp)}"
        return f"({s})" if p < prec else s
    if op == "not":
        return "!" + show(a[0], 7)
    if op == "neg":
        return "-" + show(a[0], 7)
    if op == "len":
        return "#" + show(a[0], 7)
    if op in ("head", "tail"):
        return f"{op}({show(a[0])})"
    if op == "if":
        return f"if({show(a[0])}, {show(a[1])}, {show(a[2])})"
    raise ValueError(f"unknown operator {op}")


# -- smart constructors with constant folding ----------------------------------


def mk_not(a: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(a.value, bool):
        return Const(not a.value)
    if isinstance(a, Op) and a.op == "not":
        return a.args[0]
    if isinstance(a, Op) and a.op in ("eq", "ne"):
        return Op("ne" if a.op == "eq" else "eq", a.args)
    return Op("not", (a,))


def mk_and(*parts: Expr) -> Expr:
    out = []
    for p in parts:
        if p == TRUE_E:
            continue
        if p == FALSE_E:
            return FALSE_E
        if isinstance(p, Op) and p.op == "and":
            out.extend(p.args)
        elif p not in out:
            out.append(p)
    if not out:
        return TRUE_E
    r = out[-1]
    for p in reversed(out[:-1]):
        r = Op("and", (p, r))
    return r


def mk_or(*parts: Expr) -> Expr:
    out = []
    for p in parts:
        if p == FALSE_E:
            continue
        if p == TRUE_E:
            return TRUE_E
        if isinstance(p, Op) and p.op == "or":
            out.extend(p.args)
        elif p not in out:
            out.append(p)
    if not out:
        return FALSE_E
    r = out[-1]
    for p in reversed(out[:-1]):
        r = Op("or", (p, r))
    return r


def conjuncts(e: Expr) -> list[Expr]:
    if isinstance(e, Op) and e.op == "and":
        return conjuncts(e.args[0]) + conjuncts(e.args[1])
    if e == TRUE_E:
        return []
    return [e]


def mk_eq(a: Expr, b: Expr) -> Expr:
    if a == b and not _may_be_undef(a):
        return TRUE_E
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value == b.value)
    return Op("eq", (a, b))


def _may_be_undef(e: Expr) -> bool:
    if isinstance(e, (Const, Var)):
        return False
    if isinstance(e, ListLit):
        return any(_may_be_undef(x) for x in e.items)
    return True


def simplify(e: Expr) -> Expr:
    """Bottom-up constant folding of boolean structure."""
    if not isinstance(e, Op):
        return e
    args = tuple(simplify(a) for a in e.args)
    op = e.op
    if op == "and":
        return mk_and(*args)
    if op == "or":
        return mk_or(*args)
    if op == "not":
        return mk_not(args[0])
    if op == "imp":
        return mk_or(mk_not(args[0]), args[1]) if (
            isinstance(args[0], Const) or isinstance(args[1], Const)) else Op("imp", args)
    if op == "eq":
        return mk_eq(*args)
    if op == "ne" and isinstance(args[0], Const) and isinstance(args[1], Const):
        return Const(args[0].value != args[1].value)
    if op == "if" and isinstance(args[0], Const):
        return args[1] if args[0].value is True else args[2]
    if all(isinstance(a, Const) for a in args):
        v = eval_data(Op(op, args), {})
        if v is not UNDEF:
            return Const(v)
    return Op(op, args, e.pos)


# -- evaluation ------------------------------------------------------------------


def _truth(v) -> Any:
    """Coerce to bool for boolean positions; UNDEF stays UNDEF."""
    return v


def eval_data(e: Expr, env: Mapping[str, Any]) -> Any:
    """Evaluate ``e`` under ``env``; total, returning UNDEF for partial ops."""
    t = type(e)
    if t is Const:
        return e.value
    if t is Var:
        try:
            return env[e.name]
        except KeyError:
            raise EvalError(f"unbound variable {e.name}") from None
    if t is ListLit:
        items = tuple(eval_data(x, env) for x in e.items)
        return UNDEF if any(x is UNDEF for x in items) else items
    op = e.op
    a = e.args
    if op == "and":
        x = eval_data(a[0], env)
        if x is False:
            return False
        y = eval_data(a[1], env)
        if y is False:
            return False
        if x is UNDEF or y is UNDEF:
            return UNDEF
        return True
    if op == "or":
        x = eval_data(a[0], env)
        if x is True:
            return True
        y = eval_data(a[1], env)
        if y is True:
            return True
        if x is UNDEF or y is UNDEF:
            return UNDEF
        return False
    if op == "imp":
        x = eval_data(a[0], env)
        if x is False:
            return True
        y = eval_data(a[1], env)
        if y is True:
            return True
        if x is UNDEF or y is UNDEF:
            return UNDEF
        return False
    if op == "if":
        c = eval_data(a[0], env)
        if c is True:
            return eval_data(a[1], env)
        if c is False:
            return eval_data(a[2], env)
        return UNDEF
    vals = [eval_data(x, env) for x in a]
    if op in _CMP:
        if vals[0] is UNDEF or vals[1] is UNDEF:
            return False
        return _CMP[op](vals[0], vals[1])
    if any(v is UNDEF for v in vals):
        return UNDEF
    if op == "not":
        return not vals[0]
    if op == "add":
        return vals[0] + vals[1]
    if op == "sub":
        return vals[0] - vals[1]
    if op == "mul":
        return vals[0] * vals[1]
    if op == "neg":
        return -vals[0]
    if op == "len":
        return len(vals[0])
    if op == "head":
        return vals[0][0] if vals[0] else UNDEF
    if op == "tail":
        return vals[0][1:] if vals[0] else UNDEF
    if op == "snoc":
        return vals[0] + (vals[1],)
    if op == "concat":
        return vals[0] + vals[1]
    raise EvalError(f"unknown operator {op}")


_CMP = {
    "eq": lambda x, y: x == y and type(x) is type(y),
    "ne": lambda x, y: not (x == y and type(x) is type(y)),
    "lt": lambda x, y: x < y,
    "le": lambda x, y: x <= y,
    "gt": lambda x, y: x > y,
    "ge": lambda x, y: x >= y,
}


def eval_guard(e: Expr, env: Mapping[str, Any]) -> bool:
    return eval_data(e, env) is True


def coerce(value: Any, sort: Sort) -> Any:
    """``value`` if it belongs to ``sort``, else UNDEF."""
    if value is UNDEF or not sort.contains(value):
        return UNDEF
    return value


# -- typing ------------------------------------------------------------------------

# A type is a Sort for enums/bools/bounded ints/lists, or one of the
# pseudo-sorts below for intermediate results.
INT_T = Sort("Int", "int", lo=-(1 << 62), hi=1 << 62)


def _list_of(elem):
    return Sort("", "list", elem=elem, maxlen=1 << 30)


ANY_LIST = _list_of(None)


def compatible(a: Sort, b: Sort) -> bool:
    if a.kind != b.kind:
        return False
    if a.kind == "enum":
        return a.constants == b.constants
    if a.kind == "list":
        if a.elem is None or b.elem is None:
            return True
        return compatible(a.elem, b.elem)
    return True


def type_of(e: Expr, env: Mapping[str, Sort], consts: Mapping[str, Sort]) -> Sort:
    """Infer the sort of ``e``; raise SortError on ill-sorted input."""

    def err(msg, node):
        pos = getattr(node, "pos", None)
        where = f" at line {pos[0]}, column {pos[1]}" if pos else ""
        return SortError(msg + where)

    def go(x: Expr) -> Sort:
        if isinstance(x, Const):
            v = x.value
            if isinstance(v, bool):
                return BOOL
            if isinstance(v, int):
                return INT_T
            if isinstance(v, str):
                if v not in consts:
                    raise err(f"unknown constant {v}", x)
                return consts[v]
            if isinstance(v, tuple):
                if not v:
                    return ANY_LIST
                return _list_of(go(Const(v[0])))
            raise err(f"bad constant {v!r}", x)
        if isinstance(x, Var):
            if x.name in env:
                return env[x.name]
            if x.name in consts:
                return consts[x.name]
            raise err(f"unbound variable {x.name}", x)
        if isinstance(x, ListLit):
            if not x.items:
                return ANY_LIST
            ts = [go(i) for i in x.items]
            for t in ts[1:]:
                if not compatible(t, ts[0]):
                    raise err("list literal mixes sorts", x)
            return _list_of(ts[0])
        op, args = x.op, x.args
        ts = [go(a) for a in args]
        if op in ("and", "or", "imp", "not"):
            for t in ts:
                if t.kind != "bool":
                    raise err(f"operator {op} expects Bool", x)
            return BOOL
        if op in ("eq", "ne"):
            if not compatible(ts[0], ts[1]):
                raise err("comparison between different sorts", x)
            return BOOL
        if op in ("lt", "le", "gt", "ge"):
            if ts[0].kind != "int" or ts[1].kind != "int":
                raise err(f"operator {op} expects integers", x)
            return BOOL
        if op in ("add", "sub", "mul", "neg"):
            if any(t.kind != "int" for t in ts):
                raise err(f"operator {op} expects integers", x)
            return INT_T
        if op == "len":
            if ts[0].kind != "list":
                raise err("# expects a list", x)
            return INT_T
        if op == "head":
            if ts[0].kind != "list":
                raise err("head expects a list", x)
            if ts[0].elem is None:
                raise err("head of an empty list literal", x)
            return ts[0].elem
        if op == "tail":
            if ts[0].kind != "list":
                raise err("tail expects a list", x)
            return _list_of(ts[0].elem)
        if op in ("snoc", "concat"):
            if ts[0].kind != "list":
                raise err("++ expects a list on the left", x)
            if op == "concat":
                if not compatible(ts[0], ts[1]):
                    raise err("++ between lists of different sorts", x)
                return _list_of(ts[0].elem or ts[1].elem)
            if ts[0].elem is not None and not compatible(ts[0].elem, ts[1]):
                raise err("++ appends an element of the wrong sort", x)
            return _list_of(ts[0].elem or ts[1])
        if op == "if":
            if ts[0].kind != "bool":
                raise err("if condition must be Bool", x)
            if not compatible(ts[1], ts[2]):
                raise err("if branches have different sorts", x)
            return ts[1]
        raise err(f"unknown operator {op}", x)

    return go(e)


def resolve_append(e: Expr, env: Mapping[str, Sort], consts: Mapping[str, Sort]) -> Expr:
    """Turn parsed ``++`` (stored as snoc) into concat where the right side
    is itself a list."""
    if isinstance(e, Op):
        args = tuple(resolve_append(a, env, consts) for a in e.args)
        op = e.op
        if op == "snoc":
            rt = type_of(args[1], env, consts)
            if rt.kind == "list":
                lt = type_of(args[0], env, consts)
                if lt.elem is None or lt.elem.kind != "list":
                    op = "concat"
        return Op(op, args, e.pos)
    if isinstance(e, ListLit):
        return ListLit(tuple(resolve_append(a, env, consts) for a in e.items))
    return e
