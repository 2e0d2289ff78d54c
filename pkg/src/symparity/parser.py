"""Reader and printer for ``.spec`` files.

A spec file holds sort declarations, one linear process with its initial
state, and any number of named formulas::

    sort D = {d1, d2};
    proc Buffer(q: list(D, 2)) =
        sum d: D . #q < 2 -> read(d) . Buffer(q := q ++ d)
      + #q > 0 -> send(head(q)) . Buffer(q := tail(q));
    init Buffer([]);
    form nodeadlock = nu X . <true>true && [true]X;

``%`` starts a comment that runs to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .data import (
    BOOL, Const, Expr, ListLit, Op, Sort, SortError, UNDEF, Var, coerce,
    compatible, enum_sort, eval_data, int_sort, list_sort, resolve_append,
    type_of, format_value,
)
from .model import (
    WILDCARD, ActAnd, ActFalse, ActName, ActNot, ActOr, ActTrue, FAnd, FBox,
    FDia, FExists, FFix, FForall, FImp, FNot, FOr, FVal, FVar, LinearProcess,
    ModelError, MuFormula, Summand, check_positive, show_formula, show_process,
)


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + msg)
        self.line = line
        self.col = col


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|%[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>->|=>|:=|==|!=|<=|>=|&&|\|\||\+\+|\.\.|[()\[\]{}<>,;:.+\-*!\#=])
""", re.X)

KEYWORDS = {"sort", "proc", "init", "form", "sum", "mu", "nu", "forall",
            "exists", "true", "false", "if", "head", "tail", "int", "list", "Bool"}


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    toks = []
    line, start = 1, 0
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, i - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind != "ws":
            toks.append(Tok(kind, m.group(), line, i - start + 1))
        i = m.end()
    toks.append(Tok("eof", "", line, i - start + 1))
    return toks


@dataclass
class SpecDocument:
    sorts: dict[str, Sort] = field(default_factory=dict)
    constants: dict[str, Sort] = field(default_factory=dict)
    process: LinearProcess | None = None
    formulas: dict[str, MuFormula] = field(default_factory=dict)

    def formula(self, name: str | None = None) -> MuFormula:
        if not self.formulas:
            raise ModelError("spec declares no formula")
        if name is None:
            return next(iter(self.formulas.values()))
        if name not in self.formulas:
            raise ModelError(f"no formula named {name}")
        return self.formulas[name]


_CMP_OPS = {"==": "eq", "!=": "ne", "<": "lt", "<=": "le", ">": "gt", ">=": "ge"}
_ADD_OPS = {"+": "add", "-": "sub", "++": "snoc"}


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.doc = SpecDocument()
        self.proc_header: tuple[str, tuple] | None = None
        self.init_vals = None

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "ident") and t.text in texts

    def error(self, msg: str, tok: Tok | None = None) -> ParseError:
        t = tok or self.tok
        return ParseError(msg, t.line, t.col)

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            got = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {got!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self, what: str = "identifier") -> Tok:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error(f"expected {what}, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    def integer(self) -> int:
        neg = self.accept("-")
        t = self.tok
        if t.kind != "int":
            raise self.error("expected an integer")
        self.i += 1
        return -int(t.text) if neg else int(t.text)

    # -- declarations -----------------------------------------------------------

    def parse(self) -> SpecDocument:
        while self.tok.kind != "eof":
            if self.at("sort"):
                self.sort_decl()
            elif self.at("proc"):
                self.proc_decl()
            elif self.at("init"):
                self.init_decl()
            elif self.at("form"):
                self.form_decl()
            else:
                raise self.error(f"expected a declaration, found {self.tok.text!r}")
        if self.doc.process is None:
            raise ParseError("no process declared")
        return self.doc

    def declare_name(self, name: str, tok: Tok):
        if name in self.doc.sorts or name in self.doc.constants:
            raise self.error(f"{name} is already declared", tok)

    def sort_decl(self):
        self.expect("sort")
        t = self.ident("sort name")
        self.declare_name(t.text, t)
        self.expect("=")
        s = self.sort_expr(t.text)
        self.expect(";")
        self.doc.sorts[t.text] = s

    def sort_expr(self, name: str = "") -> Sort:
        t = self.tok
        try:
            if self.accept("{"):
                if not name:
                    raise self.error("enumerations must be declared with a name", t)
                consts = [self.ident("constant")]
                while self.accept(","):
                    consts.append(self.ident("constant"))
                self.expect("}")
                for c in consts:
                    self.declare_name(c.text, c)
                s = enum_sort(name, [c.text for c in consts])
                for c in consts:
                    self.doc.constants[c.text] = s
                return s
            if self.accept("int"):
                self.expect("[")
                lo = self.integer()
                self.expect("..")
                hi = self.integer()
                self.expect("]")
                return int_sort(name, lo, hi)
            if self.accept("list"):
                self.expect("(")
                elem = self.sort_expr()
                self.expect(",")
                n = self.integer()
                self.expect(")")
                return list_sort(name, elem, n)
            if self.accept("Bool"):
                return BOOL
            r = self.ident("sort")
            if r.text not in self.doc.sorts:
                raise self.error(f"unknown sort {r.text}", r)
            s = self.doc.sorts[r.text]
            return s
        except SortError as e:
            raise self.error(str(e), t) from None

    def var_decls(self) -> list[tuple[Tok, Sort]]:
        out = []
        while True:
            t = self.ident("variable")
            self.expect(":")
            out.append((t, self.sort_expr()))
            if not self.accept(","):
                return out

    def proc_decl(self):
        if self.doc.process is not None or self.proc_header is not None:
            raise self.error("only one process may be declared")
        self.expect("proc")
        name = self.ident("process name")
        self.expect("(")
        params = self.var_decls() if not self.at(")") else []
        self.expect(")")
        seen = set()
        for t, _ in params:
            if t.text in seen or t.text in self.doc.constants:
                raise self.error(f"parameter {t.text} clashes with another name", t)
            seen.add(t.text)
        pdecl = tuple((t.text, s) for t, s in params)
        self.proc_header = (name.text, pdecl)
        self.expect("=")
        summands = [self.summand(name.text, pdecl)]
        while self.accept("+"):
            summands.append(self.summand(name.text, pdecl))
        self.expect(";")
        self.summands = tuple(summands)
        self.finish_process()

    def summand(self, pname: str, params) -> Summand:
        env = {n: s for n, s in params}
        sum_vars = []
        if self.accept("sum"):
            for t, s in self.var_decls():
                if t.text in env or t.text in self.doc.constants:
                    raise self.error(f"sum variable {t.text} shadows another name", t)
                env[t.text] = s
                sum_vars.append((t.text, s))
            self.expect(".")
        guard = self.typed(self.expr(), env, BOOL)
        self.expect("->")
        act = self.ident("action")
        args = []
        if self.accept("("):
            if not self.at(")"):
                args.append(self.typed(self.expr(), env))
                while self.accept(","):
                    args.append(self.typed(self.expr(), env))
            self.expect(")")
        self.expect(".")
        rt = self.ident("process name")
        if rt.text != pname:
            raise self.error(f"recursion must call {pname}", rt)
        self.expect("(")
        nxt = {n: Var(n) for n, _ in params}
        if not self.at(")"):
            if self.tok.kind == "ident" and self.peek().text == ":=":
                while True:
                    t = self.ident("parameter")
                    if t.text not in nxt:
                        raise self.error(f"{t.text} is not a parameter of {pname}", t)
                    self.expect(":=")
                    nxt[t.text] = self.typed(self.expr(), env, env[t.text])
                    if not self.accept(","):
                        break
            else:
                vals = [self.expr()]
                while self.accept(","):
                    vals.append(self.expr())
                if len(vals) != len(params):
                    raise self.error(f"{pname} expects {len(params)} arguments", rt)
                for (n, s), v in zip(params, vals):
                    nxt[n] = self.typed(v, env, s)
        self.expect(")")
        return Summand(tuple(sum_vars), guard, act.text, tuple(args),
                       tuple(nxt[n] for n, _ in params))

    def typed(self, e: Expr, env, want: Sort | None = None) -> Expr:
        consts = self.doc.constants
        try:
            e = resolve_append(e, env, consts)
            t = type_of(e, env, consts)
        except SortError as err:
            raise ParseError(str(err)) from None
        if want is not None and not compatible(t, want):
            pos = _pos_of(e)
            raise ParseError(f"expected sort {want.ref()}, got {t.ref()}", *(pos or (0, 0)))
        return e

    def init_decl(self):
        self.expect("init")
        t = self.ident("process name")
        if self.proc_header is None:
            raise self.error("init must follow the process declaration", t)
        pname, params = self.proc_header
        if t.text != pname:
            raise self.error(f"init must instantiate {pname}", t)
        if self.init_vals is not None:
            raise self.error("duplicate init", t)
        self.expect("(")
        vals = []
        if not self.at(")"):
            vals.append(self.expr())
            while self.accept(","):
                vals.append(self.expr())
        self.expect(")")
        self.expect(";")
        if len(vals) != len(params):
            raise self.error(f"{pname} expects {len(params)} initial values", t)
        out = []
        for (n, s), e in zip(params, vals):
            e = self.typed(e, {}, s)
            v = coerce(eval_data(e, {}), s)
            if v is UNDEF:
                raise self.error(f"initial value of {n} is outside its sort", t)
            out.append(v)
        self.init_vals = tuple(out)
        self.finish_process()

    def finish_process(self):
        if self.proc_header is None or self.init_vals is None or not hasattr(self, "summands"):
            return
        name, params = self.proc_header
        self.doc.process = LinearProcess(name, params, self.summands, self.init_vals)
        self.action_sorts = {}
        for sm in self.summands:
            env = {n: s for n, s in params}
            env.update(dict(sm.sum_vars))
            ts = tuple(type_of(a, env, self.doc.constants) for a in sm.args)
            self.action_sorts.setdefault(sm.action, ts)

    def form_decl(self):
        self.expect("form")
        t = self.ident("formula name")
        if t.text in self.doc.formulas:
            raise self.error(f"duplicate formula {t.text}", t)
        if self.doc.process is None:
            raise self.error("formulas must follow the process and init", t)
        self.expect("=")
        f = self.formula({}, {})
        self.expect(";")
        try:
            check_positive(f)
        except ModelError as e:
            raise ParseError(str(e), t.line, t.col) from None
        self.doc.formulas[t.text] = f

    # -- data expressions -------------------------------------------------------

    def expr(self) -> Expr:
        left = self.or_expr()
        if self.at("=>"):
            t = self.tok
            self.i += 1
            return Op("imp", (left, self.expr()), (t.line, t.col))
        return left

    def or_expr(self) -> Expr:
        e = self.and_expr()
        while self.at("||"):
            t = self.tok
            self.i += 1
            e = Op("or", (e, self.and_expr()), (t.line, t.col))
        return e

    def and_expr(self) -> Expr:
        e = self.cmp_expr()
        while self.at("&&"):
            t = self.tok
            self.i += 1
            e = Op("and", (e, self.cmp_expr()), (t.line, t.col))
        return e

    def cmp_expr(self) -> Expr:
        e = self.add_expr()
        if self.tok.kind == "sym" and self.tok.text in _CMP_OPS:
            t = self.tok
            self.i += 1
            e = Op(_CMP_OPS[t.text], (e, self.add_expr()), (t.line, t.col))
        return e

    def add_expr(self) -> Expr:
        e = self.mul_expr()
        while self.tok.kind == "sym" and self.tok.text in _ADD_OPS:
            t = self.tok
            self.i += 1
            e = Op(_ADD_OPS[t.text], (e, self.mul_expr()), (t.line, t.col))
        return e

    def mul_expr(self) -> Expr:
        e = self.unary()
        while self.at("*"):
            t = self.tok
            self.i += 1
            e = Op("mul", (e, self.unary()), (t.line, t.col))
        return e

    def unary(self) -> Expr:
        t = self.tok
        for sym, op in (("!", "not"), ("-", "neg"), ("#", "len")):
            if self.accept(sym):
                arg = self.unary()
                if op == "neg" and isinstance(arg, Const) and type(arg.value) is int:
                    return Const(-arg.value)
                return Op(op, (arg,), (t.line, t.col))
        return self.primary()

    def primary(self) -> Expr:
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "int":
            self.i += 1
            return Const(int(t.text))
        if self.accept("true"):
            return Const(True)
        if self.accept("false"):
            return Const(False)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("["):
            items = []
            if not self.at("]"):
                items.append(self.expr())
                while self.accept(","):
                    items.append(self.expr())
            self.expect("]")
            if not items:
                return Const(())
            return ListLit(tuple(items))
        if t.text in ("head", "tail") and t.kind == "ident":
            self.i += 1
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return Op(t.text, (e,), pos)
        if t.text == "if" and t.kind == "ident":
            self.i += 1
            self.expect("(")
            c = self.expr()
            self.expect(",")
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect(")")
            return Op("if", (c, a, b), pos)
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            if t.text in self.doc.constants:
                return Const(t.text)
            return Var(t.text, pos)
        raise self.error(f"expected an expression, found {t.text or 'end of input'!r}")

    # -- formulas ---------------------------------------------------------------

    def formula(self, env, props) -> MuFormula:
        left = self.f_or(env, props)
        if self.accept("=>"):
            return FImp(left, self.formula(env, props))
        return left

    def f_or(self, env, props):
        f = self.f_and(env, props)
        while self.accept("||"):
            f = FOr(f, self.f_and(env, props))
        return f

    def f_and(self, env, props):
        f = self.f_unary(env, props)
        while self.accept("&&"):
            f = FAnd(f, self.f_unary(env, props))
        return f

    def check_binder(self, t: Tok, env):
        proc = self.doc.process
        if proc is not None and t.text in proc.param_names:
            raise self.error(f"{t.text} shadows a process parameter", t)
        if t.text in self.doc.constants:
            raise self.error(f"{t.text} clashes with a constant", t)

    def f_unary(self, env, props) -> MuFormula:
        if self.accept("!"):
            return FNot(self.f_unary(env, props))
        if self.accept("["):
            a = self.action(env)
            self.expect("]")
            return FBox(a, self.f_unary(env, props))
        if self.accept("<"):
            a = self.action(env)
            self.expect(">")
            return FDia(a, self.f_unary(env, props))
        if self.at("mu", "nu"):
            sigma = self.tok.text
            self.i += 1
            name = self.ident("fixpoint variable")
            params = []
            inner = dict(env)
            if self.accept("("):
                while True:
                    v = self.ident("parameter")
                    self.check_binder(v, env)
                    self.expect(":")
                    s = self.sort_expr()
                    self.expect(":=")
                    init = self.typed(self.expr(), env, s)
                    params.append((v.text, s, init))
                    if not self.accept(","):
                        break
                self.expect(")")
            for v, s, _ in params:
                inner[v] = s
            self.expect(".")
            p2 = dict(props)
            p2[name.text] = tuple(s for _, s, _ in params)
            body = self.formula(inner, p2)
            return FFix(sigma, name.text, tuple(params), body)
        if self.at("forall", "exists"):
            q = self.tok.text
            self.i += 1
            decls = self.var_decls()
            inner = dict(env)
            for t, s in decls:
                self.check_binder(t, env)
                inner[t.text] = s
            self.expect(".")
            body = self.formula(inner, props)
            ctor = FForall if q == "forall" else FExists
            for t, s in reversed(decls):
                body = ctor(t.text, s, body)
            return body
        return self.f_atom(env, props)

    def f_atom(self, env, props) -> MuFormula:
        t = self.tok
        if t.kind == "ident" and t.text in props:
            self.i += 1
            sorts = props[t.text]
            args = []
            if self.accept("("):
                args.append(self.expr())
                while self.accept(","):
                    args.append(self.expr())
                self.expect(")")
            if len(args) != len(sorts):
                raise self.error(f"{t.text} expects {len(sorts)} arguments", t)
            args = [self.typed(a, env, s) for a, s in zip(args, sorts)]
            return FVar(t.text, tuple(args), (t.line, t.col))
        if self.at("("):
            save = self.i
            try:
                self.i += 1
                f = self.formula(env, props)
                self.expect(")")
                nxt = self.tok
                if not (nxt.kind == "sym" and (nxt.text in _CMP_OPS or nxt.text in _ADD_OPS
                                               or nxt.text == "*")):
                    return f
            except ParseError:
                pass
            self.i = save
        e = self.cmp_expr()
        return FVal(self.typed(e, env, BOOL))

    def action(self, env):
        a = self.a_and(env)
        while self.accept("||"):
            a = ActOr(a, self.a_and(env))
        return a

    def a_and(self, env):
        a = self.a_unary(env)
        while self.accept("&&"):
            a = ActAnd(a, self.a_unary(env))
        return a

    def a_unary(self, env):
        if self.accept("!"):
            return ActNot(self.a_unary(env))
        if self.accept("("):
            a = self.action(env)
            self.expect(")")
            return a
        if self.accept("true"):
            return ActTrue()
        if self.accept("false"):
            return ActFalse()
        t = self.ident("action name")
        if not self.accept("("):
            return ActName(t.text)
        pats = []
        sorts = getattr(self, "action_sorts", {}).get(t.text)
        while True:
            if self.tok.kind == "ident" and self.tok.text == WILDCARD:
                self.i += 1
                pats.append(WILDCARD)
            else:
                k = len(pats)
                want = sorts[k] if sorts is not None and k < len(sorts) else None
                pats.append(self.typed(self.expr(), env, want))
            if not self.accept(","):
                break
        self.expect(")")
        return ActName(t.text, tuple(pats))


def _pos_of(e: Expr):
    return getattr(e, "pos", None)


def parse_document(text: str) -> SpecDocument:
    """Parse a spec file into a document holding the process and its named formulas."""
    return _Parser(text).parse()


def parse_spec(text: str, formula: str | None = None) -> tuple[LinearProcess, MuFormula]:
    """Parse a spec file; return its process and the selected formula
    (the first one when ``formula`` is None)."""
    doc = parse_document(text)
    return doc.process, doc.formula(formula)


def print_spec(doc: SpecDocument) -> str:
    """Spec-file text that parses back to an equal document."""
    out = []
    for name, s in doc.sorts.items():
        out.append(f"sort {name} = {s.text()};")
    lps = doc.process
    out.append(show_process(lps))
    out.append(f"init {lps.name}(" + ", ".join(format_value(v) for v in lps.init) + ");")
    for name, f in doc.formulas.items():
        out.append(f"form {name} = {show_formula(f)};")
    return "\n".join(out) + "\n"
