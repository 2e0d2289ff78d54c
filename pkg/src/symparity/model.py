"""Linear processes and first-order modal mu-calculus formulas."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

from .data import (
    BOOL, Const, Expr, Sort, Var, eval_data, eval_guard, coerce, enumerate_sort,
    free_vars as expr_free_vars, mk_and, mk_not, mk_or, show, substitute,
    UNDEF,
)


class ModelError(Exception):
    pass


# -- linear process ------------------------------------------------------------


@dataclass(frozen=True)
class Summand:
    sum_vars: tuple[tuple[str, Sort], ...]
    guard: Expr
    action: str
    args: tuple[Expr, ...]
    next_state: tuple[Expr, ...]


@dataclass(frozen=True)
class LinearProcess:
    name: str
    params: tuple[tuple[str, Sort], ...]
    summands: tuple[Summand, ...]
    init: tuple[Any, ...]

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.params)


def summand_instances(lps: LinearProcess, state: tuple) -> Iterable[tuple[int, str, tuple, tuple]]:
    """Enabled transitions from ``state``: (summand index, action, args, next)."""
    env = dict(zip(lps.param_names, state))
    for i, sm in enumerate(lps.summands):
        names = [v for v, _ in sm.sum_vars]
        for vals in _product([enumerate_sort(s) for _, s in sm.sum_vars]):
            e = dict(env)
            e.update(zip(names, vals))
            if not eval_guard(sm.guard, e):
                continue
            nxt = tuple(coerce(eval_data(g, e), s)
                        for g, (_, s) in zip(sm.next_state, lps.params))
            if any(x is UNDEF for x in nxt):
                continue
            args = tuple(eval_data(a, e) for a in sm.args)
            if any(x is UNDEF for x in args):
                continue
            yield i, sm.action, args, nxt


def _product(lists):
    if not lists:
        yield ()
        return
    head, rest = lists[0], lists[1:]
    for x in head:
        for tail in _product(rest):
            yield (x,) + tail


def explore_lts(lps: LinearProcess, max_states: int | None = None):
    """Explicit breadth-first exploration.

    Returns ``(states, transitions)`` where states are parameter tuples in
    discovery order and transitions are ``(src, action, args, dst)`` indices.
    """
    init = tuple(lps.init)
    index = {init: 0}
    states = [init]
    trans = []
    i = 0
    while i < len(states):
        s = states[i]
        for _, a, args, t in summand_instances(lps, s):
            j = index.get(t)
            if j is None:
                if max_states is not None and len(states) >= max_states:
                    raise ModelError(f"more than {max_states} states")
                j = index[t] = len(states)
                states.append(t)
            trans.append((i, a, args, j))
        i += 1
    return states, trans


# -- action formulas -----------------------------------------------------------


class ActionFormula:
    __slots__ = ()


@dataclass(frozen=True)
class ActTrue(ActionFormula):
    pass


@dataclass(frozen=True)
class ActFalse(ActionFormula):
    pass


WILDCARD = "_"


@dataclass(frozen=True)
class ActName(ActionFormula):
    """``name`` matches any arguments; ``name(p1, ...)`` matches positionally.

    A pattern is a data expression or the wildcard string ``"_"``.
    """

    name: str
    patterns: tuple | None = None


@dataclass(frozen=True)
class ActNot(ActionFormula):
    arg: ActionFormula


@dataclass(frozen=True)
class ActAnd(ActionFormula):
    left: ActionFormula
    right: ActionFormula


@dataclass(frozen=True)
class ActOr(ActionFormula):
    left: ActionFormula
    right: ActionFormula


def match_expr(alpha: ActionFormula, action: str, args: tuple[Expr, ...]) -> Expr:
    """Boolean data expression stating that ``action(args)`` satisfies alpha."""
    if isinstance(alpha, ActTrue):
        return Const(True)
    if isinstance(alpha, ActFalse):
        return Const(False)
    if isinstance(alpha, ActName):
        if alpha.name != action:
            return Const(False)
        if alpha.patterns is None:
            return Const(True)
        if len(alpha.patterns) != len(args):
            raise ModelError(
                f"action {action} has {len(args)} arguments but the pattern has "
                f"{len(alpha.patterns)}")
        from .data import mk_eq
        return mk_and(*(mk_eq(p, a) for p, a in zip(alpha.patterns, args)
                        if p != WILDCARD))
    if isinstance(alpha, ActNot):
        return mk_not(match_expr(alpha.arg, action, args))
    if isinstance(alpha, ActAnd):
        return mk_and(match_expr(alpha.left, action, args),
                      match_expr(alpha.right, action, args))
    if isinstance(alpha, ActOr):
        return mk_or(match_expr(alpha.left, action, args),
                     match_expr(alpha.right, action, args))
    raise TypeError(alpha)


def act_free_vars(alpha: ActionFormula) -> frozenset[str]:
    if isinstance(alpha, ActName):
        if not alpha.patterns:
            return frozenset()
        return frozenset().union(*(expr_free_vars(p) for p in alpha.patterns
                                   if p != WILDCARD))
    if isinstance(alpha, ActNot):
        return act_free_vars(alpha.arg)
    if isinstance(alpha, (ActAnd, ActOr)):
        return act_free_vars(alpha.left) | act_free_vars(alpha.right)
    return frozenset()


def act_substitute(alpha: ActionFormula, sub) -> ActionFormula:
    if isinstance(alpha, ActName) and alpha.patterns:
        return ActName(alpha.name, tuple(
            p if p == WILDCARD else substitute(p, sub) for p in alpha.patterns))
    if isinstance(alpha, ActNot):
        return ActNot(act_substitute(alpha.arg, sub))
    if isinstance(alpha, ActAnd):
        return ActAnd(act_substitute(alpha.left, sub), act_substitute(alpha.right, sub))
    if isinstance(alpha, ActOr):
        return ActOr(act_substitute(alpha.left, sub), act_substitute(alpha.right, sub))
    return alpha


def show_action(alpha: ActionFormula, prec: int = 0) -> str:
    if isinstance(alpha, ActTrue):
        return "true"
    if isinstance(alpha, ActFalse):
        return "false"
    if isinstance(alpha, ActName):
        if alpha.patterns is None:
            return alpha.name
        ps = ", ".join(WILDCARD if p == WILDCARD else show(p) for p in alpha.patterns)
        return f"{alpha.name}({ps})"
    if isinstance(alpha, ActNot):
        return "!" + show_action(alpha.arg, 3)
    if isinstance(alpha, ActAnd):
        s = f"{show_action(alpha.left, 2)} && {show_action(alpha.right, 2)}"
        return f"({s})" if prec > 2 else s
    if isinstance(alpha, ActOr):
        s = f"{show_action(alpha.left, 1)} || {show_action(alpha.right, 1)}"
        return f"({s})" if prec > 1 else s
    raise TypeError(alpha)


# -- state formulas --------------------------------------------------------------


class MuFormula:
    __slots__ = ()


@dataclass(frozen=True)
class FVal(MuFormula):
    expr: Expr


@dataclass(frozen=True)
class FNot(MuFormula):
    arg: MuFormula


@dataclass(frozen=True)
class FAnd(MuFormula):
    left: MuFormula
    right: MuFormula


@dataclass(frozen=True)
class FOr(MuFormula):
    left: MuFormula
    right: MuFormula


@dataclass(frozen=True)
class FImp(MuFormula):
    left: MuFormula
    right: MuFormula


@dataclass(frozen=True)
class FBox(MuFormula):
    alpha: ActionFormula
    body: MuFormula


@dataclass(frozen=True)
class FDia(MuFormula):
    alpha: ActionFormula
    body: MuFormula


@dataclass(frozen=True)
class FForall(MuFormula):
    var: str
    sort: Sort
    body: MuFormula


@dataclass(frozen=True)
class FExists(MuFormula):
    var: str
    sort: Sort
    body: MuFormula


@dataclass(frozen=True)
class FVar(MuFormula):
    name: str
    args: tuple[Expr, ...] = ()
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FFix(MuFormula):
    """``sigma X(d1: D1 := e1, ...). body`` with sigma "mu" or "nu"."""

    sigma: str
    name: str
    params: tuple[tuple[str, Sort, Expr], ...]
    body: MuFormula


def _flip(f: MuFormula, names: frozenset[str]) -> MuFormula:
    """Negation of f in negation normal form.

    Occurrences of the propositional variables in ``names`` are left
    unnegated; that is the standard dualisation when ``f`` sits under an
    even number of negations overall.
    """
    if isinstance(f, FVal):
        return FVal(mk_not(f.expr))
    if isinstance(f, FNot):
        return to_nnf(f.arg, names)
    if isinstance(f, FAnd):
        return FOr(_flip(f.left, names), _flip(f.right, names))
    if isinstance(f, FOr):
        return FAnd(_flip(f.left, names), _flip(f.right, names))
    if isinstance(f, FImp):
        return FAnd(to_nnf(f.left, names), _flip(f.right, names))
    if isinstance(f, FBox):
        return FDia(f.alpha, _flip(f.body, names))
    if isinstance(f, FDia):
        return FBox(f.alpha, _flip(f.body, names))
    if isinstance(f, FForall):
        return FExists(f.var, f.sort, _flip(f.body, names))
    if isinstance(f, FExists):
        return FForall(f.var, f.sort, _flip(f.body, names))
    if isinstance(f, FVar):
        return f
    if isinstance(f, FFix):
        dual = "nu" if f.sigma == "mu" else "mu"
        return FFix(dual, f.name, f.params, _flip(f.body, names | {f.name}))
    raise TypeError(f)


def to_nnf(f: MuFormula, names: frozenset[str] = frozenset()) -> MuFormula:
    """Push negations down to data expressions and eliminate implications.

    The caller must have checked positivity with :func:`check_positive`.
    """
    if isinstance(f, FNot):
        return _flip(f.arg, names)
    if isinstance(f, FImp):
        return FOr(_flip(f.left, names), to_nnf(f.right, names))
    if isinstance(f, FAnd):
        return FAnd(to_nnf(f.left, names), to_nnf(f.right, names))
    if isinstance(f, FOr):
        return FOr(to_nnf(f.left, names), to_nnf(f.right, names))
    if isinstance(f, FBox):
        return FBox(f.alpha, to_nnf(f.body, names))
    if isinstance(f, FDia):
        return FDia(f.alpha, to_nnf(f.body, names))
    if isinstance(f, FForall):
        return FForall(f.var, f.sort, to_nnf(f.body, names))
    if isinstance(f, FExists):
        return FExists(f.var, f.sort, to_nnf(f.body, names))
    if isinstance(f, FFix):
        return FFix(f.sigma, f.name, f.params, to_nnf(f.body, names))
    return f


def check_positive(f: MuFormula) -> None:
    """Raise ModelError if a bound variable occurs under an odd number of
    negations relative to its binder."""

    def go(g: MuFormula, polarity: dict[str, bool], neg: bool):
        if isinstance(g, FVar):
            if g.name in polarity and polarity[g.name] != neg:
                raise ModelError(f"variable {g.name} occurs negatively")
        elif isinstance(g, FNot):
            go(g.arg, polarity, not neg)
        elif isinstance(g, FImp):
            go(g.left, polarity, not neg)
            go(g.right, polarity, neg)
        elif isinstance(g, (FAnd, FOr)):
            go(g.left, polarity, neg)
            go(g.right, polarity, neg)
        elif isinstance(g, (FBox, FDia, FForall, FExists)):
            go(g.body, polarity, neg)
        elif isinstance(g, FFix):
            p = dict(polarity)
            p[g.name] = neg
            go(g.body, p, neg)

    go(f, {}, False)


def is_nnf(f: MuFormula) -> bool:
    if isinstance(f, (FNot, FImp)):
        return False
    return all(is_nnf(c) for c in formula_children(f))


def formula_children(f: MuFormula) -> list[MuFormula]:
    if isinstance(f, (FAnd, FOr, FImp)):
        return [f.left, f.right]
    if isinstance(f, FNot):
        return [f.arg]
    if isinstance(f, (FBox, FDia, FForall, FExists, FFix)):
        return [f.body]
    return []


def formula_free_data(f: MuFormula) -> frozenset[str]:
    """Free data variables of a state formula."""
    if isinstance(f, FVal):
        return expr_free_vars(f.expr)
    if isinstance(f, FVar):
        return frozenset().union(*(expr_free_vars(a) for a in f.args))
    if isinstance(f, (FBox, FDia)):
        return act_free_vars(f.alpha) | formula_free_data(f.body)
    if isinstance(f, (FForall, FExists)):
        return formula_free_data(f.body) - {f.var}
    if isinstance(f, FFix):
        inits = frozenset().union(*(expr_free_vars(e) for _, _, e in f.params))
        return inits | (formula_free_data(f.body) - {p for p, _, _ in f.params})
    return frozenset().union(*(formula_free_data(c) for c in formula_children(f)))


def fix_names(f: MuFormula) -> list[str]:
    out = []
    if isinstance(f, FFix):
        out.append(f.name)
    for c in formula_children(f):
        out.extend(fix_names(c))
    return out


def show_formula(f: MuFormula, prec: int = 0) -> str:
    """Render in spec-file syntax; the result parses back to ``f``."""
    if isinstance(f, FVal):
        e = f.expr
        if isinstance(e, Const) and isinstance(e.value, bool):
            return "true" if e.value else "false"
        # data atoms are wrapped so that && and || stay at formula level
        return "(" + show(e) + ")"
    if isinstance(f, FVar):
        if not f.args:
            return f.name
        return f"{f.name}(" + ", ".join(show(a) for a in f.args) + ")"
    if isinstance(f, FNot):
        return "!" + show_formula(f.arg, 4)
    if isinstance(f, FAnd):
        s = f"{show_formula(f.left, 3)} && {show_formula(f.right, 3)}"
        return f"({s})" if prec > 3 else s
    if isinstance(f, FOr):
        s = f"{show_formula(f.left, 2)} || {show_formula(f.right, 2)}"
        return f"({s})" if prec > 2 else s
    if isinstance(f, FImp):
        s = f"{show_formula(f.left, 2)} => {show_formula(f.right, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(f, FBox):
        return f"[{show_action(f.alpha)}]" + show_formula(f.body, 4)
    if isinstance(f, FDia):
        return f"<{show_action(f.alpha)}>" + show_formula(f.body, 4)
    if isinstance(f, (FForall, FExists)):
        q = "forall" if isinstance(f, FForall) else "exists"
        s = f"{q} {f.var}: {f.sort.ref()} . {show_formula(f.body)}"
        return f"({s})" if prec > 0 else s
    if isinstance(f, FFix):
        ps = ""
        if f.params:
            ps = "(" + ", ".join(f"{n}: {s.ref()} := {show(e)}" for n, s, e in f.params) + ")"
        s = f"{f.sigma} {f.name}{ps} . {show_formula(f.body)}"
        return f"({s})" if prec > 0 else s
    raise TypeError(f)


def show_process(lps: LinearProcess) -> str:
    ps = ", ".join(f"{n}: {s.ref()}" for n, s in lps.params)
    lines = [f"proc {lps.name}({ps}) ="]
    for k, sm in enumerate(lps.summands):
        head = ""
        if sm.sum_vars:
            head = "sum " + ", ".join(f"{v}: {s.ref()}" for v, s in sm.sum_vars) + " . "
        act = sm.action
        if sm.args:
            act += "(" + ", ".join(show(a) for a in sm.args) + ")"
        ups = [f"{n} := {show(g)}" for (n, _), g in zip(lps.params, sm.next_state)
               if g != Var(n)]
        sep = "    " if k == 0 else "  + "
        lines.append(f"{sep}{head}{show(sm.guard)} -> {act} . {lps.name}({', '.join(ups)})")
    lines[-1] += ";"
    return "\n".join(lines)
