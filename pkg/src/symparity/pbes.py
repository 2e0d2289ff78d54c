"""Parameterised Boolean Equation Systems and the translation from a
linear process plus a mu-calculus formula.

Two translations are offered.  The structured one gives every modal
operator a header equation and one equation per matching summand, so the
shape of the process survives into the equation system.  The unstructured
one inlines the per-summand conjunction or disjunction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .data import (
    BOOL, Const, Expr, Op, Sort, UNDEF, Var, _may_be_undef, coerce, conjuncts,
    eval_data, free_vars as efree, mk_and, mk_not, show, simplify,
    substitute as esubst, format_value,
)
from .model import (
    ActionFormula, FAnd, FBox, FDia, FExists, FFix, FForall, FImp, FNot, FOr,
    FVal, FVar, LinearProcess, ModelError, MuFormula, act_free_vars,
    act_substitute, check_positive, match_expr, to_nnf,
)


class PbesError(Exception):
    pass


# -- predicate formulas ------------------------------------------------------


class PF:
    __slots__ = ()


@dataclass(frozen=True)
class PVal(PF):
    expr: Expr


@dataclass(frozen=True)
class PVar(PF):
    name: str
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class PNot(PF):
    arg: PF


@dataclass(frozen=True)
class PAnd(PF):
    parts: tuple[PF, ...]


@dataclass(frozen=True)
class POr(PF):
    parts: tuple[PF, ...]


@dataclass(frozen=True)
class PImp(PF):
    left: PF
    right: PF


@dataclass(frozen=True)
class PForall(PF):
    var: str
    sort: Sort
    body: PF


@dataclass(frozen=True)
class PExists(PF):
    var: str
    sort: Sort
    body: PF


PTRUE = PVal(Const(True))
PFALSE = PVal(Const(False))


def p_and(*parts: PF) -> PF:
    out: list[PF] = []
    for p in parts:
        if isinstance(p, PAnd):
            items = p.parts
        else:
            items = (p,)
        for q in items:
            if q == PTRUE:
                continue
            if q == PFALSE:
                return PFALSE
            if q not in out:
                out.append(q)
    if not out:
        return PTRUE
    if len(out) == 1:
        return out[0]
    return PAnd(tuple(out))


def p_or(*parts: PF) -> PF:
    out: list[PF] = []
    for p in parts:
        items = p.parts if isinstance(p, POr) else (p,)
        for q in items:
            if q == PFALSE:
                continue
            if q == PTRUE:
                return PTRUE
            if q not in out:
                out.append(q)
    if not out:
        return PFALSE
    if len(out) == 1:
        return out[0]
    return POr(tuple(out))


def p_imp(a: PF, b: PF) -> PF:
    if a == PTRUE:
        return b
    if a == PFALSE or b == PTRUE:
        return PTRUE
    if b == PFALSE and isinstance(a, PVal):
        return PVal(mk_not(a.expr))
    return PImp(a, b)


def p_val(e: Expr) -> PF:
    return PVal(simplify(e))


def is_simple(f: PF) -> bool:
    """True when ``f`` mentions no predicate variable."""
    if isinstance(f, PVal):
        return True
    if isinstance(f, PVar):
        return False
    return all(is_simple(c) for c in pf_children(f))


def pf_children(f: PF) -> tuple[PF, ...]:
    if isinstance(f, (PAnd, POr)):
        return f.parts
    if isinstance(f, PImp):
        return (f.left, f.right)
    if isinstance(f, PNot):
        return (f.arg,)
    if isinstance(f, (PForall, PExists)):
        return (f.body,)
    return ()


def pf_free(f: PF) -> frozenset[str]:
    if isinstance(f, PVal):
        return efree(f.expr)
    if isinstance(f, PVar):
        return frozenset().union(*(efree(a) for a in f.args))
    if isinstance(f, (PForall, PExists)):
        return pf_free(f.body) - {f.var}
    return frozenset().union(*(pf_free(c) for c in pf_children(f)))


def pf_bound(f: PF) -> frozenset[str]:
    out = frozenset((f.var,)) if isinstance(f, (PForall, PExists)) else frozenset()
    return out.union(*(pf_bound(c) for c in pf_children(f)))


def pf_calls(f: PF) -> list[PVar]:
    if isinstance(f, PVar):
        return [f]
    out = []
    for c in pf_children(f):
        out.extend(pf_calls(c))
    return out


def pf_substitute(f: PF, sub: Mapping[str, Expr]) -> PF:
    """Capture-avoiding substitution of data variables."""
    if not sub:
        return f
    if isinstance(f, PVal):
        return PVal(esubst(f.expr, sub))
    if isinstance(f, PVar):
        return PVar(f.name, tuple(esubst(a, sub) for a in f.args))
    if isinstance(f, PNot):
        return PNot(pf_substitute(f.arg, sub))
    if isinstance(f, PAnd):
        return PAnd(tuple(pf_substitute(p, sub) for p in f.parts))
    if isinstance(f, POr):
        return POr(tuple(pf_substitute(p, sub) for p in f.parts))
    if isinstance(f, PImp):
        return PImp(pf_substitute(f.left, sub), pf_substitute(f.right, sub))
    if isinstance(f, (PForall, PExists)):
        inner = {k: v for k, v in sub.items() if k != f.var}
        var, body = f.var, f.body
        incoming = frozenset().union(*(efree(v) for v in inner.values())) if inner else frozenset()
        if var in incoming:
            taken = incoming | pf_free(body) | set(inner)
            new = var
            while new in taken:
                new += "'"
            body = pf_substitute(body, {var: Var(new)})
            var = new
        return type(f)(var, f.sort, pf_substitute(body, inner))
    raise TypeError(f)


def show_pf(f: PF, prec: int = 0) -> str:
    if isinstance(f, PVal):
        e = f.expr
        if isinstance(e, Const):
            return format_value(e.value)
        return "(" + show(e) + ")"
    if isinstance(f, PVar):
        if not f.args:
            return f.name
        return f.name + "(" + ", ".join(show(a) for a in f.args) + ")"
    if isinstance(f, PNot):
        return "!" + show_pf(f.arg, 4)
    if isinstance(f, PAnd):
        s = " && ".join(show_pf(p, 3) for p in f.parts)
        return f"({s})" if prec > 3 else s
    if isinstance(f, POr):
        s = " || ".join(show_pf(p, 3) for p in f.parts)
        return f"({s})" if prec > 2 else s
    if isinstance(f, PImp):
        s = f"{show_pf(f.left, 2)} => {show_pf(f.right, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(f, (PForall, PExists)):
        q = "forall" if isinstance(f, PForall) else "exists"
        return f"({q} {f.var}: {f.sort.ref()} . {show_pf(f.body)})"
    raise TypeError(f)


# -- equation systems ----------------------------------------------------------


@dataclass(frozen=True)
class Equation:
    sigma: str  # "mu" | "nu"
    name: str
    params: tuple[tuple[str, Sort], ...]
    rhs: PF


@dataclass(frozen=True)
class Pbes:
    equations: tuple[Equation, ...]
    init_name: str
    init_args: tuple[Any, ...]

    def equation(self, name: str) -> Equation:
        for eq in self.equations:
            if eq.name == name:
                return eq
        raise KeyError(name)

    def names(self) -> list[str]:
        return [eq.name for eq in self.equations]


def show_pbes(p: Pbes) -> str:
    """Equation system in the ``pbes ... init ...;`` layout."""
    lines = []
    for k, eq in enumerate(p.equations):
        ps = ", ".join(f"{n}: {s.ref()}" for n, s in eq.params)
        head = "pbes " if k == 0 else "     "
        lines.append(f"{head}{eq.sigma} {eq.name}({ps}) = {show_pf(eq.rhs)};")
    args = ", ".join(format_value(v) for v in p.init_args)
    lines.append(f"init {p.init_name}({args});")
    return "\n".join(lines) + "\n"


def check_wellformed(p: Pbes) -> list[str]:
    """Diagnostics for a PBES; an empty list means well-formed."""
    diags = []
    names = {}
    for eq in p.equations:
        if eq.name in names:
            diags.append(f"duplicate equation {eq.name}")
        names[eq.name] = eq
    if p.init_name not in names:
        diags.append(f"init refers to unknown variable {p.init_name}")
    elif len(p.init_args) != len(names[p.init_name].params):
        diags.append("init has the wrong number of arguments")
    else:
        for v, (n, s) in zip(p.init_args, names[p.init_name].params):
            if not s.contains(v):
                diags.append(f"init value {format_value(v)} is not in the sort of {n}")
    for eq in p.equations:
        if eq.sigma not in ("mu", "nu"):
            diags.append(f"{eq.name}: unknown fixpoint {eq.sigma}")
        loose = pf_free(eq.rhs) - {n for n, _ in eq.params}
        if loose:
            diags.append(f"{eq.name}: free variables {sorted(loose)} are not parameters")
        for c in pf_calls(eq.rhs):
            if c.name not in names:
                diags.append(f"{eq.name}: unknown variable {c.name}")
            elif len(c.args) != len(names[c.name].params):
                diags.append(f"{eq.name}: {c.name} called with {len(c.args)} arguments")
        diags.extend(f"{eq.name}: {d}" for d in _positivity(eq.rhs, False))
    return diags


def _positivity(f: PF, neg: bool) -> list[str]:
    if isinstance(f, PVar):
        return [f"{f.name} occurs negatively"] if neg else []
    if isinstance(f, PNot):
        return _positivity(f.arg, not neg)
    if isinstance(f, PImp):
        return _positivity(f.left, not neg) + _positivity(f.right, neg)
    out = []
    for c in pf_children(f):
        out.extend(_positivity(c, neg))
    return out


# -- translation -------------------------------------------------------------


def _rename_formula(phi: MuFormula, taken: set[str]) -> MuFormula:
    """Give every binder (data or propositional) a unique name, distinct
    from everything in ``taken``.  Names are kept when already unique."""
    from .data import substitute as dsub

    def fresh(n):
        while n in taken:
            n += "'"
        taken.add(n)
        return n

    def go(f, dsub_map, psub_map):
        if isinstance(f, FVal):
            return FVal(dsub(f.expr, dsub_map))
        if isinstance(f, FVar):
            return FVar(psub_map.get(f.name, f.name), tuple(dsub(a, dsub_map) for a in f.args))
        if isinstance(f, FNot):
            return FNot(go(f.arg, dsub_map, psub_map))
        if isinstance(f, (FAnd, FOr, FImp)):
            return type(f)(go(f.left, dsub_map, psub_map), go(f.right, dsub_map, psub_map))
        if isinstance(f, (FBox, FDia)):
            return type(f)(act_substitute(f.alpha, dsub_map), go(f.body, dsub_map, psub_map))
        if isinstance(f, (FForall, FExists)):
            n = fresh(f.var)
            m = dict(dsub_map)
            m[f.var] = Var(n)
            return type(f)(n, f.sort, go(f.body, m, psub_map))
        if isinstance(f, FFix):
            x = fresh(f.name)
            pm = dict(psub_map)
            pm[f.name] = x
            m = dict(dsub_map)
            params = []
            for v, s, e in f.params:
                nv = fresh(v)
                params.append((nv, s, dsub(e, dsub_map)))
                m[v] = Var(nv)
            return FFix(f.sigma, x, tuple(params), go(f.body, m, pm))
        raise TypeError(f)

    return go(phi, {}, {})


class _Translator:
    def __init__(self, lps: LinearProcess, structured: bool):
        self.lps = lps
        self.structured = structured
        self.xp = list(lps.params)
        self.xp_names = set(lps.param_names)
        self.used_names: set[str] = set()
        self.counters: dict[str, int] = {}
        self.ctx: dict[str, list[tuple[str, Sort]]] = {}
        self.fix_params: dict[str, list[tuple[str, Sort]]] = {}
        self.all_data_names: set[str] = set()

    # free data variables, counting the context a fixpoint reference carries
    def ext_free(self, f: MuFormula) -> set[str]:
        if isinstance(f, FVal):
            return set(efree(f.expr))
        if isinstance(f, FVar):
            out = set().union(*(efree(a) for a in f.args))
            out |= {n for n, _ in self.ctx.get(f.name, [])}
            return out
        if isinstance(f, (FBox, FDia)):
            return set(act_free_vars(f.alpha)) | self.ext_free(f.body)
        if isinstance(f, (FForall, FExists)):
            return self.ext_free(f.body) - {f.var}
        if isinstance(f, FFix):
            out = set().union(*(efree(e) for _, _, e in f.params))
            inner = self.ext_free(f.body) - {p for p, _, _ in f.params}
            return out | inner | {n for n, _ in self.ctx.get(f.name, [])}
        if isinstance(f, (FAnd, FOr)):
            return self.ext_free(f.left) | self.ext_free(f.right)
        raise TypeError(f)

    def compute_contexts(self, phi: MuFormula):
        fixes = []

        def collect(f, scope):
            if isinstance(f, FFix):
                fixes.append((f, list(scope)))
                collect(f.body, scope + [(p, s) for p, s, _ in f.params])
            elif isinstance(f, (FForall, FExists)):
                collect(f.body, scope + [(f.var, f.sort)])
            elif isinstance(f, (FAnd, FOr)):
                collect(f.left, scope)
                collect(f.right, scope)
            elif isinstance(f, (FBox, FDia)):
                collect(f.body, scope)

        collect(phi, [])
        for f, _ in fixes:
            self.ctx[f.name] = []
            self.fix_params[f.name] = [(p, s) for p, s, _ in f.params]
        changed = True
        while changed:
            changed = False
            for f, scope in fixes:
                free = self.ext_free(f)
                new = [(n, s) for n, s in scope if n in free]
                if new != self.ctx[f.name]:
                    self.ctx[f.name] = new
                    changed = True

    def fresh(self, name: str) -> str:
        while name in self.used_names:
            name += "'"
        self.used_names.add(name)
        return name

    def header_name(self, parent: str) -> str:
        k = self.counters.get(parent, 0) + 1
        self.counters[parent] = k
        return self.fresh(f"{parent}_{k}")

    def xp_vars(self) -> tuple[Expr, ...]:
        return tuple(Var(n) for n, _ in self.xp)

    def ctx_vars(self, name: str) -> tuple[Expr, ...]:
        return tuple(Var(n) for n, _ in self.ctx.get(name, ()))

    # E --------------------------------------------------------------------
    def E(self, f: MuFormula) -> list[Equation]:
        if isinstance(f, FFix):
            vbar = self.fix_params[f.name] + self.xp + self.ctx[f.name]
            psi, Z = self.RHS(f.body, vbar, f.sigma, f.name)
            return [Equation(f.sigma, f.name, tuple(vbar), psi)] + Z + self.E(f.body)
        out = []
        if isinstance(f, (FAnd, FOr)):
            out += self.E(f.left) + self.E(f.right)
        elif isinstance(f, (FBox, FDia, FForall, FExists)):
            out += self.E(f.body)
        return out

    # RHS ------------------------------------------------------------------
    def RHS(self, f: MuFormula, vbar, sigma: str, parent: str) -> tuple[PF, list[Equation]]:
        if isinstance(f, FVal):
            return p_val(f.expr), []
        if isinstance(f, FAnd):
            a, za = self.RHS(f.left, vbar, sigma, parent)
            b, zb = self.RHS(f.right, vbar, sigma, parent)
            return p_and(a, b), za + zb
        if isinstance(f, FOr):
            a, za = self.RHS(f.left, vbar, sigma, parent)
            b, zb = self.RHS(f.right, vbar, sigma, parent)
            return p_or(a, b), za + zb
        if isinstance(f, (FForall, FExists)):
            psi, z = self.RHS(f.body, vbar + [(f.var, f.sort)], sigma, parent)
            q = PForall if isinstance(f, FForall) else PExists
            if f.var not in pf_free(psi):
                return psi, z
            return q(f.var, f.sort, psi), z
        if isinstance(f, FVar):
            return PVar(f.name, tuple(f.args) + self.xp_vars() + self.ctx_vars(f.name)), []
        if isinstance(f, FFix):
            inits = tuple(e for _, _, e in f.params)
            return PVar(f.name, inits + self.xp_vars() + self.ctx_vars(f.name)), []
        if isinstance(f, (FBox, FDia)):
            return self.modal(f, vbar, sigma, parent)
        raise PbesError(f"formula not in negation normal form: {type(f).__name__}")

    def modal(self, f, vbar, sigma, parent):
        box = isinstance(f, FBox)
        matching = [i for i in range(len(self.lps.summands))
                    if may_match(f.alpha, self.lps, i)]
        if not self.structured:
            psi, Z = self.RHS(f.body, vbar, sigma, parent)
            parts = [apply_group(i, psi, f.alpha, self.lps, box, self.all_data_names)
                     for i in matching]
            return (p_and(*parts) if box else p_or(*parts)), Z
        if len(matching) == 1:
            psi, Z = self.RHS(f.body, vbar, sigma, parent)
            return apply_group(matching[0], psi, f.alpha, self.lps, box,
                               self.all_data_names), Z
        if not matching:
            psi, Z = self.RHS(f.body, vbar, sigma, parent)
            return (PTRUE if box else PFALSE), Z
        header = self.header_name(parent)
        free = self.ext_free(f)
        params = tuple((n, s) for n, s in vbar if n in self.xp_names or n in free)
        args = tuple(Var(n) for n, _ in params)
        names = [self.fresh(f"{header}_{i + 1}") for i in matching]
        # nested headers keep numbering off the fixpoint variable (Z_3, Z_4)
        psi, Z = self.RHS(f.body, list(params), sigma, parent)
        conn = p_and if box else p_or
        eqs = [Equation(sigma, header, params, conn(*(PVar(n, args) for n in names)))]
        for n, i in zip(names, matching):
            rhs = apply_group(i, psi, f.alpha, self.lps, box, self.all_data_names)
            eqs.append(Equation(sigma, n, params, rhs))
        return PVar(header, args), eqs + Z


def may_match(alpha: ActionFormula, lps: LinearProcess, i: int) -> bool:
    """Whether summand ``i`` can possibly perform an action satisfying alpha."""
    sm = lps.summands[i]
    m = simplify(match_expr(alpha, sm.action, sm.args))
    return m != Const(False) and simplify(sm.guard) != Const(False)


def apply_group(i: int, psi: PF, alpha: ActionFormula, lps: LinearProcess,
                box: bool = True, avoid: Iterable[str] = ()) -> PF:
    """Formula for "psi after every (box) / some (diamond) alpha-step of summand i".

    Box gives ``forall y . (match && guard) => psi[x_p := g_i]`` and the
    diamond ``exists y . match && guard && psi[x_p := g_i]``.  Sum variables
    are primed when their names occur in ``avoid``, in ``psi`` or in
    ``alpha``, and equalities ``y == e`` with a defined ``e`` are resolved
    by substitution.
    """
    sm = lps.summands[i]
    taken = set(avoid) | set(lps.param_names) | pf_free(psi) | pf_bound(psi) | set(act_free_vars(alpha))
    ren = {}
    ys = []
    for y, s in sm.sum_vars:
        n = y
        while n in taken:
            n += "'"
        taken.add(n)
        ren[y] = Var(n)
        ys.append((n, s))
    guard = esubst(sm.guard, ren)
    args = tuple(esubst(a, ren) for a in sm.args)
    nxt = {x: esubst(g, ren) for x, g in zip(lps.param_names, sm.next_state)}
    nxt = {x: g for x, g in nxt.items() if g != Var(x)}
    cond = simplify(mk_and(match_expr(alpha, sm.action, args), guard))
    body = pf_substitute(psi, nxt)
    # one-point rule
    remaining = []
    for y, s in ys:
        hit = None
        for c in conjuncts(cond):
            if isinstance(c, Op) and c.op == "eq":
                a, b = c.args
                for lhs, rhs in ((a, b), (b, a)):
                    if lhs == Var(y) and y not in efree(rhs) and not _may_be_undef(rhs):
                        hit = (c, rhs)
                        break
            if hit:
                break
        # values of e must lie in the sort of y for the rule to be sound;
        # typing guarantees that for enumerations only
        if hit is None or not (s.kind in ("enum", "bool") or (
                isinstance(hit[1], Const) and s.contains(hit[1].value))):
            remaining.append((y, s))
            continue
        c, e = hit
        rest = [x for x in conjuncts(cond) if x is not c]
        cond = simplify(esubst(mk_and(*rest), {y: e}))
        body = pf_substitute(body, {y: e})
    if box:
        out = p_imp(PVal(cond), body)
    else:
        out = p_and(PVal(cond), body)
    for y, s in reversed(remaining):
        if y in pf_free(out):
            out = (PForall if box else PExists)(y, s, out)
    return out


def rhs(phi: MuFormula, vbar, sigma: str, lps: LinearProcess, structured: bool = True,
        parent: str = "X") -> tuple[PF, list[Equation]]:
    """RHS of a (negation-normal) formula with fresh equations named after
    ``parent``."""
    t = _Translator(lps, structured)
    t.compute_contexts(phi)
    t.used_names.add(parent)
    return t.RHS(phi, list(vbar), sigma, parent)


def translate(lps: LinearProcess, phi0: MuFormula, structured: bool = True) -> Pbes:
    """Equation system whose solution at the initial instance tells whether
    the initial state of ``lps`` satisfies ``phi0``."""
    try:
        check_positive(phi0)
    except ModelError as e:
        raise PbesError(str(e)) from None
    phi = to_nnf(phi0)
    if not isinstance(phi, FFix):
        raise PbesError("the formula must start with a fixpoint operator")
    taken = set(lps.param_names)
    phi = _rename_formula(phi, taken)
    t = _Translator(lps, structured)
    t.all_data_names = set(taken)
    t.used_names = {n for n in taken}
    t.compute_contexts(phi)
    if t.ctx[phi.name]:
        raise PbesError("the formula has free data variables")
    eqs = t.E(phi)
    init = []
    for (n, s), (_, _, e) in zip(t.fix_params[phi.name], phi.params):
        v = coerce(eval_data(e, {}), s)
        if v is UNDEF:
            raise PbesError(f"initial value of {n} is undefined")
        init.append(v)
    init.extend(lps.init)
    return Pbes(tuple(eqs), phi.name, tuple(init))
