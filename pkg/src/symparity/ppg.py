"""Parameterised parity games: equation systems in which every right-hand
side is a pure conjunction or a pure disjunction of atoms.

Atoms of a conjunctive equation are

* a simple formula (no predicate variables),
* a call ``X(e)``,
* a guard atom ``b => X(e)`` with ``b`` simple,
* ``forall y: D . atom``.

Disjunctive equations use ``b && X(e)`` and ``exists`` instead.
Subformulas that fit neither shape are moved into fresh equations placed
directly after the equation they came from.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

from .data import Sort, Var, mk_not
from .pbes import (
    PF, PAnd, PExists, PForall, PImp, PNot, POr, PVal, PVar, Equation, Pbes,
    PbesError, is_simple, p_and, p_or, pf_children, pf_free, pf_substitute,
    show_pf, PTRUE, PFALSE,
)

CONJ = "conj"
DISJ = "disj"


@dataclass(frozen=True)
class PpgEquation:
    sigma: str
    name: str
    params: tuple[tuple[str, Sort], ...]
    kind: str
    atoms: tuple[PF, ...]
    priority: int = -1

    @property
    def rhs(self) -> PF:
        if not self.atoms:
            return PTRUE if self.kind == CONJ else PFALSE
        if len(self.atoms) == 1:
            return self.atoms[0]
        return PAnd(self.atoms) if self.kind == CONJ else POr(self.atoms)

    def to_equation(self) -> Equation:
        return Equation(self.sigma, self.name, self.params, self.rhs)


@dataclass(frozen=True)
class Ppg:
    equations: tuple[PpgEquation, ...]
    init_name: str
    init_args: tuple[Any, ...]

    def to_pbes(self) -> Pbes:
        return Pbes(tuple(e.to_equation() for e in self.equations),
                    self.init_name, self.init_args)

    def equation(self, name: str) -> PpgEquation:
        for eq in self.equations:
            if eq.name == name:
                return eq
        raise KeyError(name)


# -- atom shapes ---------------------------------------------------------------


def atom_shape(a: PF, kind: str) -> tuple[list[tuple[str, Sort]], PF | None, PF | None]:
    """Split an atom into (quantified variables, guard, call).

    A simple atom is returned as ``([], a, None)`` with the formula in the
    guard position; a call without guard has guard ``None``.
    """
    qs = []
    q = PForall if kind == CONJ else PExists
    while isinstance(a, q):
        qs.append((a.var, a.sort))
        a = a.body
    if is_simple(a):
        return qs, a, None
    if isinstance(a, PVar):
        return qs, None, a
    if kind == CONJ and isinstance(a, PImp) and isinstance(a.right, PVar) and is_simple(a.left):
        return qs, a.left, a.right
    if kind == DISJ and isinstance(a, PAnd) and len(a.parts) == 2 and is_simple(a.parts[0]) \
            and isinstance(a.parts[1], PVar):
        return qs, a.parts[0], a.parts[1]
    raise PbesError(f"not a {kind} atom: {show_pf(a)}")


def is_atom(a: PF, kind: str) -> bool:
    try:
        atom_shape(a, kind)
        return True
    except PbesError:
        return False


# -- negation normal form --------------------------------------------------------


def pf_nnf(f: PF, neg: bool = False) -> PF:
    """Push negations into simple subformulas; reject negated calls."""
    if is_simple(f):
        return _neg_simple(f) if neg else f
    if isinstance(f, PVar):
        if neg:
            raise PbesError(f"{f.name} occurs negatively")
        return f
    if isinstance(f, PNot):
        return pf_nnf(f.arg, not neg)
    if isinstance(f, PAnd):
        parts = [pf_nnf(p, neg) for p in f.parts]
        return p_or(*parts) if neg else p_and(*parts)
    if isinstance(f, POr):
        parts = [pf_nnf(p, neg) for p in f.parts]
        return p_and(*parts) if neg else p_or(*parts)
    if isinstance(f, PImp):
        if neg:
            return p_and(pf_nnf(f.left), pf_nnf(f.right, True))
        left = f.left
        if is_simple(left):
            return PImp(left, pf_nnf(f.right))
        return p_or(pf_nnf(left, True), pf_nnf(f.right))
    if isinstance(f, PForall):
        body = pf_nnf(f.body, neg)
        return (PExists if neg else PForall)(f.var, f.sort, body)
    if isinstance(f, PExists):
        body = pf_nnf(f.body, neg)
        return (PForall if neg else PExists)(f.var, f.sort, body)
    raise TypeError(f)


def _neg_simple(f: PF) -> PF:
    if isinstance(f, PVal):
        return PVal(mk_not(f.expr))
    return PNot(f)


# -- normalisation -------------------------------------------------------------


class _Norm:
    def __init__(self, pbes: Pbes):
        self.pbes = pbes
        self.used = {eq.name for eq in pbes.equations}
        self.out: list[PpgEquation] = []

    def fresh(self, base: str) -> str:
        k = 1
        while f"{base}_n{k}" in self.used:
            k += 1
        name = f"{base}_n{k}"
        self.used.add(name)
        return name

    def flatten(self, f: PF, kind: str, bound, hoist) -> list[PF]:
        """Atoms of ``f`` under the connective of ``kind``; ``hoist`` is
        called on subformulas that need their own equation."""
        if is_simple(f) or isinstance(f, PVar):
            return [f]
        if kind == CONJ:
            if isinstance(f, PAnd):
                return [a for p in f.parts for a in self.flatten(p, kind, bound, hoist)]
            if isinstance(f, PImp) and is_simple(f.left):
                atoms = self.flatten(f.right, kind, bound, hoist)
                return [_guard(f.left, a, kind) for a in atoms]
            if isinstance(f, PForall):
                atoms = self.flatten(f.body, kind, bound + [(f.var, f.sort)], hoist)
                return [_quant(f.var, f.sort, a, kind) for a in atoms]
        else:
            if isinstance(f, POr):
                return [a for p in f.parts for a in self.flatten(p, kind, bound, hoist)]
            if isinstance(f, PImp) and is_simple(f.left):
                return [_neg_simple(f.left)] + self.flatten(f.right, kind, bound, hoist)
            if isinstance(f, PAnd):
                simple = [p for p in f.parts if is_simple(p)]
                rest = [p for p in f.parts if not is_simple(p)]
                b = p_and(*simple)
                inner = rest[0] if len(rest) == 1 else PAnd(tuple(rest))
                if len(rest) == 1:
                    atoms = self.flatten(inner, kind, bound, hoist)
                else:
                    atoms = [hoist(inner, bound)]
                return [_guard(b, a, kind) for a in atoms]
            if isinstance(f, PExists):
                atoms = self.flatten(f.body, kind, bound + [(f.var, f.sort)], hoist)
                return [_quant(f.var, f.sort, a, kind) for a in atoms]
        return [hoist(f, bound)]

    def hoists(self, f: PF, kind: str) -> int:
        hoisted = []

        def fake(g, bound):
            hoisted.append(g)
            return PVar("_", ())

        self.flatten(f, kind, [], fake)
        return len(hoisted)

    def choose(self, f: PF) -> str:
        """Follow the top-level connective unless only the other kind avoids
        fresh equations.  Output equations are fixed points of this rule,
        which keeps normalisation idempotent."""
        top = CONJ if isinstance(f, (PAnd, PForall, PImp)) else DISJ
        other = DISJ if top == CONJ else CONJ
        if self.hoists(f, top) and not self.hoists(f, other):
            return other
        return top

    def equation(self, sigma, name, params, rhs: PF):
        rhs = pf_nnf(rhs)
        kind = self.choose(rhs)
        pending = []
        slot = len(self.out)
        self.out.append(None)

        def hoist(g, bound):
            extra = [(v, s) for v, s in bound if v in pf_free(g)]
            new_params = tuple(params) + tuple(extra)
            n = self.fresh(name)
            pending.append((n, new_params, g))
            return PVar(n, tuple(Var(v) for v, _ in new_params))

        atoms = _dedup(self.flatten(rhs, kind, [], hoist))
        neutral, absorbing = (PTRUE, PFALSE) if kind == CONJ else (PFALSE, PTRUE)
        atoms = [a for a in atoms if a != neutral] or [neutral]
        if absorbing in atoms:
            atoms = [absorbing]
        if len(atoms) == 1:
            a = atoms[0]
            if is_simple(a) or isinstance(a, PVar):
                kind = DISJ
            elif kind == DISJ and isinstance(a, PAnd):
                # a lone "b && X(e)" reads back as a conjunction
                kind, atoms = CONJ, list(a.parts)
        self.out[slot] = PpgEquation(sigma, name, tuple(params), kind, tuple(atoms))
        for n, ps, g in pending:
            self.equation(sigma, n, ps, g)


def _dedup(atoms):
    out = []
    for a in atoms:
        if a not in out:
            out.append(a)
    return out


def _guard(b: PF, a: PF, kind: str) -> PF:
    """Combine a simple guard with an atom of the given kind."""
    if b == PTRUE:
        return a
    if b == PFALSE:
        return PTRUE if kind == CONJ else PFALSE
    if kind == CONJ:
        if is_simple(a):
            return _simple_or(_neg_simple(b), a)
        if isinstance(a, PVar):
            return PImp(b, a)
        if isinstance(a, PImp):
            return PImp(p_and(b, a.left), a.right)
        if isinstance(a, PForall):
            var, body = _avoid(a, pf_free(b))
            return PForall(var, a.sort, _guard(b, body, kind))
    else:
        if is_simple(a):
            return p_and(b, a)
        if isinstance(a, PVar):
            return PAnd((b, a))
        if isinstance(a, PAnd):
            return PAnd((p_and(b, a.parts[0]), a.parts[1]))
        if isinstance(a, PExists):
            var, body = _avoid(a, pf_free(b))
            return PExists(var, a.sort, _guard(b, body, kind))
    raise PbesError(f"cannot guard {show_pf(a)}")


def _simple_or(a: PF, b: PF) -> PF:
    if isinstance(a, PVal) and isinstance(b, PVal):
        from .data import mk_or
        return PVal(mk_or(a.expr, b.expr))
    return p_or(a, b)


def _avoid(q, names):
    var, body = q.var, q.body
    if var in names:
        new = var
        while new in names or new in pf_free(body):
            new += "'"
        body = pf_substitute(body, {var: Var(new)})
        var = new
    return var, body


def _quant(var: str, sort: Sort, a: PF, kind: str) -> PF:
    if var not in pf_free(a):
        return a
    return (PForall if kind == CONJ else PExists)(var, sort, a)


def normalize_ppg(p: Pbes) -> Ppg:
    """Rewrite every equation into a pure conjunction or disjunction of atoms.

    Priorities are left unset; see :func:`assign_priorities`.
    """
    n = _Norm(p)
    for eq in p.equations:
        n.equation(eq.sigma, eq.name, eq.params, eq.rhs)
    return Ppg(tuple(n.out), p.init_name, p.init_args)


def assign_priorities(p: Ppg) -> Ppg:
    """Block ranks for min-parity: each maximal run of equal fixpoints gets
    one rank, even for nu-blocks and odd for mu-blocks."""
    out = []
    rank = None
    prev = None
    for eq in p.equations:
        if rank is None:
            rank = 0 if eq.sigma == "nu" else 1
        elif eq.sigma != prev:
            rank += 1
        prev = eq.sigma
        out.append(replace(eq, priority=rank))
    return Ppg(tuple(out), p.init_name, p.init_args)


def check_ppg(p: Ppg) -> list[str]:
    """Diagnostics for the classification invariant."""
    diags = []
    for eq in p.equations:
        if eq.kind not in (CONJ, DISJ):
            diags.append(f"{eq.name}: unknown kind {eq.kind}")
            continue
        for a in eq.atoms:
            if not is_atom(a, eq.kind):
                diags.append(f"{eq.name}: {show_pf(a)} is not a {eq.kind} atom")
    return diags


def show_ppg(p: Ppg) -> str:
    lines = []
    for k, eq in enumerate(p.equations):
        ps = ", ".join(f"{n}: {s.ref()}" for n, s in eq.params)
        head = "pbes " if k == 0 else "     "
        tag = f"  % {eq.kind}, priority {eq.priority}" if eq.priority >= 0 else f"  % {eq.kind}"
        lines.append(f"{head}{eq.sigma} {eq.name}({ps}) = {show_pf(eq.rhs)};{tag}")
    from .data import format_value
    lines.append(f"init {p.init_name}(" + ", ".join(format_value(v) for v in p.init_args) + ");")
    return "\n".join(lines) + "\n"
