"""Random small PBESs over finite data for equivalence tests.

Every call gets arguments inside the callee's sorts, so the expansion
oracle never meets an undefined instance.  Negation only wraps simple
formulas or comes in pairs, which keeps every system monotone.
"""
from __future__ import annotations

import random

from symparity.data import BOOL, Const, Op, Var, enum_sort, enumerate_sort, int_sort
from symparity.pbes import (
    Equation, PAnd, PExists, PForall, PImp, PNot, POr, PVal, PVar, Pbes,
)

E = enum_sort("E", ["a", "b", "c"])
N = int_sort("N", 0, 2)
SORTS = [BOOL, E, N]


class _Gen:
    def __init__(self, rng: random.Random, eqs):
        self.rng = rng
        self.eqs = eqs  # (name, params)
        self.fresh = 0

    def term(self, sort, scope):
        rng = self.rng
        same = [n for n, s in scope.items() if s == sort]
        r = rng.random()
        if same and r < 0.55:
            return Var(rng.choice(same))
        if sort == N and same and r < 0.75:
            x = Var(rng.choice(same))
            # stays inside 0..2
            return Op("if", (Op("lt", (x, Const(2))), Op("add", (x, Const(1))), Const(0)))
        if sort == E and r < 0.75:
            c = self.simple(scope, 1)
            return Op("if", (c, Const(rng.choice(E.constants)), Const(rng.choice(E.constants))))
        return Const(rng.choice(enumerate_sort(sort)))

    def simple(self, scope, depth=2):
        rng = self.rng
        r = rng.random()
        if depth <= 0 or r < 0.4:
            bools = [n for n, s in scope.items() if s == BOOL]
            if bools and rng.random() < 0.5:
                return Var(rng.choice(bools))
            others = [(n, s) for n, s in scope.items() if s != BOOL]
            if others and rng.random() < 0.8:
                n, s = rng.choice(others)
                op = rng.choice(["eq", "ne"] + (["lt", "le"] if s == N else []))
                return Op(op, (Var(n), self.term(s, scope)))
            return Const(rng.random() < 0.5)
        if r < 0.6:
            return Op("not", (self.simple(scope, depth - 1),))
        return Op(rng.choice(["and", "or"]), (self.simple(scope, depth - 1),
                                              self.simple(scope, depth - 1)))

    def call(self, scope):
        name, params = self.rng.choice(self.eqs)
        return PVar(name, tuple(self.term(s, scope) for _, s in params))

    def formula(self, scope, depth):
        rng = self.rng
        if depth <= 0:
            return self.call(scope) if rng.random() < 0.85 else PVal(self.simple(scope))
        r = rng.random()
        if r < 0.25:
            return self.call(scope)
        if r < 0.3:
            return PVal(self.simple(scope))
        if r < 0.5:
            parts = tuple(self.formula(scope, depth - 1) for _ in range(rng.randint(2, 3)))
            return PAnd(parts)
        if r < 0.7:
            parts = tuple(self.formula(scope, depth - 1) for _ in range(rng.randint(2, 3)))
            return POr(parts)
        if r < 0.8:
            return PImp(PVal(self.simple(scope)), self.formula(scope, depth - 1))
        if r < 0.93:
            self.fresh += 1
            v = f"y{self.fresh}"
            s = rng.choice(SORTS)
            body = self.formula({**scope, v: s}, depth - 1)
            return (PForall if rng.random() < 0.5 else PExists)(v, s, body)
        if r < 0.97:
            return PNot(PNot(self.formula(scope, depth - 1)))
        return PNot(PVal(self.simple(scope)))


def random_pbes(rng: random.Random, max_eqs: int = 5, depth: int = 3) -> Pbes:
    n = rng.randint(min(2, max_eqs), max_eqs)
    eqs = []
    for i in range(n):
        k = rng.randint(1, 3)
        params = tuple((f"x{j}", rng.choice(SORTS)) for j in range(k))
        eqs.append((f"X{i}", params))
    g = _Gen(rng, eqs)
    out = []
    for name, params in eqs:
        sigma = rng.choice(["mu", "nu"])
        rhs = g.formula(dict(params), rng.randint(2, depth))
        out.append(Equation(sigma, name, params, rhs))
    init_name, init_params = eqs[0]
    init = tuple(rng.choice(enumerate_sort(s)) for _, s in init_params)
    return Pbes(tuple(out), init_name, init)
