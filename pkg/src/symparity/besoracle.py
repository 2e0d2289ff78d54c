"""Reference solver for small PBESs.

The system is expanded into a Boolean Equation System over the reachable
instances ``X(v)`` and solved by Gauss elimination, working from the last
equation to the first, with right-hand sides held as decision diagrams.
A second, brute-force solver evaluates the nested fixpoints directly and
is only usable on a handful of variables; it exists to check the first.

Formulas over BES variables are ``True``, ``False``, ``("v", i)``,
``("&", frozenset)`` or ``("|", frozenset)``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .data import UNDEF, coerce, enumerate_sort, eval_data
from .pbes import (
    PAnd, PExists, PForall, PImp, PNot, POr, PVal, PVar, Pbes, PbesError, is_simple,
)


class OracleLimit(Exception):
    pass


def _and(parts):
    out = set()
    for p in parts:
        if p is False:
            return False
        if p is True:
            continue
        if isinstance(p, tuple) and p[0] == "&":
            out |= p[1]
        else:
            out.add(p)
    if not out:
        return True
    if len(out) == 1:
        return next(iter(out))
    return ("&", frozenset(out))


def _or(parts):
    out = set()
    for p in parts:
        if p is True:
            return True
        if p is False:
            continue
        if isinstance(p, tuple) and p[0] == "|":
            out |= p[1]
        else:
            out.add(p)
    if not out:
        return False
    if len(out) == 1:
        return next(iter(out))
    return ("|", frozenset(out))


@dataclass
class Bes:
    sigmas: list[str]          # per variable
    blocks: list[int]          # PBES equation index per variable
    rhs: list                  # formula per variable
    labels: list[tuple]        # (equation name, argument values)
    init: int


def expand(p: Pbes, max_vars: int = 10_000) -> Bes:
    """Instantiate the reachable part of ``p`` as a BES."""
    eqs = {eq.name: (k, eq) for k, eq in enumerate(p.equations)}
    index: dict[tuple, int] = {}
    labels: list[tuple] = []
    todo: list[int] = []

    def var(name, args):
        key = (name, args)
        i = index.get(key)
        if i is None:
            if len(labels) >= max_vars:
                raise OracleLimit(f"more than {max_vars} BES variables")
            i = index[key] = len(labels)
            labels.append(key)
            todo.append(i)
        return ("v", i)

    def ev(f, env, neg=False):
        # ``neg`` counts negations above f modulo two
        if isinstance(f, PVal):
            return (eval_data(f.expr, env) is True) != neg
        if isinstance(f, PVar):
            if neg:
                raise PbesError(f"{f.name} occurs under an odd number of negations")
            k, eq = eqs[f.name]
            vals = tuple(coerce(eval_data(a, env), s) for a, (_, s) in zip(f.args, eq.params))
            if any(v is UNDEF for v in vals):
                raise PbesError(f"call {f.name} with an undefined argument")
            return var(f.name, vals)
        if isinstance(f, PNot):
            return ev(f.arg, env, not neg)
        if isinstance(f, PImp):
            if not is_simple(f.left):
                raise PbesError("implication with a non-simple antecedent")
            return ev(POr((PNot(f.left), f.right)), env, neg)
        if isinstance(f, (PAnd, POr)):
            conj = isinstance(f, PAnd) != neg
            # decide on the simple parts first so guarded calls are never
            # instantiated when their guard fails
            simple = [q for q in f.parts if is_simple(q)]
            rest = [q for q in f.parts if not is_simple(q)]
            if conj:
                if not all(ev(q, env, neg) for q in simple):
                    return False
                return _and(ev(q, env, neg) for q in rest)
            if any(ev(q, env, neg) for q in simple):
                return True
            return _or(ev(q, env, neg) for q in rest)
        if isinstance(f, (PForall, PExists)):
            univ = isinstance(f, PForall) != neg
            outs = []
            for v in enumerate_sort(f.sort):
                e = dict(env)
                e[f.var] = v
                outs.append(ev(f.body, e, neg))
                if univ and outs[-1] is False:
                    return False
                if not univ and outs[-1] is True:
                    return True
            return _and(outs) if univ else _or(outs)
        raise TypeError(f)

    init = var(p.init_name, tuple(p.init_args))[1]
    rhs: dict[int, object] = {}
    while todo:
        i = todo.pop()
        name, args = labels[i]
        _, eq = eqs[name]
        env = dict(zip((n for n, _ in eq.params), args))
        rhs[i] = ev(eq.rhs, env)
    n = len(labels)
    return Bes(
        sigmas=[eqs[labels[i][0]][1].sigma for i in range(n)],
        blocks=[eqs[labels[i][0]][0] for i in range(n)],
        rhs=[rhs[i] for i in range(n)],
        labels=labels,
        init=init,
    )


class _Bdd:
    """Reduced ordered decision diagrams; node 0 is false, node 1 is true."""

    def __init__(self, max_nodes: int):
        self.level = [1 << 60, 1 << 60]
        self.lo = [0, 1]
        self.hi = [0, 1]
        self.unique: dict[tuple, int] = {}
        self.memo: dict[tuple, int] = {}
        self.max_nodes = max_nodes

    def mk(self, lvl, lo, hi):
        if lo == hi:
            return lo
        key = (lvl, lo, hi)
        u = self.unique.get(key)
        if u is None:
            if len(self.level) >= self.max_nodes:
                raise OracleLimit(f"more than {self.max_nodes} decision nodes")
            u = self.unique[key] = len(self.level)
            self.level.append(lvl)
            self.lo.append(lo)
            self.hi.append(hi)
        return u

    def ite(self, f, g, h):
        if f == 1:
            return g
        if f == 0:
            return h
        if g == h:
            return g
        if g == 1 and h == 0:
            return f
        key = (f, g, h)
        r = self.memo.get(key)
        if r is not None:
            return r
        lvl = min(self.level[f], self.level[g], self.level[h])
        f0, f1 = self._cof(f, lvl)
        g0, g1 = self._cof(g, lvl)
        h0, h1 = self._cof(h, lvl)
        r = self.mk(lvl, self.ite(f0, g0, h0), self.ite(f1, g1, h1))
        self.memo[key] = r
        return r

    def _cof(self, u, lvl):
        if self.level[u] == lvl:
            return self.lo[u], self.hi[u]
        return u, u

    def restrict(self, u, lvl, val, memo):
        if self.level[u] > lvl:
            return u
        if self.level[u] == lvl:
            return self.hi[u] if val else self.lo[u]
        r = memo.get(u)
        if r is None:
            r = memo[u] = self.mk(self.level[u], self.restrict(self.lo[u], lvl, val, memo),
                                  self.restrict(self.hi[u], lvl, val, memo))
        return r

    def support(self, u):
        out: set[int] = set()
        seen = set()
        stack = [u]
        while stack:
            x = stack.pop()
            if x < 2 or x in seen:
                continue
            seen.add(x)
            out.add(self.level[x])
            stack.append(self.lo[x])
            stack.append(self.hi[x])
        return out

    def build(self, f, pos):
        if f is True:
            return 1
        if f is False:
            return 0
        if f[0] == "v":
            return self.mk(pos[f[1]], 0, 1)
        # combine smaller operands first
        parts = sorted((self.build(x, pos) for x in f[1]), key=lambda u: -self.level[u])
        acc = parts[0]
        for u in parts[1:]:
            acc = self.ite(acc, u, 0) if f[0] == "&" else self.ite(acc, 1, u)
        return acc


def _vars(f, out):
    if f is True or f is False:
        return
    if f[0] == "v":
        out.add(f[1])
    else:
        for x in f[1]:
            _vars(x, out)


def _fill(f, val, memo):
    """Replace solved variables of ``f`` by their values."""
    if f is True or f is False:
        return f
    if f[0] == "v":
        return val.get(f[1], f)
    r = memo.get(f)
    if r is None:
        parts = [_fill(x, val, memo) for x in f[1]]
        r = memo[f] = _and(parts) if f[0] == "&" else _or(parts)
    return r


def _sccs(n, succ):
    """Tarjan's algorithm, iteratively; components come out sinks first."""
    index = [-1] * n
    low = [0] * n
    on = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    count = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = count
        count += 1
        stack.append(root)
        on[root] = True
        while work:
            v, it = work[-1]
            w = next(it, None)
            if w is not None:
                if index[w] < 0:
                    index[w] = low[w] = count
                    count += 1
                    stack.append(w)
                    on[w] = True
                    work.append((w, iter(succ[w])))
                elif on[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def _gauss(sigmas, fs, dd):
    """Gauss elimination on a closed system listed in equation order."""
    n = len(fs)
    occurs: list[set[int]] = [set() for _ in range(n)]
    rhs = list(fs)
    for k in range(n):
        for v in dd.support(rhs[k]):
            occurs[v].add(k)
    for k in reversed(range(n)):
        # local resolution, then substitute into earlier equations
        f = dd.restrict(rhs[k], k, sigmas[k] == "nu", {})
        rhs[k] = f
        for j in sorted(occurs[k]):
            if j >= k:
                continue
            old = dd.support(rhs[j])
            g = rhs[j]
            rhs[j] = dd.ite(f, dd.restrict(g, k, True, {}), dd.restrict(g, k, False, {}))
            new = dd.support(rhs[j])
            for v in old - new:
                occurs[v].discard(j)
            for v in new - old:
                occurs[v].add(j)
    # back substitution: each equation now only mentions earlier variables
    val = [False] * n
    for k in range(n):
        u = rhs[k]
        while u > 1:
            if dd.level[u] >= k:
                raise AssertionError("elimination left an open formula")
            u = dd.hi[u] if val[dd.level[u]] else dd.lo[u]
        val[k] = u == 1
    return val


def solve_gauss(bes: Bes, max_nodes: int = 2_000_000) -> dict[int, bool]:
    """Solve by Gauss elimination; returns the value of every variable.

    Strongly connected components of the dependency graph are solved
    bottom-up, so each elimination only sees one component.  Inside a
    component the right-hand sides are decision diagrams ordered like the
    equations.
    """
    n = len(bes.rhs)
    succ = []
    for f in bes.rhs:
        vs: set[int] = set()
        _vars(f, vs)
        succ.append(sorted(vs))
    rank = {i: (bes.blocks[i], i) for i in range(n)}
    val: dict[int, bool] = {}
    for comp in _sccs(n, succ):
        memo: dict = {}
        if len(comp) == 1 and comp[0] not in succ[comp[0]]:
            f = _fill(bes.rhs[comp[0]], val, memo)
            if f is not True and f is not False:
                raise AssertionError("component depends on an unsolved variable")
            val[comp[0]] = f
            continue
        comp.sort(key=rank.__getitem__)
        pos = {v: k for k, v in enumerate(comp)}
        dd = _Bdd(max_nodes)
        fs = [dd.build(_fill(bes.rhs[v], val, memo), pos) for v in comp]
        for v, x in zip(comp, _gauss([bes.sigmas[v] for v in comp], fs, dd)):
            val[v] = x
    return val


def solve_bruteforce(bes: Bes) -> dict[int, bool]:
    """Nested fixpoint evaluation straight from the definition; exponential."""
    order = sorted(range(len(bes.rhs)), key=lambda i: (bes.blocks[i], i))
    n = len(order)
    if n > 14:
        raise OracleLimit("brute force is limited to 14 variables")

    def evalf(f, env):
        if f is True or f is False:
            return f
        if f[0] == "v":
            return env[f[1]]
        if f[0] == "&":
            return all(evalf(x, env) for x in f[1])
        return any(evalf(x, env) for x in f[1])

    def solve(k, env):
        # values of order[k:], given env for order[:k]
        if k == n:
            return {}
        i = order[k]
        z = bes.sigmas[i] == "nu"
        while True:
            e = dict(env)
            e[i] = z
            rest = solve(k + 1, e)
            e.update(rest)
            nz = evalf(bes.rhs[i], e)
            if nz == z:
                rest[i] = z
                return rest
            z = nz

    return solve(0, {})


def solve_pbes(p: Pbes, max_vars: int = 10_000) -> bool:
    """Truth value of ``p`` at its initial instance."""
    bes = expand(p, max_vars)
    return solve_gauss(bes)[bes.init]
