"""Model checking over finite structures.

Formulas denote sets of worlds and programs denote sets of pairs.  Each
subexpression is evaluated once per call (children first) and cached.
Conjunctive programs are evaluated either by enumerating all assignments
(the oracle) or by joining bag relations along a tree decomposition.
"""

from __future__ import annotations

import itertools

from . import ast as A
from . import untc as U
from .ast import budget
from .errors import ArityMismatch, BudgetExceeded, UnboundVariable
from .structures import UGraph
from .syntax import to_text
from .treedecomp import decompose

DECOMP_CAP = 10**7


class Evaluator:
    """Evaluation context for one structure; caches are per instance."""

    def __init__(self, K, mode="decomp"):
        self.K = K
        self.mode = mode
        self.worlds = tuple(K.worlds)
        self.unary = {}
        self.binary = {}

    # names ---------------------------------------------------------------

    def _prop(self, name):
        K = self.K
        if name not in K.unary and (name in K.binary or name in K.higher):
            raise ArityMismatch(f"{name} is not a proposition in the structure")
        return K.prop(name)

    def _rel(self, name):
        K = self.K
        if name not in K.binary and (name in K.unary or name in K.higher):
            raise ArityMismatch(f"{name} is not a binary relation in the structure")
        return K.rel(name)

    def _higher(self, name, arity):
        K = self.K
        if name in K.higher:
            ar, ts = K.higher[name]
            if ar != arity:
                raise ArityMismatch(f"{name} has arity {ar}, used with {arity}")
            return ts
        if name in K.unary or name in K.binary:
            raise ArityMismatch(f"{name} has arity {1 if name in K.unary else 2}, used with {arity}")
        return frozenset()

    # formulas ------------------------------------------------------------

    def formula(self, phi):
        hit = self.unary.get(phi)
        if hit is not None:
            return hit
        if isinstance(phi, A.Prop):
            out = frozenset(self._prop(phi.name))
        elif isinstance(phi, A.Not):
            out = frozenset(self.worlds) - self.formula(phi.sub)
        elif isinstance(phi, A.And):
            out = self.formula(phi.left) & self.formula(phi.right)
        elif isinstance(phi, A.Diamond):
            out = frozenset(u for u, _ in self.program(phi.prog))
        elif isinstance(phi, A.Loop):
            out = frozenset(u for u, v in self.program(phi.prog) if u == v)
        else:
            raise TypeError(f"not a formula: {phi!r}")
        self.unary[phi] = out
        return out

    # programs ------------------------------------------------------------

    def program(self, pi):
        hit = self.binary.get(pi)
        if hit is not None:
            return hit
        if isinstance(pi, A.Epsilon):
            out = frozenset((w, w) for w in self.worlds)
        elif isinstance(pi, A.Universal):
            out = frozenset(itertools.product(self.worlds, repeat=2))
        elif isinstance(pi, A.Atomic):
            out = frozenset(self._rel(pi.name))
        elif isinstance(pi, A.Converse):
            out = frozenset((v, u) for u, v in self._rel(pi.name))
        elif isinstance(pi, A.Union):
            out = self.program(pi.left) | self.program(pi.right)
        elif isinstance(pi, A.Intersect):
            out = self.program(pi.left) & self.program(pi.right)
        elif isinstance(pi, A.Compose):
            out = compose(self.program(pi.left), self.program(pi.right))
        elif isinstance(pi, A.Star):
            out = star(self.program(pi.prog), self.worlds)
        elif isinstance(pi, A.Test):
            out = frozenset((w, w) for w in self.formula(pi.formula))
        elif isinstance(pi, A.Conj):
            out = frozenset(self.conj(pi.atoms, (pi.source, pi.target)))
        else:
            raise TypeError(f"not a program: {pi!r}")
        self.binary[pi] = out
        return out

    # conjunctive programs -------------------------------------------------

    def constraints(self, atoms):
        """Materialize each atom as (distinct variables, tuples over them)."""
        out = []
        for atom in sorted(atoms, key=to_text):
            if isinstance(atom, A.PAtom):
                rel = self.program(atom.prog)
            else:
                rel = self._higher(atom.rel, len(atom.args))
            out.append(_normalize(atom.vars, rel))
        return out

    def conj(self, atoms, out_vars, mode=None):
        mode = mode or self.mode
        cons = self.constraints(atoms)
        if mode == "brute":
            return conj_brute(cons, out_vars, self.worlds)
        return conj_decomp(cons, out_vars, self.worlds)


def _normalize(vars_, tuples):
    """Drop tuples inconsistent with repeated variables and keep one column
    per distinct variable."""
    distinct = tuple(dict.fromkeys(vars_))
    pos = [vars_.index(v) for v in distinct]
    rows = set()
    for t in tuples:
        if all(t[i] == t[vars_.index(v)] for i, v in enumerate(vars_)):
            rows.add(tuple(t[p] for p in pos))
    return distinct, rows


def compose(r1, r2):
    succ = {}
    for u, v in r2:
        succ.setdefault(u, []).append(v)
    return frozenset((u, w) for u, v in r1 for w in succ.get(v, ()))


def star(r, worlds):
    """Reflexive-transitive closure by repeated squaring."""
    cur = frozenset(r) | frozenset((w, w) for w in worlds)
    while True:
        nxt = compose(cur, cur)
        if nxt <= cur:
            return cur
        cur = cur | nxt


def conj_brute(cons, out_vars, worlds):
    """Oracle: enumerate every assignment of the variables."""
    vs = sorted({v for vars_, _ in cons for v in vars_} | set(out_vars))
    idx = {v: i for i, v in enumerate(vs)}
    out = set()
    for assign in itertools.product(worlds, repeat=len(vs)):
        if all(tuple(assign[idx[v]] for v in vars_) in rows for vars_, rows in cons):
            out.add(tuple(assign[idx[v]] for v in out_vars))
    return out


def _join(r1, r2, cap):
    v1, rows1 = r1
    v2, rows2 = r2
    common = [v for v in v2 if v in v1]
    extra = [v for v in v2 if v not in v1]
    k1 = [v1.index(v) for v in common]
    k2 = [v2.index(v) for v in common]
    e2 = [v2.index(v) for v in extra]
    index = {}
    for t in rows2:
        index.setdefault(tuple(t[i] for i in k2), []).append(tuple(t[i] for i in e2))
    out = set()
    for t in rows1:
        for rest in index.get(tuple(t[i] for i in k1), ()):
            out.add(t + rest)
            if len(out) > cap:
                raise BudgetExceeded("bag relation exceeds the assignment budget")
    return tuple(v1) + tuple(extra), out


def _join_order(cons):
    """Greedy order: next is the constraint sharing most variables with
    those already joined, smaller relations first on ties."""
    rest = sorted(cons, key=lambda c: len(c[1]))
    seen = set()
    out = []
    while rest:
        best = max(range(len(rest)), key=lambda i: (len(seen.intersection(rest[i][0])), -i))
        c = rest.pop(best)
        seen.update(c[0])
        out.append(c)
    return out


def _project(r, vars_):
    vs, rows = r
    pos = [vs.index(v) for v in vars_]
    return tuple(vars_), {tuple(t[p] for p in pos) for t in rows}


def conj_decomp(cons, out_vars, worlds):
    """Join bag relations bottom-up along a tree decomposition of the
    constraint graph extended with a clique on the output variables."""
    cap = budget(DECOMP_CAP)
    outs = tuple(dict.fromkeys(out_vars))
    vs = sorted({v for vars_, _ in cons for v in vars_} | set(outs))
    edges = [frozenset((a, b)) for vars_, _ in cons for i, a in enumerate(vars_) for b in vars_[i + 1:]]
    edges += [frozenset((a, b)) for i, a in enumerate(outs) for b in outs[i + 1:]]
    td = decompose(UGraph(vs, edges))
    # reroot at a bag holding every output variable
    root = min(n for n, b in td.bags.items() if set(outs) <= b)
    adj = {n: set() for n in td.bags}
    for a, b in td.tree_edges():
        adj[a].add(b)
        adj[b].add(a)
    parent = {root: None}
    order = [root]
    for n in order:
        for m in sorted(adj[n]):
            if m not in parent:
                parent[m] = n
                order.append(m)
    assigned = {n: [] for n in td.bags}
    for c in cons:
        home = min(n for n in order if set(c[0]) <= td.bags[n])
        assigned[home].append(c)
    # a bag relation only carries the variables constrained in its subtree;
    # the missing columns are unrestricted and are filled in at the root
    rel = {}
    for n in reversed(order):
        parts = list(assigned[n])
        for child in (m for m in order if parent.get(m) == n):
            r = rel.pop(child)
            parts.append(_project(r, [v for v in r[0] if v in td.bags[n]]))
        cur = ((), {()})
        for c in _join_order(parts):
            cur = _join(cur, c, cap)
        rel[n] = cur
    cur = rel[root]
    for v in outs:
        if v not in cur[0]:
            cur = _join(cur, ((v,), {(w,) for w in worlds}), cap)
    final = _project(cur, outs)
    pos = [outs.index(v) for v in out_vars]
    return {tuple(t[p] for p in pos) for t in final[1]}


# public API ----------------------------------------------------------------


def eval_formula(K, phi, mode="decomp"):
    return Evaluator(K, mode).formula(phi)


def eval_program(K, pi, mode="decomp"):
    return Evaluator(K, mode).program(pi)


def eval_conj(K, atoms, out_vars, mode="decomp"):
    return Evaluator(K, mode).conj(atoms, tuple(out_vars), mode)


def eval_expr(K, e, mode="decomp"):
    ev = Evaluator(K, mode)
    return ev.formula(e) if isinstance(e, A.Formula) else ev.program(e)


# first-order side ----------------------------------------------------------


class UntcEvaluator:
    def __init__(self, K):
        self.K = K
        self.worlds = tuple(K.worlds)
        self.tc = {}
        self.ev = Evaluator(K)

    def _lookup(self, v, nu):
        try:
            return nu[v]
        except KeyError:
            raise UnboundVariable(v) from None

    def holds(self, phi, nu):
        if isinstance(phi, U.Rel):
            args = tuple(self._lookup(a, nu) for a in phi.args)
            n = len(args)
            if n == 1:
                return args[0] in self.ev._prop(phi.name)
            if n == 2:
                return args in self.ev._rel(phi.name)
            return args in self.ev._higher(phi.name, n)
        if isinstance(phi, U.Eq):
            return self._lookup(phi.x, nu) == self._lookup(phi.y, nu)
        if isinstance(phi, U.UAnd):
            return self.holds(phi.left, nu) and self.holds(phi.right, nu)
        if isinstance(phi, U.UOr):
            return self.holds(phi.left, nu) or self.holds(phi.right, nu)
        if isinstance(phi, U.UNot):
            return not self.holds(phi.body, nu)
        if isinstance(phi, U.Exists):
            for vals in itertools.product(self.worlds, repeat=len(phi.vars)):
                inner = dict(nu)
                inner.update(zip(phi.vars, vals))
                if self.holds(phi.body, inner):
                    return True
            return False
        if isinstance(phi, U.Tc):
            pair = (self._lookup(phi.x, nu), self._lookup(phi.y, nu))
            return pair in self.closure(phi)
        raise TypeError(f"not a UNTC formula: {phi!r}")

    def closure(self, phi):
        """At-least-one-step transitive closure of the body relation."""
        hit = self.tc.get(phi)
        if hit is None:
            step = frozenset(
                (a, b)
                for a in self.worlds
                for b in self.worlds
                if self.holds(phi.body, {phi.u: a, phi.v: b})
            )
            cur = step
            while True:
                nxt = cur | compose(cur, step)
                if nxt == cur:
                    break
                cur = nxt
            hit = self.tc[phi] = cur
        return hit

    def relation(self, phi, vars_):
        """Tuples over `vars_` satisfying phi (vars_ must cover its free variables)."""
        out = set()
        for vals in itertools.product(self.worlds, repeat=len(vars_)):
            if self.holds(phi, dict(zip(vars_, vals))):
                out.add(vals)
        return out


def eval_untc(K, phi, nu):
    return UntcEvaluator(K).holds(phi, dict(nu))


def untc_relation(K, phi, vars_):
    return UntcEvaluator(K).relation(phi, tuple(vars_))
