"""Reference implementations used as test oracles.

They follow the textbook definitions as literally as possible and share no
code with the package beyond the expression classes.
"""

import itertools

from cpdlp import ast as A
from cpdlp import untc as U


class Naive:
    """Direct denotational semantics, no decomposition, no caching tricks."""

    def __init__(self, K):
        self.K = K
        self.W = list(K.worlds)

    def formula(self, phi):
        W = self.W
        if isinstance(phi, A.Prop):
            return {w for w in W if w in self.K.unary.get(phi.name, ())}
        if isinstance(phi, A.Not):
            return set(W) - self.formula(phi.sub)
        if isinstance(phi, A.And):
            return self.formula(phi.left) & self.formula(phi.right)
        if isinstance(phi, A.Diamond):
            r = self.program(phi.prog)
            return {u for u in W if any((u, v) in r for v in W)}
        if isinstance(phi, A.Loop):
            r = self.program(phi.prog)
            return {u for u in W if (u, u) in r}
        raise TypeError(phi)

    def program(self, pi):
        W = self.W
        if isinstance(pi, A.Epsilon):
            return {(u, u) for u in W}
        if isinstance(pi, A.Universal):
            return {(u, v) for u in W for v in W}
        if isinstance(pi, A.Atomic):
            return set(self.K.binary.get(pi.name, ()))
        if isinstance(pi, A.Converse):
            return {(v, u) for u, v in self.K.binary.get(pi.name, ())}
        if isinstance(pi, A.Union):
            return self.program(pi.left) | self.program(pi.right)
        if isinstance(pi, A.Intersect):
            return self.program(pi.left) & self.program(pi.right)
        if isinstance(pi, A.Compose):
            r1, r2 = self.program(pi.left), self.program(pi.right)
            return {(u, w) for u, v in r1 for v2, w in r2 if v == v2}
        if isinstance(pi, A.Star):
            r = self.program(pi.prog)
            out = set()
            for u in W:
                seen, stack = {u}, [u]
                while stack:
                    x = stack.pop()
                    for a, b in r:
                        if a == x and b not in seen:
                            seen.add(b)
                            stack.append(b)
                out |= {(u, v) for v in seen}
            return out
        if isinstance(pi, A.Test):
            return {(u, u) for u in self.formula(pi.formula)}
        if isinstance(pi, A.Conj):
            return {tuple(t) for t in self.conj(pi.atoms, (pi.source, pi.target))}
        raise TypeError(pi)

    def conj(self, atoms, out_vars):
        vs = sorted({v for a in atoms for v in a.vars} | set(out_vars))
        rels = []
        for a in atoms:
            if isinstance(a, A.PAtom):
                rels.append((a.vars, self.program(a.prog)))
            else:
                ar, ts = self.K.higher.get(a.rel, (None, ()))
                rels.append((a.vars, set(ts)))
        out = set()
        for vals in itertools.product(self.W, repeat=len(vs)):
            nu = dict(zip(vs, vals))
            if all(tuple(nu[v] for v in args) in r for args, r in rels):
                out.add(tuple(nu[v] for v in out_vars))
        return out

    def denote(self, e):
        return self.formula(e) if isinstance(e, A.Formula) else self.program(e)


def untc_holds(K, phi, nu):
    """First-order satisfaction; tc is the at-least-one-step closure."""
    W = list(K.worlds)
    if isinstance(phi, U.Rel):
        t = tuple(nu[a] for a in phi.args)
        if len(t) == 1:
            return t[0] in K.unary.get(phi.name, ())
        if len(t) == 2:
            return t in K.binary.get(phi.name, ())
        return t in K.higher.get(phi.name, (None, ()))[1]
    if isinstance(phi, U.Eq):
        return nu[phi.x] == nu[phi.y]
    if isinstance(phi, U.UAnd):
        return untc_holds(K, phi.left, nu) and untc_holds(K, phi.right, nu)
    if isinstance(phi, U.UOr):
        return untc_holds(K, phi.left, nu) or untc_holds(K, phi.right, nu)
    if isinstance(phi, U.UNot):
        return not untc_holds(K, phi.body, nu)
    if isinstance(phi, U.Exists):
        for vals in itertools.product(W, repeat=len(phi.vars)):
            if untc_holds(K, phi.body, {**nu, **dict(zip(phi.vars, vals))}):
                return True
        return False
    if isinstance(phi, U.Tc):
        step = {(a, b) for a in W for b in W if untc_holds(K, phi.body, {**nu, phi.u: a, phi.v: b})}
        start, goal = nu[phi.x], nu[phi.y]
        frontier = {b for a, b in step if a == start}
        seen = set(frontier)
        while frontier:
            frontier = {b for a, b in step if a in frontier} - seen
            seen |= frontier
        return goal in seen
    raise TypeError(phi)


def brute_treewidth(vertices, edges):
    """Minimum over all elimination orderings of the largest neighbourhood
    at elimination time."""
    vertices = list(vertices)
    if not vertices:
        return 0
    adj0 = {v: set() for v in vertices}
    for e in edges:
        e = list(e)
        if len(e) == 2 and e[0] != e[1]:
            adj0[e[0]].add(e[1])
            adj0[e[1]].add(e[0])
    best = len(vertices) - 1
    for order in itertools.permutations(vertices):
        adj = {v: set(ns) for v, ns in adj0.items()}
        width = 0
        for v in order:
            ns = adj.pop(v)
            width = max(width, len(ns))
            if width >= best:
                break
            for a in ns:
                adj[a].discard(v)
                adj[a] |= ns - {a}
        best = min(best, width)
    return best


def simulation_fixpoint(K, u, K2, v, k, universal=False):
    """k-simulation as the greatest relation on k-tuple pairs closed under
    the pebble moves; independent of the arena solver."""
    def nbr(S):
        adj = {w: {w} for w in S.worlds}
        for t in S.all_tuples():
            for a in t:
                adj[a].update(t)
        return adj

    n1, n2 = nbr(K), nbr(K2)
    tuples1 = list(itertools.product(K.worlds, repeat=k))
    tuples2 = list(itertools.product(K2.worlds, repeat=k))
    Z = {(s, t) for s in tuples1 for t in tuples2 if partial_hom(K, s, K2, t)}

    def moves(t, adj, i):
        return {t[:i] + (w,) + t[i + 1:] for j in range(k) if j != i for w in adj[t[j]]}

    changed = True
    while changed:
        changed = False
        for s, t in list(Z):
            ok = True
            for i in range(k):
                answers = moves(t, n2, i)
                for s2 in moves(s, n1, i):
                    if not any((s2, t2) in Z for t2 in answers):
                        ok = False
                        break
                if not ok:
                    break
            if ok and universal:
                for w in K.worlds:
                    if not any(((w,) * k, (w2,) * k) in Z for w2 in K2.worlds):
                        ok = False
                        break
            if not ok:
                Z.discard((s, t))
                changed = True
    return (tuple(u), tuple(v)) in Z


def partial_hom(K, s, K2, t):
    """s[i] -> t[i] is a well-defined map preserving every fact among s."""
    m = {}
    for a, b in zip(s, t):
        if m.setdefault(a, b) != b:
            return False
    for p, ws in K.unary.items():
        if any(a in ws and m[a] not in K2.unary.get(p, ()) for a in m):
            return False
    for r, ps in K.binary.items():
        for a, b in ps:
            if a in m and b in m and (m[a], m[b]) not in K2.binary.get(r, ()):
                return False
    for r, (_, ts) in K.higher.items():
        for tup in ts:
            if all(a in m for a in tup) and tuple(m[a] for a in tup) not in K2.higher.get(r, (None, ()))[1]:
                return False
    return True
