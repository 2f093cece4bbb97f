"""Bounded-depth tree-like unravelling of a pointed structure.

Tree nodes are sequences of nonempty sets of at most k worlds starting with
{u}.  A copy (w, v) of world w at node v is identified with (w, v') for a
child v' whenever w belongs to both labels; worlds of the unravelling are
the resulting classes.  Relations are copied inside each node.
"""

from __future__ import annotations

import itertools

from .ast import budget
from .errors import TooLarge
from .games import WIN
from .structures import Structure
from .treedecomp import TreeDecomposition

UNRAVEL_CAP = 10**6


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the copy from the earlier node as representative
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _labels(K, k):
    out = []
    for size in range(1, k + 1):
        out.extend(frozenset(c) for c in itertools.combinations(K.worlds, size))
    return out


def unravel(K, u, k, depth):
    """Returns (K_hat, u_hat, td); worlds of K_hat are named "w#n" where w is
    the underlying world of K and n the first tree node holding the class."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if depth < 0:
        raise ValueError("depth must be non-negative")
    labels = _labels(K, k)
    cap = budget(UNRAVEL_CAP)
    lam = [frozenset([u])]
    parent = {0: None}
    frontier = [0]
    for _ in range(depth):
        nxt = []
        for v in frontier:
            for s in labels:
                if len(lam) >= cap:
                    raise TooLarge(f"unravelling exceeds {cap} tree nodes")
                parent[len(lam)] = v
                nxt.append(len(lam))
                lam.append(s)
        frontier = nxt
    uf = _UnionFind()
    order = {w: i for i, w in enumerate(K.worlds)}
    for v, s in enumerate(lam):
        for w in s:
            uf.find((v, order[w]))
        p = parent[v]
        if p is not None:
            for w in s & lam[p]:
                uf.union((p, order[w]), (v, order[w]))
    name = {}
    for v, s in enumerate(lam):
        for w in sorted(s, key=order.get):
            rv, _ = uf.find((v, order[w]))
            name[(v, w)] = f"{w}#{rv}"
    worlds = sorted(set(name.values()), key=lambda n: (int(n.rsplit("#", 1)[1]), order[n.rsplit("#", 1)[0]]))
    unary = {p: set() for p in K.unary}
    for p, ws in K.unary.items():
        for (v, w), n in name.items():
            if w in ws:
                unary[p].add(n)
    binary = {a: set() for a in K.binary}
    for a, ps in K.binary.items():
        for v, s in enumerate(lam):
            for x, y in ps:
                if x in s and y in s:
                    binary[a].add((name[(v, x)], name[(v, y)]))
    higher = {}
    for r, (ar, ts) in K.higher.items():
        out = set()
        for v, s in enumerate(lam):
            for t in ts:
                if all(w in s for w in t):
                    out.add(tuple(name[(v, w)] for w in t))
        higher[r] = (ar, out)
    Khat = Structure(worlds, unary, binary, higher)
    bags = {v: frozenset(name[(v, w)] for w in s) for v, s in enumerate(lam)}
    td = TreeDecomposition(bags, parent, 0)
    return Khat, name[(0, u)], td


def projection(world):
    """Underlying world of an unravelled world name."""
    return world.rsplit("#", 1)[0]


class ProjectionHint:
    """Duplicator advice for bisimulation games between K (first structure)
    and its unravelling (second structure).

    Answers whose underlying world matches Spoiler's pebble are tried first.
    While Spoiler plays in the unravelling, the projection is a legal
    homomorphic answer to every move, so Spoiler can only win by stacking
    all pebbles on one class and switching back.  `known_win` checks exactly
    those continuations when they fit in the remaining rounds; otherwise it
    returns False and the caller searches normally.
    """

    def order(self, arena, dpos, cands):
        _, i, side, u, v = dpos
        if i == 0:
            target = [projection(w) if side == 1 else w for w in u]
            return sorted(cands, key=lambda t: _mismatch(t, target, side))
        target = projection(u[i - 1]) if side == 1 else u[i - 1]
        return sorted(cands, key=lambda t: _label(t[i - 1], side) != target)

    def known_win(self, arena, pos, r, survive):
        _, side, u, v = pos
        if side != 1 or arena.universal or tuple(projection(w) for w in u) != v:
            return False
        k = len(u)
        if r > k:
            # stacking on an unoccupied class may pay off; not covered here
            return False
        for c in set(u):
            m = sum(w != c for w in u)
            if m >= r:
                continue
            sw = arena.switch(("s", 1, (c,) * k, (projection(c),) * k))
            if sw is None or sw == WIN or not survive(sw, r - m):
                return False
        return True


def _label(w, side):
    # side 0: Spoiler in K, Duplicator answers in the unravelling
    return projection(w) if side == 0 else w


def _mismatch(t, target, side):
    return sum(_label(w, side) != x for w, x in zip(t, target))
