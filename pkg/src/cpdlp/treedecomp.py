"""Tree decompositions of small graphs.

Exact tree-width is computed with the subset dynamic program over
elimination orderings: TW(S) is the best width achievable when the vertices
of S are eliminated first, and the cost of eliminating v after S is the
number of vertices outside S reachable from v through S.
"""

from __future__ import annotations

from .errors import NoRootBag, TooLarge, WidthExceeded
from .structures import UGraph

MAX_VERTICES = 16


class TreeDecomposition:
    def __init__(self, bags, parent, root):
        self.bags = {n: frozenset(b) for n, b in bags.items()}
        self.parent = dict(parent)
        self.root = root

    @property
    def width(self):
        if not self.bags:
            return -1
        return max(len(b) for b in self.bags.values()) - 1

    def nodes(self):
        return sorted(self.bags)

    def children(self, n):
        return sorted(m for m, p in self.parent.items() if p == n)

    def neighbours(self, n):
        out = self.children(n)
        if self.parent.get(n) is not None:
            out.append(self.parent[n])
        return out

    def tree_edges(self):
        return [(n, p) for n, p in self.parent.items() if p is not None]

    def postorder(self):
        out = []
        stack = [(self.root, False)]
        while stack:
            n, done = stack.pop()
            if done:
                out.append(n)
                continue
            stack.append((n, True))
            for c in reversed(self.children(n)):
                stack.append((c, False))
        return out

    def dump(self):
        """Indented text rendering, one bag per line."""
        lines = []

        def go(n, depth):
            lines.append("  " * depth + "{" + ", ".join(sorted(map(str, self.bags[n]))) + "}")
            for c in self.children(n):
                go(c, depth + 1)

        go(self.root, 0)
        return "\n".join(lines)

    def __repr__(self):
        return f"TreeDecomposition(width={self.width}, nodes={len(self.bags)})"


def _reach_cost(adj_bits, n, s_mask, v):
    """Number of vertices outside S and v reachable from v through S."""
    seen = 1 << v
    frontier = 1 << v
    out = 0
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            i = low.bit_length() - 1
            f ^= low
            nb = adj_bits[i] & ~seen
            seen |= nb
            out |= nb & ~s_mask
            nxt |= nb & s_mask
        frontier = nxt
    return bin(out).count("1")


def elimination_order(g):
    """Optimal elimination ordering and its width."""
    vs = list(g.vertices)
    n = len(vs)
    if n > MAX_VERTICES:
        raise TooLarge(f"exact tree-width limited to {MAX_VERTICES} vertices")
    idx = {v: i for i, v in enumerate(vs)}
    adj_bits = [0] * n
    for e in g.edges:
        if len(e) == 2:
            a, b = (idx[x] for x in e)
            adj_bits[a] |= 1 << b
            adj_bits[b] |= 1 << a
    full = (1 << n) - 1
    best = {0: (-1, None)}
    # iterate subsets by increasing size so predecessors are ready
    by_size = sorted(range(1 << n), key=lambda m: (bin(m).count("1"), m))
    for mask in by_size:
        if mask == 0:
            continue
        cand = None
        m = mask
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            rest = mask ^ low
            w = max(best[rest][0], _reach_cost(adj_bits, n, rest, v))
            if cand is None or w < cand[0]:
                cand = (w, v)
        best[mask] = cand
    order = []
    mask = full
    while mask:
        v = best[mask][1]
        order.append(v)
        mask ^= 1 << v
    order.reverse()
    return [vs[i] for i in order], max(best[full][0], 0) if n else -1


def from_elimination_order(g, order):
    """Decomposition induced by eliminating vertices in `order`."""
    if not order:
        return TreeDecomposition({0: frozenset()}, {0: None}, 0)
    adj = g.adjacency()
    adj = {v: set(ns) for v, ns in adj.items()}
    pos = {v: i for i, v in enumerate(order)}
    bags = {}
    higher = {}
    for v in order:
        later = {u for u in adj[v] if pos[u] > pos[v]}
        bags[pos[v]] = frozenset({v} | later)
        higher[pos[v]] = later
        for a in later:
            adj[a] |= later - {a}
    parent = {}
    roots = []
    for v in order:
        i = pos[v]
        if higher[i]:
            parent[i] = min(pos[u] for u in higher[i])
        else:
            parent[i] = None
            roots.append(i)
    root = roots[-1]
    for r in roots[:-1]:
        parent[r] = root
    return TreeDecomposition(bags, parent, root)


def decompose(g):
    order, _ = elimination_order(g)
    return from_elimination_order(g, order)


def treewidth(g):
    if not g.vertices:
        return 0
    return elimination_order(g)[1]


def validate(g, td):
    """Check coverage of vertices and edges, connectedness, and tree shape."""
    nodes = set(td.bags)
    if td.root not in nodes or set(td.parent) != nodes:
        return False
    # tree shape: every node reaches the root without cycles
    ok = {td.root} if td.parent[td.root] is None else set()
    for n in nodes:
        path = []
        m = n
        while m not in ok:
            if m is None or m not in nodes or m in path:
                return False
            path.append(m)
            m = td.parent[m]
        ok.update(path)
    holding = {}
    for n, b in td.bags.items():
        for v in b:
            holding.setdefault(v, set()).add(n)
    if set(holding) != set(g.vertices):
        return False
    for e in g.edges:
        vs = list(e)
        if not set.intersection(*(holding[v] for v in vs)):
            return False
    for v, hold in holding.items():
        # connected iff exactly one holding node has its parent outside the set
        tops = [n for n in hold if td.parent[n] not in hold]
        if len(tops) != 1:
            return False
    return True


def _star_all(names):
    from . import ast as A

    if not names:
        return A.EPS
    parts = [A.Atomic(a) for a in names] + [A.Converse(a) for a in names]
    return A.Star(A.union_all(parts))


def clique_complete(c, n):
    """Add closure atoms between every pair of variables sharing a bag.

    Returns the extended conjunctive program and a decomposition of width at
    most `n` in which every bag is a clique of the extended program's graph.
    """
    from . import ast as A
    from .measures import underlying_graphs

    _, gfull = underlying_graphs(c)
    td = decompose(gfull)
    if td.width > n:
        raise WidthExceeded(f"tree-width {td.width} exceeds {n}")
    star = _star_all(A.atomic_programs(c))
    atoms = set(c.atoms)
    for bag in td.bags.values():
        vs = sorted(bag)
        for i, a in enumerate(vs):
            for b in vs[i + 1:]:
                atoms.add(A.PAtom(star, a, b))
    return A.Conj(atoms, c.source, c.target), td


def normalize_for_algorithm1(td, root_pair):
    """Contract bags contained in a neighbouring bag and reroot at a bag
    holding both designated variables."""
    x, y = root_pair
    adj = {n: set() for n in td.bags}
    for a, b in td.tree_edges():
        adj[a].add(b)
        adj[b].add(a)
    bags = dict(td.bags)
    changed = True
    while changed and len(bags) > 1:
        changed = False
        for n in sorted(bags):
            hit = None
            for m in sorted(adj[n]):
                if bags[n] <= bags[m]:
                    hit = m
                    break
            if hit is None:
                continue
            for o in adj[n]:
                if o != hit:
                    adj[o].discard(n)
                    adj[o].add(hit)
                    adj[hit].add(o)
            adj[hit].discard(n)
            del adj[n]
            del bags[n]
            changed = True
            break
    roots = [n for n in sorted(bags) if {x, y} <= bags[n]]
    if not roots:
        raise NoRootBag(f"no bag contains both {x} and {y}")
    root = roots[0]
    parent = {root: None}
    stack = [root]
    while stack:
        a = stack.pop()
        for b in sorted(adj[a]):
            if b not in parent:
                parent[b] = a
                stack.append(b)
    return TreeDecomposition(bags, parent, root)
