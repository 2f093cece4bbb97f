"""Finite relational structures, their JSON form, Gaifman graphs and distances."""

from __future__ import annotations

import json
from collections import deque

from .errors import FormatError, UnknownWorld

INF = float("inf")


class UGraph:
    """Simple undirected graph; edges are frozensets of size 1 or 2."""

    def __init__(self, vertices=(), edges=()):
        self.vertices = list(dict.fromkeys(vertices))
        vs = set(self.vertices)
        es = []
        seen = set()
        for e in edges:
            e = frozenset(e)
            if not 1 <= len(e) <= 2:
                raise ValueError("edges have one or two endpoints")
            if not e <= vs:
                raise ValueError(f"edge {set(e)} leaves the vertex set")
            if e not in seen:
                seen.add(e)
                es.append(e)
        self.edges = es

    def adjacency(self):
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            if len(e) == 2:
                u, v = tuple(e)
                adj[u].add(v)
                adj[v].add(u)
        return adj

    def with_edge(self, u, v):
        return UGraph(self.vertices, list(self.edges) + [frozenset((u, v))])

    def components(self):
        adj = self.adjacency()
        seen = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            comp = []
            stack = [v]
            seen.add(v)
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            comps.append(comp)
        return comps

    def is_connected(self):
        return len(self.components()) <= 1

    def is_clique(self, vs):
        adj = self.adjacency()
        vs = list(vs)
        return all(b in adj[a] for i, a in enumerate(vs) for b in vs[i + 1:])

    def edge_set(self):
        return {e for e in self.edges if len(e) == 2}

    def __eq__(self, other):
        return (
            isinstance(other, UGraph)
            and set(self.vertices) == set(other.vertices)
            and set(self.edges) == set(other.edges)
        )

    def __repr__(self):
        es = sorted(tuple(sorted(map(str, e))) for e in self.edges)
        return f"UGraph({self.vertices}, {es})"


class Structure:
    """A finite structure over named worlds.

    `unary` maps proposition names to sets of worlds, `binary` maps
    atomic-program names to sets of pairs, and `higher` maps relation names to
    (arity, set of tuples) for arities of at least three.  Worlds are strings;
    internally they are numbered in declaration order.
    """

    def __init__(self, worlds, unary=None, binary=None, higher=None):
        self.worlds = list(worlds)
        if len(set(self.worlds)) != len(self.worlds):
            raise FormatError("worlds", "duplicate world")
        self.index = {w: i for i, w in enumerate(self.worlds)}
        self.unary = {}
        self.binary = {}
        self.higher = {}
        for name, ws in (unary or {}).items():
            for w in ws:
                self._check(w, f"unary.{name}")
            self.unary[name] = frozenset(ws)
        for name, pairs in (binary or {}).items():
            ps = set()
            for p in pairs:
                p = tuple(p)
                if len(p) != 2:
                    raise FormatError(f"binary.{name}", "pairs have two entries")
                for w in p:
                    self._check(w, f"binary.{name}")
                ps.add(p)
            self.binary[name] = frozenset(ps)
        for name, (arity, tuples) in (higher or {}).items():
            if arity < 3:
                raise FormatError(f"relations.{name}.arity", "arity must be at least 3")
            ts = set()
            for t in tuples:
                t = tuple(t)
                if len(t) != arity:
                    raise FormatError(f"relations.{name}.tuples", "tuple length differs from arity")
                for w in t:
                    self._check(w, f"relations.{name}")
                ts.add(t)
            self.higher[name] = (arity, frozenset(ts))
        self._gaifman = None
        self._dist = None

    def _check(self, w, path):
        if w not in self.index:
            raise FormatError(path, f"undeclared world {w!r}")

    @property
    def size(self):
        return len(self.worlds)

    def prop(self, name):
        return self.unary.get(name, frozenset())

    def rel(self, name):
        return self.binary.get(name, frozenset())

    def relation(self, name):
        return self.higher.get(name, (None, frozenset()))

    def all_tuples(self):
        for ps in self.binary.values():
            yield from ps
        for _, ts in self.higher.values():
            yield from ts

    def gaifman(self):
        if self._gaifman is None:
            edges = set()
            for t in self.all_tuples():
                for i, a in enumerate(t):
                    for b in t[i + 1:]:
                        if a != b:
                            edges.add(frozenset((a, b)))
            self._gaifman = UGraph(self.worlds, sorted(edges, key=lambda e: sorted(e)))
        return self._gaifman

    def neighbours(self):
        """World -> worlds at distance at most one (including itself)."""
        adj = self.gaifman().adjacency()
        return {w: {w} | adj[w] for w in self.worlds}

    def distance(self, u, v):
        for w in (u, v):
            if w not in self.index:
                raise UnknownWorld(w)
        if u == v:
            return 0
        adj = self.gaifman().adjacency()
        seen = {u: 0}
        q = deque([u])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen[y] = seen[x] + 1
                    if y == v:
                        return seen[y]
                    q.append(y)
        return INF

    def component_of(self):
        """World -> index of its Gaifman component."""
        comp = {}
        for i, c in enumerate(self.gaifman().components()):
            for w in c:
                comp[w] = i
        return comp

    def same_component(self, u, v):
        return self.distance(u, v) != INF

    def restrict(self, keep):
        keep = [w for w in self.worlds if w in set(keep)]
        ks = set(keep)
        return Structure(
            keep,
            {p: [w for w in ws if w in ks] for p, ws in self.unary.items()},
            {a: [t for t in ps if set(t) <= ks] for a, ps in self.binary.items()},
            {r: (ar, [t for t in ts if set(t) <= ks]) for r, (ar, ts) in self.higher.items()},
        )

    def with_relations(self, unary=None, binary=None, higher=None, worlds=None):
        """Copy with some relations replaced or added."""
        u = dict(self.unary)
        b = dict(self.binary)
        h = dict(self.higher)
        u.update(unary or {})
        b.update(binary or {})
        h.update(higher or {})
        return Structure(worlds if worlds is not None else self.worlds, u, b, h)

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        strip = lambda d: {k: v for k, v in d.items() if v}
        return (
            self.worlds == other.worlds
            and strip(self.unary) == strip(other.unary)
            and strip(self.binary) == strip(other.binary)
            and {k: v for k, v in self.higher.items() if v[1]}
            == {k: v for k, v in other.higher.items() if v[1]}
        )

    def __repr__(self):
        return f"Structure({len(self.worlds)} worlds)"

    # JSON ---------------------------------------------------------------

    def to_json(self):
        order = self.index

        def key(t):
            return tuple(order[w] for w in t)

        return {
            "worlds": list(self.worlds),
            "unary": {p: sorted(ws, key=order.get) for p, ws in self.unary.items()},
            "binary": {a: [list(t) for t in sorted(ps, key=key)] for a, ps in self.binary.items()},
            "relations": {
                r: {"arity": ar, "tuples": [list(t) for t in sorted(ts, key=key)]}
                for r, (ar, ts) in self.higher.items()
            },
        }


def _expect(cond, path, msg):
    if not cond:
        raise FormatError(path, msg)


def from_json(data):
    _expect(isinstance(data, dict), "$", "expected an object")
    worlds = data.get("worlds", [])
    _expect(isinstance(worlds, list), "worlds", "expected a list")
    for i, w in enumerate(worlds):
        _expect(isinstance(w, str), f"worlds[{i}]", "world ids are strings")
    _expect(len(set(worlds)) == len(worlds), "worlds", "duplicate world")
    for key in data:
        _expect(key in ("worlds", "unary", "binary", "relations"), key, "unknown section")

    unary = data.get("unary", {})
    _expect(isinstance(unary, dict), "unary", "expected an object")
    for p, ws in unary.items():
        _expect(isinstance(ws, list), f"unary.{p}", "expected a list")
        _expect(len(set(map(str, ws))) == len(ws), f"unary.{p}", "duplicate tuple")
    binary = data.get("binary", {})
    _expect(isinstance(binary, dict), "binary", "expected an object")
    for a, ps in binary.items():
        _expect(isinstance(ps, list), f"binary.{a}", "expected a list")
        for i, p in enumerate(ps):
            _expect(isinstance(p, list) and len(p) == 2, f"binary.{a}[{i}]", "expected a pair")
        _expect(len({tuple(p) for p in ps}) == len(ps), f"binary.{a}", "duplicate tuple")
    rels = data.get("relations", {})
    _expect(isinstance(rels, dict), "relations", "expected an object")
    higher = {}
    for r, spec in rels.items():
        _expect(isinstance(spec, dict), f"relations.{r}", "expected an object")
        ar = spec.get("arity")
        _expect(isinstance(ar, int), f"relations.{r}.arity", "expected an integer")
        ts = spec.get("tuples", [])
        _expect(isinstance(ts, list), f"relations.{r}.tuples", "expected a list")
        for i, t in enumerate(ts):
            _expect(isinstance(t, list), f"relations.{r}.tuples[{i}]", "expected a list")
        _expect(len({tuple(t) for t in ts}) == len(ts), f"relations.{r}.tuples", "duplicate tuple")
        higher[r] = (ar, [tuple(t) for t in ts])
    return Structure(worlds, unary, binary, higher)


def load(raw):
    """Parse a structure from JSON bytes or text."""
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FormatError("$", f"invalid JSON: {exc.msg}") from None
    return from_json(data)


def save(k):
    """Serialize with sorted keys; worlds keep their declared order."""
    return (json.dumps(k.to_json(), sort_keys=True, indent=2) + "\n").encode("utf-8")


def load_file(path):
    with open(path, "rb") as fh:
        return load(fh.read())
