"""Reductions used on the way to satisfiability checking.

unnested_form, remove_r_atoms and remove_universal preserve satisfiability
(not equivalence).  ksplit and tree_translate work with ICPDL programs on
tree-shaped structures.
"""

from __future__ import annotations

import itertools

from . import ast as A
from .ast import budget
from .errors import BlowupExceeded, NotICPDL, PreconditionViolation
from .measures import classify_dialect, reverse, underlying_graphs
from .syntax import to_text

SPLIT_CAP = 10**5
SHAPE_CAP = 10**5


def _fresh_name(base, taken):
    n = 1
    while f"{base}{n}" in taken:
        n += 1
    name = f"{base}{n}"
    taken.add(name)
    return name


def _names(e):
    out = set(A.propositions(e)) | set(A.atomic_programs(e)) | set(A.relation_names(e))
    for n in A.walk(e):
        if isinstance(n, A.Conj):
            out |= set(n.variables())
    return out


# unnested form -------------------------------------------------------------


def _is_nested_test(n):
    """Test programs occurring inside the formula of another test."""
    out = []

    def go(x, inside):
        if isinstance(x, A.Test):
            if inside:
                out.append(x)
            go(x.formula, True)
            return
        for c in A.children(x):
            go(c, inside)

    go(n, False)
    return out


def unnested_form_with_definitions(phi):
    """Returns (phi', defs) where defs lists (fresh proposition, formula) in
    extraction order; later formulas may mention earlier propositions."""
    if not isinstance(phi, A.Formula):
        raise PreconditionViolation("unnested form applies to formulas")
    taken = _names(phi)
    defs = []
    cur = phi
    while True:
        cand = None
        for t in _is_nested_test(cur):
            psi = t.formula
            if isinstance(psi, A.Prop):
                continue
            if all(isinstance(s.formula, A.Prop) for s in A.walk(psi) if isinstance(s, A.Test)):
                cand = psi
                break
        if cand is None:
            break
        p = A.Prop(_fresh_name("p", taken))
        cur = A.transform(cur, lambda n: A.Test(p) if n == A.Test(cand) else n)
        defs.append((p.name, cand))
    patches = []
    for name, psi in defs:
        p = A.Prop(name)
        diff = A.Or(A.And(p, A.Not(psi)), A.And(A.Not(p), psi))
        patches.append(A.Not(A.Diamond(A.Compose(A.UNIV, A.Test(diff)))))
    return A.conj_all([cur] + patches), defs


def unnested_form(phi):
    return unnested_form_with_definitions(phi)[0]


def is_unnested(e):
    from .measures import nesting_depth

    if nesting_depth(e) > 2:
        return False
    return all(isinstance(t.formula, A.Prop) for t in _is_nested_test(e))


# r-atoms -------------------------------------------------------------------


def remove_r_atoms_with_names(e):
    """Returns (e', names) with names[R] = fresh atomic programs R1..Rn."""
    taken = _names(e)
    names = {}

    def progs(rel, arity):
        if rel not in names:
            names[rel] = [_fresh_name(f"{rel}_", taken) for _ in range(arity)]
        if len(names[rel]) != arity:
            raise PreconditionViolation(f"{rel} used with different arities")
        return names[rel]

    def step(n):
        if not isinstance(n, A.Conj) or not any(isinstance(a, A.RAtom) for a in n.atoms):
            return n
        used = set(n.variables())
        atoms = []
        for a in A.sorted_atoms(n):
            if isinstance(a, A.PAtom):
                atoms.append(a)
                continue
            z = _fresh_name("z", used | taken)
            used.add(z)
            for prog, x in zip(progs(a.rel, len(a.args)), a.args):
                atoms.append(A.PAtom(A.Atomic(prog), z, x))
        return A.Conj(atoms, n.source, n.target)

    return A.transform(e, step), names


def remove_r_atoms(e):
    return remove_r_atoms_with_names(e)[0]


# universal program ------------------------------------------------------------


def remove_universal_with_name(e):
    """Returns (e', a0) where a0 is the fresh atomic program used."""
    taken = _names(e)
    a0 = _fresh_name("a", taken)
    names = [a0] + sorted(A.atomic_programs(e))
    steps = [A.Atomic(a) for a in names] + [A.Converse(a) for a in names]
    repl = A.Star(A.union_all(steps))
    return A.transform(e, lambda n: repl if isinstance(n, A.Universal) else n), a0


def remove_universal(e):
    return remove_universal_with_name(e)[0]


# k-split -------------------------------------------------------------------


def _seq(p, q):
    """Composition that drops eps on either side."""
    if isinstance(p, A.Epsilon):
        return q
    if isinstance(q, A.Epsilon):
        return p
    return A.Compose(p, q)


class _Splitter:
    def __init__(self):
        self.memo2 = {}
        self.count = 0
        self.cap = budget(SPLIT_CAP)

    def _charge(self, n):
        self.count += n
        if self.count > self.cap:
            raise BlowupExceeded("k-split exceeds the tuple budget")

    def two(self, p):
        hit = self.memo2.get(p)
        if hit is not None:
            return hit
        if isinstance(p, (A.Atomic, A.Converse, A.Epsilon, A.Test)):
            out = [(p, A.EPS), (A.EPS, p)]
        elif isinstance(p, A.Compose):
            out = [(a, _seq(b, p.right)) for a, b in self.two(p.left)]
            out += [(_seq(p.left, a), b) for a, b in self.two(p.right)]
        elif isinstance(p, A.Union):
            out = self.two(p.left) + self.two(p.right)
        elif isinstance(p, A.Intersect):
            out = [
                (A.Intersect(a1, a2), A.Intersect(b1, b2))
                for a1, b1 in self.two(p.left)
                for a2, b2 in self.two(p.right)
            ]
        elif isinstance(p, A.Star):
            # the (p, p) tuple covers splits between iterations, including
            # the empty path
            out = [(p, p)] + [(_seq(p, a), _seq(b, p)) for a, b in self.two(p.prog)]
        else:
            raise NotICPDL(f"cannot split {type(p).__name__}")
        out = _dedupe(out)
        self._charge(len(out))
        self.memo2[p] = out
        return out

    def split(self, p, k):
        if k == 1:
            return [(p,)]
        if k == 2:
            return self.two(p)
        out = []
        for first, rest in self.two(p):
            for tail in self.split(rest, k - 1):
                out.append((first,) + tail)
        out = _dedupe(out)
        self._charge(len(out))
        return out


def _dedupe(tuples):
    seen = {}
    for t in tuples:
        seen.setdefault(t, None)
    return list(seen)


def ksplit(p, k):
    """All k-tuples of the split of an ICPDL program, deduplicated and
    sorted by their printed form."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not isinstance(p, A.Program) or not classify_dialect(p, "ICPDL"):
        raise NotICPDL("k-split needs an ICPDL program")
    out = _Splitter().split(p, k)
    return sorted(out, key=lambda t: tuple(to_text(x) for x in t))


# translation over trees -----------------------------------------------------------


TOP = A.Diamond(A.EPS)


def _prufer_trees(n):
    if n == 1:
        yield ()
        return
    if n == 2:
        yield ((0, 1),)
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        degree = [1] * n
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = min(i for i in range(n) if degree[i] == 1)
            edges.append((min(leaf, x), max(leaf, x)))
            degree[leaf] -= 1
            degree[x] -= 1
        u, v = [i for i in range(n) if degree[i] == 1]
        edges.append((u, v))
        yield tuple(sorted(edges))


def _shape_trees(b):
    """Trees on b variable vertices plus Steiner vertices of degree >= 3,
    up to renaming of the Steiner vertices."""
    out = []
    for s in range(0, max(b - 2, 0) + 1):
        n = b + s
        seen = set()
        for edges in _prufer_trees(n):
            deg = [0] * n
            for u, v in edges:
                deg[u] += 1
                deg[v] += 1
            if any(deg[i] < 3 for i in range(b, n)):
                continue
            canon = min(
                tuple(sorted(tuple(sorted((_perm(u, b, perm), _perm(v, b, perm)))) for u, v in edges))
                for perm in itertools.permutations(range(b, n))
            )
            if canon not in seen:
                seen.add(canon)
                out.append((n, canon))
    return out


def _perm(x, b, perm):
    return x if x < b else perm[x - b]


def _path(adj, a, b):
    prev = {a: None}
    queue = [a]
    for x in queue:
        for y in adj[x]:
            if y not in prev:
                prev[y] = x
                queue.append(y)
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def _inter(progs):
    return A.intersect_all(sorted(set(progs), key=to_text))


def _conj_tests(tests):
    if not tests:
        return TOP
    return A.conj_all(sorted(set(tests), key=to_text))


def _shape_program(n, edges, paths, choice, src, tgt, atom_tests):
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    label = {}
    tests = {v: list(atom_tests.get(v, ())) for v in range(n)}
    for path, tup in zip(paths, choice):
        for i in range(len(path) - 1):
            u, v = path[i], path[i + 1]
            label.setdefault((u, v), []).append(tup[i])
            label.setdefault((v, u), []).append(reverse(tup[i]))
    main = _path(adj, src, tgt)
    on_path = set(main)
    live = set(range(n))
    while True:
        leaves = [z for z in live - on_path if len(adj[z] & live) == 1]
        if not leaves:
            break
        z = min(leaves)
        (zp,) = adj[z] & live
        step = _inter(label[(zp, z)])
        if tests[z]:
            step = A.Compose(step, A.Test(_conj_tests(tests[z])))
        tests[zp].append(A.Diamond(step))
        live.discard(z)
    parts = [A.Test(_conj_tests(tests[main[0]]))]
    for u, v in zip(main, main[1:]):
        parts.append(_inter(label[(u, v)]))
        parts.append(A.Test(_conj_tests(tests[v])))
    return A.compose_all(parts)


def shapes_programs(c):
    """The program of every shape of c, deduplicated, in enumeration order."""
    atoms = A.sorted_atoms(c)
    for a in atoms:
        if not isinstance(a, A.PAtom) or not classify_dialect(a.prog, "ICPDL"):
            raise PreconditionViolation("tree translation needs ICPDL p-atoms only")
    gc, _ = underlying_graphs(c)
    if not gc.is_connected():
        raise PreconditionViolation("the atoms must connect all variables")
    vs = sorted(c.variables())
    splitter = _Splitter()
    cap = budget(SHAPE_CAP)
    count = 0
    out = {}
    # variables get distinct tree vertices; assignments need not be
    # injective, so coinciding variables are covered by empty path segments
    vertex = {v: i for i, v in enumerate(vs)}
    for n, edges in _shape_trees(len(vs)):
        adj = {v: set() for v in range(n)}
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        paths, options, atom_tests = [], [], {}
        for a in atoms:
            x, y = vertex[a.x], vertex[a.y]
            if x == y:
                atom_tests.setdefault(x, []).append(A.Diamond(A.Intersect(a.prog, A.EPS)))
                continue
            path = _path(adj, x, y)
            paths.append(path)
            options.append(splitter.split(a.prog, len(path) - 1))
        # every tree edge must be used by some atom
        used = {frozenset(e) for p in paths for e in zip(p, p[1:])}
        if len(used) != len(edges):
            continue
        for choice in itertools.product(*options):
            count += 1
            if count > cap:
                raise BlowupExceeded("shape enumeration exceeds the budget")
            prog = _shape_program(n, edges, paths, choice, vertex[c.source], vertex[c.target], atom_tests)
            out.setdefault(prog, None)
    return list(out)


def tree_translate(c):
    """ICPDL program equivalent to the conjunctive program c on structures
    whose Gaifman graph is a tree."""
    progs = sorted(shapes_programs(c), key=to_text)
    return _balanced_union(progs)


def _balanced_union(progs):
    # keeps the nesting depth logarithmic in the number of shapes
    if len(progs) == 1:
        return progs[0]
    mid = (len(progs) + 1) // 2
    return A.Union(_balanced_union(progs[:mid]), _balanced_union(progs[mid:]))
