"""Seeded random generators for expressions, structures and UNTC formulas."""

import random

from cpdlp import ast as A
from cpdlp import untc as U
from cpdlp.structures import Structure

from oracle import brute_treewidth

VARS = ("x", "y", "z", "w", "v", "t")


class ExprGen:
    """Random expressions; feature flags select the dialect."""

    def __init__(
        self,
        rng,
        props=("p", "q"),
        progs=("a", "b"),
        conv=True,
        loop=False,
        inter=False,
        conj=False,
        univ=False,
        ratoms=False,
        max_vars=4,
        max_atoms=3,
        max_tw=None,
        self_loop_only=False,
        connected=True,
    ):
        self.rng = rng
        self.props = props
        self.progs = progs
        self.conv = conv
        self.loop = loop
        self.inter = inter
        self.conj_on = conj
        self.univ = univ
        self.ratoms = ratoms
        self.max_vars = max_vars
        self.max_atoms = max_atoms
        self.max_tw = max_tw
        self.self_loop_only = self_loop_only
        self.connected = connected

    # formulas ----------------------------------------------------------

    def formula(self, d):
        r = self.rng
        if d <= 0:
            return A.Prop(r.choice(self.props)) if r.random() < 0.85 else A.TRUE
        kinds = ["prop", "not", "and", "dia", "dia"]
        if self.loop:
            kinds.append("loop")
        k = r.choice(kinds)
        if k == "prop":
            return A.Prop(r.choice(self.props))
        if k == "not":
            return A.Not(self.formula(d - 1))
        if k == "and":
            return A.And(self.formula(d - 1), self.formula(d - 1))
        if k == "loop":
            return A.Loop(self.program(d - 1))
        return A.Diamond(self.program(d - 1))

    # programs ----------------------------------------------------------

    def leaf(self):
        r = self.rng
        opts = [A.Atomic(a) for a in self.progs] * 3
        if self.conv:
            opts += [A.Converse(a) for a in self.progs]
        opts.append(A.EPS)
        if self.univ:
            opts.append(A.UNIV)
        return r.choice(opts)

    def program(self, d):
        r = self.rng
        if d <= 0:
            return self.leaf()
        kinds = ["leaf", "union", "compose", "star", "test"]
        if self.inter:
            kinds += ["inter", "inter"]
        if self.conj_on:
            kinds += ["conj", "conj"]
        k = r.choice(kinds)
        if k == "leaf":
            return self.leaf()
        if k == "union":
            return A.Union(self.program(d - 1), self.program(d - 1))
        if k == "compose":
            return A.Compose(self.program(d - 1), self.program(d - 1))
        if k == "star":
            return A.Star(self.program(d - 1))
        if k == "test":
            return A.Test(self.formula(d - 1))
        if k == "inter":
            return A.Intersect(self.program(d - 1), self.program(d - 1))
        return self.conj(d)

    # conjunctive programs ------------------------------------------------

    def conj(self, d):
        for _ in range(1000):
            c = self._conj_once(d)
            if self.max_tw is None:
                return c
            vs = sorted(c.variables())
            edges = {frozenset(a.vars) for a in c.atoms if len(set(a.vars)) == 2}
            for a in c.atoms:
                if isinstance(a, A.RAtom):
                    edges |= {frozenset((p, q)) for p in a.args for q in a.args if p != q}
            if c.source != c.target:
                edges.add(frozenset((c.source, c.target)))
            if brute_treewidth(vs, edges) <= self.max_tw:
                return c
        raise RuntimeError("could not sample a conjunctive program")

    def _conj_once(self, d):
        r = self.rng
        sub = max(d - 1, 0)
        if self.self_loop_only:
            n = r.randint(1, self.max_atoms)
            return A.Conj([A.PAtom(self.program(sub), "x", "x") for _ in range(n)], "x", "x")
        nv = r.randint(1, self.max_vars)
        vs = VARS[:nv]
        pairs = []
        if self.connected:
            for i in range(1, nv):
                j = r.randrange(i)
                pairs.append((vs[i], vs[j]) if r.random() < 0.5 else (vs[j], vs[i]))
        total = max(len(pairs), r.randint(1, self.max_atoms))
        while len(pairs) < total:
            pairs.append((r.choice(vs), r.choice(vs)))
        if not self.connected and nv > 1 and r.random() < 0.5:
            # leave variables unlinked; U-dialects may join them later
            pairs = pairs[: max(1, len(pairs) // 2)]
        atoms = [A.PAtom(self.program(sub), x, y) for x, y in pairs]
        if self.ratoms and r.random() < 0.4:
            atoms[-1] = A.RAtom("R", [r.choice(vs) for _ in range(3)])
        used = sorted({v for a in atoms for v in a.vars})
        return A.Conj(atoms, r.choice(used), r.choice(used))


def structure(rng, n, props=("p", "q"), progs=("a", "b"), density=0.3, ternary=None):
    worlds = [f"w{i}" for i in range(n)]
    unary = {p: [w for w in worlds if rng.random() < 0.5] for p in props}
    binary = {
        a: [(u, v) for u in worlds for v in worlds if rng.random() < density] for a in progs
    }
    higher = {}
    if ternary:
        ts = {tuple(rng.choice(worlds) for _ in range(3)) for _ in range(rng.randint(0, 2 * n))}
        higher[ternary] = (3, ts)
    return Structure(worlds, unary, binary, higher)


def tree_structure(rng, n, props=("p", "q"), progs=("a", "b"), self_loops=0.1):
    """Structure whose Gaifman graph is a tree: one or more labelled
    directed edges per tree edge, plus occasional self-loops."""
    worlds = [f"t{i}" for i in range(n)]
    binary = {a: set() for a in progs}
    for i in range(1, n):
        j = rng.randrange(i)
        u, v = worlds[j], worlds[i]
        options = [(a, (u, v)) for a in progs] + [(a, (v, u)) for a in progs]
        chosen = [o for o in options if rng.random() < 0.4] or [rng.choice(options)]
        for a, pair in chosen:
            binary[a].add(pair)
    for w in worlds:
        for a in progs:
            if rng.random() < self_loops:
                binary[a].add((w, w))
    unary = {p: [w for w in worlds if rng.random() < 0.5] for p in props}
    return Structure(worlds, unary, binary)


class UntcGen:
    """Random UNTC formulas whose free variables lie in the given scope."""

    def __init__(self, rng, unary=("p",), binary=("a", "b"), ternary=None):
        self.rng = rng
        self.unary = unary
        self.binary = binary
        self.ternary = ternary
        self.counter = 0

    def fresh(self):
        self.counter += 1
        return f"v{self.counter}"

    def formula(self, d, scope):
        r = self.rng
        scope = list(scope)
        if d <= 0 or r.random() < 0.2:
            return self.atom(scope)
        k = r.choice(["and", "or", "exists", "exists", "not", "tc"])
        if k == "and":
            return U.UAnd(self.formula(d - 1, scope), self.formula(d - 1, scope))
        if k == "or":
            return U.UOr(self.formula(d - 1, scope), self.formula(d - 1, scope))
        if k == "exists":
            z = self.fresh()
            body = self.formula(d - 1, scope + [z])
            return U.Exists([z], body) if z in U.free_vars(body) else body
        if k == "not":
            return U.UNot(self.formula(d - 1, [r.choice(scope)]))
        u, v = self.fresh(), self.fresh()
        body = self.formula(d - 1, [u, v])
        fv = U.free_vars(body)
        if u not in fv or v not in fv:
            body = U.UAnd(body, U.Rel(r.choice(self.binary), (u, v)))
        return U.Tc(u, v, body, r.choice(scope), r.choice(scope))

    def atom(self, scope):
        r = self.rng
        k = r.random()
        if k < 0.2:
            return U.Rel(r.choice(self.unary), (r.choice(scope),))
        if k < 0.3:
            return U.Eq(r.choice(scope), r.choice(scope))
        if self.ternary and k < 0.4:
            return U.Rel(self.ternary, tuple(r.choice(scope) for _ in range(3)))
        return U.Rel(r.choice(self.binary), (r.choice(scope), r.choice(scope)))


def rngs(seed, n):
    base = random.Random(seed)
    return [random.Random(base.getrandbits(32)) for _ in range(n)]
