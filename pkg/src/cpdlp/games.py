"""Pebble games for k-simulation and k-bisimulation.

Positions are tuples:

    ("s", side, u, v)        Spoiler to move; u lives in Spoiler's structure
    ("d", i, side, u, v)     Duplicator must answer on pebble i (0 = stacking)
    WIN                      Spoiler has won

`side` is 0 while Spoiler plays in the first structure and 1 after a switch
in the bisimulation game.  The arena is built lazily from the start
positions and Duplicator's winning region is the complement of Spoiler's
attractor to WIN and to Duplicator positions without moves.
"""

from __future__ import annotations

import itertools
from array import array
from collections import deque

from .ast import budget
from .errors import ArenaTooLarge
from .structures import Structure

ARENA_CAP = 10**7
WIN = ("win",)


def pad(t, k):
    """Tuples shorter than k repeat their last coordinate."""
    t = tuple(t) if not isinstance(t, str) else (t,)
    if not t:
        raise ValueError("empty tuple")
    if len(t) > k:
        raise ValueError(f"tuple longer than k={k}")
    return t + (t[-1],) * (k - len(t))


class _Side:
    """Per-structure data: neighbourhoods, fact lookups and (for the power
    structure) atomic types of tuples."""

    def __init__(self, K, k):
        self.K = K
        self.k = k
        self.worlds = list(K.worlds)
        self.index = dict(K.index)
        self.nbr = {w: sorted(ns, key=K.index.get) for w, ns in K.neighbours().items()}
        self.props = {w: frozenset(p for p, ws in K.unary.items() if w in ws) for w in K.worlds}
        labels = {}
        for a, ps in K.binary.items():
            for pair in ps:
                labels.setdefault(pair, set()).add(a)
        self.labels = {pair: frozenset(ls) for pair, ls in labels.items()}
        self.higher = {r: ts for r, (_, ts) in K.higher.items() if ts}
        self.arity = {r: ar for r, (ar, _) in K.higher.items()}

    def type(self, t):
        """Atomic type of a tuple as a set of facts over its positions."""
        K = self.K
        k = len(t)
        facts = set()
        for i in range(k):
            for p in self.props[t[i]]:
                facts.add(("p", p, i))
            for j in range(k):
                if t[i] == t[j]:
                    facts.add(("=", i, j))
                for a in self.labels.get((t[i], t[j]), ()):
                    facts.add(("a", a, i, j))
        for r, (ar, ts) in K.higher.items():
            for idx in itertools.product(range(k), repeat=ar):
                if tuple(t[x] for x in idx) in ts:
                    facts.add(("r", r, idx))
        return frozenset(facts)


_EMPTY = frozenset()


def _hom(A, u, B, v):
    """u[i] -> v[i] is a partial homomorphism from A.K to B.K (the atomic
    type of u is contained in that of v)."""
    k = len(u)
    for i in range(k):
        if not A.props[u[i]] <= B.props[v[i]]:
            return False
        for j in range(k):
            if u[i] == u[j]:
                if v[i] != v[j]:
                    return False
                if i != j:
                    continue
            ls = A.labels.get((u[i], u[j]))
            if ls and not ls <= B.labels.get((v[i], v[j]), _EMPTY):
                return False
    if A.higher:
        pos = {}
        for i, w in enumerate(u):
            pos.setdefault(w, i)
        for r, ts in A.higher.items():
            target = B.higher.get(r, _EMPTY) if B.arity.get(r, A.arity[r]) == A.arity[r] else _EMPTY
            for t in ts:
                if all(w in pos for w in t):
                    if tuple(v[pos[w]] for w in t) not in target:
                        return False
    return True


def is_partial_hom(K, u, K2, v):
    """Whether u[i] -> v[i] is a partial homomorphism from K to K2."""
    return _hom(_Side(K, len(u)), tuple(u), _Side(K2, len(v)), tuple(v))


class _Region:
    """Duplicator's winning region as a read-only set of positions backed by
    the solver's compact arrays."""

    def __init__(self, arena, won):
        self.arena = arena
        self.won = won

    def __contains__(self, pos):
        idx = self.arena.ids.get(self.arena.encode(pos))
        return idx is not None and self.won[idx]

    def __iter__(self):
        a = self.arena
        for code, idx in a.ids.items():
            if self.won[idx]:
                yield a.decode(code)

    def __len__(self):
        return sum(self.won)


class GameArena:
    """Simulation (kind "sim") or bisimulation (kind "bisim") game between
    K and K2 with k pebbles; `universal` adds the stacking moves.

    The rules are exposed on tuple positions.  Solving explores the part of
    the arena reachable from the start positions with positions encoded as
    integers and edges kept in flat arrays, so that large arenas hit the
    position cap rather than exhausting memory.
    """

    def __init__(self, K, K2, k, kind="sim", universal=False):
        if k < 2:
            raise ValueError("k must be at least 2")
        if kind not in ("sim", "bisim"):
            raise ValueError(f"unknown game kind {kind!r}")
        self.k = k
        self.kind = kind
        self.universal = universal
        self.sides = (_Side(K, k), _Side(K2, k))
        self.n = max(len(K.worlds), len(K2.worlds), 1)
        self.ids = {}
        self.won = None
        self.duplicator_wins = None
        self.cap = budget(ARENA_CAP)

    # rules -----------------------------------------------------------------

    def hom(self, side, u, v):
        return _hom(self.sides[side], u, self.sides[1 - side], v)

    def start(self, u, v, side=0):
        return ("s", side, pad(u, self.k), pad(v, self.k))

    def valid(self, pos):
        return pos[0] == "s" and self.hom(pos[1], pos[2], pos[3])

    def pebble_moves(self, pos):
        """Spoiler's pebble moves (and stacking moves) from a Spoiler position."""
        _, side, u, v = pos
        sp = self.sides[side]
        out = []
        seen = set()
        for i in range(self.k):
            for j in range(self.k):
                if i == j:
                    continue
                for w in sp.nbr[u[j]]:
                    u2 = u[:i] + (w,) + u[i + 1:]
                    key = (i, u2)
                    if key not in seen:
                        seen.add(key)
                        out.append(("d", i + 1, side, u2, v))
        if self.universal:
            for w in sp.worlds:
                out.append(("d", 0, side, (w,) * self.k, v))
        return out

    def switch(self, pos):
        """Switched position, WIN if the reverse map is not a homomorphism,
        or None when switching is not allowed."""
        _, side, u, v = pos
        if self.kind != "bisim" or len(set(u)) != 1:
            return None
        if not self.hom(1 - side, v, u):
            return WIN
        return ("s", 1 - side, v, u)

    def spoiler_moves(self, pos):
        out = self.pebble_moves(pos)
        sw = self.switch(pos)
        if sw is not None:
            out.append(sw)
        return out

    def duplicator_moves(self, pos, order=None):
        _, i, side, u, v = pos
        dp = self.sides[1 - side]
        cands = []
        if i == 0:
            cands = [(w,) * self.k for w in dp.worlds]
        else:
            seen = set()
            for j in range(self.k):
                if j == i - 1:
                    continue
                for w in dp.nbr[v[j]]:
                    if w not in seen:
                        seen.add(w)
                        cands.append(v[: i - 1] + (w,) + v[i:])
        if order is not None:
            cands = order(self, pos, cands)
        return [("s", side, u, v2) for v2 in cands if self.hom(side, u, v2)]

    def successors(self, pos):
        if pos == WIN:
            return []
        if pos[0] == "s":
            return self.spoiler_moves(pos)
        return self.duplicator_moves(pos)

    # compact encoding ----------------------------------------------------------

    def _tuple_code(self, side, t):
        idx = self.sides[side].index
        c = 0
        for w in t:
            c = c * self.n + idx[w]
        return c

    def _tuple_decode(self, side, c):
        ws = self.sides[side].worlds
        out = []
        for _ in range(self.k):
            c, r = divmod(c, self.n)
            out.append(ws[r])
        return tuple(reversed(out))

    def encode(self, pos):
        if pos == WIN:
            return -1
        if pos[0] == "s":
            _, side, u, v = pos
            i, kind = 0, 0
        else:
            _, i, side, u, v = pos
            kind = 1
        span = self.n**self.k
        c = ((kind * 2 + side) * (self.k + 1) + i) * span + self._tuple_code(side, u)
        return c * span + self._tuple_code(1 - side, v)

    def decode(self, code):
        if code == -1:
            return WIN
        span = self.n**self.k
        rest, vc = divmod(code, span)
        rest, uc = divmod(rest, span)
        rest, i = divmod(rest, self.k + 1)
        kind, side = divmod(rest, 2)
        u, v = self._tuple_decode(side, uc), self._tuple_decode(1 - side, vc)
        return ("s", side, u, v) if kind == 0 else ("d", i, side, u, v)

    # solving -----------------------------------------------------------------

    def solve(self, starts):
        """Explore from `starts` and compute Duplicator's winning region.

        Positions are numbered in discovery order; `first[n]:first[n+1]`
        indexes node n's successors in `edges`.  Duplicator loses from the
        attractor of WIN and of Duplicator positions without moves.
        """
        ids = {}
        codes = []
        first = array("q", [0])
        edges = array("q")
        is_dup = bytearray()

        def node(code):
            idx = ids.get(code)
            if idx is None:
                if len(codes) >= self.cap:
                    raise ArenaTooLarge(f"arena exceeds {self.cap} positions")
                idx = ids[code] = len(codes)
                codes.append(code)
            return idx

        for p in starts:
            node(self.encode(p))
        n = 0
        while n < len(codes):
            pos = self.decode(codes[n])
            is_dup.append(1 if pos != WIN and pos[0] == "d" else 0)
            for q in self.successors(pos):
                edges.append(node(self.encode(q)))
            first.append(len(edges))
            n += 1
        total = len(codes)
        # reverse edges in the same flat layout
        indeg = array("q", bytes(8 * (total + 1)))
        for t in edges:
            indeg[t + 1] += 1
        for x in range(total):
            indeg[x + 1] += indeg[x]
        rfirst = array("q", indeg)
        fill = array("q", indeg)
        redges = array("q", bytes(8 * len(edges)))
        for x in range(total):
            for e in range(first[x], first[x + 1]):
                t = edges[e]
                redges[fill[t]] = x
                fill[t] += 1
        del fill, indeg
        remaining = array("q", (first[x + 1] - first[x] for x in range(total)))
        lost = bytearray(total)
        queue = deque()
        win = ids.get(-1)
        if win is not None:
            lost[win] = 1
            queue.append(win)
        for x in range(total):
            if is_dup[x] and remaining[x] == 0:
                lost[x] = 1
                queue.append(x)
        while queue:
            q = queue.popleft()
            for e in range(rfirst[q], rfirst[q + 1]):
                p = redges[e]
                if lost[p]:
                    continue
                if not is_dup[p]:
                    lost[p] = 1
                    queue.append(p)
                else:
                    remaining[p] -= 1
                    if remaining[p] == 0:
                        lost[p] = 1
                        queue.append(p)
        self.ids = ids
        self.won = bytearray(1 - x for x in lost)
        self.duplicator_wins = _Region(self, self.won)
        return self.duplicator_wins

    def explored(self, pos):
        return self.encode(pos) in self.ids

    def wins(self, pos):
        if not self.valid(pos):
            return False
        if self.duplicator_wins is None or not self.explored(pos):
            self.solve([pos])
        return pos in self.duplicator_wins


def check_certificate(arena):
    """Local check of a solved region: Duplicator positions keep a move inside
    it, Spoiler positions have all moves inside it."""
    region = arena.duplicator_wins
    for p in region:
        qs = arena.successors(p)
        if p == WIN:
            return False
        if p[0] == "d":
            if not any(q in region for q in qs):
                return False
        elif not all(q in region for q in qs):
            return False
    return True


def _spans_components(K, u):
    comp = K.component_of()
    return len({comp[w] for w in u}) > 1


def k_simulates(K, u, K2, v, k, universal=False, shortcut=True):
    """K, u is k-simulated by K2, v."""
    u, v = pad(u, k), pad(v, k)
    if shortcut and not universal and _spans_components(K, u):
        return True
    arena = GameArena(K, K2, k, "sim", universal)
    return arena.wins(arena.start(u, v))


def k_half_bisimulates(K, u, K2, v, k, universal=False, shortcut=True, arena=None):
    u, v = pad(u, k), pad(v, k)
    if shortcut and not universal and _spans_components(K, u):
        return True
    arena = arena or GameArena(K, K2, k, "bisim", universal)
    return arena.wins(arena.start(u, v))


def k_bisimulates(K, u, K2, v, k, universal=False, shortcut=True):
    """Half-bisimulation in both directions."""
    arena = GameArena(K, K2, k, "bisim", universal)
    u, v = pad(u, k), pad(v, k)
    there = k_half_bisimulates(K, u, K2, v, k, universal, shortcut, arena)
    if not there:
        return False
    if shortcut and not universal and _spans_components(K2, v):
        return True
    return arena.wins(("s", 1, v, u))


# bounded rounds ----------------------------------------------------------------


def bounded_round_duplicator_wins(arena, start, rounds, hint=None):
    """Whether Duplicator survives `rounds` rounds from a Spoiler position.

    A round is an optional switch followed by a pebble move and Duplicator's
    answer.  `hint` may provide `order(arena, dpos, candidates)` to try
    Duplicator answers in a better order and `known_win(arena, pos, r, survive)`
    to cut off positions it can show survive r more rounds.
    """
    if not arena.valid(start):
        return False
    memo = {}
    order = getattr(hint, "order", None)
    known = getattr(hint, "known_win", None)

    def survive(pos, r):
        if r == 0:
            return True
        key = (pos, r)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if known is not None and known(arena, pos, r, survive):
            memo[key] = True
            return True
        origins = [pos]
        sw = arena.switch(pos)
        if sw == WIN:
            memo[key] = False
            return False
        if sw is not None:
            origins.append(sw)
        ok = True
        for origin in origins:
            for d in arena.pebble_moves(origin):
                if not any(survive(s, r - 1) for s in arena.duplicator_moves(d, order)):
                    ok = False
                    break
            if not ok:
                break
        memo[key] = ok
        return ok

    return survive(start, rounds)


# modal simulation on the power structure ------------------------------------------


def tuple_world(t):
    return "(" + ",".join(t) + ")"


def power_structure(K, k):
    """S_k(K): worlds are k-tuples, program i changes coordinate i to a world
    near another coordinate, and propositions record the atomic type."""
    if len(K.worlds) ** k > budget(ARENA_CAP):
        raise ArenaTooLarge("power structure too large")
    side = _Side(K, k)
    tuples = list(itertools.product(K.worlds, repeat=k))
    names = {t: tuple_world(t) for t in tuples}
    unary = {}
    binary = {str(i + 1): set() for i in range(k)}
    for t in tuples:
        for fact in side.type(t):
            unary.setdefault(_fact_name(fact), []).append(names[t])
        for i in range(k):
            for j in range(k):
                if i == j:
                    continue
                for w in side.nbr[t[j]]:
                    binary[str(i + 1)].add((names[t], names[t[:i] + (w,) + t[i + 1:]]))
    return Structure([names[t] for t in tuples], unary, binary)


def _fact_name(fact):
    kind = fact[0]
    if kind == "p":
        return f"{fact[1]}@{fact[2] + 1}"
    if kind == "=":
        return f"={fact[1] + 1},{fact[2] + 1}"
    if kind == "a":
        return f"{fact[1]}@{fact[2] + 1},{fact[3] + 1}"
    return f"{fact[1]}@" + ",".join(str(x + 1) for x in fact[2])


def ml_simulates(S, s, S2, s2):
    """Classical simulation: greatest relation respecting propositions and
    the forth condition for every atomic program."""
    props = {w: {p for p, ws in S.unary.items() if w in ws} for w in S.worlds}
    props2 = {w: {p for p, ws in S2.unary.items() if w in ws} for w in S2.worlds}
    succ = {}
    for a, ps in S.binary.items():
        for x, y in ps:
            succ.setdefault((a, x), set()).add(y)
    succ2 = {}
    for a, ps in S2.binary.items():
        for x, y in ps:
            succ2.setdefault((a, x), set()).add(y)
    Z = {(x, y) for x in S.worlds for y in S2.worlds if props[x] <= props2[y]}
    changed = True
    while changed:
        changed = False
        for x, y in list(Z):
            for a in S.binary:
                for x2 in succ.get((a, x), ()):
                    if not any((x2, y2) in Z for y2 in succ2.get((a, y), ())):
                        Z.discard((x, y))
                        changed = True
                        break
                if (x, y) not in Z:
                    break
    return (s, s2) in Z
