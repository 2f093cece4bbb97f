"""Structural measures, reversal, underlying graphs and dialect membership."""

from __future__ import annotations

from dataclasses import dataclass

from . import ast as A
from .errors import NotICPDL
from .structures import UGraph
from .treedecomp import treewidth


def subexpressions(e):
    """All formula and program subexpressions, including programs of p-atoms."""
    return set(A.walk(e))


def reverse(p):
    """A program denoting the converse relation of `p` (ICPDL only)."""
    if isinstance(p, (A.Epsilon, A.Test)):
        return p
    if isinstance(p, A.Atomic):
        return A.Converse(p.name)
    if isinstance(p, A.Converse):
        return A.Atomic(p.name)
    if isinstance(p, A.Union):
        return A.Union(reverse(p.left), reverse(p.right))
    if isinstance(p, A.Intersect):
        return A.Intersect(reverse(p.left), reverse(p.right))
    if isinstance(p, A.Compose):
        return A.Compose(reverse(p.right), reverse(p.left))
    if isinstance(p, A.Star):
        return A.Star(reverse(p.prog))
    raise NotICPDL(f"cannot reverse {type(p).__name__}")


def _atom_edges(atom):
    vs = list(dict.fromkeys(atom.vars))
    if len(vs) == 1:
        return [frozenset(vs)]
    return [frozenset((a, b)) for i, a in enumerate(vs) for b in vs[i + 1:]]


def underlying_graphs(c):
    """(G_C, G_full): co-occurrence graph of the atoms, and the same graph
    with the source-target edge added."""
    vs = sorted(c.variables())
    edges = []
    for atom in A.sorted_atoms(c):
        edges.extend(_atom_edges(atom))
    gc = UGraph(vs, edges)
    return gc, gc.with_edge(c.source, c.target)


def pdl_size(e):
    memo = {}

    def go(n):
        if n in memo:
            return memo[n]
        if isinstance(n, (A.Prop, A.Epsilon, A.Universal, A.Atomic, A.Converse)):
            out = 1
        elif isinstance(n, (A.Not, A.Diamond, A.Loop, A.Star, A.Test)):
            out = 1 + go(A.children(n)[0])
        elif isinstance(n, (A.And, A.Union, A.Compose, A.Intersect)):
            out = go(n.left) + go(n.right)
        elif isinstance(n, A.Conj):
            out = 0
            for atom in n.atoms:
                if isinstance(atom, A.RAtom):
                    out += len(atom.args)
                else:
                    out += 1 + go(atom.prog)
        else:
            raise TypeError(n)
        memo[n] = out
        return out

    return go(e)


def _program_width(p, conj_part):
    """Shared recursion for conjunctive and intersection width."""
    memo = {}

    def go(n):
        if n in memo:
            return memo[n]
        if isinstance(n, (A.Epsilon, A.Universal, A.Atomic, A.Converse, A.Test)):
            out = 1
        elif isinstance(n, (A.Union, A.Compose)):
            out = max(go(n.left), go(n.right))
        elif isinstance(n, A.Intersect):
            out = go(n.left) + go(n.right)
        elif isinstance(n, A.Star):
            out = go(n.prog)
        elif isinstance(n, A.Conj):
            out = conj_part(n, go)
        else:
            raise TypeError(n)
        memo[n] = out
        return out

    return go(p)


def _cq_conj(c, go):
    out = 0
    for atom in c.atoms:
        out += len(atom.args) if isinstance(atom, A.RAtom) else go(atom.prog)
    return out


def cq_width(e):
    """Maximum conjunctive width over program subexpressions (1 if none)."""
    progs = [n for n in A.walk(e) if isinstance(n, A.Program)]
    return max([_program_width(p, _cq_conj) for p in progs], default=1)


def i_width(e):
    """Maximum intersection width; 0 when conjunctive programs occur."""
    nodes = list(A.walk(e))
    if any(isinstance(n, A.Conj) for n in nodes):
        return 0
    progs = [n for n in nodes if isinstance(n, A.Program)]
    return max([_program_width(p, None) for p in progs], default=1)


def nesting_depth(e):
    memo = {}

    def go(n):
        if n in memo:
            return memo[n]
        kids = A.children(n)
        out = max((go(k) for k in kids), default=0)
        if isinstance(n, A.Test):
            out += 1
        memo[n] = out
        return out

    return go(e)


def star_depth(e):
    memo = {}

    def go(n):
        if n in memo:
            return memo[n]
        out = max((go(k) for k in A.children(n)), default=0)
        if isinstance(n, A.Star):
            out += 1
        memo[n] = out
        return out

    return go(e)


def expr_tree_width(e):
    ws = [treewidth(underlying_graphs(n)[1]) for n in A.walk(e) if isinstance(n, A.Conj)]
    return max(ws, default=0)


@dataclass(frozen=True)
class Measures:
    pdlSize: int
    cqWidth: int
    iWidth: int
    nestingDepth: int
    starDepth: int
    exprTreeWidth: int


def measures(e):
    return Measures(
        pdl_size(e), cq_width(e), i_width(e), nesting_depth(e), star_depth(e), expr_tree_width(e)
    )


_PDL = {A.Prop, A.Not, A.And, A.Diamond, A.Epsilon, A.Atomic, A.Union, A.Compose, A.Star, A.Test}
_CPDL = _PDL | {A.Converse}

DIALECTS = {
    "PDL": _PDL,
    "CPDL": _CPDL,
    "loopCPDL": _CPDL | {A.Loop},
    "ICPDL": _CPDL | {A.Intersect},
    "CPDLplus": _CPDL | {A.Conj},
    "UCPDLplus": _CPDL | {A.Conj, A.Universal},
    "ICPDLplus": _CPDL | {A.Conj, A.Intersect},
    "CPDLplusTW": _CPDL | {A.Conj},
    "ICPDLplusTW": _CPDL | {A.Conj, A.Intersect},
}


def _split_dialect(d, k):
    # "CPDLplusTW(2)" is accepted as well as d="CPDLplusTW", k=2
    if "(" in d and d.endswith(")"):
        name, arg = d[:-1].split("(", 1)
        return name, int(arg)
    return d, k


def classify_dialect(e, d, k=None):
    """True iff every node of `e` is allowed in dialect `d`."""
    name, k = _split_dialect(d, k)
    if name not in DIALECTS:
        raise ValueError(f"unknown dialect {d!r}")
    allowed = DIALECTS[name]
    universal = A.Universal in allowed
    for n in A.walk(e):
        if type(n) not in allowed:
            return False
        if isinstance(n, A.Conj):
            gc, gfull = underlying_graphs(n)
            if not universal and not gc.is_connected():
                return False
            if name.endswith("TW"):
                if k is None:
                    raise ValueError("tree-width dialects need k")
                if treewidth(gfull) > k:
                    return False
    return True
