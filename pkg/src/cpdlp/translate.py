"""Translations between loop-CPDL, ICPDL and conjunctive programs.

All translations are homomorphic except at the node they target, so they
are written as bottom-up rewrites with `ast.transform`.
"""

from __future__ import annotations

from . import ast as A
from .errors import DialectViolation, NotICPDL, PreconditionViolation, ShapeViolation
from .measures import classify_dialect, reverse
from .syntax import to_text
from .treedecomp import clique_complete, normalize_for_algorithm1


def _require(e, dialect):
    if not classify_dialect(e, dialect):
        raise DialectViolation(f"input is not in {dialect}")


def loop_to_conj(e):
    """loop(p) becomes <{p(x, x)}[x, x]>."""
    _require(e, "loopCPDL")

    def step(n):
        if isinstance(n, A.Loop):
            return A.Diamond(A.Conj([A.PAtom(n.prog, "x", "x")], "x", "x"))
        return n

    return A.transform(e, step)


def is_self_loop_shape(c):
    return c.source == c.target and all(
        isinstance(a, A.PAtom) and a.x == a.y == c.source for a in c.atoms
    )


def conj_to_loop(e):
    """C[x, x] with only self-loop atoms becomes a test of loop conjunctions."""

    def step(n):
        if isinstance(n, A.Conj):
            if not is_self_loop_shape(n):
                raise ShapeViolation(f"conjunctive program {to_text(n)} is not a self-loop set")
            return A.Test(A.conj_all(A.Loop(a.prog) for a in A.sorted_atoms(n)))
        return n

    return A.transform(e, step)


def _intersection_to_conj(n):
    if isinstance(n, A.Intersect):
        return A.Conj([A.PAtom(n.left, "x", "y"), A.PAtom(n.right, "x", "y")], "x", "y")
    return n


def icpdl_to_conj(e):
    """Each intersection becomes a two-atom conjunctive program."""
    _require(e, "ICPDL")
    return A.transform(e, _intersection_to_conj)


def elim_intersection(e):
    """Remove intersections anywhere, including inside conjunctive programs."""
    return A.transform(e, _intersection_to_conj)


# lemita ---------------------------------------------------------------------


def _rev(p):
    try:
        return reverse(p)
    except NotICPDL as exc:
        raise PreconditionViolation(str(exc)) from None


def _pair(atoms, z1, z2):
    direct = sorted((a.prog for a in atoms if (a.x, a.y) == (z1, z2)), key=to_text)
    back = sorted((_rev(a.prog) for a in atoms if (a.x, a.y) == (z2, z1)), key=to_text)
    progs = direct + back
    if not progs:
        raise PreconditionViolation(f"no atom between {z1} and {z2}")
    return A.intersect_all(progs)


def _single(atoms, z):
    loops = sorted((a.prog for a in atoms if a.x == a.y == z), key=to_text)
    return A.Test(A.conj_all(A.Diamond(A.Intersect(p, A.EPS)) for p in loops))


def lemita_program(atoms, x, y):
    """ICPDL program equivalent to C[x, y] for a clique C on at most three variables."""
    atoms = list(atoms)
    for a in atoms:
        if not isinstance(a, A.PAtom):
            raise PreconditionViolation("only p-atoms are allowed")
        if not classify_dialect(a.prog, "ICPDL"):
            raise PreconditionViolation(f"{to_text(a.prog)} is not an ICPDL program")
    vs = sorted({v for a in atoms for v in a.vars} | {x, y})
    if len(vs) > 3:
        raise PreconditionViolation("at most three variables")
    if x == y:
        if len(vs) == 1:
            return _single(atoms, x)
        other = next(v for v in vs if v != x)
        return A.Test(A.Diamond(lemita_program(atoms, x, other)))
    px, py = _single(atoms, x), _single(atoms, y)
    if len(vs) == 2:
        return A.compose_all([px, _pair(atoms, x, y), py])
    z = next(v for v in vs if v not in (x, y))
    detour = A.compose_all([_pair(atoms, x, z), _single(atoms, z), _pair(atoms, z, y)])
    return A.compose_all([px, A.Intersect(_pair(atoms, x, y), detour), py])


# Algorithm 1 ----------------------------------------------------------------


def _conj_to_icpdl(c):
    if any(isinstance(a, A.RAtom) for a in c.atoms):
        raise ShapeViolation("r-atoms cannot be translated to ICPDL")
    full, td = clique_complete(c, 2)
    td = normalize_for_algorithm1(td, (c.source, c.target))
    atoms = set(full.atoms)
    bags = dict(td.bags)
    parent = dict(td.parent)
    while len(bags) > 1:
        leaf = min(n for n in bags if n != td.root and not any(parent[m] == n for m in bags))
        bag, up = bags[leaf], bags[parent[leaf]]
        shared = sorted(bag & up)
        local = {a for a in atoms if set(a.vars) <= bag}
        if len(shared) == 1:
            z = shared[0]
            new = A.PAtom(lemita_program(local, z, z), z, z)
        elif len(shared) == 2:
            z1, z2 = shared
            new = A.PAtom(lemita_program(local, z1, z2), z1, z2)
        else:
            raise ShapeViolation("decomposition bags do not overlap in one or two variables")
        atoms = (atoms - local) | {new}
        del bags[leaf]
        del parent[leaf]
    root_bag = bags[td.root]
    assert all(set(a.vars) <= root_bag for a in atoms)
    return lemita_program(atoms, c.source, c.target)


def tw2_to_icpdl(e):
    """Translate an ICPDL+ expression whose conjunctive programs have
    tree-width at most 2 into ICPDL."""
    for n in A.walk(e):
        if isinstance(n, (A.Universal, A.Loop)):
            raise DialectViolation(f"{type(n).__name__} is not available")

    def step(n):
        if isinstance(n, A.Conj):
            return _conj_to_icpdl(n)
        return n

    return A.transform(e, step)
