"""Translations between UNTC and UCPDL+.

The normal form keeps every disjunction among formulas with at most two
free variables.  Quantifier blocks whose bodies mention more variables are
flattened: bound variables are renamed apart, the body is cut into maximal
pieces with at most two free variables, and the pieces are distributed into
a disjunction of existentially closed conjunctions.
"""

from __future__ import annotations

import itertools

from . import ast as A
from . import untc as U
from .ast import budget
from .errors import BlowupExceeded, DialectViolation, NotNormalForm, TooManyFreeVars

NF_CAP = 10**5


class _Fresh:
    def __init__(self, prefix):
        self.prefix = prefix
        self.n = itertools.count(1)

    def __call__(self):
        return f"${self.prefix}{next(self.n)}"


# normal form ---------------------------------------------------------------


def untc_normal_form(phi):
    fv = U.free_vars(phi)
    if len(fv) > 2:
        raise TooManyFreeVars(f"{len(fv)} free variables")
    state = {"fresh": _Fresh("b"), "nodes": 0, "cap": budget(NF_CAP)}
    return _nf(phi, state)


def _count(state, n):
    state["nodes"] += n
    if state["nodes"] > state["cap"]:
        raise BlowupExceeded("normal form exceeds the node budget")


def _nf(phi, state):
    _count(state, 1)
    if isinstance(phi, (U.Rel, U.Eq)):
        return phi
    if isinstance(phi, U.UNot):
        return U.UNot(_nf(phi.body, state))
    if isinstance(phi, U.Tc):
        return U.Tc(phi.u, phi.v, _nf(phi.body, state), phi.x, phi.y)
    if isinstance(phi, U.UOr):
        return U.UOr(_nf(phi.left, state), _nf(phi.right, state))
    if isinstance(phi, U.UAnd):
        return U.and_all(_nf(c, state) for c in U.conjuncts(phi))
    if isinstance(phi, U.Exists):
        return _nf_exists(phi, state)
    raise TypeError(phi)


def _nf_exists(phi, state):
    fresh = state["fresh"]
    mapping = {v: fresh() for v in phi.vars}
    branches = _dnf(phi.body, mapping, state)
    out = []
    for vars_, blocks in branches:
        vars_ = tuple(mapping.values()) + vars_
        body = U.and_all(_nf(b, state) for b in blocks)
        used = U.free_vars(body)
        qs = [v for v in vars_ if v in used]
        out.append(U.Exists(qs, body) if qs else body)
    return U.or_all(out)


def _dnf(n, mapping, state):
    """List of (bound variables, blocks) whose disjunction is equivalent to n."""
    fv = U.free_vars(n)
    if len(fv) <= 2 or isinstance(n, (U.Rel, U.Eq)):
        return [((), [U.rename_free(n, mapping)])]
    if isinstance(n, U.UOr):
        return _dnf(n.left, mapping, state) + _dnf(n.right, mapping, state)
    if isinstance(n, U.UAnd):
        left = _dnf(n.left, mapping, state)
        right = _dnf(n.right, mapping, state)
        _count(state, len(left) * len(right))
        return [(v1 + v2, b1 + b2) for v1, b1 in left for v2, b2 in right]
    if isinstance(n, U.Exists):
        inner = dict(mapping)
        new = []
        for v in n.vars:
            inner[v] = state["fresh"]()
            new.append(inner[v])
        return [(tuple(new) + vs, bs) for vs, bs in _dnf(n.body, inner, state)]
    raise DialectViolation(f"unexpected node with {len(fv)} free variables")


def nf_width(phi):
    """Largest number of atoms in a conjunction of the normal form."""
    best = 1
    for n in U.walk(phi):
        body = n.body if isinstance(n, U.Exists) else n
        if isinstance(body, U.UAnd) or isinstance(n, U.Exists):
            best = max(best, len(U.conjuncts(body)))
    return best


# UNTC -> UCPDL+ --------------------------------------------------------------


def untc_to_ucpdl(phi, order=None):
    """Formula for at most one free variable, program over `order` (default
    sorted free variables) for two."""
    fv = sorted(U.free_vars(phi))
    if len(fv) > 2:
        raise TooManyFreeVars(f"{len(fv)} free variables")
    tr = _ToUcpdl()
    if len(fv) <= 1:
        return tr.formula(phi, fv[0] if fv else None)
    x, y = order or fv
    return tr.program(phi, x, y)


class _ToUcpdl:
    def __init__(self):
        self.fresh = _Fresh("c")

    def formula(self, phi, x):
        """Formula true at u iff phi holds with x -> u (constant for sentences)."""
        if isinstance(phi, U.Rel) and len(phi.args) == 1:
            return A.Prop(phi.name)
        if isinstance(phi, U.Eq):
            return A.TRUE
        if isinstance(phi, U.UNot):
            return A.Not(self.formula(phi.body, x))
        if isinstance(phi, U.UOr):
            return A.Or(self.formula(phi.left, x), self.formula(phi.right, x))
        if isinstance(phi, U.Tc) and phi.x == phi.y:
            plus = self._plus(phi)
            return A.Diamond(A.Conj([A.PAtom(plus, phi.x, phi.x)], phi.x, phi.x))
        if x is None:
            return A.Diamond(self.conj(phi, None, None))
        return A.Diamond(self.conj(phi, x, x))

    def program(self, phi, x, y):
        """Program containing (u, v) iff phi holds with x -> u, y -> v."""
        fv = U.free_vars(phi)
        if not fv <= {x, y}:
            raise NotNormalForm("free variables outside the designated pair")
        if y not in fv:
            return A.Compose(A.Test(self.formula(phi, x if x in fv else None)), A.UNIV)
        if x not in fv:
            return A.Compose(A.UNIV, A.Test(self.formula(phi, y)))
        if isinstance(phi, U.UOr):
            return A.Union(self.program(phi.left, x, y), self.program(phi.right, x, y))
        if isinstance(phi, U.Rel) and len(phi.args) == 2:
            return A.Atomic(phi.name) if phi.args == (x, y) else A.Converse(phi.name)
        if isinstance(phi, U.Eq):
            return A.EPS
        if isinstance(phi, U.Tc):
            plus = self._plus(phi)
            if (phi.x, phi.y) == (x, y):
                return plus
            return A.Conj([A.PAtom(plus, y, x)], x, y)
        c = self.conj(phi, x, y)
        if len(c.atoms) == 1:
            (atom,) = c.atoms
            if isinstance(atom, A.PAtom) and (atom.x, atom.y) == (x, y):
                return atom.prog
        return c

    def _plus(self, tc):
        pi = self.program(tc.body, tc.u, tc.v)
        return A.Compose(pi, A.Star(pi))

    def _items(self, phi, top, mapping):
        if isinstance(phi, U.UAnd):
            return self._items(phi.left, False, mapping) + self._items(phi.right, False, mapping)
        if isinstance(phi, U.Exists) and (top or len(U.free_vars(phi)) > 2):
            inner = dict(mapping)
            for v in phi.vars:
                inner[v] = self.fresh()
            return self._items(phi.body, False, inner)
        if isinstance(phi, U.UOr) and len(U.free_vars(phi)) > 2:
            raise NotNormalForm("disjunction with more than two free variables")
        return [U.rename_free(phi, mapping)]

    def conj(self, phi, x, y):
        """Conjunctive program for a conjunction, possibly under quantifiers."""
        items = self._items(phi, True, {})
        source = x if x is not None else self.fresh()
        target = y if y is not None else source
        atoms = []
        for it in items:
            fv = sorted(U.free_vars(it))
            if isinstance(it, U.Rel) and len(it.args) >= 3:
                atoms.append(A.RAtom(it.name, it.args))
            elif isinstance(it, U.Rel) and len(it.args) == 2:
                atoms.append(A.PAtom(A.Atomic(it.name), *it.args))
            elif isinstance(it, U.Rel):
                w = it.args[0]
                atoms.append(A.PAtom(A.Test(A.Prop(it.name)), w, w))
            elif isinstance(it, U.Eq):
                atoms.append(A.PAtom(A.EPS, it.x, it.y))
            elif isinstance(it, U.Tc):
                atoms.append(A.PAtom(self._plus(it), it.x, it.y))
            elif not fv:
                atoms.append(A.PAtom(A.Test(self.formula(it, None)), source, source))
            elif len(fv) == 1:
                atoms.append(A.PAtom(A.Test(self.formula(it, fv[0])), fv[0], fv[0]))
            elif len(fv) == 2:
                atoms.append(A.PAtom(self.program(it, fv[0], fv[1]), fv[0], fv[1]))
            else:
                raise NotNormalForm("conjunct with more than two free variables")
        vs = {v for a in atoms for v in a.vars}
        if source not in vs:
            # anchor a fresh source so the result is constant
            anchor = min(vs) if vs else source
            atoms.append(A.PAtom(A.UNIV, source, anchor))
        return A.Conj(atoms, source, target)


# UCPDL+ -> UNTC --------------------------------------------------------------


def ucpdl_to_untc(e, x="x", y="y"):
    """First-order formula with free variable x (formulas) or x, y (programs)."""
    tr = _ToUntc()
    if isinstance(e, A.Formula):
        return tr.formula(e, x)
    return tr.program(e, x, y)


class _ToUntc:
    def __init__(self):
        self.fresh = _Fresh("v")

    def formula(self, phi, x):
        if isinstance(phi, A.Prop):
            return U.Rel(phi.name, (x,))
        if isinstance(phi, A.Not):
            return U.UNot(self.formula(phi.sub, x))
        if isinstance(phi, A.And):
            return U.UAnd(self.formula(phi.left, x), self.formula(phi.right, x))
        if isinstance(phi, A.Diamond):
            z = self.fresh()
            return U.Exists((z,), self.program(phi.prog, x, z))
        if isinstance(phi, A.Loop):
            return self.program(phi.prog, x, x)
        raise DialectViolation(f"unexpected formula node {type(phi).__name__}")

    def program(self, pi, x, y):
        if isinstance(pi, A.Epsilon):
            return U.Eq(x, y)
        if isinstance(pi, A.Universal):
            return U.UAnd(U.Eq(x, x), U.Eq(y, y))
        if isinstance(pi, A.Atomic):
            return U.Rel(pi.name, (x, y))
        if isinstance(pi, A.Converse):
            return U.Rel(pi.name, (y, x))
        if isinstance(pi, A.Union):
            return U.UOr(self.program(pi.left, x, y), self.program(pi.right, x, y))
        if isinstance(pi, A.Intersect):
            return U.UAnd(self.program(pi.left, x, y), self.program(pi.right, x, y))
        if isinstance(pi, A.Compose):
            z = self.fresh()
            return U.Exists((z,), U.UAnd(self.program(pi.left, x, z), self.program(pi.right, z, y)))
        if isinstance(pi, A.Test):
            return U.UAnd(U.Eq(x, y), self.formula(pi.formula, x))
        if isinstance(pi, A.Star):
            u, v = self.fresh(), self.fresh()
            return U.UOr(U.Eq(x, y), U.Tc(u, v, self.program(pi.prog, u, v), x, y))
        if isinstance(pi, A.Conj):
            ren = {v: self.fresh() for v in sorted(pi.variables())}
            parts = [U.Eq(x, ren[pi.source]), U.Eq(y, ren[pi.target])]
            for atom in A.sorted_atoms(pi):
                if isinstance(atom, A.RAtom):
                    parts.append(U.Rel(atom.rel, tuple(ren[v] for v in atom.args)))
                else:
                    parts.append(self.program(atom.prog, ren[atom.x], ren[atom.y]))
            return U.Exists(tuple(ren.values()), U.and_all(parts))
        raise DialectViolation(f"unexpected program node {type(pi).__name__}")
