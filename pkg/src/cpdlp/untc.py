"""Unary-negation first-order logic with binary transitive closure.

Formulas are built from relation atoms, equalities, conjunction,
disjunction, existential quantification, negation of formulas with at most
one free variable, and [TC_{u,v} phi](x, y) where phi has exactly the free
variables u and v.
"""

from __future__ import annotations

from functools import lru_cache

from .ast import Node
from .errors import DialectViolation


class UntcFormula(Node):
    __slots__ = ()


class Rel(UntcFormula):
    __slots__ = ("name", "args")
    fields = ("name", "args")

    def __init__(self, name, args):
        super().__init__(name, tuple(args))


class Eq(UntcFormula):
    __slots__ = ("x", "y")
    fields = ("x", "y")


class UAnd(UntcFormula):
    __slots__ = ("left", "right")
    fields = ("left", "right")


class UOr(UntcFormula):
    __slots__ = ("left", "right")
    fields = ("left", "right")


class Exists(UntcFormula):
    __slots__ = ("vars", "body")
    fields = ("vars", "body")

    def __init__(self, vars, body):
        super().__init__(tuple(vars), body)


class UNot(UntcFormula):
    __slots__ = ("body",)
    fields = ("body",)


class Tc(UntcFormula):
    __slots__ = ("u", "v", "body", "x", "y")
    fields = ("u", "v", "body", "x", "y")


@lru_cache(maxsize=None)
def free_vars(phi):
    if isinstance(phi, Rel):
        return frozenset(phi.args)
    if isinstance(phi, Eq):
        return frozenset((phi.x, phi.y))
    if isinstance(phi, (UAnd, UOr)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Exists):
        return free_vars(phi.body) - set(phi.vars)
    if isinstance(phi, UNot):
        return free_vars(phi.body)
    if isinstance(phi, Tc):
        return frozenset((phi.x, phi.y))
    raise TypeError(f"not a UNTC formula: {phi!r}")


def size(phi):
    """Size measure: relation atoms count their arity, equalities 1,
    and each quantifier, negation and closure adds 1."""
    if isinstance(phi, Rel):
        return len(phi.args)
    if isinstance(phi, Eq):
        return 1
    if isinstance(phi, (UAnd, UOr)):
        return size(phi.left) + size(phi.right)
    if isinstance(phi, Exists):
        return len(phi.vars) + size(phi.body)
    if isinstance(phi, UNot):
        return 1 + size(phi.body)
    if isinstance(phi, Tc):
        return 1 + size(phi.body)
    raise TypeError(f"not a UNTC formula: {phi!r}")


def check(phi):
    """Raise DialectViolation unless negations and closures respect their
    free-variable restrictions."""
    for node in walk(phi):
        if isinstance(node, UNot) and len(free_vars(node.body)) > 1:
            raise DialectViolation("negated subformula has more than one free variable")
        if isinstance(node, Tc):
            if node.u == node.v:
                raise DialectViolation("closure variables must differ")
            if free_vars(node.body) != frozenset((node.u, node.v)):
                raise DialectViolation("closure body must have exactly the free variables u, v")
        if isinstance(node, Rel) and not node.args:
            raise DialectViolation("relation atoms need at least one argument")
    return phi


def untc_children(phi):
    if isinstance(phi, (UAnd, UOr)):
        return (phi.left, phi.right)
    if isinstance(phi, (Exists, UNot, Tc)):
        return (phi.body,)
    return ()


def walk(phi):
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(untc_children(node)))


def all_vars(phi):
    out = set()
    for node in walk(phi):
        if isinstance(node, Rel):
            out.update(node.args)
        elif isinstance(node, Eq):
            out.update((node.x, node.y))
        elif isinstance(node, Exists):
            out.update(node.vars)
        elif isinstance(node, Tc):
            out.update((node.u, node.v, node.x, node.y))
    return out


def and_all(parts):
    parts = list(parts)
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = UAnd(p, out)
    return out


def or_all(parts):
    parts = list(parts)
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = UOr(p, out)
    return out


def conjuncts(phi):
    """Flatten a tree of conjunctions."""
    if isinstance(phi, UAnd):
        return conjuncts(phi.left) + conjuncts(phi.right)
    return [phi]


def disjuncts(phi):
    if isinstance(phi, UOr):
        return disjuncts(phi.left) + disjuncts(phi.right)
    return [phi]


def rename_free(phi, mapping):
    """Capture-avoiding renaming is not needed here: callers only rename to
    fresh names, so bound occurrences are simply left alone."""
    if not mapping:
        return phi
    m = lambda v: mapping.get(v, v)
    if isinstance(phi, Rel):
        return Rel(phi.name, [m(a) for a in phi.args])
    if isinstance(phi, Eq):
        return Eq(m(phi.x), m(phi.y))
    if isinstance(phi, UAnd):
        return UAnd(rename_free(phi.left, mapping), rename_free(phi.right, mapping))
    if isinstance(phi, UOr):
        return UOr(rename_free(phi.left, mapping), rename_free(phi.right, mapping))
    if isinstance(phi, UNot):
        return UNot(rename_free(phi.body, mapping))
    if isinstance(phi, Exists):
        inner = {k: v for k, v in mapping.items() if k not in phi.vars}
        return Exists(phi.vars, rename_free(phi.body, inner))
    if isinstance(phi, Tc):
        # the body is closed apart from u, v which are bound by the closure
        return Tc(phi.u, phi.v, phi.body, m(phi.x), m(phi.y))
    raise TypeError(phi)
