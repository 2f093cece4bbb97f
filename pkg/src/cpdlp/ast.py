"""Expression trees shared by every dialect.

Nodes are immutable and hash-consed by value: two nodes built from equal
fields compare equal and hash equal.  Hashes are cached because the
evaluator and the translations key dictionaries on whole subtrees.
"""

from __future__ import annotations

import os


def budget(default):
    """Resource cap, overridable through the CPDLP_BUDGET environment variable."""
    raw = os.environ.get("CPDLP_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return default


class Node:
    __slots__ = ("_hash",)
    fields: tuple = ()

    def __init__(self, *args):
        if len(args) != len(self.fields):
            raise TypeError(f"{type(self).__name__} expects {len(self.fields)} fields")
        for name, value in zip(self.fields, args):
            object.__setattr__(self, name, value)
        # children are hashed already, so this stays shallow even for deep trees
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + args))

    def __setattr__(self, name, value):
        raise AttributeError("expression nodes are immutable")

    def values(self):
        return tuple(getattr(self, f) for f in self.fields)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented
        # explicit stack: long operator chains would overflow recursion
        stack = [(self, other)]
        while stack:
            x, y = stack.pop()
            if x is y:
                continue
            if type(x) is not type(y) or x._hash != y._hash:
                return False
            for f in x.fields:
                vx, vy = getattr(x, f), getattr(y, f)
                if isinstance(vx, Node):
                    stack.append((vx, vy))
                elif vx != vy:
                    return False
        return True

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __repr__(self):
        inner = ", ".join(repr(v) for v in self.values())
        return f"{type(self).__name__}({inner})"

    def __str__(self):
        from .syntax import to_text

        return to_text(self)

    def __reduce__(self):
        return (type(self), self.values())


class Formula(Node):
    __slots__ = ()


class Program(Node):
    __slots__ = ()


class Prop(Formula):
    __slots__ = ("name",)
    fields = ("name",)


class Not(Formula):
    __slots__ = ("sub",)
    fields = ("sub",)


class And(Formula):
    __slots__ = ("left", "right")
    fields = ("left", "right")


class Diamond(Formula):
    __slots__ = ("prog",)
    fields = ("prog",)


class Loop(Formula):
    __slots__ = ("prog",)
    fields = ("prog",)


class Epsilon(Program):
    __slots__ = ()


class Universal(Program):
    __slots__ = ()


class Atomic(Program):
    __slots__ = ("name",)
    fields = ("name",)


class Converse(Program):
    __slots__ = ("name",)
    fields = ("name",)


class Union(Program):
    __slots__ = ("left", "right")
    fields = ("left", "right")


class Compose(Program):
    __slots__ = ("left", "right")
    fields = ("left", "right")


class Intersect(Program):
    __slots__ = ("left", "right")
    fields = ("left", "right")


class Star(Program):
    __slots__ = ("prog",)
    fields = ("prog",)


class Test(Program):
    __slots__ = ("formula",)
    fields = ("formula",)


class PAtom(Node):
    __slots__ = ("prog", "x", "y")
    fields = ("prog", "x", "y")

    @property
    def vars(self):
        return (self.x, self.y)


class RAtom(Node):
    __slots__ = ("rel", "args")
    fields = ("rel", "args")

    def __init__(self, rel, args):
        args = tuple(args)
        if len(args) < 3:
            raise ValueError("r-atoms need arity at least 3")
        super().__init__(rel, args)

    @property
    def vars(self):
        return self.args


class Conj(Program):
    """Conjunctive program C[source, target]."""

    __slots__ = ("atoms", "source", "target")
    fields = ("atoms", "source", "target")

    def __init__(self, atoms, source, target):
        atoms = frozenset(atoms)
        super().__init__(atoms, source, target)

    def variables(self):
        out = set()
        for atom in self.atoms:
            out.update(atom.vars)
        return out


EPS = Epsilon()
UNIV = Universal()
TRUE = Diamond(EPS)
FALSE = Not(TRUE)

LEAF_PROGRAMS = (Epsilon, Universal, Atomic, Converse)
BINARY_PROGRAMS = (Union, Compose, Intersect)


def Or(left, right):
    """Derived disjunction: not (not left and not right)."""
    return Not(And(Not(left), Not(right)))


def conj_all(formulas):
    """Left-nested conjunction (as the parser reads it); the empty
    conjunction is true."""
    formulas = list(formulas)
    if not formulas:
        return TRUE
    out = formulas[0]
    for f in formulas[1:]:
        out = And(out, f)
    return out


def disj_all(formulas):
    formulas = list(formulas)
    if not formulas:
        return FALSE
    out = formulas[-1]
    for f in reversed(formulas[:-1]):
        out = Or(f, out)
    return out


def _fold(ctor, items):
    items = list(items)
    if not items:
        raise ValueError("empty fold")
    out = items[0]
    for p in items[1:]:
        out = ctor(out, p)
    return out


def union_all(progs):
    return _fold(Union, progs)


def compose_all(progs):
    return _fold(Compose, progs)


def intersect_all(progs):
    return _fold(Intersect, progs)


def children(e):
    """Direct subexpressions (atoms of a conjunctive program contribute their programs)."""
    if isinstance(e, (Prop, Epsilon, Universal, Atomic, Converse)):
        return ()
    if isinstance(e, Not):
        return (e.sub,)
    if isinstance(e, (And, Union, Compose, Intersect)):
        return (e.left, e.right)
    if isinstance(e, (Diamond, Loop, Star)):
        return (e.prog,)
    if isinstance(e, Test):
        return (e.formula,)
    if isinstance(e, Conj):
        return tuple(a.prog for a in sorted_atoms(e) if isinstance(a, PAtom))
    raise TypeError(f"not an expression: {e!r}")


def sorted_atoms(c):
    """Atoms of a conjunctive program in a deterministic order."""
    from .syntax import to_text

    return sorted(c.atoms, key=lambda a: to_text(a))


def rebuild(e, kids):
    """Rebuild `e` with new children, in the order produced by `children`."""
    if isinstance(e, Not):
        return Not(kids[0])
    if isinstance(e, (And, Union, Compose, Intersect)):
        return type(e)(kids[0], kids[1])
    if isinstance(e, (Diamond, Loop, Star)):
        return type(e)(kids[0])
    if isinstance(e, Test):
        return Test(kids[0])
    if isinstance(e, Conj):
        atoms = []
        it = iter(kids)
        for a in sorted_atoms(e):
            if isinstance(a, PAtom):
                atoms.append(PAtom(next(it), a.x, a.y))
            else:
                atoms.append(a)
        return Conj(atoms, e.source, e.target)
    return e


def walk(e):
    """Pre-order traversal over formulas and programs."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def transform(e, fn):
    """Bottom-up rewrite: `fn` receives each node after its children were rewritten."""
    memo = {}

    def go(node):
        hit = memo.get(node)
        if hit is not None:
            return hit
        kids = children(node)
        if kids:
            new_kids = tuple(go(k) for k in kids)
            node2 = rebuild(node, new_kids) if new_kids != kids else node
        else:
            node2 = node
        out = fn(node2)
        memo[node] = out
        return out

    return go(e)


def atomic_programs(e):
    """Names of atomic programs occurring anywhere in `e`, sorted."""
    names = set()
    for node in walk(e):
        if isinstance(node, (Atomic, Converse)):
            names.add(node.name)
    return sorted(names)


def propositions(e):
    return sorted({n.name for n in walk(e) if isinstance(n, Prop)})


def relation_names(e):
    """Names of r-atom relations with their arities."""
    out = {}
    for node in walk(e):
        if isinstance(node, Conj):
            for a in node.atoms:
                if isinstance(a, RAtom):
                    out[a.rel] = len(a.args)
    return out
