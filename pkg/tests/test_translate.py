import random

import pytest
from hypothesis import given, strategies as st

from cpdlp import ast as A
from cpdlp.errors import DialectViolation, PreconditionViolation, ShapeViolation, WidthExceeded
from cpdlp.evaluator import Evaluator
from cpdlp.measures import classify_dialect
from cpdlp.syntax import parse, parse_program, to_text
from cpdlp.translate import (
    conj_to_loop,
    elim_intersection,
    icpdl_to_conj,
    is_self_loop_shape,
    lemita_program,
    loop_to_conj,
    tw2_to_icpdl,
)

from gen import ExprGen, structure
from oracle import Naive

P = parse_program


def same_denotation(e1, e2, K):
    n = Naive(K)
    return n.denote(e1) == n.denote(e2)


class TestTr1:
    def test_loop(self):
        assert loop_to_conj(parse("loop(a)")) == parse("<{a(x,x)}[x,x]>")

    def test_prop(self):
        assert loop_to_conj(parse("p")) == parse("p")

    def test_nested(self):
        e = parse("loop(a ; loop(b)?)")
        out = loop_to_conj(e)
        assert out == parse("<{(a ; <{b(x,x)}[x,x]>?)(x,x)}[x,x]>")
        for seed in range(20):
            r = random.Random(seed)
            assert same_denotation(e, out, structure(r, r.randint(1, 5)))

    def test_rejects_non_loop_dialect(self):
        with pytest.raises(DialectViolation):
            loop_to_conj(parse("<a & b>"))

    @given(st.integers(0, 10**9))
    def test_output_shape(self, seed):
        e = ExprGen(random.Random(seed), loop=True).formula(4)
        out = loop_to_conj(e)
        assert all(is_self_loop_shape(n) for n in A.walk(out) if isinstance(n, A.Conj))
        assert not any(isinstance(n, A.Loop) for n in A.walk(out))


class TestTr2:
    def test_single(self):
        assert conj_to_loop(P("{a(x,x)}[x,x]")) == P("loop(a)?")

    def test_pair(self):
        assert conj_to_loop(P("{a(x,x), b(x,x)}[x,x]")) == P("(loop(a) & loop(b))?")

    def test_shape_violation(self):
        with pytest.raises(ShapeViolation):
            conj_to_loop(P("{a(x,y)}[x,y]"))


class TestTr3:
    def test_intersection(self):
        assert icpdl_to_conj(P("a & b")) == P("{a(x,y), b(x,y)}[x,y]")

    def test_star(self):
        assert icpdl_to_conj(P("(a & b)*")) == A.Star(P("{a(x,y), b(x,y)}[x,y]"))

    def test_union_unchanged(self):
        assert icpdl_to_conj(P("a + b")) == P("a + b")

    def test_rejects_conj(self):
        with pytest.raises(DialectViolation):
            icpdl_to_conj(P("{a(x,y)}[x,y]"))

    @given(st.integers(0, 10**9))
    def test_output_in_tw1(self, seed):
        e = ExprGen(random.Random(seed), inter=True).formula(4)
        out = icpdl_to_conj(e)
        assert classify_dialect(out, "CPDLplusTW(1)")


class TestElimIntersection:
    def test_basic(self):
        assert elim_intersection(P("a & b")) == P("{a(x,y), b(x,y)}[x,y]")

    def test_no_intersection(self):
        e = P("a ; b* + -a")
        assert elim_intersection(e) == e

    def test_inside_conj(self):
        e = P("{(a & b)(x,y), c(y,z)}[x,z]")
        out = elim_intersection(e)
        assert not any(isinstance(n, A.Intersect) for n in A.walk(out))
        for seed in range(20):
            r = random.Random(seed)
            assert same_denotation(e, out, structure(r, 4, progs=("a", "b", "c")))


class TestLemita:
    def test_single_variable(self):
        atoms = P("{a(x,x), b(x,x)}[x,x]").atoms
        assert lemita_program(atoms, "x", "x") == P("(<a & eps> & <b & eps>)?")

    def test_two_variables(self):
        atoms = P("{a(x,y), b(y,x)}[x,y]").atoms
        assert lemita_program(atoms, "x", "y") == P("<eps>? ; (a & -b) ; <eps>?")

    def test_three_variables(self):
        atoms = P("{a(x,y), b(y,z), c(x,z)}[x,y]").atoms
        expected = P("<eps>? ; (a & (c ; <eps>? ; -b)) ; <eps>?")
        assert lemita_program(atoms, "x", "y") == expected

    def test_preconditions(self):
        with pytest.raises(PreconditionViolation):
            lemita_program(P("{a(x,y), a(y,z), a(z,w)}[x,w]").atoms, "x", "w")
        with pytest.raises(PreconditionViolation):
            lemita_program(P("{U(x,y)}[x,y]").atoms, "x", "y")

    @given(st.integers(0, 10**9))
    def test_semantics(self, seed):
        r = random.Random(seed)
        g = ExprGen(r, inter=True, progs=("a", "b"))
        vs = ["x", "y", "z"][: r.randint(1, 3)]
        atoms = [A.PAtom(g.program(2), u, v) for u in vs for v in vs if u < v or r.random() < 0.3]
        atoms = atoms or [A.PAtom(g.program(2), "x", "x")]
        x, y = r.choice(vs), r.choice(vs)
        c = A.Conj(atoms, x, y)
        out = lemita_program(atoms, x, y)
        assert classify_dialect(out, "ICPDL")
        assert same_denotation(c, out, structure(r, r.randint(1, 5)))


class TestTw2:
    def test_single_atom(self):
        out = tw2_to_icpdl(P("{a(x,y)}[x,y]"))
        assert out == P("<eps>? ; ((a + -a)* & a) ; <eps>?")

    def test_pair(self):
        out = tw2_to_icpdl(P("{a(x,y), b(x,y)}[x,y]"))
        for seed in range(30):
            r = random.Random(seed)
            K = structure(r, r.randint(1, 5))
            assert Naive(K).program(out) == Naive(K).program(P("a & b"))

    def test_width_exceeded(self):
        with pytest.raises(WidthExceeded):
            tw2_to_icpdl(P("{a(x,y), a(x,z), a(x,w), a(y,z), a(y,w), a(z,w)}[x,y]"))

    def test_rejects_universal_and_loop(self):
        with pytest.raises(DialectViolation):
            tw2_to_icpdl(P("{U(x,y)}[x,y]"))
        with pytest.raises(DialectViolation):
            tw2_to_icpdl(parse("loop(a)"))

    def test_r_atoms_rejected(self):
        with pytest.raises(ShapeViolation):
            tw2_to_icpdl(P("{R(x,y,z)}[x,y]"))

    @given(st.integers(0, 10**9))
    def test_six_variables(self, seed):
        r = random.Random(seed)
        c = ExprGen(r, conj=True, inter=True, max_tw=2, max_vars=6, max_atoms=7).conj(2)
        out = tw2_to_icpdl(c)
        assert classify_dialect(out, "ICPDL")
        K = structure(r, r.randint(1, 5))
        assert Naive(K).program(out) == Naive(K).program(c)
