import random

import pytest
from hypothesis import given, strategies as st

from cpdlp import ast as A
from cpdlp import untc as U
from cpdlp.errors import ArityMismatch, UnboundVariable
from cpdlp.evaluator import Evaluator, eval_conj, eval_formula, eval_program, eval_untc, untc_relation
from cpdlp.structures import Structure
from cpdlp.syntax import parse, parse_program, parse_untc

from gen import ExprGen, UntcGen, structure
from oracle import Naive, untc_holds

XI4 = (
    "<{a(x1,x2), a(x1,x3), a(x1,x4), a(x2,x3), a(x2,x4), a(x3,x4)}[x1,x4]>"
    " & !<{a(x1,y), a(y,y)}[x1,y]>"
)


def clique(n, directed_all=True):
    ws = [f"w{i}" for i in range(n)]
    pairs = [(u, v) for u in ws for v in ws if u != v]
    return Structure(ws, binary={"a": pairs})


def chain3():
    return Structure(["u", "v", "w"], binary={"a": [("u", "v"), ("v", "w")]})


class TestFormulas:
    def test_prop(self):
        K = Structure(["w"], unary={"p": ["w"]})
        assert eval_formula(K, parse("p")) == {"w"}

    def test_eps_everywhere(self):
        K = structure(random.Random(1), 5)
        assert eval_formula(K, parse("<eps>")) == set(K.worlds)

    def test_xi4_on_clique(self):
        K = clique(4)
        assert eval_formula(K, parse(XI4)) == set(K.worlds)

    def test_xi4_needs_four_worlds(self):
        assert eval_formula(clique(3), parse(XI4)) == set()

    def test_loop(self):
        K = Structure(["u", "v"], binary={"a": [("u", "v"), ("v", "u")]})
        assert eval_formula(K, parse("loop(a ; a)")) == {"u", "v"}
        assert eval_formula(K, parse("loop(a)")) == set()

    def test_arity_mismatch(self):
        K = Structure(["u"], unary={"a": ["u"]})
        with pytest.raises(ArityMismatch):
            eval_formula(K, parse("<a>"))

    def test_unknown_names_empty(self):
        K = Structure(["u"])
        assert eval_formula(K, parse("p")) == set()
        assert eval_program(K, parse_program("b")) == set()


class TestPrograms:
    def test_converse(self):
        K = Structure(["u", "v"], binary={"a": [("u", "v")]})
        assert eval_program(K, parse_program("-a")) == {("v", "u")}

    def test_star_chain(self):
        got = eval_program(chain3(), parse_program("a*"))
        assert got == {("u", "u"), ("v", "v"), ("w", "w"), ("u", "v"), ("v", "w"), ("u", "w")}

    def test_universal(self):
        K = Structure(["a1", "a2", "a3"])
        assert len(eval_program(K, A.UNIV)) == 9

    @given(st.integers(0, 10**9))
    def test_against_naive(self, seed):
        r = random.Random(seed)
        g = ExprGen(r, conj=True, inter=True, loop=True, univ=True, ratoms=True, max_atoms=4)
        e = g.formula(4) if r.random() < 0.5 else g.program(4)
        K = structure(r, r.randint(1, 5), ternary="R")
        ev = Evaluator(K)
        got = ev.formula(e) if isinstance(e, A.Formula) else ev.program(e)
        assert got == Naive(K).denote(e)

    @given(st.integers(0, 10**9))
    def test_algebraic_laws(self, seed):
        r = random.Random(seed)
        g = ExprGen(r, inter=True)
        p1, p2 = g.program(3), g.program(3)
        K = structure(r, r.randint(1, 6))
        ev = Evaluator(K)
        assert ev.program(A.Intersect(p1, p2)) == ev.program(p1) & ev.program(p2)
        pair = A.Conj([A.PAtom(p1, "x", "y"), A.PAtom(p2, "x", "y")], "x", "y")
        assert ev.program(pair) == ev.program(A.Intersect(p1, p2))
        assert ev.formula(A.Loop(p1)) == {u for u, v in ev.program(p1) if u == v}
        assert ev.program(A.Star(p1)) == ev.program(A.EPS) | ev.program(A.Compose(p1, A.Star(p1)))


class TestConj:
    def test_pair_is_intersection(self):
        K = structure(random.Random(3), 5)
        c = parse_program("{a(x,y), b(x,y)}[x,y]")
        assert eval_conj(K, c.atoms, ("x", "y")) == K.rel("a") & K.rel("b")

    def test_unsatisfiable(self):
        K = Structure(["u", "v"], binary={"a": [("u", "v")]})
        c = parse_program("{a(x,y), a(y,x)}[x,y]")
        assert eval_conj(K, c.atoms, ("x", "y")) == set()

    def test_triangle_on_cycle(self):
        K = Structure(["u", "v", "w"], binary={"a": [("u", "v"), ("v", "w"), ("w", "u")]})
        c = parse_program("{a(x,y), a(y,z), a(z,x)}[x,x]")
        for mode in ("brute", "decomp"):
            assert eval_conj(K, c.atoms, ("x",), mode) == {("u",), ("v",), ("w",)}

    def test_r_atoms(self):
        K = Structure(["u", "v"], higher={"R": (3, [("u", "v", "v")])})
        c = parse_program("{R(x,y,y)}[x,y]")
        assert eval_program(K, c) == {("u", "v")}

    def test_r_atom_arity_mismatch(self):
        K = Structure(["u", "v"], higher={"R": (3, [("u", "v", "v")])})
        with pytest.raises(ArityMismatch):
            eval_program(K, parse_program("{R(x,y,y,x)}[x,y]"))

    @given(st.integers(0, 10**9))
    def test_modes_agree(self, seed):
        r = random.Random(seed)
        c = ExprGen(r, conj=True, ratoms=True, max_atoms=5).conj(3)
        K = structure(r, r.randint(1, 5), ternary="R")
        vs = sorted(c.variables())
        out = tuple(r.sample(vs, r.randint(1, len(vs))))
        brute = eval_conj(K, c.atoms, out, "brute")
        assert brute == eval_conj(K, c.atoms, out, "decomp")
        assert brute == Naive(K).conj(c.atoms, out)


class TestUntc:
    def test_equality(self):
        K = Structure(["u"])
        assert eval_untc(K, parse_untc("x = y"), {"x": "u", "y": "u"})

    def test_tc_chain(self):
        phi = parse_untc("tc[u,v](a(u,v))(x,y)")
        assert eval_untc(chain3(), phi, {"x": "u", "y": "w"})

    def test_tc_at_least_one_step(self):
        phi = parse_untc("tc[u,v](a(u,v))(x,y)")
        assert not eval_untc(chain3(), phi, {"x": "u", "y": "u"})

    def test_exists_matches_conj(self):
        r = random.Random(9)
        K = structure(r, 5)
        phi = parse_untc("exists z. a(x,z) & b(z,y)")
        rel = untc_relation(K, phi, ("x", "y"))
        assert rel == eval_program(K, parse_program("{a(x,z), b(z,y)}[x,y]"))

    def test_unbound(self):
        with pytest.raises(UnboundVariable):
            eval_untc(chain3(), parse_untc("a(x,y)"), {"x": "u"})

    @given(st.integers(0, 10**9))
    def test_against_naive(self, seed):
        r = random.Random(seed)
        phi = UntcGen(r, ternary="R").formula(3, ["x", "y"])
        K = structure(r, r.randint(1, 4), props=("p",), ternary="R")
        for nu in ({"x": u, "y": v} for u in K.worlds for v in K.worlds):
            assert eval_untc(K, phi, nu) == untc_holds(K, phi, nu)
