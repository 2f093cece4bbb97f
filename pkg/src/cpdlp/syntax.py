"""Concrete text syntax: tokenizer, recursive-descent parsers and printers.

Operator precedence, tightest first: postfix `*` and `?`, prefix `!` and
`-`, `;`, `&`, then `+` / `|`.  Binary operators associate to the left.
The same token `&` means conjunction on formulas and intersection on
programs, and `+` / `|` mean union or disjunction; the parser first builds
an untyped tree and then resolves every node against the sort expected at
its position.
"""

from __future__ import annotations

import re
from functools import lru_cache

from . import ast as A
from . import untc as U
from .errors import DialectViolation, ParseError

KEYWORDS = {"eps", "U", "true", "false", "loop", "exists", "tc"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[()<>{}\[\],;&+|*?!\-.=])
    """,
    re.VERBOSE,
)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(text):
    tokens = []
    line, col, i = 1, 1, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(line, col, f"unexpected character {text[i]!r}")
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "nl":
            line += 1
            col = 1
        else:
            if kind == "ident":
                tokens.append(Token("kw" if lexeme in KEYWORDS else "ident", lexeme, line, col))
            elif kind == "punct":
                tokens.append(Token("punct", lexeme, line, col))
            col += len(lexeme)
        i = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Stream:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def cur(self):
        return self.toks[self.i]

    def peek(self, k=1):
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def at(self, text):
        t = self.cur
        return t.kind in ("punct", "kw") and t.text == text

    def advance(self):
        t = self.cur
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, text):
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def ident(self):
        t = self.cur
        if t.kind != "ident":
            self.fail("expected identifier")
        return self.advance().text

    def fail(self, msg, tok=None):
        t = tok or self.cur
        got = t.text if t.kind != "eof" else "end of input"
        raise ParseError(t.line, t.col, f"{msg}, got {got!r}")


# ---------------------------------------------------------------------------
# Untyped trees for the modal syntax


class _G:
    __slots__ = ("kind", "args", "tok")

    def __init__(self, kind, args, tok):
        self.kind = kind
        self.args = args
        self.tok = tok


def _parse_union(s):
    left = _parse_inter(s)
    while s.at("+") or s.at("|"):
        tok = s.advance()
        right = _parse_inter(s)
        left = _G("union", (left, right), tok)
    return left


def _parse_inter(s):
    left = _parse_seq(s)
    while s.at("&"):
        tok = s.advance()
        right = _parse_seq(s)
        left = _G("inter", (left, right), tok)
    return left


def _parse_seq(s):
    left = _parse_prefix(s)
    while s.at(";"):
        tok = s.advance()
        right = _parse_prefix(s)
        left = _G("seq", (left, right), tok)
    return left


def _parse_prefix(s):
    if s.at("!"):
        tok = s.advance()
        return _G("not", (_parse_prefix(s),), tok)
    return _parse_postfix(s)


def _parse_postfix(s):
    node = _parse_primary(s)
    while s.at("*") or s.at("?"):
        tok = s.advance()
        node = _G("star" if tok.text == "*" else "test", (node,), tok)
    return node


def _parse_primary(s):
    tok = s.cur
    if tok.kind == "ident":
        s.advance()
        return _G("name", (tok.text,), tok)
    if tok.kind == "kw":
        if tok.text in ("eps", "U", "true", "false"):
            s.advance()
            return _G(tok.text, (), tok)
        if tok.text == "loop":
            s.advance()
            s.expect("(")
            inner = _parse_union(s)
            s.expect(")")
            return _G("loop", (inner,), tok)
        s.fail("unexpected keyword")
    if s.at("-"):
        s.advance()
        name = s.ident()
        return _G("conv", (name,), tok)
    if s.at("<"):
        s.advance()
        inner = _parse_union(s)
        s.expect(">")
        return _G("dia", (inner,), tok)
    if s.at("("):
        s.advance()
        inner = _parse_union(s)
        s.expect(")")
        return inner
    if s.at("{"):
        s.advance()
        atoms = [_parse_atom(s)]
        while s.at(","):
            s.advance()
            atoms.append(_parse_atom(s))
        s.expect("}")
        s.expect("[")
        src = s.ident()
        s.expect(",")
        tgt = s.ident()
        s.expect("]")
        return _G("conj", (atoms, src, tgt), tok)
    s.fail("expected an expression")


def _parse_atom(s):
    tok = s.cur
    prog = _parse_union(s)
    s.expect("(")
    args = [s.ident()]
    while s.at(","):
        s.advance()
        args.append(s.ident())
    s.expect(")")
    if len(args) == 2:
        return ("p", prog, args[0], args[1], tok)
    if len(args) >= 3:
        if prog.kind != "name":
            s.fail("relation atoms need a relation name", tok)
        return ("r", prog.args[0], args, tok)
    s.fail("atoms take two arguments, or at least three for relations", tok)


def _sort_error(g, msg):
    raise ParseError(g.tok.line, g.tok.col, msg)


def _spine(g, convert, ctor):
    """Convert a left-nested chain of one binary operator without recursing
    along its spine."""
    rights = []
    while g.args[0].kind == g.kind:
        rights.append(g.args[1])
        g = g.args[0]
    rights.append(g.args[1])
    out = convert(g.args[0])
    for r in reversed(rights):
        out = ctor(out, convert(r))
    return out


def _to_formula(g):
    k = g.kind
    if k == "name":
        return A.Prop(g.args[0])
    if k == "true":
        return A.TRUE
    if k == "false":
        return A.FALSE
    if k == "not":
        return A.Not(_to_formula(g.args[0]))
    if k == "inter":
        return _spine(g, _to_formula, A.And)
    if k == "union":
        return _spine(g, _to_formula, A.Or)
    if k == "dia":
        return A.Diamond(_to_program(g.args[0]))
    if k == "loop":
        return A.Loop(_to_program(g.args[0]))
    _sort_error(g, f"a program ({k}) cannot stand where a formula is expected")


def _to_program(g):
    k = g.kind
    if k == "name":
        return A.Atomic(g.args[0])
    if k == "eps":
        return A.EPS
    if k == "U":
        return A.UNIV
    if k == "conv":
        return A.Converse(g.args[0])
    if k == "union":
        return _spine(g, _to_program, A.Union)
    if k == "inter":
        return _spine(g, _to_program, A.Intersect)
    if k == "seq":
        return _spine(g, _to_program, A.Compose)
    if k == "star":
        return A.Star(_to_program(g.args[0]))
    if k == "test":
        return A.Test(_to_formula(g.args[0]))
    if k == "conj":
        atoms_g, src, tgt = g.args
        atoms = []
        for at in atoms_g:
            if at[0] == "p":
                atoms.append(A.PAtom(_to_program(at[1]), at[2], at[3]))
            else:
                atoms.append(A.RAtom(at[1], at[2]))
        c = A.Conj(atoms, src, tgt)
        if src not in c.variables() or tgt not in c.variables():
            _sort_error(g, "source and target must occur in the atoms")
        return c
    _sort_error(g, f"a formula ({k}) cannot stand where a program is expected")


def _check_roles(e):
    """A name used both as a proposition and as a program, or as a relation,
    is rejected."""
    props = set(A.propositions(e))
    progs = set(A.atomic_programs(e))
    rels = A.relation_names(e)
    arities = {}
    for node in A.walk(e):
        if isinstance(node, A.Conj):
            for a in node.atoms:
                if isinstance(a, A.RAtom):
                    if arities.setdefault(a.rel, len(a.args)) != len(a.args):
                        raise DialectViolation(f"relation {a.rel} used with different arities")
    clash = (props & progs) | (props & set(rels)) | (progs & set(rels))
    if clash:
        raise DialectViolation(f"name used in conflicting roles: {sorted(clash)[0]}")


def _finish(s, tree, sort):
    if s.cur.kind != "eof":
        s.fail("trailing input")
    if sort == "formula":
        e = _to_formula(tree)
    elif sort == "program":
        e = _to_program(tree)
    else:
        try:
            e = _to_formula(tree)
        except ParseError:
            e = _to_program(tree)
    _check_roles(e)
    return e


def parse(text, dialect=None, sort=None, k=None):
    """Parse an expression.

    `sort` is "formula", "program" or None (formula if possible).  When a
    dialect name is given the result is validated with classify_dialect.
    `dialect="UNTC"` parses the first-order syntax instead.
    """
    if dialect == "UNTC":
        return parse_untc(text)
    s = _Stream(text)
    tree = _parse_union(s)
    e = _finish(s, tree, sort)
    if dialect is not None:
        from .measures import classify_dialect

        if not classify_dialect(e, dialect, k):
            raise DialectViolation(f"expression is not in {dialect}")
    return e


def parse_formula(text):
    return parse(text, sort="formula")


def parse_program(text):
    return parse(text, sort="program")


# ---------------------------------------------------------------------------
# Printing

_PREC_UNION, _PREC_INTER, _PREC_SEQ, _PREC_PREFIX, _PREC_POSTFIX, _PREC_ATOM = 1, 2, 3, 4, 5, 6


def _prec(e):
    if isinstance(e, (A.Union,)):
        return _PREC_UNION
    if isinstance(e, (A.Intersect, A.And)):
        return _PREC_INTER
    if isinstance(e, A.Compose):
        return _PREC_SEQ
    if isinstance(e, A.Not):
        return _PREC_PREFIX
    if isinstance(e, (A.Star, A.Test)):
        return _PREC_POSTFIX
    return _PREC_ATOM


def _wrap(e, need):
    s = to_text(e)
    return f"({s})" if _prec(e) < need else s


@lru_cache(maxsize=200000)
def to_text(e):
    """Deterministic printer with minimal parentheses."""
    if isinstance(e, U.UntcFormula):
        return untc_to_text(e)
    if isinstance(e, A.Prop):
        return e.name
    if isinstance(e, A.Not):
        return "!" + _wrap(e.sub, _PREC_PREFIX)
    if isinstance(e, (A.And, A.Intersect, A.Union, A.Compose)):
        op = {A.And: "&", A.Intersect: "&", A.Union: "+", A.Compose: ";"}[type(e)]
        p = _prec(e)
        # walk the left spine iteratively so long chains do not recurse
        rights = []
        while type(e.left) is type(e):
            rights.append(e.right)
            e = e.left
        rights.append(e.right)
        parts = [_wrap(e.left, p)] + [_wrap(r, p + 1) for r in reversed(rights)]
        return f" {op} ".join(parts)
    if isinstance(e, A.Diamond):
        return f"<{to_text(e.prog)}>"
    if isinstance(e, A.Loop):
        return f"loop({to_text(e.prog)})"
    if isinstance(e, A.Epsilon):
        return "eps"
    if isinstance(e, A.Universal):
        return "U"
    if isinstance(e, A.Atomic):
        return e.name
    if isinstance(e, A.Converse):
        return "-" + e.name
    if isinstance(e, A.Star):
        return _wrap(e.prog, _PREC_POSTFIX) + "*"
    if isinstance(e, A.Test):
        return _wrap(e.formula, _PREC_POSTFIX) + "?"
    if isinstance(e, A.PAtom):
        return f"{_wrap(e.prog, _PREC_ATOM)}({e.x}, {e.y})"
    if isinstance(e, A.RAtom):
        return f"{e.rel}({', '.join(e.args)})"
    if isinstance(e, A.Conj):
        atoms = sorted(to_text(a) for a in e.atoms)
        return "{" + ", ".join(atoms) + "}" + f"[{e.source}, {e.target}]"
    raise TypeError(f"cannot print {e!r}")


# ---------------------------------------------------------------------------
# First-order syntax


def _u_or(s):
    left = _u_and(s)
    while s.at("|") or s.at("+"):
        s.advance()
        left = U.UOr(left, _u_and(s))
    return left


def _u_and(s):
    left = _u_unary(s)
    while s.at("&"):
        s.advance()
        left = U.UAnd(left, _u_unary(s))
    return left


def _u_unary(s):
    if s.at("!"):
        s.advance()
        return U.UNot(_u_unary(s))
    if s.at("exists"):
        s.advance()
        names = [s.ident()]
        while s.cur.kind == "ident":
            names.append(s.ident())
        if s.at(","):
            s.fail("separate quantified variables with spaces")
        s.expect(".")
        return U.Exists(names, _u_or(s))
    return _u_primary(s)


def _u_primary(s):
    if s.at("("):
        s.advance()
        inner = _u_or(s)
        s.expect(")")
        return inner
    if s.at("tc"):
        s.advance()
        s.expect("[")
        u = s.ident()
        s.expect(",")
        v = s.ident()
        s.expect("]")
        s.expect("(")
        body = _u_or(s)
        s.expect(")")
        s.expect("(")
        x = s.ident()
        s.expect(",")
        y = s.ident()
        s.expect(")")
        return U.Tc(u, v, body, x, y)
    name = s.ident()
    if s.at("="):
        s.advance()
        return U.Eq(name, s.ident())
    s.expect("(")
    args = [s.ident()]
    while s.at(","):
        s.advance()
        args.append(s.ident())
    s.expect(")")
    return U.Rel(name, args)


def parse_untc(text):
    s = _Stream(text)
    phi = _u_or(s)
    if s.cur.kind != "eof":
        s.fail("trailing input")
    arities = {}
    for node in U.walk(phi):
        if isinstance(node, U.Rel):
            if arities.setdefault(node.name, len(node.args)) != len(node.args):
                raise DialectViolation(f"relation {node.name} used with different arities")
    return U.check(phi)


def _u_prec(phi):
    if isinstance(phi, U.Exists):
        return 0
    if isinstance(phi, U.UOr):
        return 1
    if isinstance(phi, U.UAnd):
        return 2
    if isinstance(phi, U.UNot):
        return 3
    return 4


def _u_wrap(phi, need):
    s = untc_to_text(phi)
    return f"({s})" if _u_prec(phi) < need else s


@lru_cache(maxsize=200000)
def untc_to_text(phi):
    if isinstance(phi, U.Rel):
        return f"{phi.name}({', '.join(phi.args)})"
    if isinstance(phi, U.Eq):
        return f"{phi.x} = {phi.y}"
    if isinstance(phi, U.UOr):
        return f"{_u_wrap(phi.left, 1)} | {_u_wrap(phi.right, 2)}"
    if isinstance(phi, U.UAnd):
        return f"{_u_wrap(phi.left, 2)} & {_u_wrap(phi.right, 3)}"
    if isinstance(phi, U.UNot):
        return "!" + _u_wrap(phi.body, 3)
    if isinstance(phi, U.Exists):
        return f"exists {' '.join(phi.vars)}. {untc_to_text(phi.body)}"
    if isinstance(phi, U.Tc):
        return f"tc[{phi.u}, {phi.v}]({untc_to_text(phi.body)})({phi.x}, {phi.y})"
    raise TypeError(f"cannot print {phi!r}")
