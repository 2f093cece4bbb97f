"""Command-line front end.

Every command prints JSON lines on stdout.  Boolean answers use the exit
code (0 true, 1 false); usage and parse errors exit with 2, semantic errors
(dialect violations, arity mismatches, exceeded budgets) with 3.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import ast as A
from . import untc as U
from .errors import CpdlpError
from .evaluator import Evaluator, UntcEvaluator
from .games import GameArena, bounded_round_duplicator_wins, k_bisimulates, k_simulates, pad
from .measures import DIALECTS, classify_dialect, measures
from .satredux import ksplit, tree_translate
from .structures import load_file
from .syntax import parse, parse_untc, to_text
from .translate import conj_to_loop, elim_intersection, icpdl_to_conj, loop_to_conj, tw2_to_icpdl
from .treedecomp import validate
from .unravel import unravel
from .untc_translate import ucpdl_to_untc, untc_normal_form, untc_to_ucpdl


def _emit(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _expr(text, sort=None):
    return parse(text, sort=sort)


def _kind(e):
    if isinstance(e, U.UntcFormula):
        return "untc"
    return "formula" if isinstance(e, A.Formula) else "program"


def _sorted(xs):
    return sorted(xs, key=lambda x: (x,) if isinstance(x, str) else x)


# commands -------------------------------------------------------------------


def cmd_parse(args):
    if args.dialect == "UNTC":
        e = parse_untc(args.expr)
    else:
        e = parse(args.expr, dialect=args.dialect, sort=args.sort)
    _emit({"kind": _kind(e), "text": to_text(e)})
    return 0


def cmd_measure(args):
    e = _expr(args.expr, args.sort)
    m = measures(e)
    dialects = []
    for d in DIALECTS:
        if d.endswith("TW"):
            continue
        if classify_dialect(e, d):
            dialects.append(d)
    out = dict(m.__dict__)
    out["dialects"] = dialects
    _emit(out)
    return 0


def cmd_eval(args):
    K = load_file(args.structure)
    if args.untc:
        phi = parse_untc(args.expr)
        fv = sorted(U.free_vars(phi))
        rows = UntcEvaluator(K).relation(phi, fv)
        _emit({"vars": fv, "tuples": _sorted([list(r) for r in rows])})
        return 0
    e = _expr(args.expr, args.sort)
    ev = Evaluator(K, args.mode)
    if isinstance(e, A.Formula):
        worlds = ev.formula(e)
        if args.world is not None:
            holds = args.world in worlds
            _emit({"holds": holds})
            return 0 if holds else 1
        _emit({"worlds": [w for w in K.worlds if w in worlds]})
        return 0
    pairs = ev.program(e)
    if args.pair is not None:
        holds = tuple(args.pair) in pairs
        _emit({"holds": holds})
        return 0 if holds else 1
    _emit({"pairs": _sorted([list(p) for p in pairs])})
    return 0


def _tr_untc(text):
    return untc_to_ucpdl(untc_normal_form(parse_untc(text)))


TRANSLATIONS = {
    ("loopcpdl", "cpdlplus-loop"): lambda t: loop_to_conj(parse(t)),
    ("cpdlplus-loop", "loopcpdl"): lambda t: conj_to_loop(parse(t)),
    ("icpdl", "cpdlplus-cap"): lambda t: icpdl_to_conj(parse(t)),
    ("icpdlplus-tw2", "tw2"): lambda t: elim_intersection(parse(t)),
    ("tw2", "icpdl"): lambda t: tw2_to_icpdl(parse(t)),
    ("icpdlplus-tw2", "icpdl"): lambda t: tw2_to_icpdl(parse(t)),
    ("untc", "ucpdlplus"): _tr_untc,
    ("ucpdlplus", "untc"): lambda t: ucpdl_to_untc(parse(t)),
}

LANGS = sorted({a for pair in TRANSLATIONS for a in pair})


def cmd_translate(args):
    fn = TRANSLATIONS.get((args.source, args.target))
    if fn is None:
        sys.stderr.write(f"no translation from {args.source} to {args.target}\n")
        return 2
    out = fn(args.expr)
    _emit({"kind": _kind(out), "text": to_text(out)})
    return 0


def cmd_equiv(args):
    K = load_file(args.structure)
    e1, e2 = parse(args.left), parse(args.right)
    if _kind(e1) != _kind(e2):
        # a bare name or intersection may read as either sort
        e1, e2 = parse(args.left, sort="program"), parse(args.right, sort="program")
    ev = Evaluator(K)
    d1 = ev.formula(e1) if isinstance(e1, A.Formula) else ev.program(e1)
    d2 = ev.formula(e2) if isinstance(e2, A.Formula) else ev.program(e2)
    equal = d1 == d2
    _emit({"equal": equal})
    return 0 if equal else 1


def cmd_game(args):
    K, K2 = load_file(args.left), load_file(args.right)
    u, v = pad(args.start, args.k), pad(args.answer, args.k)
    arena = GameArena(K, K2, args.k, args.kind, args.universal)
    starts = [arena.start(u, v)]
    if args.kind == "bisim":
        starts.append(("s", 1, v, u))
    if args.rounds is not None:
        wins = all(bounded_round_duplicator_wins(arena, s, args.rounds) for s in starts)
    else:
        decide = k_simulates if args.kind == "sim" else k_bisimulates
        wins = decide(K, u, K2, v, args.k, args.universal, not args.no_shortcut)
    if args.dump:
        arena.solve([s for s in starts if arena.valid(s)])
        for p in sorted(arena.duplicator_wins, key=repr):
            _emit({"position": [list(x) if isinstance(x, tuple) else x for x in p]})
    _emit({"duplicator_wins": wins})
    return 0 if wins else 1


def cmd_unravel(args):
    K = load_file(args.structure)
    Kh, uh, td = unravel(K, args.world, args.k, args.depth)
    _emit(
        {
            "structure": Kh.to_json(),
            "root": uh,
            "width": td.width,
            "valid": validate(Kh.gaifman(), td),
            "bags": {str(n): sorted(b) for n, b in sorted(td.bags.items())},
            "parent": {str(n): p for n, p in sorted(td.parent.items())},
        }
    )
    return 0


def cmd_split(args):
    p = parse(args.expr, sort="program")
    for t in ksplit(p, args.k):
        _emit({"tuple": [to_text(x) for x in t]})
    return 0


def cmd_treetranslate(args):
    c = parse(args.expr, sort="program")
    if not isinstance(c, A.Conj):
        sys.stderr.write("expected a conjunctive program\n")
        return 2
    _emit({"kind": "program", "text": to_text(tree_translate(c))})
    return 0


# argument parsing ---------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="cpdlp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def sort_opt(p):
        p.add_argument("--sort", choices=["formula", "program"], default=None)

    p = sub.add_parser("parse", help="parse and print an expression")
    p.add_argument("expr")
    p.add_argument("--dialect", default=None)
    sort_opt(p)
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("measure", help="structural measures and dialects")
    p.add_argument("expr")
    sort_opt(p)
    p.set_defaults(fn=cmd_measure)

    p = sub.add_parser("eval", help="evaluate on a structure")
    p.add_argument("expr")
    p.add_argument("--structure", required=True)
    p.add_argument("--world", default=None)
    p.add_argument("--pair", nargs=2, default=None)
    p.add_argument("--mode", choices=["decomp", "brute"], default="decomp")
    p.add_argument("--untc", action="store_true", help="first-order input")
    sort_opt(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("translate", help="translate between dialects")
    p.add_argument("expr")
    p.add_argument("--from", dest="source", choices=LANGS, required=True)
    p.add_argument("--to", dest="target", choices=LANGS, required=True)
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("equiv", help="compare denotations on a structure")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--structure", required=True)
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("game", help="solve a (bi)simulation game")
    p.add_argument("kind", choices=["sim", "bisim"])
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--start", nargs="+", required=True, help="worlds in the left structure")
    p.add_argument("--answer", nargs="+", required=True, help="worlds in the right structure")
    p.add_argument("--universal", action="store_true")
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--no-shortcut", action="store_true")
    p.add_argument("--dump", action="store_true", help="print the winning region")
    p.set_defaults(fn=cmd_game)

    p = sub.add_parser("unravel", help="bounded-depth unravelling")
    p.add_argument("--structure", required=True)
    p.add_argument("--world", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(fn=cmd_unravel)

    p = sub.add_parser("split", help="k-split of an ICPDL program")
    p.add_argument("expr")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(fn=cmd_split)

    p = sub.add_parser("treetranslate", help="conjunctive program to ICPDL over trees")
    p.add_argument("expr")
    p.set_defaults(fn=cmd_treetranslate)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except CpdlpError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
