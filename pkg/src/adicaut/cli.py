"""Command-line front end.

Commands: `build` a transducer union from a matrix file, `act` with a word
on a digit word, `wp` decide the word problem, `relations` check the
conjugation relators for every (matrix, axis), `verify` sample-check the
transducer action against the big-integer affine oracle.

Exit codes: 0 success (including a NONTRIVIAL word-problem answer),
2 invalid input, 3 alphabet cap exceeded, 4 node budget exhausted,
5 verification or relation failure.

The node budget defaults to 10**6 visited words, overridable with
ADICAUT_BUDGET or --budget (the flag wins).  All randomness is seeded
(--seed, default 0) and echoed, so runs are reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import automaton as am
from . import treeaction as ta
from .nadic import AffineMap, DigitWord, affine_apply_prefix


def _budget(args) -> int:
    if getattr(args, "budget", None) is not None:
        return args.budget
    env = os.environ.get("ADICAUT_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"ADICAUT_BUDGET={env!r} is not an integer") from None
    return ta.DEFAULT_NODE_BUDGET


def _emit(args, text: str, obj: dict):
    print(json.dumps(obj, sort_keys=True) if args.json else text)


def _load_matrices(path: str):
    with open(path) as f:
        try:
            obj = json.load(f)
        except json.JSONDecodeError as e:
            raise am.FormatError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(obj, list) or not obj:
        raise am.FormatError(f"{path}: expected a nonempty JSON list of matrices")
    return obj


def _load_automaton(path: str) -> am.Automaton:
    with open(path) as f:
        return am.from_json(f.read())


def _cmd_build(args) -> int:
    mats = _load_matrices(args.matrices)
    aut = am.build_union(mats, args.n, alphabet_cap=args.alphabet_cap)
    if args.dedup:
        aut = am.dedup(aut)
    bound = am.state_count_bound(mats)
    payload = am.to_json(aut)
    stats = f"states={len(aut.states)}, bound=2^d*Σ||Mi||^d={bound}"
    if args.output:
        with open(args.output, "w") as f:
            f.write(payload + "\n")
        _emit(args, stats, {"states": len(aut.states), "bound": bound, "output": args.output})
    else:
        print(payload)
        if args.json:
            print(json.dumps({"states": len(aut.states), "bound": bound}, sort_keys=True), file=sys.stderr)
        else:
            print(stats, file=sys.stderr)
    return 0


def _cmd_act(args) -> int:
    aut = _load_automaton(args.automaton)
    w = ta.parse_word(aut, args.word)
    u = DigitWord.parse(args.input, aut.n, aut.d)
    image = w.act(u)
    _emit(args, image.format(), {"output": image.format()})
    return 0


def _cmd_wp(args) -> int:
    aut = _load_automaton(args.automaton)
    w = ta.parse_word(aut, args.word)
    budget = _budget(args)
    try:
        answer, visited = ta._closure_is_identity(w, budget)
    except ta.BudgetExceededError as e:
        _emit(args, f"BUDGET-EXCEEDED visited={e.visited}",
              {"result": "BUDGET-EXCEEDED", "visited": e.visited})
        return 4
    result = "IDENTITY" if answer else "NONTRIVIAL"
    _emit(args, f"{result} visited={visited}", {"result": result, "visited": visited})
    return 0


def _cmd_relations(args) -> int:
    mats = _load_matrices(args.matrices)
    aut = am.build_union(mats, args.n, alphabet_cap=args.alphabet_cap)
    budget = _budget(args)
    all_ok = True
    for mi in range(len(aut.matrices)):
        for axis in range(1, aut.d + 1):
            try:
                rep = ta.verify_relation(aut, mi, axis, budget=budget)
            except ta.BudgetExceededError as e:
                _emit(args, f"M[{mi}] j={axis} BUDGET-EXCEEDED visited={e.visited}",
                      {"matrix": mi, "axis": axis, "result": "BUDGET-EXCEEDED", "visited": e.visited})
                return 4
            _emit(args, str(rep),
                  {"matrix": mi, "axis": axis, "result": "PASS" if rep.ok else "FAIL",
                   "visited": rep.visited})
            all_ok = all_ok and rep.ok
    return 0 if all_ok else 5


def _cmd_verify(args) -> int:
    aut = _load_automaton(args.automaton)
    rng = random.Random(args.seed)
    letters = [aut.letter_digits(i) for i in range(aut.alphabet_size)]
    mismatches = 0
    checked = 0
    for sid, st in enumerate(aut.states):
        f = AffineMap(aut.matrices[st.matrix_index], st.offset)
        w = ta.GroupWord.from_state(aut, sid)
        for _ in range(args.samples):
            k = rng.randint(1, args.depth)
            u = DigitWord(tuple(rng.choice(letters) for _ in range(k)), aut.n, aut.d)
            checked += 1
            if w.act(u) != affine_apply_prefix(f, u):
                mismatches += 1
    _emit(args, f"mismatches={mismatches} checked={checked} seed={args.seed}",
          {"mismatches": mismatches, "checked": checked, "seed": args.seed})
    return 5 if mismatches else 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="adicaut",
        description="Build and compute with transducers realizing affine maps on base-n digit words.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output, one JSON object per line")

    b = sub.add_parser("build", help="build the disjoint-union transducer for a matrix family")
    b.add_argument("--matrices", required=True, help="JSON file: list of square integer matrices (row-major)")
    b.add_argument("--n", required=True, type=int, help="base, >= 2, coprime to every determinant")
    b.add_argument("--dedup", action="store_true",
                   help="extension: merge behaviorally equivalent states after building")
    b.add_argument("--alphabet-cap", type=int, default=am.DEFAULT_ALPHABET_CAP,
                   help="refuse alphabets larger than this (default %(default)s)")
    b.add_argument("-o", "--output", help="write automaton JSON here instead of stdout")
    common(b)
    b.set_defaults(func=_cmd_build)

    a = sub.add_parser("act", help="apply a word to a digit word")
    a.add_argument("--automaton", required=True, help="automaton JSON file")
    a.add_argument("--word", required=True,
                   help="word grammar: m[i]:(v1,...,vd), t[j], t[j]@i, with optional ^k; separated by * or spaces")
    a.add_argument("--input", required=True,
                   help="digit word, least significant letter first, letters space-separated, digits comma-joined")
    common(a)
    a.set_defaults(func=_cmd_act)

    w = sub.add_parser("wp", help="decide whether a word acts trivially (word problem)")
    w.add_argument("--automaton", required=True)
    w.add_argument("--word", required=True)
    w.add_argument("--budget", type=int, help="node budget for the closure search (default 10^6 or ADICAUT_BUDGET)")
    common(w)
    w.set_defaults(func=_cmd_wp)

    r = sub.add_parser("relations", help="check the conjugation relator for every (matrix, axis)")
    r.add_argument("--matrices", required=True)
    r.add_argument("--n", required=True, type=int)
    r.add_argument("--alphabet-cap", type=int, default=am.DEFAULT_ALPHABET_CAP)
    r.add_argument("--budget", type=int)
    common(r)
    r.set_defaults(func=_cmd_relations)

    v = sub.add_parser("verify", help="sample-check the action against the big-integer affine oracle")
    v.add_argument("--automaton", required=True)
    v.add_argument("--depth", required=True, type=int, help="maximum prefix length")
    v.add_argument("--samples", required=True, type=int, help="random prefixes per state")
    v.add_argument("--seed", type=int, default=0)
    common(v)
    v.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except am.AlphabetCapError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ta.BudgetExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except (am.BuildError, am.FormatError, ta.WordError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
