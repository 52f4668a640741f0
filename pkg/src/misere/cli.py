"""Command-line front end.

Exit status: 0 on success or PASS, 1 on FAIL, 2 on usage errors.  Progress
goes to stderr so stdout stays stable across runs.
"""
from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import data
from .canonical import CensusLimitError, canonical_form, census_count, game_name, iter_born_by, parse_game
from .games import (
    CoinPosition,
    HeapPosition,
    ParseError,
    key_options,
    parse_board,
    parse_octal,
    pascals_beans,
    tree_of,
)
from .genus import genus_sequence, pair_table
from .monoid import (
    enumerate_monoid,
    isomorphic,
    normal_form,
    parse_presentation,
    presentation_of,
    tame_quotient,
    verify_relation,
)
from .outcomes import MISERE, NORMAL, Outcome, grundy, misere_outcome, nim_sequence, normal_outcome, winning_moves
from .quotient import (
    PhiTable,
    QuotientError,
    Universe,
    build_quotient,
    expected_quotient,
    extend_phi,
    outcome_via_quotient,
    parse_phi,
    partial_quotient_trace,
    verify_solution,
)

log = logging.getLogger("misere")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# shared helpers

def _read(path: str, suffix: str) -> str:
    """Read ``path``, falling back to a bundled file of the same stem."""
    p = Path(path)
    if p.is_file():
        return p.read_text()
    stem = p.name[: -len(suffix)] if p.name.endswith(suffix) else p.name
    try:
        return data.read(stem + suffix)
    except (FileNotFoundError, OSError):
        raise UsageError(f"no such file: {path}") from None


def _load_solution(spec: str):
    """Presentation and phi table from a directory, or a bundled solution name."""
    d = Path(spec)
    if d.is_dir():
        pres = sorted(d.glob("*.pres"))
        phis = sorted(d.glob("*.phi"))
        if len(pres) != 1 or len(phis) != 1:
            raise UsageError(f"{spec}: expected exactly one .pres and one .phi file")
        pres_text, phi_text = pres[0].read_text(), phis[0].read_text()
    else:
        pres_text, phi_text = _read(spec + ".pres", ".pres"), _read(spec + ".phi", ".phi")
    m = enumerate_monoid(parse_presentation(pres_text))
    return expected_quotient(m, parse_phi(phi_text, m))


def _set(names) -> str:
    return "{" + ",".join(names) + "}"


def _structure(m) -> str:
    n = 1
    while 2 ** n + 2 <= m.order:
        if 2 ** n + 2 == m.order and isomorphic(m, tame_quotient(n)) is not None:
            return "TAME"
        n += 1
    if m.order == 2 and isomorphic(m, tame_quotient(1)) is not None:
        return "TAME"
    pres = presentation_of(m)
    return str(pres) if pres is not None else "(no short presentation; see table)"


def _quotient_block(q, phi_units) -> list[str]:
    m = q.monoid
    phi = " ".join(["1"] + [m.name(q.phi(u)) for u in phi_units])
    return [
        f"Size {m.order}: {_structure(m)}",
        f"P = {_set(m.sorted_names(q.p_subset))}",
        f"Phi = {phi}",
    ]


def _play(s: str) -> str:
    if s not in (MISERE, NORMAL):
        raise UsageError(f"--play must be misere or normal, got {s!r}")
    return s


def _trace_lines(code, trace, upto) -> list[str]:
    lines = []
    for i, (n, q) in enumerate(trace):
        last = trace[i + 1][0] - 1 if i + 1 < len(trace) else upto
        lines.append(f"-- Presentation for {code} changed at heap {n} --")
        lines.extend(_quotient_block(extend_phi(q, last), range(1, last + 1)))
    return lines


# ---------------------------------------------------------------------------
# verbs

def cmd_analyze(args, out) -> int:
    code = parse_octal(args.code)
    play = _play(args.play)
    if args.max_heap < 1:
        raise UsageError("--max-heap must be >= 1")
    seq = nim_sequence(code, max(60, 2 * args.max_heap))
    vmax = max(seq.values)
    out.append(f"=== Normal Play Analysis of {code} ===")
    out.append(f"Max   : G({seq.values.index(vmax) + 1}) = {vmax}")
    if seq.period is not None:
        out.append(f"Period: {seq.period[1]} ({seq.period[0]})")
    else:
        out.append("Period: not found")
    title = "Misere" if play == MISERE else "Normal"
    out.append(f"=== {title} Play Quotient Analysis of {code} ===")
    trace = []
    for n, q in partial_quotient_trace(code, args.max_heap, mult_cap=args.mult_cap, play=play,
                                       max_weight=args.max_weight, max_elements=args.max_classes):
        log.info("heap %d: order %d", n, q.order)
        trace.append((n, q))
    if not trace[-1][1].complete:
        n, q = trace.pop()
        for line in _trace_lines(code, trace, n - 1):
            out.append(line)
        out.append(f"-- Quotient budget exhausted at heap {n}: {q.checks[-1]} --")
        return 1
    out.extend(_trace_lines(code, trace, args.max_heap))
    final = build_quotient(Universe(code, args.max_heap, args.mult_cap, args.max_weight, play))
    shown = args.max_heap
    if args.extend > args.max_heap:
        final, shown = extend_phi(final, args.extend), args.extend
    last_tame = max((n for n, q in trace if _structure(q.monoid) == "TAME"), default=None)
    if last_tame is not None:
        following = [n for n, _ in trace if n > last_tame]
        last_tame = following[0] - 1 if following else args.max_heap
    out.append(f"=== {title} Play Quotient Analysis Complete for {code} ===")
    out.extend(_quotient_block(final, range(1, shown + 1)))
    out.append(f"Standard Form : {code}")
    if seq.period is not None:
        out.append(f"Normal Period : {seq.period[1]}")
        out.append(f"Normal Ppd    : {seq.period[0]}")
    out.append(f"Normal Max G  : G({seq.values.index(vmax) + 1}) = {vmax}")
    if final.phi_period is not None:
        out.append(f"{title} Period : {final.phi_period[1]}")
        out.append(f"{title} Ppd    : {final.phi_period[0]}")
    out.append(f"Quotient Order: {final.order}")
    out.append(f"Heaps Computed: {shown}")
    if last_tame is not None:
        out.append(f"Last Tame Heap: {last_tame}")
    if args.expect:
        expected = _load_solution(args.expect)
        report = verify_solution(expected, final.universe, brute=replace(final, phi=PhiTable(
            {u: final.phi(u) for u in final.universe.units})))
        out.append(report.render().rstrip("\n"))
        return 0 if report.passed else 1
    return 0


def cmd_genus(args, out) -> int:
    code = parse_octal(args.code)
    if args.max_heap < 1:
        raise UsageError("--max-heap must be >= 1")
    for n, s in enumerate(genus_sequence(code, args.max_heap), 1):
        out.append(f"{n:>3}  {s}")
    if args.pairs:
        table = pair_table(code, args.pairs)
        width = max(len(str(s)) for s in table.values())
        out.append("")
        out.append("    " + " ".join(f"{j:>{width}}" for j in range(1, args.pairs + 1)))
        for i in range(1, args.pairs + 1):
            cells = [" " * width if j < i else f"{str(table[i, j]):>{width}}" for j in range(1, args.pairs + 1)]
            out.append(f"{i:>3} " + " ".join(cells).rstrip())
    return 0


def cmd_outcome(args, out) -> int:
    code = parse_octal(args.code)
    try:
        heaps = [int(h) for h in args.heaps]
    except ValueError:
        raise UsageError("heap sizes must be integers") from None
    pos = HeapPosition(heaps)
    if args.phi:
        phi_text = _read(args.phi, ".phi")
        pres_path = args.pres or (args.phi[: -len(".phi")] if args.phi.endswith(".phi") else args.phi) + ".pres"
        m = enumerate_monoid(parse_presentation(_read(pres_path, ".pres")))
        q = expected_quotient(m, parse_phi(phi_text, m))
        try:
            o = outcome_via_quotient(q, pos)
        except KeyError as exc:
            raise UsageError(str(exc).strip("'\"")) from None
        out.append(f"{o.value} (class {m.name(q.element_of(pos))})")
        moves = []
        for k in sorted(key_options(code, pos.key), key=lambda k: (sum(k), k)):
            opt = HeapPosition.from_key(k)
            if all(u in q.phi for u in k) and outcome_via_quotient(q, opt) is Outcome.P:
                moves.append(f"{pos} -> {opt}")
    else:
        play = _play(args.play)
        o = misere_outcome(pos, code) if play == MISERE else normal_outcome(pos, code)
        out.append(o.value)
        moves = [f"{pos} -> {w}" for w in sorted(winning_moves(pos, code, play))]
    if moves:
        out.append("winning moves:")
        out.extend("  " + mv for mv in moves)
    return 0


def cmd_canonical(args, out) -> int:
    if args.expr is not None:
        g = canonical_form(parse_game(args.expr)).tree
        out.append(game_name(g))
        out.append(f"birthday {g.birthday}, misere {misere_outcome(g).value}")
        return 0
    try:
        if args.list:
            games = sorted(iter_born_by(args.day, allow_long=args.long), key=lambda t: (t.birthday, game_name(t)))
            out.append(f"{len(games)} canonical forms")
            out.extend(game_name(g) for g in games)
        else:
            out.append(f"{census_count(args.day, allow_long=args.long)} canonical forms")
    except CensusLimitError as exc:
        raise UsageError(str(exc)) from None
    return 0


def cmd_monoid(args, out) -> int:
    pres = parse_presentation(_read(args.file, ".pres"))
    m = enumerate_monoid(pres)
    if args.action == "enum":
        out.append(f"Size {m.order}: {pres}")
        if m.p_subset is not None:
            out.append(f"P = {_set(m.sorted_names(m.p_subset))}")
        out.append("Elements = " + " ".join(m.sorted_names(range(m.order))))
        return 0
    if args.action == "eval":
        for w in args.items:
            out.append(f"{w} = {normal_form(m, w)}")
        return 0
    ok = True
    for item in args.items:
        if "=" in item:
            good = verify_relation(m, *item.split("=", 1))
            out.append(f"{'PASS' if good else 'FAIL'} {item}")
        else:
            other = enumerate_monoid(parse_presentation(_read(item, ".pres")))
            good = isomorphic(m, other) is not None
            out.append(f"{'PASS' if good else 'FAIL'} isomorphic to {item}")
        ok &= good
    out.append("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _dag_table(board, play, expect, out) -> int:
    nodes = board.interior
    if play == NORMAL:
        out.append("node  height  grundy")
        for v in nodes:
            out.append(f"{v}  {board.height(v)}  {grundy(CoinPosition(board, {v: 1}))}")
        return 0
    q = build_quotient(Universe(board))
    out.append(f"Size {q.order}: {_structure(q.monoid)}")
    out.append(f"P = {_set(q.monoid.sorted_names(q.p_subset))}")
    out.append("node  height  canonical  element")
    for v in nodes:
        form = game_name(canonical_form(tree_of(CoinPosition(board, {v: 1}))).tree)
        out.append(f"{v}  {board.height(v)}  {form}  {q.monoid.name(q.phi(v))}")
    if expect:
        report = verify_solution(_load_solution(expect), q.universe, brute=q)
        out.append(report.render().rstrip("\n"))
        return 0 if report.passed else 1
    return 0


def cmd_pascal(args, out) -> int:
    play = _play(args.play)
    if args.rows < 2:
        raise UsageError("--rows must be >= 2")
    board = pascals_beans(args.rows)
    if play == NORMAL:
        value = lambda r, c: str(grundy(CoinPosition(board, {f"r{r}c{c}": 1})))
    else:
        q = build_quotient(Universe(board))
        out.append(f"Size {q.order}: {_structure(q.monoid)}")
        out.append(f"P = {_set(q.monoid.sorted_names(q.p_subset))}")
        value = lambda r, c: q.monoid.name(q.phi(f"r{r}c{c}")) if 0 < c < r else "1"
    rows = [[value(r, c) for c in range(r + 1)] for r in range(args.rows)]
    width = max(len(v) for row in rows for v in row)
    for r, row in enumerate(rows):
        pad = " " * ((args.rows - 1 - r) * (width + 1) // 2)
        out.append((pad + " ".join(v.center(width) for v in row)).rstrip())
    return 0


def cmd_dag(args, out) -> int:
    board, _ = parse_board(_read(args.board, ".dag"))
    return _dag_table(board, _play(args.play), args.expect, out)


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="misere", description="Impartial games under normal and misère play.")
    parser.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("analyze", help="partial-quotient trace of an octal game")
    p.add_argument("code")
    p.add_argument("--play", default=MISERE)
    p.add_argument("--max-heap", type=int, required=True)
    p.add_argument("--mult-cap", type=int, default=4)
    p.add_argument("--max-weight", type=int, default=None)
    p.add_argument("--max-classes", type=int, default=400, help="class budget per partial quotient")
    p.add_argument("--extend", type=int, default=0, help="classify single heaps up to this size")
    p.add_argument("--expect", help="solution directory (one .pres, one .phi) or bundled name")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("genus", help="genus symbols of single heaps and heap pairs")
    p.add_argument("code")
    p.add_argument("--max-heap", type=int, required=True)
    p.add_argument("--pairs", type=int, default=0)
    p.set_defaults(func=cmd_genus)

    p = sub.add_parser("outcome", help="outcome and winning moves of a heap position")
    p.add_argument("code")
    p.add_argument("heaps", nargs="*")
    p.add_argument("--play", default=MISERE)
    p.add_argument("--phi", help="pretending-function table; the .pres file beside it is used")
    p.add_argument("--pres", help="presentation file for --phi")
    p.set_defaults(func=cmd_outcome)

    p = sub.add_parser("canonical", help="census counts and canonical forms")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--day", type=int)
    g.add_argument("--expr")
    p.add_argument("--list", action="store_true")
    p.add_argument("--long", action="store_true", help="allow the day-5 census")
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("monoid", help="enumerate, evaluate and check presentations")
    p.add_argument("action", choices=["enum", "eval", "check"])
    p.add_argument("file")
    p.add_argument("items", nargs="*", help="words (eval), relations or presentation files (check)")
    p.set_defaults(func=cmd_monoid)

    p = sub.add_parser("pascal", help="Pascal's Beans value triangle")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--play", default=MISERE)
    p.set_defaults(func=cmd_pascal)

    p = sub.add_parser("dag", help="per-node values of a coin-sliding board")
    p.add_argument("board")
    p.add_argument("--play", default=MISERE)
    p.add_argument("--expect")
    p.set_defaults(func=cmd_dag)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args, extra = parser.parse_known_args(argv)
            if extra:
                # heap sizes may follow --phi FILE
                if args.verb != "outcome" or any(x.startswith("-") and not x.lstrip("-").isdigit() for x in extra):
                    parser.error("unrecognized arguments: " + " ".join(extra))
                args.heaps = list(args.heaps) + extra
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=stderr,
                        format="%(message)s")
    out: list[str] = []
    try:
        status = args.func(args, out)
    except (UsageError, ParseError, ValueError) as exc:
        print(f"misere {args.verb}: error: {exc}", file=stderr)
        return 2
    except QuotientError as exc:
        stdout.write("\n".join(out) + ("\n" if out else ""))
        print(f"misere {args.verb}: {exc}", file=stderr)
        return 1
    stdout.write("\n".join(out) + "\n")
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
