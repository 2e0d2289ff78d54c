"""Command-line front end.

Exit codes: 0 success (whatever the verdict), 2 usage error, 3 resource
cap hit, 4 bad input.  Commands that decide a formula end their output
with ``result: true`` or ``result: false``.
"""
from __future__ import annotations

import argparse
import json
import sys

from .builder import SIMPLE, SPLIT, BuildLimit, dependency_matrix, make_layout, partition
from .data import EvalError, SortError
from .explicit import PgFormatError, parse_pgsolver, solve_explicit
from .game import ExplicitLimit, GameError, MAGIC, export_pgsolver, format_stats, load_game, save_game, stats
from .generators import GeneratorError, gen_buffer, gen_connect_four, gen_tictactoe
from .model import ModelError
from .parser import ParseError, parse_spec
from .pbes import PbesError, translate
from .ppg import assign_priorities, normalize_ppg
from .pipeline import Config, Run, build, builtin_spec, check
from .solver import solve

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_INPUT = 0, 2, 3, 4

INPUT_ERRORS = (ParseError, ModelError, PbesError, SortError, EvalError, GeneratorError,
                PgFormatError, OSError, UnicodeDecodeError)


# phase tag printed with each kind of input error
PHASES = ((ParseError, "parse"), (SortError, "parse"), (GeneratorError, "gen"),
          (ModelError, "model"), (PbesError, "translate"), (EvalError, "instantiate"),
          (PgFormatError, "solve-pg"), (GameError, "load"))


class InputError(Exception):
    pass


def _phase(e: Exception) -> str:
    for cls, name in PHASES:
        if isinstance(e, cls):
            return name
    return "input"


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as f:
        return f.read()


def _spec_text(arg: str) -> str:
    try:
        return _read(arg)
    except FileNotFoundError:
        text = builtin_spec(arg)
        if text is None:
            raise
        return text


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)


def _config(a) -> Config:
    if a.structured and a.partition == SPLIT:
        print("warning: split partitioning of a structured translation rarely helps",
              file=sys.stderr)
    return Config(structured=a.structured, partition=a.partition,
                  max_states=a.max_states, formula=a.formula)


def _report(run: Run, fmt: str) -> None:
    if fmt == "json":
        for ph in run.phases:
            print(json.dumps(ph, sort_keys=True))
        return
    for ph in run.phases:
        fields = " ".join(f"{k}={v}" for k, v in ph.items() if k != "phase")
        print(f"{ph['phase']}: {fields}")


def cmd_gen(a) -> int:
    if a.model == "buffer":
        text = gen_buffer(a.capacity, a.domain)
    elif a.model == "tictactoe":
        text = gen_tictactoe()
    else:
        text = gen_connect_four(a.cols, a.rows, a.connect)
    _write(a.output, text)
    return EXIT_OK


def cmd_check(a) -> int:
    run = check(_spec_text(a.spec), _config(a))
    _report(run, a.report)
    if a.save_game:
        _write(a.save_game, save_game(run.game))
    print(f"result: {'true' if run.verdict else 'false'}")
    return EXIT_OK


def cmd_stats(a) -> int:
    run = build(_spec_text(a.spec), _config(a))
    if a.report == "json":
        s = stats(run.game)
        s["priorities"] = {str(k): v for k, v in s["priorities"].items()}
        print(json.dumps(s, sort_keys=True))
    else:
        sys.stdout.write(format_stats(stats(run.game)))
    return EXIT_OK


def cmd_matrix(a) -> int:
    cfg = _config(a)
    lps, phi = parse_spec(_spec_text(a.spec), cfg.formula)
    ppg = assign_priorities(normalize_ppg(translate(lps, phi, structured=cfg.structured)))
    lay = make_layout(ppg)
    sys.stdout.write(dependency_matrix(partition(ppg, lay, cfg.partition), lay))
    return EXIT_OK


def cmd_export(a) -> int:
    run = build(_spec_text(a.spec), _config(a))
    _write(a.output, export_pgsolver(run.game, a.explicit_cap))
    return EXIT_OK


def cmd_solve_pg(a) -> int:
    text = _read(a.file)
    if text.lstrip().startswith("{") and MAGIC in text[:200]:
        g = load_game(text)
        sol = solve(g)
        eloise = sol.init_winner == 0
        st = g.store
        if a.report == "json":
            print(json.dumps({"phase": "solve", "eloise_wins": st.count(sol.won[0]),
                              "abelard_wins": st.count(sol.won[1]),
                              "seconds": round(sol.seconds, 4)}, sort_keys=True))
        else:
            print(f"solve: eloise_wins={st.count(sol.won[0])} abelard_wins={st.count(sol.won[1])}")
    else:
        g = parse_pgsolver(text)
        if g.n == 0:
            raise InputError("game has no vertices")
        w0, w1 = solve_explicit(g)
        eloise = g.init in w0
        if a.report == "json":
            print(json.dumps({"phase": "solve", "eloise_wins": len(w0), "abelard_wins": len(w1)},
                             sort_keys=True))
        else:
            print(f"solve: eloise_wins={len(w0)} abelard_wins={len(w1)}")
    print(f"result: {'true' if eloise else 'false'}")
    return EXIT_OK


def _positive(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="symparity",
                                 description="Symbolic parity-game model checking.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def pipeline_opts(p):
        p.add_argument("spec", help="spec file ('-' reads stdin) or a built-in name: buffer|tictactoe|four.CxR")
        p.add_argument("--formula", help="name of the form to check (default: first)")
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--structured", dest="structured", action="store_true", default=True)
        mode.add_argument("--unstructured", dest="structured", action="store_false")
        p.add_argument("--partition", choices=[SIMPLE, SPLIT], default=SIMPLE)
        p.add_argument("--max-states", type=_positive, default=None)
        p.add_argument("--report", choices=["text", "json"], default="text")

    g = sub.add_parser("gen", help="write a benchmark spec")
    g.add_argument("model", choices=["buffer", "tictactoe", "four"])
    g.add_argument("--capacity", type=_positive, default=2)
    g.add_argument("--domain", type=_positive, default=2)
    g.add_argument("--cols", type=_positive, default=4)
    g.add_argument("--rows", type=_positive, default=4)
    g.add_argument("--connect", type=_positive, default=4, help="winning line length")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="decide a formula")
    pipeline_opts(c)
    c.add_argument("--save-game", metavar="FILE", help="also write the symbolic game container")
    c.set_defaults(func=cmd_check)

    m = sub.add_parser("matrix", help="print the dependency matrix")
    pipeline_opts(m)
    m.set_defaults(func=cmd_matrix)

    e = sub.add_parser("export", help="write the game in PGSolver format")
    pipeline_opts(e)
    e.add_argument("-o", "--output")
    e.add_argument("--explicit-cap", type=_positive, default=10**6)
    e.set_defaults(func=cmd_export)

    s = sub.add_parser("solve-pg", help="solve a PGSolver file or a game container")
    s.add_argument("file")
    s.add_argument("--report", choices=["text", "json"], default="text")
    s.set_defaults(func=cmd_solve_pg)

    st = sub.add_parser("stats", help="instantiate and print game statistics")
    pipeline_opts(st)
    st.set_defaults(func=cmd_stats)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    a = ap.parse_args(argv)
    try:
        return a.func(a)
    except BuildLimit as e:
        print(f"error: state cap: {e}", file=sys.stderr)
        return EXIT_CAP
    except ExplicitLimit as e:
        print(f"error: explicit cap: {e}", file=sys.stderr)
        return EXIT_CAP
    except (GameError, InputError) + INPUT_ERRORS as e:
        print(f"error: {_phase(e)}: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
