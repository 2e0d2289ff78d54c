"""The model-checking pipeline end to end, with a per-phase report."""
from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from typing import Any

from .builder import SIMPLE, Builder
from .game import SymbolicGame, stats
from .generators import gen_buffer, gen_connect_four, gen_tictactoe
from .parser import parse_spec
from .pbes import Pbes, translate
from .ppg import Ppg, assign_priorities, normalize_ppg
from .solver import solve

TIMING_KEYS = ("seconds",)


@dataclass
class Config:
    structured: bool = True
    partition: str = SIMPLE
    max_states: int | None = None
    formula: str | None = None


@dataclass
class Run:
    verdict: bool | None = None
    pbes: Pbes | None = None
    ppg: Ppg | None = None
    game: SymbolicGame | None = None
    builder: Builder | None = None
    phases: list[dict[str, Any]] = field(default_factory=list)

    def phase(self, name: str, t0: float, **info) -> None:
        self.phases.append({"phase": name, **info, "seconds": round(time.perf_counter() - t0, 4)})


def builtin_spec(name: str) -> str | None:
    """Spec text for ``buffer``, ``tictactoe`` or ``four.CxR``; None otherwise."""
    if name == "buffer":
        return gen_buffer(2, 2)
    if name == "tictactoe":
        return gen_tictactoe()
    m = re.fullmatch(r"four\.(\d+)x(\d+)", name)
    if m:
        return gen_connect_four(int(m.group(1)), int(m.group(2)))
    return None


def build(text: str, cfg: Config, run: Run | None = None) -> Run:
    """Run every phase up to and including instantiation."""
    run = run or Run()
    t = time.perf_counter()
    lps, phi = parse_spec(text, cfg.formula)
    run.phase("parse", t, summands=len(lps.summands), parameters=len(lps.params))
    t = time.perf_counter()
    run.pbes = translate(lps, phi, structured=cfg.structured)
    run.phase("translate", t, equations=len(run.pbes.equations),
              mode="structured" if cfg.structured else "unstructured")
    t = time.perf_counter()
    run.ppg = assign_priorities(normalize_ppg(run.pbes))
    run.phase("normalise", t, equations=len(run.ppg.equations),
              priorities=len({e.priority for e in run.ppg.equations}))
    t = time.perf_counter()
    run.builder = Builder(run.ppg, cfg.partition)
    run.game = run.builder.explore(cfg.max_states)
    s = stats(run.game)
    run.phase("instantiate", t, partition=cfg.partition, vertices=s["vertices"],
              vertex_nodes=s["vertex_nodes"], relation_nodes=s["relation_nodes"],
              groups=s["groups"], slots=s["width"],
              successor_calls=run.builder.successor_calls)
    return run


def check(text: str, cfg: Config) -> Run:
    run = build(text, cfg)
    t = time.perf_counter()
    sol = solve(run.game)
    st = run.game.store
    run.verdict = sol.init_winner == 0
    run.phase("solve", t, eloise_wins=st.count(sol.won[0]), abelard_wins=st.count(sol.won[1]),
              attractor_steps=sol.attractor_steps, subgames=sol.recursive_calls)
    return run
