"""Experiment configs, the built-in presets and the run orchestration behind the CLI.

A config is JSON::

    {
      "graph": "fig4_multipath" | {"nodes": [...], "edges": [[u, v, L], ...],
                                   "source": ..., "target": ...},
      "engine": "aco_discrete" | "aco_continuous" | "memnet" | "compare",
      "aco": {"alpha", "beta", "rho", "Q", "gamma", "tau0"},
      "colony": {"n_ants", "n_realizations", "record_every"},
      "mean_field": {"t_end", "dt", "record_every"},
      "memnet": {"sigma_on", "sigma_off", "kappa", "Gamma", "I_t", "I0",
                 "mode", "t_end", "dt", "record_every", "theta"},
      "seed": 0,
      "out": "results"
    }

``aco`` is required by the ACO engines and ``memnet`` by the memristive
engine; ``compare`` needs both.  ``memnet.I_t`` may be a list, giving one
run per threshold.
"""

from __future__ import annotations

import json
import os
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Any, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, ValidationError, model_validator

from .errors import ConfigValidationError, GraphError, ParseError, UnknownPreset
from .estimators import AntColonyShortestPath, MemristiveShortestPath, check_graph
from .graph import Graph, greedy_path, shortest_path_oracle

ENGINES = ("aco_discrete", "aco_continuous", "memnet", "compare")


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


class AcoBlock(_Block):
    alpha: float = 1.0
    beta: float = 1.0
    rho: float = Field(ge=0, le=1)
    Q: float = Field(ge=0)
    gamma: float = Field(default=1.0, ge=0)
    tau0: PositiveFloat = 0.5


class ColonyBlock(_Block):
    n_ants: PositiveInt = 1000
    n_realizations: PositiveInt = 1000
    record_every: PositiveInt = 10


class MeanFieldBlock(_Block):
    t_end: float = Field(default=200.0, ge=0)
    dt: PositiveFloat = 1e-2
    record_every: PositiveInt = 100


class MemnetBlock(_Block):
    sigma_on: PositiveFloat
    sigma_off: PositiveFloat
    kappa: PositiveFloat
    Gamma: float = Field(ge=0)
    I0: float = Field(ge=0)
    I_t: Union[float, list[float]] = 0.0
    mode: Literal["lumped", "chain"] = "lumped"
    t_end: float = Field(default=200.0, ge=0)
    dt: PositiveFloat = 1e-3
    record_every: PositiveInt = 1000
    theta: float = Field(default=0.5, gt=0, lt=1)

    @model_validator(mode="after")
    def _check(self):
        if not self.sigma_on > self.sigma_off:
            raise ValueError("sigma_on must exceed sigma_off")
        if any(v < 0 for v in self.thresholds):
            raise ValueError("I_t must be non-negative")
        return self

    @property
    def thresholds(self) -> list[float]:
        return list(self.I_t) if isinstance(self.I_t, list) else [self.I_t]


class ExperimentConfig(_Block):
    graph: Union[str, dict[str, Any]]
    engine: Literal["aco_discrete", "aco_continuous", "memnet", "compare"] = "compare"
    aco: AcoBlock | None = None
    colony: ColonyBlock = ColonyBlock()
    mean_field: MeanFieldBlock = MeanFieldBlock()
    memnet: MemnetBlock | None = None
    seed: int = 0
    out: str = "results"

    def check_blocks(self) -> None:
        if self.engine != "memnet" and self.aco is None:
            raise ConfigValidationError("aco", f"required by engine {self.engine!r}")
        if self.engine in ("memnet", "compare") and self.memnet is None:
            raise ConfigValidationError("memnet", f"required by engine {self.engine!r}")

    def resolve_graph(self) -> Graph:
        try:
            return check_graph(self.graph)
        except GraphError as exc:
            raise ConfigValidationError("graph", str(exc)) from None

    def aco_engine(self, graph: Graph) -> str:
        """ACO flavour for ``compare``: mean-field on parallel paths, discrete otherwise."""
        if self.engine in ("aco_discrete", "aco_continuous"):
            return self.engine
        return "aco_continuous" if graph.is_parallel_paths() else "aco_discrete"


_FIG_DEVICE = {"sigma_on": 0.01, "sigma_off": 1e-5, "kappa": 1.0, "Gamma": 0.1}

PRESETS: dict[str, dict[str, Any]] = {
    # two parallel edges L=(1,2); sigma in S, Gamma in 1/s, kappa in 1/(s*A), I0 in A
    "fig2_two_path": {
        "graph": "fig2_two_path",
        "engine": "compare",
        "aco": {"alpha": 1.0, "beta": 1.0, "rho": 0.1, "Q": 1.0, "gamma": 1.0, "tau0": 0.5},
        "memnet": {**_FIG_DEVICE, "I0": 0.09},
    },
    # eight unit edges, left arm shortest; 10^3 realizations of 10^3 ants
    "fig4_multipath": {
        "graph": "fig4_multipath",
        "engine": "compare",
        "aco": {"alpha": 1.0, "beta": 1.0, "rho": 0.05, "Q": 0.1, "gamma": 1.0, "tau0": 0.5},
        "colony": {"n_ants": 1000, "n_realizations": 1000},
        "memnet": {**_FIG_DEVICE, "I0": 0.1},
    },
    # multipath devices with two threshold currents, one run each
    "fig6_threshold": {
        "graph": "fig6_threshold",
        "engine": "memnet",
        "aco": {"alpha": 1.0, "beta": 1.0, "rho": 0.05, "Q": 0.1, "gamma": 1.0, "tau0": 0.5},
        "colony": {"n_ants": 1000, "n_realizations": 1000},
        "memnet": {**_FIG_DEVICE, "I0": 0.1, "I_t": [0.005, 0.03]},
    },
}


def _field_path(err: dict) -> str:
    return ".".join(str(p) for p in err["loc"]) or "<root>"


def validate_config(data: Any, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """Validate a config mapping, applying CLI-style overrides first.

    Overrides understood: ``engine``, ``out``, ``seed``, ``dt`` and
    ``t_end``; the last two apply to every time-stepped engine block.
    """
    if not isinstance(data, dict):
        raise ConfigValidationError("<root>", "config must be a JSON object")
    data = json.loads(json.dumps(data))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in ("dt", "t_end"):
            data.setdefault("mean_field", {})[key] = value
            if isinstance(data.get("memnet"), dict):
                data["memnet"][key] = value
        else:
            data[key] = value
    try:
        cfg = ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        raise ConfigValidationError(_field_path(err), err["msg"]) from None
    cfg.check_blocks()
    cfg.resolve_graph()
    return cfg


def load_config(source: str | os.PathLike, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """Load a preset by name or a JSON config file."""
    name = os.fspath(source)
    if name in PRESETS:
        data = PRESETS[name]
    elif name.endswith(".json") or os.path.exists(name):
        try:
            with open(name) as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise ParseError(f"no such config file: {name}") from None
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ParseError(f"{name}: {exc}") from None
    else:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return validate_config(data, overrides)


def engine_seed(seed: int, engine: str) -> int:
    """Independent 64-bit seed for one engine, derived from the config seed."""
    seq = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(engine.encode())])
    return int(seq.generate_state(1, np.uint64)[0])


@dataclass
class EngineResult:
    path: list[int]
    final_state: list[float]
    agrees_with_oracle: bool
    trajectory: Any = field(repr=False, default=None)
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "path": self.path,
            "final_state": self.final_state,
            "agrees_with_oracle": self.agrees_with_oracle,
            **self.extra,
        }


@dataclass
class ResultSummary:
    engines: dict[str, EngineResult]
    oracle_path: list[int]
    duration_s: float

    @property
    def all_agree(self) -> bool:
        return all(r.agrees_with_oracle for r in self.engines.values())

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {name: r.to_dict() for name, r in self.engines.items()}
        out["oracle_path"] = self.oracle_path
        out["duration_s"] = self.duration_s
        return out


def _run_aco(cfg: ExperimentConfig, graph: Graph, engine: str, oracle: list[int]) -> EngineResult:
    est = AntColonyShortestPath(
        **cfg.aco.model_dump(),
        mode="discrete" if engine == "aco_discrete" else "mean_field",
        seed=engine_seed(cfg.seed, engine),
        n_ants=cfg.colony.n_ants,
        n_realizations=cfg.colony.n_realizations,
        record_every=cfg.colony.record_every if engine == "aco_discrete" else cfg.mean_field.record_every,
        t_end=cfg.mean_field.t_end,
        dt=cfg.mean_field.dt,
    )
    if engine == "aco_continuous" and not graph.is_parallel_paths():
        raise ConfigValidationError("engine", "aco_continuous needs a graph of parallel source-target edges")
    est.fit(graph)
    path = list(est.path_.edges)
    extra = {}
    if engine == "aco_discrete":
        hits = sum(list(greedy_path(graph, tau).edges) == oracle for tau in est.trajectory_.realizations_final)
        extra["realization_agreement"] = hits / len(est.trajectory_.realizations_final)
    return EngineResult(path, est.states_.tolist(), path == oracle, est.trajectory_, extra)


def _run_memnet(cfg: ExperimentConfig, graph: Graph, oracle: list[int]) -> dict[str, EngineResult]:
    block = cfg.memnet.model_dump(exclude={"I_t"})
    thresholds = cfg.memnet.thresholds
    results = {}
    for i_t in thresholds:
        est = MemristiveShortestPath(**block, I_t=i_t).fit(graph)
        key = "memnet" if len(thresholds) == 1 else f"memnet_It={i_t:g}"
        path = list(est.path_.edges)
        results[key] = EngineResult(
            path, est.states_.tolist(), path == oracle, est.trajectory_, {"I_t": i_t, "clamp_events": est.trajectory_.clamp_events}
        )
    return results


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> ResultSummary:
    """Run the selected engine(s) and, if ``write``, save CSVs and ``summary.json``.

    Files are written only after every engine has finished, so a failed run
    leaves no partial output.
    """
    start = time.perf_counter()
    graph = cfg.resolve_graph()
    oracle = list(shortest_path_oracle(graph).edges)
    engines: dict[str, EngineResult] = {}
    if cfg.engine != "memnet":
        name = cfg.aco_engine(graph)
        engines[name] = _run_aco(cfg, graph, name, oracle)
    if cfg.engine in ("memnet", "compare"):
        engines.update(_run_memnet(cfg, graph, oracle))
    summary = ResultSummary(engines, oracle, time.perf_counter() - start)
    if write:
        out = FsPath(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, res in engines.items():
            res.trajectory.to_csv(out / f"{name}.csv")
        with open(out / "config.json", "w") as fh:
            json.dump(cfg.model_dump(), fh, indent=2)
            fh.write("\n")
        with open(out / "summary.json", "w") as fh:
            json.dump(summary.to_dict(), fh, indent=2)
            fh.write("\n")
    return summary
