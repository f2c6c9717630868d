"""Deterministic (n, eps) parameter sweeps and their CSV/JSON writers.

Each trial samples one graph from its own stream, so results do not depend
on how trials are spread over worker processes. Output rows are ordered by
(n, eps, trial) and floats are written in shortest round-trip form; with
timing switched off the files are a pure function of (config, version).
"""
from __future__ import annotations

import csv
import io
import json
import math
import statistics
import sys
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from . import __version__
from .errors import ConfigError, DomainError, RegimeError
from .estimators import DEFAULT_DOMINATION_C, DEFAULT_MIDDLE_C, TrialRecord, run_trial
from .model import derive_params, second_component_bound, snap_value

LEMMA_C_KEYS = {"middle": DEFAULT_MIDDLE_C, "domination": DEFAULT_DOMINATION_C, "envelope": 3.0}
FORMATS = ("csv", "json")


@dataclass
class SweepConfig:
    grid: list = field(default_factory=list)  # [(n, eps), ...]
    trials: int = 10
    seed: int = 0
    alpha: float = 20.0  # window lower edge alpha eps^-2
    window_upper: float = 0.2  # window upper edge window_upper * eps n^2
    out: str | None = None
    format: str = "csv"
    workers: int = 1
    lemma_c: dict = field(default_factory=lambda: dict(LEMMA_C_KEYS))
    summary_only: bool = False
    timing: bool = False

    def __post_init__(self):
        self.grid = sorted({(int(n), float(e)) for n, e in self.grid})
        if isinstance(self.alpha, (list, tuple)):
            if len(self.alpha) != 1:
                raise ConfigError("sweep takes a single alpha (one middle window per cell)")
            self.alpha = self.alpha[0]
        self.alpha = float(self.alpha)
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.window_upper <= 0:
            raise ConfigError("window_upper must be positive")
        unknown = set(self.lemma_c) - set(LEMMA_C_KEYS)
        if unknown:
            raise ConfigError(f"unknown lemma constant(s) {sorted(unknown)}; known: {sorted(LEMMA_C_KEYS)}")
        self.lemma_c = {**LEMMA_C_KEYS, **{k: float(v) for k, v in self.lemma_c.items()}}
        for n, e in self.grid:
            derive_params(n, e)  # DomainError on a bad cell

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "SweepConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in fields(cls)}
        bad = set(data) - known
        if bad:
            raise ConfigError(f"unknown config keys {sorted(bad)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def echo(self) -> dict:
        """Config as written to output metadata; scheduling knobs excluded."""
        d = asdict(self)
        for k in ("workers", "out"):
            d.pop(k)
        d["grid"] = [list(c) for c in self.grid]
        return d

    def window(self, n: int, eps: float) -> tuple[float, float]:
        return snap_value(self.alpha / (eps * eps)), snap_value(self.window_upper * eps * n * n)


def cell_stream_id(n: int, eps: float, trial: int) -> int:
    """Stream id of one trial: a CRC of the cell key, then the trial index,
    so a cell's streams do not move when the grid changes."""
    key = zlib.crc32(f"{n}:{eps!r}".encode())
    return (key << 32) | trial


@dataclass(frozen=True)
class SummaryRow:
    n: int
    epsilon: float
    trials: int
    mean_c1: float
    sd_c1: float
    mean_c2: float
    sd_c2: float
    mean_c2_over_c1: float
    giant_rel_error_mean: float
    theorem_pass_rate: float | None
    max_margin: float | None
    middle_rate: float
    middle_bound: float
    tail_estimate: float
    bound_value: float | None
    wall_time: float | None


def _sd(xs) -> float:
    return statistics.stdev(xs) if len(xs) > 1 else 0.0


def summarize(records: list[TrialRecord], cfg: SweepConfig) -> SummaryRow:
    r0 = records[0]
    n, eps = r0.n, r0.epsilon
    params = derive_params(n, eps)
    lo, _ = cfg.window(n, eps)
    c1 = [r.c1 for r in records]
    c2 = [r.c2 for r in records]
    try:
        bound = second_component_bound(params)
    except RegimeError:
        bound = None
    k = len(records)
    return SummaryRow(
        n=n,
        epsilon=eps,
        trials=k,
        mean_c1=statistics.fmean(c1),
        sd_c1=_sd(c1),
        mean_c2=statistics.fmean(c2),
        sd_c2=_sd(c2),
        mean_c2_over_c1=statistics.fmean(r.c2 / r.c1 for r in records),
        giant_rel_error_mean=statistics.fmean(r.giant_rel_error for r in records),
        theorem_pass_rate=None if bound is None else sum(bool(r.theorem_ok) for r in records) / k,
        max_margin=None if bound is None else max(r.margin for r in records),
        middle_rate=sum(r.middle_count > 0 for r in records) / k,
        middle_bound=cfg.lemma_c["middle"] * (max(eps, 0.0) * math.exp(-cfg.alpha / 256.0) + float(n) ** -6),
        tail_estimate=sum(r.probe_size >= lo for r in records) / k,
        bound_value=bound,
        wall_time=sum(r.runtime for r in records) if cfg.timing else None,
    )


def _task(args) -> TrialRecord:
    n, eps, seed, trial, window = args
    return run_trial(derive_params(n, eps), seed, cell_stream_id(n, eps, trial), window, trial=trial)


def run_sweep(cfg: SweepConfig) -> tuple[list[SummaryRow], list[TrialRecord]]:
    tasks = [
        (n, eps, cfg.seed, t, cfg.window(n, eps))
        for n, eps in cfg.grid
        for t in range(cfg.trials)
    ]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_task, tasks))
    else:
        records = [_task(t) for t in tasks]
    if not cfg.timing:
        records = [replace(r, runtime=None) for r in records]
    summary = []
    for i in range(len(cfg.grid)):
        summary.append(summarize(records[i * cfg.trials:(i + 1) * cfg.trials], cfg))
    return summary, records


# -- writers -----------------------------------------------------------------


def fmt_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def metadata(command: str, config: dict, seed) -> dict:
    return {"tool": "hamperc", "version": __version__, "command": command, "seed": seed, "config": config}


def _meta_lines(meta: dict) -> str:
    out = [f"# {meta['tool']} {meta['version']}", f"# command: {meta['command']}", f"# seed: {json.dumps(meta['seed'])}"]
    out.append("# config: " + json.dumps(meta["config"], sort_keys=True, separators=(",", ":")))
    return "\n".join(out) + "\n"


def render_csv(meta: dict, tables: list[tuple[str, list[str], list[dict]]]) -> str:
    """Metadata comment block, then each table as a ``# table:`` line, a
    header and its rows."""
    buf = io.StringIO()
    buf.write(_meta_lines(meta))
    for name, columns, rows in tables:
        if len(tables) > 1:
            buf.write(f"# table: {name}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt_value(row[c]) for c in columns])
    return buf.getvalue()


def _json_clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def render_json(meta: dict, tables: list[tuple[str, list[str], list[dict]]]) -> str:
    doc = {"meta": meta}
    for name, columns, rows in tables:
        doc[name] = [{c: _json_clean(row[c]) for c in columns} for row in rows]
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def render(fmt: str, meta: dict, tables) -> str:
    if fmt == "csv":
        return render_csv(meta, tables)
    if fmt == "json":
        return render_json(meta, tables)
    raise ConfigError(f"unknown format {fmt!r}")


def write_text(path: str | Path | None, text: str, stdout=None) -> None:
    if path is None:
        (stdout or sys.stdout).write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


SUMMARY_COLUMNS = [f.name for f in fields(SummaryRow)]
TRIAL_COLUMNS = [f.name for f in fields(TrialRecord)]


def trials_path(out: str | Path, fmt: str) -> Path:
    p = Path(out)
    return p.with_name(p.stem + ".trials." + fmt)


def write_sweep(cfg: SweepConfig, summary: list[SummaryRow], records: list[TrialRecord], stdout=None) -> None:
    """Summary to ``cfg.out`` (stdout if unset). Per-trial records go to a
    sibling ``<stem>.trials.<fmt>`` file for CSV, or into the same document
    for JSON, unless ``summary_only``."""
    meta = metadata("sweep", cfg.echo(), cfg.seed)
    s_table = ("summary", SUMMARY_COLUMNS, [asdict(r) for r in summary])
    t_table = ("trials", TRIAL_COLUMNS, [r.as_row() for r in records])
    if cfg.format == "json":
        tables = [s_table] if cfg.summary_only else [s_table, t_table]
        write_text(cfg.out, render_json(meta, tables), stdout)
        return
    write_text(cfg.out, render_csv(meta, [s_table]), stdout)
    if not cfg.summary_only and cfg.out is not None:
        write_text(trials_path(cfg.out, "csv"), render_csv(meta, [t_table]))


def parse_grid(ns, epsilons) -> list[tuple[int, float]]:
    if not ns or not epsilons:
        if ns or epsilons:
            raise ConfigError("give both n and epsilon values for the grid")
        return []
    try:
        return [(int(n), float(e)) for n in ns for e in epsilons]
    except ValueError as exc:
        raise DomainError(str(exc)) from None
