"""Replication engine for the VMRIC accuracy and selection experiments.

Every replication draws from its own RNG substream keyed by
``(table, case, n, replication, candidate)``, so results do not depend on the
number of workers or the order in which replications finish.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, VmricError
from .example import (
    HORIZON,
    MODEL1,
    MODEL2,
    TABLE1,
    ExampleConfig,
    simulate_example,
    theoretical_indices,
)
from .selection import assemble_report, score_candidate

__all__ = [
    "ExperimentPlan",
    "AggregateResult",
    "run_table2",
    "run_table3",
    "run_table4",
    "table2_csv",
    "table3_csv",
    "table4_csv",
    "load_plan",
    "TABLE3_SIZES",
    "TABLE4_SIZES",
]

logger = logging.getLogger(__name__)

TABLE3_SIZES = (100, 250, 500, 1000, 2500, 5000, 10000, 15000, 30000)
TABLE4_SIZES = (100, 1000, 10000)
CRITERIA = ("vmric", "aic", "bic")
_TABLE_IDS = {"table2": 2, "table3": 3, "table4": 4}
DESIGNS = ("independent", "common")


@dataclass(frozen=True)
class ExperimentPlan:
    """What to run: one DGP configuration over a list of sample sizes.

    ``design`` only matters for table 4. ``"independent"`` scores each
    candidate on its own realization of the DGP; ``"common"`` scores all
    candidates on one shared realization.
    """

    config: ExampleConfig
    sample_sizes: tuple[int, ...]
    replications: int
    table: str
    criteria: tuple[str, ...] = CRITERIA
    case: int = 0
    target_model: int = 1
    design: str = "independent"

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sample_sizes)
        object.__setattr__(self, "sample_sizes", sizes)
        object.__setattr__(self, "criteria", tuple(self.criteria))
        if self.table not in _TABLE_IDS:
            raise ConfigError(f"table must be one of {sorted(_TABLE_IDS)}, got {self.table!r}")
        if int(self.replications) < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")
        if not sizes:
            raise ConfigError("sample_sizes must be nonempty")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ConfigError(f"sample_sizes must be strictly increasing, got {list(sizes)}")
        if sizes[0] < HORIZON + 2:
            raise ConfigError(f"sample sizes must be at least {HORIZON + 2}")
        bad = set(self.criteria) - set(CRITERIA)
        if bad or not self.criteria:
            raise ConfigError(f"criteria must be a nonempty subset of {CRITERIA}, got {list(self.criteria)}")
        if self.target_model not in (MODEL1.id, MODEL2.id):
            raise ConfigError(f"target_model must be 1 or 2, got {self.target_model}")
        if self.design not in DESIGNS:
            raise ConfigError(f"design must be one of {DESIGNS}, got {self.design!r}")


@dataclass
class AggregateResult:
    """Aggregates for one (case, n) cell. Percentages are in [0, 100]."""

    case: int
    n: int
    replications: int
    failures: int = 0
    bias: float = math.nan
    mse: float = math.nan
    bias_se: float = math.nan
    mse_se: float = math.nan
    selection_pct: dict[str, float] = field(default_factory=dict)
    selection_se: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"case": self.case, "n": self.n, "replications": self.replications, "failures": self.failures}
        if not math.isnan(self.bias):
            d.update(bias=self.bias, bias_se=self.bias_se, mse=self.mse, mse_se=self.mse_se)
        for k, v in self.selection_pct.items():
            d[f"{k}_pct"] = v
            d[f"{k}_pct_se"] = self.selection_se[k]
        return d


# ---------------------------------------------------------------- table 2


def run_table2(config: ExampleConfig, seed: int, case: int = 0) -> dict:
    """Theoretical and estimated VMRIC of both models from one long sample."""
    theory = theoretical_indices(config)
    data = simulate_example(config, seed, path=(_TABLE_IDS["table2"], case))
    spec = config.penalty
    est1 = score_candidate(data, MODEL1, HORIZON, spec).criterion
    est2 = score_candidate(data, MODEL2, HORIZON, spec).criterion
    return {
        "case": case,
        "n": config.n,
        "vmric_m1": theory.vmric_m1.total,
        "vmric_m1_hat": est1.total,
        "vmric_m2": theory.vmric_m2.total,
        "vmric_m2_hat": est2.total,
    }


def table2_csv(rows: list[dict]) -> str:
    cols = ["case", "n", "vmric_m1", "vmric_m1_hat", "vmric_m2", "vmric_m2_hat"]
    return _to_csv(cols, [[r[c] for c in cols] for r in rows])


# ------------------------------------------------------- replication work


def _table3_replication(args) -> tuple[int, float | None]:
    config, seed, path, n, target, theory_total = args
    model = MODEL1 if target == MODEL1.id else MODEL2
    try:
        data = simulate_example(config, seed, path=path, n=n)
        est = score_candidate(data, model, HORIZON, config.penalty).criterion.total
    except VmricError as exc:
        logger.warning("replication %s failed: %s", path, exc)
        return path[-1], None
    return path[-1], est - theory_total


def _table4_replication(args) -> tuple[int, dict | None]:
    config, seed, path, n, design = args
    spec = config.penalty
    try:
        if design == "common":
            data = simulate_example(config, seed, path=(*path, 0), n=n)
            scores = [score_candidate(data, m, HORIZON, spec) for m in (MODEL1, MODEL2)]
        else:
            scores = [
                score_candidate(simulate_example(config, seed, path=(*path, m.id), n=n), m, HORIZON, spec)
                for m in (MODEL1, MODEL2)
            ]
        report = assemble_report(scores)
    except VmricError as exc:
        logger.warning("replication %s failed: %s", path, exc)
        return path[-1], None
    return path[-1], {
        "vmric": report.chosen_vmric,
        "aic": report.chosen_aic,
        "bic": report.chosen_bic,
        "totals": [s.criterion.total for s in report.per_model],
    }


def _map(fn, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    chunk = max(1, len(jobs) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=chunk))


# ---------------------------------------------------------------- table 3


def run_table3(plan: ExperimentPlan, seed: int, workers: int = 1, records: list | None = None) -> list[AggregateResult]:
    """Bias and MSE of the estimated VMRIC of ``plan.target_model``."""
    if plan.table != "table3":
        raise ConfigError(f"plan targets {plan.table}, not table3")
    out = []
    for n in plan.sample_sizes:
        theory = theoretical_indices(plan.config, n)
        target = theory.vmric_m1 if plan.target_model == MODEL1.id else theory.vmric_m2
        jobs = [
            (plan.config, seed, (_TABLE_IDS["table3"], plan.case, n, r), n, plan.target_model, target.total)
            for r in range(plan.replications)
        ]
        results = sorted(_map(_table3_replication, jobs, workers), key=lambda t: t[0])
        if records is not None:
            records.extend({"case": plan.case, "n": n, "replication": r, "error": e} for r, e in results)
        errors = np.array([e for _, e in results if e is not None])
        agg = AggregateResult(case=plan.case, n=n, replications=len(errors), failures=len(results) - len(errors))
        if len(errors):
            sq = errors**2
            agg.bias = float(errors.mean())
            agg.mse = float(sq.mean())
            agg.bias_se = float(errors.std(ddof=1) / math.sqrt(len(errors))) if len(errors) > 1 else math.nan
            agg.mse_se = float(sq.std(ddof=1) / math.sqrt(len(errors))) if len(errors) > 1 else math.nan
        out.append(agg)
    return out


def table3_csv(results: dict[int, list[AggregateResult]]) -> str:
    """Rows by n; for each case ``bias, mse`` plus their ``_se`` columns."""
    cases = sorted(results)
    cols = ["n"]
    for c in cases:
        cols += [f"case{c}_bias", f"case{c}_mse", f"case{c}_bias_se", f"case{c}_mse_se"]
    by_n: dict[int, list] = {}
    for c in cases:
        for agg in results[c]:
            by_n.setdefault(agg.n, []).extend([agg.bias, agg.mse, agg.bias_se, agg.mse_se])
    return _to_csv(cols, [[n, *vals] for n, vals in sorted(by_n.items())])


# ---------------------------------------------------------------- table 4


def run_table4(plan: ExperimentPlan, seed: int, workers: int = 1, records: list | None = None) -> list[AggregateResult]:
    """Percentage of replications in which each criterion picks model 1."""
    if plan.table != "table4":
        raise ConfigError(f"plan targets {plan.table}, not table4")
    out = []
    for n in plan.sample_sizes:
        jobs = [(plan.config, seed, (_TABLE_IDS["table4"], plan.case, n, r), n, plan.design) for r in range(plan.replications)]
        results = sorted(_map(_table4_replication, jobs, workers), key=lambda t: t[0])
        if records is not None:
            records.extend({"case": plan.case, "n": n, "replication": r, **(d or {"failed": True})} for r, d in results)
        ok = [d for _, d in results if d is not None]
        agg = AggregateResult(case=plan.case, n=n, replications=len(ok), failures=len(results) - len(ok))
        for crit in plan.criteria:
            if ok:
                p = sum(d[crit] == MODEL1.id for d in ok) / len(ok)
                agg.selection_pct[crit] = 100.0 * p
                agg.selection_se[crit] = 100.0 * math.sqrt(p * (1.0 - p) / len(ok))
            else:
                agg.selection_pct[crit] = agg.selection_se[crit] = math.nan
        out.append(agg)
    return out


def table4_csv(results: dict[int, list[AggregateResult]], criteria=CRITERIA) -> str:
    cases = sorted(results)
    cols = ["n"]
    for c in cases:
        cols += [f"case{c}_{k}" for k in criteria] + [f"case{c}_{k}_se" for k in criteria]
    by_n: dict[int, list] = {}
    for c in cases:
        for agg in results[c]:
            row = by_n.setdefault(agg.n, [])
            row += [agg.selection_pct[k] for k in criteria] + [agg.selection_se[k] for k in criteria]
    return _to_csv(cols, [[n, *vals] for n, vals in sorted(by_n.items())])


# ------------------------------------------------------------------ plans


_PLAN_KEYS = {"table", "case", "config", "sample_sizes", "replications", "criteria", "target_model", "design", "seed"}


def load_plan(source) -> tuple[list[ExperimentPlan], int | None]:
    """Read a JSON experiment plan.

    ``case`` may be an int or a list of ints (Table 1 presets); ``config``
    may instead give an explicit DGP. Returns one plan per case and the
    optional seed.
    """
    if isinstance(source, dict):
        d = dict(source)
    else:
        try:
            d = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}: invalid JSON: {exc}") from None
    if not isinstance(d, dict):
        raise ConfigError("plan must be a JSON object")
    unknown = set(d) - _PLAN_KEYS
    if unknown:
        raise ConfigError(f"unknown plan keys: {sorted(unknown)}")
    table = d.get("table")
    if table not in ("table3", "table4"):
        raise ConfigError(f"plan table must be 'table3' or 'table4', got {table!r}")
    default_sizes = TABLE3_SIZES if table == "table3" else TABLE4_SIZES
    configs = []
    if "config" in d:
        configs.append((0, ExampleConfig.from_dict(d["config"])))
    else:
        cases = d.get("case", [1, 2, 3])
        for c in [cases] if isinstance(cases, int) else cases:
            if c not in TABLE1:
                raise ConfigError(f"case must be one of {sorted(TABLE1)}, got {c!r}")
            configs.append((c, TABLE1[c]))
    plans = [
        ExperimentPlan(
            config=cfg,
            case=c,
            table=table,
            sample_sizes=tuple(d.get("sample_sizes", default_sizes)),
            replications=int(d.get("replications", 1000)),
            criteria=tuple(d.get("criteria", CRITERIA)),
            target_model=int(d.get("target_model", 1)),
            design=d.get("design", "independent"),
        )
        for c, cfg in configs
    ]
    seed = d.get("seed")
    return plans, (None if seed is None else int(seed))


def _to_csv(cols: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.6g}" if math.isfinite(v) else "nan"
