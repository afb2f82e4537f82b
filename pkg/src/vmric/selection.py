"""Choosing among a finite list of candidate forecasting models."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .criteria import CriterionValue, PenaltySpec, aic_bic, estimate_indices, vmric
from .errors import ConfigError, VmricError
from .estimation import Records, fit_ols

__all__ = [
    "CandidateModel",
    "CandidateScore",
    "SelectionReport",
    "score_candidate",
    "assemble_report",
    "evaluate_candidates",
    "selection_frequencies",
]

logger = logging.getLogger(__name__)

# relative tolerance for the M1/M2 diagnostic sets
SET_TOLERANCE = 1e-6


@dataclass(frozen=True)
class CandidateModel:
    """Forecast the responses from one named series, optionally lagged."""

    id: int
    series: str
    lag: int = 0

    @classmethod
    def from_dict(cls, d: dict) -> "CandidateModel":
        unknown = set(d) - {"id", "series", "lag"}
        if unknown:
            raise ConfigError(f"unknown candidate keys: {sorted(unknown)}")
        try:
            return cls(id=int(d["id"]), series=str(d["series"]), lag=int(d.get("lag", 0)))
        except KeyError as exc:
            raise ConfigError(f"candidate is missing key {exc}") from None

    def to_dict(self) -> dict:
        return {"id": self.id, "series": self.series, "lag": self.lag}


@dataclass(frozen=True)
class CandidateScore:
    id: int
    criterion: CriterionValue
    aic: float
    bic: float

    def to_dict(self) -> dict:
        return {"id": self.id, **self.criterion.to_dict(), "aic": self.aic, "bic": self.bic}


@dataclass(frozen=True)
class SelectionReport:
    per_model: list[CandidateScore]
    chosen_vmric: int
    chosen_aic: int
    chosen_bic: int
    m1_hat: frozenset[int]
    m2_hat: frozenset[int]
    failures: dict[int, str] = field(default_factory=dict)

    def score(self, model_id: int) -> CandidateScore:
        for s in self.per_model:
            if s.id == model_id:
                return s
        raise KeyError(model_id)

    def to_dict(self) -> dict:
        return {
            "per_model": [s.to_dict() for s in self.per_model],
            "chosen": {"vmric": self.chosen_vmric, "aic": self.chosen_aic, "bic": self.chosen_bic},
            "m1_hat": sorted(self.m1_hat),
            "m2_hat": sorted(self.m2_hat),
            "failures": {str(k): v for k, v in sorted(self.failures.items())},
        }


def score_candidate(data: Records, candidate: CandidateModel, h: int, spec: PenaltySpec) -> CandidateScore:
    sample = data.sample(candidate.series, h, candidate.lag)
    fit = fit_ols(sample)
    idx = estimate_indices(sample, fit)
    crit = vmric(idx.mi, idx.vi, spec, sample.n)
    aic, bic = aic_bic(fit.residuals, k=sample.w)
    return CandidateScore(id=candidate.id, criterion=crit, aic=aic, bic=bic)


def _argmin(scores: list[CandidateScore], key) -> int:
    # strict less-than over ascending ids: exact ties go to the lower id
    best = None
    for s in sorted(scores, key=lambda s: s.id):
        if best is None or key(s) < key(best):
            best = s
    return best.id


def _within(values: dict[int, float]) -> frozenset[int]:
    lo = min(values.values())
    tol = SET_TOLERANCE * (1.0 + abs(lo))
    return frozenset(i for i, v in values.items() if v <= lo + tol)


def assemble_report(scores: list[CandidateScore], failures: dict[int, str] | None = None) -> SelectionReport:
    """Reduce per-candidate scores to a report; independent of input order."""
    failures = dict(failures or {})
    if not scores:
        raise VmricError(f"every candidate failed: {failures}")
    scores = sorted(scores, key=lambda s: s.id)
    m1 = _within({s.id: s.criterion.mi_norm for s in scores})
    m2 = _within({s.id: s.criterion.vi_norm for s in scores if s.id in m1})
    return SelectionReport(
        per_model=scores,
        chosen_vmric=_argmin(scores, lambda s: s.criterion.total),
        chosen_aic=_argmin(scores, lambda s: s.aic),
        chosen_bic=_argmin(scores, lambda s: s.bic),
        m1_hat=m1,
        m2_hat=m2,
        failures=failures,
    )


def evaluate_candidates(
    data: Records, candidates: list[CandidateModel], h: int, spec: PenaltySpec
) -> SelectionReport:
    """Score every candidate on ``data`` and pick the minimiser of each criterion.

    A candidate whose estimation fails is left out and its error message is
    kept in ``failures``; the call only raises when all of them fail.
    """
    if not candidates:
        raise ConfigError("no candidate models given")
    ids = [c.id for c in candidates]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"candidate ids must be unique, got {ids}")
    scores, failures = [], {}
    for cand in candidates:
        try:
            scores.append(score_candidate(data, cand, h, spec))
        except VmricError as exc:
            logger.warning("candidate %d failed: %s", cand.id, exc)
            failures[cand.id] = f"{exc.category}: {exc}"
    return assemble_report(scores, failures)


def selection_frequencies(reports: list[SelectionReport], truth_id: int) -> dict[str, float]:
    if not reports:
        raise ConfigError("no reports to aggregate")
    n = len(reports)
    return {
        "vmric": sum(r.chosen_vmric == truth_id for r in reports) / n,
        "aic": sum(r.chosen_aic == truth_id for r in reports) / n,
        "bic": sum(r.chosen_bic == truth_id for r in reports) / n,
    }
