"""Selective-prediction evaluation: retention curves, histograms, AUROC
separation, length-binned uncertainty, and referral baselines.

All operations are pure over immutable row lists.  Sorting happens
internally with ties broken by sentence id, so results never depend on
input row order.
"""

from __future__ import annotations

import math
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bleu import corpus_bleu
from .uncertainty import Measure, ScoredSentence, UncertaintyValue


class Metric(str, Enum):
    CORPUS_BLEU = "CORPUS_BLEU"
    MEAN_SENT_BLEU = "MEAN_SENT_BLEU"


class Ordering(str, Enum):
    UNCERTAINTY = "UNCERTAINTY"
    SENT_LENGTH = "SENT_LENGTH"
    RANDOM = "RANDOM"


#: Default retained-fraction grid: 0.05, 0.10, ..., 1.00.
DEFAULT_FRACTIONS: tuple[float, ...] = tuple(i / 20 for i in range(1, 21))

#: Output-length bins for the length analysis table: 1-10 ... 41-50, 51+.
LENGTH_BIN_EDGES: tuple[tuple[int, int | None], ...] = (
    (1, 10),
    (11, 20),
    (21, 30),
    (31, 40),
    (41, 50),
    (51, None),
)


@dataclass(frozen=True)
class RetentionCurve:
    """Performance on the most-confident prefix, per retained fraction.

    ``measure`` tags what produced the ordering (a measure name, or an
    ordering label such as SENT_LENGTH for referral baselines).  Fractions
    are strictly increasing and always end at 1.0.
    """

    measure: str
    metric: Metric
    points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class HistogramReport:
    """Per-population counts over shared equal-width bins."""

    bin_edges: tuple[float, ...]
    counts: dict[str, tuple[int, ...]]


@dataclass(frozen=True)
class LengthBin:
    label: str
    lo: int
    hi: int | None
    count: int
    mean_uncertainty: float | None


def display_value(uncertainty: UncertaintyValue) -> float:
    """Reporting-scale value: BLEUVAR sums are scaled by 100 (so the N = 10
    range [0, 90] displays as [0, 9000]); BS/SP log scores pass through."""
    if uncertainty.measure is Measure.BLEUVAR:
        return uncertainty.value * 100.0
    return uncertainty.value


def display_quality(quality: float) -> float:
    """Sentence BLEU scaled to the conventional [0, 100] range."""
    return quality * 100.0


def _single_measure(rows: Sequence[ScoredSentence]) -> Measure:
    if not rows:
        raise ValueError("no rows given")
    measures = {row.uncertainty.measure for row in rows}
    if len(measures) != 1:
        names = sorted(m.value for m in measures)
        raise ValueError(f"rows mix measures {names}; evaluate one measure at a time")
    return next(iter(measures))


def _require_references(rows: Sequence[ScoredSentence]) -> None:
    for row in rows:
        if row.reference is None:
            raise ValueError(f"row {row.id!r} has no reference; metric needs one")


def _checked_fractions(fractions: Iterable[float]) -> tuple[float, ...]:
    cleaned = sorted(set(fractions))
    if not cleaned:
        raise ValueError("at least one retained fraction is required")
    for f in cleaned:
        if not 0.0 < f <= 1.0:
            raise ValueError(f"retained fractions must lie in (0, 1], got {f}")
    if cleaned[-1] != 1.0:
        cleaned.append(1.0)
    return tuple(cleaned)


def _prefix_performance(
    ordered: Sequence[ScoredSentence], kept: int, metric: Metric
) -> float:
    subset = ordered[:kept]
    if metric is Metric.CORPUS_BLEU:
        return corpus_bleu([(row.output, row.reference) for row in subset]).value
    if metric is Metric.MEAN_SENT_BLEU:
        return math.fsum(row.sentence_quality for row in subset) / kept
    raise ValueError(f"unknown metric {metric!r}")


def curve_for_ordered_rows(
    tag: str,
    ordered: Sequence[ScoredSentence],
    metric: Metric,
    fractions: Iterable[float] = DEFAULT_FRACTIONS,
) -> RetentionCurve:
    """Retention curve for rows already in keep-first order.

    For each fraction f the first ceil(f * M) rows are kept.  The point at
    fraction 1.0 (always included) is the full-dataset metric, identical
    for every ordering of the same rows.
    """
    if not ordered:
        raise ValueError("no rows given")
    _require_references(ordered)
    fracs = _checked_fractions(fractions)
    total = len(ordered)
    points = tuple(
        (f, _prefix_performance(ordered, math.ceil(f * total), metric)) for f in fracs
    )
    return RetentionCurve(measure=tag, metric=metric, points=points)


def retention_curve(
    rows: Sequence[ScoredSentence],
    metric: Metric,
    fractions: Iterable[float] = DEFAULT_FRACTIONS,
) -> RetentionCurve:
    """Performance versus retained fraction, most-confident rows first.

    Rows are sorted by oriented uncertainty ascending (BS/SP descending
    value, BLEUVAR ascending value), ties broken by id.  All rows must
    carry references and a single shared measure.
    """
    measure = _single_measure(rows)
    ordered = sorted(rows, key=lambda r: (r.uncertainty.as_uncertainty(), r.id))
    return curve_for_ordered_rows(measure.value, ordered, metric, fractions)


def baseline_orderings(
    rows: Sequence[ScoredSentence],
    ordering: Ordering,
    metric: Metric,
    fractions: Iterable[float] = DEFAULT_FRACTIONS,
    seed: int | None = None,
) -> RetentionCurve:
    """Referral-baseline retention curves.

    SENT_LENGTH keeps shortest outputs first; RANDOM applies one seeded
    shuffle (of the id-sorted rows, so the curve is independent of input
    order); UNCERTAINTY delegates to :func:`retention_curve`.
    """
    if ordering is Ordering.UNCERTAINTY:
        return retention_curve(rows, metric, fractions)
    _single_measure(rows)
    if ordering is Ordering.SENT_LENGTH:
        ordered = sorted(rows, key=lambda r: (len(r.output), r.id))
        return curve_for_ordered_rows(Ordering.SENT_LENGTH.value, ordered, metric, fractions)
    if ordering is Ordering.RANDOM:
        if seed is None:
            raise ValueError("RANDOM ordering needs a seed")
        shuffled = sorted(rows, key=lambda r: r.id)
        random.Random(seed).shuffle(shuffled)
        tag = f"RANDOM(seed={seed})"
        return curve_for_ordered_rows(tag, shuffled, metric, fractions)
    raise ValueError(f"unknown ordering {ordering!r}")


def histogram(
    values: Sequence[tuple[str, float]], bins: int
) -> HistogramReport:
    """Per-population counts over ``bins`` equal-width bins spanning the
    joint [min, max] of all populations.  The top edge is closed."""
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    if not values:
        raise ValueError("histogram needs at least one value")
    all_values = np.array([v for _, v in values], dtype=float)
    edges = np.linspace(all_values.min(), all_values.max(), bins + 1)

    labels: list[str] = []
    for label, _ in values:
        if label not in labels:
            labels.append(label)
    counts: dict[str, tuple[int, ...]] = {}
    for label in labels:
        population = np.array([v for lab, v in values if lab == label], dtype=float)
        hist, _ = np.histogram(population, bins=edges)
        counts[label] = tuple(int(c) for c in hist)
    return HistogramReport(bin_edges=tuple(float(e) for e in edges), counts=counts)


def ood_separation(in_dist: Sequence[float], ood: Sequence[float]) -> float:
    """AUROC of "is out-of-distribution" against uncertainty, computed with
    the rank-sum formulation; tied values contribute 1/2.

    Inputs must be oriented so that higher means more uncertain.  1.0 means
    every OOD value exceeds every in-distribution value; 0.5 is chance.
    """
    if not in_dist or not ood:
        raise ValueError("both populations must be nonempty")
    pooled = sorted(
        [(v, False) for v in in_dist] + [(v, True) for v in ood], key=lambda p: p[0]
    )
    n = len(pooled)
    rank_sum_ood = 0.0
    i = 0
    while i < n:
        j = i
        while j < n and pooled[j][0] == pooled[i][0]:
            j += 1
        average_rank = (i + 1 + j) / 2.0
        rank_sum_ood += average_rank * sum(1 for k in range(i, j) if pooled[k][1])
        i = j
    n_ood = len(ood)
    u_statistic = rank_sum_ood - n_ood * (n_ood + 1) / 2.0
    return u_statistic / (len(in_dist) * n_ood)


def length_bins(rows: Sequence[ScoredSentence]) -> tuple[LengthBin, ...]:
    """Mean display-scale uncertainty grouped by output sentence length.

    Bins are 1-10, 11-20, ..., 41-50, 51+; empty outputs (length 0) fall
    into the first bin.  Empty bins report count 0 and no mean.
    """
    _single_measure(rows)
    grouped: list[list[float]] = [[] for _ in LENGTH_BIN_EDGES]
    for row in rows:
        length = len(row.output)
        for index, (lo, hi) in enumerate(LENGTH_BIN_EDGES):
            if hi is None or length <= hi:
                grouped[index].append(display_value(row.uncertainty))
                break
    result = []
    for (lo, hi), values in zip(LENGTH_BIN_EDGES, grouped):
        label = f"{lo}-{hi}" if hi is not None else f"{lo}+"
        mean = math.fsum(values) / len(values) if values else None
        result.append(LengthBin(label=label, lo=lo, hi=hi, count=len(values), mean_uncertainty=mean))
    return tuple(result)


def density_pairs(rows: Sequence[ScoredSentence]) -> tuple[tuple[float, float], ...]:
    """Plot-ready (uncertainty, quality) display pairs, uncertainty ascending."""
    _single_measure(rows)
    _require_references(rows)
    pairs = sorted(
        (display_value(row.uncertainty), display_quality(row.sentence_quality), row.id)
        for row in rows
    )
    return tuple((u, q) for u, q, _ in pairs)
