"""Sequence-level uncertainty measures over stochastic decode samples.

Three measures are supported:

* beam score (BS): length-penalized log-probability of the deterministic
  beam output; higher means more confident.
* sequence probability (SP): length-penalized log of the summed sample
  probabilities of the deterministic output; higher means more confident.
  The 1/N averaging constant is dropped (it shifts every sentence equally
  and cancels in rank-based evaluation).
* BLEU variance (BLEUVAR): sum over all ordered sample pairs (i, j), i != j,
  of ``(1 - BLEU(sample_i, sample_j))**2``; higher means more uncertain.
  Range [0, N*(N-1)] internally; reporting layers scale by 100.

BLEUVAR reports the medoid sample (smallest total bidirectional BLEU
disagreement with the rest) as its output sentence, while BS and SP report
the deterministic decode.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

from .bleu import (
    DEFAULT_MAX_ORDER,
    NGramProfile,
    TokenSeq,
    bleu_from_profiles,
    length_penalty,
    sentence_bleu,
)

#: Exponent of the beam-search length penalty used by BS and SP.
LENGTH_PENALTY_ALPHA = 0.6


class Measure(str, Enum):
    BS = "BS"
    SP = "SP"
    BLEUVAR = "BLEUVAR"

    @property
    def higher_is_uncertain(self) -> bool:
        """Orientation: BLEUVAR grows with uncertainty, BS/SP with confidence."""
        return self is Measure.BLEUVAR


class MissingFieldError(ValueError):
    """A sample set lacks a field the requested measure needs."""


def _check_logprob(logprob: float, what: str) -> None:
    if not math.isfinite(logprob):
        raise ValueError(f"{what} must be finite, got {logprob!r}")
    if logprob > 0:
        raise ValueError(f"{what} must be <= 0, got {logprob!r}")


@dataclass(frozen=True)
class Hypothesis:
    """One decoded sentence, optionally with its own log-probability (natural log)."""

    tokens: TokenSeq
    logprob: float | None = None

    def __post_init__(self) -> None:
        if self.logprob is not None:
            _check_logprob(self.logprob, "hypothesis logprob")


@dataclass(frozen=True)
class SampleSet:
    """One source sentence with its N stochastic decodes.

    ``deterministic`` is the decode of the noise-free model (dropout off),
    required by BS (its logprob) and SP (its tokens and length).  If any
    sample carries a logprob, SP additionally requires that all of them do.
    """

    id: str
    source: str
    samples: tuple[Hypothesis, ...]
    deterministic: Hypothesis | None = None
    reference: TokenSeq | None = None

    def __post_init__(self) -> None:
        if len(self.samples) < 1:
            raise ValueError(f"sample set {self.id!r} must contain at least one sample")

    @property
    def deterministic_logprob(self) -> float | None:
        return self.deterministic.logprob if self.deterministic is not None else None

    @property
    def sample_tokens(self) -> tuple[TokenSeq, ...]:
        return tuple(h.tokens for h in self.samples)

    @property
    def sample_logprobs(self) -> tuple[float, ...] | None:
        """All sample logprobs, or None if any sample lacks one."""
        probs = tuple(h.logprob for h in self.samples)
        if any(p is None for p in probs):
            return None
        return probs  # type: ignore[return-value]


@dataclass(frozen=True)
class UncertaintyValue:
    measure: Measure
    value: float

    @property
    def higher_is_uncertain(self) -> bool:
        return self.measure.higher_is_uncertain

    def as_uncertainty(self) -> float:
        """Value oriented so that higher always means more uncertain."""
        return self.value if self.higher_is_uncertain else -self.value


@dataclass(frozen=True)
class ScoredSentence:
    """One evaluation row: chosen output plus its uncertainty value.

    ``sentence_quality`` is the sentence BLEU of ``output`` against
    ``reference`` and is present exactly when the reference is.
    """

    id: str
    output: TokenSeq
    uncertainty: UncertaintyValue
    reference: TokenSeq | None = None
    sentence_quality: float | None = None

    def __post_init__(self) -> None:
        if (self.reference is None) != (self.sentence_quality is None):
            raise ValueError(
                f"row {self.id!r}: sentence_quality must be present iff reference is"
            )


def beam_score(deterministic_logprob: float, length: int) -> UncertaintyValue:
    """BS = logprob / length_penalty(length, 0.6)."""
    _check_logprob(deterministic_logprob, "deterministic logprob")
    value = deterministic_logprob / length_penalty(length, LENGTH_PENALTY_ALPHA)
    return UncertaintyValue(Measure.BS, value)


def sequence_probability(
    sample_logprobs: Sequence[float], length: int
) -> UncertaintyValue:
    """SP = log(sum_i exp(logprob_i)) / length_penalty(length, 0.6).

    The log-sum-exp is computed with the max-shift identity, so inputs far
    below the exp underflow threshold (e.g. -700 and beyond) stay finite.
    All samples are assumed to score the same fixed hypothesis whose token
    count is ``length``.
    """
    if len(sample_logprobs) < 1:
        raise ValueError("sequence_probability needs at least one sample logprob")
    for lp in sample_logprobs:
        if lp is None:
            raise MissingFieldError("sequence_probability: a sample logprob is missing")
        _check_logprob(lp, "sample logprob")
    shift = max(sample_logprobs)
    lse = shift + math.log(math.fsum(math.exp(lp - shift) for lp in sample_logprobs))
    return UncertaintyValue(Measure.SP, lse / length_penalty(length, LENGTH_PENALTY_ALPHA))


def pairwise_bleu_matrix(
    samples: Sequence[TokenSeq], max_order: int = DEFAULT_MAX_ORDER
) -> list[list[float]]:
    """N x N table of sentence BLEU values; entry [i][j] scores sample i
    as candidate against sample j as reference.  Diagonal fixed at 1.0.

    Empty samples participate: a pair with an empty reference side scores
    0.0 unless both sides are empty (identical -> 1.0).

    Each profile is built once, so the table costs N profile builds plus
    N*(N-1) clipped-count comparisons.
    """
    profiles = [NGramProfile.build(s, max_order) for s in samples]
    n = len(profiles)
    matrix = [[1.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if profiles[j].length == 0:
                matrix[i][j] = 1.0 if profiles[i].length == 0 else 0.0
            else:
                matrix[i][j] = bleu_from_profiles(profiles[i], profiles[j]).value
    return matrix


def _bleuvar_from_matrix(matrix: list[list[float]]) -> float:
    n = len(matrix)
    # fsum is correctly rounded regardless of term order, which makes the
    # result exactly invariant under sample permutations.
    return math.fsum(
        (1.0 - matrix[i][j]) ** 2 for i in range(n) for j in range(n) if i != j
    )


def _medoid_from_matrix(matrix: list[list[float]]) -> int:
    n = len(matrix)
    best_index = 0
    best_sum = math.inf
    for i in range(n):
        disagreement = math.fsum(
            (1.0 - matrix[i][j]) + (1.0 - matrix[j][i]) for j in range(n) if j != i
        )
        if disagreement < best_sum:
            best_index, best_sum = i, disagreement
    return best_index


def bleuvar(
    samples: Sequence[TokenSeq], max_order: int = DEFAULT_MAX_ORDER
) -> UncertaintyValue:
    """BLEUVAR over all ordered sample pairs; requires N >= 2.

    A single sample carries no disagreement evidence, so N = 1 is an error
    rather than a silent 0 (that would fake maximal confidence).  Empty
    sequences are legal samples and score BLEU 0 against nonempty peers.
    """
    if len(samples) < 2:
        raise ValueError(f"bleuvar needs at least 2 samples, got {len(samples)}")
    return UncertaintyValue(
        Measure.BLEUVAR, _bleuvar_from_matrix(pairwise_bleu_matrix(samples, max_order))
    )


def medoid_select(
    samples: Sequence[TokenSeq], max_order: int = DEFAULT_MAX_ORDER
) -> tuple[int, TokenSeq]:
    """Index and tokens of the sample with the smallest total bidirectional
    BLEU disagreement with the others.  Ties go to the lowest index."""
    if len(samples) == 0:
        raise ValueError("medoid_select needs at least one sample")
    if len(samples) == 1:
        return 0, samples[0]
    index = _medoid_from_matrix(pairwise_bleu_matrix(samples, max_order))
    return index, samples[index]


def score_sample_set(
    sample_set: SampleSet, measure: Measure, max_order: int = DEFAULT_MAX_ORDER
) -> ScoredSentence:
    """Score one sample set with one measure and pick its output sentence.

    BS and SP attach their values to the deterministic decode; BLEUVAR
    attaches its value to the medoid sample.  When a reference is present
    the output's sentence BLEU is recorded as quality.
    """
    if measure is Measure.BS:
        det = sample_set.deterministic
        if det is None or det.logprob is None:
            raise MissingFieldError(
                f"sample set {sample_set.id!r}: measure BS needs a deterministic "
                "decode with a logprob"
            )
        output = det.tokens
        value = beam_score(det.logprob, len(det.tokens))
    elif measure is Measure.SP:
        det = sample_set.deterministic
        if det is None:
            raise MissingFieldError(
                f"sample set {sample_set.id!r}: measure SP needs a deterministic decode"
            )
        logprobs = sample_set.sample_logprobs
        if logprobs is None:
            raise MissingFieldError(
                f"sample set {sample_set.id!r}: measure SP needs a logprob on every sample"
            )
        output = det.tokens
        value = sequence_probability(logprobs, len(det.tokens))
    elif measure is Measure.BLEUVAR:
        tokens = sample_set.sample_tokens
        if len(tokens) < 2:
            raise MissingFieldError(
                f"sample set {sample_set.id!r}: measure BLEUVAR needs at least 2 samples"
            )
        matrix = pairwise_bleu_matrix(tokens, max_order)
        output = tokens[_medoid_from_matrix(matrix)]
        value = UncertaintyValue(Measure.BLEUVAR, _bleuvar_from_matrix(matrix))
    else:
        raise ValueError(f"unknown measure {measure!r}")

    quality = None
    if sample_set.reference is not None:
        quality = sentence_bleu(output, sample_set.reference, max_order).value
    return ScoredSentence(
        id=sample_set.id,
        output=output,
        uncertainty=value,
        reference=sample_set.reference,
        sentence_quality=quality,
    )
