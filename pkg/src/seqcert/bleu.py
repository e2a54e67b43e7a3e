"""Whitespace tokenization, sentence/corpus BLEU, and the beam-search length penalty.

All scores live in [0, 1]; reporting layers multiply by 100 for display.
Everything here is a pure function of immutable inputs, so the module is
safe to call from any number of threads.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

TokenSeq = tuple[str, ...]

DEFAULT_MAX_ORDER = 4

#: Sentence-level smoothing rule, recorded in run manifests.  Clipped
#: precision numerator and denominator both get +1 for orders >= 2; the
#: unigram precision is left raw so fully disjoint sentences score 0.
SMOOTHING_TAG = "add-one:orders>=2"


def tokenize(text: str) -> TokenSeq:
    """Split ``text`` on runs of unicode whitespace.

    No case folding and no punctuation splitting: decoder output is taken
    as-is, so scores never depend on a model-specific vocabulary.  Empty
    input yields an empty sequence.
    """
    return tuple(text.split())


def detokenize(tokens: TokenSeq) -> str:
    """Inverse of :func:`tokenize` up to whitespace normalization."""
    return " ".join(tokens)


def length_penalty(length: int, alpha: float) -> float:
    """Beam-search length normalizer ``((5 + length) / 6) ** alpha``.

    Strictly increasing in ``length`` for ``alpha > 0``, identically 1.0
    for ``alpha == 0``, and equal to 1.0 at ``length == 1``.
    """
    if length < 0:
        raise ValueError(f"length must be >= 0, got {length}")
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    return ((5.0 + length) / 6.0) ** alpha


@dataclass(frozen=True)
class NGramProfile:
    """Cached n-gram multisets of one sentence, orders 1..max_order.

    Building a profile once per sentence lets the pairwise BLEU table in
    the uncertainty layer avoid re-counting the same n-grams N times.
    """

    length: int
    max_order: int
    counts: tuple[Counter, ...]

    @classmethod
    def build(cls, tokens: TokenSeq, max_order: int = DEFAULT_MAX_ORDER) -> "NGramProfile":
        if max_order < 1:
            raise ValueError(f"max_order must be >= 1, got {max_order}")
        counts = tuple(
            Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
            for n in range(1, max_order + 1)
        )
        return cls(length=len(tokens), max_order=max_order, counts=counts)


@dataclass(frozen=True)
class BleuScore:
    """BLEU in [0, 1]: ``value = brevity_penalty * geomean(precisions)``."""

    value: float
    precisions: tuple[float, ...]
    brevity_penalty: float

    @property
    def display(self) -> float:
        """Common reporting convention: value scaled to [0, 100]."""
        return self.value * 100.0


def _geometric_mean(precisions: list[float]) -> float:
    product = 1.0
    for p in precisions:
        product *= p
    return product ** (1.0 / len(precisions))


def bleu_from_profiles(candidate: NGramProfile, reference: NGramProfile) -> BleuScore:
    """Smoothed sentence BLEU on prebuilt profiles.

    Precisions are clipped against the reference multiset.  Orders >= 2
    get add-one smoothing on numerator and denominator; the unigram
    precision stays raw.  Brevity penalty is ``exp(1 - |ref|/|cand|)``
    when the candidate is shorter, else 1.
    """
    if reference.length == 0:
        raise ValueError("reference must not be empty")
    if candidate.max_order != reference.max_order:
        raise ValueError("candidate and reference profiles disagree on max_order")
    max_order = candidate.max_order
    if candidate.length == 0:
        return BleuScore(0.0, (0.0,) * max_order, 1.0)

    precisions: list[float] = []
    for n in range(1, max_order + 1):
        total = max(0, candidate.length - n + 1)
        clipped = sum((candidate.counts[n - 1] & reference.counts[n - 1]).values())
        if n == 1:
            precisions.append(clipped / total)
        else:
            precisions.append((clipped + 1.0) / (total + 1.0))

    if candidate.length < reference.length:
        brevity = math.exp(1.0 - reference.length / candidate.length)
    else:
        brevity = 1.0
    return BleuScore(brevity * _geometric_mean(precisions), tuple(precisions), brevity)


def sentence_bleu(
    candidate: TokenSeq, reference: TokenSeq, max_order: int = DEFAULT_MAX_ORDER
) -> BleuScore:
    """Sentence-level smoothed BLEU of ``candidate`` against ``reference``.

    Not symmetric.  Identity scores exactly 1.0; an empty candidate scores
    0.0; an empty reference is an error.
    """
    return bleu_from_profiles(
        NGramProfile.build(candidate, max_order), NGramProfile.build(reference, max_order)
    )


def corpus_bleu(
    pairs: list[tuple[TokenSeq, TokenSeq]], max_order: int = DEFAULT_MAX_ORDER
) -> BleuScore:
    """Corpus BLEU: pooled clipped counts and pooled lengths, no smoothing.

    Orders with zero pooled candidate n-gram count (every candidate shorter
    than n) are dropped from the geometric mean instead of zeroing it, so a
    corpus of identical short sentences still scores 1.0.  Reported
    precisions for dropped orders are 0.0 with the value computed over the
    effective orders only.

    Deterministically order-invariant (all pooling is integer addition).
    Raises on an empty pair list or any empty reference.
    """
    if not pairs:
        raise ValueError("corpus_bleu needs at least one (candidate, reference) pair")
    if max_order < 1:
        raise ValueError(f"max_order must be >= 1, got {max_order}")

    matched = [0] * max_order
    total = [0] * max_order
    cand_len = 0
    ref_len = 0
    for candidate, reference in pairs:
        if len(reference) == 0:
            raise ValueError("corpus_bleu references must not be empty")
        cand_len += len(candidate)
        ref_len += len(reference)
        for n in range(1, max_order + 1):
            cand_counts = Counter(
                tuple(candidate[i : i + n]) for i in range(len(candidate) - n + 1)
            )
            ref_counts = Counter(
                tuple(reference[i : i + n]) for i in range(len(reference) - n + 1)
            )
            matched[n - 1] += sum((cand_counts & ref_counts).values())
            total[n - 1] += max(0, len(candidate) - n + 1)

    if cand_len == 0:
        return BleuScore(0.0, (0.0,) * max_order, 1.0)
    precisions = [
        matched[i] / total[i] if total[i] > 0 else 0.0 for i in range(max_order)
    ]
    effective = [precisions[i] for i in range(max_order) if total[i] > 0]
    if cand_len < ref_len:
        brevity = math.exp(1.0 - ref_len / cand_len)
    else:
        brevity = 1.0
    return BleuScore(brevity * _geometric_mean(effective), tuple(precisions), brevity)
