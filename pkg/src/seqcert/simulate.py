"""Synthetic stochastic decoder: fabricates sample sets with controllable
disagreement so every metric property can be exercised without a model.

Each sentence gets a ground-truth reference drawn from a synthetic
vocabulary; each of its N samples independently corrupts each reference
token with probability ``noise_rate`` (substitution only, so lengths stay
fixed and length-bin analyses remain controllable; an insert/delete mode
is a possible extension).  A designated out-of-distribution subset draws
from a disjoint vocabulary half and corrupts at ``max(noise_rate, 0.6)``.

Per-sample pseudo-logprobs are ``-(number of corrupted tokens)``: not
physical, but order-consistent with corruption, which is all the BS/SP
plumbing needs.  Every record is reproducible per (seed, sentence index,
sample index) via spawned RNG streams, so parallel per-sentence generation
would reproduce sequential output exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bleu import TokenSeq
from .uncertainty import Hypothesis, SampleSet

#: Minimum corruption rate applied to the out-of-distribution subset.
OOD_NOISE_FLOOR = 0.6


@dataclass(frozen=True)
class SimConfig:
    vocab_size: int
    sentence_count: int
    length_range: tuple[int, int]
    noise_rate: float
    num_samples: int
    seed: int
    ood_fraction: float = 0.0

    def __post_init__(self) -> None:
        if self.sentence_count < 1:
            raise ValueError(f"sentence_count must be >= 1, got {self.sentence_count}")
        lo, hi = self.length_range
        if lo < 1 or hi < lo:
            raise ValueError(f"length_range must satisfy 1 <= min <= max, got {self.length_range}")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError(f"noise_rate must lie in [0, 1], got {self.noise_rate}")
        if self.num_samples < 2:
            raise ValueError(f"num_samples must be >= 2, got {self.num_samples}")
        if not 0.0 <= self.ood_fraction <= 1.0:
            raise ValueError(f"ood_fraction must lie in [0, 1], got {self.ood_fraction}")
        # Substitution excludes the original token, so each half needs >= 2 words.
        if self.ood_fraction > 0.0:
            if self.vocab_size < 4:
                raise ValueError("vocab_size must be >= 4 when an OOD subset is requested")
        elif self.vocab_size < 2:
            raise ValueError(f"vocab_size must be >= 2, got {self.vocab_size}")

    @classmethod
    def from_json(cls, path: str | Path) -> "SimConfig":
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
        raw["length_range"] = tuple(raw["length_range"])
        return cls(**raw)


def _corrupt(
    rng: np.random.Generator, reference: np.ndarray, rate: float, base: int, span: int
) -> tuple[np.ndarray, int]:
    """Substitute each token with probability ``rate``; replacement drawn
    uniformly from the [base, base+span) range excluding the original."""
    mask = rng.random(reference.size) < rate
    offsets = rng.integers(1, span, size=reference.size)
    corrupted = np.where(mask, base + (reference - base + offsets) % span, reference)
    return corrupted, int(mask.sum())


def _tokens(ids: np.ndarray) -> TokenSeq:
    return tuple(f"w{int(i)}" for i in ids)


def simulate(config: SimConfig) -> list[SampleSet]:
    """Generate ``sentence_count`` sample sets, byte-identical per seed.

    The last ``round(ood_fraction * sentence_count)`` sentences form the
    OOD subset; their ids carry an ``ood-`` prefix (in-distribution ids
    use ``sent-``) since the sample-file schema has no population field.
    """
    half = config.vocab_size // 2
    ood_count = int(config.ood_fraction * config.sentence_count + 0.5)
    first_ood = config.sentence_count - ood_count
    children = np.random.SeedSequence(config.seed).spawn(config.sentence_count)

    sample_sets: list[SampleSet] = []
    for index, child in enumerate(children):
        rng = np.random.Generator(np.random.PCG64(child))
        is_ood = index >= first_ood
        if is_ood:
            base, span = half, config.vocab_size - half
            rate = max(config.noise_rate, OOD_NOISE_FLOOR)
            record_id = f"ood-{index:05d}"
        else:
            base, span = 0, half if config.ood_fraction > 0.0 else config.vocab_size
            rate = config.noise_rate
            record_id = f"sent-{index:05d}"

        length = int(rng.integers(config.length_range[0], config.length_range[1] + 1))
        reference = base + rng.integers(0, span, size=length)

        samples = []
        for _ in range(config.num_samples):
            decoded, corrupted = _corrupt(rng, reference, rate, base, span)
            samples.append(Hypothesis(tokens=_tokens(decoded), logprob=-float(corrupted)))
        det_ids, det_corrupted = _corrupt(rng, reference, rate, base, span)
        deterministic = Hypothesis(tokens=_tokens(det_ids), logprob=-float(det_corrupted))

        sample_sets.append(
            SampleSet(
                id=record_id,
                source=" ".join(_tokens(reference)),
                samples=tuple(samples),
                deterministic=deterministic,
                reference=_tokens(reference),
            )
        )
    return sample_sets
