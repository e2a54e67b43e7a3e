import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqcert.uncertainty import (
    Hypothesis,
    Measure,
    MissingFieldError,
    SampleSet,
    UncertaintyValue,
    beam_score,
    bleuvar,
    medoid_select,
    pairwise_bleu_matrix,
    score_sample_set,
    sequence_probability,
)

from .oracles import bleuvar_ref, logsumexp_ref, medoid_ref


VOCAB = [f"w{i}" for i in range(10)]

token_lists = st.lists(st.sampled_from(VOCAB), min_size=1, max_size=8).map(tuple)
sample_lists = st.lists(token_lists, min_size=2, max_size=6)


def _disjoint_samples(n, length=6):
    return [tuple(f"v{i}_{j}" for j in range(length)) for i in range(n)]


class TestBeamScore:
    def test_length_one_penalty_is_identity(self):
        assert beam_score(-6.0, 1).value == -6.0

    def test_zero_numerator(self):
        assert beam_score(0.0, 37).value == 0.0

    def test_length_seven(self):
        assert beam_score(-6.0, 7).value == pytest.approx(-6.0 / 2.0**0.6, abs=1e-12)

    def test_positive_logprob_rejected(self):
        with pytest.raises(ValueError):
            beam_score(0.5, 3)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            beam_score(float("-inf"), 3)

    def test_orientation(self):
        value = beam_score(-2.0, 4)
        assert value.measure is Measure.BS
        assert not value.higher_is_uncertain
        assert value.as_uncertainty() == 2.0 / ((9 / 6) ** 0.6)


class TestSequenceProbability:
    def test_single_sample_length_one(self):
        assert sequence_probability([-1.0], 1).value == -1.0

    def test_two_equal_samples(self):
        assert sequence_probability([-3.0, -3.0], 1).value == pytest.approx(
            -3.0 + math.log(2.0), abs=1e-12
        )

    def test_deep_negative_stays_finite(self):
        value = sequence_probability([-700.0, -700.0], 1).value
        assert math.isfinite(value)
        assert value == pytest.approx(-700.0 + math.log(2.0), abs=1e-9)

    def test_far_below_underflow_threshold(self):
        value = sequence_probability([-2000.0, -2000.0, -2000.0], 1).value
        assert math.isfinite(value)
        assert value == pytest.approx(-2000.0 + math.log(3.0), abs=1e-9)

    def test_empty_is_error(self):
        with pytest.raises(ValueError):
            sequence_probability([], 3)

    def test_missing_logprob_is_error(self):
        with pytest.raises(MissingFieldError):
            sequence_probability([-1.0, None], 3)

    @given(st.lists(st.floats(min_value=-50.0, max_value=0.0), min_size=1, max_size=20))
    @settings(max_examples=200)
    def test_matches_extended_precision_oracle(self, logprobs):
        got = sequence_probability(logprobs, 1).value
        expected = logsumexp_ref(logprobs)
        assert got == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_no_averaging_constant(self):
        # N identical logprobs L give L + ln(N), not L.
        for n in (2, 5, 10):
            got = sequence_probability([-4.0] * n, 1).value
            assert got == pytest.approx(-4.0 + math.log(n), abs=1e-12)


class TestMonotonicityInLength:
    def test_magnitude_shrinks_as_penalty_grows(self):
        # For a fixed negative numerator, a longer sentence means a larger
        # penalty and a value closer to zero.
        bs = [beam_score(-6.0, n).value for n in (1, 5, 20, 80)]
        assert all(a < b for a, b in zip(bs, bs[1:]))
        assert all(abs(a) > abs(b) for a, b in zip(bs, bs[1:]))
        sp = [sequence_probability([-6.0, -5.0], n).value for n in (1, 5, 20, 80)]
        assert all(a < b for a, b in zip(sp, sp[1:]))


class TestBleuVar:
    def test_identical_samples_score_zero(self):
        a = ("the", "cat", "sat")
        assert bleuvar([a, a, a, a]).value == 0.0

    def test_fully_disjoint_ten_samples(self):
        value = bleuvar(_disjoint_samples(10))
        assert value.value == 90.0
        assert value.measure is Measure.BLEUVAR
        assert value.higher_is_uncertain

    def test_two_identical_one_disjoint(self):
        a, b = ("a", "b", "c"), ("x", "y", "z")
        # Ordered pairs: (a,a)=0, (a,b)=1, (a,a)=0, (a,b)=1, (b,a)=1, (b,a)=1.
        assert bleuvar([a, a, b]).value == 4.0

    def test_single_sample_is_error(self):
        with pytest.raises(ValueError):
            bleuvar([("a",)])

    def test_empty_sequences_participate(self):
        value = bleuvar([(), ("a", "b"), ("a", "b")])
        assert value.value > 0.0

    @given(sample_lists)
    @settings(max_examples=150)
    def test_matches_enumeration_oracle(self, samples):
        assert bleuvar(samples).value == pytest.approx(bleuvar_ref(samples), abs=1e-9)

    @given(sample_lists, st.randoms(use_true_random=False))
    @settings(max_examples=150)
    def test_permutation_invariance_exact(self, samples, rng):
        shuffled = list(samples)
        rng.shuffle(shuffled)
        assert bleuvar(shuffled).value == bleuvar(samples).value

    @given(sample_lists)
    @settings(max_examples=150)
    def test_bounds(self, samples):
        n = len(samples)
        assert 0.0 <= bleuvar(samples).value <= n * (n - 1)

    def test_zero_iff_all_pairwise_bleu_one(self):
        samples = [("a", "b"), ("a", "b"), ("a", "b")]
        matrix = pairwise_bleu_matrix(samples)
        assert all(v == 1.0 for row in matrix for v in row)
        assert bleuvar(samples).value == 0.0

    def test_duplicating_identical_samples_keeps_mean_zero(self):
        a = ("a", "b", "c")
        for n in (2, 3, 4):
            value = bleuvar([a] * n).value
            assert value / (n * (n - 1)) == 0.0


class TestMedoidSelect:
    def test_majority_member_wins_lowest_index(self):
        a, b = ("a", "b", "c"), ("x", "y", "z")
        index, output = medoid_select([a, a, b])
        assert index == 0
        assert output == a

    def test_singleton(self):
        index, output = medoid_select([("only",)])
        assert index == 0
        assert output == ("only",)

    def test_empty_is_error(self):
        with pytest.raises(ValueError):
            medoid_select([])

    def test_five_samples_against_exhaustive_enumeration(self):
        rng = random.Random(4242)
        for _ in range(50):
            samples = [
                tuple(rng.choice(VOCAB) for _ in range(rng.randint(1, 8)))
                for _ in range(5)
            ]
            index, _ = medoid_select(samples)
            assert index == medoid_ref(samples)

    @given(sample_lists)
    @settings(max_examples=100)
    def test_returned_index_is_argmin(self, samples):
        index, _ = medoid_select(samples)
        matrix = pairwise_bleu_matrix(samples)
        n = len(samples)

        def disagreement(i):
            return math.fsum(
                (1.0 - matrix[i][j]) + (1.0 - matrix[j][i]) for j in range(n) if j != i
            )

        best = disagreement(index)
        assert all(best <= disagreement(i) for i in range(n))


def _sample_set(
    samples,
    logprobs=None,
    deterministic=("the", "cat"),
    det_logprob=-1.2,
    reference=None,
    set_id="s1",
):
    hyps = tuple(
        Hypothesis(tokens=t, logprob=None if logprobs is None else logprobs[i])
        for i, t in enumerate(samples)
    )
    det = Hypothesis(tokens=deterministic, logprob=det_logprob) if deterministic else None
    return SampleSet(id=set_id, source="src", samples=hyps, deterministic=det, reference=reference)


class TestScoreSampleSet:
    def test_bs_and_sp_share_output_but_not_value(self):
        sample_set = _sample_set(
            samples=[("the", "cat"), ("a", "cat")], logprobs=[-2.0, -3.0]
        )
        bs_row = score_sample_set(sample_set, Measure.BS)
        sp_row = score_sample_set(sample_set, Measure.SP)
        assert bs_row.output == sp_row.output == ("the", "cat")
        assert bs_row.uncertainty.value != sp_row.uncertainty.value

    def test_bleuvar_identical_samples_gives_medoid_and_zero(self):
        tokens = ("same", "every", "time")
        sample_set = _sample_set(samples=[tokens] * 4)
        row = score_sample_set(sample_set, Measure.BLEUVAR)
        assert row.output == tokens
        assert row.uncertainty.value == 0.0

    def test_sp_without_logprobs_is_missing_field_error(self):
        sample_set = _sample_set(samples=[("a",), ("b",)], set_id="rec-7")
        with pytest.raises(MissingFieldError, match="rec-7"):
            score_sample_set(sample_set, Measure.SP)

    def test_bs_without_deterministic_is_missing_field_error(self):
        sample_set = _sample_set(samples=[("a",), ("b",)], deterministic=None)
        with pytest.raises(MissingFieldError, match="BS"):
            score_sample_set(sample_set, Measure.BS)

    def test_bleuvar_single_sample_is_error(self):
        sample_set = _sample_set(samples=[("a",)])
        with pytest.raises(MissingFieldError):
            score_sample_set(sample_set, Measure.BLEUVAR)

    def test_reference_adds_quality(self):
        sample_set = _sample_set(
            samples=[("the", "cat")] * 2, reference=("the", "cat")
        )
        row = score_sample_set(sample_set, Measure.BLEUVAR)
        assert row.sentence_quality == 1.0

    def test_no_reference_means_no_quality(self):
        row = score_sample_set(_sample_set(samples=[("a",)] * 2), Measure.BLEUVAR)
        assert row.sentence_quality is None
        assert row.reference is None


class TestValidation:
    def test_hypothesis_rejects_positive_logprob(self):
        with pytest.raises(ValueError):
            Hypothesis(tokens=("a",), logprob=0.5)

    def test_hypothesis_rejects_nan(self):
        with pytest.raises(ValueError):
            Hypothesis(tokens=("a",), logprob=float("nan"))

    def test_sample_set_needs_samples(self):
        with pytest.raises(ValueError):
            SampleSet(id="x", source="s", samples=())

    def test_mixed_logprobs_disable_sp(self):
        hyps = (Hypothesis(("a",), -1.0), Hypothesis(("b",), None))
        sample_set = SampleSet(id="x", source="s", samples=hyps)
        assert sample_set.sample_logprobs is None
