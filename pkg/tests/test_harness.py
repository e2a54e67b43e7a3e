import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqcert.bleu import sentence_bleu
from seqcert.harness import (
    DEFAULT_FRACTIONS,
    Metric,
    Ordering,
    baseline_orderings,
    curve_for_ordered_rows,
    density_pairs,
    display_quality,
    display_value,
    histogram,
    length_bins,
    ood_separation,
    retention_curve,
)
from seqcert.uncertainty import Measure, ScoredSentence, UncertaintyValue

from .oracles import auroc_ref, bin_counts_ref


def _row(id_, value, quality, measure=Measure.BLEUVAR, length=3):
    """Row with a synthetic output whose tokens don't matter except length."""
    reference = tuple("ref" for _ in range(max(1, length)))
    output = tuple(f"t{id_}_{k}" for k in range(length))
    return ScoredSentence(
        id=id_,
        output=output,
        uncertainty=UncertaintyValue(measure, value),
        reference=reference,
        sentence_quality=quality,
    )


def _matched_row(id_, value, tokens, reference, measure=Measure.BLEUVAR):
    return ScoredSentence(
        id=id_,
        output=tokens,
        uncertainty=UncertaintyValue(measure, value),
        reference=reference,
        sentence_quality=sentence_bleu(tokens, reference).value,
    )


def _random_rows(rng, count, measure=Measure.BLEUVAR):
    rows = []
    for i in range(count):
        quality = rng.random()
        value = rng.random() * 10
        rows.append(_row(f"id{i:04d}", value, quality, measure, length=rng.randint(1, 60)))
    return rows


class TestRetentionCurve:
    def test_two_row_example(self):
        rows = [
            _row("a", 0.0, 1.0),
            _row("b", 1.0, 0.0),
        ]
        curve = retention_curve(rows, Metric.MEAN_SENT_BLEU, fractions=[0.5, 1.0])
        assert curve.points == ((0.5, 1.0), (1.0, 0.5))

    def test_flat_curve_for_identical_quality(self):
        rows = [_row(f"r{i}", float(i), 0.7) for i in range(10)]
        curve = retention_curve(rows, Metric.MEAN_SENT_BLEU)
        assert all(value == pytest.approx(0.7, abs=1e-12) for _, value in curve.points)

    def test_noninfcreasing_against_bruteforce_oracle(self):
        # Quality 1 - noise and uncertainty = noise: sorting by uncertainty
        # is sorting by quality descending, so prefix means can't increase.
        rng = random.Random(91)
        rows = []
        for i in range(20):
            noise = rng.random()
            rows.append(_row(f"s{i:03d}", noise, 1.0 - noise))
        fractions = [0.1, 0.25, 0.5, 0.75, 1.0]
        curve = retention_curve(rows, Metric.MEAN_SENT_BLEU, fractions)
        values = [v for _, v in curve.points]
        assert all(a >= b for a, b in zip(values, values[1:]))
        # Brute-force: sort by (uncertainty, id) and average prefixes.
        ordered = sorted(rows, key=lambda r: (r.uncertainty.value, r.id))
        for fraction, value in curve.points:
            kept = math.ceil(fraction * len(ordered))
            expected = sum(r.sentence_quality for r in ordered[:kept]) / kept
            assert value == pytest.approx(expected, abs=1e-12)

    def test_bs_rows_sort_descending_by_value(self):
        # Higher BS = more confident, so the -1.0 row is kept first.
        rows = [
            _matched_row("a", -5.0, ("x", "y"), ("p", "q"), Measure.BS),
            _matched_row("b", -1.0, ("p", "q"), ("p", "q"), Measure.BS),
        ]
        curve = retention_curve(rows, Metric.MEAN_SENT_BLEU, fractions=[0.5, 1.0])
        assert curve.points[0][1] == 1.0

    def test_input_order_invariance(self):
        rng = random.Random(5)
        rows = _random_rows(rng, 30)
        shuffled = rows[:]
        rng.shuffle(shuffled)
        assert retention_curve(rows, Metric.MEAN_SENT_BLEU) == retention_curve(
            shuffled, Metric.MEAN_SENT_BLEU
        )

    def test_uncertainty_ties_broken_by_id(self):
        rows = [
            _row("b", 1.0, 0.2),
            _row("a", 1.0, 0.8),
        ]
        curve = retention_curve(rows, Metric.MEAN_SENT_BLEU, fractions=[0.5, 1.0])
        # Tie on uncertainty: id "a" sorts first.
        assert curve.points[0][1] == 0.8

    def test_mixed_measures_rejected(self):
        rows = [_row("a", 1.0, 0.5), _row("b", -1.0, 0.5, Measure.BS)]
        with pytest.raises(ValueError, match="mix"):
            retention_curve(rows, Metric.MEAN_SENT_BLEU)

    def test_empty_rows_rejected(self):
        with pytest.raises(ValueError):
            retention_curve([], Metric.MEAN_SENT_BLEU)

    def test_missing_reference_rejected(self):
        row = ScoredSentence(
            id="x", output=("a",), uncertainty=UncertaintyValue(Measure.BLEUVAR, 1.0)
        )
        with pytest.raises(ValueError, match="reference"):
            retention_curve([row], Metric.MEAN_SENT_BLEU)

    def test_bad_fractions_rejected(self):
        rows = [_row("a", 1.0, 0.5)]
        for bad in ([0.0, 1.0], [-0.5], [1.5]):
            with pytest.raises(ValueError):
                retention_curve(rows, Metric.MEAN_SENT_BLEU, bad)

    def test_final_fraction_always_one(self):
        rows = [_row(f"r{i}", float(i), 0.5) for i in range(4)]
        curve = retention_curve(rows, Metric.MEAN_SENT_BLEU, fractions=[0.25, 0.5])
        assert curve.points[-1][0] == 1.0

    def test_endpoint_identity_exact_across_orderings(self):
        rng = random.Random(17)
        rows = _random_rows(rng, 40)
        curves = [
            retention_curve(rows, Metric.MEAN_SENT_BLEU),
            baseline_orderings(rows, Ordering.SENT_LENGTH, Metric.MEAN_SENT_BLEU),
            baseline_orderings(rows, Ordering.RANDOM, Metric.MEAN_SENT_BLEU, seed=3),
        ]
        finals = {curve.points[-1][1] for curve in curves}
        assert len(finals) == 1

    def test_oracle_ordering_dominance(self):
        rng = random.Random(23)
        rows = _random_rows(rng, 100)
        best_first = sorted(rows, key=lambda r: (-r.sentence_quality, r.id))
        worst_first = list(reversed(best_first))
        best = curve_for_ordered_rows("best", best_first, Metric.MEAN_SENT_BLEU)
        worst = curve_for_ordered_rows("worst", worst_first, Metric.MEAN_SENT_BLEU)
        for (f1, v1), (f2, v2) in zip(best.points, worst.points):
            assert f1 == f2
            assert v1 >= v2


class TestBaselineOrderings:
    def test_random_is_deterministic_per_seed(self):
        rows = _random_rows(random.Random(2), 25)
        one = baseline_orderings(rows, Ordering.RANDOM, Metric.MEAN_SENT_BLEU, seed=99)
        two = baseline_orderings(rows, Ordering.RANDOM, Metric.MEAN_SENT_BLEU, seed=99)
        assert one == two
        other = baseline_orderings(rows, Ordering.RANDOM, Metric.MEAN_SENT_BLEU, seed=100)
        assert other.points != one.points or other.measure != one.measure

    def test_random_requires_seed(self):
        rows = [_row("a", 1.0, 0.5)]
        with pytest.raises(ValueError, match="seed"):
            baseline_orderings(rows, Ordering.RANDOM, Metric.MEAN_SENT_BLEU)

    def test_sent_length_orders_shortest_first(self):
        rows = [
            _row("long", 0.0, 0.1, length=40),
            _row("short", 5.0, 0.9, length=2),
        ]
        curve = baseline_orderings(rows, Ordering.SENT_LENGTH, Metric.MEAN_SENT_BLEU, [0.5, 1.0])
        assert curve.points[0][1] == 0.9
        assert curve.measure == "SENT_LENGTH"

    def test_uncertainty_delegates(self):
        rows = _random_rows(random.Random(8), 12)
        assert baseline_orderings(rows, Ordering.UNCERTAINTY, Metric.MEAN_SENT_BLEU) == (
            retention_curve(rows, Metric.MEAN_SENT_BLEU)
        )

    def test_random_input_order_invariance(self):
        rows = _random_rows(random.Random(31), 20)
        shuffled = rows[:]
        random.Random(1).shuffle(shuffled)
        assert baseline_orderings(
            rows, Ordering.RANDOM, Metric.MEAN_SENT_BLEU, seed=7
        ) == baseline_orderings(shuffled, Ordering.RANDOM, Metric.MEAN_SENT_BLEU, seed=7)


class TestHistogram:
    def test_single_population_single_value(self):
        report = histogram([("pop", 4.2)] * 6, bins=3)
        assert sum(report.counts["pop"]) == 6
        assert sum(1 for c in report.counts["pop"] if c > 0) == 1

    def test_two_separated_populations(self):
        values = [("low", 0.1)] * 5 + [("high", 0.9)] * 5
        report = histogram(values, bins=2)
        assert report.counts["low"] == (5, 0)
        assert report.counts["high"] == (0, 5)
        assert report.bin_edges == (0.1, 0.5, 0.9)

    def test_counts_match_direct_binning_oracle(self):
        rng = random.Random(12)
        values = [("a", rng.gauss(1.0, 0.3)) for _ in range(200)]
        values += [("b", rng.gauss(3.0, 0.5)) for _ in range(150)]
        report = histogram(values, bins=9)
        for label in ("a", "b"):
            population = [v for lab, v in values if lab == label]
            expected = bin_counts_ref(population, list(report.bin_edges))
            assert list(report.counts[label]) == expected

    def test_counts_sum_to_population_sizes(self):
        values = [("x", 0.5), ("x", 1.5), ("y", 2.5)]
        report = histogram(values, bins=4)
        assert sum(report.counts["x"]) == 2
        assert sum(report.counts["y"]) == 1

    def test_edges_cover_all_values(self):
        values = [("p", v) for v in (-3.0, 0.0, 7.5)]
        report = histogram(values, bins=5)
        assert report.bin_edges[0] == -3.0
        assert report.bin_edges[-1] == 7.5

    def test_within_population_permutation_invariance(self):
        rng = random.Random(3)
        values = [("p", rng.random()) for _ in range(40)]
        shuffled = values[:]
        rng.shuffle(shuffled)
        assert histogram(values, bins=6) == histogram(shuffled, bins=6)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            histogram([], bins=2)

    def test_bad_bins_rejected(self):
        with pytest.raises(ValueError):
            histogram([("p", 1.0)], bins=0)


class TestOodSeparation:
    def test_perfect_separation(self):
        assert ood_separation([1.0, 2.0], [3.0, 4.0]) == 1.0

    def test_all_ties_is_half(self):
        assert ood_separation([5.0, 5.0], [5.0, 5.0]) == 0.5

    def test_interleaved(self):
        assert ood_separation([1.0, 3.0], [2.0, 4.0]) == 0.75

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            ood_separation([], [1.0])
        with pytest.raises(ValueError):
            ood_separation([1.0], [])

    @given(
        st.lists(st.floats(min_value=-100, max_value=100), min_size=1, max_size=30),
        st.lists(st.floats(min_value=-100, max_value=100), min_size=1, max_size=30),
    )
    @settings(max_examples=200)
    def test_matches_all_pairs_oracle(self, in_dist, ood):
        assert ood_separation(in_dist, ood) == pytest.approx(
            auroc_ref(in_dist, ood), abs=1e-12
        )

    @given(
        st.lists(st.floats(min_value=-10, max_value=10), min_size=1, max_size=20),
        st.lists(st.floats(min_value=-10, max_value=10), min_size=1, max_size=20),
    )
    @settings(max_examples=200)
    def test_population_swap_reflects(self, in_dist, ood):
        forward = ood_separation(in_dist, ood)
        assert 0.0 <= forward <= 1.0
        assert ood_separation(ood, in_dist) == pytest.approx(1.0 - forward, abs=1e-12)


class TestLengthBins:
    def test_single_bin_occupied(self):
        rows = [_row(f"r{i}", 1.0, 0.5, length=5) for i in range(3)]
        table = length_bins(rows)
        assert table[0].label == "1-10"
        assert table[0].count == 3
        assert table[0].mean_uncertainty == pytest.approx(100.0)
        assert all(b.count == 0 and b.mean_uncertainty is None for b in table[1:])

    def test_two_bins(self):
        rows = [
            _row("a", 2.0, 0.5, length=5),
            _row("b", 4.0, 0.5, length=25),
        ]
        table = {b.label: b for b in length_bins(rows)}
        assert table["1-10"].mean_uncertainty == pytest.approx(200.0)
        assert table["21-30"].mean_uncertainty == pytest.approx(400.0)
        assert table["11-20"].count == 0

    def test_51_plus_is_open_ended(self):
        rows = [_row("a", 1.0, 0.5, length=400)]
        table = length_bins(rows)
        assert table[-1].label == "51+"
        assert table[-1].count == 1

    def test_matches_group_by_oracle(self):
        rng = random.Random(77)
        rows = _random_rows(rng, 120)
        table = {b.label: b for b in length_bins(rows)}
        edges = [(1, 10), (11, 20), (21, 30), (31, 40), (41, 50), (51, None)]
        for lo, hi in edges:
            members = [
                display_value(r.uncertainty)
                for r in rows
                if len(r.output) <= (hi if hi is not None else 10**9)
                and (lo == 1 or len(r.output) >= lo)
            ]
            label = f"{lo}-{hi}" if hi is not None else f"{lo}+"
            assert table[label].count == len(members)
            if members:
                assert table[label].mean_uncertainty == pytest.approx(
                    sum(members) / len(members), rel=1e-12
                )


class TestDensityPairs:
    def test_single_row(self):
        rows = [_matched_row("a", 0.0, ("x", "y"), ("x", "y"))]
        assert density_pairs(rows) == ((0.0, 100.0),)

    def test_sorted_by_uncertainty(self):
        rows = [
            _row("b", 3.0, 0.2),
            _row("a", 1.0, 0.9),
        ]
        pairs = density_pairs(rows)
        assert pairs == ((100.0, 90.0), (300.0, 20.0))

    def test_requires_references(self):
        row = ScoredSentence(
            id="x", output=("a",), uncertainty=UncertaintyValue(Measure.BLEUVAR, 1.0)
        )
        with pytest.raises(ValueError):
            density_pairs([row])


class TestDisplayScaling:
    def test_bleuvar_scales_by_100(self):
        assert display_value(UncertaintyValue(Measure.BLEUVAR, 90.0)) == 9000.0

    def test_bs_sp_pass_through(self):
        assert display_value(UncertaintyValue(Measure.BS, -4.5)) == -4.5
        assert display_value(UncertaintyValue(Measure.SP, -2.5)) == -2.5

    def test_quality_scales_by_100(self):
        assert display_quality(0.37) == 37.0
