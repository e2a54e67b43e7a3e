"""Command-line surface: score, retention, histogram, bins, separation,
simulate, validate.

Exit codes: 0 success, 1 usage error, 2 data/contract error.  stdout is
reserved for single-scalar answers (separation's AUROC); logs and
diagnostics go to stderr, so the tool composes in pipelines.  Display
scaling (x100 for BLEU and BLEUVAR) happens only at this layer and in the
report writers; library values stay in [0, 1] units.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from ._version import __version__
from . import dataio
from .harness import (
    DEFAULT_FRACTIONS,
    Metric,
    Ordering,
    density_pairs,
    histogram,
    length_bins,
    ood_separation,
    retention_curve,
    baseline_orderings,
)
from .simulate import SimConfig, simulate
from .uncertainty import Measure, score_sample_set

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

_MEASURES = {"bs": Measure.BS, "sp": Measure.SP, "bleuvar": Measure.BLEUVAR}
_METRICS = {"corpus": Metric.CORPUS_BLEU, "mean": Metric.MEAN_SENT_BLEU}
_ORDERINGS = {
    "uncertainty": Ordering.UNCERTAINTY,
    "length": Ordering.SENT_LENGTH,
    "random": Ordering.RANDOM,
}


class UsageError(Exception):
    """Bad flag combination detected after parsing."""


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _env_seed() -> int | None:
    raw = os.environ.get("SEQCERT_SEED")
    return int(raw) if raw else None


def _score_file(path: str, measure: Measure):
    rows = [score_sample_set(s, measure) for s in dataio.iter_sample_file(path)]
    if not rows:
        raise dataio.DataError(f"{path}: no records")
    return rows


def _uniform_sample_count(path: str) -> int | None:
    counts = {len(s.samples) for s in dataio.iter_sample_file(path)}
    return counts.pop() if len(counts) == 1 else None


def _manifest(measure: Measure | None, path: str | None, seed: int | None) -> dataio.RunManifest:
    return dataio.RunManifest(
        measure=measure.value if measure else None,
        n_samples=_uniform_sample_count(path) if path else None,
        seed=seed,
    )


def cmd_score(args) -> int:
    measure = _MEASURES[args.measure]
    rows = _score_file(args.samples, measure)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataio.write_scored_csv(rows, out_dir / "scores.csv")
    dataio.write_manifest(_manifest(measure, args.samples, None), out_dir / "manifest.json")
    print(f"wrote {out_dir / 'scores.csv'} ({len(rows)} rows)", file=sys.stderr)
    return EXIT_OK


def _parse_fractions(raw: str | None):
    if raw is None:
        return DEFAULT_FRACTIONS
    try:
        return tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise UsageError(f"--fractions must be a comma-separated float list: {exc}") from exc


def cmd_retention(args) -> int:
    measure = _MEASURES[args.measure]
    ordering = _ORDERINGS[args.ordering]
    fractions = _parse_fractions(args.fractions)
    seed = args.seed if args.seed is not None else _env_seed()
    if ordering is Ordering.RANDOM and seed is None:
        raise UsageError("--ordering random needs --seed (or SEQCERT_SEED)")
    rows = _score_file(args.samples, measure)
    if ordering is Ordering.UNCERTAINTY:
        curve = retention_curve(rows, _METRICS[args.metric], fractions)
    else:
        curve = baseline_orderings(rows, ordering, _METRICS[args.metric], fractions, seed=seed)
    bundle = dataio.ReportBundle(
        manifest=_manifest(measure, args.samples, seed if ordering is Ordering.RANDOM else None),
        curves=(curve,),
    )
    manifest_path = dataio.write_reports(bundle, args.out)
    print(f"wrote {Path(args.out) / 'retention.csv'}", file=sys.stderr)
    return EXIT_OK


def cmd_histogram(args) -> int:
    measure = _MEASURES[args.measure]
    populations: list[tuple[str, str]] = []
    for part in args.populations.split(","):
        label, sep, path = part.partition("=")
        if not sep or not label or not path:
            raise UsageError(f"--populations entries must look like LABEL=FILE, got {part!r}")
        populations.append((label, path))
    values = []
    for label, path in populations:
        for row in _score_file(path, measure):
            values.append((label, row.uncertainty.as_uncertainty()))
    report = histogram(values, args.bins)
    bundle = dataio.ReportBundle(manifest=_manifest(measure, None, None), histogram=report)
    dataio.write_reports(bundle, args.out)
    print(f"wrote {Path(args.out) / 'histogram.csv'}", file=sys.stderr)
    return EXIT_OK


def cmd_bins(args) -> int:
    measure = _MEASURES[args.measure]
    rows = _score_file(args.samples, measure)
    bundle = dataio.ReportBundle(
        manifest=_manifest(measure, args.samples, None), length_bins=length_bins(rows)
    )
    dataio.write_reports(bundle, args.out)
    print(f"wrote {Path(args.out) / 'length_bins.csv'}", file=sys.stderr)
    return EXIT_OK


def cmd_separation(args) -> int:
    measure = _MEASURES[args.measure]
    in_values = [r.uncertainty.as_uncertainty() for r in _score_file(args.in_file, measure)]
    ood_values = [r.uncertainty.as_uncertainty() for r in _score_file(args.ood_file, measure)]
    print(repr(ood_separation(in_values, ood_values)))
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.config:
        config = SimConfig.from_json(args.config)
    else:
        seed = args.seed if args.seed is not None else _env_seed()
        if seed is None:
            raise UsageError("simulate needs --seed (or SEQCERT_SEED) when no --config is given")
        config = SimConfig(
            vocab_size=args.vocab_size,
            sentence_count=args.sentences,
            length_range=(args.min_length, args.max_length),
            noise_rate=args.noise,
            num_samples=args.samples,
            seed=seed,
            ood_fraction=args.ood_fraction,
        )
    sample_sets = simulate(config)
    dataio.write_sample_file(sample_sets, args.out)
    dataio.write_manifest(
        dataio.RunManifest(measure=None, n_samples=config.num_samples, seed=config.seed),
        Path(args.out).with_suffix(Path(args.out).suffix + ".manifest.json"),
    )
    print(f"wrote {args.out} ({len(sample_sets)} records)", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    errors = dataio.validate_sample_file(args.samples)
    for error in errors:
        print(error, file=sys.stderr)
    if errors:
        print(f"INVALID: {len(errors)} error(s) in {args.samples}")
        return EXIT_DATA
    count = sum(1 for _ in dataio.iter_sample_file(args.samples))
    print(f"OK: {count} record(s) in {args.samples}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="seqcert", description=__doc__)
    parser.add_argument("--version", action="version", version=f"seqcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    score = sub.add_parser("score", help="score every record of a sample file")
    score.add_argument("--measure", required=True, choices=sorted(_MEASURES))
    score.add_argument("--samples", required=True, help="JSONL sample file")
    score.add_argument("--out", default=".", help="output directory (scores.csv + manifest.json)")
    score.set_defaults(func=cmd_score)

    retention = sub.add_parser("retention", help="performance-vs-retention curve")
    retention.add_argument("--measure", required=True, choices=sorted(_MEASURES))
    retention.add_argument("--metric", required=True, choices=sorted(_METRICS))
    retention.add_argument("--samples", required=True)
    retention.add_argument("--fractions", help="comma-separated retained fractions in (0,1]")
    retention.add_argument("--ordering", default="uncertainty", choices=sorted(_ORDERINGS))
    retention.add_argument("--seed", type=int, help="shuffle seed for --ordering random")
    retention.add_argument("--out", default=".")
    retention.set_defaults(func=cmd_retention)

    hist = sub.add_parser("histogram", help="uncertainty histogram over populations")
    hist.add_argument("--populations", required=True, help="LABEL=FILE[,LABEL=FILE...]")
    hist.add_argument("--bins", required=True, type=int)
    hist.add_argument("--measure", default="bleuvar", choices=sorted(_MEASURES))
    hist.add_argument("--out", default=".")
    hist.set_defaults(func=cmd_histogram)

    bins = sub.add_parser("bins", help="mean uncertainty by output length bin")
    bins.add_argument("--samples", required=True)
    bins.add_argument("--measure", default="bleuvar", choices=sorted(_MEASURES))
    bins.add_argument("--out", default=".")
    bins.set_defaults(func=cmd_bins)

    separation = sub.add_parser("separation", help="AUROC between two uncertainty populations")
    separation.add_argument("--in", dest="in_file", required=True, help="in-distribution sample file")
    separation.add_argument("--ood", dest="ood_file", required=True, help="OOD sample file")
    separation.add_argument("--measure", default="bleuvar", choices=sorted(_MEASURES))
    separation.set_defaults(func=cmd_separation)

    sim = sub.add_parser("simulate", help="generate a synthetic sample file")
    sim.add_argument("--config", help="JSON file with SimConfig fields (overrides flags)")
    sim.add_argument("--out", required=True, help="output JSONL path")
    sim.add_argument("--vocab-size", type=int, default=50)
    sim.add_argument("--sentences", type=int, default=100)
    sim.add_argument("--min-length", type=int, default=5)
    sim.add_argument("--max-length", type=int, default=15)
    sim.add_argument("--noise", type=float, default=0.2)
    sim.add_argument("--samples", type=int, default=10, help="stochastic decodes per sentence")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--ood-fraction", type=float, default=0.0)
    sim.set_defaults(func=cmd_simulate)

    validate = sub.add_parser("validate", help="check a sample file against the contract")
    validate.add_argument("--samples", required=True)
    validate.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse printed usage/help already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"seqcert: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"seqcert: error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
