"""File contracts: JSONL sample files, parallel corpora, CSV reports, manifests.

Sample files are UTF-8 JSONL, one record per line::

    {
      "id": "sent-00001",                      # unique within the file
      "source": "raw source text",
      "samples": [                             # nonempty
        {"tokens": ["the", "cat"], "logprob": -1.5},   # tokens preferred
        {"text": "the cat"}                            # logprob optional
      ],
      "deterministic": {"tokens": [...], "logprob": -0.7},   # optional
      "reference": "the cat sat"                             # optional
    }

Log-probabilities are natural-log, finite, and <= 0.  Text fields are
tokenized on whitespace.  Parsing is streaming: one record is held at a
time (plus an id -> line map for duplicate detection).

Report CSVs use a mandatory header row, '.' decimal separator, and LF
newlines.  Reruns over identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from ._version import __version__
from .bleu import DEFAULT_MAX_ORDER, SMOOTHING_TAG, TokenSeq, detokenize, tokenize
from .harness import HistogramReport, LengthBin, RetentionCurve, display_quality, display_value
from .uncertainty import Hypothesis, SampleSet, ScoredSentence


class DataError(ValueError):
    """Input file violates a contract; message carries path and line number."""


def _parse_hypothesis(obj: object, path: str, line_no: int, what: str) -> Hypothesis:
    if not isinstance(obj, dict):
        raise DataError(f"{path}:{line_no}: {what} must be an object, got {type(obj).__name__}")
    if "tokens" in obj:
        tokens = obj["tokens"]
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            raise DataError(f"{path}:{line_no}: {what}.tokens must be an array of strings")
        if any(t == "" for t in tokens):
            raise DataError(f"{path}:{line_no}: {what}.tokens must not contain empty strings")
        token_seq: TokenSeq = tuple(tokens)
    elif "text" in obj:
        text = obj["text"]
        if not isinstance(text, str):
            raise DataError(f"{path}:{line_no}: {what}.text must be a string")
        token_seq = tokenize(text)
    else:
        raise DataError(f"{path}:{line_no}: {what} needs either 'tokens' or 'text'")

    logprob = obj.get("logprob")
    if logprob is not None:
        if isinstance(logprob, bool) or not isinstance(logprob, (int, float)):
            raise DataError(f"{path}:{line_no}: {what}.logprob must be a number")
        logprob = float(logprob)
        if not math.isfinite(logprob):
            raise DataError(f"{path}:{line_no}: {what}.logprob must be finite")
        if logprob > 0:
            raise DataError(
                f"{path}:{line_no}: {what}.logprob must be <= 0 "
                f"(got {logprob}; probabilities cannot exceed 1)"
            )
    return Hypothesis(tokens=token_seq, logprob=logprob)


def _parse_record(record: object, path: str, line_no: int) -> SampleSet:
    if not isinstance(record, dict):
        raise DataError(f"{path}:{line_no}: record must be a JSON object")
    record_id = record.get("id")
    if not isinstance(record_id, str) or not record_id:
        raise DataError(f"{path}:{line_no}: record needs a nonempty string 'id'")
    source = record.get("source")
    if not isinstance(source, str):
        raise DataError(f"{path}:{line_no}: record {record_id!r} needs a string 'source'")
    samples = record.get("samples")
    if not isinstance(samples, list) or len(samples) == 0:
        raise DataError(
            f"{path}:{line_no}: record {record_id!r} needs a nonempty 'samples' array"
        )
    hypotheses = tuple(
        _parse_hypothesis(s, path, line_no, f"samples[{k}]") for k, s in enumerate(samples)
    )
    deterministic = None
    if record.get("deterministic") is not None:
        deterministic = _parse_hypothesis(record["deterministic"], path, line_no, "deterministic")
    reference = None
    if record.get("reference") is not None:
        ref_text = record["reference"]
        if not isinstance(ref_text, str):
            raise DataError(f"{path}:{line_no}: record {record_id!r} reference must be a string")
        reference = tokenize(ref_text)
        if len(reference) == 0:
            raise DataError(f"{path}:{line_no}: record {record_id!r} has an empty reference")
    return SampleSet(
        id=record_id,
        source=source,
        samples=hypotheses,
        deterministic=deterministic,
        reference=reference,
    )


def iter_sample_file(path: str | Path) -> Iterator[SampleSet]:
    """Stream sample sets out of a JSONL file, one line at a time.

    Raises :class:`DataError` with the offending line number on malformed
    JSON, schema violations, duplicate ids, or positive logprobs.
    """
    path = Path(path)
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, 1):
            if line.strip() == "":
                raise DataError(f"{path}:{line_no}: blank line (expected one JSON object per line)")
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{line_no}: malformed JSON: {exc.msg}") from exc
            sample_set = _parse_record(record, str(path), line_no)
            if sample_set.id in seen:
                raise DataError(
                    f"{path}:{line_no}: duplicate id {sample_set.id!r} "
                    f"(first seen on line {seen[sample_set.id]})"
                )
            seen[sample_set.id] = line_no
            yield sample_set


def read_sample_file(path: str | Path) -> list[SampleSet]:
    """Parse a whole JSONL sample file; see :func:`iter_sample_file`."""
    return list(iter_sample_file(path))


def validate_sample_file(path: str | Path) -> list[str]:
    """Collect every contract violation in the file (empty list = valid).

    Unlike :func:`read_sample_file` this does not stop at the first error;
    each bad line contributes one message and parsing continues.
    """
    path = Path(path)
    errors: list[str] = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, 1):
            if line.strip() == "":
                errors.append(f"{path}:{line_no}: blank line (expected one JSON object per line)")
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                errors.append(f"{path}:{line_no}: malformed JSON: {exc.msg}")
                continue
            try:
                sample_set = _parse_record(record, str(path), line_no)
            except DataError as exc:
                errors.append(str(exc))
                continue
            if sample_set.id in seen:
                errors.append(
                    f"{path}:{line_no}: duplicate id {sample_set.id!r} "
                    f"(first seen on line {seen[sample_set.id]})"
                )
            else:
                seen[sample_set.id] = line_no
    return errors


def _hypothesis_to_json(hypothesis: Hypothesis) -> dict:
    obj: dict = {"tokens": list(hypothesis.tokens)}
    if hypothesis.logprob is not None:
        obj["logprob"] = hypothesis.logprob
    return obj


def write_sample_file(sample_sets: Iterable[SampleSet], path: str | Path) -> None:
    """Write sample sets as JSONL; inverse of :func:`read_sample_file`."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for sample_set in sample_sets:
            record: dict = {
                "id": sample_set.id,
                "source": sample_set.source,
                "samples": [_hypothesis_to_json(h) for h in sample_set.samples],
            }
            if sample_set.deterministic is not None:
                record["deterministic"] = _hypothesis_to_json(sample_set.deterministic)
            if sample_set.reference is not None:
                record["reference"] = detokenize(sample_set.reference)
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_parallel_corpus(
    src_path: str | Path, ref_path: str | Path
) -> list[tuple[str, str]]:
    """Pair line i of the source file with line i of the reference file.

    Line counts must match; empty reference lines are errors.
    """
    src_path, ref_path = Path(src_path), Path(ref_path)
    src_lines = src_path.read_text(encoding="utf-8").splitlines()
    ref_lines = ref_path.read_text(encoding="utf-8").splitlines()
    if len(src_lines) != len(ref_lines):
        raise DataError(
            f"line count mismatch: {src_path} has {len(src_lines)} lines, "
            f"{ref_path} has {len(ref_lines)}"
        )
    for line_no, ref in enumerate(ref_lines, 1):
        if ref.strip() == "":
            raise DataError(f"{ref_path}:{line_no}: empty reference line")
    return list(zip(src_lines, ref_lines))


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run, written beside every report."""

    measure: str | None = None
    n_samples: int | None = None
    seed: int | None = None
    smoothing: str = SMOOTHING_TAG
    max_order: int = DEFAULT_MAX_ORDER
    tool_version: str = __version__

    def to_json(self) -> dict:
        return {
            "measure": self.measure,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "smoothing": self.smoothing,
            "max_order": self.max_order,
            "tool_version": self.tool_version,
        }


@dataclass(frozen=True)
class ReportBundle:
    """Everything one evaluation run wants on disk."""

    manifest: RunManifest
    curves: tuple[RetentionCurve, ...] = ()
    histogram: HistogramReport | None = None
    length_bins: tuple[LengthBin, ...] | None = None
    density: tuple[tuple[float, float], ...] | None = None


def _open_csv(path: Path):
    handle = open(path, "w", encoding="utf-8", newline="")
    return handle, csv.writer(handle, lineterminator="\n")


def _fmt(value: float) -> str:
    return repr(float(value))


def write_manifest(manifest: RunManifest, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(
        json.dumps(manifest.to_json(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return path


def write_scored_csv(rows: Sequence[ScoredSentence], path: str | Path) -> Path:
    """Per-sentence CSV: id, output text, display uncertainty, display quality."""
    path = Path(path)
    handle, writer = _open_csv(path)
    with handle:
        writer.writerow(["id", "output", "uncertainty", "quality"])
        for row in rows:
            quality = (
                _fmt(display_quality(row.sentence_quality))
                if row.sentence_quality is not None
                else ""
            )
            writer.writerow([row.id, detokenize(row.output), _fmt(display_value(row.uncertainty)), quality])
    return path


def write_reports(bundle: ReportBundle, out_dir: str | Path) -> Path:
    """Write every populated part of the bundle as CSV plus the manifest.

    Existing files are overwritten; identical bundles produce byte-identical
    files.  Returns the manifest path.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if bundle.curves:
        handle, writer = _open_csv(out_dir / "retention.csv")
        with handle:
            writer.writerow(["measure", "fraction", "metric", "value"])
            for curve in bundle.curves:
                for fraction, value in curve.points:
                    writer.writerow([curve.measure, _fmt(fraction), curve.metric.value, _fmt(value)])

    if bundle.histogram is not None:
        handle, writer = _open_csv(out_dir / "histogram.csv")
        with handle:
            writer.writerow(["population", "bin_lo", "bin_hi", "count"])
            edges = bundle.histogram.bin_edges
            for population, counts in bundle.histogram.counts.items():
                for index, count in enumerate(counts):
                    writer.writerow(
                        [population, _fmt(edges[index]), _fmt(edges[index + 1]), count]
                    )

    if bundle.length_bins is not None:
        handle, writer = _open_csv(out_dir / "length_bins.csv")
        with handle:
            writer.writerow(["bin", "count", "mean_uncertainty"])
            for bin_row in bundle.length_bins:
                mean = _fmt(bin_row.mean_uncertainty) if bin_row.mean_uncertainty is not None else ""
                writer.writerow([bin_row.label, bin_row.count, mean])

    if bundle.density is not None:
        handle, writer = _open_csv(out_dir / "density.csv")
        with handle:
            writer.writerow(["uncertainty", "quality"])
            for uncertainty, quality in bundle.density:
                writer.writerow([_fmt(uncertainty), _fmt(quality)])

    return write_manifest(bundle.manifest, out_dir / "manifest.json")
