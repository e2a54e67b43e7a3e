"""seqcert: sequence-level uncertainty measures and selective-prediction
evaluation for machine translation outputs."""

from ._version import __version__
from .bleu import (
    BleuScore,
    NGramProfile,
    TokenSeq,
    corpus_bleu,
    detokenize,
    length_penalty,
    sentence_bleu,
    tokenize,
)
from .uncertainty import (
    Hypothesis,
    Measure,
    MissingFieldError,
    SampleSet,
    ScoredSentence,
    UncertaintyValue,
    beam_score,
    bleuvar,
    medoid_select,
    pairwise_bleu_matrix,
    score_sample_set,
    sequence_probability,
)
from .harness import (
    DEFAULT_FRACTIONS,
    HistogramReport,
    LengthBin,
    Metric,
    Ordering,
    RetentionCurve,
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
from .dataio import (
    DataError,
    ReportBundle,
    RunManifest,
    iter_sample_file,
    read_parallel_corpus,
    read_sample_file,
    validate_sample_file,
    write_reports,
    write_sample_file,
)
from .simulate import SimConfig, simulate

__all__ = [
    "__version__",
    "BleuScore",
    "NGramProfile",
    "TokenSeq",
    "corpus_bleu",
    "detokenize",
    "length_penalty",
    "sentence_bleu",
    "tokenize",
    "Hypothesis",
    "Measure",
    "MissingFieldError",
    "SampleSet",
    "ScoredSentence",
    "UncertaintyValue",
    "beam_score",
    "bleuvar",
    "medoid_select",
    "pairwise_bleu_matrix",
    "score_sample_set",
    "sequence_probability",
    "DEFAULT_FRACTIONS",
    "HistogramReport",
    "LengthBin",
    "Metric",
    "Ordering",
    "RetentionCurve",
    "baseline_orderings",
    "curve_for_ordered_rows",
    "density_pairs",
    "display_quality",
    "display_value",
    "histogram",
    "length_bins",
    "ood_separation",
    "retention_curve",
    "DataError",
    "ReportBundle",
    "RunManifest",
    "iter_sample_file",
    "read_parallel_corpus",
    "read_sample_file",
    "validate_sample_file",
    "write_reports",
    "write_sample_file",
    "SimConfig",
    "simulate",
]
