"""Walk through the three uncertainty measures on a tiny hand-built example.

A stochastic decoder (dropout left on at inference) produces N alternative
decodes of each source sentence.  When the model knows what it is doing the
decodes agree; when it is guessing they scatter.  This script builds two
such sample sets by hand, one confident and one confused, and scores both
with every measure.

Run:  python demos/uncertainty_measures.py
"""

from seqcert import (
    Hypothesis,
    Measure,
    SampleSet,
    bleuvar,
    medoid_select,
    score_sample_set,
    sentence_bleu,
    tokenize,
)

confident = SampleSet(
    id="confident",
    source="nevada hat bereits ein pilotprojekt abgeschlossen .",
    samples=tuple(
        Hypothesis(tokenize("nevada has already completed a pilot project ."), logprob=lp)
        for lp in (-0.61, -0.64, -0.60, -0.66, -0.62)
    ),
    deterministic=Hypothesis(
        tokenize("nevada has already completed a pilot project ."), logprob=-0.58
    ),
    reference=tokenize("nevada has already completed a pilot ."),
)

confused = SampleSet(
    id="confused",
    source="de debiteurenlanden zouden hun concurrentiekracht terugkrijgen .",
    samples=(
        Hypothesis(tokenize("the debtor countries would regain their competitiveness ."), -9.1),
        Hypothesis(tokenize("the debit lands were to compete with rivals again ."), -14.8),
        Hypothesis(tokenize("in the lands of debt the rivalry was regained ."), -16.2),
        Hypothesis(tokenize("the countries in debt would their competition strength get back ."), -13.5),
        Hypothesis(tokenize("debit debit the lands rival rival of the run ."), -21.0),
    ),
    deterministic=Hypothesis(
        tokenize("the debtor countries would regain their competitiveness ."), logprob=-8.4
    ),
    reference=tokenize("debtor countries would regain their competitiveness ."),
)

for sample_set in (confident, confused):
    print(f"=== {sample_set.id} ===")
    print(f"source: {sample_set.source}")
    for measure in Measure:
        row = score_sample_set(sample_set, measure)
        print(f"  {measure.value:8s} value={row.uncertainty.value:10.4f}  "
              f"output={' '.join(row.output)}")
    index, output = medoid_select(sample_set.sample_tokens)
    print(f"  medoid is sample #{index}")
    print(f"  quality of medoid vs reference: "
          f"{sentence_bleu(output, sample_set.reference).display:.1f} (BLEU x100)")
    spread = bleuvar(sample_set.sample_tokens)
    n = len(sample_set.samples)
    print(f"  BLEUVar {spread.value:.3f} of max {n * (n - 1)} "
          f"(display {spread.value * 100:.0f})")
    print()

print("Higher BS/SP means more confident; higher BLEUVar means more uncertain.")
print("Note how the confused set's samples disagree and its BLEUVar explodes,")
print("while BS barely separates the two (its logprob scale is model-relative).")
