/**
 * Sample-file emission: N stochastic decodes per source under fresh
 * dropout masks, plus the dropout-off deterministic decode, serialized
 * as the JSONL contract the evaluation toolkit consumes.
 */

import * as fs from "fs";

import { Decoded, MaskPair, Seq2SeqModel } from "./model";
import { Rng, deriveSeed } from "./rng";
import { ResolvedTask, srcWord, tgtWord } from "./tasks";

export interface SampleRecordInput {
  id: string;
  src: number[];
  /** Gold target ids (model space), optional; becomes the reference field. */
  reference?: number[];
}

function decodedToJson(decoded: Decoded): { tokens: string[]; logprob: number } {
  return {
    tokens: decoded.tokens.map(tgtWord),
    logprob: decoded.logprob,
  };
}

/**
 * Decode every source N times under independently drawn mask pairs
 * (plus once deterministically) and return one JSONL line per source.
 * Mask streams derive from (seed, source index, sample index), so output
 * is reproducible byte-for-byte.
 */
export function sampleDecodeLines(
  model: Seq2SeqModel,
  task: ResolvedTask,
  records: SampleRecordInput[],
  numSamples: number,
  seed: number
): string[] {
  if (numSamples < 2) {
    throw new Error(`numSamples must be >= 2, got ${numSamples}`);
  }
  const lines: string[] = [];
  for (let r = 0; r < records.length; r++) {
    const record = records[r];
    const samples = [];
    for (let s = 0; s < numSamples; s++) {
      const maskRng = new Rng(deriveSeed(seed, r, s));
      samples.push(decodedToJson(model.decode(record.src, model.drawMasks(maskRng))));
    }
    const line: Record<string, unknown> = {
      id: record.id,
      source: record.src.map((w) => srcWord(w, task)).join(" "),
      samples,
      deterministic: decodedToJson(model.decode(record.src, null)),
    };
    if (record.reference && record.reference.length > 0) {
      line.reference = record.reference.map(tgtWord).join(" ");
    }
    lines.push(JSON.stringify(line));
  }
  return lines;
}

export function writeSampleFile(lines: string[], path: string): void {
  fs.writeFileSync(path, lines.map((l) => l + "\n").join(""), "utf-8");
}

/** Predictive-mean decode: averages N dropout-sampled distributions per step. */
export function meanDecodeTokens(
  model: Seq2SeqModel,
  src: number[],
  numSamples: number,
  seed: number
): string[] {
  const maskPairs: MaskPair[] = [];
  for (let s = 0; s < numSamples; s++) {
    maskPairs.push(model.drawMasks(new Rng(deriveSeed(seed, 0, s))));
  }
  return model.meanDecode(src, maskPairs).map(tgtWord);
}
