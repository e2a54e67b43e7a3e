/**
 * Synthetic sequence tasks over a small closed vocabulary.
 *
 * Source words are "s000".."s199" plus a reserved out-of-vocabulary block
 * "o000".."o199" that never occurs in training data; its embedding rows
 * stay at random initialization, which is exactly what makes disjoint-token
 * inputs out-of-distribution for the trained model.
 */

import { Rng, deriveSeed } from "./rng";
import { Example, TGT_WORD_BASE } from "./model";

export type TaskKind = "copy" | "reversal" | "token_map";

export interface ToyTask {
  task: TaskKind;
  trainSize: number;
  dropout: number;
  dModel: number;
  epochs: number;
  seed: number;
  vocabWords?: number;
  oodWords?: number;
  minLen?: number;
  maxLen?: number;
  learningRate?: number;
}

export interface ResolvedTask extends Required<ToyTask> {}

export const DEFAULTS = {
  vocabWords: 200,
  oodWords: 200,
  minLen: 3,
  maxLen: 8,
  learningRate: 3e-3,
};

export function resolveTask(task: ToyTask): ResolvedTask {
  const resolved = { ...DEFAULTS, ...task };
  if (resolved.dropout <= 0 || resolved.dropout >= 1) {
    throw new Error(`dropout must lie in (0, 1), got ${resolved.dropout}`);
  }
  if (resolved.minLen < 1 || resolved.maxLen < resolved.minLen) {
    throw new Error(`bad length range [${resolved.minLen}, ${resolved.maxLen}]`);
  }
  return resolved;
}

export function srcWord(id: number, task: ResolvedTask): string {
  return id < task.vocabWords
    ? `s${String(id).padStart(3, "0")}`
    : `o${String(id - task.vocabWords).padStart(3, "0")}`;
}

export function tgtWord(id: number): string {
  return `t${String(id - TGT_WORD_BASE).padStart(3, "0")}`;
}

/** Deterministic word mapping used by the token_map task. */
export function wordPermutation(task: ResolvedTask): number[] {
  const perm = Array.from({ length: task.vocabWords }, (_, i) => i);
  new Rng(deriveSeed(task.seed, 0x9e37)).shuffle(perm);
  return perm;
}

function mapWords(src: number[], task: ResolvedTask, perm: number[]): number[] {
  switch (task.task) {
    case "copy":
      return src.map((w) => w + TGT_WORD_BASE);
    case "reversal":
      return [...src].reverse().map((w) => w + TGT_WORD_BASE);
    case "token_map":
      return src.map((w) => perm[w] + TGT_WORD_BASE);
  }
}

function randomSource(rng: Rng, task: ResolvedTask, base: number, span: number): number[] {
  const length = task.minLen + rng.int(task.maxLen - task.minLen + 1);
  return Array.from({ length }, () => base + rng.int(span));
}

/**
 * Deterministic example stream: stream 0 is training data, any other
 * stream gives held-out data never seen during training.
 */
export function makeExamples(task: ResolvedTask, count: number, stream: number): Example[] {
  const rng = new Rng(deriveSeed(task.seed, 0xda7a, stream));
  const perm = wordPermutation(task);
  const examples: Example[] = [];
  for (let i = 0; i < count; i++) {
    const src = randomSource(rng, task, 0, task.vocabWords);
    examples.push({ src, tgt: mapWords(src, task, perm) });
  }
  return examples;
}

/** Sources built from the reserved block: disjoint from all training tokens. */
export function makeOodSources(task: ResolvedTask, count: number, stream: number): number[][] {
  const rng = new Rng(deriveSeed(task.seed, 0x00d, stream));
  return Array.from({ length: count }, () =>
    randomSource(rng, task, task.vocabWords, task.oodWords)
  );
}
