/**
 * Training loop: per-example Adam over teacher-forced cross-entropy,
 * fixed data regenerated per seed, masks redrawn per example.
 */

import * as fs from "fs";

import { Seq2SeqModel, SerializedModel, TGT_WORD_BASE } from "./model";
import { Rng, deriveSeed } from "./rng";
import { ResolvedTask, ToyTask, makeExamples, resolveTask } from "./tasks";

export interface Checkpoint {
  task: ResolvedTask;
  model: SerializedModel;
  epochLosses: number[];
}

export interface TrainResult {
  model: Seq2SeqModel;
  task: ResolvedTask;
  epochLosses: number[];
}

export function train(taskInput: ToyTask, onEpoch?: (epoch: number, loss: number) => void): TrainResult {
  const task = resolveTask(taskInput);
  const model = new Seq2SeqModel({
    srcVocab: task.vocabWords + task.oodWords,
    tgtVocab: TGT_WORD_BASE + task.vocabWords,
    dModel: task.dModel,
    maxLen: task.maxLen,
    dropout: task.dropout,
    seed: task.seed,
  });

  const examples = makeExamples(task, task.trainSize, 0);
  const shuffleRng = new Rng(deriveSeed(task.seed, 0x5ff1e));
  const maskRng = new Rng(deriveSeed(task.seed, 0xd20b));

  const epochLosses: number[] = [];
  const order = examples.map((_, i) => i);
  for (let epoch = 0; epoch < task.epochs; epoch++) {
    shuffleRng.shuffle(order);
    let total = 0;
    for (const index of order) {
      total += model.trainStep(examples[index], model.drawMasks(maskRng), task.learningRate);
    }
    const mean = total / order.length;
    epochLosses.push(mean);
    if (onEpoch) onEpoch(epoch, mean);
  }
  return { model, task, epochLosses };
}

export function saveCheckpoint(result: TrainResult, path: string): void {
  const checkpoint: Checkpoint = {
    task: result.task,
    model: result.model.serialize(),
    epochLosses: result.epochLosses,
  };
  fs.writeFileSync(path, JSON.stringify(checkpoint) + "\n", "utf-8");
}

export function loadCheckpoint(path: string): { model: Seq2SeqModel; task: ResolvedTask } {
  const checkpoint = JSON.parse(fs.readFileSync(path, "utf-8")) as Checkpoint;
  return { model: Seq2SeqModel.deserialize(checkpoint.model), task: checkpoint.task };
}

/** Exact-match rate of dropout-off greedy decodes against gold targets. */
export function exactMatchRate(model: Seq2SeqModel, examples: { src: number[]; tgt: number[] }[]): number {
  let hits = 0;
  for (const example of examples) {
    const decoded = model.decode(example.src, null);
    if (
      decoded.tokens.length === example.tgt.length &&
      decoded.tokens.every((t, i) => t === example.tgt[i])
    ) {
      hits += 1;
    }
  }
  return hits / examples.length;
}
