/**
 * Minimal command surface:
 *
 *   node dist/src/cli.js train --config task.json --out model.ckpt.json
 *   node dist/src/cli.js sample --checkpoint model.ckpt.json --count 50 \
 *        --n 10 --seed 5 [--ood] --out samples.jsonl
 *   node dist/src/cli.js mean --checkpoint model.ckpt.json --seed 5 --n 10 \
 *        --source "s001 s002 s003"
 *
 * Task configs are JSON files with the ToyTask fields; checkpoints are
 * internal to this component.  Sample output follows the evaluation
 * toolkit's JSONL contract.
 */

import * as fs from "fs";

import { loadCheckpoint, saveCheckpoint, train } from "./train";
import { ToyTask, makeExamples, makeOodSources } from "./tasks";
import { SampleRecordInput, meanDecodeTokens, sampleDecodeLines, writeSampleFile } from "./sample";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) throw new Error(`unexpected argument ${arg}`);
    const name = arg.slice(2);
    if (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
      flags.set(name, argv[++i]);
    } else {
      flags.set(name, "true");
    }
  }
  return flags;
}

function required(flags: Map<string, string>, name: string): string {
  const value = flags.get(name);
  if (value === undefined) throw new Error(`missing required flag --${name}`);
  return value;
}

function cmdTrain(flags: Map<string, string>): void {
  const task = JSON.parse(fs.readFileSync(required(flags, "config"), "utf-8")) as ToyTask;
  const result = train(task, (epoch, loss) => {
    process.stderr.write(`epoch ${epoch}: loss ${loss.toFixed(4)}\n`);
  });
  saveCheckpoint(result, required(flags, "out"));
  process.stderr.write(`wrote ${flags.get("out")}\n`);
}

function cmdSample(flags: Map<string, string>): void {
  const { model, task } = loadCheckpoint(required(flags, "checkpoint"));
  const count = parseInt(flags.get("count") ?? "50", 10);
  const numSamples = parseInt(flags.get("n") ?? "10", 10);
  const seed = parseInt(required(flags, "seed"), 10);
  const ood = flags.get("ood") === "true";

  let records: SampleRecordInput[];
  if (ood) {
    records = makeOodSources(task, count, 1).map((src, i) => ({
      id: `ood-${String(i).padStart(5, "0")}`,
      src,
    }));
  } else {
    records = makeExamples(task, count, 1).map((example, i) => ({
      id: `sent-${String(i).padStart(5, "0")}`,
      src: example.src,
      reference: example.tgt,
    }));
  }
  const lines = sampleDecodeLines(model, task, records, numSamples, seed);
  writeSampleFile(lines, required(flags, "out"));
  process.stderr.write(`wrote ${flags.get("out")} (${lines.length} records)\n`);
}

function cmdMean(flags: Map<string, string>): void {
  const { model, task } = loadCheckpoint(required(flags, "checkpoint"));
  const words = required(flags, "source").trim().split(/\s+/);
  const ids = words.map((w) => {
    const block = w[0];
    const index = parseInt(w.slice(1), 10);
    if (block === "s") return index;
    if (block === "o") return task.vocabWords + index;
    throw new Error(`unknown source word ${w}`);
  });
  const tokens = meanDecodeTokens(
    model,
    ids,
    parseInt(flags.get("n") ?? "10", 10),
    parseInt(required(flags, "seed"), 10)
  );
  process.stdout.write(tokens.join(" ") + "\n");
}

function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    const flags = parseFlags(rest);
    switch (command) {
      case "train":
        cmdTrain(flags);
        return 0;
      case "sample":
        cmdSample(flags);
        return 0;
      case "mean":
        cmdMean(flags);
        return 0;
      default:
        process.stderr.write(
          "usage: cli.js {train|sample|mean} --flags...\n"
        );
        return 1;
    }
  } catch (error) {
    process.stderr.write(`error: ${(error as Error).message}\n`);
    return 2;
  }
}

process.exit(main(process.argv.slice(2)));
