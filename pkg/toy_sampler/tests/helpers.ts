import { execFileSync } from "child_process";
import * as path from "path";

/** Repo root that holds the evaluation toolkit's src/ tree. */
const REPO_ROOT = path.resolve(__dirname, "..", "..", "..");

/**
 * Run the evaluation toolkit CLI (the primary component) as a subprocess.
 * The sampler talks to it only through files and this command surface.
 */
export function runSeqcert(args: string[]): { stdout: string; status: number } {
  try {
    const stdout = execFileSync("python3", ["-m", "seqcert", ...args], {
      encoding: "utf-8",
      env: { ...process.env, PYTHONPATH: path.join(REPO_ROOT, "src") },
    });
    return { stdout, status: 0 };
  } catch (error) {
    const failure = error as { status?: number; stdout?: string; stderr?: string };
    return { stdout: failure.stdout ?? "", status: failure.status ?? -1 };
  }
}

/** Mean of the display uncertainty column of a scores.csv file. */
export function meanUncertaintyFromCsv(csvText: string): number {
  const lines = csvText.trim().split("\n");
  const header = lines[0].split(",");
  const column = header.indexOf("uncertainty");
  if (column < 0) throw new Error("scores.csv has no uncertainty column");
  const values = lines.slice(1).map((line) => parseFloat(line.split(",")[column]));
  return values.reduce((a, b) => a + b, 0) / values.length;
}
