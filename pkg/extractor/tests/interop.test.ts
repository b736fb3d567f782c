import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { runCli, Sink } from "../src/cli";

// These tests drive the companion Python toolkit on our output. They are
// skipped when that toolkit is not importable in this environment.
function pythonHasToolkit(): boolean {
  const probe = spawnSync("python3", ["-c", "import slproto"], {
    encoding: "utf-8",
  });
  return probe.status === 0;
}

const toolkitAvailable = pythonHasToolkit();

class Quiet implements Sink {
  write(): boolean {
    return true;
  }
}

describe.skipIf(!toolkitAvailable)("python toolkit interop", () => {
  let dir: string;
  let datasetPath: string;

  beforeAll(() => {
    dir = fs.mkdtempSync(path.join(os.tmpdir(), "embed-interop-"));
    const rows: unknown[] = [];
    const phrases: Record<string, string[]> = {
      finance: [
        "the bank raised interest rates",
        "stocks closed higher on earnings",
        "the fund reported quarterly losses",
        "inflation pressured bond yields",
        "the merger cleared regulatory review",
      ],
      sports: [
        "the striker scored twice tonight",
        "the team clinched the series",
        "a late goal forced overtime",
        "the coach rotated the squad",
        "fans packed the stadium early",
      ],
      weather: [
        "heavy rain flooded the valley",
        "a cold front arrives tomorrow",
        "the heatwave broke all records",
        "snow closed the mountain pass",
        "winds gusted along the coast",
      ],
    };
    for (const [label, texts] of Object.entries(phrases)) {
      for (const text of texts) {
        rows.push({ text, label });
      }
    }
    const input = path.join(dir, "rows.jsonl");
    fs.writeFileSync(
      input,
      rows.map((r) => JSON.stringify(r)).join("\n") + "\n",
    );
    datasetPath = path.join(dir, "encoded.jsonl");
    const code = runCli(
      ["--input", input, "--output", datasetPath, "--pooling", "mean"],
      new Quiet(),
      new Quiet(),
    );
    expect(code).toBe(0);
  });

  afterAll(() => {
    fs.rmSync(dir, { recursive: true, force: true });
  });

  it("produces a dataset the toolkit loads and validates", () => {
    const probe = spawnSync(
      "python3",
      [
        "-c",
        [
          "import sys",
          "from slproto.data import load_dataset",
          "d = load_dataset(sys.argv[1])",
          "print(d.dimension)",
          "print(len(d.instances))",
          "print(','.join(d.classes))",
          "print(d.metadata['encoder'], d.metadata['pooling'])",
        ].join("\n"),
        datasetPath,
      ],
      { encoding: "utf-8" },
    );
    expect(probe.stderr).toBe("");
    expect(probe.status).toBe(0);
    expect(probe.stdout.split("\n").slice(0, 4)).toEqual([
      "768",
      "15",
      "finance,sports,weather",
      "local-hash-768 mean",
    ]);
  });

  it("feeds the toolkit's model-fitting command end to end", () => {
    const modelPath = path.join(dir, "model.json");
    const fit = spawnSync(
      "python3",
      [
        "-c",
        "import sys\nfrom slproto.cli import main\nsys.exit(main(sys.argv[1:]))",
        "fit",
        "--data",
        datasetPath,
        "--out",
        modelPath,
      ],
      { encoding: "utf-8" },
    );
    expect(fit.stderr).toBe("");
    expect(fit.status).toBe(0);
    expect(fit.stdout).toMatch(/classes: 3 \(finance, sports, weather\)/);
    expect(fs.existsSync(modelPath)).toBe(true);
  });
});
