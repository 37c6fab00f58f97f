/**
 * Dense-array bindings over the trawl sampling CLI.
 *
 * A Sampler is configured once (graph, app, parameters, seed), runs the
 * engine via doSampling(), and exposes the results as dense integer
 * matrices: getFinalSamples() gives one row per sample (roots followed
 * by every sampled vertex, ragged rows padded with the NULL sentinel),
 * and getStepSamples(step) gives the per-step layout. Data crosses the
 * boundary through the CLI's text output files; nothing is resampled
 * here.
 */

import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

/** Slot value meaning "no vertex": pads ragged rows. */
export const NULL_VERTEX = -1;

/** CLI executable; override with the TRAWL_BIN environment variable. */
const TRAWL_BIN = process.env.TRAWL_BIN ?? "trawl";

export interface SamplerOptions {
  /** Edge-list file path. Exactly one of graph / synth is required. */
  graph?: string;
  /** Synthetic graph spec, e.g. "powerlaw:10000" or "cycle:2000". */
  synth?: string;
  app: string;
  samples: number;
  seed?: number;
  weighted?: boolean;
  undirected?: boolean;
  /** Extra app flags, e.g. { "walk-length": 80, p: 2.0, q: 0.5 }. */
  params?: Record<string, string | number>;
}

/** Row-major dense integer matrix. */
export class DenseMatrix {
  readonly rows: number;
  readonly cols: number;
  readonly data: Int32Array;

  constructor(rows: number, cols: number, fill = NULL_VERTEX) {
    this.rows = rows;
    this.cols = cols;
    this.data = new Int32Array(rows * cols).fill(fill);
  }

  get(i: number, j: number): number {
    return this.data[i * this.cols + j];
  }

  set(i: number, j: number, v: number): void {
    if (!Number.isInteger(v) || Math.abs(v) > 0x7fffffff) {
      throw new RangeError(`vertex id ${v} does not fit the dense matrix`);
    }
    this.data[i * this.cols + j] = v;
  }

  row(i: number): Int32Array {
    return this.data.subarray(i * this.cols, (i + 1) * this.cols);
  }

  toNested(): number[][] {
    return Array.from({ length: this.rows }, (_, i) => Array.from(this.row(i)));
  }
}

interface ParsedRows {
  ids: number[];
  rows: number[][];
}

/** Parse "sampleId: v1 v2 ..." lines from one block of CLI output. */
function parseRowLines(lines: string[]): ParsedRows {
  const ids: number[] = [];
  const rows: number[][] = [];
  for (const line of lines) {
    const sep = line.indexOf(":");
    if (sep < 0) continue;
    ids.push(Number(line.slice(0, sep)));
    const rest = line.slice(sep + 1).trim();
    rows.push(rest.length ? rest.split(/\s+/).map(Number) : []);
  }
  return { ids, rows };
}

function toMatrix(rows: number[][]): DenseMatrix {
  const width = rows.reduce((w, r) => Math.max(w, r.length), 0);
  const m = new DenseMatrix(rows.length, width);
  rows.forEach((row, i) => row.forEach((v, j) => m.set(i, j, v)));
  return m;
}

export class UsageError extends Error {}

export class Sampler {
  private readonly options: SamplerOptions;
  private readonly workDir: string;
  private finalRows: number[][] | null = null;
  private stepBlocks: number[][][] | null = null; // [block][sample][pos]

  constructor(options: SamplerOptions) {
    if (!options.app) {
      throw new UsageError("an app id is required");
    }
    if (!options.graph && !options.synth) {
      throw new UsageError("one of graph or synth is required");
    }
    if (options.graph && !existsSync(options.graph)) {
      throw new UsageError(`graph file not found: ${options.graph}`);
    }
    if (!(options.samples >= 0)) {
      throw new UsageError("samples must be a non-negative count");
    }
    this.options = { ...options, params: { ...options.params } };
    this.workDir = mkdtempSync(join(tmpdir(), "trawl-"));
  }

  private cliArgs(layout: "final" | "per-step", outPath: string): string[] {
    const o = this.options;
    const args = ["--app", o.app, "--paradigm", "tp",
      "--samples", String(o.samples), "--seed", String(o.seed ?? 0),
      "--layout", layout, "--output", outPath];
    if (o.graph) args.push("--graph", o.graph);
    if (o.synth) args.push("--synth", o.synth);
    if (o.weighted) args.push("--weighted");
    if (o.undirected) args.push("--undirected");
    for (const [key, value] of Object.entries(o.params ?? {})) {
      args.push(`--${key}`, String(value));
    }
    return args;
  }

  private runCli(layout: "final" | "per-step"): string {
    const outPath = join(this.workDir, `samples-${layout}.txt`);
    execFileSync(TRAWL_BIN, this.cliArgs(layout, outPath), {
      stdio: ["ignore", "ignore", "pipe"],
    });
    return readFileSync(outPath, "utf-8");
  }

  /**
   * Run transit-parallel sampling. Results are retained on the handle;
   * repeated calls re-run the engine (identical output for one seed).
   */
  doSampling(): { samples: number; maxRowLength: number } {
    const text = this.runCli("final");
    const lines = text.split("\n").filter((l) => l.length > 0);
    if (!lines[0]?.startsWith("# layout=final")) {
      throw new Error(`unexpected CLI output header: ${lines[0]}`);
    }
    const parsed = parseRowLines(lines.slice(1));
    this.finalRows = parsed.rows;
    this.stepBlocks = null; // refreshed lazily on next getStepSamples
    const width = this.finalRows.reduce((w, r) => Math.max(w, r.length), 0);
    return { samples: this.finalRows.length, maxRowLength: width };
  }

  /**
   * Dense (num_samples x max_row_length) matrix: row i holds sample
   * i's roots then its sampled vertices; shorter rows are padded with
   * NULL_VERTEX.
   */
  getFinalSamples(): DenseMatrix {
    if (this.finalRows === null) {
      throw new UsageError("call doSampling() before getFinalSamples()");
    }
    return toMatrix(this.finalRows);
  }

  /**
   * Per-step layout: step -1 selects the roots block, steps 0.. the
   * vertices each sample gained at that step.
   */
  getStepSamples(step: number): DenseMatrix {
    if (this.finalRows === null) {
      throw new UsageError("call doSampling() before getStepSamples()");
    }
    if (this.stepBlocks === null) {
      this.stepBlocks = this.parseStepBlocks(this.runCli("per-step"));
    }
    const index = step + 1; // roots block first
    if (index < 0 || index >= this.stepBlocks.length) {
      throw new RangeError(`no block for step ${step}`);
    }
    return toMatrix(this.stepBlocks[index]);
  }

  private parseStepBlocks(text: string): number[][][] {
    const lines = text.split("\n");
    if (!lines[0]?.startsWith("# layout=per-step")) {
      throw new Error(`unexpected CLI output header: ${lines[0]}`);
    }
    const blocks: number[][][] = [];
    let current: string[] | null = null;
    for (const line of lines.slice(1)) {
      if (line === "roots:" || /^step \d+:$/.test(line)) {
        if (current) blocks.push(parseRowLines(current).rows);
        current = [];
      } else if (line.length && current) {
        current.push(line);
      }
    }
    if (current) blocks.push(parseRowLines(current).rows);
    return blocks;
  }
}

/** Module-level conveniences mirroring the two-call integration flow. */
export function doSampling(sampler: Sampler) {
  return sampler.doSampling();
}

export function getFinalSamples(sampler: Sampler): DenseMatrix {
  return sampler.getFinalSamples();
}

export function getStepSamples(sampler: Sampler, step: number): DenseMatrix {
  return sampler.getStepSamples(step);
}

/** Parse a FinalSamples file written by the CLI into row arrays. */
export function parseFinalSamplesFile(path: string): number[][] {
  const lines = readFileSync(path, "utf-8").split("\n")
    .filter((l) => l.length > 0 && !l.startsWith("#"));
  return parseRowLines(lines).rows;
}
