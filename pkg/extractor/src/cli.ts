#!/usr/bin/env node
/**
 * foleyfake-extract: WAV directory + labels CSV -> EMBD container.
 *
 * Exit codes: 0 success (possibly with per-file failures, which are
 * reported on stderr and in the sidecar), 1 runtime failure, 2 bad usage.
 */

import * as fs from "fs";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { runExtractionJob } from "./extract";
import { ModelError, MODEL_REGISTRY, modelSpec, TfjsEmbedder } from "./models";

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .scriptName("foleyfake-extract")
    .option("input", { type: "string", demandOption: true, describe: "directory of 4 s WAV clips" })
    .option("labels", { type: "string", demandOption: true, describe: "labels CSV path" })
    .option("model", {
      type: "string",
      demandOption: true,
      choices: Object.keys(MODEL_REGISTRY),
      describe: "embedding model name",
    })
    .option("weights", {
      type: "string",
      demandOption: true,
      describe: "directory holding the converted TF.js weights (model.json + shards)",
    })
    .option("out", { type: "string", demandOption: true, describe: "output EMBD container path" })
    .option("sidecar", {
      type: "string",
      describe: "timing sidecar JSON path (default: <out>.timing.json)",
    })
    .strict()
    .exitProcess(false)
    .fail((message, error) => {
      throw error ?? new UsageError(message);
    })
    .parse();

  for (const [flag, value] of [
    ["input", args.input],
    ["labels", args.labels],
    ["weights", args.weights],
  ] as const) {
    if (!fs.existsSync(value)) {
      throw new UsageError(`--${flag} path ${value} does not exist`);
    }
  }

  const spec = modelSpec(args.model);
  const embedder = await TfjsEmbedder.fromDir(args.weights, spec);
  const result = await runExtractionJob({
    inputDir: args.input,
    labelsCsv: args.labels,
    model: spec,
    embedder,
    outputContainer: args.out,
    sidecarPath: args.sidecar ?? `${args.out}.timing.json`,
  });

  for (const failure of result.failures) {
    console.error(`warning: ${failure.file}: ${failure.error}`);
  }
  console.log(
    `wrote ${result.records.length} records (dim ${spec.dim}) to ${args.out}` +
      (result.failures.length > 0 ? `; ${result.failures.length} file(s) failed` : ""),
  );
  return 0;
}

export class UsageError extends Error {}

if (require.main === module) {
  main(hideBin(process.argv))
    .then((code) => {
      process.exitCode = code;
    })
    .catch((error) => {
      console.error(`error: ${error instanceof Error ? error.message : error}`);
      process.exitCode = error instanceof UsageError || error instanceof ModelError ? 2 : 1;
    });
}
