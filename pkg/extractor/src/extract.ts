/**
 * Extraction job: a directory of 4-second WAV clips plus a labels CSV in,
 * one EMBD container plus a timing sidecar out. Undecodable or mislabeled
 * files become entries in the failure list; the job keeps going.
 */

import * as fs from "fs";
import * as path from "path";
import { performance } from "perf_hooks";

import { EmbeddingRecord, writeContainer } from "./container";
import { MelFrontend } from "./dsp";
import { LabelRow, parseLabelsCsv } from "./labels";
import { Embedder, ModelSpec } from "./models";
import { decodeWav, fitLength, resample } from "./wav";

export const CLIP_SECONDS = 4;

export interface ExtractionJob {
  inputDir: string;
  labelsCsv: string;
  model: ModelSpec;
  embedder: Embedder;
  outputContainer: string;
  sidecarPath?: string;
}

export interface ClipTiming {
  clip_id: string;
  embed_seconds: number;
}

export interface ExtractionFailure {
  file: string;
  error: string;
}

export interface ExtractionResult {
  records: EmbeddingRecord[];
  timings: ClipTiming[];
  failures: ExtractionFailure[];
  containerBytes: number;
}

export async function embedClip(
  samples: Float32Array,
  sampleRate: number,
  spec: ModelSpec,
  embedder: Embedder,
): Promise<Float32Array> {
  const frontend = new MelFrontend(spec.frontend);
  const targetRate = spec.frontend.sampleRate;
  const fitted = fitLength(resample(samples, sampleRate, targetRate), targetRate * CLIP_SECONDS);

  const values = new Float32Array(CLIP_SECONDS * spec.dim);
  for (let second = 0; second < CLIP_SECONDS; second++) {
    const chunk = fitted.subarray(second * targetRate, (second + 1) * targetRate);
    const { data, frames } = frontend.logMel(chunk);
    const embedding = await embedder.embedSecond(data, frames, spec.frontend.melBands);
    values.set(embedding, second * spec.dim);
  }
  return values;
}

export async function runExtractionJob(job: ExtractionJob): Promise<ExtractionResult> {
  const labels = parseLabelsCsv(fs.readFileSync(job.labelsCsv, "utf-8"));
  const wavFiles = fs
    .readdirSync(job.inputDir)
    .filter((name) => name.toLowerCase().endsWith(".wav"))
    .sort();

  const records: EmbeddingRecord[] = [];
  const timings: ClipTiming[] = [];
  const failures: ExtractionFailure[] = [];

  for (const file of wavFiles) {
    const clipId = path.basename(file, path.extname(file));
    const row: LabelRow | undefined = labels.get(clipId);
    if (!row) {
      failures.push({ file, error: `no labels row for clip_id ${clipId}` });
      continue;
    }
    try {
      const wav = decodeWav(fs.readFileSync(path.join(job.inputDir, file)));
      const started = performance.now();
      const values = await embedClip(wav.samples, wav.sampleRate, job.model, job.embedder);
      const embedSeconds = (performance.now() - started) / 1000;
      records.push({
        clipId,
        soundClass: row.soundClass,
        label: row.label,
        frames: CLIP_SECONDS,
        dim: job.model.dim,
        values,
        ...(row.label === 1 ? { generatorId: row.generatorId, track: row.track } : {}),
      });
      timings.push({ clip_id: clipId, embed_seconds: embedSeconds });
    } catch (error) {
      failures.push({ file, error: error instanceof Error ? error.message : String(error) });
    }
  }

  const container = writeContainer(records);
  fs.writeFileSync(job.outputContainer, container);

  if (job.sidecarPath) {
    const meanEmbedSeconds =
      timings.length > 0
        ? timings.reduce((acc, timing) => acc + timing.embed_seconds, 0) / timings.length
        : 0;
    const sidecar = {
      model: job.model.name,
      clip_seconds: CLIP_SECONDS,
      clips: timings,
      mean_embed_seconds: meanEmbedSeconds,
      percent_of_realtime: (100 * meanEmbedSeconds) / CLIP_SECONDS,
      failures,
    };
    fs.writeFileSync(job.sidecarPath, JSON.stringify(sidecar, null, 2) + "\n");
  }

  return { records, timings, failures, containerBytes: container.length };
}
