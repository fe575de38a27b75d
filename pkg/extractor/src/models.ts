/**
 * Embedding model registry and the TF.js-backed embedder.
 *
 * Each entry fixes the model family's spectral frontend and output
 * dimensionality. Inference weights are loaded from a local TF.js
 * Layers-model directory (model.json + weight shards); the pinned
 * upstream checkpoints and their conversion recipe are documented in the
 * package README. One embedding vector is produced per second of audio;
 * models whose native granularity is finer are mean-pooled within the
 * second.
 */

import * as fs from "fs";
import * as path from "path";

import * as tf from "@tensorflow/tfjs";

import { MelFrontend, MelFrontendConfig } from "./dsp";

export class ModelError extends Error {}

export interface ModelSpec {
  name: string;
  dim: number;
  frontend: MelFrontendConfig;
}

export const MODEL_REGISTRY: Record<string, ModelSpec> = {
  vggish: {
    name: "vggish",
    dim: 128,
    frontend: {
      sampleRate: 16000,
      fftSize: 512,
      windowSize: 400, // 25 ms
      hopSize: 160, // 10 ms
      melBands: 64,
      fminHz: 125,
      fmaxHz: 7500,
      logMode: "ln-offset",
      logOffset: 0.01,
    },
  },
  "ms-clap": {
    name: "ms-clap",
    dim: 1024,
    frontend: {
      sampleRate: 44100,
      fftSize: 1024,
      windowSize: 1024,
      hopSize: 441, // 10 ms
      melBands: 64,
      fminHz: 50,
      fmaxHz: 14000,
      logMode: "db",
      logOffset: 1e-10,
    },
  },
  "pann-wavegram-logmel": {
    name: "pann-wavegram-logmel",
    dim: 2048,
    frontend: {
      sampleRate: 32000,
      fftSize: 1024,
      windowSize: 1024,
      hopSize: 320, // 10 ms
      melBands: 64,
      fminHz: 50,
      fmaxHz: 14000,
      logMode: "db",
      logOffset: 1e-10,
    },
  },
  "pann-cnn14-32k": {
    name: "pann-cnn14-32k",
    dim: 2048,
    frontend: {
      sampleRate: 32000,
      fftSize: 1024,
      windowSize: 1024,
      hopSize: 320,
      melBands: 64,
      fminHz: 50,
      fmaxHz: 14000,
      logMode: "db",
      logOffset: 1e-10,
    },
  },
};

export function modelSpec(name: string): ModelSpec {
  const spec = MODEL_REGISTRY[name];
  if (!spec) {
    throw new ModelError(
      `unknown embedding model ${name}; expected one of ${Object.keys(MODEL_REGISTRY).join(", ")}`,
    );
  }
  return spec;
}

/** Maps one second's log-mel patch to a dim-length embedding vector. */
export interface Embedder {
  readonly dim: number;
  embedSecond(logMel: Float32Array, frames: number, melBands: number): Promise<Float32Array>;
}

/**
 * Loads a TF.js Layers model from a directory containing model.json and
 * its weight shards. Plain @tensorflow/tfjs has no file:// handler, so
 * this supplies a small filesystem IOHandler.
 */
export async function loadLayersModelFromDir(dir: string): Promise<tf.LayersModel> {
  const manifestPath = path.join(dir, "model.json");
  if (!fs.existsSync(manifestPath)) {
    throw new ModelError(`weights directory ${dir} has no model.json`);
  }
  const manifest = JSON.parse(fs.readFileSync(manifestPath, "utf-8"));
  const weightSpecs: tf.io.WeightsManifestEntry[] = [];
  const shardBuffers: Buffer[] = [];
  for (const group of manifest.weightsManifest ?? []) {
    weightSpecs.push(...group.weights);
    for (const shard of group.paths) {
      shardBuffers.push(fs.readFileSync(path.join(dir, shard)));
    }
  }
  const weightBytes = Buffer.concat(shardBuffers);
  const weightData = weightBytes.buffer.slice(
    weightBytes.byteOffset,
    weightBytes.byteOffset + weightBytes.byteLength,
  );
  return tf.loadLayersModel({
    load: async () => ({
      modelTopology: manifest.modelTopology,
      weightSpecs,
      weightData,
    }),
  });
}

/** Counterpart used by tests and conversion scripts to pin fixtures. */
export async function saveLayersModelToDir(model: tf.LayersModel, dir: string): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const weightData = artifacts.weightData as ArrayBuffer;
      fs.writeFileSync(path.join(dir, "group1-shard1of1.bin"), Buffer.from(weightData));
      fs.writeFileSync(
        path.join(dir, "model.json"),
        JSON.stringify({
          modelTopology: artifacts.modelTopology,
          format: "layers-model",
          generatedBy: "foleyfake-extractor",
          convertedBy: null,
          weightsManifest: [
            { paths: ["group1-shard1of1.bin"], weights: artifacts.weightSpecs },
          ],
        }),
      );
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(),
          modelTopologyType: "JSON",
        },
      };
    }),
  );
}

export class TfjsEmbedder implements Embedder {
  readonly dim: number;
  private readonly model: tf.LayersModel;

  private constructor(model: tf.LayersModel, dim: number) {
    this.model = model;
    this.dim = dim;
  }

  static async fromDir(dir: string, spec: ModelSpec): Promise<TfjsEmbedder> {
    const model = await loadLayersModelFromDir(dir);
    const outputShape = model.outputs[0].shape;
    const outputDim = outputShape[outputShape.length - 1];
    if (outputDim !== spec.dim) {
      throw new ModelError(
        `${spec.name}: loaded model emits dim ${outputDim}, registry expects ${spec.dim}`,
      );
    }
    return new TfjsEmbedder(model, spec.dim);
  }

  /**
   * Adapts the patch to the model's declared input rank/size: fixed frame
   * counts are met by trimming or zero-padding trailing frames, then the
   * patch is fed as [1, ...input shape]. Multi-frame outputs are
   * mean-pooled to a single dim vector.
   */
  async embedSecond(logMel: Float32Array, frames: number, melBands: number): Promise<Float32Array> {
    const inputShape = this.model.inputs[0].shape; // e.g. [null, F, M] or [null, F*M]
    const wantFrames = inputShape.length >= 3 && inputShape[1] != null ? inputShape[1] : frames;
    let patch = logMel;
    if (wantFrames !== frames) {
      patch = new Float32Array(wantFrames * melBands);
      patch.set(logMel.subarray(0, Math.min(frames, wantFrames) * melBands));
    }
    const result = tf.tidy(() => {
      let input: tf.Tensor;
      if (inputShape.length === 2) {
        input = tf.tensor(patch, [1, wantFrames * melBands]);
      } else if (inputShape.length === 3) {
        input = tf.tensor(patch, [1, wantFrames, melBands]);
      } else if (inputShape.length === 4) {
        input = tf.tensor(patch, [1, wantFrames, melBands, 1]);
      } else {
        throw new ModelError(`unsupported model input rank ${inputShape.length}`);
      }
      let output = this.model.predict(input) as tf.Tensor;
      while (output.rank > 2) {
        output = output.mean(1);
      }
      if (output.shape[0] > 1) {
        output = output.mean(0, true);
      }
      return output.dataSync() as Float32Array;
    });
    if (result.length !== this.dim) {
      throw new ModelError(`embedding has length ${result.length}, expected ${this.dim}`);
    }
    return Float32Array.from(result);
  }
}
