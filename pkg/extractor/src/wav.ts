/**
 * Minimal RIFF/WAVE decoding for the extraction pipeline.
 *
 * Supports PCM 16/24/32-bit integer and 32-bit IEEE float, any channel
 * count (channels are averaged to mono). No streaming: clips are 4 s, so
 * whole-buffer decoding is fine.
 */

export interface DecodedWav {
  sampleRate: number;
  /** Mono samples in [-1, 1]. */
  samples: Float32Array;
}

export class WavError extends Error {}

export function decodeWav(buffer: Buffer): DecodedWav {
  if (buffer.length < 44) {
    throw new WavError(`file too short to be a WAV (${buffer.length} bytes)`);
  }
  if (buffer.toString("ascii", 0, 4) !== "RIFF" || buffer.toString("ascii", 8, 12) !== "WAVE") {
    throw new WavError("not a RIFF/WAVE file");
  }

  let format = 0;
  let channels = 0;
  let sampleRate = 0;
  let bitsPerSample = 0;
  let data: Buffer | null = null;

  let offset = 12;
  while (offset + 8 <= buffer.length) {
    const chunkId = buffer.toString("ascii", offset, offset + 4);
    const chunkSize = buffer.readUInt32LE(offset + 4);
    const body = offset + 8;
    if (chunkId === "fmt ") {
      if (body + 16 > buffer.length) {
        throw new WavError("truncated fmt chunk");
      }
      format = buffer.readUInt16LE(body);
      channels = buffer.readUInt16LE(body + 2);
      sampleRate = buffer.readUInt32LE(body + 4);
      bitsPerSample = buffer.readUInt16LE(body + 14);
      if (format === 0xfffe && chunkSize >= 40) {
        // WAVE_FORMAT_EXTENSIBLE: the real format lives in the GUID prefix
        format = buffer.readUInt16LE(body + 24);
      }
    } else if (chunkId === "data") {
      if (body + chunkSize > buffer.length) {
        throw new WavError("data chunk declares more bytes than the file holds");
      }
      data = buffer.subarray(body, body + chunkSize);
    }
    offset = body + chunkSize + (chunkSize % 2); // chunks are word-aligned
  }

  if (!channels || !sampleRate) {
    throw new WavError("missing fmt chunk");
  }
  if (!data) {
    throw new WavError("missing data chunk");
  }

  const decodeFrame = frameDecoder(format, bitsPerSample);
  const bytesPerSample = bitsPerSample / 8;
  const frameBytes = bytesPerSample * channels;
  const frames = Math.floor(data.length / frameBytes);
  const samples = new Float32Array(frames);
  for (let frame = 0; frame < frames; frame++) {
    let acc = 0;
    for (let channel = 0; channel < channels; channel++) {
      acc += decodeFrame(data, frame * frameBytes + channel * bytesPerSample);
    }
    samples[frame] = acc / channels;
  }
  return { sampleRate, samples };
}

function frameDecoder(format: number, bits: number): (data: Buffer, at: number) => number {
  if (format === 1 && bits === 16) {
    return (data, at) => data.readInt16LE(at) / 32768;
  }
  if (format === 1 && bits === 24) {
    return (data, at) => {
      const raw = data[at] | (data[at + 1] << 8) | (data[at + 2] << 16);
      return (raw & 0x800000 ? raw - 0x1000000 : raw) / 8388608;
    };
  }
  if (format === 1 && bits === 32) {
    return (data, at) => data.readInt32LE(at) / 2147483648;
  }
  if (format === 3 && bits === 32) {
    return (data, at) => data.readFloatLE(at);
  }
  throw new WavError(`unsupported WAV encoding: format ${format}, ${bits}-bit`);
}

/** Linear-interpolation resampler; adequate for feature extraction. */
export function resample(samples: Float32Array, fromRate: number, toRate: number): Float32Array {
  if (fromRate === toRate) {
    return samples;
  }
  const outLength = Math.max(1, Math.round((samples.length * toRate) / fromRate));
  const out = new Float32Array(outLength);
  const step = fromRate / toRate;
  for (let i = 0; i < outLength; i++) {
    const position = i * step;
    const left = Math.floor(position);
    const right = Math.min(left + 1, samples.length - 1);
    const frac = position - left;
    out[i] = samples[Math.min(left, samples.length - 1)] * (1 - frac) + samples[right] * frac;
  }
  return out;
}

/** Zero-pad or trim to an exact sample count (clips are nominally 4 s). */
export function fitLength(samples: Float32Array, length: number): Float32Array {
  if (samples.length === length) {
    return samples;
  }
  const out = new Float32Array(length);
  out.set(samples.subarray(0, Math.min(length, samples.length)));
  return out;
}

/** Test/fixture helper: encode mono float samples as 16-bit PCM WAV. */
export function encodeWavPcm16(samples: Float32Array, sampleRate: number): Buffer {
  const data = Buffer.alloc(samples.length * 2);
  for (let i = 0; i < samples.length; i++) {
    const clamped = Math.max(-1, Math.min(1, samples[i]));
    data.writeInt16LE(Math.round(clamped * 32767), i * 2);
  }
  const header = Buffer.alloc(44);
  header.write("RIFF", 0, "ascii");
  header.writeUInt32LE(36 + data.length, 4);
  header.write("WAVE", 8, "ascii");
  header.write("fmt ", 12, "ascii");
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(1, 20); // PCM
  header.writeUInt16LE(1, 22); // mono
  header.writeUInt32LE(sampleRate, 24);
  header.writeUInt32LE(sampleRate * 2, 28);
  header.writeUInt16LE(2, 32);
  header.writeUInt16LE(16, 34);
  header.write("data", 36, "ascii");
  header.writeUInt32LE(data.length, 40);
  return Buffer.concat([header, data]);
}
