/**
 * EMBD container writer (and a reader for verification).
 *
 * Wire format, little-endian: magic "EMBD", version u32 (=1), dim u32,
 * record count u32, then per record a u32-length-prefixed UTF-8 JSON
 * metadata object ({clip_id, sound_class, label, generator_id?, track?,
 * frames}, keys sorted) followed by frames*dim float32 values. This must
 * stay byte-compatible with the detector toolkit that consumes it.
 */

export const SOUND_CLASSES = [
  "dog_bark",
  "footstep",
  "gunshot",
  "keyboard",
  "moving_motor_vehicle",
  "rain",
  "sneeze_cough",
] as const;

export type SoundClass = (typeof SOUND_CLASSES)[number];

export interface EmbeddingRecord {
  clipId: string;
  soundClass: SoundClass;
  label: 0 | 1;
  generatorId?: string;
  track?: "A" | "B";
  frames: number;
  dim: number;
  /** Row-major [frames][dim]. */
  values: Float32Array;
}

export class ContainerError extends Error {}

const MAGIC = "EMBD";
const VERSION = 1;

export function validateRecord(record: EmbeddingRecord): void {
  if (!record.clipId) {
    throw new ContainerError("clip_id must be non-empty");
  }
  if (!(SOUND_CLASSES as readonly string[]).includes(record.soundClass)) {
    throw new ContainerError(`${record.clipId}: unknown sound_class ${record.soundClass}`);
  }
  if (record.label !== 0 && record.label !== 1) {
    throw new ContainerError(`${record.clipId}: label must be 0 or 1`);
  }
  if (record.frames <= 0 || record.dim <= 0) {
    throw new ContainerError(`${record.clipId}: frames and dim must be positive`);
  }
  if (record.values.length !== record.frames * record.dim) {
    throw new ContainerError(
      `${record.clipId}: values length ${record.values.length} != frames*dim ` +
        `${record.frames * record.dim}`,
    );
  }
  for (const value of record.values) {
    if (!Number.isFinite(value)) {
      throw new ContainerError(`${record.clipId}: values contain non-finite entries`);
    }
  }
  if (record.label === 1) {
    if (!record.generatorId || !record.track) {
      throw new ContainerError(`${record.clipId}: fake records need generator_id and track`);
    }
    if (record.track !== "A" && record.track !== "B") {
      throw new ContainerError(`${record.clipId}: track must be A or B`);
    }
  } else if (record.generatorId !== undefined || record.track !== undefined) {
    throw new ContainerError(
      `${record.clipId}: nonfake records must not carry generator_id or track`,
    );
  }
}

function metadataJson(record: EmbeddingRecord): Buffer {
  // keys emitted in sorted order to match the canonical JSON the
  // detector toolkit writes
  const meta: Record<string, string | number> = { clip_id: record.clipId, frames: record.frames };
  if (record.label === 1) {
    meta.generator_id = record.generatorId as string;
  }
  meta.label = record.label;
  meta.sound_class = record.soundClass;
  if (record.label === 1) {
    meta.track = record.track as string;
  }
  return Buffer.from(JSON.stringify(meta), "utf-8");
}

export function writeContainer(records: EmbeddingRecord[]): Buffer {
  const dims = new Set(records.map((r) => r.dim));
  if (dims.size > 1) {
    throw new ContainerError(`records mix embedding dims ${[...dims].sort().join(", ")}`);
  }
  const seen = new Set<string>();
  for (const record of records) {
    validateRecord(record);
    if (seen.has(record.clipId)) {
      throw new ContainerError(`duplicate clip_id ${record.clipId}`);
    }
    seen.add(record.clipId);
  }

  const dim = records.length > 0 ? records[0].dim : 0;
  const header = Buffer.alloc(16);
  header.write(MAGIC, 0, "ascii");
  header.writeUInt32LE(VERSION, 4);
  header.writeUInt32LE(dim, 8);
  header.writeUInt32LE(records.length, 12);

  const chunks: Buffer[] = [header];
  for (const record of records) {
    const meta = metadataJson(record);
    const lengthPrefix = Buffer.alloc(4);
    lengthPrefix.writeUInt32LE(meta.length, 0);
    const payload = Buffer.alloc(record.values.length * 4);
    for (let i = 0; i < record.values.length; i++) {
      payload.writeFloatLE(record.values[i], i * 4);
    }
    chunks.push(lengthPrefix, meta, payload);
  }
  return Buffer.concat(chunks);
}

export function readContainer(buffer: Buffer): EmbeddingRecord[] {
  if (buffer.length < 16) {
    throw new ContainerError("container shorter than its header");
  }
  if (buffer.toString("ascii", 0, 4) !== MAGIC) {
    throw new ContainerError("bad container magic");
  }
  const version = buffer.readUInt32LE(4);
  if (version !== VERSION) {
    throw new ContainerError(`unsupported container version ${version}`);
  }
  const dim = buffer.readUInt32LE(8);
  const count = buffer.readUInt32LE(12);

  const records: EmbeddingRecord[] = [];
  let offset = 16;
  for (let index = 0; index < count; index++) {
    if (offset + 4 > buffer.length) {
      throw new ContainerError(`record ${index}: truncated metadata length`);
    }
    const metaLength = buffer.readUInt32LE(offset);
    offset += 4;
    if (offset + metaLength > buffer.length) {
      throw new ContainerError(`record ${index}: truncated metadata`);
    }
    const meta = JSON.parse(buffer.toString("utf-8", offset, offset + metaLength));
    offset += metaLength;
    const valueCount = meta.frames * dim;
    if (offset + valueCount * 4 > buffer.length) {
      throw new ContainerError(`record ${index} (${meta.clip_id}): truncated payload`);
    }
    const values = new Float32Array(valueCount);
    for (let i = 0; i < valueCount; i++) {
      values[i] = buffer.readFloatLE(offset + i * 4);
    }
    offset += valueCount * 4;
    const record: EmbeddingRecord = {
      clipId: meta.clip_id,
      soundClass: meta.sound_class,
      label: meta.label,
      frames: meta.frames,
      dim,
      values,
      ...(meta.generator_id !== undefined ? { generatorId: meta.generator_id } : {}),
      ...(meta.track !== undefined ? { track: meta.track } : {}),
    };
    validateRecord(record);
    records.push(record);
  }
  return records;
}
