/**
 * Labels CSV: one row per clip, header
 * clip_id,sound_class,label,generator_id,track — generator_id and track
 * are filled exactly for fake rows (label 1) and empty otherwise.
 */

import { SOUND_CLASSES, SoundClass } from "./container";

export interface LabelRow {
  clipId: string;
  soundClass: SoundClass;
  label: 0 | 1;
  generatorId?: string;
  track?: "A" | "B";
}

export class LabelsError extends Error {}

const REQUIRED_COLUMNS = ["clip_id", "sound_class", "label"];

export function parseLabelsCsv(text: string): Map<string, LabelRow> {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new LabelsError("labels csv is empty");
  }
  const header = lines[0].split(",").map((cell) => cell.trim());
  for (const column of REQUIRED_COLUMNS) {
    if (!header.includes(column)) {
      throw new LabelsError(`labels csv missing column ${column}`);
    }
  }
  const columnIndex = (name: string) => header.indexOf(name);
  const idAt = columnIndex("clip_id");
  const classAt = columnIndex("sound_class");
  const labelAt = columnIndex("label");
  const generatorAt = columnIndex("generator_id");
  const trackAt = columnIndex("track");

  const rows = new Map<string, LabelRow>();
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",").map((cell) => cell.trim());
    const clipId = cells[idAt];
    if (!clipId) {
      throw new LabelsError(`labels csv line ${i + 1}: empty clip_id`);
    }
    if (rows.has(clipId)) {
      throw new LabelsError(`labels csv line ${i + 1}: duplicate clip_id ${clipId}`);
    }
    const soundClass = cells[classAt] as SoundClass;
    if (!(SOUND_CLASSES as readonly string[]).includes(soundClass)) {
      throw new LabelsError(`labels csv line ${i + 1}: unknown sound_class ${cells[classAt]}`);
    }
    const label = Number(cells[labelAt]);
    if (label !== 0 && label !== 1) {
      throw new LabelsError(`labels csv line ${i + 1}: label must be 0 or 1`);
    }
    const generatorId = generatorAt >= 0 ? cells[generatorAt] : "";
    const track = trackAt >= 0 ? cells[trackAt] : "";
    if (label === 1) {
      if (!generatorId || !track) {
        throw new LabelsError(
          `labels csv line ${i + 1}: fake rows need generator_id and track`,
        );
      }
      if (track !== "A" && track !== "B") {
        throw new LabelsError(`labels csv line ${i + 1}: track must be A or B`);
      }
      rows.set(clipId, { clipId, soundClass, label, generatorId, track });
    } else {
      if (generatorId || track) {
        throw new LabelsError(
          `labels csv line ${i + 1}: nonfake rows must leave generator_id and track empty`,
        );
      }
      rows.set(clipId, { clipId, soundClass, label });
    }
  }
  return rows;
}
