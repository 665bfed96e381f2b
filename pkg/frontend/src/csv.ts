/**
 * Sweep CSV parsing against the versioned schema emitted by the simulation
 * package: T, inv_T, distance, leakage, projector_drift, wall_time.
 * Schema violations are reported with row/column context.
 */
import { readFileSync } from "node:fs";
import Papa from "papaparse";

export interface SweepRow {
  t: number;
  invT: number;
  distance: number;
  leakage: number;
  projectorDrift: number | null;
  wallTime: number;
}

export const SWEEP_COLUMNS = [
  "T",
  "inv_T",
  "distance",
  "leakage",
  "projector_drift",
  "wall_time",
] as const;

export class SweepSchemaError extends Error {}

function requireNumber(
  raw: string,
  file: string,
  row: number,
  column: string,
): number {
  const value = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(value)) {
    throw new SweepSchemaError(
      `${file}: row ${row}, column '${column}': expected a finite number, got '${raw}'`,
    );
  }
  return value;
}

export function parseSweepCsv(path: string): SweepRow[] {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new SweepSchemaError(`${path}: row ${(e.row ?? 0) + 2}: ${e.message}`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const column of SWEEP_COLUMNS) {
    if (!fields.includes(column)) {
      throw new SweepSchemaError(`${path}: missing column '${column}'`);
    }
  }

  return parsed.data.map((record, i) => {
    const row = i + 2; // header is line 1
    const drift = record.projector_drift ?? "";
    return {
      t: requireNumber(record.T, path, row, "T"),
      invT: requireNumber(record.inv_T, path, row, "inv_T"),
      distance: requireNumber(record.distance, path, row, "distance"),
      leakage: requireNumber(record.leakage, path, row, "leakage"),
      projectorDrift:
        drift.trim() === "" ? null : requireNumber(drift, path, row, "projector_drift"),
      wallTime: requireNumber(record.wall_time ?? "0", path, row, "wall_time"),
    };
  });
}
