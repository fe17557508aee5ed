/**
 * CSV loading and schema validation for the campaign aggregate files.
 *
 * Two inputs are understood:
 *   cdf.csv    sweep_value,policy,value_m,cum_prob
 *   sweep.csv  sweep_value,policy,bs_index,mean_range_std_m,mean_power_dbm
 */

import fs from "node:fs";

export class SchemaError extends Error {}

export interface CdfRow {
  sweepValue: number | null;
  policy: string;
  valueM: number;
  cumProb: number;
}

export interface SweepRow {
  sweepValue: number | null;
  policy: string;
  bsIndex: number;
  meanRangeStdM: number;
  meanPowerDbm: number;
}

export const CDF_COLUMNS = ["sweep_value", "policy", "value_m", "cum_prob"];
export const SWEEP_COLUMNS = [
  "sweep_value",
  "policy",
  "bs_index",
  "mean_range_std_m",
  "mean_power_dbm",
];

function splitLines(text: string): string[] {
  return text.split(/\r?\n/).filter((line) => line.length > 0);
}

function parseNumber(raw: string, column: string, line: number): number {
  const value = Number(raw);
  if (raw === "" || Number.isNaN(value)) {
    throw new SchemaError(
      `line ${line}: column "${column}" is not a number (got "${raw}")`,
    );
  }
  return value;
}

function parseOptionalNumber(raw: string): number | null {
  return raw === "" ? null : Number(raw);
}

function checkHeader(actual: string[], expected: string[]): void {
  for (let i = 0; i < expected.length; i++) {
    if (actual[i] !== expected[i]) {
      throw new SchemaError(
        `header mismatch: expected column ${i + 1} to be "${expected[i]}", ` +
          `got "${actual[i] ?? "(missing)"}"`,
      );
    }
  }
  if (actual.length !== expected.length) {
    throw new SchemaError(
      `header mismatch: unexpected extra column "${actual[expected.length]}"`,
    );
  }
}

function readTable(path: string, expected: string[]): string[][] {
  if (!fs.existsSync(path)) {
    throw new SchemaError(`input file not found: ${path}`);
  }
  const lines = splitLines(fs.readFileSync(path, "utf8"));
  if (lines.length === 0) {
    throw new SchemaError(`input file is empty: ${path}`);
  }
  checkHeader(lines[0].split(","), expected);
  if (lines.length === 1) {
    throw new SchemaError(`no data rows in ${path}`);
  }
  return lines.slice(1).map((line) => line.split(","));
}

export function readCdfCsv(path: string): CdfRow[] {
  return readTable(path, CDF_COLUMNS).map((parts, i) => ({
    sweepValue: parseOptionalNumber(parts[0]),
    policy: parts[1],
    valueM: parseNumber(parts[2], "value_m", i + 2),
    cumProb: parseNumber(parts[3], "cum_prob", i + 2),
  }));
}

export function readSweepCsv(path: string): SweepRow[] {
  return readTable(path, SWEEP_COLUMNS).map((parts, i) => ({
    sweepValue: parseOptionalNumber(parts[0]),
    policy: parts[1],
    bsIndex: parseNumber(parts[2], "bs_index", i + 2),
    meanRangeStdM: parseNumber(parts[3], "mean_range_std_m", i + 2),
    meanPowerDbm: parseNumber(parts[4], "mean_power_dbm", i + 2),
  }));
}
