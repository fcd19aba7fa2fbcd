/** Stable-order writers for feature records and the lock manifest. */

import { writeFileSync } from "node:fs";

import type { ExtractionResult } from "./extract.js";
import { recordToJson, type FeatureRecord } from "./schema.js";

export function recordsToJsonl(records: FeatureRecord[]): string {
  return records.map((record) => recordToJson(record)).join("\n") + (records.length ? "\n" : "");
}

export function writeResult(
  result: ExtractionResult,
  featuresPath: string,
  lockPath: string,
): void {
  writeFileSync(featuresPath, recordsToJsonl(result.records), "utf-8");
  writeFileSync(lockPath, JSON.stringify(result.lock, stableKeys, 2) + "\n", "utf-8");
}

function stableKeys(_key: string, value: unknown): unknown {
  if (value && typeof value === "object" && !Array.isArray(value)) {
    return Object.fromEntries(
      Object.entries(value as Record<string, unknown>).sort(([a], [b]) => (a < b ? -1 : 1)),
    );
  }
  return value;
}
