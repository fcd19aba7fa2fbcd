/**
 * The five-value numeric metadata vector, in fixed field order:
 * [views, likes, dislikes, comments, duration_s].
 */

import { ValidationError } from "./schema.js";

export const METADATA_FIELDS = ["views", "likes", "dislikes", "comments", "duration_s"] as const;

export type MetadataFields = Record<(typeof METADATA_FIELDS)[number], number>;

export function extractMetadata(video: Partial<MetadataFields> & { id?: string }): number[] {
  const vector: number[] = [];
  for (const field of METADATA_FIELDS) {
    const value = video[field];
    if (value === undefined || value === null || !Number.isFinite(Number(value))) {
      throw new ValidationError(
        `video ${video.id ?? "(unknown)"} is missing metadata field '${field}'`,
      );
    }
    vector.push(Number(value));
  }
  return vector;
}
