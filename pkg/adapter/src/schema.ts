/**
 * Feature-record wire schema shared with the classification pipeline.
 *
 * The pipeline enforces these group dimensions bit-exactly on ingest;
 * everything emitted here is validated against the same table before a
 * single line is written.
 */

export const GROUPS = {
  bert_title_desc_tags: { dim: 768, scope: "video" },
  bert_captions: { dim: 768, scope: "video" },
  nela: { dim: 260, scope: "video" },
  numeric_meta: { dim: 5, scope: "video" },
  ivectors: { dim: 600, scope: "episode" },
  opensmile_is09: { dim: 385, scope: "episode" },
} as const;

export type GroupName = keyof typeof GROUPS;

/** Canonical group ordering used for stable output files. */
export const GROUP_ORDER: readonly GroupName[] = [
  "bert_title_desc_tags",
  "bert_captions",
  "nela",
  "numeric_meta",
  "ivectors",
  "opensmile_is09",
];

export interface FeatureRecord {
  group: GroupName;
  video_id: string;
  episode_index?: number;
  vector: number[];
}

/** Video row of the pipeline's videos.jsonl manifest. */
export interface ManifestVideo {
  id: string;
  channel_id: string;
  title: string;
  description: string;
  tags: string[];
  views: number;
  likes: number;
  dislikes: number;
  comments: number;
  duration_s: number;
}

export class ValidationError extends Error {}

export class ConfigurationError extends Error {}

export function isGroupName(name: string): name is GroupName {
  return Object.prototype.hasOwnProperty.call(GROUPS, name);
}

export function validateRecord(record: FeatureRecord): void {
  if (!isGroupName(record.group)) {
    throw new ValidationError(`unknown feature group '${record.group}'`);
  }
  const spec = GROUPS[record.group];
  if (record.vector.length !== spec.dim) {
    throw new ValidationError(
      `group '${record.group}' expects dimension ${spec.dim}, got ` +
        `${record.vector.length} (video '${record.video_id}')`,
    );
  }
  for (const value of record.vector) {
    if (typeof value !== "number" || !Number.isFinite(value)) {
      throw new ValidationError(
        `non-finite value in group '${record.group}' for video '${record.video_id}'`,
      );
    }
  }
  if (spec.scope === "episode") {
    if (record.episode_index === undefined || !Number.isInteger(record.episode_index)) {
      throw new ValidationError(
        `group '${record.group}' is episode-scoped but the record for video ` +
          `'${record.video_id}' has no episode_index`,
      );
    }
    if (record.episode_index < 0) {
      throw new ValidationError(`episode_index must be >= 0, got ${record.episode_index}`);
    }
  } else if (record.episode_index !== undefined) {
    throw new ValidationError(
      `group '${record.group}' is video-scoped but the record for video ` +
        `'${record.video_id}' carries episode_index ${record.episode_index}`,
    );
  }
}

/** Serialize with a fixed key order so identical runs emit identical bytes. */
export function recordToJson(record: FeatureRecord): string {
  validateRecord(record);
  const parts = [`"group":${JSON.stringify(record.group)}`, `"video_id":${JSON.stringify(record.video_id)}`];
  if (record.episode_index !== undefined) {
    parts.push(`"episode_index":${record.episode_index}`);
  }
  parts.push(`"vector":[${record.vector.map((v) => serializeNumber(v)).join(",")}]`);
  return `{${parts.join(",")}}`;
}

function serializeNumber(value: number): string {
  // JSON.stringify(-0) is "0"; keep that behavior explicit and reject non-finite.
  if (!Number.isFinite(value)) {
    throw new ValidationError(`cannot serialize non-finite value ${value}`);
  }
  return JSON.stringify(value);
}

const REQUIRED_VIDEO_FIELDS = [
  "id",
  "channel_id",
  "title",
  "description",
  "views",
  "likes",
  "dislikes",
  "comments",
  "duration_s",
] as const;

export function parseVideosJsonl(text: string): ManifestVideo[] {
  const videos: ManifestVideo[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let obj: Record<string, unknown>;
    try {
      obj = JSON.parse(line);
    } catch (err) {
      throw new ValidationError(`videos.jsonl line ${i + 1}: invalid JSON (${err})`);
    }
    for (const field of REQUIRED_VIDEO_FIELDS) {
      if (!(field in obj)) {
        throw new ValidationError(`videos.jsonl line ${i + 1}: missing field '${field}'`);
      }
    }
    videos.push({
      id: String(obj.id),
      channel_id: String(obj.channel_id),
      title: String(obj.title),
      description: String(obj.description),
      tags: Array.isArray(obj.tags) ? obj.tags.map(String) : [],
      views: Number(obj.views),
      likes: Number(obj.likes),
      dislikes: Number(obj.dislikes),
      comments: Number(obj.comments),
      duration_s: Number(obj.duration_s),
    });
  }
  return videos;
}
