/**
 * Extraction jobs: turn manifest videos, caption text, and episode
 * audio clips into validated feature records plus a lock manifest that
 * pins every backend version used, so reruns are bit-identical.
 *
 * Per-clip audio failures become error entries and the run continues;
 * schema violations (wrong dimension, non-finite values) abort before
 * anything is written.
 */

import { readFileSync } from "node:fs";

import {
  AudioDecodeError,
  BuiltinIs09Backend,
  decodeWav,
  type Is09Backend,
} from "./is09.js";
import { extractMetadata } from "./metadata.js";
import {
  ConfigurationError,
  GROUP_ORDER,
  type FeatureRecord,
  type GroupName,
  type ManifestVideo,
  validateRecord,
} from "./schema.js";
import {
  HashProjectionEncoder,
  type TextEncoder768,
  titleDescTagsText,
} from "./textEncoder.js";

export const ADAPTER_NAME = "tubebias-adapter";
export const ADAPTER_VERSION = "0.1.0";

export interface EpisodeClip {
  index: number;
  audioPath: string;
  /** Episode start inside the clip, default 0 (pre-cut clips). */
  startMs?: number;
}

export interface JobVideo extends ManifestVideo {
  captionText?: string;
  episodes?: EpisodeClip[];
}

/** Optional per-group vector producers for groups without a built-in backend. */
export type VideoVectorPlugin = (video: JobVideo) => number[];

export interface ExtractionJob {
  videos: JobVideo[];
  groups: GroupName[];
  textEncoder?: TextEncoder768;
  is09Backend?: Is09Backend;
  plugins?: Partial<Record<GroupName, VideoVectorPlugin>>;
}

export interface ClipError {
  video_id: string;
  episode_index: number;
  group: GroupName;
  error: string;
}

export interface LockManifest {
  adapter: { name: string; version: string };
  backends: Record<string, { id: string; version: string }>;
  groups: GroupName[];
  /** Characters dropped per (video, group) when text exceeded the window. */
  truncations: Record<string, number>;
  /** (video, group) pairs that produced flagged zero vectors for empty text. */
  empty_texts: string[];
}

export interface ExtractionResult {
  records: FeatureRecord[];
  errors: ClipError[];
  lock: LockManifest;
}

const BUILTIN_TEXT_GROUPS: GroupName[] = ["bert_title_desc_tags", "bert_captions"];

export function runJob(job: ExtractionJob): ExtractionResult {
  const groups = GROUP_ORDER.filter((g) => job.groups.includes(g));
  if (groups.length !== job.groups.length || groups.length === 0) {
    throw new ConfigurationError(
      `job groups must be a non-empty subset of ${GROUP_ORDER.join(", ")}`,
    );
  }

  const textEncoder = job.textEncoder ?? new HashProjectionEncoder();
  const is09 = job.is09Backend ?? new BuiltinIs09Backend();
  const plugins = job.plugins ?? {};

  const backends: LockManifest["backends"] = {};
  for (const group of groups) {
    if (plugins[group]) {
      backends[group] = { id: `plugin:${group}`, version: "unpinned" };
    } else if (BUILTIN_TEXT_GROUPS.includes(group)) {
      backends[group] = { id: textEncoder.id, version: textEncoder.version };
    } else if (group === "numeric_meta") {
      backends[group] = { id: "metadata-packer", version: ADAPTER_VERSION };
    } else if (group === "opensmile_is09") {
      backends[group] = { id: is09.id, version: is09.version };
    } else {
      throw new ConfigurationError(
        `group '${group}' has no configured backend; supply a plugin for it`,
      );
    }
  }

  const records: FeatureRecord[] = [];
  const errors: ClipError[] = [];
  const truncations: Record<string, number> = {};
  const emptyTexts: string[] = [];

  for (const video of job.videos) {
    for (const group of groups) {
      const plugin = plugins[group];
      if (plugin) {
        records.push({ group, video_id: video.id, vector: plugin(video) });
        continue;
      }
      if (group === "bert_title_desc_tags" || group === "bert_captions") {
        const text =
          group === "bert_captions"
            ? video.captionText ?? ""
            : titleDescTagsText(video.title, video.description, video.tags);
        const encoded = textEncoder.encode(text);
        if (encoded.truncatedChars > 0) {
          truncations[`${video.id}/${group}`] = encoded.truncatedChars;
        }
        if (encoded.empty) {
          emptyTexts.push(`${video.id}/${group}`);
        }
        records.push({ group, video_id: video.id, vector: encoded.vector });
      } else if (group === "numeric_meta") {
        records.push({ group, video_id: video.id, vector: extractMetadata(video) });
      } else if (group === "opensmile_is09") {
        for (const clip of video.episodes ?? []) {
          try {
            const audio = decodeWav(readFileSync(clip.audioPath));
            const vector = is09.extract(audio, clip.startMs ?? 0);
            records.push({
              group,
              video_id: video.id,
              episode_index: clip.index,
              vector,
            });
          } catch (err) {
            if (err instanceof AudioDecodeError || (err as NodeJS.ErrnoException).code) {
              errors.push({
                video_id: video.id,
                episode_index: clip.index,
                group,
                error: String((err as Error).message ?? err),
              });
            } else {
              throw err;
            }
          }
        }
      }
    }
  }

  for (const record of records) {
    validateRecord(record);
  }

  const lock: LockManifest = {
    adapter: { name: ADAPTER_NAME, version: ADAPTER_VERSION },
    backends,
    groups,
    truncations,
    empty_texts: emptyTexts.sort(),
  };
  return { records, errors, lock };
}
