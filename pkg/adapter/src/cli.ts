/**
 * Extraction CLI: reads the pipeline's videos.jsonl manifest, an
 * audio-path map, and optional caption text files, then writes
 * features.jsonl plus extraction.lock.json to the output directory.
 *
 * Audio map format: {"<video_id>": [{"index": 0, "path": "ep0.wav",
 * "start_ms": 0}, ...], ...}
 */

import { existsSync, mkdirSync, readFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";

import { runJob, type EpisodeClip, type JobVideo } from "./extract.js";
import { writeResult } from "./jsonl.js";
import {
  ConfigurationError,
  isGroupName,
  parseVideosJsonl,
  ValidationError,
  type GroupName,
} from "./schema.js";
import { createTextEncoder } from "./textEncoder.js";
import { createIs09Backend } from "./is09.js";

interface AudioMapEntry {
  index: number;
  path: string;
  start_ms?: number;
}

export function main(argv: string[]): number {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        videos: { type: "string" },
        "audio-map": { type: "string" },
        captions: { type: "string" },
        groups: { type: "string", default: "bert_title_desc_tags,bert_captions,numeric_meta,opensmile_is09" },
        out: { type: "string", default: "out" },
        "text-backend": { type: "string", default: "hash-projection" },
        "audio-backend": { type: "string", default: "builtin-dsp" },
        help: { type: "boolean", default: false },
      },
    }));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }

  if (values.help) {
    console.log(
      "usage: extract --videos videos.jsonl [--audio-map map.json] " +
        "[--captions dir] [--groups a,b,c] [--out dir]",
    );
    return 0;
  }

  try {
    if (!values.videos) {
      throw new ConfigurationError("--videos is required");
    }
    const groups: GroupName[] = [];
    for (const name of values.groups.split(",").map((g) => g.trim()).filter(Boolean)) {
      if (!isGroupName(name)) {
        throw new ConfigurationError(`unknown feature group '${name}'`);
      }
      groups.push(name);
    }

    const manifest = parseVideosJsonl(readFileSync(values.videos, "utf-8"));
    const audioMap: Record<string, AudioMapEntry[]> = values["audio-map"]
      ? JSON.parse(readFileSync(values["audio-map"], "utf-8"))
      : {};

    const videos: JobVideo[] = manifest.map((video) => {
      const episodes: EpisodeClip[] = (audioMap[video.id] ?? []).map((entry) => ({
        index: entry.index,
        audioPath: entry.path,
        startMs: entry.start_ms ?? 0,
      }));
      let captionText: string | undefined;
      if (values.captions) {
        const captionPath = join(values.captions, `${video.id}.txt`);
        if (existsSync(captionPath)) {
          captionText = readFileSync(captionPath, "utf-8");
        }
      }
      return { ...video, captionText, episodes };
    });

    const result = runJob({
      videos,
      groups,
      textEncoder: createTextEncoder({ backend: values["text-backend"] }),
      is09Backend: createIs09Backend(values["audio-backend"]),
    });

    mkdirSync(values.out, { recursive: true });
    const featuresPath = join(values.out, "features.jsonl");
    const lockPath = join(values.out, "extraction.lock.json");
    writeResult(result, featuresPath, lockPath);

    for (const clipError of result.errors) {
      console.error(
        `warning: ${clipError.video_id} episode ${clipError.episode_index}: ${clipError.error}`,
      );
    }
    console.log(
      `videos=${videos.length} records=${result.records.length} ` +
        `errors=${result.errors.length} features=${featuresPath} lock=${lockPath}`,
    );
    return 0;
  } catch (err) {
    if (err instanceof ConfigurationError || err instanceof ValidationError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if ((err as NodeJS.ErrnoException).code) {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("cli.ts")) {
  process.exit(main(process.argv.slice(2)));
}
