/**
 * Cross-package contract: everything this adapter emits must ingest
 * cleanly through the classification pipeline's own CLI, and repeated
 * extraction with pinned backends must be bit-identical on disk.
 */

import { spawnSync } from "node:child_process";
import { mkdirSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { beforeAll, describe, expect, it } from "vitest";

import { main as cliMain } from "../src/cli.js";
import {
  fixtureChannelsJsonl,
  fixtureVideos,
  fixtureVideosJsonl,
  toneSamples,
  writeWavFile,
} from "./helpers.js";

const SR = 8000;

const pythonOk = (() => {
  const probe = spawnSync("python3", ["-c", "import tubebias"], { encoding: "utf-8" });
  return probe.status === 0;
})();

let workDir: string;
let channelsPath: string;
let videosPath: string;
let audioMapPath: string;
let captionsDir: string;

beforeAll(() => {
  workDir = mkdtempSync(join(tmpdir(), "adapter-roundtrip-"));
  channelsPath = join(workDir, "channels.jsonl");
  videosPath = join(workDir, "videos.jsonl");
  audioMapPath = join(workDir, "audio_map.json");
  captionsDir = join(workDir, "captions");
  mkdirSync(captionsDir);

  writeFileSync(channelsPath, fixtureChannelsJsonl());
  writeFileSync(videosPath, fixtureVideosJsonl());

  const audioMap: Record<string, { index: number; path: string }[]> = {};
  let seed = 10;
  for (const video of fixtureVideos()) {
    const episodes = [];
    for (let index = 0; index < 2; index++) {
      const clip = join(workDir, `${video.id}_${index}.wav`);
      writeWavFile(clip, toneSamples(16, SR, seed++), SR);
      episodes.push({ index, path: clip });
    }
    audioMap[video.id] = episodes;
    writeFileSync(join(captionsDir, `${video.id}.txt`), `captions for ${video.id}`);
  }
  writeFileSync(audioMapPath, JSON.stringify(audioMap));
});

function runExtraction(outName: string): { out: string; rc: number } {
  const out = join(workDir, outName);
  const rc = cliMain([
    "--videos", videosPath,
    "--audio-map", audioMapPath,
    "--captions", captionsDir,
    "--groups", "bert_title_desc_tags,bert_captions,numeric_meta,opensmile_is09",
    "--out", out,
  ]);
  return { out, rc };
}

describe("extraction CLI round-trip", () => {
  it("emits features that the pipeline ingests with zero validation errors", () => {
    const { out, rc } = runExtraction("run1");
    expect(rc).toBe(0);

    const lines = readFileSync(join(out, "features.jsonl"), "utf-8").trim().split("\n");
    // 3 videos x 3 video-scope groups + 6 episodes x 1 episode-scope group
    expect(lines).toHaveLength(3 * 3 + 6);
    for (const line of lines) {
      const record = JSON.parse(line);
      expect([768, 5, 385]).toContain(record.vector.length);
    }

    if (!pythonOk) {
      console.warn("tubebias pipeline not importable; skipping ingest subprocess check");
      return;
    }
    const ingest = spawnSync(
      "python3",
      [
        "-m", "tubebias.cli", "ingest",
        "--channels", channelsPath,
        "--videos", videosPath,
        "--features", join(out, "features.jsonl"),
      ],
      { encoding: "utf-8" },
    );
    expect(ingest.stderr).not.toContain("error:");
    expect(ingest.status).toBe(0);
    expect(ingest.stdout).toContain("feature_records=15");
  });

  it("is bit-identical across repeated runs with pinned backends", () => {
    const first = runExtraction("run2");
    const second = runExtraction("run3");
    expect(first.rc).toBe(0);
    expect(second.rc).toBe(0);
    expect(readFileSync(join(first.out, "features.jsonl"))).toEqual(
      readFileSync(join(second.out, "features.jsonl")),
    );
    expect(readFileSync(join(first.out, "extraction.lock.json"))).toEqual(
      readFileSync(join(second.out, "extraction.lock.json")),
    );
    const lock = JSON.parse(readFileSync(join(first.out, "extraction.lock.json"), "utf-8"));
    expect(lock.backends.bert_captions.id).toBe("hash-projection");
    expect(lock.backends.opensmile_is09.id).toBe("builtin-dsp");
  });

  it("fails with a usage error for unknown groups", () => {
    const rc = cliMain(["--videos", videosPath, "--groups", "mystery"]);
    expect(rc).toBe(1);
  });
});
