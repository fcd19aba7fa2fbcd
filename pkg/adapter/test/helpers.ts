/** Shared fixtures: deterministic WAV synthesis and tiny manifests. */

import { writeFileSync } from "node:fs";

export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Voiced-ish test signal: harmonic tone plus mild noise. */
export function toneSamples(seconds: number, sampleRate: number, seed = 1): Float64Array {
  const rand = mulberry32(seed);
  const n = Math.floor(seconds * sampleRate);
  const samples = new Float64Array(n);
  const f0 = 120 + 40 * rand();
  for (let i = 0; i < n; i++) {
    const t = i / sampleRate;
    samples[i] =
      0.5 * Math.sin(2 * Math.PI * f0 * t) +
      0.2 * Math.sin(2 * Math.PI * 2 * f0 * t) +
      0.05 * (rand() * 2 - 1);
  }
  return samples;
}

export function wavBuffer(
  samples: Float64Array,
  sampleRate: number,
  channels = 1,
): Buffer {
  const frames = Math.floor(samples.length / channels);
  const dataSize = frames * channels * 2;
  const buffer = Buffer.alloc(44 + dataSize);
  buffer.write("RIFF", 0, "ascii");
  buffer.writeUInt32LE(36 + dataSize, 4);
  buffer.write("WAVE", 8, "ascii");
  buffer.write("fmt ", 12, "ascii");
  buffer.writeUInt32LE(16, 16);
  buffer.writeUInt16LE(1, 20); // PCM
  buffer.writeUInt16LE(channels, 22);
  buffer.writeUInt32LE(sampleRate, 24);
  buffer.writeUInt32LE(sampleRate * channels * 2, 28);
  buffer.writeUInt16LE(channels * 2, 32);
  buffer.writeUInt16LE(16, 34);
  buffer.write("data", 36, "ascii");
  buffer.writeUInt32LE(dataSize, 40);
  for (let i = 0; i < frames * channels; i++) {
    const clamped = Math.max(-1, Math.min(1, samples[i]));
    buffer.writeInt16LE(Math.round(clamped * 32767), 44 + i * 2);
  }
  return buffer;
}

export function writeWavFile(
  path: string,
  samples: Float64Array,
  sampleRate: number,
  channels = 1,
): void {
  writeFileSync(path, wavBuffer(samples, sampleRate, channels));
}

export interface FixtureVideo {
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

export function fixtureVideos(): FixtureVideo[] {
  return [
    {
      id: "fixv1", channel_id: "fixc1", title: "Morning briefing",
      description: "Daily roundup of the news", tags: ["news", "morning"],
      views: 1200, likes: 40, dislikes: 3, comments: 11, duration_s: 240,
    },
    {
      id: "fixv2", channel_id: "fixc1", title: "Evening analysis",
      description: "Longer-form discussion", tags: ["analysis"],
      views: 800, likes: 22, dislikes: 1, comments: 5, duration_s: 600,
    },
    {
      id: "fixv3", channel_id: "fixc2", title: "Weekend special",
      description: "", tags: [],
      views: 50, likes: 0, dislikes: 0, comments: 0, duration_s: 120,
    },
  ];
}

export function fixtureChannelsJsonl(): string {
  return (
    [
      { id: "fixc1", name: "Fixture One", youtube_url: "u1", label_raw: "left" },
      { id: "fixc2", name: "Fixture Two", youtube_url: "u2", label_raw: "center" },
    ]
      .map((c) => JSON.stringify(c))
      .join("\n") + "\n"
  );
}

export function fixtureVideosJsonl(): string {
  return fixtureVideos().map((v) => JSON.stringify(v)).join("\n") + "\n";
}
