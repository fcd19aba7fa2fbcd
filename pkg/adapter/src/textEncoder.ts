/**
 * Sentence encoders producing the 768-dimensional text representation.
 *
 * The default backend is a deterministic hashed-token projection: every
 * token hashes to a fixed pseudo-random unit vector and a text embeds
 * as the L2-normalized sum. It needs no model download, is stable
 * across runs and platforms, and exercises the full record pipeline.
 * A pretrained transformer service can be swapped in behind the same
 * interface; requesting a backend that is not configured is a
 * configuration error, not a silent fallback.
 */

import { ConfigurationError } from "./schema.js";

export const TEXT_DIM = 768;

export interface EncodedText {
  vector: number[];
  /** Characters dropped when the input exceeded the encoder window. */
  truncatedChars: number;
  /** True when the input was empty and the zero vector was emitted. */
  empty: boolean;
}

export interface TextEncoder768 {
  readonly id: string;
  readonly version: string;
  /** Maximum number of tokens consumed per input. */
  readonly windowTokens: number;
  encode(text: string): EncodedText;
}

/** 32-bit FNV-1a hash; stable across platforms. */
function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

/** Deterministic PRNG over a 32-bit seed. */
function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function tokenize(text: string): string[] {
  return text
    .toLowerCase()
    .split(/[^\p{L}\p{N}]+/u)
    .filter((token) => token.length > 0);
}

export class HashProjectionEncoder implements TextEncoder768 {
  readonly id = "hash-projection";
  readonly version = "1.0.0";
  readonly windowTokens: number;
  private readonly cache = new Map<string, Float64Array>();

  constructor(windowTokens = 512) {
    this.windowTokens = windowTokens;
  }

  private tokenVector(token: string): Float64Array {
    const cached = this.cache.get(token);
    if (cached) return cached;
    const rand = mulberry32(fnv1a(token));
    const vec = new Float64Array(TEXT_DIM);
    let norm = 0;
    for (let i = 0; i < TEXT_DIM; i++) {
      const v = rand() * 2 - 1;
      vec[i] = v;
      norm += v * v;
    }
    norm = Math.sqrt(norm);
    for (let i = 0; i < TEXT_DIM; i++) vec[i] /= norm;
    this.cache.set(token, vec);
    return vec;
  }

  encode(text: string): EncodedText {
    const tokens = tokenize(text);
    if (tokens.length === 0) {
      return { vector: new Array(TEXT_DIM).fill(0), truncatedChars: 0, empty: true };
    }
    const kept = tokens.slice(0, this.windowTokens);
    const dropped = tokens.slice(this.windowTokens);
    const truncatedChars = dropped.reduce((sum, token) => sum + token.length, 0);

    const sum = new Float64Array(TEXT_DIM);
    for (const token of kept) {
      const vec = this.tokenVector(token);
      for (let i = 0; i < TEXT_DIM; i++) sum[i] += vec[i];
    }
    let norm = 0;
    for (let i = 0; i < TEXT_DIM; i++) norm += sum[i] * sum[i];
    norm = Math.sqrt(norm);
    const vector = new Array(TEXT_DIM);
    for (let i = 0; i < TEXT_DIM; i++) vector[i] = norm > 0 ? sum[i] / norm : 0;
    return { vector, truncatedChars, empty: false };
  }
}

export interface TextEncoderConfig {
  backend?: string;
  windowTokens?: number;
}

export function createTextEncoder(config: TextEncoderConfig = {}): TextEncoder768 {
  const backend = config.backend ?? "hash-projection";
  if (backend === "hash-projection") {
    return new HashProjectionEncoder(config.windowTokens);
  }
  throw new ConfigurationError(
    `text encoder backend '${backend}' is not configured; available: hash-projection`,
  );
}

/** Title, description, and tags joined with single spaces. */
export function titleDescTagsText(title: string, description: string, tags: string[]): string {
  return [title, description, ...tags].join(" ");
}
