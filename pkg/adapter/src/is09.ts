/**
 * Acoustic episode features in the emotion-challenge baseline layout:
 * 16 low-level descriptors (ZCR, RMS energy, F0, HNR, MFCC 1-12), their
 * frame deltas, 12 statistical functionals over each contour, plus one
 * overall voicing rate: 16 * 12 * 2 + 1 = 385 values per episode.
 *
 * The built-in backend computes everything from PCM samples with no
 * external binaries, so extraction is deterministic and self-contained.
 * An openSMILE-based backend can be plugged in behind the same
 * interface where the toolkit is installed.
 */

import { ConfigurationError } from "./schema.js";

export const IS09_DIM = 385;

const EPISODE_MS = 15_000;
const FRAME_MS = 25;
const HOP_MS = 10;
const N_MEL_FILTERS = 26;
const N_MFCC = 12;
const F0_MIN_HZ = 50;
const F0_MAX_HZ = 500;
const VOICING_THRESHOLD = 0.3;

export class AudioDecodeError extends Error {}

export interface DecodedAudio {
  sampleRate: number;
  samples: Float64Array;
}

export interface Is09Backend {
  readonly id: string;
  readonly version: string;
  /** Extract 385 features for the 15 s window starting at startMs. */
  extract(audio: DecodedAudio, startMs: number): number[];
}

/** Decode a 16-bit PCM RIFF/WAVE buffer; stereo is averaged to mono. */
export function decodeWav(buffer: Buffer): DecodedAudio {
  if (buffer.length < 44 || buffer.toString("ascii", 0, 4) !== "RIFF" ||
      buffer.toString("ascii", 8, 12) !== "WAVE") {
    throw new AudioDecodeError("not a RIFF/WAVE file");
  }
  let offset = 12;
  let sampleRate = 0;
  let channels = 0;
  let bitsPerSample = 0;
  let data: Buffer | null = null;
  while (offset + 8 <= buffer.length) {
    const chunkId = buffer.toString("ascii", offset, offset + 4);
    const chunkSize = buffer.readUInt32LE(offset + 4);
    const body = offset + 8;
    if (chunkId === "fmt ") {
      if (body + 16 > buffer.length) {
        throw new AudioDecodeError("truncated fmt chunk");
      }
      const format = buffer.readUInt16LE(body);
      channels = buffer.readUInt16LE(body + 2);
      sampleRate = buffer.readUInt32LE(body + 4);
      bitsPerSample = buffer.readUInt16LE(body + 14);
      if (format !== 1) {
        throw new AudioDecodeError(`unsupported WAVE format ${format}, expected PCM`);
      }
      if (bitsPerSample !== 16) {
        throw new AudioDecodeError(`unsupported bit depth ${bitsPerSample}, expected 16`);
      }
    } else if (chunkId === "data") {
      data = buffer.subarray(body, Math.min(body + chunkSize, buffer.length));
    }
    offset = body + chunkSize + (chunkSize % 2);
  }
  if (!sampleRate || !channels || !data) {
    throw new AudioDecodeError("missing fmt or data chunk");
  }
  const frameCount = Math.floor(data.length / (2 * channels));
  const samples = new Float64Array(frameCount);
  for (let i = 0; i < frameCount; i++) {
    let acc = 0;
    for (let c = 0; c < channels; c++) {
      acc += data.readInt16LE((i * channels + c) * 2);
    }
    samples[i] = acc / (channels * 32768);
  }
  return { sampleRate, samples };
}

// ---------------------------------------------------------------------------
// DSP primitives
// ---------------------------------------------------------------------------

function fft(real: Float64Array, imag: Float64Array): void {
  const n = real.length;
  for (let i = 1, j = 0; i < n; i++) {
    let bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      [real[i], real[j]] = [real[j], real[i]];
      [imag[i], imag[j]] = [imag[j], imag[i]];
    }
  }
  for (let len = 2; len <= n; len <<= 1) {
    const angle = (-2 * Math.PI) / len;
    const wr = Math.cos(angle);
    const wi = Math.sin(angle);
    for (let start = 0; start < n; start += len) {
      let cr = 1;
      let ci = 0;
      for (let k = 0; k < len / 2; k++) {
        const even = start + k;
        const odd = start + k + len / 2;
        const tr = real[odd] * cr - imag[odd] * ci;
        const ti = real[odd] * ci + imag[odd] * cr;
        real[odd] = real[even] - tr;
        imag[odd] = imag[even] - ti;
        real[even] += tr;
        imag[even] += ti;
        const ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

function hamming(length: number): Float64Array {
  const window = new Float64Array(length);
  for (let i = 0; i < length; i++) {
    window[i] = 0.54 - 0.46 * Math.cos((2 * Math.PI * i) / (length - 1));
  }
  return window;
}

function melScale(hz: number): number {
  return 2595 * Math.log10(1 + hz / 700);
}

function melInverse(mel: number): number {
  return 700 * (10 ** (mel / 2595) - 1);
}

function melFilterbank(fftSize: number, sampleRate: number): Float64Array[] {
  const nBins = fftSize / 2 + 1;
  const maxMel = melScale(sampleRate / 2);
  const centers: number[] = [];
  for (let m = 0; m < N_MEL_FILTERS + 2; m++) {
    const hz = melInverse((maxMel * m) / (N_MEL_FILTERS + 1));
    centers.push((hz / (sampleRate / 2)) * (nBins - 1));
  }
  const filters: Float64Array[] = [];
  for (let m = 1; m <= N_MEL_FILTERS; m++) {
    const filter = new Float64Array(nBins);
    const [lo, mid, hi] = [centers[m - 1], centers[m], centers[m + 1]];
    for (let bin = 0; bin < nBins; bin++) {
      if (bin > lo && bin < mid) filter[bin] = (bin - lo) / (mid - lo);
      else if (bin >= mid && bin < hi) filter[bin] = (hi - bin) / (hi - mid);
    }
    filters.push(filter);
  }
  return filters;
}

interface FrameFeatures {
  zcr: number;
  rms: number;
  f0: number;
  hnr: number;
  mfcc: number[];
  voiced: boolean;
}

function analyzeFrame(
  frame: Float64Array,
  sampleRate: number,
  window: Float64Array,
  filters: Float64Array[],
  fftSize: number,
): FrameFeatures {
  const n = frame.length;

  let crossings = 0;
  let energy = 0;
  for (let i = 0; i < n; i++) {
    energy += frame[i] * frame[i];
    if (i > 0 && frame[i - 1] * frame[i] < 0) crossings++;
  }
  const zcr = crossings / (n - 1);
  const rms = Math.sqrt(energy / n);

  // normalized autocorrelation peak in the plausible pitch-lag range
  const minLag = Math.max(2, Math.floor(sampleRate / F0_MAX_HZ));
  const maxLag = Math.min(n - 2, Math.ceil(sampleRate / F0_MIN_HZ));
  let bestLag = 0;
  let bestR = 0;
  if (energy > 1e-12 && maxLag > minLag) {
    for (let lag = minLag; lag <= maxLag; lag++) {
      let acc = 0;
      for (let i = 0; i + lag < n; i++) acc += frame[i] * frame[i + lag];
      const r = acc / energy;
      if (r > bestR) {
        bestR = r;
        bestLag = lag;
      }
    }
  }
  const voiced = bestR > VOICING_THRESHOLD && bestLag > 0;
  const f0 = voiced ? sampleRate / bestLag : 0;
  const clamped = Math.min(Math.max(bestR, 1e-6), 1 - 1e-6);
  const hnr = voiced ? 10 * Math.log10(clamped / (1 - clamped)) : 0;

  const real = new Float64Array(fftSize);
  const imag = new Float64Array(fftSize);
  for (let i = 0; i < n; i++) real[i] = frame[i] * window[i];
  fft(real, imag);
  const nBins = fftSize / 2 + 1;
  const power = new Float64Array(nBins);
  for (let bin = 0; bin < nBins; bin++) {
    power[bin] = real[bin] * real[bin] + imag[bin] * imag[bin];
  }
  const logMel = filters.map((filter) => {
    let acc = 0;
    for (let bin = 0; bin < nBins; bin++) acc += filter[bin] * power[bin];
    return Math.log(acc + 1e-10);
  });
  const mfcc: number[] = [];
  const scale = Math.sqrt(2 / N_MEL_FILTERS);
  for (let k = 1; k <= N_MFCC; k++) {
    let acc = 0;
    for (let m = 0; m < N_MEL_FILTERS; m++) {
      acc += logMel[m] * Math.cos((Math.PI * k * (m + 0.5)) / N_MEL_FILTERS);
    }
    mfcc.push(scale * acc);
  }
  return { zcr, rms, f0, hnr, mfcc, voiced };
}

/** 12 functionals summarizing one descriptor contour. */
export function functionals(series: number[]): number[] {
  const n = series.length;
  let mean = 0;
  for (const v of series) mean += v;
  mean /= n;

  let m2 = 0;
  let m3 = 0;
  let m4 = 0;
  let min = series[0];
  let max = series[0];
  let minPos = 0;
  let maxPos = 0;
  for (let i = 0; i < n; i++) {
    const d = series[i] - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
    if (series[i] < min) {
      min = series[i];
      minPos = i;
    }
    if (series[i] > max) {
      max = series[i];
      maxPos = i;
    }
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const std = Math.sqrt(m2);
  const skewness = std > 1e-12 ? m3 / (std * std * std) : 0;
  const kurtosis = std > 1e-12 ? m4 / (m2 * m2) - 3 : 0;
  const relMinPos = n > 1 ? minPos / (n - 1) : 0;
  const relMaxPos = n > 1 ? maxPos / (n - 1) : 0;

  // least-squares line over normalized time 0..1
  let slope = 0;
  let offset = mean;
  let mse = m2;
  if (n > 1) {
    const tMean = 0.5;
    let sTT = 0;
    let sTY = 0;
    for (let i = 0; i < n; i++) {
      const t = i / (n - 1) - tMean;
      sTT += t * t;
      sTY += t * (series[i] - mean);
    }
    slope = sTY / sTT;
    offset = mean - slope * tMean;
    mse = 0;
    for (let i = 0; i < n; i++) {
      const fit = offset + slope * (i / (n - 1));
      mse += (series[i] - fit) ** 2;
    }
    mse /= n;
  }
  return [mean, std, skewness, kurtosis, min, max, max - min, relMinPos, relMaxPos, slope, offset, mse];
}

export class BuiltinIs09Backend implements Is09Backend {
  readonly id = "builtin-dsp";
  readonly version = "1.0.0";

  extract(audio: DecodedAudio, startMs: number): number[] {
    const { sampleRate, samples } = audio;
    if (startMs < 0) {
      throw new AudioDecodeError(`episode start must be >= 0, got ${startMs}`);
    }
    const start = Math.floor((startMs / 1000) * sampleRate);
    const needed = start + Math.floor((EPISODE_MS / 1000) * sampleRate);
    if (needed > samples.length) {
      throw new AudioDecodeError(
        `clip provides ${samples.length} samples but the episode at ${startMs} ms needs ${needed}`,
      );
    }
    const segment = samples.subarray(start, needed);

    const frameLen = Math.floor((FRAME_MS / 1000) * sampleRate);
    const hop = Math.floor((HOP_MS / 1000) * sampleRate);
    let fftSize = 1;
    while (fftSize < frameLen) fftSize <<= 1;
    const window = hamming(frameLen);
    const filters = melFilterbank(fftSize, sampleRate);

    const contours: number[][] = Array.from({ length: 16 }, () => []);
    let voicedFrames = 0;
    let totalFrames = 0;
    for (let pos = 0; pos + frameLen <= segment.length; pos += hop) {
      const features = analyzeFrame(
        segment.subarray(pos, pos + frameLen), sampleRate, window, filters, fftSize,
      );
      contours[0].push(features.zcr);
      contours[1].push(features.rms);
      contours[2].push(features.f0);
      contours[3].push(features.hnr);
      for (let k = 0; k < N_MFCC; k++) contours[4 + k].push(features.mfcc[k]);
      voicedFrames += features.voiced ? 1 : 0;
      totalFrames++;
    }
    if (totalFrames === 0) {
      throw new AudioDecodeError("episode yields no analysis frames");
    }

    const deltas = contours.map((contour) => {
      const delta = new Array(contour.length);
      delta[0] = 0;
      for (let t = 1; t < contour.length; t++) delta[t] = contour[t] - contour[t - 1];
      return delta;
    });

    const out: number[] = [];
    for (const contour of contours) out.push(...functionals(contour));
    for (const delta of deltas) out.push(...functionals(delta));
    out.push(voicedFrames / totalFrames);
    if (out.length !== IS09_DIM) {
      throw new Error(`internal: produced ${out.length} features, expected ${IS09_DIM}`);
    }
    return out;
  }
}

export function createIs09Backend(backend = "builtin-dsp"): Is09Backend {
  if (backend === "builtin-dsp") {
    return new BuiltinIs09Backend();
  }
  throw new ConfigurationError(
    `acoustic backend '${backend}' is not configured; available: builtin-dsp`,
  );
}
