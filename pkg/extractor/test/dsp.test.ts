import { describe, expect, it } from "vitest";

import { fft, hannWindow, MelFrontend, melFilterbank } from "../src/dsp";

function directDft(signal: Float64Array): { re: Float64Array; im: Float64Array } {
  const n = signal.length;
  const re = new Float64Array(n);
  const im = new Float64Array(n);
  for (let k = 0; k < n; k++) {
    for (let t = 0; t < n; t++) {
      const angle = (-2 * Math.PI * k * t) / n;
      re[k] += signal[t] * Math.cos(angle);
      im[k] += signal[t] * Math.sin(angle);
    }
  }
  return { re, im };
}

describe("fft", () => {
  it("matches a direct DFT on random input", () => {
    const n = 256;
    const signal = new Float64Array(n);
    let state = 12345;
    for (let i = 0; i < n; i++) {
      state = (state * 1103515245 + 12345) & 0x7fffffff;
      signal[i] = state / 0x7fffffff - 0.5;
    }
    const re = Float64Array.from(signal);
    const im = new Float64Array(n);
    fft(re, im);
    const reference = directDft(signal);
    for (let k = 0; k < n; k++) {
      expect(Math.abs(re[k] - reference.re[k])).toBeLessThan(1e-9);
      expect(Math.abs(im[k] - reference.im[k])).toBeLessThan(1e-9);
    }
  });

  it("puts a pure tone's energy in the right bin", () => {
    const n = 512;
    const bin = 32;
    const re = new Float64Array(n);
    const im = new Float64Array(n);
    for (let i = 0; i < n; i++) {
      re[i] = Math.cos((2 * Math.PI * bin * i) / n);
    }
    fft(re, im);
    const magnitudes = Array.from({ length: n / 2 }, (_, k) =>
      Math.hypot(re[k], im[k]),
    );
    const peak = magnitudes.indexOf(Math.max(...magnitudes));
    expect(peak).toBe(bin);
    expect(magnitudes[bin]).toBeCloseTo(n / 2, 6);
  });

  it("rejects non-power-of-two sizes", () => {
    expect(() => fft(new Float64Array(100), new Float64Array(100))).toThrow();
  });
});

describe("hannWindow", () => {
  it("is zero at the edges and one in the middle", () => {
    const window = hannWindow(400);
    expect(window[0]).toBeCloseTo(0, 12);
    expect(window[200]).toBeCloseTo(1, 6);
  });
});

describe("melFilterbank", () => {
  it("covers the band with non-empty triangular filters", () => {
    const filters = melFilterbank(512, 64, 125, 7500, 16000);
    expect(filters.length).toBe(64);
    for (const filter of filters) {
      expect(filter.length).toBe(257);
      const total = filter.reduce((acc, v) => acc + v, 0);
      expect(total).toBeGreaterThan(0);
      for (const value of filter) {
        expect(value).toBeGreaterThanOrEqual(0);
        expect(value).toBeLessThanOrEqual(1 + 1e-12);
      }
    }
  });
});

describe("MelFrontend", () => {
  const config = {
    sampleRate: 16000,
    fftSize: 512,
    windowSize: 400,
    hopSize: 160,
    melBands: 64,
    fminHz: 125,
    fmaxHz: 7500,
    logMode: "ln-offset" as const,
    logOffset: 0.01,
  };

  it("produces the documented frame count for one second", () => {
    const frontend = new MelFrontend(config);
    expect(frontend.frameCount(16000)).toBe(98);
    const { data, frames } = frontend.logMel(new Float32Array(16000));
    expect(frames).toBe(98);
    expect(data.length).toBe(98 * 64);
  });

  it("maps silence to the log offset floor", () => {
    const frontend = new MelFrontend(config);
    const { data } = frontend.logMel(new Float32Array(16000));
    const floor = Math.log(0.01);
    for (const value of data) {
      // outputs are float32; compare at that precision
      expect(Math.abs(value - floor)).toBeLessThan(1e-6);
    }
  });

  it("gives a tone more energy than silence in db mode", () => {
    const frontend = new MelFrontend({
      ...config,
      sampleRate: 32000,
      fftSize: 1024,
      windowSize: 1024,
      hopSize: 320,
      fminHz: 50,
      fmaxHz: 14000,
      logMode: "db",
      logOffset: 1e-10,
    });
    const tone = new Float32Array(32000);
    for (let i = 0; i < tone.length; i++) {
      tone[i] = 0.5 * Math.sin((2 * Math.PI * 1000 * i) / 32000);
    }
    const toneMel = frontend.logMel(tone);
    const silentMel = frontend.logMel(new Float32Array(32000));
    const sum = (xs: Float32Array) => xs.reduce((acc, v) => acc + v, 0);
    expect(sum(toneMel.data)).toBeGreaterThan(sum(silentMel.data));
    expect(toneMel.frames).toBe(97);
  });

  it("stays finite on silence and full-scale noise", () => {
    const frontend = new MelFrontend(config);
    const loud = new Float32Array(16000).fill(1);
    for (const { data } of [frontend.logMel(loud), frontend.logMel(new Float32Array(16000))]) {
      for (const value of data) {
        expect(Number.isFinite(value)).toBe(true);
      }
    }
  });
});
