/**
 * Spectral frontend shared by the embedding backends: Hann-windowed STFT
 * power spectra pushed through an HTK-style triangular mel filterbank,
 * then a log compression whose flavor each model family configures.
 */

export interface MelFrontendConfig {
  sampleRate: number;
  fftSize: number;
  windowSize: number;
  hopSize: number;
  melBands: number;
  fminHz: number;
  fmaxHz: number;
  /** "ln-offset": ln(mel + offset); "db": 10*log10(max(mel, floor)). */
  logMode: "ln-offset" | "db";
  logOffset: number;
}

/** In-place iterative radix-2 FFT over interleaved re/im arrays. */
export function fft(re: Float64Array, im: Float64Array): void {
  const n = re.length;
  if (n === 0 || (n & (n - 1)) !== 0) {
    throw new Error(`FFT size must be a power of two, got ${n}`);
  }
  // bit-reversal permutation
  for (let i = 1, j = 0; i < n; i++) {
    let bit = n >> 1;
    for (; j & bit; bit >>= 1) {
      j ^= bit;
    }
    j ^= bit;
    if (i < j) {
      [re[i], re[j]] = [re[j], re[i]];
      [im[i], im[j]] = [im[j], im[i]];
    }
  }
  for (let len = 2; len <= n; len <<= 1) {
    const angle = (-2 * Math.PI) / len;
    const wRe = Math.cos(angle);
    const wIm = Math.sin(angle);
    for (let start = 0; start < n; start += len) {
      let curRe = 1;
      let curIm = 0;
      for (let k = 0; k < len / 2; k++) {
        const evenRe = re[start + k];
        const evenIm = im[start + k];
        const oddRe = re[start + k + len / 2] * curRe - im[start + k + len / 2] * curIm;
        const oddIm = re[start + k + len / 2] * curIm + im[start + k + len / 2] * curRe;
        re[start + k] = evenRe + oddRe;
        im[start + k] = evenIm + oddIm;
        re[start + k + len / 2] = evenRe - oddRe;
        im[start + k + len / 2] = evenIm - oddIm;
        const nextRe = curRe * wRe - curIm * wIm;
        curIm = curRe * wIm + curIm * wRe;
        curRe = nextRe;
      }
    }
  }
}

export function hannWindow(size: number): Float64Array {
  const window = new Float64Array(size);
  for (let i = 0; i < size; i++) {
    window[i] = 0.5 - 0.5 * Math.cos((2 * Math.PI * i) / size);
  }
  return window;
}

const hzToMel = (hz: number): number => 2595 * Math.log10(1 + hz / 700);
const melToHz = (mel: number): number => 700 * (Math.pow(10, mel / 2595) - 1);

/**
 * Triangular mel filterbank as a dense [melBands][fftSize/2+1] matrix.
 */
export function melFilterbank(
  fftSize: number,
  melBands: number,
  fminHz: number,
  fmaxHz: number,
  sampleRate: number,
): Float64Array[] {
  const bins = fftSize / 2 + 1;
  const melMin = hzToMel(fminHz);
  const melMax = hzToMel(fmaxHz);
  const melPoints = new Float64Array(melBands + 2);
  for (let i = 0; i < melPoints.length; i++) {
    melPoints[i] = melToHz(melMin + ((melMax - melMin) * i) / (melBands + 1));
  }
  const binHz = sampleRate / fftSize;
  const filters: Float64Array[] = [];
  for (let band = 0; band < melBands; band++) {
    const filter = new Float64Array(bins);
    const [lower, center, upper] = [melPoints[band], melPoints[band + 1], melPoints[band + 2]];
    for (let bin = 0; bin < bins; bin++) {
      const hz = bin * binHz;
      if (hz >= lower && hz <= center && center > lower) {
        filter[bin] = (hz - lower) / (center - lower);
      } else if (hz > center && hz <= upper && upper > center) {
        filter[bin] = (upper - hz) / (upper - center);
      }
    }
    filters.push(filter);
  }
  return filters;
}

export class MelFrontend {
  readonly config: MelFrontendConfig;
  private readonly window: Float64Array;
  private readonly filters: Float64Array[];

  constructor(config: MelFrontendConfig) {
    if (config.windowSize > config.fftSize) {
      throw new Error("windowSize must not exceed fftSize");
    }
    this.config = config;
    this.window = hannWindow(config.windowSize);
    this.filters = melFilterbank(
      config.fftSize,
      config.melBands,
      config.fminHz,
      config.fmaxHz,
      config.sampleRate,
    );
  }

  /** Number of STFT frames produced for a sample count. */
  frameCount(samples: number): number {
    if (samples < this.config.windowSize) {
      return 0;
    }
    return 1 + Math.floor((samples - this.config.windowSize) / this.config.hopSize);
  }

  /**
   * Log-mel patch for a waveform chunk: row-major [frames][melBands].
   */
  logMel(samples: Float32Array): { data: Float32Array; frames: number } {
    const { fftSize, hopSize, windowSize, melBands, logMode, logOffset } = this.config;
    const frames = this.frameCount(samples.length);
    const bins = fftSize / 2 + 1;
    const out = new Float32Array(frames * melBands);
    const re = new Float64Array(fftSize);
    const im = new Float64Array(fftSize);
    const power = new Float64Array(bins);
    for (let frame = 0; frame < frames; frame++) {
      re.fill(0);
      im.fill(0);
      const start = frame * hopSize;
      for (let i = 0; i < windowSize; i++) {
        re[i] = samples[start + i] * this.window[i];
      }
      fft(re, im);
      for (let bin = 0; bin < bins; bin++) {
        power[bin] = re[bin] * re[bin] + im[bin] * im[bin];
      }
      for (let band = 0; band < melBands; band++) {
        const filter = this.filters[band];
        let acc = 0;
        for (let bin = 0; bin < bins; bin++) {
          acc += filter[bin] * power[bin];
        }
        out[frame * melBands + band] =
          logMode === "ln-offset"
            ? Math.log(acc + logOffset)
            : 10 * Math.log10(Math.max(acc, logOffset));
      }
    }
    return { data: out, frames };
  }
}
