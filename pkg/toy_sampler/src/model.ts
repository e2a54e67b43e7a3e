/**
 * Miniature attention encoder-decoder with variational dropout.
 *
 * One dropout mask per site is drawn for a whole forward pass and shared
 * across positions, so a mask pair behaves like one sampled set of model
 * weights: keeping the masks fixed reproduces the same function, drawing
 * fresh masks at inference time yields a new "model sample".  Training
 * uses the same two dropout sites (encoder state, decoder state) with
 * inverted scaling, so the dropout-off decode needs no rescaling.
 *
 * Gradients are hand-derived per architecture component (embeddings, two
 * dense+tanh layers, dot-product attention, output projection) and checked
 * against finite differences in the test suite.
 */

import { Rng, deriveSeed } from "./rng";

export interface ModelConfig {
  srcVocab: number;
  tgtVocab: number;
  dModel: number;
  maxLen: number;
  dropout: number;
  seed: number;
}

export interface SerializedModel {
  config: ModelConfig;
  params: Record<string, number[]>;
}

export interface Example {
  src: number[];
  /** Target word ids, BOS/EOS excluded; the loop adds them. */
  tgt: number[];
}

export interface Decoded {
  tokens: number[];
  /** Natural-log probability of the emitted sequence (EOS step included). */
  logprob: number;
}

/** Pair of dropout masks (encoder site, decoder site); entries 0 or 1/keep. */
export interface MaskPair {
  enc: Float64Array;
  dec: Float64Array;
}

export const BOS = 0;
export const EOS = 1;
/** First target id that encodes an actual vocabulary word. */
export const TGT_WORD_BASE = 2;

class Param {
  value: Float64Array;
  grad: Float64Array;
  m: Float64Array;
  v: Float64Array;

  constructor(
    readonly name: string,
    readonly rows: number,
    readonly cols: number,
    init: (k: number) => number
  ) {
    const size = rows * cols;
    this.value = new Float64Array(size);
    this.grad = new Float64Array(size);
    this.m = new Float64Array(size);
    this.v = new Float64Array(size);
    for (let k = 0; k < size; k++) this.value[k] = init(k);
  }
}

function matvec(w: Param, x: Float64Array, out: Float64Array): void {
  const { rows, cols, value } = w;
  for (let i = 0; i < rows; i++) {
    let acc = 0;
    const base = i * cols;
    for (let j = 0; j < cols; j++) acc += value[base + j] * x[j];
    out[i] = acc;
  }
}

/** out += W^T y */
function matvecTAdd(w: Param, y: Float64Array, out: Float64Array): void {
  const { rows, cols, value } = w;
  for (let i = 0; i < rows; i++) {
    const base = i * cols;
    const yi = y[i];
    if (yi === 0) continue;
    for (let j = 0; j < cols; j++) out[j] += value[base + j] * yi;
  }
}

/** grad += y (outer) x */
function addOuter(w: Param, y: Float64Array, x: Float64Array): void {
  const { rows, cols, grad } = w;
  for (let i = 0; i < rows; i++) {
    const yi = y[i];
    if (yi === 0) continue;
    const base = i * cols;
    for (let j = 0; j < cols; j++) grad[base + j] += yi * x[j];
  }
}

function softmaxInPlace(x: Float64Array): void {
  let max = -Infinity;
  for (const v of x) if (v > max) max = v;
  let sum = 0;
  for (let i = 0; i < x.length; i++) {
    x[i] = Math.exp(x[i] - max);
    sum += x[i];
  }
  for (let i = 0; i < x.length; i++) x[i] /= sum;
}

interface EncoderCache {
  inputs: Float64Array[];
  states: Float64Array[];
  dropped: Float64Array[];
}

interface StepCache {
  input: Float64Array;
  state: Float64Array;
  dropped: Float64Array;
  attention: Float64Array;
  context: Float64Array;
  concat: Float64Array;
  probs: Float64Array;
  inputId: number;
  position: number;
}

export class Seq2SeqModel {
  readonly config: ModelConfig;
  private readonly params: Map<string, Param>;
  private readonly eSrc: Param;
  private readonly eTgt: Param;
  private readonly posEnc: Param;
  private readonly posDec: Param;
  private readonly wEnc: Param;
  private readonly bEnc: Param;
  private readonly wDec: Param;
  private readonly bDec: Param;
  private readonly wOut: Param;
  private readonly bOut: Param;
  private adamStepCount = 0;

  constructor(config: ModelConfig) {
    if (config.dropout <= 0 || config.dropout >= 1) {
      throw new Error(`dropout rate must lie in (0, 1), got ${config.dropout}`);
    }
    this.config = config;
    const d = config.dModel;
    const rng = new Rng(deriveSeed(config.seed, 0xa11ce));
    const embInit = () => 0.08 * rng.gauss();
    const denseInit = () => rng.gauss() / Math.sqrt(d);
    const zero = () => 0;

    this.eSrc = new Param("eSrc", config.srcVocab, d, embInit);
    this.eTgt = new Param("eTgt", config.tgtVocab, d, embInit);
    this.posEnc = new Param("posEnc", config.maxLen, d, embInit);
    this.posDec = new Param("posDec", config.maxLen + 2, d, embInit);
    this.wEnc = new Param("wEnc", d, d, denseInit);
    this.bEnc = new Param("bEnc", d, 1, zero);
    this.wDec = new Param("wDec", d, d, denseInit);
    this.bDec = new Param("bDec", d, 1, zero);
    this.wOut = new Param("wOut", config.tgtVocab, 2 * d, denseInit);
    this.bOut = new Param("bOut", config.tgtVocab, 1, zero);
    this.params = new Map(
      [
        this.eSrc,
        this.eTgt,
        this.posEnc,
        this.posDec,
        this.wEnc,
        this.bEnc,
        this.wDec,
        this.bDec,
        this.wOut,
        this.bOut,
      ].map((p) => [p.name, p])
    );
  }

  drawMasks(rng: Rng): MaskPair {
    const d = this.config.dModel;
    const keep = 1 - this.config.dropout;
    const draw = () => {
      const mask = new Float64Array(d);
      for (let k = 0; k < d; k++) mask[k] = rng.next() < keep ? 1 / keep : 0;
      return mask;
    };
    return { enc: draw(), dec: draw() };
  }

  private encode(src: number[], masks: MaskPair | null): EncoderCache {
    const d = this.config.dModel;
    if (src.length > this.config.maxLen) {
      throw new Error(`source length ${src.length} exceeds maxLen ${this.config.maxLen}`);
    }
    const inputs: Float64Array[] = [];
    const states: Float64Array[] = [];
    const dropped: Float64Array[] = [];
    for (let i = 0; i < src.length; i++) {
      const input = new Float64Array(d);
      for (let k = 0; k < d; k++) {
        input[k] = this.eSrc.value[src[i] * d + k] + this.posEnc.value[i * d + k];
      }
      const state = new Float64Array(d);
      matvec(this.wEnc, input, state);
      for (let k = 0; k < d; k++) state[k] = Math.tanh(state[k] + this.bEnc.value[k]);
      const drop = new Float64Array(d);
      for (let k = 0; k < d; k++) drop[k] = masks ? state[k] * masks.enc[k] : state[k];
      inputs.push(input);
      states.push(state);
      dropped.push(drop);
    }
    return { inputs, states, dropped };
  }

  private decodeStep(
    encoder: EncoderCache,
    inputId: number,
    position: number,
    masks: MaskPair | null
  ): StepCache {
    const d = this.config.dModel;
    const scale = 1 / Math.sqrt(d);
    const input = new Float64Array(d);
    for (let k = 0; k < d; k++) {
      input[k] = this.eTgt.value[inputId * d + k] + this.posDec.value[position * d + k];
    }
    const state = new Float64Array(d);
    matvec(this.wDec, input, state);
    for (let k = 0; k < d; k++) state[k] = Math.tanh(state[k] + this.bDec.value[k]);
    const dropped = new Float64Array(d);
    for (let k = 0; k < d; k++) dropped[k] = masks ? state[k] * masks.dec[k] : state[k];

    const length = encoder.dropped.length;
    const attention = new Float64Array(length);
    for (let i = 0; i < length; i++) {
      let score = 0;
      const h = encoder.dropped[i];
      for (let k = 0; k < d; k++) score += dropped[k] * h[k];
      attention[i] = score * scale;
    }
    softmaxInPlace(attention);

    const context = new Float64Array(d);
    for (let i = 0; i < length; i++) {
      const h = encoder.dropped[i];
      const weight = attention[i];
      for (let k = 0; k < d; k++) context[k] += weight * h[k];
    }

    const concat = new Float64Array(2 * d);
    concat.set(dropped, 0);
    concat.set(context, d);
    const probs = new Float64Array(this.config.tgtVocab);
    matvec(this.wOut, concat, probs);
    for (let k = 0; k < probs.length; k++) probs[k] += this.bOut.value[k];
    softmaxInPlace(probs);

    return { input, state, dropped, attention, context, concat, probs, inputId, position };
  }

  /** Teacher-forced loss (mean cross-entropy per output token). */
  loss(example: Example, masks: MaskPair | null): number {
    const encoder = this.encode(example.src, masks);
    const outputs = [...example.tgt, EOS];
    let inputId = BOS;
    let total = 0;
    for (let t = 0; t < outputs.length; t++) {
      const step = this.decodeStep(encoder, inputId, t, masks);
      total += -Math.log(step.probs[outputs[t]] + 1e-300);
      inputId = outputs[t];
    }
    return total / outputs.length;
  }

  /** One teacher-forced example: accumulate gradients, then Adam step. */
  trainStep(example: Example, masks: MaskPair, learningRate: number): number {
    const loss = this.accumulateGradients(example, masks);
    this.adamStep(learningRate);
    return loss;
  }

  /**
   * Backward pass for one teacher-forced example: adds the gradient of the
   * mean cross-entropy to every parameter's grad buffer and returns the
   * loss.  Exposed separately so tests can check gradients against finite
   * differences.
   */
  accumulateGradients(example: Example, masks: MaskPair): number {
    const d = this.config.dModel;
    const scale = 1 / Math.sqrt(d);
    const encoder = this.encode(example.src, masks);
    const outputs = [...example.tgt, EOS];
    const steps: StepCache[] = [];
    let inputId = BOS;
    let total = 0;
    for (let t = 0; t < outputs.length; t++) {
      const step = this.decodeStep(encoder, inputId, t, masks);
      total += -Math.log(step.probs[outputs[t]] + 1e-300);
      steps.push(step);
      inputId = outputs[t];
    }
    const loss = total / outputs.length;
    if (!Number.isFinite(loss)) {
      throw new Error(`training diverged (loss=${loss})`);
    }

    const length = encoder.dropped.length;
    const invT = 1 / outputs.length;
    const dDropped = encoder.dropped.map(() => new Float64Array(d));

    for (let t = outputs.length - 1; t >= 0; t--) {
      const step = steps[t];
      const dLogits = Float64Array.from(step.probs);
      dLogits[outputs[t]] -= 1;
      for (let k = 0; k < dLogits.length; k++) dLogits[k] *= invT;

      addOuter(this.wOut, dLogits, step.concat);
      for (let k = 0; k < dLogits.length; k++) this.bOut.grad[k] += dLogits[k];
      const dConcat = new Float64Array(2 * d);
      matvecTAdd(this.wOut, dLogits, dConcat);
      const dStateDrop = dConcat.subarray(0, d).slice();
      const dContext = dConcat.subarray(d, 2 * d);

      // context = sum_i attention_i * h_i
      const dAttention = new Float64Array(length);
      for (let i = 0; i < length; i++) {
        const h = encoder.dropped[i];
        let acc = 0;
        for (let k = 0; k < d; k++) acc += h[k] * dContext[k];
        dAttention[i] = acc;
        const weight = step.attention[i];
        const target = dDropped[i];
        for (let k = 0; k < d; k++) target[k] += weight * dContext[k];
      }
      // softmax backward
      let dot = 0;
      for (let i = 0; i < length; i++) dot += step.attention[i] * dAttention[i];
      const dScores = new Float64Array(length);
      for (let i = 0; i < length; i++) {
        dScores[i] = step.attention[i] * (dAttention[i] - dot);
      }
      // scores_i = scale * (dropped . h_i)
      for (let i = 0; i < length; i++) {
        const ds = dScores[i] * scale;
        if (ds === 0) continue;
        const h = encoder.dropped[i];
        const target = dDropped[i];
        for (let k = 0; k < d; k++) {
          dStateDrop[k] += ds * h[k];
          target[k] += ds * step.dropped[k];
        }
      }

      // through decoder dropout + tanh + dense
      const dPre = new Float64Array(d);
      for (let k = 0; k < d; k++) {
        const dState = dStateDrop[k] * masks.dec[k];
        dPre[k] = dState * (1 - step.state[k] * step.state[k]);
      }
      addOuter(this.wDec, dPre, step.input);
      for (let k = 0; k < d; k++) this.bDec.grad[k] += dPre[k];
      const dInput = new Float64Array(d);
      matvecTAdd(this.wDec, dPre, dInput);
      for (let k = 0; k < d; k++) {
        this.eTgt.grad[step.inputId * d + k] += dInput[k];
        this.posDec.grad[step.position * d + k] += dInput[k];
      }
    }

    // encoder backward
    for (let i = 0; i < length; i++) {
      const dPre = new Float64Array(d);
      const state = encoder.states[i];
      for (let k = 0; k < d; k++) {
        const dState = dDropped[i][k] * masks.enc[k];
        dPre[k] = dState * (1 - state[k] * state[k]);
      }
      addOuter(this.wEnc, dPre, encoder.inputs[i]);
      for (let k = 0; k < d; k++) this.bEnc.grad[k] += dPre[k];
      const dInput = new Float64Array(d);
      matvecTAdd(this.wEnc, dPre, dInput);
      for (let k = 0; k < d; k++) {
        this.eSrc.grad[example.src[i] * d + k] += dInput[k];
        this.posEnc.grad[i * d + k] += dInput[k];
      }
    }

    return loss;
  }

  zeroGradients(): void {
    for (const param of this.params.values()) param.grad.fill(0);
  }

  private adamStep(learningRate: number): void {
    const beta1 = 0.9;
    const beta2 = 0.999;
    const eps = 1e-8;
    this.adamStepCount += 1;
    const correction1 = 1 - Math.pow(beta1, this.adamStepCount);
    const correction2 = 1 - Math.pow(beta2, this.adamStepCount);
    for (const param of this.params.values()) {
      const { value, grad, m, v } = param;
      for (let k = 0; k < value.length; k++) {
        const g = grad[k];
        if (g !== 0 || m[k] !== 0 || v[k] !== 0) {
          m[k] = beta1 * m[k] + (1 - beta1) * g;
          v[k] = beta2 * v[k] + (1 - beta2) * g * g;
          value[k] -= (learningRate * (m[k] / correction1)) / (Math.sqrt(v[k] / correction2) + eps);
        }
        grad[k] = 0;
      }
    }
  }

  /** Greedy decode; masks null = deterministic (dropout off). */
  decode(src: number[], masks: MaskPair | null, maxSteps?: number): Decoded {
    const encoder = this.encode(src, masks);
    const limit = maxSteps ?? this.config.maxLen + 2;
    const tokens: number[] = [];
    let inputId = BOS;
    let logprob = 0;
    for (let t = 0; t < limit; t++) {
      const step = this.decodeStep(encoder, inputId, t, masks);
      let best = 0;
      for (let k = 1; k < step.probs.length; k++) {
        if (step.probs[k] > step.probs[best]) best = k;
      }
      logprob += Math.log(step.probs[best] + 1e-300);
      if (best === EOS) break;
      tokens.push(best);
      inputId = best;
    }
    return { tokens, logprob: Math.min(logprob, 0) };
  }

  /**
   * Greedy decode from the mean of N dropout-sampled predictive
   * distributions: at every step the N per-mask softmax outputs (each over
   * its own encoder states) are averaged before the argmax.
   */
  meanDecode(src: number[], maskPairs: MaskPair[], maxSteps?: number): number[] {
    if (maskPairs.length < 1) throw new Error("meanDecode needs at least one mask pair");
    const encoders = maskPairs.map((m) => this.encode(src, m));
    const limit = maxSteps ?? this.config.maxLen + 2;
    const tokens: number[] = [];
    let inputId = BOS;
    for (let t = 0; t < limit; t++) {
      const mean = new Float64Array(this.config.tgtVocab);
      for (let s = 0; s < maskPairs.length; s++) {
        const step = this.decodeStep(encoders[s], inputId, t, maskPairs[s]);
        for (let k = 0; k < mean.length; k++) mean[k] += step.probs[k];
      }
      let best = 0;
      for (let k = 1; k < mean.length; k++) {
        if (mean[k] > mean[best]) best = k;
      }
      if (best === EOS) break;
      tokens.push(best);
      inputId = best;
    }
    return tokens;
  }

  getParam(name: string): { value: Float64Array; grad: Float64Array } {
    const param = this.params.get(name);
    if (!param) throw new Error(`unknown parameter ${name}`);
    return param;
  }

  serialize(): SerializedModel {
    const params: Record<string, number[]> = {};
    for (const [name, param] of this.params) params[name] = Array.from(param.value);
    return { config: this.config, params };
  }

  static deserialize(data: SerializedModel): Seq2SeqModel {
    const model = new Seq2SeqModel(data.config);
    for (const [name, values] of Object.entries(data.params)) {
      const param = model.params.get(name);
      if (!param) throw new Error(`checkpoint/config mismatch: unexpected parameter ${name}`);
      if (param.value.length !== values.length) {
        throw new Error(
          `checkpoint/config mismatch: ${name} has ${values.length} values, expected ${param.value.length}`
        );
      }
      param.value.set(values);
    }
    return model;
  }
}
