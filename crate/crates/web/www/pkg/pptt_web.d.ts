/* tslint:disable */
/* eslint-disable */

/**
 * Composed n-site CDFs and the n-site medians as JSON.
 */
export function composedCdf(n_dim: number, k: number, samples: number, seed: number, n_max: number, points: number): string;

/**
 * Negativity of the Choi state along one sampled semigroup as JSON.
 */
export function negativityTrajectory(n_dim: number, k: number, seed: number, t_max: number, steps: number): string;

/**
 * Histogram of `samples` PPT times as JSON.
 */
export function sampleHistogram(n_dim: number, k: number, mode: string, samples: number, seed: number, bins: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly composedCdf: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly negativityTrajectory: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly sampleHistogram: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
