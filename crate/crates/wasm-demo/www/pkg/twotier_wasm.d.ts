/* tslint:disable */
/* eslint-disable */

export class CdfCurves {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly ks_rate: number;
    readonly ks_tau: number;
    readonly rate_analytic: Float64Array;
    readonly rate_sim: Float64Array;
    readonly tau_analytic: Float64Array;
    readonly tau_sim: Float64Array;
    readonly x: Float64Array;
}

export class SweepCurves {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly tau_d_analytic: Float64Array;
    readonly tau_d_sim: Float64Array;
    readonly tau_star: number;
    readonly tau_u_analytic: Float64Array;
    readonly tau_u_sim: Float64Array;
    readonly zeta: Float64Array;
    /**
     * Analytic balance point; NaN when there is no crossing.
     */
    readonly zeta_star: number;
}

/**
 * Simulated and analytic CDFs of the DAP rate and of per-user throughput.
 */
export function cdf_curves(zeta: number, users: number, trials: number, seed: number, points: number): CdfCurves;

/**
 * Region side and base separation, meters.
 */
export function geometry(): Float64Array;

/**
 * One snapshot as `[x, y, tier]` triples; tier 1 is the microcell.
 */
export function user_layout(zeta: number, users: number, seed: number, hotspot_fraction: number, hotspot_radius: number): Float64Array;

/**
 * Mean throughputs over a log-spaced zeta grid, with the balance point.
 */
export function zeta_sweep(users: number, trials: number, seed: number, points: number): SweepCurves;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_cdfcurves_free: (a: number, b: number) => void;
    readonly __wbg_sweepcurves_free: (a: number, b: number) => void;
    readonly cdf_curves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly cdfcurves_ks_rate: (a: number) => number;
    readonly cdfcurves_ks_tau: (a: number) => number;
    readonly cdfcurves_rate_analytic: (a: number) => [number, number];
    readonly cdfcurves_rate_sim: (a: number) => [number, number];
    readonly cdfcurves_tau_analytic: (a: number) => [number, number];
    readonly cdfcurves_tau_sim: (a: number) => [number, number];
    readonly cdfcurves_x: (a: number) => [number, number];
    readonly geometry: () => [number, number];
    readonly sweepcurves_tau_d_analytic: (a: number) => [number, number];
    readonly sweepcurves_tau_d_sim: (a: number) => [number, number];
    readonly sweepcurves_tau_star: (a: number) => number;
    readonly sweepcurves_tau_u_analytic: (a: number) => [number, number];
    readonly sweepcurves_tau_u_sim: (a: number) => [number, number];
    readonly sweepcurves_zeta: (a: number) => [number, number];
    readonly sweepcurves_zeta_star: (a: number) => number;
    readonly user_layout: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly zeta_sweep: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
