/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_cdfcurves_free: (a: number, b: number) => void;
export const __wbg_sweepcurves_free: (a: number, b: number) => void;
export const cdf_curves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const cdfcurves_ks_rate: (a: number) => number;
export const cdfcurves_ks_tau: (a: number) => number;
export const cdfcurves_rate_analytic: (a: number) => [number, number];
export const cdfcurves_rate_sim: (a: number) => [number, number];
export const cdfcurves_tau_analytic: (a: number) => [number, number];
export const cdfcurves_tau_sim: (a: number) => [number, number];
export const cdfcurves_x: (a: number) => [number, number];
export const geometry: () => [number, number];
export const sweepcurves_tau_d_analytic: (a: number) => [number, number];
export const sweepcurves_tau_d_sim: (a: number) => [number, number];
export const sweepcurves_tau_star: (a: number) => number;
export const sweepcurves_tau_u_analytic: (a: number) => [number, number];
export const sweepcurves_tau_u_sim: (a: number) => [number, number];
export const sweepcurves_zeta: (a: number) => [number, number];
export const sweepcurves_zeta_star: (a: number) => number;
export const user_layout: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const zeta_sweep: (a: number, b: number, c: number, d: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
