/* tslint:disable */
/* eslint-disable */

/**
 * Coefficients `C(n, j)` of `x^{n-j} z^j` in `(x+z)^n` for
 * `n_lo ≤ n ≤ n_hi` and `0 ≤ j < terms`, as JSON rows of strings.
 */
export function binomial_grid(n_lo: number, n_hi: number, terms: number): string;

/**
 * Algebra and module axiom report for a document.
 */
export function check_document(text: string): string;

/**
 * `H^degree` of the document's module (the regular module by default).
 */
export function cohomology(text: string, degree: number): string;

/**
 * The document of a built-in algebra, or an empty string.
 */
export function fixture_document(name: string): string;

/**
 * Names of the built-in algebras, comma separated.
 */
export function fixture_names(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly binomial_grid: (a: number, b: number, c: number) => [number, number];
    readonly check_document: (a: number, b: number) => [number, number];
    readonly cohomology: (a: number, b: number, c: number) => [number, number];
    readonly fixture_document: (a: number, b: number) => [number, number];
    readonly fixture_names: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
