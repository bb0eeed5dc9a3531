/* tslint:disable */
/* eslint-disable */

export class RocCurve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    fpr(): Float64Array;
    thresholds(): Float64Array;
    tpr(): Float64Array;
    readonly auc: number;
}

export class WalkExplorer {
    free(): void;
    [Symbol.dispose](): void;
    anchors(metapath: string): Uint32Array;
    static defaultMetapaths(): string[];
    static fromTsv(nodes: string, edges: string): WalkExplorer;
    /**
     * Knowledge graph of a synthetic trial table.
     */
    constructor(n_trials: number, n_adverse_events: number, seed: number);
    nodeLabel(v: number): string;
    nodeName(v: number): string;
    sampleWalk(metapath: string, start: number, length: number, p: number, q: number, seed: number): Uint32Array;
    /**
     * `[{node, label, name, prob}]` for the step after `walk`.
     */
    transitions(metapath: string, walk: Uint32Array, p: number, q: number): Array<any>;
    readonly edgeCount: number;
    readonly nodeCount: number;
}

/**
 * Gaussian KDE on `grid`; Silverman's bandwidth when `bandwidth` is absent.
 */
export function kde(samples: Float64Array, bandwidth: number | null | undefined, grid: Float64Array): Float64Array;

export function kdeGrid(lo: number, hi: number, points: number): Float64Array;

/**
 * ROC curve and Mann-Whitney AUC; labels are 0 or 1.
 */
export function roc(scores: Float64Array, labels: Uint8Array): RocCurve;

export function silvermanBandwidth(samples: Float64Array): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_roccurve_free: (a: number, b: number) => void;
    readonly __wbg_walkexplorer_free: (a: number, b: number) => void;
    readonly kde: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly kdeGrid: (a: number, b: number, c: number) => [number, number];
    readonly roc: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly roccurve_auc: (a: number) => number;
    readonly roccurve_fpr: (a: number) => [number, number];
    readonly roccurve_thresholds: (a: number) => [number, number];
    readonly roccurve_tpr: (a: number) => [number, number];
    readonly silvermanBandwidth: (a: number, b: number) => number;
    readonly walkexplorer_anchors: (a: number, b: number, c: number) => [number, number, number, number];
    readonly walkexplorer_defaultMetapaths: () => [number, number];
    readonly walkexplorer_edgeCount: (a: number) => number;
    readonly walkexplorer_fromTsv: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly walkexplorer_new: (a: number, b: number, c: number) => [number, number, number];
    readonly walkexplorer_nodeCount: (a: number) => number;
    readonly walkexplorer_nodeLabel: (a: number, b: number) => [number, number];
    readonly walkexplorer_nodeName: (a: number, b: number) => [number, number];
    readonly walkexplorer_sampleWalk: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly walkexplorer_transitions: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly __wbindgen_exn_store: (a: number) => void;
    readonly __externref_table_alloc: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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
