/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_roccurve_free: (a: number, b: number) => void;
export const __wbg_walkexplorer_free: (a: number, b: number) => void;
export const kde: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const kdeGrid: (a: number, b: number, c: number) => [number, number];
export const roc: (a: number, b: number, c: number, d: number) => [number, number, number];
export const roccurve_auc: (a: number) => number;
export const roccurve_fpr: (a: number) => [number, number];
export const roccurve_thresholds: (a: number) => [number, number];
export const roccurve_tpr: (a: number) => [number, number];
export const silvermanBandwidth: (a: number, b: number) => number;
export const walkexplorer_anchors: (a: number, b: number, c: number) => [number, number, number, number];
export const walkexplorer_defaultMetapaths: () => [number, number];
export const walkexplorer_edgeCount: (a: number) => number;
export const walkexplorer_fromTsv: (a: number, b: number, c: number, d: number) => [number, number, number];
export const walkexplorer_new: (a: number, b: number, c: number) => [number, number, number];
export const walkexplorer_nodeCount: (a: number) => number;
export const walkexplorer_nodeLabel: (a: number, b: number) => [number, number];
export const walkexplorer_nodeName: (a: number, b: number) => [number, number];
export const walkexplorer_sampleWalk: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
export const walkexplorer_transitions: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const __wbindgen_exn_store: (a: number) => void;
export const __externref_table_alloc: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_start: () => void;
