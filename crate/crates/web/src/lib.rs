//! WebAssembly bindings for the browser demo: a metapath walk transition
//! explorer, ROC/AUC of pasted scores, and kernel density estimates.

mod explore;

use hetlink_core::hetgraph::NodeId;
use hetlink_core::learn::{silverman_bandwidth, RocSummary};
use js_sys::{Array, Object, Reflect};
use wasm_bindgen::prelude::*;

pub use explore::Explorer;

fn js_err(e: hetlink_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn ids(walk: &[u32]) -> Vec<NodeId> {
    walk.iter().map(|&v| NodeId(v as usize)).collect()
}

fn object(fields: &[(&str, JsValue)]) -> Object {
    let o = Object::new();
    for (k, v) in fields {
        // setting a string key on a fresh plain object cannot throw
        let _ = Reflect::set(&o, &JsValue::from_str(k), v);
    }
    o
}

#[wasm_bindgen]
pub struct WalkExplorer {
    inner: Explorer,
}

#[wasm_bindgen]
impl WalkExplorer {
    /// Knowledge graph of a synthetic trial table.
    #[wasm_bindgen(constructor)]
    pub fn new(n_trials: u32, n_adverse_events: u32, seed: u32) -> Result<WalkExplorer, JsError> {
        let inner = Explorer::synthetic(n_trials as usize, n_adverse_events as usize, seed as u64)
            .map_err(js_err)?;
        Ok(Self { inner })
    }

    #[wasm_bindgen(js_name = fromTsv)]
    pub fn from_tsv(nodes: &str, edges: &str) -> Result<WalkExplorer, JsError> {
        let inner = Explorer::from_tsv(nodes, edges).map_err(js_err)?;
        Ok(Self { inner })
    }

    #[wasm_bindgen(js_name = defaultMetapaths)]
    pub fn default_metapaths() -> Vec<String> {
        Explorer::metapaths()
    }

    #[wasm_bindgen(getter, js_name = nodeCount)]
    pub fn node_count(&self) -> u32 {
        self.inner.graph.node_count() as u32
    }

    #[wasm_bindgen(getter, js_name = edgeCount)]
    pub fn edge_count(&self) -> u32 {
        self.inner.graph.edge_count() as u32
    }

    #[wasm_bindgen(js_name = nodeLabel)]
    pub fn node_label(&self, v: u32) -> String {
        self.inner.graph.label_of(NodeId(v as usize)).to_string()
    }

    #[wasm_bindgen(js_name = nodeName)]
    pub fn node_name(&self, v: u32) -> String {
        self.inner.graph.name_of(NodeId(v as usize)).to_string()
    }

    pub fn anchors(&self, metapath: &str) -> Result<Vec<u32>, JsError> {
        let a = self.inner.anchors(metapath).map_err(js_err)?;
        Ok(a.into_iter().map(|v| v.index() as u32).collect())
    }

    /// `[{node, label, name, prob}]` for the step after `walk`.
    pub fn transitions(
        &self,
        metapath: &str,
        walk: Vec<u32>,
        p: f64,
        q: f64,
    ) -> Result<Array, JsError> {
        let dist = self
            .inner
            .transitions(metapath, &ids(&walk), p, q)
            .map_err(js_err)?;
        let out = Array::new();
        for (v, prob) in dist {
            let g = &self.inner.graph;
            out.push(&object(&[
                ("node", (v.index() as u32).into()),
                ("label", g.label_of(v).into()),
                ("name", g.name_of(v).into()),
                ("prob", prob.into()),
            ]));
        }
        Ok(out)
    }

    #[wasm_bindgen(js_name = sampleWalk)]
    pub fn sample_walk(
        &self,
        metapath: &str,
        start: u32,
        length: u32,
        p: f64,
        q: f64,
        seed: u32,
    ) -> Result<Vec<u32>, JsError> {
        let w = self
            .inner
            .sample_walk(
                metapath,
                NodeId(start as usize),
                length as usize,
                p,
                q,
                seed as u64,
            )
            .map_err(js_err)?;
        Ok(w.into_iter().map(|v| v.index() as u32).collect())
    }
}

#[wasm_bindgen]
pub struct RocCurve {
    inner: RocSummary,
}

#[wasm_bindgen]
impl RocCurve {
    #[wasm_bindgen(getter)]
    pub fn auc(&self) -> f64 {
        self.inner.auc
    }

    pub fn fpr(&self) -> Vec<f64> {
        self.inner.points.iter().map(|p| p.1).collect()
    }

    pub fn tpr(&self) -> Vec<f64> {
        self.inner.points.iter().map(|p| p.2).collect()
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.inner.points.iter().map(|p| p.0).collect()
    }
}

/// ROC curve and Mann-Whitney AUC; labels are 0 or 1.
#[wasm_bindgen]
pub fn roc(scores: Vec<f64>, labels: Vec<u8>) -> Result<RocCurve, JsError> {
    let inner = explore::roc(&scores, &labels).map_err(js_err)?;
    Ok(RocCurve { inner })
}

#[wasm_bindgen(js_name = kdeGrid)]
pub fn kde_grid(lo: f64, hi: f64, points: u32) -> Vec<f64> {
    explore::grid(lo, hi, points as usize)
}

/// Gaussian KDE on `grid`; Silverman's bandwidth when `bandwidth` is absent.
#[wasm_bindgen]
pub fn kde(samples: Vec<f64>, bandwidth: Option<f64>, grid: Vec<f64>) -> Result<Vec<f64>, JsError> {
    explore::density(&samples, bandwidth, &grid).map_err(js_err)
}

#[wasm_bindgen(js_name = silvermanBandwidth)]
pub fn silverman(samples: Vec<f64>) -> f64 {
    silverman_bandwidth(&samples)
}
