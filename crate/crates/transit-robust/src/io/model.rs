//! Versioned JSON model files. Parameter and scaler vectors are stored as
//! base64 blobs of little-endian `f64`s, so a reload is bit-exact.

use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use transit_robust_core::features::{FeatureCaps, Scaler};
use transit_robust_core::surrogate::{LabelKind, MlpModel, ModelMeta};

use super::{read_json, write_json};
use crate::error::{Error, Result};

pub const FORMAT: &str = "transit-robust-mlp";
pub const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct LayerBlob {
    inputs: usize,
    outputs: usize,
    /// `inputs × outputs`, row-major.
    weights: String,
    biases: String,
}

#[derive(Serialize, Deserialize)]
struct MetaFile {
    dataset_id: String,
    traveltime_max: usize,
    transfers_max: usize,
    turnaround_max: usize,
    seed: u64,
    epochs: usize,
    labels: String,
    reference: Option<[f64; 4]>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    sizes: Vec<usize>,
    layers: Vec<LayerBlob>,
    scaler_mean: String,
    scaler_std: String,
    meta: MetaFile,
}

pub fn encode_f64s(v: &[f64]) -> String {
    let bytes: Vec<u8> = v.iter().flat_map(|x| x.to_le_bytes()).collect();
    STANDARD.encode(bytes)
}

pub fn decode_f64s(s: &str) -> std::result::Result<Vec<f64>, String> {
    let bytes = STANDARD.decode(s).map_err(|e| e.to_string())?;
    if bytes.len() % 8 != 0 {
        return Err(format!("blob of {} bytes is not a whole number of f64s", bytes.len()));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

pub fn write_model(path: &Path, model: &MlpModel) -> Result<()> {
    let p = model.params();
    let layers = model
        .layers()
        .iter()
        .map(|l| LayerBlob {
            inputs: l.inputs,
            outputs: l.outputs,
            weights: encode_f64s(&p[l.weights()]),
            biases: encode_f64s(&p[l.biases()]),
        })
        .collect();
    let m = &model.meta;
    let file = ModelFile {
        format: FORMAT.into(),
        version: VERSION,
        sizes: model.sizes(),
        layers,
        scaler_mean: encode_f64s(&model.scaler.mean),
        scaler_std: encode_f64s(&model.scaler.std),
        meta: MetaFile {
            dataset_id: m.dataset_id.clone(),
            traveltime_max: m.caps.traveltime_max,
            transfers_max: m.caps.transfers_max,
            turnaround_max: m.caps.turnaround_max,
            seed: m.seed,
            epochs: m.epochs,
            labels: match m.labels {
                LabelKind::Normalized => "normalized",
                LabelKind::Raw => "raw",
            }
            .into(),
            reference: m.reference,
        },
    };
    write_json(path, &file)
}

pub fn read_model(path: &Path) -> Result<MlpModel> {
    let file: ModelFile = read_json(path)?;
    let bad = |m: String| Error::format(path, m);
    if file.format != FORMAT {
        return Err(bad(format!("not a model file (format {:?})", file.format)));
    }
    if file.version != VERSION {
        return Err(bad(format!("unsupported model version {}", file.version)));
    }
    if file.layers.len() + 1 != file.sizes.len() {
        return Err(bad("layer count does not match sizes".into()));
    }
    let mut params = Vec::new();
    for (i, l) in file.layers.iter().enumerate() {
        if (l.inputs, l.outputs) != (file.sizes[i], file.sizes[i + 1]) {
            return Err(bad(format!("layer {i} shape does not match sizes")));
        }
        let w = decode_f64s(&l.weights).map_err(bad)?;
        let b = decode_f64s(&l.biases).map_err(bad)?;
        if w.len() != l.inputs * l.outputs || b.len() != l.outputs {
            return Err(bad(format!("layer {i} blob sizes do not match its shape")));
        }
        params.extend(w);
        params.extend(b);
    }
    let scaler = Scaler {
        mean: decode_f64s(&file.scaler_mean).map_err(bad)?,
        std: decode_f64s(&file.scaler_std).map_err(bad)?,
    };
    if scaler.mean.len() != scaler.std.len() {
        return Err(bad("scaler mean and std differ in length".into()));
    }
    let m = file.meta;
    let meta = ModelMeta {
        dataset_id: m.dataset_id,
        caps: FeatureCaps {
            traveltime_max: m.traveltime_max,
            transfers_max: m.transfers_max,
            turnaround_max: m.turnaround_max,
        },
        seed: m.seed,
        epochs: m.epochs,
        labels: match m.labels.as_str() {
            "normalized" => LabelKind::Normalized,
            "raw" => LabelKind::Raw,
            other => return Err(bad(format!("unknown label kind {other:?}"))),
        },
        reference: m.reference,
    };
    Ok(MlpModel::from_parts(&file.sizes, params, scaler, meta)?)
}
