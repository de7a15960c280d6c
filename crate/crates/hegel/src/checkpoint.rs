//! Checkpoint files: `HGCKPT1`, u32 LE header length, a JSON header, then
//! every tensor as f32 LE in header order.

use std::fs;
use std::path::Path;

use hegel_core::{Checkpoint, ModelParams, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsonl::write_atomic;

pub const MAGIC: &[u8; 7] = b"HGCKPT1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub names: Vec<String>,
    pub shapes: Vec<(usize, usize)>,
    pub config: TrainConfig,
    pub epoch: usize,
    pub val_rouge1_f: f64,
    #[serde(default)]
    pub manifest: String,
}

pub fn encode(ckpt: &Checkpoint, manifest: &str) -> Vec<u8> {
    let named = ckpt.params.weights.named();
    let header = CheckpointHeader {
        names: named.iter().map(|(n, _)| n.clone()).collect(),
        shapes: named.iter().map(|(_, t)| t.shape()).collect(),
        config: ckpt.config,
        epoch: ckpt.epoch,
        val_rouge1_f: ckpt.val_rouge1_f,
        manifest: manifest.to_string(),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let floats: usize = named.iter().map(|(_, t)| t.len()).sum();
    let mut out = Vec::with_capacity(MAGIC.len() + 4 + json.len() + 4 * floats);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for (_, t) in &named {
        for &x in t.data() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<(CheckpointHeader, Checkpoint)> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::format(path, "magic", "expected HGCKPT1"));
    }
    let rest = &bytes[MAGIC.len()..];
    if rest.len() < 4 {
        return Err(Error::format(path, "header", "truncated length"));
    }
    let len = u32::from_le_bytes(rest[..4].try_into().unwrap()) as usize;
    let rest = &rest[4..];
    if rest.len() < len {
        return Err(Error::format(path, "header", "truncated JSON"));
    }
    let header: CheckpointHeader = serde_json::from_slice(&rest[..len])
        .map_err(|e| Error::format(path, "header", e.to_string()))?;
    let mut params = ModelParams::<f32>::zeros(header.config.model)
        .map_err(|e| Error::format(path, "config", e.to_string()))?;
    {
        let named = params.weights.named();
        let names: Vec<&String> = named.iter().map(|(n, _)| n).collect();
        let shapes: Vec<(usize, usize)> = named.iter().map(|(_, t)| t.shape()).collect();
        if header.names.iter().collect::<Vec<_>>() != names {
            return Err(Error::format(
                path,
                "names",
                "tensor names do not match the model config",
            ));
        }
        if header.shapes != shapes {
            return Err(Error::format(
                path,
                "shapes",
                "tensor shapes do not match the model config",
            ));
        }
    }
    let body = &rest[len..];
    let floats: usize = header.shapes.iter().map(|(r, c)| r * c).sum();
    if body.len() != 4 * floats {
        return Err(Error::format(
            path,
            "data",
            format!(
                "{} bytes of tensor data, expected {}",
                body.len(),
                4 * floats
            ),
        ));
    }
    let mut values = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()));
    for t in params.weights.values_mut() {
        for x in t.data_mut() {
            *x = values.next().expect("length checked");
        }
    }
    if !params.is_finite() {
        return Err(Error::format(path, "data", "non-finite weight"));
    }
    let ckpt = Checkpoint {
        params,
        epoch: header.epoch,
        val_rouge1_f: header.val_rouge1_f,
        config: header.config,
    };
    Ok((header, ckpt))
}

pub fn save(path: &Path, ckpt: &Checkpoint, manifest: &str) -> Result<()> {
    write_atomic(path, &encode(ckpt, manifest))
}

pub fn load(path: &Path) -> Result<(CheckpointHeader, Checkpoint)> {
    if !path.is_file() {
        return Err(Error::Missing(format!(
            "no checkpoint at {}; run `hegel train` first",
            path.display()
        )));
    }
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hegel_core::ModelConfig;

    fn small() -> Checkpoint {
        let config = TrainConfig {
            model: ModelConfig {
                input_dim: 6,
                model_dim: 4,
                layers: 2,
                heads: 2,
                head_dim: 2,
                ffn_dim: 8,
                hidden_dim: 5,
                ..ModelConfig::default()
            },
            ..TrainConfig::default()
        };
        Checkpoint {
            params: ModelParams::init(config.model, 9).unwrap(),
            epoch: 3,
            val_rouge1_f: 0.123456789012345,
            config,
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let c = small();
        let bytes = encode(&c, "abc");
        let (h, back) = decode(&bytes, Path::new("c")).unwrap();
        assert_eq!(back, c);
        assert_eq!(h.manifest, "abc");
        assert_eq!(encode(&back, "abc"), bytes);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let c = small();
        let bytes = encode(&c, "");
        let len = u32::from_le_bytes(bytes[7..11].try_into().unwrap()) as usize;
        let mut header: CheckpointHeader = serde_json::from_slice(&bytes[11..11 + len]).unwrap();
        header.shapes[0] = (7, 4);
        let json = serde_json::to_vec(&header).unwrap();
        let mut bad = MAGIC.to_vec();
        bad.extend_from_slice(&(json.len() as u32).to_le_bytes());
        bad.extend_from_slice(&json);
        bad.extend_from_slice(&bytes[11 + len..]);
        assert!(matches!(
            decode(&bad, Path::new("c")),
            Err(Error::Format {
                field: "shapes",
                ..
            })
        ));
        assert!(matches!(
            decode(&bytes[..bytes.len() - 4], Path::new("c")),
            Err(Error::Format { field: "data", .. })
        ));
        assert!(matches!(
            decode(b"HGCKPT0", Path::new("c")),
            Err(Error::Format { field: "magic", .. })
        ));
    }

    #[test]
    fn missing_file_names_the_step() {
        let err = load(Path::new("/nonexistent/model.ckpt")).unwrap_err();
        assert!(err.to_string().contains("hegel train"));
    }
}
