//! Instance files: a single JSON record
//! `{"mu": [..], "blocks": [[..], ..], "u": [[re, im], ..], "w": [[re, im], ..]}`
//! with 1-based block indices.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{FiniteMeasureSpace, MFunc, Partition};
use crate::wct::WctInstance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub mu: Vec<f64>,
    pub blocks: Vec<Vec<usize>>,
    pub u: Vec<[f64; 2]>,
    pub w: Vec<[f64; 2]>,
}

impl InstanceFile {
    pub fn from_instance(inst: &WctInstance) -> Self {
        let pairs = |f: &MFunc| f.values().iter().map(|z| [z.re, z.im]).collect();
        Self {
            mu: inst.space().masses().to_vec(),
            blocks: inst
                .partition()
                .blocks()
                .iter()
                .map(|b| b.iter().map(|i| i + 1).collect())
                .collect(),
            u: pairs(inst.u()),
            w: pairs(inst.w()),
        }
    }

    /// Validates the record and builds the instance. Errors name the first
    /// offending field.
    pub fn to_instance(&self) -> Result<WctInstance> {
        let n = self.mu.len();
        if n == 0 {
            return Err(Error::Instance("mu: at least one point is required".into()));
        }
        if let Some((i, m)) = self.mu.iter().enumerate().find(|(_, m)| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::Instance(format!("mu[{i}] = {m}: masses must be finite and > 0")));
        }
        let mut owner = vec![None::<usize>; n];
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (b, block) in self.blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Instance(format!("blocks[{b}]: blocks must be non-empty")));
            }
            let mut zero_based = Vec::with_capacity(block.len());
            for (k, &idx) in block.iter().enumerate() {
                if idx == 0 || idx > n {
                    return Err(Error::Instance(format!(
                        "blocks[{b}][{k}] = {idx}: indices are 1-based and must lie in 1..={n}"
                    )));
                }
                if let Some(prev) = owner[idx - 1] {
                    return Err(Error::Instance(format!(
                        "blocks[{b}][{k}] = {idx}: index already used by blocks[{prev}] (blocks overlap)"
                    )));
                }
                owner[idx - 1] = Some(b);
                zero_based.push(idx - 1);
            }
            blocks.push(zero_based);
        }
        if let Some(i) = owner.iter().position(Option::is_none) {
            return Err(Error::Instance(format!("blocks: index {} is not covered by any block", i + 1)));
        }
        for (name, vals) in [("u", &self.u), ("w", &self.w)] {
            if vals.len() != n {
                return Err(Error::Instance(format!("{name}: length {} does not match mu length {n}", vals.len())));
            }
            if let Some(i) = vals.iter().position(|[re, im]| !(re.is_finite() && im.is_finite())) {
                return Err(Error::Instance(format!("{name}[{i}]: entries must be finite")));
            }
        }
        let to_func = |vals: &[[f64; 2]]| MFunc::new(vals.iter().map(|[re, im]| Complex64::new(*re, *im)).collect());
        let space = FiniteMeasureSpace::new(self.mu.clone())?;
        let part = Partition::new(n, blocks)?;
        WctInstance::build(space, part, to_func(&self.u), to_func(&self.w))
    }
}

pub fn parse_instance(text: &str) -> Result<WctInstance> {
    let file: InstanceFile = serde_json::from_str(text)
        .map_err(|e| Error::Instance(format!("line {} column {}: {e}", e.line(), e.column())))?;
    file.to_instance()
}

pub fn instance_to_string(inst: &WctInstance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("instance records always serialize")
}

pub fn read_instance(path: &Path) -> Result<WctInstance> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

pub fn write_instance(inst: &WctInstance, path: &Path) -> Result<()> {
    fs::write(path, instance_to_string(inst) + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
