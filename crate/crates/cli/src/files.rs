//! Model file and prediction file formats.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use rls_refine::data::Protocol;
use rls_refine::fusion::Estimate;
use rls_refine::gaussian::{Gaussian2D, Vec2};
use rls_refine::goal::GoalModelParams;
use rls_refine::rollout::PredictorParams;

use crate::CliError;

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub predictor: PredictorParams,
    pub goal_model: GoalModelParams,
    pub protocol: Protocol,
    pub version: u32,
}

impl ModelFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let model: ModelFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("{}: not a model file: {e}", path.display())))?;
        if model.version != MODEL_VERSION {
            return Err(CliError::Invalid(format!(
                "{}: unsupported model version {} (expected {MODEL_VERSION})",
                path.display(),
                model.version
            )));
        }
        model.predictor.validate()?;
        model.goal_model.validate()?;
        Ok(model)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Invalid(format!("cannot serialize model: {e}")))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// One line of a predictions file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub segment_id: String,
    pub backbone: String,
    pub mode: String,
    pub means: Vec<[f64; 2]>,
    /// `[σx, σy, ρ]` per step.
    pub sigmas: Vec<[f64; 3]>,
}

impl Prediction {
    pub fn from_estimates(segment_id: &str, backbone: &str, refined: bool, est: &[Estimate]) -> Result<Self, CliError> {
        let mut means = Vec::with_capacity(est.len());
        let mut sigmas = Vec::with_capacity(est.len());
        for e in est {
            let g = Gaussian2D::from_cov(e.mean, e.cov)?;
            means.push([e.mean.x, e.mean.y]);
            sigmas.push([g.sigma_x, g.sigma_y, g.rho]);
        }
        Ok(Prediction {
            segment_id: segment_id.to_string(),
            backbone: backbone.to_string(),
            mode: if refined { "refined" } else { "vanilla" }.to_string(),
            means,
            sigmas,
        })
    }

    pub fn mean_path(&self) -> Vec<Vec2> {
        self.means.iter().map(|m| Vec2::new(m[0], m[1])).collect()
    }

    /// Serializes with 6 decimals per number.
    fn to_line(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{{\"segment_id\":{},\"backbone\":{},\"mode\":{},\"means\":[",
            json_str(&self.segment_id),
            json_str(&self.backbone),
            json_str(&self.mode)
        );
        for (i, m) in self.means.iter().enumerate() {
            let sep = if i == 0 { "" } else { "," };
            let _ = write!(s, "{sep}[{:.6},{:.6}]", m[0], m[1]);
        }
        s.push_str("],\"sigmas\":[");
        for (i, g) in self.sigmas.iter().enumerate() {
            let sep = if i == 0 { "" } else { "," };
            let _ = write!(s, "{sep}[{:.6},{:.6},{:.6}]", g[0], g[1], g[2]);
        }
        s.push_str("]}");
        s
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub fn write_predictions(path: &Path, preds: &[Prediction]) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    for p in preds {
        writeln!(w, "{}", p.to_line()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>, CliError> {
    let io_err = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let p: Prediction = serde_json::from_str(&line)
            .map_err(|e| CliError::Invalid(format!("{}:{}: {e}", path.display(), i + 1)))?;
        if p.means.len() != p.sigmas.len() {
            return Err(CliError::Invalid(format!(
                "{}:{}: {} means but {} sigmas",
                path.display(),
                i + 1,
                p.means.len(),
                p.sigmas.len()
            )));
        }
        out.push(p);
    }
    Ok(out)
}
