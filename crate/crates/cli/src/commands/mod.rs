use std::path::PathBuf;

use freefall_toa::{DEFAULT_TOL, HBAR_SI};

use crate::config::ConfigMap;
use crate::{CliResult, CommonArgs, Format};

pub mod pdf;
pub mod scan;
pub mod simulate;
pub mod verify;

/// Fully resolved common options.
#[derive(Debug, Clone)]
pub struct Common {
    pub mass: f64,
    pub gravity: f64,
    pub height: f64,
    pub hbar: f64,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub fn resolve_common(args: &CommonArgs, cfg: &ConfigMap) -> CliResult<Common> {
    let out = match &args.out {
        Some(p) => Some(p.clone()),
        None => cfg.get_raw("out").map(PathBuf::from),
    };
    Ok(Common {
        mass: cfg.resolve(args.mass, "mass", 1.67e-27)?,
        gravity: cfg.resolve(args.gravity, "gravity", 9.8)?,
        height: cfg.resolve(args.height, "height", 1e-5)?,
        hbar: cfg.resolve(args.hbar, "hbar", HBAR_SI)?,
        tol: cfg.resolve(args.tol, "tol", DEFAULT_TOL)?,
        out,
        format: cfg.resolve_format(args.format, Format::Csv)?,
    })
}

impl Common {
    pub fn stamp(&self, table: &mut crate::output::Table, command: &str) {
        table.meta("tool", format!("toa {}", env!("CARGO_PKG_VERSION")));
        table.meta("command", command);
        table.meta_f64("mass", self.mass);
        table.meta_f64("gravity", self.gravity);
        table.meta_f64("height", self.height);
        table.meta_f64("hbar", self.hbar);
        table.meta_f64("tol", self.tol);
    }
}

pub(crate) fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}
