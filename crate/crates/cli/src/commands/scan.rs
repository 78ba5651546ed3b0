//! `toa scan`: sweep the initial spread σ at fixed detector height and
//! tabulate the arrival/position uncertainty product, its universal
//! bound, the mean arrival time, and every asymptotic reference curve.

use rayon::prelude::*;

use freefall_toa::moments::{
    farfield_quantum_std_coeff, nearfield_mean_coeff, nearfield_std_coeff,
};
use freefall_toa::{
    classify_regime, mean_toa_delay, toa_moments, PhysicalParams, ToaDistribution,
    DEFAULT_REGIME_THRESHOLD,
};

use crate::commands::{log_spaced, resolve_common};
use crate::config::ConfigMap;
use crate::output::{emit, Cell, Table};
use crate::{CliError, CliResult, ScanArgs};

/// One sweep row; NaN numerics plus a message when the quadrature
/// failed for that σ.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub sigma: f64,
    pub q: f64,
    pub t_c: f64,
    pub delta_t: f64,
    pub delta_x: f64,
    pub product: f64,
    pub bound: f64,
    pub ratio: f64,
    pub mean_toa: f64,
    pub delay: f64,
    pub regime: String,
    pub product_ff_semiclassical: f64,
    pub product_ff_quantum: f64,
    pub product_near_field: f64,
    pub mean_ff_quantum: f64,
    pub mean_near_field: f64,
    pub error: Option<String>,
}

pub const COLUMNS: [&str; 17] = [
    "sigma",
    "q",
    "t_c",
    "delta_t",
    "delta_x",
    "product",
    "bound",
    "ratio",
    "mean_toa",
    "delay",
    "regime",
    "product_ff_semiclassical",
    "product_ff_quantum",
    "product_near_field",
    "mean_ff_quantum",
    "mean_near_field",
    "error",
];

pub fn compute_row(params: &PhysicalParams, t_eval: f64, tol: f64) -> SweepRow {
    let dist = ToaDistribution::new(*params).expect("validated upstream");
    let s = *dist.scales();
    let bound = params.hbar / (2.0 * params.m * params.g);
    let delta_x = dist.position_sigma(t_eval);
    let ff_std = params.hbar / (2.0 * params.m * params.g * params.sigma);
    let nf_std = nearfield_std_coeff() * (2.0 * params.sigma / params.g).sqrt();
    let regime = classify_regime(&s, DEFAULT_REGIME_THRESHOLD)
        .expect("default threshold is valid")
        .regime
        .to_string();

    let mut row = SweepRow {
        sigma: params.sigma,
        q: s.q,
        t_c: s.t_c,
        delta_t: f64::NAN,
        delta_x,
        product: f64::NAN,
        bound,
        ratio: f64::NAN,
        mean_toa: f64::NAN,
        delay: f64::NAN,
        regime,
        product_ff_semiclassical: ff_std * delta_x,
        product_ff_quantum: ff_std * farfield_quantum_std_coeff() * delta_x,
        product_near_field: nf_std * delta_x,
        mean_ff_quantum: ff_std * (2.0 / std::f64::consts::PI).sqrt(),
        mean_near_field: nearfield_mean_coeff() * s.t_c * s.sigma_over_x().sqrt(),
        error: None,
    };

    match toa_moments(&dist, tol).and_then(|m| Ok((m, mean_toa_delay(&dist, tol)?))) {
        Ok((m, delay)) => {
            row.delta_t = m.std_toa;
            row.product = m.std_toa * delta_x;
            row.ratio = row.product / bound;
            row.mean_toa = m.mean_toa;
            row.delay = delay.value;
        }
        Err(e) => row.error = Some(e.to_string().replace(',', ";")),
    }
    row
}

impl SweepRow {
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Num(self.sigma),
            Cell::Num(self.q),
            Cell::Num(self.t_c),
            Cell::Num(self.delta_t),
            Cell::Num(self.delta_x),
            Cell::Num(self.product),
            Cell::Num(self.bound),
            Cell::Num(self.ratio),
            Cell::Num(self.mean_toa),
            Cell::Num(self.delay),
            Cell::Text(self.regime.clone()),
            Cell::Num(self.product_ff_semiclassical),
            Cell::Num(self.product_ff_quantum),
            Cell::Num(self.product_near_field),
            Cell::Num(self.mean_ff_quantum),
            Cell::Num(self.mean_near_field),
            Cell::Text(self.error.clone().unwrap_or_default()),
        ]
    }
}

pub fn run(args: &ScanArgs, cfg: &ConfigMap) -> CliResult<()> {
    let common = resolve_common(&args.common, cfg)?;
    let sigma_min = cfg.resolve(args.sigma_min, "sigma-min", 1e-7)?;
    let sigma_max = cfg.resolve(args.sigma_max, "sigma-max", 1e-4)?;
    let steps: usize = cfg.resolve(args.sigma_steps, "sigma-steps", 200)?;
    let t_eval = cfg.resolve(args.t_eval, "t-eval", 0.0)?;

    if steps == 0 {
        return Err(CliError::Validation("sigma-steps must be at least 1".into()));
    }
    if steps > 1 && !(sigma_min < sigma_max) {
        return Err(CliError::Validation(format!(
            "need sigma-min < sigma-max for a multi-point sweep (got {sigma_min:e} .. {sigma_max:e})"
        )));
    }
    if !(t_eval >= 0.0) {
        return Err(CliError::Validation(format!("t-eval must be nonnegative (got {t_eval})")));
    }
    // Validate the dimensional inputs once up front.
    PhysicalParams::with_hbar(common.mass, common.gravity, common.height, sigma_min, common.hbar)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let rows: Vec<SweepRow> = log_spaced(sigma_min, sigma_max, steps)
        .into_par_iter()
        .map(|sigma| {
            let params = PhysicalParams::with_hbar(
                common.mass,
                common.gravity,
                common.height,
                sigma,
                common.hbar,
            )
            .expect("positive sweep value");
            compute_row(&params, t_eval, common.tol)
        })
        .collect();

    let n_failed = rows.iter().filter(|r| r.error.is_some()).count();

    let mut table = Table { columns: COLUMNS.iter().map(|s| s.to_string()).collect(), ..Default::default() };
    common.stamp(&mut table, "scan");
    table.meta_f64("sigma-min", sigma_min);
    table.meta_f64("sigma-max", sigma_max);
    table.meta("sigma-steps", steps);
    table.meta_f64("t-eval", t_eval);
    table.rows = rows.iter().map(SweepRow::cells).collect();
    emit(&table, common.out.as_deref(), common.format)?;

    if n_failed == rows.len() {
        return Err(CliError::Quadrature("every sweep row failed".into()));
    }
    if n_failed > 0 {
        eprintln!("scan: {n_failed}/{} rows recorded a quadrature error", rows.len());
    }
    Ok(())
}
