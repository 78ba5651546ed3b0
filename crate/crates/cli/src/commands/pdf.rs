//! `toa pdf`: tabulate the arrival-time density and CDF on a grid
//! spanning the 1e-8 .. 1-1e-8 quantile range.

use freefall_toa::{PhysicalParams, ToaDistribution};

use crate::commands::resolve_common;
use crate::config::ConfigMap;
use crate::output::{emit, Cell, Table};
use crate::{CliError, CliResult, PdfArgs};

pub fn run(args: &PdfArgs, cfg: &ConfigMap) -> CliResult<()> {
    let common = resolve_common(&args.common, cfg)?;
    let sigma = cfg.resolve(args.sigma, "sigma", 1e-6)?;
    let n: usize = cfg.resolve(args.bins, "bins", 1000)?;
    if n < 2 {
        return Err(CliError::Validation(format!("bins must be at least 2 (got {n})")));
    }

    let params =
        PhysicalParams::with_hbar(common.mass, common.gravity, common.height, sigma, common.hbar)
            .map_err(|e| CliError::Validation(e.to_string()))?;
    let dist = ToaDistribution::new(params)?;
    let t_lo = dist.toa_quantile(1e-8)?;
    let t_hi = dist.toa_quantile(1.0 - 1e-8)?;

    let mut table = Table {
        columns: vec!["t".into(), "pdf".into(), "cdf".into()],
        ..Default::default()
    };
    common.stamp(&mut table, "pdf");
    table.meta_f64("sigma", sigma);
    table.meta("bins", n);
    table.meta_f64("t_c", dist.scales().t_c);
    table.meta_f64("norm", dist.norm());

    for i in 0..n {
        let t = t_lo + (t_hi - t_lo) * i as f64 / (n - 1) as f64;
        table.rows.push(vec![
            Cell::Num(t),
            Cell::Num(dist.toa_pdf(t)),
            Cell::Num(dist.toa_cdf(t)),
        ]);
    }
    emit(&table, common.out.as_deref(), common.format)
}
