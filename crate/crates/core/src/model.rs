//! Dimensional inputs, derived scales, and parameter-regime classification.

use crate::error::{Error, Result};

/// Reduced Planck constant, CODATA value (J·s).
pub const HBAR_SI: f64 = 1.054571817e-34;

/// Default factor by which a strict inequality must hold before a
/// parameter set is assigned to an asymptotic regime.
pub const DEFAULT_REGIME_THRESHOLD: f64 = 100.0;

/// Dimensional inputs of the drop experiment, SI units throughout.
///
/// `x` is the detector height below the release point; `sigma` the
/// initial position spread of the packet. `hbar` is a field rather
/// than a constant so natural-unit cases (ħ = 1) are expressible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Particle mass (kg).
    pub m: f64,
    /// Gravitational acceleration (m·s⁻²).
    pub g: f64,
    /// Detector distance below the release point (m), positive.
    pub x: f64,
    /// Initial position standard deviation (m), positive.
    pub sigma: f64,
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
}

impl PhysicalParams {
    /// Params with the CODATA value of ħ.
    pub fn new(m: f64, g: f64, x: f64, sigma: f64) -> Result<Self> {
        Self::with_hbar(m, g, x, sigma, HBAR_SI)
    }

    pub fn with_hbar(m: f64, g: f64, x: f64, sigma: f64, hbar: f64) -> Result<Self> {
        let p = Self { m, g, x, sigma, hbar };
        p.validate()?;
        Ok(p)
    }

    /// Solves for the detector height and packet width that realize a
    /// given quantumness ratio `q` and aspect ratio `sigma_over_x`,
    /// keeping mass, gravity, and ħ fixed.
    ///
    /// Inverts q = ħ/(2mσ√(2gx)) with σ = (σ/x)·x, giving
    /// x = [ħ/(2m·(σ/x)·q·√(2g))]^(2/3).
    pub fn from_regime(q: f64, sigma_over_x: f64, m: f64, g: f64, hbar: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(Error::Invalid { field: "q", reason: "must be positive", value: q });
        }
        if !(sigma_over_x > 0.0) {
            return Err(Error::Invalid {
                field: "sigma_over_x",
                reason: "must be positive",
                value: sigma_over_x,
            });
        }
        let x = (hbar / (2.0 * m * sigma_over_x * q * (2.0 * g).sqrt())).powf(2.0 / 3.0);
        Self::with_hbar(m, g, x, sigma_over_x * x, hbar)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("m", self.m),
            ("g", self.g),
            ("x", self.x),
            ("sigma", self.sigma),
            ("hbar", self.hbar),
        ];
        for (field, value) in checks {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Invalid { field, reason: "must be positive and finite", value });
            }
        }
        Ok(())
    }

    /// All derived scales; see [`derive_scales`].
    pub fn scales(&self) -> Result<DerivedScales> {
        derive_scales(self)
    }
}

/// Characteristic scales and dimensionless groups of the drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Classical fall time √(2x/g) (s).
    pub t_c: f64,
    /// Dispersion time 2mσ²/ħ (s); the packet width grows on this scale.
    pub tau: f64,
    /// Quantumness ratio ħ/(2mσ√(2gx)): de Broglie wavelength at the
    /// detector over the packet width, up to 4π.
    pub q: f64,
    /// Near-field parameter (1/q)(σ/x).
    pub beta: f64,
    /// Characteristic gravitational length (ħ²/(2m²g))^(1/3) (m).
    pub x0: f64,
    /// Initial momentum spread ħ/(2σ) (kg·m·s⁻¹).
    pub sigma_p: f64,
}

impl DerivedScales {
    /// Aspect ratio σ/x, recovered as q·β.
    pub fn sigma_over_x(&self) -> f64 {
        self.q * self.beta
    }
}

/// Computes every derived scale from validated dimensional inputs.
pub fn derive_scales(params: &PhysicalParams) -> Result<DerivedScales> {
    params.validate()?;
    let &PhysicalParams { m, g, x, sigma, hbar } = params;
    let q = hbar / (2.0 * m * sigma * (2.0 * g * x).sqrt());
    Ok(DerivedScales {
        t_c: (2.0 * x / g).sqrt(),
        tau: 2.0 * m * sigma * sigma / hbar,
        q,
        beta: (sigma / x) / q,
        x0: (hbar * hbar / (2.0 * m * m * g)).cbrt(),
        sigma_p: hbar / (2.0 * sigma),
    })
}

/// Asymptotic regime of a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    FarFieldSemiclassical,
    FarFieldQuantum,
    NearField,
    Intermediate,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::FarFieldSemiclassical => "FAR_FIELD_SEMICLASSICAL",
            Regime::FarFieldQuantum => "FAR_FIELD_QUANTUM",
            Regime::NearField => "NEAR_FIELD",
            Regime::Intermediate => "INTERMEDIATE",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "FAR_FIELD_SEMICLASSICAL" => Ok(Regime::FarFieldSemiclassical),
            "FAR_FIELD_QUANTUM" => Ok(Regime::FarFieldQuantum),
            "NEAR_FIELD" => Ok(Regime::NearField),
            "INTERMEDIATE" => Ok(Regime::Intermediate),
            other => Err(format!("unknown regime label `{other}`")),
        }
    }
}

/// Regime assignment plus the factor by which its defining
/// inequalities hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeLabel {
    pub regime: Regime,
    /// Smallest satisfaction ratio among the regime's conditions; for
    /// `Intermediate` the largest margin among the three candidates
    /// (how close the nearest regime came).
    pub margin: f64,
}

/// Assigns the unique regime whose inequalities hold by at least
/// `threshold`, or `Intermediate` when none does.
///
/// Far-field semiclassical: σ/x ≪ q and q ≪ 1. Far-field quantum:
/// σ/x ≪ q and q ≫ 1. Near-field: σ/x ≫ max(1, q, q²). Each ≪/≫ is
/// read as "by a factor of `threshold`".
pub fn classify_regime(scales: &DerivedScales, threshold: f64) -> Result<RegimeLabel> {
    if !(threshold > 1.0 && threshold.is_finite()) {
        return Err(Error::Invalid {
            field: "threshold",
            reason: "must be finite and > 1",
            value: threshold,
        });
    }
    let q = scales.q;
    let sx = scales.sigma_over_x();
    let far = q / sx;
    let margins = [
        (Regime::FarFieldSemiclassical, far.min(1.0 / q)),
        (Regime::FarFieldQuantum, far.min(q)),
        (Regime::NearField, sx / q.max(q * q).max(1.0)),
    ];
    for (regime, margin) in margins {
        if margin >= threshold {
            return Ok(RegimeLabel { regime, margin });
        }
    }
    let closest = margins.iter().map(|&(_, m)| m).fold(f64::MIN, f64::max);
    Ok(RegimeLabel { regime: Regime::Intermediate, margin: closest })
}
