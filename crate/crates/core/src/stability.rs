//! Empirical stability ratios: deficit / (distance^alpha * weight) for the
//! four quantitative-stability regimes, plus parameter-family scans.
//!
//! The theorems' constants are existential; scans record empirical floors
//! and never compare against a claimed value.

use crate::cylinder;
use crate::deficits;
use crate::error::{domain, Result};
use crate::norms::{self, DistanceResult};
use crate::params::Params;
use crate::profiles::{
    make_gaussian, make_truncated_extremizer, GridSpec, RadialProfile,
};
use crate::uncertainty;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Fractional, p >= 2: exponent 2p against d_{s,p}.
    FracPGe2,
    /// Fractional, 1 < p < 2: exponent 4 against D_{s,p}.
    FracPLt2,
    /// Local s = 1: exponent max{4, 2p} against d_p.
    Local,
    /// p = 2 pullback: exponent 4 against the transported distance, with
    /// the transported mass as weight.
    PullbackP2,
}

impl Regime {
    pub fn exponent(&self, params: &Params) -> f64 {
        match self {
            Regime::FracPGe2 => 2.0 * params.p,
            Regime::FracPLt2 => 4.0,
            Regime::Local => (2.0 * params.p).max(4.0),
            Regime::PullbackP2 => 4.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::FracPGe2 => "frac_p_ge_2",
            Regime::FracPLt2 => "frac_p_lt_2",
            Regime::Local => "local",
            Regime::PullbackP2 => "pullback_p2",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub params: Params,
    pub regime: Regime,
    pub deficit: f64,
    /// Hardy potential, or the transported mass in the pullback regime.
    pub hardy: f64,
    pub distance: DistanceResult,
    pub exponent: f64,
    pub ratio: f64,
    pub quad_error: f64,
}

/// Assemble the regime-matched deficit, distance, exponent and weight into
/// a single ratio deficit / (distance^alpha * weight).
pub fn stability_report(
    profile: &RadialProfile,
    params: &Params,
    regime: Regime,
) -> Result<StabilityReport> {
    let exponent = regime.exponent(params);
    let (deficit, weight, quad_error, distance) = match regime {
        Regime::FracPGe2 => {
            if params.p < 2.0 || params.s >= 1.0 {
                return Err(domain("frac_p_ge_2 regime needs p >= 2 and s < 1"));
            }
            let rep = deficits::fractional_deficit(profile, params)?;
            let d = norms::distance_dsp(profile, params)?;
            (rep.deficit, rep.hardy, rep.quad_error, d)
        }
        Regime::FracPLt2 => {
            if !(params.p > 1.0 && params.p < 2.0) || params.s >= 1.0 {
                return Err(domain("frac_p_lt_2 regime needs 1 < p < 2 and s < 1"));
            }
            let rep = deficits::fractional_deficit(profile, params)?;
            let d = norms::distance_dsp_small(profile, params)?;
            (rep.deficit, rep.hardy, rep.quad_error, d)
        }
        Regime::Local => {
            if params.s != 1.0 {
                return Err(domain("local regime needs s = 1"));
            }
            let rep = deficits::local_deficit(profile, params.n, params.p)?;
            let d = norms::distance_local(profile, params.n, params.p)?;
            (rep.deficit, rep.hardy, rep.quad_error, d)
        }
        Regime::PullbackP2 => {
            if params.p != 2.0 || params.n < 3 || params.s >= 1.0 {
                return Err(domain("pullback regime needs p = 2, N >= 3, s < 1"));
            }
            let deficit = cylinder::fractional_deficit_spectral(profile, params.n, params.s)?;
            let mass = uncertainty::transformed_mass(profile, params.n, params.s)?;
            let d = norms::distance_pullback(profile, params.n, params.s)?;
            (deficit, mass, 1e-10 * deficit.abs(), d)
        }
    };
    let ratio = if distance.value > 0.0 && distance.value.is_finite() && deficit > quad_error {
        deficit / (distance.value.powf(exponent) * weight)
    } else {
        f64::NAN
    };
    Ok(StabilityReport {
        params: *params,
        regime,
        deficit,
        hardy: weight,
        distance,
        exponent,
        ratio,
        quad_error,
    })
}

/// Shipped near-extremal and far-from-extremal families.
#[derive(Debug, Clone, Serialize)]
pub enum FamilySpec {
    /// Truncated extremizers with half log-width L: window [e^-L, e^L].
    WideningWindow { half_widths: Vec<f64>, ramp: f64 },
    /// u = omega_trunc + eps g with a unit Gaussian g.
    ExtremizerPerturbation {
        eps_values: Vec<f64>,
        half_width: f64,
        ramp: f64,
    },
    /// Pure Gaussians across widths.
    GaussianWidths { sigmas: Vec<f64> },
}

impl FamilySpec {
    pub fn parameter_values(&self) -> Vec<f64> {
        match self {
            FamilySpec::WideningWindow { half_widths, .. } => half_widths.clone(),
            FamilySpec::ExtremizerPerturbation { eps_values, .. } => eps_values.clone(),
            FamilySpec::GaussianWidths { sigmas } => sigmas.clone(),
        }
    }

    pub fn member(&self, value: f64, params: &Params, grid: GridSpec) -> Result<RadialProfile> {
        match self {
            FamilySpec::WideningWindow { ramp, .. } => {
                make_truncated_extremizer(params, 1.0, (-value).exp(), value.exp(), *ramp, grid)
            }
            FamilySpec::ExtremizerPerturbation {
                half_width, ramp, ..
            } => {
                let base = make_truncated_extremizer(
                    params,
                    1.0,
                    (-half_width).exp(),
                    half_width.exp(),
                    *ramp,
                    grid,
                )?;
                let bump = make_gaussian(1.0, grid)?;
                RadialProfile::linear_combination(&[(1.0, &base), (value, &bump)])
            }
            FamilySpec::GaussianWidths { .. } => make_gaussian(value, grid),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub parameter: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<StabilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One row per parameter value, deterministic ordering; member failures
/// are recorded per row and the scan continues.
pub fn family_scan(
    family: &FamilySpec,
    params: &Params,
    regime: Regime,
    grid: GridSpec,
) -> Vec<ScanRow> {
    let values = family.parameter_values();
    values
        .par_iter()
        .map(|&value| match family.member(value, params, grid) {
            Ok(profile) => match stability_report(&profile, params, regime) {
                Ok(report) => ScanRow {
                    parameter: value,
                    report: Some(report),
                    error: None,
                },
                Err(e) => ScanRow {
                    parameter: value,
                    report: None,
                    error: Some(e.to_string()),
                },
            },
            Err(e) => ScanRow {
                parameter: value,
                report: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

/// Smallest ratio across successful rows: the empirical stability floor.
pub fn empirical_floor(rows: &[ScanRow]) -> Option<f64> {
    rows.iter()
        .filter_map(|r| r.report.as_ref())
        .map(|r| r.ratio)
        .filter(|r| r.is_finite())
        .min_by(f64::total_cmp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_table() {
        let p3 = Params::new(3, 0.5, 3.0).unwrap();
        let p15 = Params::new(3, 0.5, 1.5).unwrap();
        let plocal = Params::new(4, 1.0, 3.0).unwrap();
        let p2 = Params::new(4, 0.5, 2.0).unwrap();
        assert_eq!(Regime::FracPGe2.exponent(&p3), 6.0);
        assert_eq!(Regime::FracPLt2.exponent(&p15), 4.0);
        assert_eq!(Regime::Local.exponent(&plocal), 6.0);
        assert_eq!(
            Regime::Local.exponent(&Params::new(4, 1.0, 1.5).unwrap()),
            4.0
        );
        assert_eq!(Regime::PullbackP2.exponent(&p2), 4.0);
    }

    #[test]
    fn regime_mismatch_is_domain_error() {
        let pr = Params::new(3, 0.5, 2.0).unwrap();
        let g = make_gaussian(1.0, GridSpec::default()).unwrap();
        assert!(stability_report(&g, &pr, Regime::FracPLt2).is_err());
        assert!(stability_report(&g, &pr, Regime::Local).is_err());
        let pr15 = Params::new(3, 0.5, 1.5).unwrap();
        assert!(stability_report(&g, &pr15, Regime::FracPGe2).is_err());
    }

    #[test]
    fn amplitude_invariance_of_ratio() {
        let pr = Params::new(3, 0.5, 2.0).unwrap();
        let g = make_gaussian(1.0, GridSpec::default()).unwrap();
        let r1 = stability_report(&g, &pr, Regime::FracPGe2).unwrap();
        let r3 = stability_report(&g.scaled(3.0), &pr, Regime::FracPGe2).unwrap();
        assert!(
            (r1.ratio - r3.ratio).abs() <= 1e-6 * r1.ratio.abs(),
            "{} vs {}",
            r1.ratio,
            r3.ratio
        );
        assert!(r1.ratio.is_finite() && r1.ratio > 0.0);
    }

    #[test]
    fn widening_window_scan_monotone() {
        let pr = Params::new(3, 0.5, 2.0).unwrap();
        let family = FamilySpec::WideningWindow {
            half_widths: vec![2.0, 4.0, 6.0],
            ramp: 1.0,
        };
        let rows = family_scan(&family, &pr, Regime::FracPGe2, GridSpec::default());
        assert_eq!(rows.len(), 3);
        let reports: Vec<&StabilityReport> =
            rows.iter().map(|r| r.report.as_ref().unwrap()).collect();
        for w in reports.windows(2) {
            assert!(
                w[1].distance.value < w[0].distance.value,
                "distance should shrink with the window"
            );
        }
        let floor = empirical_floor(&rows).unwrap();
        assert!(floor > 0.0);
    }

    #[test]
    fn scan_records_member_failures() {
        let pr = Params::new(3, 0.5, 2.0).unwrap();
        // second window collides with the grid boundary -> per-row error
        let family = FamilySpec::WideningWindow {
            half_widths: vec![2.0, 40.0],
            ramp: 0.5,
        };
        let rows = family_scan(&family, &pr, Regime::FracPGe2, GridSpec::default());
        assert_eq!(rows.len(), 2);
        assert!(rows[0].report.is_some());
        assert!(rows[1].error.is_some());
    }
}
