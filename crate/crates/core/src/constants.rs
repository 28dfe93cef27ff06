//! Sharp and remainder constants of the Hardy inequalities.
//!
//! The Gagliardo-form sharp constant
//!
//!   C_{N,s,p} = 2 int_0^1 r^{sp-1} |1 - r^{(N-sp)/p}|^p Phi_{N,s,p}(r) dr
//!
//! has algebraic endpoint singularities with known exponents: r^{sp-1} at
//! the origin and (1-r)^{p-1-sp} at the diagonal. Both are removed exactly
//! by power substitutions before the adaptive quadrature sees the
//! integrand, so the scheme converges at the same rate for every admissible
//! (N, s, p).

use crate::error::{domain, Result};
use crate::kernel;
use crate::params::Params;
use crate::profiles::{AnalyticShape, Tail};
use crate::quad;
use crate::specfun::{constant_k, frac_hardy_constant_fourier, lgamma, sphere_area};
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Computed constants for one parameter triple, serialized by the CLI as a
/// flat JSON object.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantSet {
    pub params: Params,
    /// Gagliardo-form sharp constant C_{N,s,p} (s < 1 only).
    pub frac_sharp: Option<f64>,
    /// Fourier-form sharp constant C_{N,s} (requires N > 2s).
    pub fourier_sharp: Option<f64>,
    /// p >= 2 remainder constant.
    pub cp: Option<f64>,
    /// 1 < p < 2 remainder constant.
    pub cp_star: Option<f64>,
    /// K_{N,s} of the extremizer transport.
    pub k: Option<f64>,
    /// ((N-p)/p)^p for 1 < p < N.
    pub local_sharp: Option<f64>,
    /// Gagliardo-to-Fourier conversion factor (p = 2 only).
    pub kappa: Option<f64>,
    pub quad_error: f64,
}

/// Phi_{N,s,p}(r): the angular kernel at sigma = sp.
pub fn angular_kernel_phi(params: &Params, r: f64) -> Result<f64> {
    kernel::phi(params.n, params.s * params.p, r)
}

/// C_{N,s,p} with its quadrature error estimate.
pub fn sharp_constant_frac(params: &Params) -> Result<(f64, f64)> {
    if !(params.s < 1.0) {
        return Err(domain("Gagliardo constant needs s < 1"));
    }
    let n = params.n;
    let sigma = params.s * params.p;
    let p = params.p;
    let beta = params.extremizer_exponent();

    // r in (0, 1/2]: v = r^{sigma} flattens r^{sigma - 1}
    let mut f_low = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let r = v.powf(1.0 / sigma);
        let core = (-(beta * r.ln()).exp_m1()).abs().powf(p);
        core * kernel::phi_with_w(n, sigma, r, 1.0 - r)
    };
    let q_low = quad::adaptive(&mut f_low, 0.0, 0.5f64.powf(sigma), 1e-12, 1e-9, 3000);

    // r in [1/2, 1): w = 1 - r, then w = z^{1/(p - sigma)} flattens
    // the (1-r)^{p-1-sigma} endpoint
    let qexp = p - sigma;
    let mut f_high = |z: f64| {
        if z <= 0.0 {
            return 0.0;
        }
        let w = z.powf(1.0 / qexp);
        let r = 1.0 - w;
        let core = (-(beta * (-w).ln_1p()).exp_m1()).abs().powf(p);
        r.powf(sigma - 1.0) * core * kernel::phi_with_w(n, sigma, r, w) * w.powf(1.0 - qexp)
    };
    let q_high = quad::adaptive(&mut f_high, 0.0, 0.5f64.powf(qexp), 1e-12, 1e-9, 3000);

    let value = 2.0 * (q_low.value / sigma + q_high.value / qexp);
    let err = 2.0 * (q_low.abs_err / sigma + q_high.abs_err / qexp);
    if !(q_low.converged && q_high.converged) {
        return Err(crate::error::Error::Numerical(format!(
            "sharp constant quadrature stalled, err = {err:.3e}"
        )));
    }
    Ok((value, err))
}

/// c_p = min over tau in (0, 1/2) of (1-tau)^p - tau^p + p tau^{p-1}.
/// Golden-section bracket refined by bisection on the derivative.
pub fn remainder_constant_cp(p: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(domain("c_p is defined for p >= 2"));
    }
    if p == 2.0 {
        // h(tau) = 1 identically
        return Ok(1.0);
    }
    let h = |tau: f64| (1.0 - tau).powf(p) - tau.powf(p) + p * tau.powf(p - 1.0);
    let dh =
        |tau: f64| -p * (1.0 - tau).powf(p - 1.0) - p * tau.powf(p - 1.0) + p * (p - 1.0) * tau.powf(p - 2.0);
    // golden section on (0, 1/2)
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (1e-12, 0.5 - 1e-12);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (h(x1), h(x2));
    for _ in 0..90 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = h(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = h(x2);
        }
    }
    // polish the stationary point
    let (mut lo, mut hi) = ((a - 1e-6).max(1e-12), (b + 1e-6).min(0.5 - 1e-12));
    if dh(lo) * dh(hi) < 0.0 {
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if dh(lo) * dh(m) <= 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
    }
    Ok(h(0.5 * (lo + hi)))
}

/// c*_p = max{(p-1)/p, p(p-1)/2} for 1 < p < 2; the nonnegative-input
/// variant of the constant is p - 1.
pub fn remainder_constant_cp_star(p: f64) -> Result<f64> {
    if !(p > 1.0 && p < 2.0) {
        return Err(domain("c*_p is defined for 1 < p < 2"));
    }
    Ok(((p - 1.0) / p).max(p * (p - 1.0) / 2.0))
}

/// ((N - p)/p)^p, the optimal local Hardy constant.
pub fn sharp_constant_local(n: u32, p: f64) -> Result<f64> {
    if !(p > 1.0 && p < n as f64) {
        return Err(domain("local constant needs 1 < p < N"));
    }
    Ok(((n as f64 - p) / p).powf(p))
}

/// Relative Euler-Lagrange residual of the virtual extremizer at |x| = 1:
/// the principal-value integral of the fractional p-Laplacian of omega
/// against the radial kernel must reproduce C_{N,s,p} exactly.
///
/// Symmetric pairing rho = 1 +/- h realizes the ||x|-|y|| > eps principal
/// value, cancelling the odd part of the singularity at machine level; the
/// rho > 2 remainder maps to (0, 1/2) by rho -> 1/rho.
pub fn el_residual(params: &Params) -> Result<f64> {
    if !(params.p > 1.0) {
        return Err(domain("EL residual needs p > 1 (nonlinear weight)"));
    }
    if !(params.s < 1.0) {
        return Err(domain("EL residual is fractional-only (s < 1)"));
    }
    let (sharp, sharp_err) = sharp_constant_frac(params)?;
    let n = params.n;
    let sigma = params.s * params.p;
    let p = params.p;
    let beta = params.extremizer_exponent();

    // F(rho) = (1 - rho^{-beta})^{<p-1>} rho^{N-1} max(1,rho)^{-(N+sigma)}
    //          Phi(min/max)
    let pair = |h: f64| -> f64 {
        if h <= 0.0 || h >= 1.0 {
            return 0.0;
        }
        // rho = 1 + h
        let up = {
            let diff = -(-beta * h.ln_1p()).exp_m1(); // 1 - (1+h)^{-beta} > 0
            let rho = 1.0 + h;
            let w = h / rho;
            diff.powf(p - 1.0) * rho.powf(-1.0 - sigma) * kernel::phi_with_w(n, sigma, 1.0 / rho, w)
        };
        // rho = 1 - h
        let down = {
            let diff = (-beta * (-h).ln_1p()).exp_m1(); // (1-h)^{-beta} - 1 > 0
            let rho = 1.0 - h;
            diff.powf(p - 1.0) * rho.powf(n as f64 - 1.0) * kernel::phi_with_w(n, sigma, rho, h)
        };
        up - down
    };
    let seeds = quad::geometric_grades(1e-10, 1.0, 0.25);
    let q_pair = quad::adaptive_seeded(&mut |h| pair(h), &seeds, 1e-12, 1e-9, 4000);

    // remainder over rho > 2 mapped by u = 1/rho onto (0, 1/2):
    // (1 - u^beta)^{p-1} u^{sigma-1} Phi(u); substitute v = u^sigma
    let mut f_far = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let u = v.powf(1.0 / sigma);
        let diff = -(beta * u.ln()).exp_m1();
        diff.powf(p - 1.0) * kernel::phi_with_w(n, sigma, u, 1.0 - u)
    };
    let q_far = quad::adaptive(&mut f_far, 0.0, 0.5f64.powf(sigma), 1e-12, 1e-9, 3000);

    let lhs = 2.0 * (q_pair.value + q_far.value / sigma);
    let residual = (lhs - sharp).abs() / sharp;
    if !(q_pair.converged && q_far.converged) {
        return Err(crate::error::Error::Numerical(format!(
            "EL quadrature stalled at residual {residual:.3e} (+/- {:.1e})",
            (q_pair.abs_err + q_far.abs_err + sharp_err) / sharp
        )));
    }
    Ok(residual)
}

/// kappa(N, s): the Gagliardo-to-Fourier energy ratio of the unit
/// Gaussian. The numerator runs through the radial reduction on the
/// analytic Gaussian; the denominator is the closed-form radial moment
/// |S^{N-1}| Gamma((N+2s)/2) / 2 of |xi|^{2s} e^{-|xi|^2}.
pub fn conversion_kappa(n: u32, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(domain("kappa needs 0 < s < 1"));
    }
    if (n as f64) <= 2.0 * s {
        return Err(domain("kappa needs N > 2s"));
    }
    static CACHE: OnceLock<Mutex<HashMap<(u32, u64), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, s.to_bits());
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(*v);
    }
    let params = Params::new(n, s, 2.0)?;
    let shape = gaussian_shape(1.0);
    let numerator = crate::deficits::gagliardo_seminorm(&shape, &params)?;
    let sphere = sphere_area(n)?;
    let denominator = sphere * 0.5 * lgamma((n as f64 + 2.0 * s) / 2.0).exp();
    let kappa = numerator.value / denominator;
    cache.lock().unwrap().insert(key, kappa);
    Ok(kappa)
}

/// Analytic Gaussian e^{-r^2/(2 sigma^2)} as a quadrature shape; used by
/// kappa so that width independence reflects quadrature alone.
pub fn gaussian_shape(width: f64) -> AnalyticShape {
    let w2 = width * width;
    AnalyticShape {
        eval: Box::new(move |t: f64| (-0.5 * (2.0 * t).exp() / w2).exp()),
        deriv: Box::new(move |t: f64| {
            let z = (2.0 * t).exp() / w2;
            -z * (-0.5 * z).exp()
        }),
        t_lo: -16.0,
        t_hi: width.ln() + 3.5,
        panels: 360,
        inner: Tail::power(1.0, 0.0),
        outer: Tail::zero(),
    }
}

/// Assemble every constant valid for the triple.
pub fn constant_set(params: &Params) -> Result<ConstantSet> {
    let mut quad_error = 0.0;
    let frac_sharp = if params.s < 1.0 {
        let (v, e) = sharp_constant_frac(params)?;
        quad_error += e;
        Some(v)
    } else {
        None
    };
    let fourier_sharp = frac_hardy_constant_fourier(params.n, params.s).ok();
    let cp = if params.p >= 2.0 {
        Some(remainder_constant_cp(params.p)?)
    } else {
        None
    };
    let cp_star = if params.p > 1.0 && params.p < 2.0 {
        Some(remainder_constant_cp_star(params.p)?)
    } else {
        None
    };
    let k = constant_k(params.n, params.s).ok();
    let local_sharp = sharp_constant_local(params.n, params.p).ok();
    let kappa = if params.p == 2.0 && params.s < 1.0 {
        Some(conversion_kappa(params.n, params.s)?)
    } else {
        None
    };
    Ok(ConstantSet {
        params: *params,
        frac_sharp,
        fourier_sharp,
        cp,
        cp_star,
        k,
        local_sharp,
        kappa,
        quad_error,
    })
}

/// The nonnegative-input p < 2 constant from the same display.
pub fn remainder_constant_nonneg(p: f64) -> Result<f64> {
    if !(p > 1.0 && p < 2.0) {
        return Err(domain("the nonnegative constant lives in 1 < p < 2"));
    }
    Ok(p - 1.0)
}
