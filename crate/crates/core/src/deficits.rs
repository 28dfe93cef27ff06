//! Physical-space energies and deficits.
//!
//! Every double integral here reduces, for radial data, to
//!
//!   E = 2 |S^{N-1}| int_0^inf  e^{-eta d} Phi^sigma(e^{-d}) D(d) dd,
//!   D(d) = int_R |g(t) - g(t-d)|^q e^{c t} dt,
//!
//! in log coordinates t = ln r, d = t - tau, with (g, q, c, eta) selected
//! by the weight mode:
//!
//!   unweighted Gagliardo    g = u,            q = p, c = N - sp, eta = N
//!   symmetric power (eps)   g = v,            q = p, c = 0,      eta = (N+sp)/2
//!   min/max (eps_W)         g = v^<p/2>,      q = 2, c = 0,      eta = N - (N-sp)/p
//!
//! where sigma = sp and v = u omega^{-1}. The diagonal singularity lives
//! entirely in the d-integral: the integrand behaves like d^{q-1-sigma}
//! (d^{-sigma} across jumps), so the engine integrates [d_lo, d_cap]
//! numerically on graded panels and closes (0, d_lo) with the analytic
//! leading-order model built from the jump sum and the |g'|^q moment.

use crate::error::{domain, Result};
use crate::kernel::{kernel_table, KernelTable};
use crate::norms;
use crate::params::Params;
use crate::profiles::{Cut, RadialProfile, RadialShape, Tail, TailTerm};
use crate::quad::{self, Quad};
use crate::specfun::sphere_area;
use serde::Serialize;
use std::sync::Arc;

const DELTA_LO: f64 = 1e-6;

/// Weight modes of the kernel, mirroring the three remainder functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    Unweighted,
    SymmetricPower,
    MinMax,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeficitReport {
    pub energy: f64,
    pub hardy: f64,
    pub sharp_constant: f64,
    pub deficit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remainder: Option<f64>,
    pub quad_error: f64,
}

/// x^{<b>} = |x|^b sgn(x).
pub fn sign_power(x: f64, b: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(b) * x.signum()
    }
}

fn abs_pow(x: f64, q: f64) -> f64 {
    if q == 2.0 {
        x * x
    } else {
        x.abs().powf(q)
    }
}

/// v = u omega^{-1}: samplewise multiplication by e^{beta t} with
/// beta = (N - sp)/p; tail exponents shift by beta.
pub fn ground_state_ratio(profile: &RadialProfile, params: &Params) -> RadialProfile {
    let beta = params.extremizer_exponent();
    let grid = profile.grid;
    let mut values = Vec::with_capacity(grid.n);
    let mut slopes = Vec::with_capacity(grid.n);
    for j in 0..grid.n {
        let t = grid.node(j);
        let w = (beta * t).exp();
        values.push(profile.values[j] * w);
        slopes.push((profile.slopes[j] + beta * profile.values[j]) * w);
    }
    let shift_tail = |tail: &Tail| Tail {
        terms: tail
            .terms
            .iter()
            .map(|tt| TailTerm {
                coef: tt.coef,
                gamma: tt.gamma + beta,
            })
            .collect(),
    };
    RadialProfile {
        grid,
        values,
        slopes,
        cuts: profile
            .cuts
            .iter()
            .map(|c| {
                let w = (beta * c.t).exp();
                Cut {
                    t: c.t,
                    left_value: c.left_value * w,
                    left_slope: (c.left_slope + beta * c.left_value) * w,
                    right_value: c.right_value * w,
                    right_slope: (c.right_slope + beta * c.right_value) * w,
                }
            })
            .collect(),
        inner_tail: shift_tail(&profile.inner_tail),
        outer_tail: shift_tail(&profile.outer_tail),
        label: format!("{} / omega", profile.label),
    }
}

/// Samplewise sign-power x -> x^{<b>} of a profile (used by the p < 2
/// machinery). Slopes at zeros of u are clamped to 0; the cusp costs only
/// O(dt) resolution in cells where u vanishes.
pub fn sign_power_profile(profile: &RadialProfile, b: f64) -> RadialProfile {
    let grid = profile.grid;
    let dv = |v: f64, s: f64| {
        if v == 0.0 {
            0.0
        } else {
            b * v.abs().powf(b - 1.0) * s
        }
    };
    RadialProfile {
        grid,
        values: profile.values.iter().map(|&v| sign_power(v, b)).collect(),
        slopes: profile
            .values
            .iter()
            .zip(&profile.slopes)
            .map(|(&v, &s)| dv(v, s))
            .collect(),
        cuts: profile
            .cuts
            .iter()
            .map(|c| Cut {
                t: c.t,
                left_value: sign_power(c.left_value, b),
                left_slope: dv(c.left_value, c.left_slope),
                right_value: sign_power(c.right_value, b),
                right_slope: dv(c.right_value, c.right_slope),
            })
            .collect(),
        inner_tail: Tail {
            terms: profile
                .inner_tail
                .terms
                .iter()
                .map(|tt| TailTerm {
                    coef: sign_power(tt.coef, b),
                    gamma: tt.gamma * b,
                })
                .collect(),
        },
        outer_tail: Tail {
            terms: profile
                .outer_tail
                .terms
                .iter()
                .map(|tt| TailTerm {
                    coef: sign_power(tt.coef, b),
                    gamma: tt.gamma * b,
                })
                .collect(),
        },
        label: format!("{}^<{}>", profile.label, b),
    }
}

/// int |g|^q e^{ct} dt (or |g'|^q with `deriv`), tails included.
/// Returns +inf when a tail term makes the integral diverge.
pub fn weighted_moment(shape: &dyn RadialShape, q: f64, c: f64, deriv: bool) -> Quad {
    let (lo, hi) = shape.window();
    let mut total = Quad::zero();
    // analytic tails; multi-term tails are handled term-by-term only when
    // a single term dominates, so require <= 1 term here
    for (tail, is_inner) in [(shape.inner_tail(), true), (shape.outer_tail(), false)] {
        let Some(tt) = (if is_inner {
            tail.dominant_inner()
        } else {
            tail.dominant_outer()
        }) else {
            continue;
        };
        let coef = if deriv { tt.coef * tt.gamma } else { tt.coef };
        if coef == 0.0 {
            continue;
        }
        let a = q * tt.gamma + c;
        if is_inner {
            if a <= 0.0 {
                return Quad {
                    value: f64::INFINITY,
                    abs_err: 0.0,
                    converged: true,
                };
            }
            total.value += abs_pow(coef, q) * (a * lo).exp() / a;
        } else {
            if a >= 0.0 {
                return Quad {
                    value: f64::INFINITY,
                    abs_err: 0.0,
                    converged: true,
                };
            }
            total.value += abs_pow(coef, q) * (a * hi).exp() / (-a);
        }
    }
    let pts = shape.segment_points();
    let mut f = |t: f64| {
        let g = if deriv {
            shape.deriv_t(t)
        } else {
            shape.eval_t(t)
        };
        abs_pow(g, q) * (c * t).exp()
    };
    total.add(quad::composite(&mut f, &pts));
    total
}

struct ReducedEnergy<'a> {
    shape: &'a dyn RadialShape,
    q: f64,
    c: f64,
    eta: f64,
    sigma: f64,
    table: Arc<KernelTable>,
    sphere: f64,
    pts: Vec<f64>,
    window: (f64, f64),
    support: (f64, f64),
    /// int |g|^q e^{ct} dt for the disjoint-support shortcut (zero tails).
    self_moment: Option<f64>,
}

enum TailStatus {
    Finite,
    Divergent,
}

impl<'a> ReducedEnergy<'a> {
    fn new(n: u32, sigma: f64, shape: &'a dyn RadialShape, q: f64, c: f64, eta: f64) -> Self {
        ReducedEnergy {
            shape,
            q,
            c,
            eta,
            sigma,
            table: kernel_table(n, sigma),
            sphere: sphere_area(n).expect("validated"),
            pts: shape.segment_points(),
            window: shape.window(),
            support: shape.support_hint(),
            self_moment: None,
        }
    }

    fn omega(&self, d: f64) -> f64 {
        (-self.eta * d).exp() * self.table.phi_at(d)
    }

    fn tail_status(&self) -> TailStatus {
        for (tail, inner) in [(self.shape.inner_tail(), true), (self.shape.outer_tail(), false)] {
            for tt in &tail.terms {
                if tt.coef == 0.0 || tt.gamma == 0.0 {
                    continue; // constant tails difference away
                }
                let a = self.q * tt.gamma + self.c;
                if inner && a <= 0.0 {
                    return TailStatus::Divergent;
                }
                if !inner && a >= 0.0 {
                    return TailStatus::Divergent;
                }
            }
        }
        TailStatus::Finite
    }

    /// exp-integral of e^{at} over [x0, x1].
    fn expint(a: f64, x0: f64, x1: f64) -> f64 {
        if a == 0.0 {
            x1 - x0
        } else {
            ((a * x1).exp() - (a * x0).exp()) / a
        }
    }

    fn single_term(tail: &Tail) -> Option<TailTerm> {
        match tail.terms.len() {
            0 => Some(TailTerm {
                coef: 0.0,
                gamma: 0.0,
            }),
            1 => Some(tail.terms[0]),
            _ => None,
        }
    }

    fn d_integral(&mut self, delta: f64) -> f64 {
        let (lo, hi) = self.window;
        let span = hi - lo;
        let inner = Self::single_term(self.shape.inner_tail());
        let outer = Self::single_term(self.shape.outer_tail());
        let mut value = 0.0;

        // disjoint-support shortcut for compactly supported shapes
        let zero_tails = matches!(inner, Some(t) if t.coef == 0.0)
            && matches!(outer, Some(t) if t.coef == 0.0);
        let (s_lo, s_hi) = self.support;
        if zero_tails && delta >= s_hi - s_lo {
            let m0 = *self.self_moment.get_or_insert_with(|| {
                weighted_moment(self.shape, self.q, self.c, false).value
            });
            return m0 * (1.0 + (self.c * delta).exp());
        }

        // pure-tail analytic pieces
        if let Some(tt) = inner {
            if tt.coef != 0.0 && tt.gamma != 0.0 {
                let factor = abs_pow(tt.coef * (-(-tt.gamma * delta).exp_m1()), self.q);
                let a = self.q * tt.gamma + self.c;
                value += factor * (a * lo).exp() / a; // a > 0 checked upstream
            }
        }
        if let Some(tt) = outer {
            if tt.coef != 0.0 && tt.gamma != 0.0 {
                let factor = abs_pow(tt.coef * (-(-tt.gamma * delta).exp_m1()), self.q);
                let a = self.q * tt.gamma + self.c;
                value += factor * (a * (hi + delta)).exp() / (-a);
            }
        }

        let shape = self.shape;
        let q = self.q;
        let c = self.c;
        let mut f = |t: f64| {
            let diff = shape.eval_t(t) - shape.eval_t(t - delta);
            let w = if c == 0.0 { 1.0 } else { (c * t).exp() };
            abs_pow(diff, q) * w
        };
        let _ = span;

        if delta < s_hi - s_lo {
            // merge pts and pts + delta into one clipped breakpoint list
            let clip_lo = s_lo;
            let clip_hi = s_hi + delta;
            let mut bps = Vec::with_capacity(2 * self.pts.len() + 2);
            bps.push(clip_lo);
            let (mut i, mut j) = (0usize, 0usize);
            while i < self.pts.len() || j < self.pts.len() {
                let a = self.pts.get(i).copied().unwrap_or(f64::INFINITY);
                let b = self
                    .pts
                    .get(j)
                    .map(|x| x + delta)
                    .unwrap_or(f64::INFINITY);
                let x = a.min(b);
                if a <= b {
                    i += 1;
                } else {
                    j += 1;
                }
                if x > clip_lo && x < clip_hi && bps.last().map_or(true, |&last| x > last) {
                    bps.push(x);
                }
            }
            bps.push(clip_hi);
            value += quad::composite_g7(&mut f, &bps);
        } else {
            let clipped: Vec<f64> = std::iter::once(s_lo)
                .chain(self.pts.iter().copied().filter(|&x| x > s_lo && x < s_hi))
                .chain(std::iter::once(s_hi))
                .collect();
            value += quad::composite_g7(&mut f, &clipped);
            let shifted: Vec<f64> = clipped.iter().map(|x| x + delta).collect();
            value += quad::composite_g7(&mut f, &shifted);
            // cross region [s_hi, s_lo + delta]: arg1 outer, arg2 inner
            match (outer, inner) {
                (Some(o), Some(ins)) if o.coef == 0.0 && ins.coef == 0.0 => {}
                (Some(o), Some(ins)) if o.coef == 0.0 => {
                    let a = self.q * ins.gamma + self.c;
                    value += abs_pow(ins.coef, self.q)
                        * (-self.q * ins.gamma * delta).exp()
                        * Self::expint(a, s_hi, s_lo + delta);
                }
                (Some(o), Some(ins)) if ins.coef == 0.0 => {
                    let a = self.q * o.gamma + self.c;
                    value += abs_pow(o.coef, self.q) * Self::expint(a, s_hi, s_lo + delta);
                }
                _ => {
                    let qv = quad::adaptive(&mut f, s_hi, s_lo + delta, 1e-300, 1e-9, 200);
                    value += qv.value;
                }
            }
        }
        value
    }

    fn compute(&mut self) -> Quad {
        if matches!(self.tail_status(), TailStatus::Divergent) {
            return Quad {
                value: f64::INFINITY,
                abs_err: 0.0,
                converged: true,
            };
        }
        let jumps = self.shape.jumps();
        let jump_sum: f64 = jumps
            .iter()
            .map(|&(t, j)| abs_pow(j, self.q) * (self.c * t).exp())
            .sum();
        if jump_sum > 0.0 && self.sigma >= 1.0 {
            // a jump has infinite energy once the kernel order reaches 1
            return Quad {
                value: f64::INFINITY,
                abs_err: 0.0,
                converged: true,
            };
        }
        let grad_moment = weighted_moment(self.shape, self.q, self.c, true);
        if grad_moment.value.is_infinite() {
            return Quad {
                value: f64::INFINITY,
                abs_err: 0.0,
                converged: true,
            };
        }

        // analytic closure of (0, d_lo]: D(d) ~ jump_sum d + grad_moment d^q
        let c_phi = self.table.c_phi();
        let mut small = 0.0;
        if jump_sum > 0.0 {
            small += jump_sum * DELTA_LO.powf(1.0 - self.sigma) / (1.0 - self.sigma);
        }
        small += grad_moment.value * DELTA_LO.powf(self.q - self.sigma) / (self.q - self.sigma);
        small *= c_phi;
        let small_err = small.abs() * 20.0 * DELTA_LO + grad_moment.abs_err;

        // graded panels d_lo -> 1, then dyadic panels out to the cap
        let (s_lo, s_hi) = self.support;
        let span = (s_hi - s_lo).max(1.0);
        let decay = (self.eta - self.c).max(0.05);
        let d_cap = span + 45.0 / decay;
        let mut seeds = vec![DELTA_LO];
        let mut x = DELTA_LO;
        while x < 1.0 {
            x = (x * 4.0).min(1.0);
            seeds.push(x);
        }
        while x < d_cap {
            x = (x * 2.0).min(d_cap);
            seeds.push(x);
        }

        let mut f = |d: f64| {
            let dv = self.d_integral(d);
            self.omega(d) * dv
        };
        let main = quad::adaptive_seeded(&mut f, &seeds, 1e-300, 1e-9, 320);
        // remainder beyond the cap decays like e^{-(eta - c) d}
        let d_end = self.d_integral(d_cap);
        let tail_bound = self.omega(d_cap) * d_end / decay;

        let value = 2.0 * self.sphere * (small + main.value);
        let abs_err = 2.0
            * self.sphere
            * (small_err + main.abs_err + tail_bound + 1e-11 * main.value.abs());
        Quad {
            value,
            abs_err,
            converged: true,
        }
    }
}

/// Parameters (g-transform aside) of the three weight modes.
fn mode_spec(params: &Params, mode: WeightMode) -> (f64, f64, f64) {
    let n = params.n as f64;
    let sp = params.s * params.p;
    match mode {
        WeightMode::Unweighted => (params.p, n - sp, n),
        WeightMode::SymmetricPower => (params.p, 0.0, (n + sp) / 2.0),
        WeightMode::MinMax => (2.0, 0.0, n - (n - sp) / params.p),
    }
}

/// Weighted Gagliardo-type energy of an arbitrary shape; `g` must already
/// be the transformed function for the chosen mode.
pub fn reduced_energy(
    shape: &dyn RadialShape,
    params: &Params,
    mode: WeightMode,
) -> Result<Quad> {
    if !(params.s < 1.0) {
        return Err(domain("fractional energies need s < 1"));
    }
    let (q, c, eta) = mode_spec(params, mode);
    let mut engine = ReducedEnergy::new(params.n, params.s * params.p, shape, q, c, eta);
    Ok(engine.compute())
}

/// [u]^p: the Gagliardo seminorm to the p-th power, with error estimate.
pub fn gagliardo_seminorm(shape: &dyn RadialShape, params: &Params) -> Result<Quad> {
    reduced_energy(shape, params, WeightMode::Unweighted)
}

/// eps(u): the p >= 2 remainder functional (v-energy with the symmetric
/// power weight).
pub fn weighted_remainder_eps(profile: &RadialProfile, params: &Params) -> Result<f64> {
    if params.p < 2.0 {
        return Err(domain("eps(u) requires p >= 2"));
    }
    let v = ground_state_ratio(profile, params);
    Ok(reduced_energy(&v, params, WeightMode::SymmetricPower)?.value)
}

/// eps_W(u): the 1 < p < 2 remainder (squared sign-power differences with
/// the min/max weight).
pub fn weighted_remainder_eps_w(profile: &RadialProfile, params: &Params) -> Result<f64> {
    if !(params.p > 1.0 && params.p < 2.0) {
        return Err(domain("eps_W(u) requires 1 < p < 2"));
    }
    let v = ground_state_ratio(profile, params);
    let w = sign_power_profile(&v, params.p / 2.0);
    Ok(reduced_energy(&w, params, WeightMode::MinMax)?.value)
}

/// delta_{s,p}(u) = [u]^p - C_{N,s,p} int |u|^p |x|^{-sp} dx.
pub fn fractional_deficit(profile: &RadialProfile, params: &Params) -> Result<DeficitReport> {
    let energy = gagliardo_seminorm(profile, params)?;
    let hardy = norms::hardy_potential(profile, params)?;
    let (sharp, sharp_err) = crate::constants::sharp_constant_frac(params)?;
    let deficit = if energy.value.is_finite() && hardy.value.is_finite() {
        energy.value - sharp * hardy.value
    } else {
        f64::NAN
    };
    Ok(DeficitReport {
        energy: energy.value,
        hardy: hardy.value,
        sharp_constant: sharp,
        deficit,
        remainder: None,
        quad_error: energy.abs_err
            + sharp * hardy.abs_err
            + sharp_err * hardy.value.min(f64::MAX)
            + 1e-14 * energy.value.abs().min(f64::MAX),
    })
}

/// |S^{N-1}| int |u'(r)|^p r^{N-1} dr in log coordinates. Rejects sharp
/// plateau cutoffs, whose derivative is distributional.
pub fn local_dirichlet_energy(profile: &RadialProfile, n: u32, p: f64) -> Result<Quad> {
    if !(p > 1.0 && p < n as f64) {
        return Err(domain("local energy needs 1 < p < N"));
    }
    if profile.has_jumps() {
        return Err(domain(
            "sharp cutoff has a distributional derivative; use ramp > 0",
        ));
    }
    let sphere = sphere_area(n)?;
    let mut q = weighted_moment(profile, p, n as f64 - p, true);
    q.value *= sphere;
    q.abs_err *= sphere;
    Ok(q)
}

/// delta_p(u) = Dirichlet - ((N-p)/p)^p local Hardy.
pub fn local_deficit(profile: &RadialProfile, n: u32, p: f64) -> Result<DeficitReport> {
    let energy = local_dirichlet_energy(profile, n, p)?;
    let local_params = Params::new(n, 1.0, p)?;
    let hardy = norms::hardy_potential(profile, &local_params)?;
    let sharp = crate::constants::sharp_constant_local(n, p)?;
    let deficit = if energy.value.is_finite() && hardy.value.is_finite() {
        energy.value - sharp * hardy.value
    } else {
        f64::NAN
    };
    Ok(DeficitReport {
        energy: energy.value,
        hardy: hardy.value,
        sharp_constant: sharp,
        deficit,
        remainder: None,
        quad_error: energy.abs_err + sharp * hardy.abs_err,
    })
}

/// int |grad v|^p |x|^{-(N-p)} dx = |S^{N-1}| int |dv/dt|^p dt with
/// v = u omega_0^{-1}; the local ground-state remainder.
pub fn local_remainder(profile: &RadialProfile, n: u32, p: f64) -> Result<f64> {
    if !(p > 1.0 && p < n as f64) {
        return Err(domain("local remainder needs 1 < p < N"));
    }
    if profile.has_jumps() {
        return Err(domain("sharp cutoff not admissible in the local remainder"));
    }
    let local_params = Params::new(n, 1.0, p)?;
    let v = ground_state_ratio(profile, &local_params);
    let q = weighted_moment(&v, p, 0.0, true);
    Ok(sphere_area(n)? * q.value)
}
