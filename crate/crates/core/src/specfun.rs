//! Special-function kernel: log-Gamma on the right half plane, trigamma,
//! sphere areas, and the cylinder spectral symbols.
//!
//! The symbol line never touches a Gamma pole (real parts stay >= (N-2s)/4),
//! so log-Gamma is computed by an upward recurrence shift followed by the
//! Stirling series with Bernoulli corrections. |Gamma(a+ib)|^2 is always
//! formed as exp(2 Re log Gamma), which cannot overflow for large ell, xi.

use crate::error::{domain, Result};
use num_complex::Complex64;

const LN_2PI_HALF: f64 = 0.918_938_533_204_672_74; // ln(2*pi)/2

// B_{2n} / (2n (2n-1)) for the Stirling correction series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// log Gamma(z) for Re(z) > 0.
///
/// Recurrence shift to Re(z) >= 12, then Stirling with eight Bernoulli
/// terms; absolute accuracy ~1e-15 on the shifted argument.
pub fn lgamma_complex(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0, "lgamma_complex requires Re(z) > 0");
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 12.0 {
        shift += w.ln();
        w += 1.0;
    }
    let winv = w.inv();
    let w2inv = winv * winv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = winv;
    for c in STIRLING {
        series += c * pow;
        pow *= w2inv;
    }
    (w - 0.5) * w.ln() - w + LN_2PI_HALF + series - shift
}

/// log Gamma(x) for real x > 0.
pub fn lgamma(x: f64) -> f64 {
    lgamma_complex(Complex64::new(x, 0.0)).re
}

/// Trigamma psi'(x) for x > 0, relative accuracy ~1e-14.
///
/// Recurrence psi'(x) = psi'(x+1) + 1/x^2 shifts the argument above 12,
/// then the asymptotic series applies.
pub fn trigamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain(format!("trigamma needs x > 0, got {x}")));
    }
    // B_{2k} coefficients of psi'(x) ~ 1/x + 1/(2x^2) + sum B_{2k} x^{-2k-1}
    const B: [f64; 7] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
    ];
    let mut acc = 0.0;
    let mut x = x;
    while x < 12.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = inv + 0.5 * inv2;
    let mut pow = inv2 * inv;
    for b in B {
        series += b * pow;
        pow *= inv2;
    }
    Ok(acc + series)
}

/// Surface measure of the unit sphere S^{n-1}: 2 pi^{n/2} / Gamma(n/2).
pub fn sphere_area(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(domain("sphere_area needs n >= 1"));
    }
    let half = n as f64 / 2.0;
    Ok((std::f64::consts::PI.ln() * half + std::f64::consts::LN_2 - lgamma(half)).exp())
}

/// Laplace-Beltrami eigenvalue mu_ell = ell (ell + N - 2) on S^{N-1}.
pub fn cylinder_eigenvalue(n: u32, ell: u32) -> Result<f64> {
    if n < 2 {
        return Err(domain("cylinder_eigenvalue needs N >= 2"));
    }
    Ok(ell as f64 * (ell as f64 + n as f64 - 2.0))
}

/// Sharp constant of the p = 2 Fourier-form Hardy inequality:
/// C_{N,s} = 2^{2s} Gamma^2((N+2s)/4) / Gamma^2((N-2s)/4).
pub fn frac_hardy_constant_fourier(n: u32, s: f64) -> Result<f64> {
    check_fourier_domain(n, s)?;
    Ok(log_gamma_ratio_sq(n, s, 0, 0.0).exp())
}

/// K_{N,s} = 1/2 sqrt(psi'((N-2s)/4) - psi'((N+2s)/4)) sqrt(C_{N,s}).
///
/// Positive because the trigamma function is strictly decreasing.
pub fn constant_k(n: u32, s: f64) -> Result<f64> {
    check_fourier_domain(n, s)?;
    let nf = n as f64;
    let d = trigamma((nf - 2.0 * s) / 4.0)? - trigamma((nf + 2.0 * s) / 4.0)?;
    Ok(0.5 * d.sqrt() * frac_hardy_constant_fourier(n, s)?.sqrt())
}

fn check_fourier_domain(n: u32, s: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(domain(format!("s = {s} outside (0, 1]")));
    }
    if (n as f64) <= 2.0 * s {
        return Err(domain(format!("need N > 2s, got N = {n}, s = {s}")));
    }
    Ok(())
}

/// 2s ln 2 + 2 [Re lgamma((N+2s+2l+2i xi)/4) - Re lgamma((N-2s+2l+2i xi)/4)].
///
/// This is log of the Gamma-ratio part of the symbol; evaluating P_s as
/// C * expm1(log R(xi, l) - log R(0, 0)) keeps full relative accuracy in
/// the small-(xi, l) regime where the two terms nearly cancel.
fn log_gamma_ratio_sq(n: u32, s: f64, ell: u32, xi: f64) -> f64 {
    let nf = n as f64;
    let lf = ell as f64;
    // |xi| enforces exact evenness in xi.
    let im = xi.abs() / 2.0;
    let z1 = Complex64::new((nf + 2.0 * s + 2.0 * lf) / 4.0, im);
    let z2 = Complex64::new((nf - 2.0 * s + 2.0 * lf) / 4.0, im);
    2.0 * s * std::f64::consts::LN_2 + 2.0 * (lgamma_complex(z1).re - lgamma_complex(z2).re)
}

/// The exact cylinder symbol of the fractional Hardy form and the derived
/// multiplier. Caches C_{N,s} and K_{N,s}; construction is cheap.
#[derive(Debug, Clone)]
pub struct CylinderSymbol {
    n: u32,
    s: f64,
    log_c: f64,
    c_ns: f64,
    k_ns: f64,
}

impl CylinderSymbol {
    pub fn new(n: u32, s: f64) -> Result<Self> {
        if n < 3 {
            return Err(domain("cylinder symbol needs N >= 3"));
        }
        check_fourier_domain(n, s)?;
        let log_c = log_gamma_ratio_sq(n, s, 0, 0.0);
        Ok(Self {
            n,
            s,
            log_c,
            c_ns: log_c.exp(),
            k_ns: constant_k(n, s)?,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn c_ns(&self) -> f64 {
        self.c_ns
    }

    pub fn k_ns(&self) -> f64 {
        self.k_ns
    }

    /// P_s(xi, ell) >= 0, vanishing only at (0, 0).
    pub fn p(&self, xi: f64, ell: u32) -> f64 {
        self.c_ns * (log_gamma_ratio_sq(self.n, self.s, ell, xi) - self.log_c).exp_m1()
    }

    /// m_bar(xi, ell) = sqrt(P_s / (xi^2 + mu_ell)), with the removable
    /// singularity at the origin filled by K_{N,s}.
    pub fn m_bar(&self, xi: f64, ell: u32) -> f64 {
        if xi == 0.0 && ell == 0 {
            return self.k_ns;
        }
        let mu = ell as f64 * (ell as f64 + self.n as f64 - 2.0);
        (self.p(xi, ell) / (xi * xi + mu)).sqrt()
    }
}

/// Free-function form of [`CylinderSymbol::p`].
pub fn symbol_p(n: u32, s: f64, xi: f64, ell: u32) -> Result<f64> {
    Ok(CylinderSymbol::new(n, s)?.p(xi, ell))
}

/// Free-function form of [`CylinderSymbol::m_bar`].
pub fn multiplier_m(n: u32, s: f64, xi: f64, ell: u32) -> Result<f64> {
    Ok(CylinderSymbol::new(n, s)?.m_bar(xi, ell))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn sphere_areas() {
        assert!(rel(sphere_area(2).unwrap(), 2.0 * PI) < 1e-14);
        assert!(rel(sphere_area(3).unwrap(), 4.0 * PI) < 1e-14);
        assert!(rel(sphere_area(4).unwrap(), 2.0 * PI * PI) < 1e-14);
        assert!(rel(sphere_area(1).unwrap(), 2.0) < 1e-14);
        assert!(sphere_area(0).is_err());
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(cylinder_eigenvalue(3, 0).unwrap(), 0.0);
        assert_eq!(cylinder_eigenvalue(3, 1).unwrap(), 2.0);
        assert_eq!(cylinder_eigenvalue(4, 2).unwrap(), 8.0);
    }

    #[test]
    fn trigamma_series_oracle() {
        // Independent oracle: direct summation of sum_{k>=0} (x+k)^{-2}
        // with an integral tail bound, in f64 but to ~1e-13.
        let oracle = |x: f64| {
            let mut sum = 0.0f64;
            let cut = 2_000_000u64;
            for k in (0..cut).rev() {
                sum += 1.0 / ((x + k as f64) * (x + k as f64));
            }
            // tail: int_{cut}^{inf} (x+t)^{-2} dt + midpoint correction
            let t = x + cut as f64;
            sum + 1.0 / t + 1.0 / (2.0 * t * t)
        };
        for x in [0.25, 0.5, 1.0, 2.5, 10.0] {
            assert!(
                rel(trigamma(x).unwrap(), oracle(x)) < 1e-12,
                "trigamma({x})"
            );
        }
        assert!(rel(trigamma(1.0).unwrap(), PI * PI / 6.0) < 1e-14);
        assert!(rel(trigamma(0.5).unwrap(), PI * PI / 2.0) < 1e-14);
        assert!(trigamma(0.0).is_err());
        assert!(trigamma(-1.5).is_err());
    }

    #[test]
    fn trigamma_recurrence() {
        for x in [0.25, 0.5, 1.0, 2.5, 10.0] {
            let lhs = trigamma(x + 1.0).unwrap();
            let rhs = trigamma(x).unwrap() - 1.0 / (x * x);
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
        assert!(rel(trigamma(2.0).unwrap(), 0.6449340668482264) < 1e-13);
    }

    #[test]
    fn lgamma_reference_values() {
        // Gamma(1) = Gamma(2) = 1, Gamma(1/2) = sqrt(pi)
        assert!(lgamma(1.0).abs() < 1e-14);
        assert!(lgamma(2.0).abs() < 1e-14);
        assert!(rel(lgamma(0.5), 0.5 * PI.ln()) < 1e-14);
        // |Gamma(4 + 10i)| against an external reference value
        let z = lgamma_complex(Complex64::new(4.0, 10.0));
        let modulus = z.re.exp();
        assert!(rel(modulus, 1.2781998742337029e-3) < 1e-12);
    }

    #[test]
    fn fourier_constants() {
        assert!(rel(frac_hardy_constant_fourier(4, 1.0).unwrap(), 1.0) < 1e-13);
        assert!(rel(frac_hardy_constant_fourier(3, 0.5).unwrap(), 2.0 / PI) < 1e-13);
        // s -> 0: identical Gamma arguments
        assert!(rel(frac_hardy_constant_fourier(3, 1e-12).unwrap(), 1.0) < 1e-9);
        assert!(frac_hardy_constant_fourier(1, 0.6).is_err());
    }

    #[test]
    fn constant_k_values() {
        assert!(rel(constant_k(4, 1.0).unwrap(), 1.0) < 1e-13);
        // psi'(3/4) - psi'(5/4) = 16 - 16*Catalan, C = 2 G^2(5/4)/G^2(3/4)
        assert!(rel(constant_k(4, 0.5).unwrap(), 0.6064721308429472) < 1e-12);
        // psi'(1/2) - psi'(1) = pi^2/3, C = 2/pi
        assert!(rel(constant_k(3, 0.5).unwrap(), 0.7236012545582677) < 1e-12);
    }

    #[test]
    fn symbol_local_identity() {
        // s = 1 collapses P to xi^2 + mu_ell through the Gamma recurrence.
        for n in [3u32, 4, 5] {
            let sym = CylinderSymbol::new(n, 1.0).unwrap();
            for ell in 0..=8u32 {
                let mu = cylinder_eigenvalue(n, ell).unwrap();
                for k in 0..=100 {
                    let xi = 0.5 * k as f64;
                    let p = sym.p(xi, ell);
                    let exact = xi * xi + mu;
                    assert!(
                        (p - exact).abs() <= 1e-9 * (1.0 + exact),
                        "N={n} l={ell} xi={xi}: {p} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn symbol_zero_and_even() {
        let sym = CylinderSymbol::new(4, 0.5).unwrap();
        assert_eq!(sym.p(0.0, 0), 0.0);
        for xi in [0.3, 1.7, 25.0] {
            for ell in [0u32, 1, 5] {
                assert_eq!(sym.p(xi, ell).to_bits(), sym.p(-xi, ell).to_bits());
                assert!(sym.p(xi, ell) > 0.0);
            }
        }
        // positivity off the origin along ell at xi = 0
        for ell in 1..=8u32 {
            assert!(sym.p(0.0, ell) > 0.0);
        }
    }

    #[test]
    fn symbol_p1_reduction_example() {
        // (N=3, s=1, xi=2, l=1) -> xi^2 + mu = 6 exactly via Gamma recurrence
        let p = symbol_p(3, 1.0, 2.0, 1).unwrap();
        assert!((p - 6.0).abs() < 1e-9 * 7.0);
    }

    #[test]
    fn multiplier_origin_and_local_case() {
        let sym = CylinderSymbol::new(4, 0.5).unwrap();
        assert_eq!(sym.m_bar(0.0, 0), sym.k_ns());
        let local = CylinderSymbol::new(5, 1.0).unwrap();
        for xi in [0.0, 0.26, 3.0, 40.0] {
            for ell in [0u32, 1, 4] {
                assert!((local.m_bar(xi, ell) - 1.0).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn multiplier_stirling_asymptotics() {
        // m_bar(xi, 0) ~ xi^{s-1} for large xi (Thm-style decay check).
        let sym = CylinderSymbol::new(4, 0.5).unwrap();
        let m = sym.m_bar(1000.0, 0);
        let asym = 1000.0f64.powf(-0.5);
        assert!(rel(m, asym) < 0.05, "{m} vs {asym}");
    }

    #[test]
    fn k_limit_by_richardson() {
        // Quadratic Richardson extrapolation of P(xi,0)/xi^2 at xi -> 0.
        for (n, s) in [(4u32, 0.5), (3, 0.5), (5, 0.75)] {
            let sym = CylinderSymbol::new(n, s).unwrap();
            let f = |xi: f64| sym.p(xi, 0) / (xi * xi);
            let (h0, h1, h2) = (1e-2, 5e-3, 2.5e-3);
            let r1 = (4.0 * f(h1) - f(h0)) / 3.0;
            let r1b = (4.0 * f(h2) - f(h1)) / 3.0;
            let r2 = (16.0 * r1b - r1) / 15.0;
            let k2 = sym.k_ns() * sym.k_ns();
            assert!(rel(r2, k2) < 1e-6, "N={n} s={s}: {r2} vs {k2}");
        }
    }
}
