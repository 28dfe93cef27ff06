//! The angular kernel of the radial reduction,
//!
//!   Phi_N^sigma(r) = |S^{N-2}| int_{-1}^{1} (1-t^2)^{(N-3)/2}
//!                    (1 - 2rt + r^2)^{-(N+sigma)/2} dt,   N >= 2,
//!   Phi_1^sigma(r) = (1-r)^{-(1+sigma)} + (1+r)^{-(1+sigma)},
//!
//! where sigma = sp. The substitution t = cos(theta) removes the
//! (1-t^2)^{-1/2} endpoint singularity at N = 2 and turns the denominator
//! into w^2 + 4 r sin^2(theta/2) with w = 1 - r, which is exact near the
//! diagonal where the direct form loses all precision.
//!
//! Phi blows up like c_phi (1-r)^{-(1+sigma)} as r -> 1; the reduction
//! engine tabulates G(ln d) = Phi(e^{-d}) d^{1+sigma} once per (N, sigma)
//! because Phi sits in the innermost loop of every double integral.

use crate::error::{domain, Result};
use crate::quad::{self, Quad};
use crate::specfun::{lgamma, sphere_area};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Direct evaluation of Phi_N^sigma(r) for r in (0, 1).
pub fn phi(n: u32, sigma: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(domain(format!("Phi needs r in (0,1), got {r}")));
    }
    Ok(phi_with_w(n, sigma, r, 1.0 - r))
}

/// Same as [`phi`] but with 1 - r supplied exactly by the caller; used when
/// r is known only through its distance to 1.
pub fn phi_with_w(n: u32, sigma: f64, r: f64, w: f64) -> f64 {
    debug_assert!(n >= 1 && sigma > 0.0 && r > 0.0 && w > 0.0);
    if n == 1 {
        return w.powf(-1.0 - sigma) + (1.0 + r).powf(-1.0 - sigma);
    }
    let s_nm2 = sphere_area(n - 1).expect("n >= 2");
    let expo = -0.5 * (n as f64 + sigma);
    let ang_pow = n as f64 - 2.0;
    let mut f = |theta: f64| {
        let sin_t = theta.sin();
        let sh = (0.5 * theta).sin();
        let den = w * w + 4.0 * r * sh * sh;
        sin_t.powf(ang_pow) * den.powf(expo)
    };
    // Peak of width ~ w/sqrt(r) at theta = 0 when r -> 1.
    let peak = (w / r.sqrt()).min(std::f64::consts::PI / 2.0);
    let mut seeds = vec![0.0];
    let mut x = peak;
    while x < std::f64::consts::PI {
        seeds.push(x);
        x *= 4.0;
    }
    seeds.push(std::f64::consts::PI);
    let q = quad::adaptive_seeded(&mut f, &seeds, 1e-300, 1e-11, 600);
    s_nm2 * q.value
}

/// Exact diagonal coefficient: Phi(r) (1-r)^{1+sigma} -> c_phi as r -> 1.
///
/// c_phi = |S^{N-2}| B((N-1)/2, (1+sigma)/2) / 2 for N >= 2, and 1 for N = 1.
pub fn phi_diagonal_coefficient(n: u32, sigma: f64) -> f64 {
    if n == 1 {
        return 1.0;
    }
    let s_nm2 = sphere_area(n - 1).expect("n >= 2");
    let a = (n as f64 - 1.0) / 2.0;
    let b = (1.0 + sigma) / 2.0;
    s_nm2 * 0.5 * (lgamma(a) + lgamma(b) - lgamma(a + b)).exp()
}

const TABLE_SIZE: usize = 4096;
const TABLE_D_MIN: f64 = 1e-7;
const TABLE_D_MAX: f64 = 60.0;

/// Tabulated Phi_N^sigma(e^{-d}) on a logarithmic d-grid, stored with the
/// diagonal blow-up factored out.
#[derive(Debug)]
pub struct KernelTable {
    n: u32,
    sigma: f64,
    x_min: f64,
    dx: f64,
    g: Vec<f64>,
    slopes: Vec<f64>,
    c_phi: f64,
    sphere_full: f64,
}

impl KernelTable {
    fn build(n: u32, sigma: f64) -> Self {
        let x_min = TABLE_D_MIN.ln();
        let x_max = TABLE_D_MAX.ln();
        let dx = (x_max - x_min) / (TABLE_SIZE - 1) as f64;
        let g: Vec<f64> = (0..TABLE_SIZE)
            .map(|i| {
                let d = (x_min + i as f64 * dx).exp();
                let w = -(-d).exp_m1();
                let r = (-d).exp();
                phi_with_w(n, sigma, r, w) * d.powf(1.0 + sigma)
            })
            .collect();
        // fourth-order slope estimates keep the Hermite interpolant O(h^4)
        let m = TABLE_SIZE;
        let slopes = (0..m)
            .map(|i| {
                if i >= 2 && i + 2 < m {
                    (-g[i + 2] + 8.0 * g[i + 1] - 8.0 * g[i - 1] + g[i - 2]) / 12.0
                } else if i == 0 {
                    g[1] - g[0]
                } else if i + 1 == m {
                    g[m - 1] - g[m - 2]
                } else {
                    0.5 * (g[i + 1] - g[i - 1])
                }
            })
            .collect();
        KernelTable {
            n,
            sigma,
            x_min,
            dx,
            g,
            slopes,
            c_phi: phi_diagonal_coefficient(n, sigma),
            sphere_full: sphere_area(n).expect("n >= 1"),
        }
    }

    /// Phi_N^sigma(e^{-d}) for d > 0.
    pub fn phi_at(&self, d: f64) -> f64 {
        debug_assert!(d > 0.0);
        if d < TABLE_D_MIN {
            return self.c_phi * d.powf(-1.0 - self.sigma);
        }
        if d >= TABLE_D_MAX {
            return self.sphere_full;
        }
        // cubic Hermite on the uniform x-grid with precomputed slopes
        let x = d.ln();
        let u = (x - self.x_min) / self.dx;
        let i = (u as usize).min(TABLE_SIZE - 2);
        let f = u - i as f64;
        let y0 = self.g[i];
        let y1 = self.g[i + 1];
        let m0 = self.slopes[i];
        let m1 = self.slopes[i + 1];
        let f2 = f * f;
        let f3 = f2 * f;
        let h00 = 2.0 * f3 - 3.0 * f2 + 1.0;
        let h10 = f3 - 2.0 * f2 + f;
        let h01 = -2.0 * f3 + 3.0 * f2;
        let h11 = f3 - f2;
        let g = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        g * d.powf(-1.0 - self.sigma)
    }

    pub fn c_phi(&self) -> f64 {
        self.c_phi
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

/// Process-wide cache of kernel tables keyed by (N, sigma bits).
pub fn kernel_table(n: u32, sigma: f64) -> Arc<KernelTable> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u64), Arc<KernelTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, sigma.to_bits());
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return t.clone();
    }
    let table = Arc::new(KernelTable::build(n, sigma));
    cache
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| table.clone())
        .clone()
}

/// Quadrature outcome alias re-exported for kernel consumers.
pub type KernelQuad = Quad;
