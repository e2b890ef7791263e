//! Scalar q-special-function kernels: q-Pochhammer symbols, the q-Gamma
//! function, and the basic hypergeometric series
//!
//! ```text
//! Phi_l(u) = 3phi2(q^{-2l}, q^{2(l+1)}, u; q^2, 0; q^2, q^2)
//! ```
//!
//! together with two numerically independent evaluation routes for grid
//! arguments u = q^{-2k}: a stable three-term recurrence in k and an exact
//! convergent expansion `Phi_l = c(l) Psi_l + c(-1-l) Psi_{-1-l}` in terms of
//! the Harish-Chandra-type c-function.

use num_complex::Complex64;

use crate::context::QContext;
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Order of a q-Pochhammer product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochhammerOrder {
    Finite(u32),
    Infinite,
}

/// Compensated (Kahan–Neumaier) accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: C64,
    c: C64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: C64) {
        self.sum.re = neumaier(self.sum.re, v.re, &mut self.c.re);
        self.sum.im = neumaier(self.sum.im, v.im, &mut self.c.im);
    }

    #[inline]
    pub fn value(&self) -> C64 {
        self.sum + self.c
    }
}

#[inline]
fn neumaier(sum: f64, v: f64, comp: &mut f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *comp += (sum - t) + v;
    } else {
        *comp += (v - t) + sum;
    }
    t
}

/// q-Pochhammer symbol (a; base)_k.
///
/// Finite k is an exact product; `Infinite` truncates once |a base^m| drops
/// below `ctx.product_tol` (the neglected tail multiplies the result by
/// 1 + O(|a| base^m / (1-base))).
pub fn qpochhammer(ctx: &QContext, a: C64, base: f64, k: PochhammerOrder) -> Result<C64> {
    debug_assert!(base > 0.0 && base < 1.0);
    match k {
        PochhammerOrder::Finite(k) => {
            let mut r = C64::new(1.0, 0.0);
            let mut x = a;
            for _ in 0..k {
                r *= C64::new(1.0, 0.0) - x;
                x *= base;
            }
            Ok(r)
        }
        PochhammerOrder::Infinite => {
            let mut r = C64::new(1.0, 0.0);
            let mut x = a;
            let mut m = 0usize;
            while x.norm() >= ctx.product_tol {
                r *= C64::new(1.0, 0.0) - x;
                x *= base;
                m += 1;
                if m > 64 * ctx.max_terms {
                    return Err(Error::NonConvergence { max_terms: 64 * ctx.max_terms, last_term: x.norm() });
                }
            }
            Ok(r)
        }
    }
}

/// Convenience wrapper for real arguments.
pub fn qpochhammer_real(ctx: &QContext, a: f64, base: f64, k: PochhammerOrder) -> Result<f64> {
    qpochhammer(ctx, C64::new(a, 0.0), base, k).map(|v| v.re)
}

/// q-Gamma function with base q^2:
/// Gamma_{q^2}(x) = (q^2; q^2)_inf / (q^{2x}; q^2)_inf * (1-q^2)^{1-x}.
///
/// Poles at x in {0, -1, -2, ...} are reported as errors.
pub fn qgamma(ctx: &QContext, x: C64) -> Result<C64> {
    let q2 = ctx.q2();
    if x.im == 0.0 && x.re <= 0.0 && (x.re - x.re.round()).abs() < 1e-12 {
        return Err(Error::QGammaPole(x.re));
    }
    let num = qpochhammer(ctx, C64::new(q2, 0.0), q2, PochhammerOrder::Infinite)?;
    // q^{2x} via the principal logarithm of q.
    let q2x = (x * 2.0 * ctx.q().ln()).exp();
    let den = qpochhammer(ctx, q2x, q2, PochhammerOrder::Infinite)?;
    let pw = ((C64::new(1.0, 0.0) - x) * (1.0 - q2).ln()).exp();
    Ok(num / den * pw)
}

/// Result of a series evaluation carrying a forward rounding-error estimate.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: C64,
    /// Estimated absolute rounding error: eps times the sum of term magnitudes.
    pub abs_error: f64,
}

/// Direct series for Phi_l(u). Terminates exactly when an upper-parameter
/// factor vanishes (l a nonnegative integer, or u on the grid q^{-2Z+} up to
/// rounding); otherwise stops when |term| < series_tol * max(1, |partial|).
///
/// The terms decay like q^{j^2} |u|^j, so termination on term magnitude is
/// sound for every u; for |u| >> 1 the partial sums cancel and `abs_error`
/// tracks the loss.
pub fn phi_series(ctx: &QContext, l: C64, u: C64) -> Result<SeriesValue> {
    let q2 = ctx.q2();
    let lnq = ctx.q().ln();
    let a1 = (l * (-2.0 * lnq)).exp(); // q^{-2l}
    let a2 = ((l + 1.0) * (2.0 * lnq)).exp(); // q^{2(l+1)}
    let one = C64::new(1.0, 0.0);
    // nonnegative integer l terminates the series at j = l exactly; the
    // float factor (1 - q^{-2l} q^{2l}) never reaches zero, so cap the index
    // structurally instead
    let hard_stop: Option<usize> =
        if l.im == 0.0 && l.re >= 0.0 && (l.re - l.re.round()).abs() < 1e-12 { Some(l.re.round() as usize) } else { None };

    let mut acc = CompensatedSum::new();
    let mut magnitudes = 0.0f64;
    // running factors: f* = (.;q^2)_j, updated incrementally
    let mut f1 = one;
    let mut f2 = one;
    let mut fu = one;
    let mut fq = 1.0f64;
    let mut p1 = a1;
    let mut p2 = a2;
    let mut pu = u;
    let mut q2j = 1.0f64;
    let mut j = 0usize;
    loop {
        let term = f1 * f2 * fu * q2j / (fq * fq);
        acc.add(term);
        magnitudes += term.norm();
        if hard_stop == Some(j) {
            break;
        }
        let partial = acc.value().norm();
        if term.norm() < ctx.series_tol * partial.max(1.0) && j > 2 && hard_stop.is_none() {
            break;
        }
        if f1.norm() == 0.0 || f2.norm() == 0.0 || fu.norm() == 0.0 {
            break; // terminating series: a factor hit an exact zero
        }
        j += 1;
        if j >= ctx.max_terms {
            return Err(Error::NonConvergence { max_terms: ctx.max_terms, last_term: term.norm() });
        }
        f1 *= one - p1;
        p1 *= q2;
        f2 *= one - p2;
        p2 *= q2;
        fu *= one - pu;
        pu *= q2;
        fq *= 1.0 - q2.powi(j as i32);
        q2j *= q2;
    }
    Ok(SeriesValue { value: acc.value(), abs_error: magnitudes * f64::EPSILON })
}

/// Phi_l(u) by the direct series (value only).
pub fn phi_one(ctx: &QContext, l: C64, u: C64) -> Result<C64> {
    phi_series(ctx, l, u).map(|s| s.value)
}

/// q-analogue of the Harish-Chandra c-function:
/// c(l) = Gamma_{q^2}(2l+1) / Gamma_{q^2}(l+1)^2.
pub fn c_function(ctx: &QContext, l: C64) -> Result<C64> {
    let num = qgamma(ctx, 2.0 * l + 1.0)?;
    let den = qgamma(ctx, l + 1.0)?;
    Ok(num / (den * den))
}

/// One branch solution Psi_l(u) = u^l (1 + sum_{m>=1} g_m u^{-m}) of the
/// q-difference equation satisfied by Phi_l, normalised by g_0 = 1.
/// Converges for u on the grid with k >= 1; no cancellation between terms.
fn psi_branch(ctx: &QContext, l: C64, u: C64) -> Result<C64> {
    let q2 = ctx.q2();
    let lnq = ctx.q().ln();
    let one = C64::new(1.0, 0.0);
    let mut g = one;
    let mut acc = CompensatedSum::new();
    acc.add(one);
    let mut um = one;
    for m in 1..ctx.max_terms {
        let mf = m as f64;
        // g_m = -g_{m-1} q^{2m} (1 - q^{2(l-m+1)})^2 / ((1-q^{2m})(1 - q^{2(2l+1-m)}))
        let e1 = ((l - mf + 1.0) * (2.0 * lnq)).exp();
        let e2 = ((2.0 * l + 1.0 - mf) * (2.0 * lnq)).exp();
        let num = -(q2.powi(m as i32)) * (one - e1) * (one - e1);
        let den = (1.0 - q2.powi(m as i32)) * (one - e2);
        g = g * num / den;
        um /= u;
        let t = g * um;
        acc.add(t);
        if t.norm() < ctx.series_tol * acc.value().norm().max(1e-300) && m > 4 {
            let exponent = (l * u.ln()).exp();
            return Ok(exponent * acc.value());
        }
    }
    Err(Error::NonConvergence { max_terms: ctx.max_terms, last_term: (g * um).norm() })
}

/// Phi_l(u) through the exact connection formula
/// Phi_l(u) = c(l) Psi_l(u) + c(-1-l) Psi_{-1-l}(u), valid on the grid
/// u = q^{-2k}, k >= 1. Error estimate reflects the cancellation between the
/// two branches.
pub fn phi_c_expansion(ctx: &QContext, l: C64, u: C64) -> Result<SeriesValue> {
    let t1 = c_function(ctx, l)? * psi_branch(ctx, l, u)?;
    let t2 = c_function(ctx, -l - 1.0)? * psi_branch(ctx, -l - 1.0, u)?;
    Ok(SeriesValue { value: t1 + t2, abs_error: (t1.norm() + t2.norm()) * f64::EPSILON * 8.0 })
}

/// Best-available evaluation of Phi_l(q^{-2k}): picks whichever of the direct
/// series and the c-function expansion carries the smaller forward-error
/// estimate. The two routes are algebraically independent, so this also
/// serves as the reference evaluator in verification code.
pub fn phi_grid_hybrid(ctx: &QContext, l: C64, k: i64) -> Result<C64> {
    let u = C64::new(ctx.grid_coord(k), 0.0);
    let direct = phi_series(ctx, l, u)?;
    if k < 1 {
        return Ok(direct.value);
    }
    // resonance: integer 2l+1 makes the second branch degenerate; the direct
    // series terminates there anyway when l is a nonnegative integer.
    let two_l1 = 2.0 * l + 1.0;
    let near_int_res = two_l1.im.abs() < 1e-9 && (two_l1.re - two_l1.re.round()).abs() < 1e-9;
    if near_int_res {
        return Ok(direct.value);
    }
    match phi_c_expansion(ctx, l, u) {
        Ok(cexp) => {
            if cexp.abs_error < direct.abs_error {
                Ok(cexp.value)
            } else {
                Ok(direct.value)
            }
        }
        Err(_) => Ok(direct.value),
    }
}

/// Values (with x-jets) of G_k(x) = Phi_{-1/2 + i rho}(q^{-2k}) as functions
/// of x = q^{2 i rho} + q^{-2 i rho} = 2 cos(h rho), for k = 0..=kmax.
///
/// Uses the stable three-term recurrence in k inherited from the
/// q-difference equation; both fundamental solutions have equal modulus for
/// principal-series l, so forward recursion does not amplify either branch.
/// `order` is the number of x-derivatives carried (confluent quadrature
/// nodes need jets up to multiplicity - 1).
pub fn principal_grid_jets(ctx: &QContext, x: f64, kmax: usize, order: usize) -> Vec<Vec<f64>> {
    let q = ctx.q();
    let q2 = ctx.q2();
    let denom = (1.0 - q2) * (1.0 - q2);
    // a(-1/2 + i rho) = (1 - q x + q^2) / (1-q^2)^2, affine in x
    let a0 = (1.0 + q2 - q * x) / denom;
    let a1 = -q / denom;

    let mut jets: Vec<Vec<f64>> = Vec::with_capacity(kmax + 1);
    let mut g0 = vec![0.0; order + 1];
    g0[0] = 1.0;
    // k=0 step: cp(1) = 0, so cm(1) G_1 = (a - c0(1)) G_0
    let (cm, c0, _) = box_coeffs(ctx, 1.0);
    let mut g1 = vec![0.0; order + 1];
    for r in 0..=order {
        let mut v = (a0 - c0) * g0[r];
        if r >= 1 {
            v += (r as f64) * a1 * g0[r - 1];
        }
        g1[r] = v / cm;
    }
    jets.push(g0);
    jets.push(g1);
    for k in 1..kmax {
        let u = ctx.grid_coord(k as i64);
        let (cm, c0, cp) = box_coeffs(ctx, u);
        let prev = &jets[k - 1];
        let cur = &jets[k];
        let mut next = vec![0.0; order + 1];
        for r in 0..=order {
            let mut v = (a0 - c0) * cur[r] - cp * prev[r];
            if r >= 1 {
                v += (r as f64) * a1 * cur[r - 1];
            }
            next[r] = v / cm;
        }
        jets.push(next);
    }
    jets.truncate(kmax + 1);
    jets
}

/// Plain values G_k(x) for k = 0..=kmax (no derivatives).
pub fn principal_grid_values(ctx: &QContext, x: f64, kmax: usize) -> Vec<f64> {
    principal_grid_jets(ctx, x, kmax, 0).into_iter().map(|j| j[0]).collect()
}

/// Three-point coefficients of the q-difference operator
/// `box = D_u u (1 - q^{-1} u) D_u` at a grid point u > 0:
///
/// (box f)(u) = cm(u) f(q^{-2} u) + c0(u) f(u) + cp(u) f(q^2 u),
/// cm(u) = (1 - q^{-2} u) / ((q^{-1}-q)^2 u),
/// cp(u) = (1 - u)        / ((q^{-1}-q)^2 u),
/// c0(u) = -(cm + cp).
///
/// At u = 1 the inward coefficient cp vanishes identically, so the boundary
/// node never references the off-grid point q^2.
pub fn box_coeffs(ctx: &QContext, u: f64) -> (f64, f64, f64) {
    let q = ctx.q();
    let cap = (1.0 / q - q) * (1.0 / q - q);
    let cm = (1.0 - u / (q * q)) / (cap * u);
    let cp = (1.0 - u) / (cap * u);
    (cm, -(cm + cp), cp)
}
