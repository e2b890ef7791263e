//! The radial grid, Jackson integrals of base q^2 and q^{-2}, the radial
//! measure with its normalization constant, and finitely supported radial
//! functions.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::context::QContext;
use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions, grid_point, Partition};
use crate::qseries::CompensatedSum;
use crate::symm::{schur, vandermonde};

/// Finitely supported complex function on the radial grid, stored as a table
/// partition -> value (value at the grid point q^{-2(lambda+delta)}).
/// Absent keys mean zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    n: usize,
    support: BTreeMap<Partition, C64>,
}

impl RadialFunction {
    pub fn zero(n: usize) -> Self {
        RadialFunction { n, support: BTreeMap::new() }
    }

    /// Characteristic function of a single grid point.
    pub fn indicator(lambda: Partition) -> Self {
        let n = lambda.n();
        let mut support = BTreeMap::new();
        support.insert(lambda, C64::new(1.0, 0.0));
        RadialFunction { n, support }
    }

    /// f0: the characteristic function of the base point q^{-2 delta}.
    pub fn f0(n: usize) -> Self {
        Self::indicator(Partition::zero(n))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, lambda: &Partition) -> C64 {
        self.support.get(lambda).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn set(&mut self, lambda: Partition, v: C64) -> Result<()> {
        if lambda.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: lambda.n() });
        }
        if v == C64::new(0.0, 0.0) {
            self.support.remove(&lambda);
        } else {
            self.support.insert(lambda, v);
        }
        Ok(())
    }

    pub fn add_assign(&mut self, lambda: Partition, v: C64) -> Result<()> {
        let cur = self.value(&lambda);
        self.set(lambda, cur + v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, &C64)> {
        self.support.iter()
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn max_weight(&self) -> u32 {
        self.support.keys().map(|l| l.weight()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        out.support.values_mut().for_each(|v| *v *= c);
        out.support.retain(|_, v| *v != C64::new(0.0, 0.0));
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let mut out = self.clone();
        for (k, v) in &other.support {
            out.add_assign(k.clone(), *v)?;
        }
        Ok(out)
    }

    pub fn sup_norm(&self) -> f64 {
        self.support.values().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Per-partition weights of the radial measure, cached per (n, q).
#[derive(Debug, Clone)]
pub struct MeasureWeights {
    n: usize,
    norm_constant: f64,
    cache: BTreeMap<Partition, f64>,
}

impl MeasureWeights {
    pub fn new(n: usize, ctx: &QContext) -> Self {
        MeasureWeights { n, norm_constant: norm_constant(n, ctx), cache: BTreeMap::new() }
    }

    pub fn weight(&mut self, lambda: &Partition, ctx: &QContext) -> f64 {
        if let Some(w) = self.cache.get(lambda) {
            return *w;
        }
        let w = point_mass(lambda, ctx);
        self.cache.insert(lambda.clone(), w);
        w
    }

    pub fn norm_constant(&self) -> f64 {
        self.norm_constant
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// The positive constant N = (1-q^2)^{n(n-1)} q^{n(n-1)} Delta(q^{-2 delta})^{-2}.
pub fn norm_constant(n: usize, ctx: &QContext) -> f64 {
    let q2 = ctx.q2();
    let z0 = grid_point(&Partition::zero(n), ctx);
    let d = vandermonde(&z0);
    (1.0 - q2).powi((n * (n - 1)) as i32) * ctx.q().powi((n * (n - 1)) as i32) / (d * d)
}

/// Weight of a single grid point under the radial measure:
/// w(lambda) = N Delta(q^{-2(lambda+delta)})^2 (1-q^2)^n q^{-2|lambda+delta|}.
pub fn point_mass(lambda: &Partition, ctx: &QContext) -> f64 {
    let n = lambda.n();
    let q2 = ctx.q2();
    let u = grid_point(lambda, ctx);
    let d = vandermonde(&u);
    let shift: u32 = lambda.shifted_exponents().iter().sum();
    norm_constant(n, ctx) * d * d * (1.0 - q2).powi(n as i32) * ctx.q().powi(-2 * shift as i32)
}

/// Multiple Jackson integral with base q^2 over the simplex, truncated at
/// |lambda| <= max_weight:
/// (1-q^2)^n sum_lambda phi(q^{2(lambda+delta+1^n)}) q^{2|lambda+delta+1^n|}.
///
/// Returns the truncated value together with a geometric tail bound
/// max_{|lambda|=W} |phi| * (1-q^2)^n * sum_{w>W} p_n(w) q^{2(w+|delta|+n)}.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedIntegral {
    pub value: C64,
    pub tail_bound: f64,
}

pub fn jackson_q2_integral<F>(phi: F, n: usize, ctx: &QContext, max_weight: u32) -> TruncatedIntegral
where
    F: Fn(&[f64]) -> C64,
{
    let q2 = ctx.q2();
    let mut acc = CompensatedSum::new();
    let mut boundary_max = 0.0f64;
    let base_shift = (n * (n - 1) / 2 + n) as u32; // |delta| + n
    for lam in enumerate_partitions(n, max_weight) {
        let exps = lam.shifted_exponents();
        let node: Vec<f64> = exps.iter().map(|&e| q2.powi(e as i32 + 1)).collect();
        let v = phi(&node);
        let w: u32 = exps.iter().map(|&e| e + 1).sum();
        acc.add(v * q2.powi(w as i32));
        if lam.weight() == max_weight {
            boundary_max = boundary_max.max(v.norm());
        }
    }
    // tail: sum_{w > W} p_n(w) q^{2(w + |delta| + n)} with p_n(w) from the
    // counting recurrence, summed until negligible
    let mut tail = 0.0f64;
    let mut w = max_weight + 1;
    loop {
        let t = crate::partitions::partition_count(n, w) as f64 * q2.powi((w + base_shift) as i32);
        tail += t;
        if t < 1e-3 * f64::EPSILON * tail || w > max_weight + 10_000 {
            break;
        }
        w += 1;
    }
    let scale = (1.0 - q2).powi(n as i32);
    TruncatedIntegral { value: acc.value() * scale, tail_bound: boundary_max * scale * tail }
}

/// Multiple Jackson integral with base q^{-2} of a finitely supported radial
/// function (exact finite sum):
/// (1-q^2)^n sum_lambda f(lambda) q^{-2|lambda+delta|}.
pub fn jackson_qinv2_integral(f: &RadialFunction, ctx: &QContext) -> C64 {
    let q2 = ctx.q2();
    let n = f.n();
    let mut acc = CompensatedSum::new();
    for (lam, v) in f.iter() {
        let shift: u32 = lam.shifted_exponents().iter().sum();
        acc.add(*v * ctx.q().powi(-2 * shift as i32));
    }
    acc.value() * (1.0 - q2).powi(n as i32)
}

/// Integral of f against the radial measure: sum_lambda w(lambda) f(lambda).
pub fn radial_integral(f: &RadialFunction, ctx: &QContext) -> C64 {
    let mut acc = CompensatedSum::new();
    for (lam, v) in f.iter() {
        acc.add(*v * point_mass(lam, ctx));
    }
    acc.value()
}

/// Hermitian inner product (f, g) = sum_lambda w(lambda) f(lambda) conj(g(lambda)).
pub fn inner_product(f: &RadialFunction, g: &RadialFunction, ctx: &QContext) -> Result<C64> {
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), got: g.n() });
    }
    let mut acc = CompensatedSum::new();
    for (lam, v) in f.iter() {
        let gv = g.value(lam);
        if gv != C64::new(0.0, 0.0) {
            acc.add(*v * gv.conj() * point_mass(lam, ctx));
        }
    }
    Ok(acc.value())
}

pub fn norm_sq(f: &RadialFunction, ctx: &QContext) -> f64 {
    inner_product(f, f, ctx).map(|v| v.re).unwrap_or(0.0)
}

/// Trace-side evaluation of the invariant integral:
/// (1-q^2)^{n^2} sum_lambda d_lambda f(lambda) with
/// d_lambda = q^{-2|lambda|} S_lambda(q^{-2 delta})^2.
pub fn trace_side_integral(f: &RadialFunction, ctx: &QContext) -> Result<C64> {
    let n = f.n();
    let q2 = ctx.q2();
    let z0: Vec<C64> = grid_point(&Partition::zero(n), ctx).iter().map(|&x| C64::new(x, 0.0)).collect();
    let mut acc = CompensatedSum::new();
    for (lam, v) in f.iter() {
        let s = schur(lam, &z0)?.re;
        let d = ctx.q().powi(-2 * lam.weight() as i32) * s * s;
        acc.add(*v * d);
    }
    Ok(acc.value() * (1.0 - q2).powi((n * n) as i32))
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

#[derive(serde::Serialize, serde::Deserialize)]
struct RadialEntry {
    lambda: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct RadialJson {
    n: usize,
    q: f64,
    support: Vec<RadialEntry>,
}

impl RadialFunction {
    /// JSON schema: {"n": int, "q": real, "support": [{"lambda": [ints], "re": .., "im": ..}]}.
    pub fn to_json(&self, ctx: &QContext) -> String {
        let mut s = String::from("{");
        s.push_str(&format!("\"n\": {}, \"q\": {}, \"support\": [", self.n, fmt_f64(ctx.q())));
        for (i, (lam, v)) in self.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(&format!(
                "{{\"lambda\": [{}], \"re\": {}, \"im\": {}}}",
                lam.parts().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "),
                fmt_f64(v.re),
                fmt_f64(v.im)
            ));
        }
        s.push_str("]}");
        s
    }

    pub fn from_json(text: &str) -> Result<(Self, f64)> {
        let parsed: RadialJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("radial function JSON: {e}")))?;
        let mut f = RadialFunction::zero(parsed.n);
        for e in parsed.support {
            let lam = Partition::new(e.lambda)?;
            if lam.n() != parsed.n {
                return Err(Error::DimensionMismatch { expected: parsed.n, got: lam.n() });
            }
            f.add_assign(lam, C64::new(e.re, e.im))?;
        }
        Ok((f, parsed.q))
    }

    /// CSV export: one row per partition with grid point, weight and value.
    pub fn to_csv(&self, ctx: &QContext) -> String {
        let mut s = String::from("lambda;weight;re;im\n");
        for (lam, v) in self.iter() {
            s.push_str(&format!("{};{};{};{}\n", lam, fmt_f64(point_mass(lam, ctx)), fmt_f64(v.re), fmt_f64(v.im)));
        }
        s
    }
}

/// Full-precision decimal formatting used in data files (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn ctx() -> QContext {
        QContext::new(0.5).unwrap()
    }

    #[test]
    fn norm_constant_values() {
        let c = ctx();
        assert_eq!(norm_constant(1, &c), 1.0);
        // N(n=2) = q^6
        assert!((norm_constant(2, &c) - 0.015625).abs() < 1e-17);
        let c7 = QContext::new(0.7).unwrap();
        assert!((norm_constant(2, &c7) - 0.7f64.powi(6)).abs() < 1e-15);
    }

    #[test]
    fn point_mass_values() {
        let c = ctx();
        let q2 = c.q2();
        // n=1: w(k) = (1-q^2) q^{-2k}
        assert!((point_mass(&p(&[0]), &c) - (1.0 - q2)).abs() < 1e-16);
        for k in 0..6u32 {
            let expect = (1.0 - q2) * c.q().powi(-2 * k as i32);
            assert!((point_mass(&p(&[k]), &c) - expect).abs() < 1e-12 * expect);
        }
        // n=2: w(0) = (1-q^2)^4
        assert!((point_mass(&p(&[0, 0]), &c) - (1.0 - q2).powi(4)).abs() < 1e-15);
        // positivity across a window
        for n in 1..=3 {
            for lam in enumerate_partitions(n, 6) {
                assert!(point_mass(&lam, &c) > 0.0);
            }
        }
    }

    #[test]
    fn jackson_qinv2_examples() {
        let c = ctx();
        let q2 = c.q2();
        let f = RadialFunction::indicator(p(&[0]));
        assert!((jackson_qinv2_integral(&f, &c).re - (1.0 - q2)).abs() < 1e-16);
        let f = RadialFunction::indicator(p(&[1]));
        assert!((jackson_qinv2_integral(&f, &c).re - (1.0 - q2) * 4.0).abs() < 1e-15);
        // n=2, chi_(0,0): (1-q^2)^2 q^{-2|delta|} with |delta| = 1
        let f = RadialFunction::f0(2);
        assert!((jackson_qinv2_integral(&f, &c).re - (1.0 - q2) * (1.0 - q2) * 4.0).abs() < 1e-15);
    }

    #[test]
    fn jackson_q2_moments() {
        // mu_k = (1-q^2) q^{2(k+1)} / (1 - q^{2(k+1)}) for n=1
        let c = ctx();
        let q2 = c.q2();
        for k in 0..8i32 {
            let r = jackson_q2_integral(|z| C64::new(z[0].powi(k), 0.0), 1, &c, 200);
            let expect = (1.0 - q2) * q2.powi(k + 1) / (1.0 - q2.powi(k + 1));
            assert!((r.value.re - expect).abs() < 1e-15 * expect + r.tail_bound, "k={k}");
        }
        // phi = 1 integrates to q^2
        let r = jackson_q2_integral(|_| C64::new(1.0, 0.0), 1, &c, 200);
        assert!((r.value.re - q2).abs() < 1e-15);
        // zero integrand
        let r = jackson_q2_integral(|_| C64::new(0.0, 0.0), 2, &c, 30);
        assert_eq!(r.value, C64::new(0.0, 0.0));
    }

    #[test]
    fn integral_of_f0() {
        let c = ctx();
        for n in 1..=3 {
            let f = RadialFunction::f0(n);
            let v = radial_integral(&f, &c).re;
            let expect = (1.0 - c.q2()).powi((n * n) as i32);
            assert!((v - expect).abs() <= 1e-14 * expect, "n={n}");
            // (f0, f0) agrees because f0^2 = f0
            assert!((norm_sq(&f, &c) - expect).abs() <= 1e-14 * expect);
        }
    }

    #[test]
    fn trace_equals_jackson_side() {
        let c = ctx();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for n in 1..=3 {
            let mut f = RadialFunction::zero(n);
            for lam in enumerate_partitions(n, 6) {
                f.set(lam, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
            }
            let a = radial_integral(&f, &c);
            let b = trace_side_integral(&f, &c).unwrap();
            assert!((a - b).norm() <= 1e-12 * a.norm(), "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn inner_product_is_diagonal_on_indicators() {
        let c = ctx();
        let f = RadialFunction::indicator(p(&[1, 0]));
        let g = RadialFunction::indicator(p(&[2, 0]));
        assert_eq!(inner_product(&f, &g, &c).unwrap(), C64::new(0.0, 0.0));
        let w = inner_product(&f, &f, &c).unwrap().re;
        assert!((w - point_mass(&p(&[1, 0]), &c)).abs() < 1e-15);
    }

    #[test]
    fn json_roundtrip() {
        let c = ctx();
        let mut f = RadialFunction::zero(2);
        f.set(p(&[2, 1]), C64::new(1.5, -0.25)).unwrap();
        f.set(p(&[0, 0]), C64::new(-3.0, 0.0)).unwrap();
        let s = f.to_json(&c);
        let (g, q) = RadialFunction::from_json(&s).unwrap();
        assert_eq!(q, 0.5);
        assert_eq!(f, g);
    }
}
