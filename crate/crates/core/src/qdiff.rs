//! The q-difference operator `box` on the half-line grid, the commuting
//! radial operators L_k = Delta^{-1} e_k(box_1..box_n) Delta, their matrix
//! realizations on a truncated basis, and cyclicity diagnostics.
//!
//! Radial functions live on strictly decreasing exponent tuples; the
//! conjugation by Delta is realized by extending Delta*f antisymmetrically
//! to the full lattice (sign of the sorting permutation, zero on coincident
//! tuples), applying the elementary symmetric combination of the axis
//! stencils, and restricting back. Everything is sparse and exact: support
//! outside the shift band is never touched.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::context::QContext;
use crate::error::{Error, Result};
use crate::measure::{point_mass, RadialFunction};
use crate::partitions::{enumerate_partitions, Partition};
use crate::qseries::box_coeffs;
use crate::symm::vandermonde;

/// Three-point stencil of `box` at a grid coordinate u > 0.
pub fn box_stencil(ctx: &QContext, u: f64) -> Result<(f64, f64, f64)> {
    if u <= 0.0 {
        return Err(Error::InvalidInput(format!("box stencil requires u > 0, got {u}")));
    }
    Ok(box_coeffs(ctx, u))
}

/// Function on the full lattice q^{-2 Z_+^n}, keyed by exponent tuples.
pub type LatticeFn = BTreeMap<Vec<u32>, C64>;

/// Apply the single-axis operator `box_axis` to a finitely supported lattice
/// function. Support grows by at most one shift along the axis; off-grid
/// neighbours never contribute because the inward coefficient vanishes at
/// the boundary.
pub fn apply_box(ctx: &QContext, f: &LatticeFn, axis: usize) -> LatticeFn {
    let mut out = LatticeFn::new();
    for (key, &v) in f {
        let e = key[axis] as i64;
        for de in [1i64, 0, -1] {
            let eo = e - de;
            if eo < 0 {
                continue;
            }
            let (cm, c0, cp) = box_coeffs(ctx, ctx.grid_coord(eo));
            let coeff = match de {
                1 => cm,
                0 => c0,
                _ => cp,
            };
            if coeff == 0.0 {
                continue;
            }
            let mut ko = key.clone();
            ko[axis] = eo as u32;
            *out.entry(ko).or_insert(C64::new(0.0, 0.0)) += coeff * v;
        }
    }
    out
}

/// Antisymmetric extension Delta * f of a radial function to the full
/// lattice.
pub fn antisymmetric_extension(ctx: &QContext, f: &RadialFunction) -> LatticeFn {
    let mut a = LatticeFn::new();
    for (lam, &v) in f.iter() {
        let exps = lam.shifted_exponents();
        let u: Vec<f64> = exps.iter().map(|&e| ctx.grid_coord(e as i64)).collect();
        let base = vandermonde(&u) * v;
        permute_with_sign(&exps, &mut |key, sign| {
            a.insert(key.to_vec(), base * sign);
        });
    }
    a
}

fn permute_with_sign(exps: &[u32], visit: &mut impl FnMut(&[u32], f64)) {
    // Heap's algorithm, tracking parity
    let mut arr = exps.to_vec();
    let n = arr.len();
    let mut c = vec![0usize; n];
    let mut sign = 1.0;
    visit(&arr, sign);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                arr.swap(0, i);
            } else {
                arr.swap(c[i], i);
            }
            sign = -sign;
            visit(&arr, sign);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// L_k applied to a finitely supported radial function (exact sparse
/// computation, no truncation).
pub fn l_radial(ctx: &QContext, k: usize, f: &RadialFunction) -> Result<RadialFunction> {
    let n = f.n();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange(format!("l_radial k={k} for n={n}")));
    }
    let a = antisymmetric_extension(ctx, f);
    let mut total = LatticeFn::new();
    for subset in k_subsets(n, k) {
        let mut g = a.clone();
        for axis in subset {
            g = apply_box(ctx, &g, axis);
        }
        for (key, v) in g {
            *total.entry(key).or_insert(C64::new(0.0, 0.0)) += v;
        }
    }
    let mut out = RadialFunction::zero(n);
    let delta = crate::partitions::delta_staircase(n);
    for (key, v) in total {
        if key.windows(2).all(|w| w[0] > w[1]) {
            let parts: Vec<u32> = key.iter().enumerate().map(|(i, &e)| e - delta.part(i)).collect();
            let u: Vec<f64> = key.iter().map(|&e| ctx.grid_coord(e as i64)).collect();
            out.add_assign(Partition::new(parts)?, v / vandermonde(&u))?;
        }
    }
    Ok(out)
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Shift band of L_k around lambda: partitions mu with
/// mu - lambda in {-1,0,1}^n and at most k nonzero components.
pub fn band(lambda: &Partition, k: usize) -> Vec<Partition> {
    let n = lambda.n();
    let mut out = Vec::new();
    let mut d = vec![0i32; n];
    fn rec(i: usize, nonzero: usize, k: usize, d: &mut Vec<i32>, lambda: &Partition, out: &mut Vec<Partition>) {
        if i == d.len() {
            if let Some(mu) = lambda.shifted(d) {
                out.push(mu);
            }
            return;
        }
        for v in [-1i32, 0, 1] {
            let nz = nonzero + usize::from(v != 0);
            if nz > k {
                continue;
            }
            d[i] = v;
            rec(i + 1, nz, k, d, lambda, out);
            d[i] = 0;
        }
    }
    rec(0, 0, k, &mut d, lambda, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Matrix of L_k over the indicator basis of the window |lambda| <= max_weight.
///
/// Entries whose row would leave the window are dropped and recorded by the
/// overflow flag; interior columns (whole band inside the window) are exact.
#[derive(Debug, Clone)]
pub struct GridOperator {
    n: usize,
    k: usize,
    max_weight: u32,
    basis: Vec<Partition>,
    /// column-major sparse entries: (row, col) -> value
    entries: BTreeMap<(usize, usize), f64>,
    overflow: bool,
}

impl GridOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn basis(&self) -> &[Partition] {
        &self.basis
    }

    pub fn overflow(&self) -> bool {
        self.overflow
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries.get(&(row, col)).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &f64)> {
        self.entries.iter()
    }

    /// True when the whole shift band of the column partition lies inside
    /// the window, so the column is free of truncation effects.
    pub fn is_interior(&self, col: usize) -> bool {
        band(&self.basis[col], self.k).iter().all(|mu| mu.weight() <= self.max_weight)
    }

    /// Support of every column lies inside the shift band (exact sparsity
    /// check, no tolerance).
    pub fn band_structure_exact(&self) -> bool {
        for (&(row, col), &v) in &self.entries {
            if v != 0.0 {
                let lam = &self.basis[col];
                let mu = &self.basis[row];
                if !band(lam, self.k).contains(mu) {
                    return false;
                }
            }
        }
        true
    }

    /// max over interior pairs of |<L chi_l, chi_m>_w - <chi_l, L chi_m>_w|,
    /// normalized by the largest weighted entry.
    pub fn self_adjointness_defect(&self, ctx: &QContext) -> f64 {
        let w: Vec<f64> = self.basis.iter().map(|l| point_mass(l, ctx)).collect();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for (&(row, col), &v) in &self.entries {
            if !(self.is_interior(col) && self.is_interior(row)) {
                continue;
            }
            let a = v * w[row];
            let b = self.entry(col, row) * w[col];
            worst = worst.max((a - b).abs());
            scale = scale.max(a.abs());
        }
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }

    /// Operator 2-norm of the weighted symmetrization, by power iteration on
    /// S^T S with a deterministic start.
    pub fn weighted_norm(&self, ctx: &QContext) -> f64 {
        let m = self.basis.len();
        let w: Vec<f64> = self.basis.iter().map(|l| point_mass(l, ctx).sqrt()).collect();
        // S = W^{1/2} M W^{-1/2}
        let rows: Vec<Vec<(usize, f64)>> = {
            let mut rows = vec![Vec::new(); m];
            for (&(r, c), &v) in &self.entries {
                rows[r].push((c, v * w[r] / w[c]));
            }
            rows
        };
        let mut cols = vec![Vec::new(); m];
        for (r, row) in rows.iter().enumerate() {
            for &(c, v) in row {
                cols[c].push((r, v));
            }
        }
        let mut v = vec![1.0f64 / (m as f64).sqrt(); m];
        let mut last = 0.0f64;
        for _ in 0..2000 {
            // u = S v; v' = S^T u
            let mut u = vec![0.0; m];
            for (r, row) in rows.iter().enumerate() {
                let mut s = 0.0;
                for &(c, val) in row {
                    s += val * v[c];
                }
                u[r] = s;
            }
            let mut vn = vec![0.0; m];
            for (c, col) in cols.iter().enumerate() {
                let mut s = 0.0;
                for &(r, val) in col {
                    s += val * u[r];
                }
                vn[c] = s;
            }
            let norm = vn.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            for x in &mut vn {
                *x /= norm;
            }
            let sigma = norm.sqrt();
            let done = (sigma - last).abs() <= 1e-13 * sigma;
            last = sigma;
            v = vn;
            if done {
                break;
            }
        }
        last
    }

    /// Coordinate-triplet export (row partition, column partition, value).
    pub fn to_json(&self) -> String {
        let mut s = String::from("[");
        for (i, (&(r, c), &v)) in self.entries.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(&format!(
                "{{\"row\": {}, \"col\": {}, \"value\": {}}}",
                json_parts(&self.basis[r]),
                json_parts(&self.basis[c]),
                crate::measure::fmt_f64(v)
            ));
        }
        s.push(']');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("row;col;value\n");
        for (&(r, c), &v) in &self.entries {
            s.push_str(&format!("{};{};{}\n", self.basis[r], self.basis[c], crate::measure::fmt_f64(v)));
        }
        s
    }
}

fn json_parts(p: &Partition) -> String {
    format!("[{}]", p.parts().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

/// Assemble the matrix of L_k over the window |lambda| <= max_weight.
pub fn operator_matrix(ctx: &QContext, n: usize, k: usize, max_weight: u32) -> Result<GridOperator> {
    let basis = enumerate_partitions(n, max_weight);
    let index: BTreeMap<Partition, usize> = basis.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut entries = BTreeMap::new();
    let mut overflow = false;
    for (col, lam) in basis.iter().enumerate() {
        let img = l_radial(ctx, k, &RadialFunction::indicator(lam.clone()))?;
        for (mu, &v) in img.iter() {
            match index.get(mu) {
                Some(&row) => {
                    entries.insert((row, col), v.re);
                }
                None => overflow = true,
            }
        }
    }
    Ok(GridOperator { n, k, max_weight, basis, entries, overflow })
}

/// Dimension of span{ L^alpha f0 : words alpha of length <= depth } computed
/// from exact sparse applications; errors with WindowOverflow when a word's
/// support leaves |lambda| <= max_weight (the window precondition).
pub fn krylov_rank(ctx: &QContext, n: usize, depth: usize, max_weight: u32) -> Result<usize> {
    let words = krylov_words(ctx, n, depth)?;
    let mut support: Vec<Partition> = Vec::new();
    for wfn in &words {
        for (lam, _) in wfn.iter() {
            if lam.weight() > max_weight {
                return Err(Error::WindowOverflow);
            }
            if !support.contains(lam) {
                support.push(lam.clone());
            }
        }
    }
    support.sort();
    let vectors: Vec<Vec<f64>> =
        words.iter().map(|wfn| support.iter().map(|lam| wfn.value(lam).re).collect()).collect();
    Ok(rank_with_threshold(vectors, 1e-9))
}

/// All words L_{i1} ... L_{im} f0 with m <= depth.
pub fn krylov_words(ctx: &QContext, n: usize, depth: usize) -> Result<Vec<RadialFunction>> {
    let mut words = vec![RadialFunction::f0(n)];
    let mut frontier = vec![RadialFunction::f0(n)];
    for _ in 0..depth {
        let mut next = Vec::new();
        for f in &frontier {
            for k in 1..=n {
                next.push(l_radial(ctx, k, f)?);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(words)
}

/// Numerical rank by modified Gram-Schmidt with a relative threshold on
/// normalized vectors.
fn rank_with_threshold(vectors: Vec<Vec<f64>>, tol: f64) -> usize {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut v in vectors {
        let norm0 = dot(&v, &v).sqrt();
        if norm0 == 0.0 {
            continue;
        }
        for x in &mut v {
            *x /= norm0;
        }
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let r = dot(&v, &v).sqrt();
        if r > tol {
            for x in &mut v {
                *x /= r;
            }
            basis.push(v);
        }
    }
    basis.len()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least-squares residual of expressing `target` in the span of `vectors`
/// (used by the cyclicity checks).
pub fn span_residual(vectors: &[RadialFunction], target: &RadialFunction) -> f64 {
    let mut support: Vec<Partition> = Vec::new();
    for f in vectors.iter().chain(std::iter::once(target)) {
        for (lam, _) in f.iter() {
            if !support.contains(lam) {
                support.push(lam.clone());
            }
        }
    }
    support.sort();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut t: Vec<f64> = support.iter().map(|l| target.value(l).re).collect();
    let tnorm = dot(&t, &t).sqrt().max(1e-300);
    for f in vectors {
        let mut v: Vec<f64> = support.iter().map(|l| f.value(l).re).collect();
        let n0 = dot(&v, &v).sqrt();
        if n0 == 0.0 {
            continue;
        }
        for x in &mut v {
            *x /= n0;
        }
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let r = dot(&v, &v).sqrt();
        if r > 1e-12 {
            for x in &mut v {
                *x /= r;
            }
            basis.push(v);
        }
    }
    for b in &basis {
        let c = dot(&t, b);
        for (x, y) in t.iter_mut().zip(b) {
            *x -= c * y;
        }
    }
    dot(&t, &t).sqrt() / tnorm
}
