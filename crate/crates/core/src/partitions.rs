//! Partitions of length <= n, the dominance order, the staircase, and the
//! coordinate maps onto the radial grid and the joint spectrum.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::context::QContext;
use crate::error::{Error, Result};

/// A weakly decreasing tuple of nonnegative integers of fixed length n
/// (trailing zeros included).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("partition length must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("parts not weakly decreasing: {parts:?}")));
        }
        Ok(Partition { parts })
    }

    pub fn zero(n: usize) -> Self {
        Partition { parts: vec![0; n] }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.parts.len()
    }

    #[inline]
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    #[inline]
    pub fn part(&self, i: usize) -> u32 {
        self.parts[i]
    }

    /// |lambda| = sum of parts.
    #[inline]
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// lambda + delta as exponents (strictly decreasing).
    pub fn shifted_exponents(&self) -> Vec<u32> {
        let n = self.n();
        (0..n).map(|i| self.parts[i] + (n - 1 - i) as u32).collect()
    }

    /// Component-wise shift by d in {-1,0,1}^n; None if the result leaves
    /// the partition cone.
    pub fn shifted(&self, d: &[i32]) -> Option<Partition> {
        debug_assert_eq!(d.len(), self.n());
        let mut parts = Vec::with_capacity(self.n());
        for (p, di) in self.parts.iter().zip(d) {
            let v = *p as i64 + *di as i64;
            if v < 0 {
                return None;
            }
            parts.push(v as u32);
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return None;
        }
        Some(Partition { parts })
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Total order used for deterministic storage and enumeration: ascending
/// weight, then lexicographically decreasing parts within a weight.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| other.parts.cmp(&self.parts))
            .then_with(|| self.n().cmp(&other.n()))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All partitions of length <= n with |lambda| <= max_weight, ascending
/// weight and lexicographically decreasing within each weight.
pub fn enumerate_partitions(n: usize, max_weight: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    for w in 0..=max_weight {
        let mut block = Vec::new();
        let mut cur = Vec::with_capacity(n);
        gen_weight(n, w, w, &mut cur, &mut block);
        block.sort_by(|a: &Partition, b: &Partition| b.parts.cmp(&a.parts));
        out.extend(block);
    }
    out
}

fn gen_weight(n: usize, max_part: u32, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if cur.len() == n {
        if budget == 0 {
            out.push(Partition { parts: cur.clone() });
        }
        return;
    }
    let hi = max_part.min(budget);
    for p in (0..=hi).rev() {
        cur.push(p);
        gen_weight(n, p, budget - p, cur, out);
        cur.pop();
    }
}

/// Dominance order as a literal partial-sum comparison (no equal-weight
/// requirement): eta <= lambda iff every leading partial sum of eta is at
/// most that of lambda.
pub fn dominance_leq(eta: &Partition, lambda: &Partition) -> Result<bool> {
    if eta.n() != lambda.n() {
        return Err(Error::DimensionMismatch { expected: lambda.n(), got: eta.n() });
    }
    let mut se = 0u64;
    let mut sl = 0u64;
    for i in 0..eta.n() {
        se += eta.parts[i] as u64;
        sl += lambda.parts[i] as u64;
        if se > sl {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn dominance_lt(eta: &Partition, lambda: &Partition) -> Result<bool> {
    Ok(dominance_leq(eta, lambda)? && eta != lambda)
}

/// The staircase delta = (n-1, n-2, ..., 1, 0).
pub fn delta_staircase(n: usize) -> Partition {
    Partition { parts: (0..n).map(|i| (n - 1 - i) as u32).collect() }
}

/// Radial grid point u = q^{-2(lambda+delta)}, strictly decreasing
/// coordinates >= 1.
pub fn grid_point(lambda: &Partition, ctx: &QContext) -> Vec<f64> {
    lambda.shifted_exponents().iter().map(|&e| ctx.grid_coord(e as i64)).collect()
}

/// Spectrum coordinates (e_1(v), q^2 e_2(v), ..., q^{n(n-1)} e_n(v)) with
/// v = q^{-2(lambda+delta)}.
pub fn sigma_point(lambda: &Partition, ctx: &QContext) -> Vec<f64> {
    let v = grid_point(lambda, ctx);
    let e = elementary_all(&v);
    (1..=lambda.n()).map(|k| ctx.q().powi((k * (k - 1)) as i32) * e[k]).collect()
}

/// All elementary symmetric polynomials e_0..e_n of a real vector.
pub fn elementary_all(v: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; v.len() + 1];
    e[0] = 1.0;
    for (i, &x) in v.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// Highest weight of the spherical module attached to lambda:
/// (l1-l2, ..., l_{n-1}-l_n, 2 l_n, l_{n-1}-l_n, ..., l1-l2), a palindromic
/// integer (2n-1)-vector.
pub fn hat_weight(lambda: &Partition) -> Vec<i64> {
    let n = lambda.n();
    let p = &lambda.parts;
    let mut w = Vec::with_capacity(2 * n - 1);
    for i in 0..n - 1 {
        w.push(p[i] as i64 - p[i + 1] as i64);
    }
    w.push(2 * p[n - 1] as i64);
    for i in (0..n - 1).rev() {
        w.push(p[i] as i64 - p[i + 1] as i64);
    }
    w
}

/// Number of partitions of w into at most n parts (counting recurrence);
/// oracle for the enumeration window.
pub fn partition_count(n: usize, w: u32) -> u64 {
    // p(k, m): partitions of m into parts <= k is dual to length <= k
    let mut table = vec![vec![0u64; (w + 1) as usize]; n + 1];
    for k in 0..=n {
        table[k][0] = 1;
    }
    for k in 1..=n {
        for m in 1..=w as usize {
            table[k][m] = table[k - 1][m] + if m >= k { table[k][m - k] } else { 0 };
        }
    }
    table[n][w as usize]
}
