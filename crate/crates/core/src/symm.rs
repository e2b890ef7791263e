//! Symmetric-polynomial evaluators (monomial, elementary, Schur, Vandermonde)
//! and divided-difference determinant kernels used by the bialternant
//! formulas.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::partitions::Partition;

/// Vandermonde Delta(v) = prod_{i<j} (v_i - v_j).
pub fn vandermonde(v: &[f64]) -> f64 {
    let mut p = 1.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            p *= v[i] - v[j];
        }
    }
    p
}

pub fn vandermonde_c(v: &[C64]) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            p *= v[i] - v[j];
        }
    }
    p
}

/// Monomial symmetric polynomial m_lambda: the orbit sum of z^lambda over
/// distinct permutations of the exponent vector (monic by construction).
pub fn monomial_sym(lambda: &Partition, z: &[C64]) -> Result<C64> {
    if z.len() != lambda.n() {
        return Err(Error::DimensionMismatch { expected: lambda.n(), got: z.len() });
    }
    let mut exps: Vec<u32> = lambda.parts().to_vec();
    // iterate distinct permutations in lexicographic order
    exps.sort();
    let mut s = C64::new(0.0, 0.0);
    loop {
        let mut t = C64::new(1.0, 0.0);
        for (zi, &e) in z.iter().zip(&exps) {
            t *= zi.powu(e);
        }
        s += t;
        if !next_permutation(&mut exps) {
            break;
        }
    }
    Ok(s)
}

fn next_permutation(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Elementary symmetric polynomial e_k(z).
pub fn elementary_sym(k: usize, z: &[C64]) -> Result<C64> {
    if k > z.len() {
        return Err(Error::IndexOutOfRange(format!("e_{k} of {} variables", z.len())));
    }
    let mut e = vec![C64::new(0.0, 0.0); z.len() + 1];
    e[0] = C64::new(1.0, 0.0);
    for (i, &x) in z.iter().enumerate() {
        for m in (1..=i + 1).rev() {
            let lower = e[m - 1];
            e[m] += x * lower;
        }
    }
    Ok(e[k])
}

/// Determinant by LU with partial pivoting (small dense matrices).
pub fn det_c(mat: &mut [Vec<C64>]) -> C64 {
    let n = mat.len();
    let mut det = C64::new(1.0, 0.0);
    for k in 0..n {
        let (mut piv, mut best) = (k, mat[k][k].norm());
        for i in k + 1..n {
            let v = mat[i][k].norm();
            if v > best {
                piv = i;
                best = v;
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if piv != k {
            mat.swap(piv, k);
            det = -det;
        }
        det *= mat[k][k];
        for i in k + 1..n {
            let f = mat[i][k] / mat[k][k];
            for j in k..n {
                let sub = f * mat[k][j];
                mat[i][j] -= sub;
            }
        }
    }
    det
}

/// Schur polynomial via the bialternant determinant
/// S_lambda(z) = det(z_i^{lambda_j + n - j}) / det(z_i^{n - j}).
///
/// Coordinates closer than 1e-12 relative are rejected (the removable
/// singularity is not implemented at scalar level).
pub fn schur(lambda: &Partition, z: &[C64]) -> Result<C64> {
    let n = lambda.n();
    if z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: z.len() });
    }
    let mut minsep = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let pair_scale = z[i].norm().max(z[j].norm()).max(1e-300);
            minsep = minsep.min((z[i] - z[j]).norm() / pair_scale);
        }
    }
    if n > 1 && minsep < 1e-12 {
        return Err(Error::CoincidentCoordinates(minsep));
    }
    let mut num: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..n).map(|j| z[i].powu(lambda.part(j) + (n - 1 - j) as u32)).collect())
        .collect();
    let mut den: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| z[i].powu((n - 1 - j) as u32)).collect()).collect();
    Ok(det_c(&mut num) / det_c(&mut den))
}

/// det[f_j(x_i)] / prod_{i<j} (x_j - x_i) via Newton divided differences.
///
/// `columns[j][i]` is the jet (value, first derivative, ...) of column
/// function j at node i; derivatives are consumed only where adjacent nodes
/// coincide exactly, so order 0 jets suffice for distinct nodes. Nodes must
/// be grouped (equal values adjacent). This form stays finite and accurate
/// where both the determinant and the Vandermonde vanish.
pub fn det_over_vdm(nodes: &[f64], columns: &[Vec<Vec<f64>>]) -> f64 {
    let n = nodes.len();
    debug_assert_eq!(columns.len(), n);
    let mut mat: Vec<Vec<f64>> = Vec::with_capacity(n);
    for col in columns {
        mat.push(newton_dd_f64(nodes, col));
    }
    // mat[j][i] = f_j[x_0..x_i]; determinant over (i, j)
    let mut m: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| C64::new(mat[j][i], 0.0)).collect()).collect();
    det_c(&mut m).re
}

/// Top edge f[x_0], f[x_0,x_1], ..., f[x_0..x_{n-1}] of the (confluent)
/// divided-difference table.
fn newton_dd_f64(nodes: &[f64], jets: &[Vec<f64>]) -> Vec<f64> {
    let n = nodes.len();
    let mut cur: Vec<f64> = (0..n).map(|i| jets[i][0]).collect();
    let mut top = Vec::with_capacity(n);
    top.push(cur[0]);
    let mut fact = 1.0f64;
    for k in 1..n {
        fact *= k as f64;
        let mut next = vec![0.0; n - k];
        for i in 0..n - k {
            let dx = nodes[i + k] - nodes[i];
            if dx == 0.0 {
                // confluent entry: all nodes i..i+k coincide
                next[i] = jets[i][k] / fact;
            } else {
                next[i] = (cur[i + 1] - cur[i]) / dx;
            }
        }
        top.push(next[0]);
        cur = next;
    }
    top
}

/// Complex variant with order-0 jets (distinct or near-coincident nodes).
pub fn det_over_vdm_c(nodes: &[C64], values: &[Vec<C64>]) -> C64 {
    let n = nodes.len();
    let mut mat: Vec<Vec<C64>> = Vec::with_capacity(n);
    for col in values {
        let mut cur = col.clone();
        let mut top = Vec::with_capacity(n);
        top.push(cur[0]);
        for k in 1..n {
            let mut next = vec![C64::new(0.0, 0.0); n - k];
            for i in 0..n - k {
                next[i] = (cur[i + 1] - cur[i]) / (nodes[i + k] - nodes[i]);
            }
            top.push(next[0]);
            cur = next;
        }
        mat.push(top);
    }
    let mut m: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| mat[j][i]).collect()).collect();
    det_c(&mut m)
}

/// Sort a tuple of exponents into strictly decreasing order, returning the
/// sign of the sorting permutation; None when two entries coincide.
pub fn sort_desc_with_sign(exps: &[u32]) -> Option<(Vec<u32>, f64)> {
    let mut idx: Vec<usize> = (0..exps.len()).collect();
    idx.sort_by(|&a, &b| exps[b].cmp(&exps[a]).then(a.cmp(&b)));
    let sorted: Vec<u32> = idx.iter().map(|&i| exps[i]).collect();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    // parity of idx
    let mut seen = vec![false; idx.len()];
    let mut sign = 1.0;
    for start in 0..idx.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = idx[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    Some((sorted, sign))
}
