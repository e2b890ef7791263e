//! The c-function weight, the disk Plancherel measure, the kappa factor, the
//! matrix-ball Plancherel measure, quadrature over the spectral cube, and
//! the unitary forward/inverse spherical transform.
//!
//! Spectral evaluations are routed through the reduced kernels
//!
//! ```text
//! R_lambda(x) = det[ G_{(lambda+delta)_j}(x_i) ] / prod_{i<j} (x_j - x_i),
//! ```
//!
//! where G_k(x) = Phi_{-1/2 + i rho}(q^{-2k}) depends on rho only through
//! x = 2 cos(h rho). The R kernels are smooth and nonvanishing across
//! coincident spectral coordinates (confluent divided differences), so
//! transforms, Parseval sums and the intertwining checks stay finite on the
//! whole quadrature cube including its diagonal.

use num_complex::Complex64 as C64;

use crate::context::QContext;
use crate::error::{Error, Result};
use crate::measure::{fmt_f64, inner_product, norm_constant, point_mass, RadialFunction};
use crate::partitions::{enumerate_partitions, grid_point, Partition};
use crate::qseries::{c_function, principal_grid_jets, qpochhammer, CompensatedSum, PochhammerOrder};
use crate::spherical::a_eigen;
use crate::symm::{det_over_vdm, vandermonde};

/// Density of the disk Plancherel measure
/// d sigma(rho) = (1/2pi) (h/(1-q^2)) d rho / (c(-1/2+i rho) c(-1/2-i rho)),
/// computed through convergent infinite products; endpoint limits are 0.
pub fn sigma_weight(ctx: &QContext, rho: f64) -> Result<f64> {
    if rho <= 0.0 || rho >= ctx.rho_max() {
        return Ok(0.0);
    }
    let q2 = ctx.q2();
    let lnq = ctx.q().ln();
    // 1/(c c-bar) = (q^2;q^2)_inf^2 |(q^{4 i rho}; q^2)_inf|^2 / |(q^{1+2 i rho}; q^2)_inf|^4
    let qq = qpochhammer(ctx, C64::new(q2, 0.0), q2, PochhammerOrder::Infinite)?.re;
    let a4 = C64::from_polar(1.0, 4.0 * rho * lnq);
    let p4 = qpochhammer(ctx, a4, q2, PochhammerOrder::Infinite)?;
    let a1 = C64::from_polar(ctx.q(), 2.0 * rho * lnq);
    let p1 = qpochhammer(ctx, a1, q2, PochhammerOrder::Infinite)?;
    let inv_cc = qq * qq * p4.norm_sqr() / (p1.norm_sqr() * p1.norm_sqr());
    Ok(1.0 / (2.0 * std::f64::consts::PI) * ctx.h() / (1.0 - q2) * inv_cc)
}

/// Reciprocal c-weight 1/(c(-1/2+i rho) c(-1/2-i rho)) via the q-Gamma
/// route; used to cross-check `sigma_weight`.
pub fn inverse_c_weight_gamma(ctx: &QContext, rho: f64) -> Result<f64> {
    let l = C64::new(-0.5, rho);
    let c1 = c_function(ctx, l)?;
    let c2 = c_function(ctx, l.conj())?;
    Ok(1.0 / (c1 * c2).re)
}

/// Composite Simpson rule on [0, pi/h] with an even number of panels.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn composite_simpson(ctx: &QContext, panels: usize) -> Result<Self> {
        if panels < 2 || panels % 2 != 0 {
            return Err(Error::InvalidInput(format!("Simpson rule needs an even panel count >= 2, got {panels}")));
        }
        let b = ctx.rho_max();
        let h = b / panels as f64;
        let nodes: Vec<f64> = (0..=panels).map(|i| i as f64 * h).collect();
        let mut weights = vec![0.0; panels + 1];
        weights[0] = h / 3.0;
        weights[panels] = h / 3.0;
        for (i, w) in weights.iter_mut().enumerate().skip(1).take(panels - 1) {
            *w = if i % 2 == 1 { 4.0 * h / 3.0 } else { 2.0 * h / 3.0 };
        }
        Ok(QuadratureRule { nodes, weights })
    }

    pub fn panels(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn total_length(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Symmetric function on the spectral cube [0, pi/h]^n sampled on the tensor
/// grid of a quadrature rule, stored row-major.
#[derive(Debug, Clone)]
pub struct SpectralFunction {
    pub n: usize,
    pub nodes: Vec<f64>,
    pub values: Vec<C64>,
    pub symmetric: bool,
}

impl SpectralFunction {
    pub fn constant(n: usize, rule: &QuadratureRule, value: C64) -> Self {
        let len = rule.nodes.len().pow(n as u32);
        SpectralFunction { n, nodes: rule.nodes.clone(), values: vec![value; len], symmetric: true }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Largest symmetry defect max |f(rho) - f(perm rho)| over a sample of
    /// transpositions.
    pub fn symmetry_defect(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let m = self.node_count();
        let mut worst = 0.0f64;
        if self.n == 2 {
            for i in 0..m {
                for j in 0..i {
                    worst = worst.max((self.values[i * m + j] - self.values[j * m + i]).norm());
                }
            }
        } else {
            // first-two-coordinates transposition on the flattened grid
            let stride = m.pow((self.n - 1) as u32);
            let stride2 = m.pow((self.n - 2) as u32);
            for i in 0..m {
                for j in 0..i {
                    for r in 0..stride2 {
                        let a = self.values[i * stride + j * stride2 + r];
                        let b = self.values[j * stride + i * stride2 + r];
                        worst = worst.max((a - b).norm());
                    }
                }
            }
        }
        worst
    }

    /// JSON schema: {"n": .., "q": .., "M": panels, "nodes": [..], "values": [[re, im], ..]}.
    pub fn to_json(&self, ctx: &QContext) -> String {
        let mut s = String::from("{");
        s.push_str(&format!("\"n\": {}, \"q\": {}, \"M\": {}, \"nodes\": [", self.n, fmt_f64(ctx.q()), self.nodes.len() - 1));
        for (i, x) in self.nodes.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(&fmt_f64(*x));
        }
        s.push_str("], \"values\": [");
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(&format!("[{}, {}]", fmt_f64(v.re), fmt_f64(v.im)));
        }
        s.push_str("]}");
        s
    }

    pub fn from_json(text: &str) -> Result<(Self, f64)> {
        #[derive(serde::Deserialize)]
        struct SpectralJson {
            n: usize,
            q: f64,
            #[serde(rename = "M")]
            m: usize,
            nodes: Vec<f64>,
            values: Vec<[f64; 2]>,
        }
        let parsed: SpectralJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("spectral function JSON: {e}")))?;
        if parsed.nodes.len() != parsed.m + 1 {
            return Err(Error::InvalidInput(format!(
                "node count {} does not match M={}",
                parsed.nodes.len(),
                parsed.m
            )));
        }
        let expected = parsed.nodes.len().pow(parsed.n as u32);
        if parsed.values.len() != expected {
            return Err(Error::InvalidInput(format!(
                "value count {} does not match (M+1)^n = {}",
                parsed.values.len(),
                expected
            )));
        }
        let values: Vec<C64> = parsed.values.iter().map(|v| C64::new(v[0], v[1])).collect();
        let f = SpectralFunction { n: parsed.n, nodes: parsed.nodes, values, symmetric: true };
        Ok((f, parsed.q))
    }
}

/// kappa(rho) = (U f0)(rho) = (1-q^2)^{n^2} Phi_{-1/2+i rho_1..}(q^{-2 delta});
/// real, antisymmetric in the x-coordinates up to the reduced kernel, and
/// vanishing exactly iff two coordinates coincide.
pub fn kappa(ctx: &QContext, rho: &[f64]) -> Result<C64> {
    let n = rho.len();
    let xs: Vec<f64> = rho.iter().map(|&r| 2.0 * (ctx.h() * r).cos()).collect();
    let kmax = n - 1;
    let jets: Vec<Vec<Vec<f64>>> = xs.iter().map(|&x| principal_grid_jets(ctx, x, kmax, n - 1)).collect();
    let delta = Partition::zero(n);
    let exps = delta.shifted_exponents();
    let r0 = r_from_jets(&xs, &jets, &exps);
    let vdm_rev = vdm_reversed(&xs);
    let base = vandermonde(&grid_point(&delta, ctx));
    Ok(C64::new((1.0 - ctx.q2()).powi((n * n) as i32) * r0 * vdm_rev / base, 0.0))
}

fn vdm_reversed(xs: &[f64]) -> f64 {
    let mut p = 1.0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            p *= xs[j] - xs[i];
        }
    }
    p
}

fn r_from_jets(xs: &[f64], jets: &[Vec<Vec<f64>>], exps: &[u32]) -> f64 {
    let n = xs.len();
    // sort nodes (the ratio is permutation invariant), group coincident ones
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let nodes: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
    let columns: Vec<Vec<Vec<f64>>> = exps
        .iter()
        .map(|&e| idx.iter().map(|&i| jets[i][e as usize].clone()).collect())
        .collect();
    det_over_vdm(&nodes, &columns)
}

/// Density of the matrix-ball Plancherel measure with respect to Lebesgue
/// measure on the ordered region (cube integration divided by n! agrees):
/// kappa(rho)^2 N^{-1} prod_j sigma(rho_j).
///
/// The normalization N^{-1} (in place of the printed n! N) is fixed by
/// unitarity: it is the unique constant under which ||F f0||^2 = ||f0||^2 =
/// (1-q^2)^{n^2}; the deviation factor n! N^2 against the printed constant
/// is reported by the verification suite.
pub fn big_sigma_weight(ctx: &QContext, rho: &[f64]) -> Result<f64> {
    let n = rho.len();
    let k = kappa(ctx, rho)?.re;
    let mut w = k * k / norm_constant(n, ctx);
    for &r in rho {
        w *= sigma_weight(ctx, r)?;
    }
    Ok(w.max(0.0))
}

/// Total mass of d sigma over [0, pi/h] under a quadrature rule.
pub fn sigma_total_mass(ctx: &QContext, rule: &QuadratureRule) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc.add(C64::new(sigma_weight(ctx, *x)? * w, 0.0));
    }
    Ok(acc.value().re)
}

/// Precomputed spectral machinery for a fixed (n, rule, degree window).
pub struct Transformer<'a> {
    ctx: &'a QContext,
    n: usize,
    rule: QuadratureRule,
    /// jets[node][k][order], order up to n-1
    jets: Vec<Vec<Vec<f64>>>,
    sigma: Vec<f64>,
    kmax: usize,
    base_vdm: f64,
    pow_one_minus_q2: f64,
}

impl<'a> Transformer<'a> {
    /// `max_weight` bounds the partitions the transformer can serve.
    pub fn new(ctx: &'a QContext, n: usize, rule: QuadratureRule, max_weight: u32) -> Result<Self> {
        let kmax = max_weight as usize + n - 1;
        let xs: Vec<f64> = rule.nodes.iter().map(|&r| 2.0 * (ctx.h() * r).cos()).collect();
        let jets: Vec<Vec<Vec<f64>>> = xs.iter().map(|&x| principal_grid_jets(ctx, x, kmax, n - 1)).collect();
        let sigma: Result<Vec<f64>> = rule.nodes.iter().map(|&r| sigma_weight(ctx, r)).collect();
        let base_vdm = vandermonde(&grid_point(&Partition::zero(n), ctx));
        Ok(Transformer {
            ctx,
            n,
            rule,
            jets,
            sigma: sigma?,
            kmax,
            base_vdm,
            pow_one_minus_q2: (1.0 - ctx.q2()).powi((n * n) as i32),
        })
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn node_count(&self) -> usize {
        self.rule.nodes.len()
    }

    fn cube_size(&self) -> usize {
        self.node_count().pow(self.n as u32)
    }

    fn multi_index(&self, flat: usize) -> Vec<usize> {
        let m = self.node_count();
        let mut idx = vec![0usize; self.n];
        let mut rest = flat;
        for i in (0..self.n).rev() {
            idx[i] = rest % m;
            rest /= m;
        }
        idx
    }

    /// Reduced kernel R_lambda(x) at a cube node.
    fn r_lambda(&self, idx: &[usize], exps: &[u32]) -> f64 {
        debug_assert!(*exps.iter().max().unwrap() as usize <= self.kmax);
        if self.n == 1 {
            return self.jets[idx[0]][exps[0] as usize][0];
        }
        let xs: Vec<f64> = idx.iter().map(|&i| 2.0 * (self.ctx.h() * self.rule.nodes[i]).cos()).collect();
        let mut ord: Vec<usize> = (0..self.n).collect();
        ord.sort_by(|&a, &b| idx[a].cmp(&idx[b]));
        let nodes: Vec<f64> = ord.iter().map(|&i| xs[i]).collect();
        let columns: Vec<Vec<Vec<f64>>> = exps
            .iter()
            .map(|&e| ord.iter().map(|&i| self.jets[idx[i]][e as usize].clone()).collect())
            .collect();
        det_over_vdm(&nodes, &columns)
    }

    fn vdm_rev_at(&self, idx: &[usize]) -> f64 {
        let xs: Vec<f64> = idx.iter().map(|&i| 2.0 * (self.ctx.h() * self.rule.nodes[i]).cos()).collect();
        vdm_reversed(&xs)
    }

    /// Reduced transform (U f)(rho) / VDMrev(x): smooth across the diagonal.
    fn u_reduced(&self, f: &RadialFunction) -> Result<Vec<C64>> {
        if f.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: f.n() });
        }
        let supp: Vec<(Vec<u32>, C64, f64)> = f
            .iter()
            .map(|(lam, &v)| {
                let exps = lam.shifted_exponents();
                let du = vandermonde(&grid_point(lam, self.ctx));
                (exps, v * point_mass(lam, self.ctx) / du, du)
            })
            .collect();
        for (exps, _, _) in &supp {
            if exps[0] as usize > self.kmax {
                return Err(Error::WindowOverflow);
            }
        }
        let mut out = Vec::with_capacity(self.cube_size());
        for flat in 0..self.cube_size() {
            let idx = self.multi_index(flat);
            let mut acc = CompensatedSum::new();
            for (exps, coeff, _) in &supp {
                acc.add(*coeff * self.r_lambda(&idx, exps));
            }
            out.push(acc.value());
        }
        Ok(out)
    }

    /// kappa / VDMrev at a node: (1-q^2)^{n^2} R_0(x) / Delta(q^{-2 delta}).
    fn kappa_reduced(&self, idx: &[usize]) -> f64 {
        let exps: Vec<u32> = (0..self.n).map(|i| (self.n - 1 - i) as u32).collect();
        self.pow_one_minus_q2 * self.r_lambda(&idx, &exps) / self.base_vdm
    }

    /// Forward transform F f = (U f) / kappa, evaluated through the reduced
    /// kernels so that values are finite and smooth on the whole cube.
    /// F f0 is the constant 1 by construction.
    pub fn forward(&self, f: &RadialFunction) -> Result<SpectralFunction> {
        let ur = self.u_reduced(f)?;
        let mut values = Vec::with_capacity(ur.len());
        for (flat, u) in ur.iter().enumerate() {
            let idx = self.multi_index(flat);
            values.push(u / self.kappa_reduced(&idx));
        }
        Ok(SpectralFunction { n: self.n, nodes: self.rule.nodes.clone(), values, symmetric: true })
    }

    /// Inverse transform onto the window |lambda| <= max_weight:
    /// f(lambda) = (n! N)^{-1} Quad_cube[ fhat kappa Phi_rho(u_lambda) prod sigma ].
    pub fn inverse(&self, fhat: &SpectralFunction, max_weight: u32) -> Result<RadialFunction> {
        if fhat.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: fhat.n });
        }
        if fhat.node_count() != self.node_count() {
            return Err(Error::InvalidInput(format!(
                "spectral grid has {} nodes, transformer rule has {}",
                fhat.node_count(),
                self.node_count()
            )));
        }
        let nfact: f64 = (1..=self.n).map(|i| i as f64).product();
        let scale = 1.0 / (nfact * norm_constant(self.n, self.ctx));
        let mut out = RadialFunction::zero(self.n);
        let lams = enumerate_partitions(self.n, max_weight);
        let mut accs: Vec<CompensatedSum> = vec![CompensatedSum::new(); lams.len()];
        let exps: Vec<Vec<u32>> = lams.iter().map(|l| l.shifted_exponents()).collect();
        let dus: Vec<f64> = lams.iter().map(|l| vandermonde(&grid_point(l, self.ctx))).collect();
        for flat in 0..self.cube_size() {
            let idx = self.multi_index(flat);
            let mut wq = 1.0f64;
            for &i in &idx {
                wq *= self.rule.weights[i] * self.sigma[i];
            }
            if wq == 0.0 {
                continue;
            }
            let vr = self.vdm_rev_at(&idx);
            if vr == 0.0 {
                continue; // kappa vanishes on the diagonal
            }
            let kap = self.kappa_reduced(&idx) * vr;
            let common = fhat.values[flat] * (kap * wq);
            for (j, e) in exps.iter().enumerate() {
                let phi = self.r_lambda(&idx, e) * vr / dus[j];
                accs[j].add(common * phi);
            }
        }
        for (j, lam) in lams.into_iter().enumerate() {
            let v = accs[j].value() * scale;
            out.set(lam, v)?;
        }
        Ok(out)
    }

    /// Plancherel-side inner product <F f, F g>_Sigma computed through the
    /// reduced kernels (kappa^2 recombines with the two reduced transforms).
    pub fn parseval_product(&self, f: &RadialFunction, g: &RadialFunction) -> Result<C64> {
        let uf = self.u_reduced(f)?;
        let ug = self.u_reduced(g)?;
        let nfact: f64 = (1..=self.n).map(|i| i as f64).product();
        let scale = 1.0 / (nfact * norm_constant(self.n, self.ctx));
        let mut acc = CompensatedSum::new();
        for flat in 0..self.cube_size() {
            let idx = self.multi_index(flat);
            let mut wq = 1.0f64;
            for &i in &idx {
                wq *= self.rule.weights[i] * self.sigma[i];
            }
            if wq == 0.0 {
                continue;
            }
            let vr = self.vdm_rev_at(&idx);
            acc.add(uf[flat] * ug[flat].conj() * (vr * vr * wq));
        }
        Ok(acc.value() * scale)
    }

    /// |<f,g>_nu - <F f, F g>_Sigma| (absolute Parseval defect).
    pub fn parseval_defect(&self, f: &RadialFunction, g: &RadialFunction) -> Result<f64> {
        let nu = inner_product(f, g, self.ctx)?;
        let sp = self.parseval_product(f, g)?;
        Ok((nu - sp).norm())
    }

    /// Sigma-side inner product of two sampled spectral functions (external
    /// data; uses kappa per node, the diagonal carries zero measure).
    pub fn inner_product_sigma(&self, fhat: &SpectralFunction, ghat: &SpectralFunction) -> Result<C64> {
        if fhat.node_count() != self.node_count() || ghat.node_count() != self.node_count() {
            return Err(Error::InvalidInput("spectral grids do not match the rule".into()));
        }
        let nfact: f64 = (1..=self.n).map(|i| i as f64).product();
        let scale = 1.0 / (nfact * norm_constant(self.n, self.ctx));
        let mut acc = CompensatedSum::new();
        for flat in 0..self.cube_size() {
            let idx = self.multi_index(flat);
            let mut wq = 1.0f64;
            for &i in &idx {
                wq *= self.rule.weights[i] * self.sigma[i];
            }
            if wq == 0.0 {
                continue;
            }
            let vr = self.vdm_rev_at(&idx);
            let kap = self.kappa_reduced(&idx) * vr;
            acc.add(fhat.values[flat] * ghat.values[flat].conj() * (kap * kap * wq));
        }
        Ok(acc.value() * scale)
    }

    /// Total mass of d Sigma: cube integral of kappa^2 (n! N)^{-1} prod sigma.
    pub fn big_sigma_total_mass(&self) -> Result<f64> {
        let one = SpectralFunction::constant(self.n, &self.rule, C64::new(1.0, 0.0));
        Ok(self.inner_product_sigma(&one, &one)?.re)
    }

    /// Quadrature-free intertwining defect:
    /// max over nodes of |F(L_k f) - e_k(a(-1/2+i rho)) F f| relative to the
    /// sup of the right-hand side.
    pub fn intertwine_defect(&self, k: usize, f: &RadialFunction) -> Result<f64> {
        let lf = crate::qdiff::l_radial(self.ctx, k, f)?;
        let u_f = self.u_reduced(f)?;
        let u_lf = self.u_reduced(&lf)?;
        let avals: Vec<C64> =
            self.rule.nodes.iter().map(|&r| a_eigen(self.ctx, C64::new(-0.5, r))).collect();
        let mut sup = 0.0f64;
        let mut worst = 0.0f64;
        for flat in 0..self.cube_size() {
            let idx = self.multi_index(flat);
            // e_k(a(rho_1), ..., a(rho_n))
            let vals: Vec<C64> = idx.iter().map(|&i| avals[i]).collect();
            let mut e = vec![C64::new(0.0, 0.0); self.n + 1];
            e[0] = C64::new(1.0, 0.0);
            for (i, &x) in vals.iter().enumerate() {
                for m in (1..=i + 1).rev() {
                    let lower = e[m - 1];
                    e[m] += x * lower;
                }
            }
            let kr = self.kappa_reduced(&idx);
            let lhs = u_lf[flat] / kr;
            let rhs = e[self.n.min(k)] * u_f[flat] / kr;
            sup = sup.max(rhs.norm());
            worst = worst.max((lhs - rhs).norm());
        }
        Ok(if sup > 0.0 { worst / sup } else { worst })
    }
}

/// Relative sup-norm roundtrip defect of inverse(forward(f)) against f over
/// the support window of f.
pub fn roundtrip_defect(tr: &Transformer, f: &RadialFunction, max_weight: u32) -> Result<f64> {
    let back = tr.inverse(&tr.forward(f)?, max_weight)?;
    let diff = back.add(&f.scale(C64::new(-1.0, 0.0)))?;
    Ok(diff.sup_norm() / f.sup_norm().max(1e-300))
}
