//! Verification suites: every identity the library asserts, run at
//! configurable sizes, with machine-readable reports.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::context::QContext;
use crate::error::Result;
use crate::measure::{
    inner_product, jackson_q2_integral, norm_constant, point_mass, radial_integral, trace_side_integral,
    RadialFunction,
};
use crate::partitions::{dominance_lt, enumerate_partitions, grid_point, Partition};
use crate::plancherel::{kappa, roundtrip_defect, sigma_total_mass, QuadratureRule, Transformer};
use crate::qdiff::{krylov_rank, krylov_words, l_radial, operator_matrix, span_residual};
use crate::qseries::{box_coeffs, phi_grid_hybrid};
use crate::spherical::{a_eigen, eigen_tuple, multivar_p, phi_multi_integer, JacobiBasis};
use crate::symm::{monomial_sym, schur, vandermonde};

/// Outcome of one verification check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckReport {
    pub check: String,
    pub n: usize,
    pub q: f64,
    pub params: String,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckReport {
    fn new(check: &str, n: usize, q: f64, params: String, defect: f64, tolerance: f64) -> Self {
        CheckReport { check: check.into(), n, q, params, defect, tolerance, pass: defect <= tolerance }
    }
}

/// Sizes for the verification suites.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub n: usize,
    pub max_weight: u32,
    pub quad_panels: usize,
    pub tol_override: Option<f64>,
}

impl VerifyConfig {
    pub fn for_n(n: usize) -> Self {
        VerifyConfig { n, max_weight: 8, quad_panels: if n == 1 { 2048 } else { 256 }, tol_override: None }
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol_override.unwrap_or(default)
    }
}

/// Eigenvalue identity of the one-variable operator: box Phi_l = a(l) Phi_l
/// on the grid, for integer and principal-series l, with Phi evaluated by
/// the route independent of the stencil.
pub fn verify_eigen(ctx: &QContext, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let kmax = 20i64;
    let mut ls: Vec<(String, C64)> =
        [0.0, 1.0, 2.0, 3.0, 5.0].iter().map(|&l| (format!("l={l}"), C64::new(l, 0.0))).collect();
    for frac in [0.1, 0.5, 1.0] {
        let rho = frac * ctx.rho_max() / 2.0;
        ls.push((format!("l=-1/2+i*{rho:.6}"), C64::new(-0.5, rho)));
    }
    for (name, l) in ls {
        let a = a_eigen(ctx, l);
        let vals: Vec<C64> =
            (0..=kmax + 1).map(|k| phi_grid_hybrid(ctx, l, k)).collect::<Result<_>>()?;
        let sup = vals[..=kmax as usize].iter().map(|v| v.norm()).fold(0.0f64, f64::max) * (1.0 + a.norm());
        let mut worst = 0.0f64;
        for k in 0..=kmax {
            let u = ctx.grid_coord(k);
            let (cm, c0, cp) = box_coeffs(ctx, u);
            let mut lhs = cm * vals[(k + 1) as usize] + c0 * vals[k as usize];
            if k > 0 {
                lhs += cp * vals[(k - 1) as usize];
            }
            let rhs = a * vals[k as usize];
            worst = worst.max((lhs - rhs).norm());
        }
        out.push(CheckReport::new("eigen", 1, ctx.q(), name, worst / sup.max(1e-300), cfg.tol(1e-10)));
    }
    // multivariate radial operators on spherical functions
    let n = cfg.n;
    if n >= 2 {
        for lam in enumerate_partitions(n, cfg.max_weight.min(4)) {
            let w = lam.weight() + n as u32 + 2;
            let mut phi = RadialFunction::zero(n);
            for mu in enumerate_partitions(n, w) {
                let u = grid_point(&mu, ctx);
                phi.set(mu, phi_multi_integer(ctx, &lam, &u)?)?;
            }
            for k in 1..=n {
                let target = eigen_tuple(ctx, &lam, k)?;
                let lphi = l_radial(ctx, k, &phi)?;
                let mut sup = 0.0f64;
                let mut worst = 0.0f64;
                for mu in enumerate_partitions(n, w - n as u32) {
                    sup = sup.max(phi.value(&mu).norm());
                    worst = worst.max((lphi.value(&mu) - phi.value(&mu) * target).norm());
                }
                let defect = worst / (sup * (1.0 + target.abs())).max(1e-300);
                out.push(CheckReport::new(
                    "eigen-radial",
                    n,
                    ctx.q(),
                    format!("lambda={lam} k={k}"),
                    defect,
                    cfg.tol(1e-9),
                ));
            }
        }
    }
    Ok(out)
}

/// Orthogonality of the multivariate polynomials under the base-q^2 Jackson
/// measure with Vandermonde-squared weight, normalized by the geometric mean
/// of the diagonal norms.
pub fn verify_orthogonality(ctx: &QContext, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let wmax = cfg.max_weight.min(3);
    let jackson_window = tail_window(ctx);
    for n in 1..=cfg.n {
        let basis = JacobiBasis::new(ctx, (wmax as usize + n).max(8));
        let lams = enumerate_partitions(n, wmax);
        let pval = |lam: &Partition, z: &[f64]| -> C64 {
            let zc: Vec<C64> = z.iter().map(|&x| C64::new(x, 0.0)).collect();
            multivar_p(&basis, lam, &zc).unwrap()
        };
        let norms: Vec<f64> = lams
            .iter()
            .map(|lam| {
                jackson_q2_integral(
                    |z| {
                        let v = pval(lam, z);
                        let d = vandermonde(z);
                        v * v.conj() * (d * d)
                    },
                    n,
                    ctx,
                    jackson_window,
                )
                .value
                .re
            })
            .collect();
        let mnorms: Vec<f64> = lams
            .iter()
            .map(|lam| {
                jackson_q2_integral(
                    |z| {
                        let zc: Vec<C64> = z.iter().map(|&x| C64::new(x, 0.0)).collect();
                        let v = monomial_sym(lam, &zc).unwrap();
                        let d = vandermonde(z);
                        v * v.conj() * (d * d)
                    },
                    n,
                    ctx,
                    jackson_window,
                )
                .value
                .re
            })
            .collect();
        let mut worst_pm = 0.0f64;
        let mut worst_pp = 0.0f64;
        for (i, lam) in lams.iter().enumerate() {
            for (j, eta) in lams.iter().enumerate() {
                if i == j {
                    continue;
                }
                if dominance_lt(eta, lam)? {
                    let o = jackson_q2_integral(
                        |z| {
                            let zc: Vec<C64> = z.iter().map(|&x| C64::new(x, 0.0)).collect();
                            pval(lam, z) * monomial_sym(eta, &zc).unwrap() * {
                                let d = vandermonde(z);
                                C64::new(d * d, 0.0)
                            }
                        },
                        n,
                        ctx,
                        jackson_window,
                    )
                    .value;
                    worst_pm = worst_pm.max(o.norm() / (norms[i] * mnorms[j]).sqrt());
                }
                let o = jackson_q2_integral(
                    |z| {
                        pval(lam, z) * pval(eta, z) * {
                            let d = vandermonde(z);
                            C64::new(d * d, 0.0)
                        }
                    },
                    n,
                    ctx,
                    jackson_window,
                )
                .value;
                worst_pp = worst_pp.max(o.norm() / (norms[i] * norms[j]).sqrt());
            }
        }
        out.push(CheckReport::new(
            "orthogonality-monomial",
            n,
            ctx.q(),
            format!("|lambda|<={wmax}, eta<lambda"),
            worst_pm,
            cfg.tol(1e-10),
        ));
        out.push(CheckReport::new(
            "orthogonality-full",
            n,
            ctx.q(),
            format!("|lambda|,|mu|<={wmax}"),
            worst_pp,
            cfg.tol(1e-10),
        ));
    }
    Ok(out)
}

fn tail_window(ctx: &QContext) -> u32 {
    // weight W with q^{2W} below roundoff of the leading node contributions
    let w = (-40.0 / ctx.q2().ln()).ceil() as u32;
    w.clamp(20, 400)
}

/// Trace-side versus Jackson-side evaluation of the invariant integral.
pub fn verify_trace(ctx: &QContext, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 1..=cfg.n {
        let mut f = RadialFunction::zero(n);
        for lam in enumerate_partitions(n, cfg.max_weight.min(6)) {
            f.set(lam, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))?;
        }
        let a = radial_integral(&f, ctx);
        let b = trace_side_integral(&f, ctx)?;
        out.push(CheckReport::new(
            "trace-vs-jackson",
            n,
            ctx.q(),
            format!("random f, |lambda|<={}", cfg.max_weight.min(6)),
            (a - b).norm() / a.norm().max(1e-300),
            cfg.tol(1e-12),
        ));
        let f0 = RadialFunction::f0(n);
        let expect = (1.0 - ctx.q2()).powi((n * n) as i32);
        let v = radial_integral(&f0, ctx).re;
        out.push(CheckReport::new(
            "integral-of-f0",
            n,
            ctx.q(),
            "f0".into(),
            (v - expect).abs() / expect,
            cfg.tol(1e-14),
        ));
    }
    Ok(out)
}

/// kappa structure: reality, antisymmetric factorization with constant
/// ratio, and the measured ratio against the printed closed form.
pub fn verify_kappa(ctx: &QContext, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=cfg.n.max(2) {
        let mut ratios = Vec::new();
        let mut worst_im = 0.0f64;
        for _ in 0..50 {
            let mut rho: Vec<f64> = (0..n).map(|_| rng.gen_range(0.02..0.98) * ctx.rho_max()).collect();
            rho.sort_by(|a, b| b.partial_cmp(a).unwrap());
            // keep coordinates separated so the ratio is well conditioned
            let mut ok = true;
            for i in 0..n - 1 {
                if (rho[i] - rho[i + 1]).abs() < 0.02 * ctx.rho_max() {
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            let k = kappa(ctx, &rho)?;
            worst_im = worst_im.max(k.im.abs() / k.norm().max(1e-300));
            let xs: Vec<f64> = rho.iter().map(|&r| 2.0 * (ctx.h() * r).cos()).collect();
            let mut prod = 1.0;
            for a in 0..n {
                for b in a + 1..n {
                    prod *= xs[b] - xs[a];
                }
            }
            ratios.push(k.re / prod);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let var = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / ratios.len() as f64;
        out.push(CheckReport::new(
            "kappa-factorization",
            n,
            ctx.q(),
            format!("{} samples; measured ratio {:.12e}; printed-constant deviation (1-q^2)^(n^2)/N = {:.6e}",
                ratios.len(),
                mean,
                (1.0 - ctx.q2()).powi((n * n) as i32) / norm_constant(n, ctx)),
            var.sqrt() / mean.abs(),
            cfg.tol(1e-8),
        ));
        out.push(CheckReport::new("kappa-reality", n, ctx.q(), "50 samples".into(), worst_im, cfg.tol(1e-12)));
        // coincident coordinates: exact zero
        let rho0 = 0.4 * ctx.rho_max();
        let mut rho = vec![rho0; n];
        for (i, r) in rho.iter_mut().enumerate().skip(2) {
            *r = (0.1 + 0.07 * i as f64) * ctx.rho_max();
        }
        let k = kappa(ctx, &rho)?;
        out.push(CheckReport::new("kappa-diagonal-zero", n, ctx.q(), "rho1=rho2".into(), k.norm(), 0.0));
    }
    Ok(out)
}

/// Plancherel checks: d sigma mass, Parseval defects, ratio constancy, total
/// d Sigma mass, and transform roundtrips.
pub fn verify_parseval(ctx: &QContext, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let n = cfg.n;
    let rule = QuadratureRule::composite_simpson(ctx, cfg.quad_panels)?;
    let mass = sigma_total_mass(ctx, &rule)?;
    let expect = 1.0 / (1.0 - ctx.q2());
    out.push(CheckReport::new(
        "sigma-total-mass",
        1,
        ctx.q(),
        format!("M={}", cfg.quad_panels),
        (mass - expect).abs() / expect,
        cfg.tol(1e-7),
    ));

    let wmax = if n == 1 { cfg.max_weight.min(10) } else { cfg.max_weight.min(2) };
    let tr = Transformer::new(ctx, n, rule, wmax + 1)?;
    let lams = enumerate_partitions(n, wmax);
    let mut worst = 0.0f64;
    let mut ratios = Vec::new();
    for (i, li) in lams.iter().enumerate() {
        for lj in lams.iter().skip(i) {
            let f = RadialFunction::indicator(li.clone());
            let g = RadialFunction::indicator(lj.clone());
            let d = tr.parseval_defect(&f, &g)?;
            worst = worst.max(d);
            if li == lj {
                let nu = inner_product(&f, &f, ctx)?.re;
                ratios.push(tr.parseval_product(&f, &f)?.re / nu);
            }
        }
    }
    let tol = cfg.tol(if n == 1 { 1e-6 } else { 1e-5 });
    out.push(CheckReport::new(
        "parseval-defect",
        n,
        ctx.q(),
        format!("all pairs |lambda|<={wmax}, M={}", cfg.quad_panels),
        worst,
        tol,
    ));
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let var = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / ratios.len() as f64;
    out.push(CheckReport::new(
        "parseval-ratio-constancy",
        n,
        ctx.q(),
        format!(
            "mean ratio {:.12}; printed-constant deviation n!*N^2 = {:.6e}",
            mean,
            (1..=n).map(|i| i as f64).product::<f64>() * norm_constant(n, ctx) * norm_constant(n, ctx)
        ),
        var,
        cfg.tol(1e-6),
    ));
    let mass = tr.big_sigma_total_mass()?;
    let expect = (1.0 - ctx.q2()).powi((n * n) as i32);
    out.push(CheckReport::new(
        "big-sigma-total-mass",
        n,
        ctx.q(),
        format!("M={}", cfg.quad_panels),
        (mass - expect).abs() / expect,
        cfg.tol(if n == 1 { 1e-7 } else { 1e-5 }),
    ));
    let probe = if n == 1 { Partition::new(vec![1]).unwrap() } else { lams[1].clone() };
    let d = roundtrip_defect(&tr, &RadialFunction::indicator(probe.clone()), wmax)?;
    out.push(CheckReport::new(
        "roundtrip",
        n,
        ctx.q(),
        format!("chi_{probe}"),
        d,
        cfg.tol(if n == 1 { 1e-6 } else { 1e-5 }),
    ));
    Ok(out)
}

/// Quadrature-free intertwining: F(L_k f) = e_k(a(-1/2 + i rho)) F f on
/// every node.
pub fn verify_intertwine(ctx: &QContext, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for n in 1..=cfg.n.min(2) {
        let rule = QuadratureRule::composite_simpson(ctx, cfg.quad_panels.min(256))?;
        let tr = Transformer::new(ctx, n, rule, 6)?;
        let mut probes = vec![RadialFunction::f0(n)];
        let second = enumerate_partitions(n, 2).pop().unwrap();
        probes.push(RadialFunction::indicator(second));
        for k in 1..=n {
            for (i, f) in probes.iter().enumerate() {
                let d = tr.intertwine_defect(k, f)?;
                out.push(CheckReport::new(
                    "intertwine",
                    n,
                    ctx.q(),
                    format!("k={k} probe={i}"),
                    d,
                    cfg.tol(1e-8),
                ));
            }
        }
    }
    Ok(out)
}

/// Cyclicity of f0: the depth-d Krylov span has the full polynomial-algebra
/// dimension and contains every indicator in the matching window.
pub fn verify_cyclicity(ctx: &QContext, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let n = cfg.n.min(2);
    let depth = 3usize;
    let rank = krylov_rank(ctx, n, depth, cfg.max_weight.max(8))?;
    let expected = expected_krylov_rank(n, depth);
    out.push(CheckReport::new(
        "krylov-rank",
        n,
        ctx.q(),
        format!("depth={depth} rank={rank} expected={expected}"),
        (rank as f64 - expected as f64).abs(),
        0.0,
    ));
    let words = krylov_words(ctx, n, depth)?;
    let mut worst = 0.0f64;
    for lam in enumerate_partitions(n, depth as u32) {
        worst = worst.max(span_residual(&words, &RadialFunction::indicator(lam)));
    }
    out.push(CheckReport::new(
        "cyclicity-span",
        n,
        ctx.q(),
        format!("chi_lambda, |lambda|<={depth} inside depth-{depth} span"),
        worst,
        cfg.tol(1e-9),
    ));
    Ok(out)
}

/// Dimension of the space of polynomials of degree <= depth in n commuting
/// generators: the exact Krylov rank of words of length <= depth on the
/// cyclic vector.
pub fn expected_krylov_rank(n: usize, depth: usize) -> usize {
    // C(depth + n, n)
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 1..=n {
        num *= depth + i;
        den *= i;
    }
    num / den
}

/// Structural invariants: band support, weighted self-adjointness,
/// commutators, Schur specialization, sigma-point injectivity.
pub fn verify_structural(ctx: &QContext, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for n in 1..=cfg.n {
        for k in 1..=n {
            let op = operator_matrix(ctx, n, k, cfg.max_weight.min(6))?;
            out.push(CheckReport::new(
                "band-structure",
                n,
                ctx.q(),
                format!("k={k} exact"),
                if op.band_structure_exact() { 0.0 } else { 1.0 },
                0.0,
            ));
            out.push(CheckReport::new(
                "self-adjointness",
                n,
                ctx.q(),
                format!("k={k} interior"),
                op.self_adjointness_defect(ctx),
                cfg.tol(1e-11),
            ));
        }
    }
    // commutators on a random function
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for n in 2..=cfg.n.max(2) {
        let mut f = RadialFunction::zero(n);
        for lam in enumerate_partitions(n, 3) {
            f.set(lam, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))?;
        }
        let mut worst = 0.0f64;
        for j in 1..=n {
            for k in j + 1..=n {
                let a = l_radial(ctx, k, &l_radial(ctx, j, &f)?)?;
                let b = l_radial(ctx, j, &l_radial(ctx, k, &f)?)?;
                let diff = a.add(&b.scale(C64::new(-1.0, 0.0)))?;
                worst = worst.max(diff.sup_norm() / a.sup_norm().max(1e-300));
            }
        }
        out.push(CheckReport::new("commutator", n, ctx.q(), "random f, |lambda|<=3".into(), worst, cfg.tol(1e-10)));
    }
    // Schur specialization
    for n in 2..=cfg.n.max(2) {
        let z0: Vec<C64> = grid_point(&Partition::zero(n), ctx).iter().map(|&x| C64::new(x, 0.0)).collect();
        let d0 = vandermonde(&grid_point(&Partition::zero(n), ctx));
        let mut worst = 0.0f64;
        for lam in enumerate_partitions(n, cfg.max_weight.min(6)) {
            let lhs = schur(&lam, &z0)?.re;
            let rhs = vandermonde(&grid_point(&lam, ctx)) / d0;
            worst = worst.max((lhs - rhs).abs() / rhs.abs());
        }
        out.push(CheckReport::new("schur-specialization", n, ctx.q(), "window".into(), worst, cfg.tol(1e-10)));
    }
    // sigma-point injectivity (exhaustive on the window)
    for n in 1..=cfg.n {
        let win = enumerate_partitions(n, cfg.max_weight.min(6));
        let pts: Vec<Vec<f64>> = win.iter().map(|l| crate::partitions::sigma_point(l, ctx)).collect();
        let mut injective = true;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b).abs()).sum();
                if d <= 1e-12 * pts[i].iter().map(|x| x.abs()).sum::<f64>().max(1.0) {
                    injective = false;
                }
            }
        }
        out.push(CheckReport::new(
            "sigma-point-injectivity",
            n,
            ctx.q(),
            format!("exhaustive |lambda|<={}", cfg.max_weight.min(6)),
            if injective { 0.0 } else { 1.0 },
            0.0,
        ));
        // point masses strictly positive
        let positive = win.iter().all(|l| point_mass(l, ctx) > 0.0);
        out.push(CheckReport::new(
            "point-mass-positive",
            n,
            ctx.q(),
            "window".into(),
            if positive { 0.0 } else { 1.0 },
            0.0,
        ));
    }
    Ok(out)
}

/// Run a named suite ("all" runs everything).
pub fn run_suite(ctx: &QContext, cfg: &VerifyConfig, suite: &str) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let all = suite == "all";
    if all || suite == "eigen" {
        out.extend(verify_eigen(ctx, cfg)?);
    }
    if all || suite == "orthogonality" {
        out.extend(verify_orthogonality(ctx, cfg)?);
    }
    if all || suite == "trace" {
        out.extend(verify_trace(ctx, cfg)?);
    }
    if all || suite == "kappa" {
        out.extend(verify_kappa(ctx, cfg)?);
    }
    if all || suite == "parseval" {
        out.extend(verify_parseval(ctx, cfg)?);
    }
    if all || suite == "intertwine" {
        out.extend(verify_intertwine(ctx, cfg)?);
    }
    if all || suite == "cyclicity" {
        out.extend(verify_cyclicity(ctx, cfg)?);
    }
    if all || suite == "structural" {
        out.extend(verify_structural(ctx, cfg)?);
    }
    if out.is_empty() {
        return Err(crate::error::Error::InvalidInput(format!("unknown verification suite '{suite}'")));
    }
    Ok(out)
}
