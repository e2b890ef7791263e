use crate::error::{Error, Result};

/// Global numeric context: the deformation parameter `q` and evaluation
/// policies shared by every kernel.
///
/// All downstream evaluations are deterministic functions of their inputs
/// and this context. The context is immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct QContext {
    q: f64,
    /// h = -2 ln q, the spectral half-period scale; rho ranges over [0, pi/h].
    h: f64,
    pub series_tol: f64,
    pub product_tol: f64,
    pub max_terms: usize,
}

impl QContext {
    pub fn new(q: f64) -> Result<Self> {
        Self::with_tolerances(q, 1e-15, 1e-16, 500)
    }

    pub fn with_tolerances(q: f64, series_tol: f64, product_tol: f64, max_terms: usize) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidContext(format!("q must lie in (0,1), got {q}")));
        }
        if !(series_tol > 0.0) || !(product_tol > 0.0) {
            return Err(Error::InvalidContext("tolerances must be strictly positive".into()));
        }
        if max_terms == 0 {
            return Err(Error::InvalidContext("max_terms must be >= 1".into()));
        }
        Ok(QContext { q, h: -2.0 * q.ln(), series_tol, product_tol, max_terms })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn q2(&self) -> f64 {
        self.q * self.q
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Right endpoint pi/h of the principal-series parameter interval.
    #[inline]
    pub fn rho_max(&self) -> f64 {
        std::f64::consts::PI / self.h
    }

    /// q^{-2k} for integer k, the radial grid coordinate.
    #[inline]
    pub fn grid_coord(&self, k: i64) -> f64 {
        self.q.powi(-2 * k as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(QContext::new(0.0).is_err());
        assert!(QContext::new(1.0).is_err());
        assert!(QContext::new(-0.5).is_err());
        assert!(QContext::with_tolerances(0.5, 0.0, 1e-16, 10).is_err());
        assert!(QContext::with_tolerances(0.5, 1e-15, 1e-16, 0).is_err());
    }

    #[test]
    fn derived_quantities() {
        let ctx = QContext::new(0.5).unwrap();
        assert!((ctx.h() - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(ctx.grid_coord(1), 4.0);
        assert_eq!(ctx.grid_coord(0), 1.0);
    }
}
