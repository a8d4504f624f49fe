//! Rank tolerance carried by every subspace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Singular-value cutoff policy for rank decisions.
///
/// The effective cutoff on a matrix with largest singular value `sigma_max`
/// is `rel_eps * sigma_max`, floored at `abs_floor`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel_eps: f64,
    pub abs_floor: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel_eps: 1e-10, abs_floor: 1e-13 }
    }
}

impl Tolerance {
    pub fn new(rel_eps: f64, abs_floor: f64) -> Result<Self> {
        if !(rel_eps > 0.0) || !(abs_floor > 0.0) {
            return Err(Error::InvalidTolerance(format!(
                "rel_eps and abs_floor must be positive, got {rel_eps} / {abs_floor}"
            )));
        }
        Ok(Tolerance { rel_eps, abs_floor })
    }

    /// Cutoff for singular values of a matrix whose largest one is `sigma_max`.
    pub fn cutoff(&self, sigma_max: f64) -> f64 {
        (self.rel_eps * sigma_max).max(self.abs_floor)
    }

    /// Mixed-tolerance operations pick the looser of the two policies.
    pub fn merge(&self, other: &Tolerance) -> Tolerance {
        Tolerance {
            rel_eps: self.rel_eps.max(other.rel_eps),
            abs_floor: self.abs_floor.max(other.abs_floor),
        }
    }

    /// Threshold for principal-angle tests (containment, subspace equality).
    ///
    /// Two orders of magnitude above `rel_eps`: room for the accumulation a
    /// chain of orthonormalizations produces. 1e-8 at the default tolerance.
    pub fn angle_tol(&self) -> f64 {
        (self.rel_eps * 100.0).max(self.abs_floor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_is_floored() {
        let tol = Tolerance::default();
        assert_eq!(tol.cutoff(0.0), 1e-13);
        assert!((tol.cutoff(10.0) - 1e-9).abs() < 1e-24);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(Tolerance::new(0.0, 1e-13).is_err());
        assert!(Tolerance::new(1e-10, -1.0).is_err());
        assert!(Tolerance::new(f64::NAN, 1e-13).is_err());
    }

    #[test]
    fn merge_takes_the_looser() {
        let a = Tolerance::new(1e-10, 1e-13).unwrap();
        let b = Tolerance::new(1e-8, 1e-14).unwrap();
        let m = a.merge(&b);
        assert_eq!(m.rel_eps, 1e-8);
        assert_eq!(m.abs_floor, 1e-13);
    }
}
