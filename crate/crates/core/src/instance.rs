//! The on-disk instance format.
//!
//! Row-major dense JSON matrices, no binary format: instances at this scale
//! should be diffable fixtures. `domain_basis` holds spanning vectors as
//! rows; they are orthonormalized on load, so hand-written fixtures do not
//! need to be orthonormal. Weighted inner products are given as per-degree
//! positive diagonal weight vectors and are folded into orthonormal
//! coordinates when the pair is built.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::complex::{GradedSpace, HilbertComplex};
use crate::error::{Error, Result};
use crate::sandwich::{DualityData, SandwichPair};
use crate::subspace::Subspace;
use crate::tol::Tolerance;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorBlock {
    /// `dims[i+1] × dims[i]`, row-major.
    pub action: Vec<Vec<f64>>,
    /// Spanning vectors of 𝒟(L_i), one row per vector.
    pub domain_basis: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityBlock {
    /// φ_i : H_i → H_{n−i}, row-major, one per degree.
    pub phis: Vec<Vec<Vec<f64>>>,
    pub constants: Vec<f64>,
    pub signs: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub version: u32,
    pub scalar: String,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<f64>>>,
    #[serde(rename = "L")]
    pub l: Vec<OperatorBlock>,
    #[serde(rename = "D_domains")]
    pub d_domains: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duality: Option<DualityBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<Tolerance>,
}

fn rows_to_matrix(rows: &[Vec<f64>], nrows: usize, ncols: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != nrows {
        return Err(Error::Format(format!("{what}: {} rows, expected {nrows}", rows.len())));
    }
    let mut m = DMatrix::zeros(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::Format(format!(
                "{what}: row {i} has {} entries, expected {ncols}",
                row.len()
            )));
        }
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = *x;
        }
    }
    Ok(m)
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Spanning rows (possibly none) to a subspace of R^ambient.
fn rows_to_subspace(rows: &[Vec<f64>], ambient: usize, tol: Tolerance, what: &str) -> Result<Subspace> {
    let mut vectors = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ambient {
            return Err(Error::Format(format!(
                "{what}: vector {i} has length {}, expected {ambient}",
                row.len()
            )));
        }
        vectors.push(DVector::from_vec(row.clone()));
    }
    Subspace::from_spanning(&vectors, ambient, tol)
}

/// Basis vectors of a subspace, one row per vector.
pub fn subspace_to_rows(s: &Subspace) -> Vec<Vec<f64>> {
    s.basis()
        .column_iter()
        .map(|c| c.iter().cloned().collect())
        .collect()
}

impl InstanceFile {
    /// Resolve the tolerance: explicit field, else the default.
    pub fn effective_tolerance(&self) -> Result<Tolerance> {
        match self.tolerance {
            Some(t) => Tolerance::new(t.rel_eps, t.abs_floor),
            None => Ok(Tolerance::default()),
        }
    }

    /// Validate the document and build the pair (and duality data, if any),
    /// rescaled into orthonormal coordinates.
    pub fn build(&self) -> Result<(SandwichPair, Option<DualityData>)> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported version {}, expected {FORMAT_VERSION}",
                self.version
            )));
        }
        if self.scalar != "real" {
            return Err(Error::Format(format!("scalar \"{}\" not supported, use \"real\"", self.scalar)));
        }
        if self.dims.is_empty() {
            return Err(Error::Format("dims must be nonempty".into()));
        }
        let n = self.dims.len() - 1;
        if self.l.len() != n {
            return Err(Error::Format(format!("L has {} blocks, expected {n}", self.l.len())));
        }
        if self.d_domains.len() != n {
            return Err(Error::Format(format!(
                "D_domains has {} blocks, expected {n}",
                self.d_domains.len()
            )));
        }
        let tol = self.effective_tolerance()?;

        let weights = match &self.weights {
            Some(ws) => {
                if ws.len() != self.dims.len() {
                    return Err(Error::Format(format!(
                        "{} weight vectors for {} degrees",
                        ws.len(),
                        self.dims.len()
                    )));
                }
                Some(ws.iter().map(|w| DVector::from_vec(w.clone())).collect::<Vec<_>>())
            }
            None => None,
        };

        let mut actions = Vec::with_capacity(n);
        let mut top_domains = Vec::with_capacity(n);
        let mut sub_domains_raw = Vec::with_capacity(n);
        for i in 0..n {
            actions.push(rows_to_matrix(
                &self.l[i].action,
                self.dims[i + 1],
                self.dims[i],
                &format!("L[{i}].action"),
            )?);
            top_domains.push(rows_to_subspace(
                &self.l[i].domain_basis,
                self.dims[i],
                tol,
                &format!("L[{i}].domain_basis"),
            )?);
            sub_domains_raw.push(rows_to_subspace(
                &self.d_domains[i],
                self.dims[i],
                tol,
                &format!("D_domains[{i}]"),
            )?);
        }

        let spaces = GradedSpace::new(self.dims.clone(), weights.clone())?;
        let top = HilbertComplex::new(spaces, actions, top_domains, tol)?;

        // Sub-domains get the same W^{1/2} rescaling the complex applied.
        let scale = |deg: usize| -> DMatrix<f64> {
            match &weights {
                Some(ws) => DMatrix::from_diagonal(&ws[deg].map(f64::sqrt)),
                None => DMatrix::identity(self.dims[deg], self.dims[deg]),
            }
        };
        let unscale = |deg: usize| -> DMatrix<f64> {
            match &weights {
                Some(ws) => DMatrix::from_diagonal(&ws[deg].map(|x| 1.0 / x.sqrt())),
                None => DMatrix::identity(self.dims[deg], self.dims[deg]),
            }
        };
        let sub_domains = sub_domains_raw
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.map(&scale(i)))
            .collect::<Result<Vec<_>>>()?;
        let pair = SandwichPair::new(top, sub_domains)?;

        let duality = match &self.duality {
            Some(block) => {
                if block.phis.len() != n + 1 {
                    return Err(Error::Format(format!(
                        "duality.phis has {} maps for {} degrees",
                        block.phis.len(),
                        n + 1
                    )));
                }
                let mut phis = Vec::with_capacity(n + 1);
                for (i, rows) in block.phis.iter().enumerate() {
                    let raw = rows_to_matrix(
                        rows,
                        self.dims[n - i],
                        self.dims[i],
                        &format!("duality.phis[{i}]"),
                    )?;
                    phis.push(scale(n - i) * raw * unscale(i));
                }
                Some(DualityData {
                    phis,
                    constants: block.constants.clone(),
                    signs: block.signs.clone(),
                })
            }
            None => None,
        };
        Ok((pair, duality))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances are plain data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}
