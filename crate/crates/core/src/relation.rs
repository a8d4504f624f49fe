//! Closed linear relations: subspaces of H_a ⊕ H_b treated as multivalued
//! partial maps.
//!
//! A partial operator with a non-dense (in finite dimension: non-full) domain
//! has no adjoint operator, but it always has an adjoint relation. The graph
//! convention is `(source, target)` with the source block first. The adjoint
//! is the orthogonal complement of τ(G), τ(u, u′) = (u′, −u), so that
//!
//! * ker(G*) = (ran G)⊥, mul(G*) = (dom G)⊥, dom(G*) = (mul G)⊥,
//! * dim G + dim G* = dim H_a + dim H_b,
//! * G** = G.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::subspace::Subspace;
use crate::tol::Tolerance;

#[derive(Clone, Debug)]
pub struct LinearRelation {
    dim_a: usize,
    dim_b: usize,
    graph: Subspace,
}

impl LinearRelation {
    pub fn from_graph(dim_a: usize, dim_b: usize, graph: Subspace) -> Result<Self> {
        if graph.ambient_dim() != dim_a + dim_b {
            return Err(Error::DimensionMismatch(format!(
                "graph lives in R^{}, expected R^{}",
                graph.ambient_dim(),
                dim_a + dim_b
            )));
        }
        Ok(LinearRelation { dim_a, dim_b, graph })
    }

    /// Graph of `action` restricted to `domain`: span of (u, action·u).
    pub fn from_operator(action: &DMatrix<f64>, domain: &Subspace) -> Result<Self> {
        if action.ncols() != domain.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "action takes R^{}, domain lives in R^{}",
                action.ncols(),
                domain.ambient_dim()
            )));
        }
        let (dim_a, dim_b) = (action.ncols(), action.nrows());
        let mut cols = Vec::with_capacity(domain.dim());
        for u in domain.basis().column_iter() {
            let v = action * u;
            cols.push(stack(&u.into_owned(), &v));
        }
        let graph = Subspace::from_spanning(&cols, dim_a + dim_b, domain.tol())?;
        Ok(LinearRelation { dim_a, dim_b, graph })
    }

    /// Full-domain operator.
    pub fn from_matrix(action: &DMatrix<f64>, tol: Tolerance) -> Self {
        let domain = Subspace::full(action.ncols(), tol);
        LinearRelation::from_operator(action, &domain).expect("full domain always fits")
    }

    pub fn identity(n: usize, tol: Tolerance) -> Self {
        LinearRelation::from_matrix(&DMatrix::identity(n, n), tol)
    }

    /// The zero relation {0} ⊆ H_a ⊕ H_b.
    pub fn zero(dim_a: usize, dim_b: usize, tol: Tolerance) -> Self {
        LinearRelation { dim_a, dim_b, graph: Subspace::zero(dim_a + dim_b, tol) }
    }

    /// The everywhere-defined zero map H_a → H_b.
    pub fn zero_map(dim_a: usize, dim_b: usize, tol: Tolerance) -> Self {
        LinearRelation::from_matrix(&DMatrix::zeros(dim_b, dim_a), tol)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    pub fn tol(&self) -> Tolerance {
        self.graph.tol()
    }

    /// {(v, w) : ⟨u′, v⟩ = ⟨u, w⟩ for all (u, u′) ∈ G} = (τ G)⊥.
    pub fn adjoint(&self) -> LinearRelation {
        let (a, b) = (self.dim_a, self.dim_b);
        let g = self.graph.basis();
        let mut swapped = DMatrix::zeros(a + b, g.ncols());
        for (j, col) in g.column_iter().enumerate() {
            for i in 0..b {
                swapped[(i, j)] = col[a + i];
            }
            for i in 0..a {
                swapped[(b + i, j)] = -col[i];
            }
        }
        let tau = Subspace::from_columns(&swapped, self.tol());
        LinearRelation { dim_a: b, dim_b: a, graph: tau.complement() }
    }

    /// First-block image: {u : ∃v, (u, v) ∈ G}.
    pub fn domain(&self) -> Subspace {
        let top = self.graph.basis().rows(0, self.dim_a).into_owned();
        Subspace::from_columns(&top, self.tol())
    }

    /// Second-block image: {v : ∃u, (u, v) ∈ G}.
    pub fn range(&self) -> Subspace {
        let bot = self.graph.basis().rows(self.dim_a, self.dim_b).into_owned();
        Subspace::from_columns(&bot, self.tol())
    }

    /// {u : (u, 0) ∈ G}.
    pub fn kernel(&self) -> Subspace {
        let source_block = block_subspace(self.dim_a, self.dim_b, true, self.tol());
        let inter = self
            .graph
            .intersect(&source_block)
            .expect("same ambient by construction");
        let top = inter.basis().rows(0, self.dim_a).into_owned();
        Subspace::from_columns(&top, self.tol())
    }

    /// Multivalued part {v : (0, v) ∈ G}.
    pub fn mul(&self) -> Subspace {
        let target_block = block_subspace(self.dim_a, self.dim_b, false, self.tol());
        let inter = self
            .graph
            .intersect(&target_block)
            .expect("same ambient by construction");
        let bot = inter.basis().rows(self.dim_a, self.dim_b).into_owned();
        Subspace::from_columns(&bot, self.tol())
    }

    pub fn is_single_valued(&self) -> bool {
        self.mul().dim() == 0
    }

    /// {(u, w) : ∃v, (u, v) ∈ self, (v, w) ∈ after}; both relations are
    /// lifted into H_a ⊕ H_b ⊕ H_c, intersected, and the middle block dropped.
    pub fn compose(&self, after: &LinearRelation) -> Result<LinearRelation> {
        if self.dim_b != after.dim_a {
            return Err(Error::DimensionMismatch(format!(
                "composition: inner dimensions {} vs {}",
                self.dim_b, after.dim_a
            )));
        }
        let (a, b, c) = (self.dim_a, self.dim_b, after.dim_b);
        let tol = self.tol().merge(&after.tol());
        let total = a + b + c;

        // self's graph at blocks (a, b), free c-block.
        let mut cols1 = Vec::new();
        for g in self.graph.basis().column_iter() {
            cols1.push(embed(&g.into_owned(), &[(0, a + b)], total));
        }
        for i in 0..c {
            cols1.push(unit(total, a + b + i));
        }
        let x1 = Subspace::from_spanning(&cols1, total, tol)?;

        // after's graph at blocks (b, c), free a-block.
        let mut cols2 = Vec::new();
        for g in after.graph.basis().column_iter() {
            cols2.push(embed(&g.into_owned(), &[(a, b + c)], total));
        }
        for i in 0..a {
            cols2.push(unit(total, i));
        }
        let x2 = Subspace::from_spanning(&cols2, total, tol)?;

        let z = x1.intersect(&x2)?;
        let mut outer = DMatrix::zeros(a + c, z.dim());
        for (j, col) in z.basis().column_iter().enumerate() {
            for i in 0..a {
                outer[(i, j)] = col[i];
            }
            for i in 0..c {
                outer[(a + i, j)] = col[a + b + i];
            }
        }
        Ok(LinearRelation { dim_a: a, dim_b: c, graph: Subspace::from_columns(&outer, tol) })
    }

    /// {(u, v + w) : (u, v) ∈ self, (u, w) ∈ other}.
    pub fn relation_sum(&self, other: &LinearRelation) -> Result<LinearRelation> {
        if self.dim_a != other.dim_a || self.dim_b != other.dim_b {
            return Err(Error::DimensionMismatch(format!(
                "relation sum: shapes ({},{}) vs ({},{})",
                self.dim_a, self.dim_b, other.dim_a, other.dim_b
            )));
        }
        let (a, b) = (self.dim_a, self.dim_b);
        let tol = self.tol().merge(&other.tol());
        let total = a + b + b;

        // (u, v, *) with (u, v) ∈ self.
        let mut cols1 = Vec::new();
        for g in self.graph.basis().column_iter() {
            cols1.push(embed(&g.into_owned(), &[(0, a + b)], total));
        }
        for i in 0..b {
            cols1.push(unit(total, a + b + i));
        }
        let y1 = Subspace::from_spanning(&cols1, total, tol)?;

        // (u, *, w) with (u, w) ∈ other.
        let mut cols2 = Vec::new();
        for g in other.graph.basis().column_iter() {
            let gc = g.into_owned();
            let mut v = DVector::zeros(total);
            for i in 0..a {
                v[i] = gc[i];
            }
            for i in 0..b {
                v[a + b + i] = gc[a + i];
            }
            cols2.push(v);
        }
        for i in 0..b {
            cols2.push(unit(total, a + i));
        }
        let y2 = Subspace::from_spanning(&cols2, total, tol)?;

        let z = y1.intersect(&y2)?;
        let mut summed = DMatrix::zeros(a + b, z.dim());
        for (j, col) in z.basis().column_iter().enumerate() {
            for i in 0..a {
                summed[(i, j)] = col[i];
            }
            for i in 0..b {
                summed[(a + i, j)] = col[a + i] + col[a + b + i];
            }
        }
        Ok(LinearRelation { dim_a: a, dim_b: b, graph: Subspace::from_columns(&summed, tol) })
    }

    /// Does (u, v) belong to the relation, up to the angle tolerance?
    pub fn contains_pair(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<bool> {
        Ok(self.pair_defect(u, v)? <= self.tol().angle_tol())
    }

    /// Distance of the normalized stacked pair from the graph.
    pub fn pair_defect(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        if u.len() != self.dim_a || v.len() != self.dim_b {
            return Err(Error::DimensionMismatch(format!(
                "pair has shape ({}, {}), relation is ({}, {})",
                u.len(),
                v.len(),
                self.dim_a,
                self.dim_b
            )));
        }
        let w = stack(u, v);
        let norm = w.norm();
        if norm <= self.tol().abs_floor {
            return Ok(0.0);
        }
        let res = &w - self.graph.project(&w)?;
        Ok(res.norm() / norm)
    }

    /// Graph equality as a principal-angle defect.
    pub fn graph_defect(&self, other: &LinearRelation) -> Result<f64> {
        self.graph.equality_defect(&other.graph)
    }

    pub fn is_equal(&self, other: &LinearRelation) -> Result<bool> {
        self.graph.is_equal(&other.graph)
    }

    /// Graph intersection: the largest relation contained in both.
    pub fn meet(&self, other: &LinearRelation) -> Result<LinearRelation> {
        if self.dim_a != other.dim_a || self.dim_b != other.dim_b {
            return Err(Error::DimensionMismatch("meet of relations of different shapes".into()));
        }
        Ok(LinearRelation {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            graph: self.graph.intersect(&other.graph)?,
        })
    }

    /// Graph span: the smallest relation containing both. May be multivalued
    /// even when both inputs are single-valued.
    pub fn join(&self, other: &LinearRelation) -> Result<LinearRelation> {
        if self.dim_a != other.dim_a || self.dim_b != other.dim_b {
            return Err(Error::DimensionMismatch("join of relations of different shapes".into()));
        }
        Ok(LinearRelation {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            graph: self.graph.sum(&other.graph)?,
        })
    }

    /// Conjugate the relation by matrices: {(P·u, Q·v) : (u, v) ∈ G}.
    pub fn map_blocks(&self, p: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<LinearRelation> {
        if p.ncols() != self.dim_a || q.ncols() != self.dim_b {
            return Err(Error::DimensionMismatch(
                "block map shapes do not match the relation".into(),
            ));
        }
        let mut cols = Vec::with_capacity(self.graph.dim());
        for g in self.graph.basis().column_iter() {
            let u = g.rows(0, self.dim_a).into_owned();
            let v = g.rows(self.dim_a, self.dim_b).into_owned();
            cols.push(stack(&(p * u), &(q * v)));
        }
        let graph = Subspace::from_spanning(&cols, p.nrows() + q.nrows(), self.tol())?;
        Ok(LinearRelation { dim_a: p.nrows(), dim_b: q.nrows(), graph })
    }
}

/// Stack two vectors into one.
pub fn stack(u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let mut w = DVector::zeros(u.len() + v.len());
    w.rows_mut(0, u.len()).copy_from(u);
    w.rows_mut(u.len(), v.len()).copy_from(v);
    w
}

/// Copy a vector into a larger zero vector, each piece at its offset.
/// `pieces` lists (target_offset, length) consuming the source in order.
fn embed(src: &DVector<f64>, pieces: &[(usize, usize)], total: usize) -> DVector<f64> {
    let mut out = DVector::zeros(total);
    let mut read = 0;
    for &(off, len) in pieces {
        for i in 0..len {
            out[off + i] = src[read + i];
        }
        read += len;
    }
    out
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

/// H_a ⊕ 0 (source = true) or 0 ⊕ H_b inside the product.
fn block_subspace(dim_a: usize, dim_b: usize, source: bool, tol: Tolerance) -> Subspace {
    let total = dim_a + dim_b;
    let (off, len) = if source { (0, dim_a) } else { (dim_a, dim_b) };
    let mut m = DMatrix::zeros(total, len);
    for i in 0..len {
        m[(off + i, i)] = 1.0;
    }
    Subspace::from_columns(&m, tol)
}
