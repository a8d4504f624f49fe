//! Instance generators: random nested pairs, φ-self-dual pairs with duality
//! data, and weighted grid/cone cochain pairs whose relative ⊆ absolute
//! boundary conditions stand in for the minimal ⊆ maximal extension pair.
//!
//! Every generator is deterministic given its seed and emits an
//! [`InstanceFile`]; the numeric content of an instance is identical across
//! runs and platforms up to the determinism of IEEE 754 arithmetic.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{matrix_to_rows, subspace_to_rows, DualityBlock, InstanceFile, OperatorBlock};
use crate::relation::LinearRelation;
use crate::sandwich::{check_complementary, check_extension, SandwichPair};
use crate::subspace::{spectral_norm, Subspace};
use crate::tol::Tolerance;

const RETRY_BUDGET: usize = 1000;

#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub length: usize,
    pub domain_codim_range: (usize, usize),
    pub scalar_range: (f64, f64),
}

impl GeneratorSpec {
    pub fn new(seed: u64, dims: Vec<usize>, domain_codim_range: (usize, usize)) -> Self {
        let length = dims.len().saturating_sub(1);
        GeneratorSpec { seed, dims, length, domain_codim_range, scalar_range: (-2.0, 2.0) }
    }

    fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.len() != self.length + 1 {
            return Err(Error::Contract(format!(
                "dims has {} entries for length {}",
                self.dims.len(),
                self.length
            )));
        }
        if self.dims.contains(&0) {
            return Err(Error::Contract("dims must be positive".into()));
        }
        if self.domain_codim_range.0 > self.domain_codim_range.1 {
            return Err(Error::Contract("empty codimension range".into()));
        }
        if !(self.scalar_range.0 < self.scalar_range.1) {
            return Err(Error::Contract("empty scalar range".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMode {
    OneEnd,
    TwoEnds,
}

#[derive(Clone, Debug)]
pub struct GridSpec {
    pub cells: usize,
    pub weight_exponent: f64,
    pub boundary_mode: BoundaryMode,
}

fn rand_in(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    range.0 + (range.1 - range.0) * rng.gen::<f64>()
}

fn rand_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, range: (f64, f64)) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rand_in(rng, range))
}

fn rand_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let m = rand_matrix(rng, n, n, (-1.0, 1.0));
    let qr = m.qr();
    qr.q()
}

fn rand_subspace(rng: &mut ChaCha8Rng, ambient: usize, dim: usize, tol: Tolerance) -> Subspace {
    if dim == 0 {
        return Subspace::zero(ambient, tol);
    }
    let q = rand_orthogonal(rng, ambient);
    Subspace::from_columns(&q.columns(0, dim).into_owned(), tol)
}

/// A subspace with lower ⊆ result ⊆ upper and the given dimension, drawn by
/// extending lower with random directions inside upper.
fn rand_subspace_between(
    rng: &mut ChaCha8Rng,
    lower: &Subspace,
    upper: &Subspace,
    dim: usize,
    tol: Tolerance,
) -> Result<Subspace> {
    if dim < lower.dim() || dim > upper.dim() {
        return Err(Error::Contract(format!(
            "target dim {dim} outside [{}, {}]",
            lower.dim(),
            upper.dim()
        )));
    }
    if dim == 0 {
        return Ok(Subspace::zero(lower.ambient_dim(), tol));
    }
    let p = upper.dim();
    // Coordinates of lower inside upper's frame: orthonormal columns.
    let mut cols: Vec<DVector<f64>> = (upper.basis().transpose() * lower.basis())
        .column_iter()
        .map(|c| c.into_owned())
        .collect();
    let mut guard = 0;
    while cols.len() < dim {
        let mut v = DVector::from_fn(p, |_, _| rand_in(rng, (-1.0, 1.0)));
        for c in &cols {
            let dot = c.dot(&v);
            v -= c * dot;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            cols.push(v / norm);
        }
        guard += 1;
        if guard > 100 * dim.max(1) {
            return Err(Error::Generator {
                tries: guard,
                message: "could not extend basis".into(),
            });
        }
    }
    let coord = DMatrix::from_columns(&cols);
    // Re-orthonormalize: lower's coordinates are orthonormal only up to the
    // containment tolerance.
    Ok(Subspace::from_columns(&(upper.basis() * coord), tol))
}

/// Nullspace of an ambient matrix: complement of the row space.
fn nullspace(m: &DMatrix<f64>, tol: Tolerance) -> Subspace {
    Subspace::from_columns(&m.transpose(), tol).complement()
}

/// Random nested sandwich pair. The top chain is built from nested random
/// images (guaranteeing L∘L = 0 at the matrix level), top domains contain the
/// previous image, and sub-domains are drawn forward so that each contains
/// the previous sub-image and maps into the next sub-domain by construction.
pub fn gen_random_pair(spec: &GeneratorSpec) -> Result<InstanceFile> {
    spec.validate()?;
    let tol = Tolerance::default();
    let n = spec.length;
    let dims = &spec.dims;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    'outer: for _attempt in 0..RETRY_BUDGET {
        // Image ranks: b[i+1] = rank of the ambient action H_i → H_{i+1},
        // bounded so the kernel can still contain the previous image.
        let mut b = vec![0usize; n + 1];
        for i in 0..n {
            let cap = dims[i + 1].min(dims[i] - b[i]);
            b[i + 1] = if cap == 0 { 0 } else { rng.gen_range(0..=cap) };
        }

        let mut actions: Vec<DMatrix<f64>> = Vec::with_capacity(n);
        let mut prev_image = Subspace::zero(dims[0], tol);
        for i in 0..n {
            let target = rand_subspace(&mut rng, dims[i + 1], b[i + 1], tol);
            let killer = DMatrix::identity(dims[i], dims[i])
                - prev_image.basis() * prev_image.basis().transpose();
            let g = rand_matrix(&mut rng, b[i + 1], dims[i], spec.scalar_range);
            let action = target.basis() * g * killer;
            if Subspace::from_columns(&action, tol).dim() != b[i + 1] {
                continue 'outer; // degenerate draw
            }
            actions.push(action);
            prev_image = target;
        }

        // Top domains: 𝒟(L_i) ⊇ im(L_{i−1}), then sub-domains forward.
        let mut top_domains: Vec<Subspace> = Vec::with_capacity(n);
        let mut sub_domains: Vec<Subspace> = Vec::with_capacity(n);
        let mut im_l_prev = Subspace::zero(dims[0], tol);
        let mut im_d_prev = Subspace::zero(dims[0], tol);
        for i in 0..n {
            let full = Subspace::full(dims[i], tol);
            let dl = rng.gen_range(im_l_prev.dim()..=dims[i]);
            let dom_l = rand_subspace_between(&mut rng, &im_l_prev, &full, dl, tol)?;
            let codim = rng.gen_range(spec.domain_codim_range.0..=spec.domain_codim_range.1);
            let dd = dom_l.dim().saturating_sub(codim).max(im_d_prev.dim());
            let dom_d = rand_subspace_between(&mut rng, &im_d_prev, &dom_l, dd, tol)?;
            im_l_prev = dom_l.map(&actions[i])?;
            im_d_prev = dom_d.map(&actions[i])?;
            top_domains.push(dom_l);
            sub_domains.push(dom_d);
        }

        let file = InstanceFile {
            version: 1,
            scalar: "real".into(),
            dims: dims.clone(),
            weights: None,
            l: actions
                .iter()
                .zip(&top_domains)
                .map(|(a, d)| OperatorBlock {
                    action: matrix_to_rows(a),
                    domain_basis: subspace_to_rows(d),
                })
                .collect(),
            d_domains: sub_domains.iter().map(subspace_to_rows).collect(),
            duality: None,
            tolerance: None,
        };
        let (pair, _) = file.build()?;
        if check_extension(&pair).pass {
            return Ok(file);
        }
    }
    Err(Error::Generator { tries: RETRY_BUDGET, message: "no valid random pair".into() })
}

/// Default sign rule: the one a degree-reversing star satisfies. All +1 for
/// odd top degree, (−1)^i for even.
pub fn default_signs(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| if n % 2 == 1 || i % 2 == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// Default constants compatible with the involution constraint
/// C_i·C_{n−1−i} = s_i·s_{i+1}.
pub fn default_constants(n: usize, signs: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0; n];
    for i in 0..n {
        let j = n - 1 - i;
        if i < j {
            c[j] = signs[i] * signs[i + 1];
        }
    }
    c
}

fn validate_duality_parameters(n: usize, constants: &[f64], signs: &[f64]) -> Result<()> {
    if signs.len() != n + 1 || constants.len() != n {
        return Err(Error::Duality(format!(
            "need {} signs and {} constants, got {} and {}",
            n + 1,
            n,
            signs.len(),
            constants.len()
        )));
    }
    for (i, s) in signs.iter().enumerate() {
        if (s.abs() - 1.0).abs() > 1e-12 {
            return Err(Error::Duality(format!("sign s_{i} must be ±1")));
        }
        if (signs[n - i] - s).abs() > 1e-12 {
            return Err(Error::Duality(format!("signs must satisfy s_{i} = s_{}", n - i)));
        }
    }
    for i in 0..n {
        let j = n - 1 - i;
        let want = signs[i] * signs[i + 1];
        if (constants[i] * constants[j] - want).abs() > 1e-9 {
            return Err(Error::Duality(format!(
                "constants must satisfy C_{i}·C_{j} = s_{i}·s_{}, got {} vs {want}",
                i + 1,
                constants[i] * constants[j]
            )));
        }
        if constants[i] == 0.0 {
            return Err(Error::Duality("constants must be nonzero".into()));
        }
    }
    Ok(())
}

/// Random symmetric orthogonal involution (φ² = +I).
fn rand_symmetric_orthogonal(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<f64> {
    let q = rand_orthogonal(rng, dim);
    let mut d = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        d[(i, i)] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    }
    &q * d * q.transpose()
}

/// Random orthogonal complex structure (φ² = −I); needs even dimension.
fn rand_complex_structure(rng: &mut ChaCha8Rng, dim: usize) -> Result<DMatrix<f64>> {
    if dim % 2 != 0 {
        return Err(Error::Generator {
            tries: 0,
            message: format!("a square-to-−1 duality map needs even dimension, got {dim}"),
        });
    }
    let q = rand_orthogonal(rng, dim);
    let mut j = DMatrix::zeros(dim, dim);
    for k in 0..dim / 2 {
        j[(2 * k, 2 * k + 1)] = -1.0;
        j[(2 * k + 1, 2 * k)] = 1.0;
    }
    Ok(&q * j * q.transpose())
}

/// Basis of a subspace isotropic for the bilinear form ⟨φ·,·⟩, φ orthogonal
/// with φ² = s·I. Used to make the seam differential's image compatible with
/// the mirror half of the chain.
fn isotropic_seam(
    rng: &mut ChaCha8Rng,
    phi: &DMatrix<f64>,
    s: f64,
    max_rank: usize,
) -> DMatrix<f64> {
    let dim = phi.nrows();
    if s > 0.0 {
        // Symmetric involution: pair +1 and −1 eigenvectors.
        let eig = nalgebra::SymmetricEigen::new(phi.clone());
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for (k, l) in eig.eigenvalues.iter().enumerate() {
            let col = eig.eigenvectors.column(k).into_owned();
            if *l > 0.0 {
                plus.push(col);
            } else {
                minus.push(col);
            }
        }
        let cap = plus.len().min(minus.len()).min(max_rank);
        if cap == 0 {
            return DMatrix::zeros(dim, 0);
        }
        let r = rng.gen_range(0..=cap);
        if r == 0 {
            return DMatrix::zeros(dim, 0);
        }
        let qp = rand_orthogonal(rng, plus.len());
        let qm = rand_orthogonal(rng, minus.len());
        let up = DMatrix::from_columns(&plus) * qp.columns(0, r).into_owned();
        let um = DMatrix::from_columns(&minus) * qm.columns(0, r).into_owned();
        (up + um).scale(1.0 / 2.0_f64.sqrt())
    } else {
        // Skew case: grow a frame keeping each new vector orthogonal to the
        // previous ones and to their φ-images.
        let cap = (dim / 2).min(max_rank);
        if cap == 0 {
            return DMatrix::zeros(dim, 0);
        }
        let r = rng.gen_range(0..=cap);
        let mut cols: Vec<DVector<f64>> = Vec::new();
        let mut avoid: Vec<DVector<f64>> = Vec::new();
        while cols.len() < r {
            let mut v = DVector::from_fn(dim, |_, _| rand_in(rng, (-1.0, 1.0)));
            for a in &avoid {
                let d = a.dot(&v);
                v -= a * d;
            }
            let norm = v.norm();
            if norm < 1e-6 {
                continue;
            }
            v /= norm;
            let pv = phi * &v;
            cols.push(v.clone());
            avoid.push(v);
            avoid.push(pv.normalize());
        }
        if cols.is_empty() {
            DMatrix::zeros(dim, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }
}

/// φ-self-dual pair with duality data. The chain T satisfies
/// T_i = C_i⁻¹ φ_{i+1}⁻¹ ∘ T_{n−i−1}ᵀ ∘ φ_i, so T equals its own conjugate
/// Φ(T); the emitted pair is D = T ∧ Φ(T), L = T ∨ Φ(T) with the
/// single-valuedness of the join certified. In finite dimension the
/// complementarity conditions admit only full domains, so D = L here; the
/// strict-inclusion content of the theory lives in the undualized pairs.
pub fn gen_complementary(
    spec: &GeneratorSpec,
    constants: Option<&[f64]>,
    signs: Option<&[f64]>,
) -> Result<InstanceFile> {
    spec.validate()?;
    let n = spec.length;
    if n == 0 {
        return Err(Error::Contract("complementary generation needs length ≥ 1".into()));
    }
    let dims = &spec.dims;
    for i in 0..=n {
        if dims[i] != dims[n - i] {
            return Err(Error::Contract(format!(
                "dims must be palindromic: dims[{i}] = {} vs dims[{}] = {}",
                dims[i],
                n - i,
                dims[n - i]
            )));
        }
    }
    let signs: Vec<f64> = match signs {
        Some(s) => s.to_vec(),
        None => default_signs(n),
    };
    let constants: Vec<f64> = match constants {
        Some(c) => c.to_vec(),
        None => default_constants(n, &signs),
    };
    validate_duality_parameters(n, &constants, &signs)?;
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    'outer: for _attempt in 0..RETRY_BUDGET {
        // Duality maps: free on the lower half, transposed with sign above,
        // involution (up to sign) in the middle.
        let mut phis: Vec<Option<DMatrix<f64>>> = vec![None; n + 1];
        for i in 0..=n {
            if i * 2 < n {
                phis[i] = Some(rand_orthogonal(&mut rng, dims[i]));
            } else if i * 2 == n {
                let phi = if signs[i] > 0.0 {
                    rand_symmetric_orthogonal(&mut rng, dims[i])
                } else {
                    rand_complex_structure(&mut rng, dims[i])?
                };
                phis[i] = Some(phi);
            }
        }
        for i in 0..=n {
            if i * 2 > n {
                let mirror = phis[n - i].as_ref().expect("lower half filled").clone();
                phis[i] = Some(mirror.transpose().scale(signs[i]));
            }
        }
        let phis: Vec<DMatrix<f64>> = phis.into_iter().map(|p| p.expect("all degrees filled")).collect();

        // The chain: lower half free (images nested in kernels), the middle
        // pinned by self-conjugacy (odd n) or an isotropic seam (even n),
        // the upper half mirrored through φ.
        let mut actions: Vec<Option<DMatrix<f64>>> = vec![None; n];
        let k = n / 2;
        if n % 2 == 1 {
            // middle differential T_k with T_k = C_k⁻¹ φ_{k+1}⁻¹ T_kᵀ φ_k
            let x = rand_matrix(&mut rng, dims[k + 1], dims[k], spec.scalar_range);
            let conj = (phis[k + 1].transpose() * x.transpose() * &phis[k]).unscale(constants[k]);
            let t_mid = (x + conj).scale(0.5);
            actions[k] = Some(t_mid);
        } else {
            // seam: image of T_{k−1} must be isotropic for ⟨φ_k·,·⟩
            let seam = isotropic_seam(&mut rng, &phis[k], signs[k], dims[k].min(dims[k - 1]));
            let g = rand_matrix(&mut rng, seam.ncols(), dims[k - 1], spec.scalar_range);
            actions[k - 1] = Some(&seam * g);
        }
        // Downward from the last pinned differential.
        let first_pinned = if n % 2 == 1 { k } else { k - 1 };
        let mut prev_kernel = nullspace(actions[first_pinned].as_ref().unwrap(), tol);
        for i in (0..first_pinned).rev() {
            let kappa = prev_kernel.dim();
            let g = rand_matrix(&mut rng, kappa, dims[i], spec.scalar_range);
            let t = prev_kernel.basis() * g;
            prev_kernel = nullspace(&t, tol);
            actions[i] = Some(t);
        }
        // Mirror the upper half: T_{n−1−i} = C_i φ_i T_iᵀ φ_{i+1}ᵀ.
        for i in 0..n {
            if actions[i].is_none() {
                let j = n - 1 - i;
                let t_j = actions[j].as_ref().expect("mirror degree filled").clone();
                actions[i] = Some((&phis[j] * t_j.transpose() * phis[j + 1].transpose()).scale(constants[j]));
            }
        }
        let actions: Vec<DMatrix<f64>> = actions.into_iter().map(|a| a.expect("all filled")).collect();

        // Chain property at the matrix level.
        for i in 0..n.saturating_sub(1) {
            let prod = &actions[i + 1] * &actions[i];
            let scale = 1.0_f64
                .max(spectral_norm(&actions[i]))
                .max(spectral_norm(&actions[i + 1]));
            if spectral_norm(&prod) > 1e-9 * scale * scale {
                continue 'outer;
            }
        }

        // Self-conjugacy and the meet/join collapse, certified on relations.
        let rels: Vec<LinearRelation> =
            actions.iter().map(|a| LinearRelation::from_matrix(a, tol)).collect();
        let mut ok = true;
        for i in 0..n {
            // Φ(T)_i = C_i⁻¹ φ_{i+1}⁻¹ ∘ T_{n−i−1}^* ∘ φ_i: a graph pair
            // (x, y) of the adjoint becomes (φ_iᵀ x, C_i⁻¹ φ_{i+1}ᵀ y).
            let conj = rels[n - 1 - i].adjoint().map_blocks(
                &phis[i].transpose(),
                &phis[i + 1].transpose().unscale(constants[i]),
            )?;
            let meet = rels[i].meet(&conj)?;
            let join = rels[i].join(&conj)?;
            if !join.is_single_valued()
                || meet.graph_defect(&rels[i])? > tol.angle_tol()
                || join.graph_defect(&rels[i])? > tol.angle_tol()
            {
                ok = false;
                break;
            }
        }
        if !ok {
            continue 'outer;
        }

        let full_domains: Vec<Vec<Vec<f64>>> = (0..n)
            .map(|i| subspace_to_rows(&Subspace::full(dims[i], tol)))
            .collect();
        let file = InstanceFile {
            version: 1,
            scalar: "real".into(),
            dims: dims.clone(),
            weights: None,
            l: actions
                .iter()
                .enumerate()
                .map(|(i, a)| OperatorBlock {
                    action: matrix_to_rows(a),
                    domain_basis: full_domains[i].clone(),
                })
                .collect(),
            d_domains: full_domains,
            duality: Some(DualityBlock {
                phis: phis.iter().map(matrix_to_rows).collect(),
                constants: constants.clone(),
                signs: signs.clone(),
            }),
            tolerance: None,
        };
        let (pair, duality) = file.build()?;
        let duality = duality.expect("duality block present");
        if check_extension(&pair).pass && check_complementary(&pair, &duality)?.pass {
            return Ok(file);
        }
    }
    Err(Error::Generator {
        tries: RETRY_BUDGET,
        message: "no self-dual chain satisfied the certificates".into(),
    })
}

/// Two-term cochain pair on a subdivided interval: functions on n+1 vertices,
/// values on n cells, forward difference. Inner products are the masses of
/// x^c on [0, 1]; L is the full-domain difference (the distributional
/// extension analogue) and D restricts to functions vanishing at the flagged
/// endpoints (the graph-closure analogue). No duality block: the naive
/// one-dimensional star does not match dimensions, and no fake one is
/// shipped.
pub fn gen_grid_interval(spec: &GridSpec) -> Result<InstanceFile> {
    if spec.cells < 2 {
        return Err(Error::Contract("grid needs at least 2 cells".into()));
    }
    let c = spec.weight_exponent;
    if !(c > -1.0 && c <= 10.0) {
        return Err(Error::Contract(format!("weight exponent {c} outside (-1, 10]")));
    }
    let n = spec.cells;
    // Cell masses of x^c on the uniform grid, vertex masses by half-sums.
    let xs: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    let cell_mass: Vec<f64> = (0..n)
        .map(|k| (xs[k + 1].powf(c + 1.0) - xs[k].powf(c + 1.0)) / (c + 1.0))
        .collect();
    let vertex_mass: Vec<f64> = (0..=n)
        .map(|k| {
            let left = if k > 0 { cell_mass[k - 1] } else { 0.0 };
            let right = if k < n { cell_mass[k] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect();

    let mut action = vec![vec![0.0; n + 1]; n];
    for k in 0..n {
        action[k][k] = -1.0;
        action[k][k + 1] = 1.0;
    }
    let full: Vec<Vec<f64>> = (0..=n)
        .map(|k| {
            let mut row = vec![0.0; n + 1];
            row[k] = 1.0;
            row
        })
        .collect();
    let clamped: Vec<usize> = match spec.boundary_mode {
        BoundaryMode::OneEnd => vec![0],
        BoundaryMode::TwoEnds => vec![0, n],
    };
    let sub_basis: Vec<Vec<f64>> = (0..=n)
        .filter(|k| !clamped.contains(k))
        .map(|k| {
            let mut row = vec![0.0; n + 1];
            row[k] = 1.0;
            row
        })
        .collect();

    Ok(InstanceFile {
        version: 1,
        scalar: "real".into(),
        dims: vec![n + 1, n],
        weights: Some(vec![vertex_mass, cell_mass]),
        l: vec![OperatorBlock { action, domain_basis: full }],
        d_domains: vec![sub_basis],
        duality: None,
        tolerance: None,
    })
}

/// Three-term cochain pair on the triangulated cone over a k-gon, weighted by
/// radial masses of x^c. The sub-domain removes the cone vertex from the
/// degree-0 picture (relative-to-vertex condition). No intersection
/// cohomology is computed or claimed; the instance only feeds the abstract
/// pair machinery.
pub fn gen_cone_2d(k: usize, weight_exponent: f64) -> Result<InstanceFile> {
    if k < 3 {
        return Err(Error::Contract("cone needs a k-gon with k ≥ 3".into()));
    }
    let c = weight_exponent;
    if !(c > -1.0 && c <= 10.0) {
        return Err(Error::Contract(format!("weight exponent {c} outside (-1, 10]")));
    }
    let nv = k + 1; // apex is vertex 0
    let ne = 2 * k; // k spokes then k rim edges
    let nf = k;

    // d0: spokes (0 → i+1), rim edges (j+1 → next).
    let mut d0 = vec![vec![0.0; nv]; ne];
    for i in 0..k {
        d0[i][0] = -1.0;
        d0[i][i + 1] = 1.0;
    }
    for j in 0..k {
        let a = j + 1;
        let b = (j + 1) % k + 1;
        d0[k + j][a] = -1.0;
        d0[k + j][b] = 1.0;
    }
    // d1 over triangle (0, j+1, next): rim + spoke(j) − spoke(next).
    let mut d1 = vec![vec![0.0; ne]; nf];
    for j in 0..k {
        let next_spoke = (j + 1) % k;
        d1[j][k + j] = 1.0;
        d1[j][next_spoke] = -1.0;
        d1[j][j] = 1.0;
    }

    // Radial masses: apex region, rim region, spokes, rim edges, faces.
    let apex_mass = k as f64 * 0.5_f64.powf(c + 2.0) / (c + 2.0);
    let rim_vertex_mass = (1.0 - 0.5_f64.powf(c + 2.0)) / (c + 2.0);
    let spoke_mass = 1.0 / (c + 1.0);
    let rim_edge_mass = 1.0;
    let face_mass = 1.0 / ((c + 2.0) * k as f64);
    let mut w0 = vec![rim_vertex_mass; nv];
    w0[0] = apex_mass;
    let mut w1 = vec![spoke_mass; ne];
    for j in 0..k {
        w1[k + j] = rim_edge_mass;
    }
    let w2 = vec![face_mass; nf];

    let identity_rows = |m: usize| -> Vec<Vec<f64>> {
        (0..m)
            .map(|i| {
                let mut row = vec![0.0; m];
                row[i] = 1.0;
                row
            })
            .collect()
    };
    let no_apex: Vec<Vec<f64>> = (1..nv)
        .map(|i| {
            let mut row = vec![0.0; nv];
            row[i] = 1.0;
            row
        })
        .collect();

    Ok(InstanceFile {
        version: 1,
        scalar: "real".into(),
        dims: vec![nv, ne, nf],
        weights: Some(vec![w0, w1, w2]),
        l: vec![
            OperatorBlock { action: d0, domain_basis: identity_rows(nv) },
            OperatorBlock { action: d1, domain_basis: identity_rows(ne) },
        ],
        d_domains: vec![no_apex, identity_rows(ne)],
        duality: None,
        tolerance: None,
    })
}

/// Random admissible intermediate domains D ⊆ T ⊆ L, forward-consistent so
/// that T is a complex. Used by the injectivity checks.
pub fn random_intermediate_domains(p: &SandwichPair, seed: u64) -> Result<Vec<Subspace>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.top_degree();
    let tol = p.tol();
    let mut out = Vec::with_capacity(n);
    let mut prev_image = Subspace::zero(p.top().dims()[0], tol);
    for j in 0..n {
        let lower = p.sub_domains()[j].sum(&prev_image)?;
        let upper = &p.top().diff(j).domain;
        let dim = rng.gen_range(lower.dim()..=upper.dim());
        let t = rand_subspace_between(&mut rng, &lower, upper, dim, tol)?;
        prev_image = t.map(&p.top().diff(j).action)?;
        out.push(t);
    }
    Ok(out)
}
