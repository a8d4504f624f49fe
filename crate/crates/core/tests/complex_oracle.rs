//! Cohomology, harmonic spaces, Kodaira splittings, Laplacians, duals and
//! the even/odd index, checked against the rational oracle and against each
//! other on integer fixtures and random complexes.

mod common;

use common::{coordinate_span, grid_difference_matrix, int_to_f64, rand_int_matrix, seeded, QMatrix};
use proptest::prelude::*;
use rand::Rng;

use kodaira::complex::{GradedSpace, HilbertComplex};
use kodaira::models::{self, GeneratorSpec};
use kodaira::subspace::Subspace;
use kodaira::tol::Tolerance;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Random one-differential complex on integer data: no composition
/// constraint, so every claim is oracle-checkable in exact arithmetic.
fn random_integer_two_term(seed: u64) -> (HilbertComplex, QMatrix, QMatrix) {
    let mut rng = seeded(seed);
    let n0 = rng.gen_range(2usize..=5);
    let n1 = rng.gen_range(2usize..=5);
    let entries = rand_int_matrix(&mut rng, n1, n0, 3);
    let keep: Vec<usize> = (0..n0).filter(|_| rng.gen_range(0..3) > 0).collect();
    let keep = if keep.is_empty() { vec![0] } else { keep };
    let action_q = QMatrix::from_i64(n1, n0, &entries);
    let span_q = coordinate_span(n0, &keep);
    let complex = HilbertComplex::new(
        GradedSpace::new(vec![n0, n1], None).unwrap(),
        vec![int_to_f64(n1, n0, &entries)],
        vec![Subspace::from_columns(&span_q.to_f64(), tol())],
        tol(),
    )
    .unwrap();
    (complex, action_q, span_q)
}

#[test]
fn grid_complex_cohomology_absolute_and_relative() {
    // n = 4 cells: absolute (full domain) gives (1, 0); relative (both ends
    // clamped) gives (0, 1). Frozen from the rational oracle, re-derived here.
    let n = 4;
    let diff = grid_difference_matrix(n);
    let full = coordinate_span(n + 1, &[0, 1, 2, 3, 4]);
    let interior = coordinate_span(n + 1, &[1, 2, 3]);

    let h0_abs = full.rank() - diff.mul(&full).rank();
    let h1_abs = n - diff.mul(&full).rank();
    assert_eq!((h0_abs, h1_abs), (1, 0));
    let h0_rel = interior.rank() - diff.mul(&interior).rank();
    let h1_rel = n - diff.mul(&interior).rank();
    assert_eq!((h0_rel, h1_rel), (0, 1));

    let absolute = HilbertComplex::new(
        GradedSpace::new(vec![n + 1, n], None).unwrap(),
        vec![diff.to_f64()],
        vec![Subspace::full(n + 1, tol())],
        tol(),
    )
    .unwrap();
    assert!(absolute.validate().pass);
    assert_eq!(absolute.cohomology_dims().unwrap(), vec![1, 0]);

    let relative = HilbertComplex::new(
        GradedSpace::new(vec![n + 1, n], None).unwrap(),
        vec![diff.to_f64()],
        vec![Subspace::from_columns(&interior.to_f64(), tol())],
        tol(),
    )
    .unwrap();
    assert_eq!(relative.cohomology_dims().unwrap(), vec![0, 1]);

    // Harmonic space of the absolute complex at degree 0: the constants.
    let h = absolute.harmonic_space(0).unwrap();
    assert_eq!(h.dim(), 1);
    let ones = nalgebra::DVector::from_element(n + 1, 1.0 / ((n + 1) as f64).sqrt());
    assert!((h.project(&ones).unwrap() - &ones).norm() < 1e-10);

    // Even-to-odd index = Euler characteristic = 1.
    let triple = absolute.d_plus_dstar_index().unwrap();
    assert_eq!(triple.index, 1);
    assert_eq!((triple.dim_ker, triple.dim_coker), (1, 0));

    // Dual cohomology dims are the primal ones reversed.
    assert_eq!(absolute.dual_cohomology_dims().unwrap(), vec![0, 1]);
}

#[test]
fn random_two_term_complexes_match_the_oracle() {
    for seed in 0..40 {
        let (c, action_q, span_q) = random_integer_two_term(seed);
        let dom = span_q.rank();
        let rank = action_q.mul(&span_q).rank();
        let h0 = dom - rank;
        let h1 = c.dims()[1] - rank;
        assert_eq!(c.cohomology_dims().unwrap(), vec![h0, h1], "seed {seed}");
        assert_eq!(c.harmonic_space(0).unwrap().dim(), h0);
        assert_eq!(c.harmonic_space(1).unwrap().dim(), h1);
        let triple = c.d_plus_dstar_index().unwrap();
        assert_eq!(triple.index, h0 as i64 - h1 as i64);
        // Dual dims reversed.
        assert_eq!(c.dual_cohomology_dims().unwrap(), vec![h1, h0]);
    }
}

#[test]
fn laplacian_kernels_are_the_harmonic_spaces() {
    for seed in 0..25 {
        let (c, _, _) = random_integer_two_term(seed);
        for i in 0..=1 {
            let lap = c.laplacian(i).unwrap();
            let ker = lap.kernel();
            let harm = c.harmonic_space(i).unwrap();
            assert_eq!(ker.dim(), harm.dim(), "seed {seed} degree {i}");
            assert!(ker.is_equal(&harm).unwrap(), "seed {seed} degree {i}");
            // Self-adjointness of the relation.
            assert!(lap.graph_defect(&lap.adjoint()).unwrap() < 1e-8);
        }
    }
}

#[test]
fn kodaira_split_on_longer_generated_complexes() {
    for seed in 0..15 {
        let spec = GeneratorSpec::new(seed, vec![3, 4, 4, 3], (0, 2));
        let file = models::gen_random_pair(&spec).unwrap();
        let (pair, _) = file.build().unwrap();
        let top = pair.top();
        for i in 0..=top.top_degree() {
            let split = top.kodaira(i).unwrap();
            assert_eq!(
                split.harmonic.dim() + split.im_prev.dim() + split.im_adj.dim(),
                top.dims()[i]
            );
            assert_eq!(split.harmonic.dim(), top.cohomology_dim(i).unwrap());
        }
        let triple = top.d_plus_dstar_index().unwrap();
        assert_eq!(triple.index, top.euler_characteristic().unwrap());
        // Dual Betti numbers are the primal ones reversed (everything is
        // Fredholm here, so the identification is on the nose).
        let mut reversed = top.cohomology_dims().unwrap();
        reversed.reverse();
        assert_eq!(top.dual_cohomology_dims().unwrap(), reversed);
    }
}

#[test]
fn degree_out_of_range_is_an_error() {
    let c = HilbertComplex::zero_complex(vec![2, 2], tol()).unwrap();
    assert!(c.cohomology_dim(3).is_err());
    assert!(c.harmonic_space(9).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// dim ℋ^i = dim H^i across generated sandwich pairs (both complexes).
    #[test]
    fn harmonic_dim_equals_cohomology_dim(seed in 0u64..5000) {
        let spec = GeneratorSpec::new(seed, vec![3, 4, 3], (0, 2));
        let file = models::gen_random_pair(&spec).unwrap();
        let (pair, _) = file.build().unwrap();
        for complex in [pair.top().clone(), pair.sub_complex()] {
            for i in 0..=complex.top_degree() {
                prop_assert_eq!(
                    complex.harmonic_space(i).unwrap().dim(),
                    complex.cohomology_dim(i).unwrap()
                );
            }
        }
    }
}
