use nalgebra::{DMatrix, SymmetricEigen};
use polya_threshold::graph::build_graph;
use polya_threshold::spectral::{algebraic_connectivity, eigenbasis, laplacian, sorted_spectrum, verify_eigenpairs};
use polya_threshold::CreationSequence;
use proptest::prelude::*;

fn sequence(max_len: usize) -> impl Strategy<Value = CreationSequence> {
    prop::collection::vec(0u8..=1, 1..=max_len).prop_map(|z| CreationSequence::new(z).unwrap())
}

fn numeric_spectrum(z: &CreationSequence) -> Vec<f64> {
    let lap = laplacian(&build_graph(z));
    let n = lap.n();
    let m = DMatrix::from_fn(n, n, |i, j| lap.get(i + 1, j + 1) as f64);
    let mut eig: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

proptest! {
    #[test]
    fn eigenpairs_hold_exactly(z in sequence(60)) {
        let report = verify_eigenpairs(&build_graph(&z));
        prop_assert!(report.all_passed());
    }

    #[test]
    fn spectrum_matches_numeric_eigensolver(z in sequence(30)) {
        let closed = sorted_spectrum(&build_graph(&z));
        let numeric = numeric_spectrum(&z);
        for (c, x) in closed.iter().zip(&numeric) {
            prop_assert!((*c as f64 - x).abs() < 1e-8, "{closed:?} vs {numeric:?}");
        }
    }

    #[test]
    fn algebraic_connectivity_is_min_later_degree(z in sequence(40)) {
        let g = build_graph(&z);
        let expected = g.degrees()[1..].iter().copied().min();
        prop_assert_eq!(algebraic_connectivity(&g), expected);
    }

    #[test]
    fn laplacian_rows_sum_to_zero(z in sequence(40)) {
        let lap = laplacian(&build_graph(&z));
        prop_assert!(lap.is_symmetric());
        for row in lap.rows() {
            prop_assert_eq!(row.iter().sum::<i64>(), 0);
        }
    }
}

#[test]
fn eigenbasis_is_orthogonal_and_realisation_free() {
    let basis = eigenbasis(12);
    for a in 0..12 {
        for b in 0..a {
            let dot: i64 = basis[a].iter().zip(&basis[b]).map(|(x, y)| x * y).sum();
            assert_eq!(dot, 0);
        }
    }
    for code in [0u64, 0b1010_1010_1010, 0xfff, 0b1000_0000_0001] {
        let z: Vec<u8> = (0..12).map(|b| ((code >> b) & 1) as u8).collect();
        let lap = laplacian(&build_graph(&CreationSequence::new(z).unwrap()));
        for u in &basis {
            let lu = lap.mul_vec(u);
            let (idx, &pivot) = u.iter().enumerate().find(|(_, &x)| x != 0).unwrap();
            let lambda = lu[idx] / pivot;
            assert_eq!(lu, u.iter().map(|x| lambda * x).collect::<Vec<_>>());
        }
    }
}
