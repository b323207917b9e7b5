//! Laplacian of a threshold graph and its closed-form eigen-decomposition.
//!
//! All arithmetic here is exact integer arithmetic. The eigenvalues are
//! `{0, deg(V_2), …, deg(V_n)}` and the eigenbasis depends only on `n`:
//! `u_1 = 1` and `u_m = e_1 + … + e_{m−1} − (m−1)·e_m`.

use std::collections::BTreeMap;

use crate::graph::ThresholdGraph;
use crate::urn::CreationSequence;

/// `L = D − A`, stored dense row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaplacianMatrix {
    n: usize,
    entries: Vec<i64>,
    source: CreationSequence,
}

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[(i - 1) * self.n + (j - 1)]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.entries.chunks(self.n)
    }

    pub fn source(&self) -> &CreationSequence {
        &self.source
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        self.rows().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (1..=self.n).all(|i| (1..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Builds `L` entrywise: the diagonal is `deg(V_i) − z_i` (the self-loop
/// cancels) and off-diagonal entries are `−z_max(i,j)`.
pub fn laplacian(g: &ThresholdGraph) -> LaplacianMatrix {
    let n = g.n();
    let z = g.sequence().as_slice();
    let degrees = g.degrees();
    let mut entries = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = if i == j {
                degrees[i] as i64 - i64::from(z[i])
            } else {
                -i64::from(z[i.max(j)])
            };
        }
    }
    LaplacianMatrix { n, entries, source: g.sequence().clone() }
}

/// Eigenvalues `[0, deg(V_2), …, deg(V_n)]`, in eigenbasis order.
pub fn spectrum(g: &ThresholdGraph) -> Vec<usize> {
    let mut eig = g.degrees();
    eig[0] = 0;
    eig
}

/// The spectrum as a sorted multiset.
pub fn sorted_spectrum(g: &ThresholdGraph) -> Vec<usize> {
    let mut eig = spectrum(g);
    eig.sort_unstable();
    eig
}

/// `(eigenvalue, multiplicity)` pairs in ascending order.
pub fn multiplicities(g: &ThresholdGraph) -> Vec<(usize, usize)> {
    let mut counts = BTreeMap::new();
    for e in spectrum(g) {
        *counts.entry(e).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

/// Second-smallest Laplacian eigenvalue, `min_{2≤i≤n} deg(V_i)`.
pub fn algebraic_connectivity(g: &ThresholdGraph) -> Option<usize> {
    sorted_spectrum(g).get(1).copied()
}

/// Eigenvector `u_m` of length `n` (1-based `m`).
pub fn basis_vector(n: usize, m: usize) -> Vec<i64> {
    assert!(m >= 1 && m <= n, "basis index {m} out of range 1..={n}");
    if m == 1 {
        return vec![1; n];
    }
    let mut u = vec![0i64; n];
    u[..m - 1].fill(1);
    u[m - 1] = -(m as i64 - 1);
    u
}

/// The `n` eigenvectors `u_1, …, u_n`; the same for every realisation.
pub fn eigenbasis(n: usize) -> Vec<Vec<i64>> {
    (1..=n).map(|m| basis_vector(n, m)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenpairCheck {
    pub m: usize,
    pub eigenvalue: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenpairReport {
    pub checks: Vec<EigenpairCheck>,
}

impl EigenpairReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &EigenpairCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Checks `L·u_m = λ_m·u_m` for every `m` in exact integer arithmetic.
pub fn verify_eigenpairs(g: &ThresholdGraph) -> EigenpairReport {
    let lap = laplacian(g);
    let n = g.n();
    let checks = spectrum(g)
        .into_iter()
        .enumerate()
        .map(|(idx, eigenvalue)| {
            let m = idx + 1;
            let u = basis_vector(n, m);
            let lu = lap.mul_vec(&u);
            let passed = lu.iter().zip(&u).all(|(l, x)| *l == eigenvalue as i64 * x);
            EigenpairCheck { m, eigenvalue, passed }
        })
        .collect();
    EigenpairReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn graph(s: &str) -> ThresholdGraph {
        build_graph(&CreationSequence::parse(s).unwrap())
    }

    #[test]
    fn complete_graph_laplacian() {
        let lap = laplacian(&graph("111"));
        for i in 1..=3 {
            for j in 1..=3 {
                assert_eq!(lap.get(i, j), if i == j { 2 } else { -1 });
            }
        }
        assert_eq!(spectrum(&graph("111")), vec![0, 3, 3]);
    }

    #[test]
    fn empty_graph_laplacian() {
        let g = graph("00");
        assert!(laplacian(&g).rows().all(|r| r.iter().all(|&x| x == 0)));
        assert_eq!(spectrum(&g), vec![0, 0]);
        assert!(verify_eigenpairs(&g).all_passed());
    }

    #[test]
    fn rows_sum_to_zero_and_symmetric() {
        for s in ["10010", "0101", "1", "0001111", "1100101"] {
            let lap = laplacian(&graph(s));
            assert!(lap.rows().all(|r| r.iter().sum::<i64>() == 0), "{s}");
            assert!(lap.is_symmetric());
        }
    }

    #[test]
    fn example_spectrum() {
        let g = graph("10010");
        assert_eq!(spectrum(&g), vec![0, 1, 1, 4, 0]);
        assert_eq!(multiplicities(&g), vec![(0, 2), (1, 2), (4, 1)]);
        assert_eq!(algebraic_connectivity(&g), Some(0));
        let report = verify_eigenpairs(&g);
        assert_eq!(report.checks.len(), 5);
        assert!(report.all_passed());
    }

    #[test]
    fn basis_vectors() {
        assert_eq!(basis_vector(3, 2), vec![1, -1, 0]);
        assert_eq!(basis_vector(3, 3), vec![1, 1, -2]);
        let basis = eigenbasis(6);
        for (idx, u) in basis.iter().enumerate().skip(1) {
            let m = idx + 1;
            assert_eq!(u.iter().filter(|&&x| x != 0).count(), m);
            assert_eq!(u.iter().sum::<i64>(), 0);
        }
    }

    #[test]
    fn a_wrong_eigenvalue_is_reported() {
        let g = graph("0110");
        let lap = laplacian(&g);
        let u = basis_vector(4, 3);
        let lu = lap.mul_vec(&u);
        let eig = g.degree(3).unwrap() as i64;
        assert_eq!(lu, u.iter().map(|x| eig * x).collect::<Vec<_>>());
        assert_ne!(lu, u.iter().map(|x| (eig + 1) * x).collect::<Vec<_>>());
    }
}
