//! Dense complex matrix helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

pub fn unitary_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m.adjoint() * m - identity(m.nrows())))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Integer power by repeated squaring.
pub fn matrix_power(m: &CMatrix, mut n: u64) -> CMatrix {
    let mut base = m.clone();
    let mut acc = identity(m.nrows());
    while n > 0 {
        if n & 1 == 1 {
            acc = &acc * &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian(dev));
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Connected components of the off-diagonal support, each sorted ascending.
///
/// A Hermitian matrix is block diagonal over these index sets.
pub fn support_components(m: &CMatrix) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if m[(i, j)] != Complex64::new(0.0, 0.0) || m[(j, i)] != Complex64::new(0.0, 0.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// `exp(-i H τ)` for Hermitian `H`, exponentiating each block of the
/// support separately so the result has exactly the block pattern of `H`.
pub fn exp_hermitian(h: &CMatrix, tau: f64) -> Result<CMatrix> {
    let dev = hermitian_deviation(h);
    if dev > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian(dev));
    }
    let n = h.nrows();
    if tau == 0.0 {
        return Ok(identity(n));
    }
    let mut out = CMatrix::zeros(n, n);
    for block in support_components(h) {
        if let [i] = block[..] {
            out[(i, i)] = Complex64::from_polar(1.0, -h[(i, i)].re * tau);
            continue;
        }
        let k = block.len();
        let sub = CMatrix::from_fn(k, k, |r, c| h[(block[r], block[c])]);
        let eig = SymmetricEigen::new(sub);
        let phases = CMatrix::from_diagonal(
            &eig.eigenvalues.map(|lambda| Complex64::from_polar(1.0, -lambda * tau)),
        );
        let v = &eig.eigenvectors;
        let local = v * phases * v.adjoint();
        for r in 0..k {
            for c in 0..k {
                out[(block[r], block[c])] = local[(r, c)];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn components_of_block_matrix() {
        let mut m = CMatrix::zeros(5, 5);
        m[(0, 3)] = c(1.0, 0.0);
        m[(3, 0)] = c(1.0, 0.0);
        m[(1, 2)] = c(0.0, 1.0);
        m[(2, 1)] = c(0.0, -1.0);
        assert_eq!(support_components(&m), vec![vec![0, 3], vec![1, 2], vec![4]]);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, -3.0)]));
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn power_by_squaring() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let p = matrix_power(&m, 13);
        assert_eq!(p[(0, 1)], c(13.0, 0.0));
        assert_eq!(matrix_power(&m, 0), identity(2));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(exp_hermitian(&m, 1.0), Err(Error::NotHermitian(_))));
        assert!(hermitian_eigenvalues(&m).is_err());
    }
}
