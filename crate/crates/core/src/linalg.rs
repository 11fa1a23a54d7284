//! Thin wrappers over nalgebra for the small dense problems used here.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

/// Thin SVD with singular values sorted in decreasing order.
/// Returns `(U, σ, V)` with `m = U diag(σ) Vᵀ`; `V` is square.
pub fn svd_sorted(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (r, c) = m.shape();
    // Pad to at least as many rows as columns so V is always complete.
    let work = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = work.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sig: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = DMatrix::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]);
    let v_sorted = DMatrix::from_fn(vt.ncols(), order.len(), |i, j| vt[(order[j], i)]);
    let u_final = if r < c {
        u_sorted.rows(0, r).into_owned()
    } else {
        u_sorted
    };
    (u_final, sig, v_sorted)
}

/// Numerical rank with a relative threshold.
pub fn numerical_rank(sig: &[f64], rel_tol: f64) -> usize {
    let top = sig.iter().cloned().fold(0.0_f64, f64::max);
    if top == 0.0 {
        return 0;
    }
    sig.iter().filter(|&&s| s > rel_tol * top.max(1.0)).count()
}

/// Symmetric eigen-decomposition with ascending eigenvalues; eigenvectors are
/// the columns of the returned matrix.
pub fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    a.clone().lu().solve(b)
}

pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn to_dmatrix3(m: &[[f64; 3]; 3]) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| m[i][j])
}

/// Least-squares line `y = slope x + intercept`; returns
/// `(slope, intercept, rms residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    (slope, intercept, libm::sqrt(ss / n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svd_of_wide_and_tall() {
        let m = DMatrix::from_row_slice(2, 3, &[3.0, 0.0, 0.0, 0.0, 0.0, 5.0]);
        let (u, s, v) = svd_sorted(&m);
        assert_eq!(s.len(), 3);
        assert!((s[0] - 5.0).abs() < 1e-12 && (s[1] - 3.0).abs() < 1e-12 && s[2].abs() < 1e-12);
        assert_eq!(u.shape(), (2, 3));
        assert_eq!(v.shape(), (3, 3));
        let back = &u * DMatrix::from_diagonal(&DVector::from_vec(s.clone())) * v.transpose();
        assert!((back - m).norm() < 1e-12);
        assert_eq!(numerical_rank(&s, 1e-10), 2);
    }

    #[test]
    fn eigen_sorted() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, _) = sym_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn fit_exact_line() {
        let (s, i, r) = linear_fit(&[0.0, 1.0, 2.0, 3.0], &[1.0, -1.0, -3.0, -5.0]);
        assert!((s + 2.0).abs() < 1e-14 && (i - 1.0).abs() < 1e-14 && r < 1e-14);
    }
}
