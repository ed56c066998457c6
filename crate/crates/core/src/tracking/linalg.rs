use crate::scalar::Scalar;

/// Solves A x = b in place by Gaussian elimination with partial pivoting.
/// Returns `None` for a (numerically) singular matrix.
pub(crate) fn solve<T: Scalar, const N: usize>(mut a: [[T; N]; N], mut b: [T; N]) -> Option<[T; N]> {
    for col in 0..N {
        let pivot = (col..N).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if !(a[pivot][col].abs() > T::min_positive_value()) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] = a[row][k] - f * a[col][k];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = [T::zero(); N];
    for row in (0..N).rev() {
        let mut s = b[row];
        for k in row + 1..N {
            s = s - a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Diagonal entry `i` of A⁻¹.
pub(crate) fn inverse_diagonal<T: Scalar, const N: usize>(a: [[T; N]; N], i: usize) -> Option<T> {
    let mut e = [T::zero(); N];
    e[i] = T::one();
    solve(a, e).map(|x| x[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a: [[f64; 3]; 3] = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let x = solve(a, [3.0, 5.0, 5.0]).unwrap();
        for (xi, e) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((xi - e).abs() < 1e-14);
        }
        assert!(solve([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0]).is_none());
        let d = inverse_diagonal([[4.0f64, 0.0], [0.0, 2.0]], 1).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }
}
