use num_bigint::BigUint;
use num_traits::Zero;

use crate::matrix::{IncidenceMatrix, IndexSubset, WeightVector};

use super::{check_dim, first_reach, is_irreducible, PfError};

fn check_subset(subset: &IndexSubset, dim: usize) -> Result<(), PfError> {
    match subset.indices().last() {
        Some(&last) if last >= dim => Err(PfError::IndexOutOfRange { index: last, dim }),
        _ => Ok(()),
    }
}

/// Principal submatrix `N(a,b) = M(i_a, i_b)`.
pub fn submatrix(m: &IncidenceMatrix, subset: &IndexSubset) -> Result<IncidenceMatrix, PfError> {
    check_subset(subset, m.dim())?;
    let idx = subset.indices();
    IncidenceMatrix::from_rows(
        idx.iter()
            .map(|&i| idx.iter().map(|&j| m.get(i, j).clone()).collect())
            .collect(),
    )
}

/// `v̌_a = v_{i_a}`. Fails if the extracted entries are all zero.
pub fn extract(v: &WeightVector, subset: &IndexSubset) -> Result<WeightVector, PfError> {
    check_subset(subset, v.len())?;
    WeightVector::new(subset.indices().iter().map(|&i| v[i].clone()).collect())
}

/// `M` with row `dst` replaced by row `src`.
pub fn row_copy(m: &IncidenceMatrix, src: usize, dst: usize) -> Result<IncidenceMatrix, PfError> {
    let n = m.dim();
    for index in [src, dst] {
        if index >= n {
            return Err(PfError::IndexOutOfRange { index, dim: n });
        }
    }
    let mut out = m.clone();
    for j in 0..n {
        out.set(dst, j, m.get(src, j).clone());
    }
    Ok(out)
}

/// For `M̄` differing from the irreducible `M` only in the first row: checks
/// that row `j` of `M̄^p` equals row `j` of `M^p` for every `j >= 1` and
/// `1 <= p <= first_reach(M, j)`.
pub fn propagation_check(m: &IncidenceMatrix, mbar: &IncidenceMatrix) -> Result<bool, PfError> {
    check_dim(m.dim(), mbar.dim())?;
    let n = m.dim();
    if let Some(i) = (1..n).find(|&i| m.row(i) != mbar.row(i)) {
        return Err(PfError::PreconditionFailed(format!(
            "row {i} differs; only the first row may change"
        )));
    }
    if !is_irreducible(m) {
        return Err(PfError::NotIrreducible);
    }
    for j in 1..n {
        let q = first_reach(m, j)?;
        let mut row_m = unit_row(n, j);
        let mut row_bar = row_m.clone();
        for _ in 0..q {
            row_m = row_times(&row_m, m);
            row_bar = row_times(&row_bar, mbar);
            if row_m != row_bar {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn unit_row(n: usize, j: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::zero(); n];
    row[j] = BigUint::from(1u32);
    row
}

fn row_times(row: &[BigUint], m: &IncidenceMatrix) -> Vec<BigUint> {
    let n = m.dim();
    let mut out = vec![BigUint::zero(); n];
    for (k, a) in row.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in m.row(k).iter().enumerate() {
            if !b.is_zero() {
                out[j] += a * b;
            }
        }
    }
    out
}
