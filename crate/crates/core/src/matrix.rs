//! Square non-negative integer matrices, non-negative rational vectors and
//! index subsets. Indices are zero-based throughout the library; documents
//! and reports present them one-based.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::pf::PfError;
use crate::rational::{from_biguint, Rational};

/// Incidence matrix: entry `(i, j)` counts the components of the image of
/// disc `i` carried by disc `j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IncidenceMatrix {
    n: usize,
    entries: Vec<BigUint>,
}

impl IncidenceMatrix {
    pub fn from_rows(rows: Vec<Vec<BigUint>>) -> Result<Self, PfError> {
        let n = rows.len();
        if n == 0 {
            return Err(PfError::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(PfError::NotSquare {
                    row: i,
                    len: row.len(),
                    expected: n,
                });
            }
            entries.extend(row);
        }
        Ok(Self { n, entries })
    }

    /// Convenience constructor for small literal matrices.
    pub fn from_u64_rows<R: AsRef<[u64]>>(rows: &[R]) -> Result<Self, PfError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| BigUint::from(x)).collect())
                .collect(),
        )
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        Self {
            n,
            entries: vec![BigUint::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = BigUint::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigUint) {
        self.entries[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigUint] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigUint]> {
        self.entries.chunks(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<BigUint>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn is_positive(&self, i: usize, j: usize) -> bool {
        !self.get(i, j).is_zero()
    }

    /// Successor lists of the incidence digraph (edge `i -> j` iff entry > 0).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|i| (0..self.n).filter(|&j| self.is_positive(i, j)).collect())
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in product");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, p: u32) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `M + I`.
    pub fn shifted(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.entries[i * self.n + i] += 1u32;
        }
        m
    }

    /// Exact product with a rational vector.
    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.n, "dimension mismatch in matrix-vector product");
        self.rows()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Rational::zero(), |acc, (a, x)| acc + from_biguint(a) * x)
            })
            .collect()
    }

    /// `M^p v`, computed by repeated application rather than by forming `M^p`.
    pub fn apply_power(&self, v: &[Rational], p: u32) -> Vec<Rational> {
        let mut w = v.to_vec();
        for _ in 0..p {
            w = self.apply(&w);
        }
        w
    }
}

impl fmt::Debug for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.rows().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
            .finish()
    }
}

impl fmt::Display for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Non-negative, not identically zero rational vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector(Vec<Rational>);

impl WeightVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self, PfError> {
        if entries.is_empty() {
            return Err(PfError::InvalidWeights("empty vector".into()));
        }
        if let Some(i) = entries.iter().position(|x| *x < Rational::zero()) {
            return Err(PfError::InvalidWeights(format!("entry {i} is negative")));
        }
        if entries.iter().all(Zero::is_zero) {
            return Err(PfError::InvalidWeights("all entries are zero".into()));
        }
        Ok(Self(entries))
    }

    pub fn from_integers(entries: &[i64]) -> Result<Self, PfError> {
        Self::new(entries.iter().map(|&x| crate::rational::int(x)).collect())
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![Rational::one(); n])
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.0.iter().all(|x| *x > Rational::zero())
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = Rational;

    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

/// Strictly increasing, non-empty list of zero-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSubset(Vec<usize>);

impl IndexSubset {
    pub fn new(indices: Vec<usize>, dim: usize) -> Result<Self, PfError> {
        if indices.is_empty() {
            return Err(PfError::EmptySubset);
        }
        for (pos, &i) in indices.iter().enumerate() {
            if i >= dim {
                return Err(PfError::IndexOutOfRange { index: i, dim });
            }
            if pos > 0 && indices[pos - 1] >= i {
                return Err(PfError::SubsetNotIncreasing);
            }
        }
        Ok(Self(indices))
    }

    pub fn full(dim: usize) -> Self {
        Self((0..dim).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// One-based rendering for reports.
    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_empty() {
        assert!(matches!(
            IncidenceMatrix::from_u64_rows::<[u64; 0]>(&[]),
            Err(PfError::EmptyMatrix)
        ));
        let ragged: Vec<Vec<u64>> = vec![vec![1, 2], vec![3]];
        assert!(matches!(
            IncidenceMatrix::from_u64_rows(&ragged),
            Err(PfError::NotSquare { row: 1, .. })
        ));
    }

    #[test]
    fn power_matches_repeated_product() {
        let m = IncidenceMatrix::from_u64_rows(&[[1, 1], [1, 0]]).unwrap();
        let p5 = m.pow(5);
        let mut slow = IncidenceMatrix::identity(2);
        for _ in 0..5 {
            slow = slow.mul(&m);
        }
        assert_eq!(p5, slow);
        // Fibonacci: M^5 = [[8,5],[5,3]]
        assert_eq!(p5, IncidenceMatrix::from_u64_rows(&[[8, 5], [5, 3]]).unwrap());
        assert_eq!(m.pow(0), IncidenceMatrix::identity(2));
    }

    #[test]
    fn weight_vector_invariants() {
        assert!(WeightVector::from_integers(&[0, 0]).is_err());
        assert!(WeightVector::from_integers(&[1, -1]).is_err());
        assert!(WeightVector::from_integers(&[0, 3]).is_ok());
    }

    #[test]
    fn index_subset_invariants() {
        assert!(IndexSubset::new(vec![], 3).is_err());
        assert!(IndexSubset::new(vec![1, 1], 3).is_err());
        assert!(IndexSubset::new(vec![2, 1], 3).is_err());
        assert!(matches!(
            IndexSubset::new(vec![0, 3], 3),
            Err(PfError::IndexOutOfRange { index: 3, dim: 3 })
        ));
        assert_eq!(IndexSubset::new(vec![0, 2], 3).unwrap().one_based(), vec![1, 3]);
    }
}
