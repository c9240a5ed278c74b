use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::matrix::{IncidenceMatrix, WeightVector};
use crate::pf::{check_subinvariance, is_irreducible, row_copy, PfError};
use crate::rational::{self, Rational};

use super::DiscError;

pub type Label = String;

pub(crate) fn index_labels(
    labels: &[Label],
    into: &mut HashMap<Label, usize>,
) -> Result<(), DiscError> {
    for label in labels {
        let next = into.len();
        if into.insert(label.clone(), next).is_some() {
            return Err(DiscError::DuplicateLabel(label.clone()));
        }
    }
    Ok(())
}

/// Counts a multiset of labels into a row of length `width`.
pub(crate) fn count_row(
    image: &[Label],
    columns: &HashMap<Label, usize>,
    width: usize,
    context: &str,
) -> Result<Vec<BigUint>, DiscError> {
    let mut row = vec![BigUint::zero(); width];
    for label in image {
        let &j = columns.get(label).ok_or_else(|| DiscError::UnknownLabel {
            label: label.clone(),
            context: context.to_string(),
        })?;
        row[j] += 1u32;
    }
    Ok(row)
}

/// An admissible disc system `E_1..E_k` together with its image data, a
/// rational weight vector standing in for the transverse measure and a
/// rational growth surrogate `λ` with `Mv <= λv`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscSystem {
    labels: Vec<Label>,
    images: Vec<Vec<Label>>,
    weights: WeightVector,
    lambda: Rational,
    matrix: IncidenceMatrix,
}

impl DiscSystem {
    pub fn new(
        labels: Vec<Label>,
        images: Vec<Vec<Label>>,
        weights: WeightVector,
        lambda: Rational,
    ) -> Result<Self, DiscError> {
        if labels.is_empty() {
            return Err(DiscError::Malformed("disc system has no discs".into()));
        }
        if images.len() != labels.len() || weights.len() != labels.len() {
            return Err(PfError::DimensionMismatch {
                expected: labels.len(),
                found: if images.len() != labels.len() {
                    images.len()
                } else {
                    weights.len()
                },
            }
            .into());
        }
        let mut columns = HashMap::new();
        index_labels(&labels, &mut columns)?;
        let mut rows = Vec::with_capacity(labels.len());
        for (label, image) in labels.iter().zip(&images) {
            if image.is_empty() {
                return Err(DiscError::EmptyImage(label.clone()));
            }
            rows.push(count_row(image, &columns, labels.len(), &format!("image of {label}"))?);
        }
        let matrix = IncidenceMatrix::from_rows(rows)?;
        if !is_irreducible(&matrix) {
            return Err(PfError::NotIrreducible.into());
        }
        let report = check_subinvariance(&matrix, &weights, &lambda)?;
        if let Some(&row) = report.violated_indices.first() {
            return Err(DiscError::InvariantViolation {
                row,
                reason: "(Mv)_i > λ v_i".into(),
            });
        }
        Ok(Self {
            labels,
            images,
            weights,
            lambda,
            matrix,
        })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn images(&self) -> &[Vec<Label>] {
        &self.images
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `M(i,j)` = multiplicity of `E_j` in the image of `E_i`.
    pub fn incidence_matrix(&self) -> &IncidenceMatrix {
        &self.matrix
    }

    /// Weighted intersection at level `j` of a surface meeting the handles
    /// in the given multiset of discs.
    pub fn weighted_intersection_of(&self, components: &[Label], level: i32) -> Result<Rational, DiscError> {
        let mut columns = HashMap::new();
        index_labels(&self.labels, &mut columns)?;
        let counts = count_row(components, &columns, self.len(), "weighted intersection")?;
        weighted_intersection(&counts, &self.weights, &self.lambda, level)
    }
}

/// `Σ_l λ^j ν_{i(l)}` over the components counted in `counts`
/// (`counts[i]` components carried by disc `i`).
pub fn weighted_intersection(
    counts: &[BigUint],
    weights: &WeightVector,
    lambda: &Rational,
    level: i32,
) -> Result<Rational, DiscError> {
    if counts.len() != weights.len() {
        return Err(PfError::DimensionMismatch {
            expected: weights.len(),
            found: counts.len(),
        }
        .into());
    }
    if level < 0 && lambda.is_zero() {
        return Err(DiscError::Malformed("negative level needs λ > 0".into()));
    }
    let scale = if level >= 0 {
        crate::rational::pow(lambda, level as u32)
    } else {
        crate::rational::pow(&lambda.recip(), level.unsigned_abs())
    };
    let base = counts
        .iter()
        .zip(weights.entries())
        .fold(Rational::zero(), |acc, (c, w)| acc + crate::rational::from_biguint(c) * w);
    Ok(base * scale)
}

/// The base system enlarged by new discs `D_{k+1}..D_{k+l}`. The last new
/// disc is the tightening disc `Δ`, parallel to the first base disc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enlargement {
    base: DiscSystem,
    new_labels: Vec<Label>,
    new_weights: Vec<Rational>,
    new_images: Vec<Vec<Label>>,
}

impl Enlargement {
    /// Structural validation only (labels and shapes). The growth
    /// invariants are checked by [`build_bar_matrix`].
    pub fn new(
        base: DiscSystem,
        new_labels: Vec<Label>,
        new_weights: Vec<Rational>,
        new_images: Vec<Vec<Label>>,
    ) -> Result<Self, DiscError> {
        if new_weights.len() != new_labels.len() || new_images.len() != new_labels.len() {
            return Err(PfError::DimensionMismatch {
                expected: new_labels.len(),
                found: new_weights.len().min(new_images.len()),
            }
            .into());
        }
        if let Some(i) = new_weights.iter().position(|w| *w < Rational::zero()) {
            return Err(DiscError::Malformed(format!(
                "weight of new disc {:?} is negative",
                new_labels[i]
            )));
        }
        let e = Self {
            base,
            new_labels,
            new_weights,
            new_images,
        };
        e.assemble()?;
        Ok(e)
    }

    pub fn base(&self) -> &DiscSystem {
        &self.base
    }

    pub fn new_labels(&self) -> &[Label] {
        &self.new_labels
    }

    pub fn new_weights(&self) -> &[Rational] {
        &self.new_weights
    }

    pub fn new_images(&self) -> &[Vec<Label>] {
        &self.new_images
    }

    pub fn dim(&self) -> usize {
        self.base.len() + self.new_labels.len()
    }

    /// Zero-based index of `Δ` in the enlarged ordering.
    pub fn delta_index(&self) -> Option<usize> {
        (!self.new_labels.is_empty()).then(|| self.dim() - 1)
    }

    /// Zero-based index of the base disc parallel to `Δ`.
    pub fn parallel_to(&self) -> usize {
        0
    }

    pub fn all_labels(&self) -> Vec<Label> {
        self.base
            .labels()
            .iter()
            .chain(&self.new_labels)
            .cloned()
            .collect()
    }

    /// Base weights followed by new weights.
    pub fn weight_vector(&self) -> WeightVector {
        WeightVector::new(
            self.base
                .weights()
                .entries()
                .iter()
                .chain(&self.new_weights)
                .cloned()
                .collect(),
        )
        .expect("base weights are not all zero")
    }

    pub(crate) fn assemble(&self) -> Result<IncidenceMatrix, DiscError> {
        let labels = self.all_labels();
        let mut columns = HashMap::new();
        index_labels(&labels, &mut columns)?;
        let n = labels.len();
        let mut rows: Vec<Vec<BigUint>> = self
            .base
            .incidence_matrix()
            .rows()
            .map(|r| {
                let mut row = r.to_vec();
                row.resize(n, BigUint::zero());
                row
            })
            .collect();
        for (label, image) in self.new_labels.iter().zip(&self.new_images) {
            if image.is_empty() {
                return Err(DiscError::EmptyImage(label.clone()));
            }
            rows.push(count_row(image, &columns, n, &format!("image of {label}"))?);
        }
        Ok(IncidenceMatrix::from_rows(rows)?)
    }
}

/// Assembles `M̄ = [[M, 0], [*, *]]` and checks the enlargement invariants:
/// `v_Δ < v_{E_1}` and `M̄v <= λv`.
pub fn build_bar_matrix(e: &Enlargement) -> Result<IncidenceMatrix, DiscError> {
    let mbar = e.assemble()?;
    let k = e.base.len();
    debug_assert!((0..k).all(|i| (k..mbar.dim()).all(|j| !mbar.is_positive(i, j))));
    if let Some(delta) = e.delta_index() {
        if rational::cmp(&e.new_weights[delta - k], &e.base.weights()[e.parallel_to()]).is_ge() {
            return Err(DiscError::InvariantViolation {
                row: delta,
                reason: "tightening disc is not lighter than the disc it is parallel to".into(),
            });
        }
    }
    let report = check_subinvariance(&mbar, &e.weight_vector(), e.base.lambda())?;
    if let Some(&row) = report.violated_indices.first() {
        return Err(DiscError::InvariantViolation {
            row,
            reason: "(M̄v)_i > λ v_i".into(),
        });
    }
    Ok(mbar)
}

/// `M̂`: the row of `Δ` copied over the row of the disc it is parallel to.
pub fn apply_tightening(
    mbar: &IncidenceMatrix,
    delta: usize,
    target: usize,
) -> Result<IncidenceMatrix, DiscError> {
    Ok(row_copy(mbar, delta, target)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn labels(xs: &[&str]) -> Vec<Label> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn two_disc_system() -> DiscSystem {
        DiscSystem::new(
            labels(&["E1", "E2"]),
            vec![labels(&["E1", "E2"]), labels(&["E1", "E2"])],
            WeightVector::from_integers(&[1, 1]).unwrap(),
            int(2),
        )
        .unwrap()
    }

    #[test]
    fn incidence_examples() {
        let single = DiscSystem::new(
            labels(&["E1"]),
            vec![labels(&["E1", "E1"])],
            WeightVector::from_integers(&[1]).unwrap(),
            int(2),
        )
        .unwrap();
        assert_eq!(single.incidence_matrix(), &IncidenceMatrix::from_u64_rows(&[[2]]).unwrap());

        let sys = two_disc_system();
        assert_eq!(
            sys.incidence_matrix(),
            &IncidenceMatrix::from_u64_rows(&[[1, 1], [1, 1]]).unwrap()
        );

        let sys = DiscSystem::new(
            labels(&["E1", "E2"]),
            vec![labels(&["E2"]), labels(&["E1", "E2"])],
            WeightVector::from_integers(&[1, 2]).unwrap(),
            int(2),
        )
        .unwrap();
        assert_eq!(
            sys.incidence_matrix(),
            &IncidenceMatrix::from_u64_rows(&[[0, 1], [1, 1]]).unwrap()
        );
    }

    #[test]
    fn system_validation_errors() {
        let err = DiscSystem::new(
            labels(&["E1"]),
            vec![labels(&["E9"])],
            WeightVector::from_integers(&[1]).unwrap(),
            int(1),
        )
        .unwrap_err();
        assert!(matches!(err, DiscError::UnknownLabel { ref label, .. } if label == "E9"));

        let err = DiscSystem::new(
            labels(&["E1", "E2"]),
            vec![labels(&["E1"]), labels(&["E2"])],
            WeightVector::from_integers(&[1, 1]).unwrap(),
            int(1),
        )
        .unwrap_err();
        assert_eq!(err, DiscError::Pf(PfError::NotIrreducible));

        let err = DiscSystem::new(
            labels(&["E1"]),
            vec![vec![]],
            WeightVector::from_integers(&[1]).unwrap(),
            int(1),
        )
        .unwrap_err();
        assert_eq!(err, DiscError::EmptyImage("E1".into()));

        let err = DiscSystem::new(
            labels(&["E1", "E2"]),
            vec![labels(&["E1", "E2"]), labels(&["E1", "E2"])],
            WeightVector::from_integers(&[1, 1]).unwrap(),
            ratio(3, 2),
        )
        .unwrap_err();
        assert!(matches!(err, DiscError::InvariantViolation { row: 0, .. }));
    }

    #[test]
    fn weighted_intersection_examples() {
        let w = WeightVector::new(vec![ratio(1, 2), ratio(1, 3), ratio(1, 4)]).unwrap();
        let zero = vec![BigUint::zero(); 3];
        assert_eq!(weighted_intersection(&zero, &w, &int(2), 1).unwrap(), int(0));

        let counts: Vec<BigUint> = [2u32, 0, 1].iter().map(|&c| BigUint::from(c)).collect();
        assert_eq!(weighted_intersection(&counts, &w, &int(2), 1).unwrap(), ratio(5, 2));

        let single: Vec<BigUint> = [0u32, 1, 0].iter().map(|&c| BigUint::from(c)).collect();
        assert_eq!(weighted_intersection(&single, &w, &int(2), 0).unwrap(), ratio(1, 3));

        // negative levels scale by λ^{-j}
        assert_eq!(weighted_intersection(&counts, &w, &int(2), -1).unwrap(), ratio(5, 8));
    }

    #[test]
    fn weighted_intersection_by_label() {
        let sys = two_disc_system();
        let got = sys
            .weighted_intersection_of(&labels(&["E1", "E1", "E2"]), 2)
            .unwrap();
        assert_eq!(got, int(12));
        assert!(matches!(
            sys.weighted_intersection_of(&labels(&["X"]), 0),
            Err(DiscError::UnknownLabel { .. })
        ));
    }

    #[test]
    fn bar_matrix_examples() {
        let base = two_disc_system();
        let none = Enlargement::new(base.clone(), vec![], vec![], vec![]).unwrap();
        assert_eq!(&build_bar_matrix(&none).unwrap(), base.incidence_matrix());

        let e = Enlargement::new(
            base,
            labels(&["D3"]),
            vec![ratio(3, 4)],
            vec![labels(&["E1"])],
        )
        .unwrap();
        let mbar = build_bar_matrix(&e).unwrap();
        assert_eq!(
            mbar,
            IncidenceMatrix::from_u64_rows(&[[1, 1, 0], [1, 1, 0], [1, 0, 0]]).unwrap()
        );
        for i in 0..2 {
            assert!(!mbar.is_positive(i, 2));
        }
        let mhat = apply_tightening(&mbar, 2, 0).unwrap();
        assert_eq!(
            mhat,
            IncidenceMatrix::from_u64_rows(&[[1, 0, 0], [1, 1, 0], [1, 0, 0]]).unwrap()
        );
        assert_eq!(mhat.row(1), mbar.row(1));
        assert_eq!(mhat.row(2), mbar.row(2));
    }

    #[test]
    fn bar_matrix_invariants() {
        let heavy = Enlargement::new(
            two_disc_system(),
            labels(&["D3"]),
            vec![int(1)],
            vec![labels(&["E1"])],
        )
        .unwrap();
        assert!(matches!(
            build_bar_matrix(&heavy),
            Err(DiscError::InvariantViolation { row: 2, .. })
        ));

        let growing = Enlargement::new(
            two_disc_system(),
            labels(&["D3"]),
            vec![ratio(1, 2)],
            vec![labels(&["E1", "E2"])],
        )
        .unwrap();
        // (M̄v)_3 = 2 > λ v_3 = 1
        assert!(matches!(
            build_bar_matrix(&growing),
            Err(DiscError::InvariantViolation { row: 2, .. })
        ));
    }

    #[test]
    fn identical_rows_make_tightening_trivial() {
        let m = IncidenceMatrix::from_u64_rows(&[[1, 0, 0], [1, 1, 0], [1, 0, 0]]).unwrap();
        assert_eq!(apply_tightening(&m, 2, 0).unwrap(), m);
    }
}
