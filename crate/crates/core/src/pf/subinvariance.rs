use crate::matrix::{IncidenceMatrix, IndexSubset, WeightVector};
use std::cmp::Ordering;

use crate::rational::{self, pow, Rational};

use super::{check_dim, is_irreducible, submatrix, PfError};

/// Outcome of comparing `Mv` (or a power) against `λv` entrywise.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SubinvarianceReport {
    pub holds: bool,
    /// Indices with strict inequality, sorted.
    pub strict_indices: Vec<usize>,
    /// Indices where the inequality fails, sorted.
    pub violated_indices: Vec<usize>,
}

impl SubinvarianceReport {
    fn compare(lhs: &[Rational], rhs: &[Rational]) -> Self {
        let mut report = Self::default();
        for (i, (a, b)) in lhs.iter().zip(rhs).enumerate() {
            match rational::cmp(a, b) {
                Ordering::Less => report.strict_indices.push(i),
                Ordering::Greater => report.violated_indices.push(i),
                Ordering::Equal => {}
            }
        }
        report.holds = report.violated_indices.is_empty();
        report
    }
}

fn scaled(v: &WeightVector, factor: &Rational) -> Vec<Rational> {
    v.entries().iter().map(|x| x * factor).collect()
}

/// Compares `Mv` with `λv`.
pub fn check_subinvariance(
    m: &IncidenceMatrix,
    v: &WeightVector,
    lambda: &Rational,
) -> Result<SubinvarianceReport, PfError> {
    check_dim(m.dim(), v.len())?;
    Ok(SubinvarianceReport::compare(
        &m.apply(v.entries()),
        &scaled(v, lambda),
    ))
}

/// Compares `M^p v` with `λ^p v`. Given `Mv <= λv` this can only hold, so a
/// violation is returned as [`PfError::LemmaViolation`].
pub fn power_subinvariance(
    m: &IncidenceMatrix,
    v: &WeightVector,
    lambda: &Rational,
    p: u32,
) -> Result<SubinvarianceReport, PfError> {
    if p == 0 {
        return Err(PfError::PreconditionFailed("power must be at least 1".into()));
    }
    if !check_subinvariance(m, v, lambda)?.holds {
        return Err(PfError::PreconditionFailed("Mv <= λv does not hold".into()));
    }
    let report = SubinvarianceReport::compare(
        &m.apply_power(v.entries(), p),
        &scaled(v, &pow(lambda, p)),
    );
    if let Some(&index) = report.violated_indices.first() {
        return Err(PfError::LemmaViolation {
            lemma: "power sub-invariance",
            index,
            power: p,
        });
    }
    Ok(report)
}

/// Checks the chain `N^p v <= M^p v <= λ^p v`.
///
/// `strict_indices` holds the indices where the chain holds and
/// `(M^p v)_i < λ^p v_i`. The first link is guaranteed when `N <= M`
/// entrywise; under the weaker hypothesis `Nv <= Mv` alone it can fail, and
/// such indices are reported in `violated_indices`.
pub fn dominated_power_check(
    n: &IncidenceMatrix,
    m: &IncidenceMatrix,
    v: &WeightVector,
    lambda: &Rational,
    p: u32,
) -> Result<SubinvarianceReport, PfError> {
    check_dim(m.dim(), n.dim())?;
    check_dim(m.dim(), v.len())?;
    if p == 0 {
        return Err(PfError::PreconditionFailed("power must be at least 1".into()));
    }
    let mv = m.apply(v.entries());
    let nv = n.apply(v.entries());
    if let Some(i) = (0..v.len()).find(|&i| rational::cmp(&nv[i], &mv[i]).is_gt()) {
        return Err(PfError::PreconditionFailed(format!(
            "Nv <= Mv fails at index {i}"
        )));
    }
    if !check_subinvariance(m, v, lambda)?.holds {
        return Err(PfError::PreconditionFailed("Mv <= λv does not hold".into()));
    }

    let np = n.apply_power(v.entries(), p);
    let mp = m.apply_power(v.entries(), p);
    let bound = scaled(v, &pow(lambda, p));
    let mut report = SubinvarianceReport::default();
    for i in 0..v.len() {
        if rational::cmp(&np[i], &mp[i]).is_gt() || rational::cmp(&mp[i], &bound[i]).is_gt() {
            report.violated_indices.push(i);
        } else if rational::cmp(&mp[i], &bound[i]).is_lt() {
            report.strict_indices.push(i);
        }
    }
    report.holds = report.violated_indices.is_empty();
    Ok(report)
}

/// Searches for the smallest power `p <= p_max` and, for that power, the
/// smallest index `i` in `subset` with `(M^p v)_i < λ^p v_i`. Such a pair
/// certifies `λ(N) < λ` for the irreducible submatrix `N` on `subset`.
pub fn submatrix_strict_drop(
    m: &IncidenceMatrix,
    subset: &IndexSubset,
    v: &WeightVector,
    lambda: &Rational,
    p_max: u32,
) -> Result<Option<(u32, usize)>, PfError> {
    if !check_subinvariance(m, v, lambda)?.holds {
        return Err(PfError::PreconditionFailed("Mv <= λv does not hold".into()));
    }
    if !is_irreducible(&submatrix(m, subset)?) {
        return Err(PfError::SubmatrixNotIrreducible);
    }
    let mut power = v.entries().to_vec();
    let mut lambda_p = Rational::from_integer(1.into());
    for p in 1..=p_max {
        power = m.apply(&power);
        lambda_p *= lambda;
        if let Some(&i) = subset
            .indices()
            .iter()
            .find(|&&i| rational::cmp(&power[i], &(&lambda_p * &v[i])).is_lt())
        {
            return Ok(Some((p, i)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn mat(rows: &[&[u64]]) -> IncidenceMatrix {
        IncidenceMatrix::from_u64_rows(rows).unwrap()
    }

    fn wv(xs: &[i64]) -> WeightVector {
        WeightVector::from_integers(xs).unwrap()
    }

    #[test]
    fn subinvariance_examples() {
        let r = check_subinvariance(&mat(&[&[1, 1], &[1, 0]]), &wv(&[2, 1]), &int(2)).unwrap();
        assert!(r.holds);
        assert_eq!(r.strict_indices, vec![0]);

        let r = check_subinvariance(&IncidenceMatrix::identity(2), &wv(&[1, 1]), &int(1)).unwrap();
        assert!(r.holds);
        assert!(r.strict_indices.is_empty());

        let r = check_subinvariance(&mat(&[&[0, 2], &[2, 0]]), &wv(&[1, 1]), &int(1)).unwrap();
        assert!(!r.holds);
        assert_eq!(r.violated_indices, vec![0, 1]);
    }

    #[test]
    fn subinvariance_dimension_mismatch() {
        let err = check_subinvariance(&mat(&[&[1]]), &wv(&[1, 1]), &int(1)).unwrap_err();
        assert_eq!(err, PfError::DimensionMismatch { expected: 1, found: 2 });
    }

    #[test]
    fn power_examples() {
        let fib = mat(&[&[1, 1], &[1, 0]]);
        // M^3 v = (10, 6) <= (16, 8)
        let r = power_subinvariance(&fib, &wv(&[2, 1]), &int(2), 3).unwrap();
        assert!(r.holds);
        assert_eq!(r.strict_indices, vec![0, 1]);

        let id = IncidenceMatrix::identity(2);
        for p in 1..6 {
            let r = power_subinvariance(&id, &wv(&[1, 1]), &int(1), p).unwrap();
            assert!(r.holds && r.strict_indices.is_empty());
        }

        let swap = mat(&[&[0, 1], &[1, 0]]);
        let r = power_subinvariance(&swap, &wv(&[1, 1]), &int(1), 2).unwrap();
        assert!(r.holds && r.strict_indices.is_empty());
    }

    #[test]
    fn power_requires_base_case() {
        let m = mat(&[&[0, 2], &[2, 0]]);
        assert!(matches!(
            power_subinvariance(&m, &wv(&[1, 1]), &int(1), 2),
            Err(PfError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn dominated_examples() {
        let fib = mat(&[&[1, 1], &[1, 0]]);
        // M^2 v = (5, 3) < (8, 4)
        let r = dominated_power_check(&fib, &fib, &wv(&[2, 1]), &int(2), 2).unwrap();
        assert!(r.holds);
        assert_eq!(r.strict_indices, vec![0, 1]);

        let r = dominated_power_check(&IncidenceMatrix::zeros(2), &fib, &wv(&[2, 1]), &int(2), 1)
            .unwrap();
        assert!(r.holds);
        assert_eq!(r.strict_indices, vec![0]);

        let ones = mat(&[&[1, 1], &[1, 1]]);
        let zeroed = mat(&[&[1, 0], &[1, 1]]);
        let r = dominated_power_check(&zeroed, &ones, &wv(&[1, 1]), &int(2), 1).unwrap();
        assert!(r.holds);
        // (Mv)_1 = 2 = λ v_1, so index 0 is not strict for M; (Nv)_1 = 1 < 2
        assert!(r.strict_indices.is_empty());
        assert!(zeroed.apply(wv(&[1, 1]).entries())[0] < int(2));
    }

    #[test]
    fn vector_domination_alone_does_not_propagate() {
        // Nv = Mv = (2, 0) but N^2 v = (2, 0) > M^2 v = (0, 0).
        let m = mat(&[&[0, 2], &[0, 0]]);
        let n = mat(&[&[1, 1], &[0, 0]]);
        let r = dominated_power_check(&n, &m, &wv(&[1, 1]), &int(2), 2).unwrap();
        assert!(!r.holds);
        assert_eq!(r.violated_indices, vec![0]);
        // the λ-bound for N itself still holds
        assert!(power_subinvariance(&n, &wv(&[1, 1]), &int(2), 2).unwrap().holds);
    }

    #[test]
    fn dominated_preconditions() {
        let fib = mat(&[&[1, 1], &[1, 0]]);
        let big = mat(&[&[2, 2], &[2, 2]]);
        assert!(matches!(
            dominated_power_check(&big, &fib, &wv(&[2, 1]), &int(2), 1),
            Err(PfError::PreconditionFailed(_))
        ));
        assert!(matches!(
            dominated_power_check(&fib, &fib, &wv(&[2, 1]), &ratio(1, 2), 1),
            Err(PfError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn strict_drop_examples() {
        let fib = mat(&[&[1, 1], &[1, 0]]);
        let got =
            submatrix_strict_drop(&fib, &IndexSubset::full(2), &wv(&[2, 1]), &int(2), 4).unwrap();
        assert_eq!(got, Some((1, 0)));

        let cycle = mat(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let got = submatrix_strict_drop(&cycle, &IndexSubset::full(3), &wv(&[1, 1, 1]), &int(1), 12)
            .unwrap();
        assert_eq!(got, None);

        // tightened matrix of the worked example, SCC {2}
        let hat = mat(&[&[1, 0, 0], &[1, 1, 0], &[1, 0, 0]]);
        let v = WeightVector::new(vec![int(1), int(1), ratio(3, 4)]).unwrap();
        let scc = IndexSubset::new(vec![1], 3).unwrap();
        assert_eq!(
            submatrix_strict_drop(&hat, &scc, &v, &int(2), 6).unwrap(),
            Some((2, 1))
        );
    }

    #[test]
    fn strict_drop_needs_irreducible_submatrix() {
        let m = mat(&[&[1, 1], &[0, 1]]);
        assert_eq!(
            submatrix_strict_drop(&m, &IndexSubset::full(2), &wv(&[1, 1]), &int(2), 3),
            Err(PfError::SubmatrixNotIrreducible)
        );
    }
}
