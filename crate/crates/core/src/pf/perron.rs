//! Collatz–Wielandt bracketing of the spectral radius.
//!
//! For a strictly positive `w`, `min_i (Mw)_i/w_i <= λ(M) <= max_i (Mw)_i/w_i`.
//! The iteration runs on `A = M + I`, which is primitive whenever `M` is
//! irreducible, so the bracket closes even for periodic `M`. Ratios of
//! `A` are those of `M` shifted by one, hence the bounds are reported for
//! `M` directly.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::matrix::{IncidenceMatrix, WeightVector};
use crate::rational::{self, Rational};

use super::{check_dim, is_irreducible, PfError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerronCertificate {
    pub lower: Rational,
    pub upper: Rational,
    pub witness: WeightVector,
    pub iterations: usize,
    /// False when the iteration budget ran out before `upper - lower`
    /// dropped below the requested width. The bracket is still valid.
    pub width_reached: bool,
}

impl PerronCertificate {
    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    /// Recomputes the Collatz–Wielandt quotients of the stored witness and
    /// checks they reproduce `lower` and `upper` exactly.
    pub fn verify(&self, m: &IncidenceMatrix) -> bool {
        if self.witness.len() != m.dim() || !self.witness.is_strictly_positive() {
            return false;
        }
        let image = m.apply(self.witness.entries());
        let quotients: Vec<Rational> = image
            .iter()
            .zip(self.witness.entries())
            .map(|(a, w)| a / w)
            .collect();
        let min = quotients.iter().min_by(|a, b| rational::cmp(a, b)).expect("nonempty");
        let max = quotients.iter().max_by(|a, b| rational::cmp(a, b)).expect("nonempty");
        *min == self.lower && *max == self.upper
    }

    /// `lambda` lies in the closed bracket.
    pub fn contains(&self, lambda: &Rational) -> bool {
        rational::cmp(&self.lower, lambda).is_le() && rational::cmp(lambda, &self.upper).is_le()
    }
}

/// Power iteration on `M + I` with integer state. `current` holds `w`,
/// `image` holds `(M + I) w`; both stay integral because the start vector is
/// cleared of denominators once.
#[derive(Clone, Debug)]
pub struct PerronIteration {
    shifted: IncidenceMatrix,
    current: Vec<BigUint>,
    image: Vec<BigUint>,
    steps: usize,
    lower_at: usize,
    upper_at: usize,
}

impl PerronIteration {
    pub fn new(m: &IncidenceMatrix) -> Result<Self, PfError> {
        Self::from_start(m, &WeightVector::ones(m.dim()))
    }

    pub fn from_start(m: &IncidenceMatrix, start: &WeightVector) -> Result<Self, PfError> {
        check_dim(m.dim(), start.len())?;
        if !is_irreducible(m) {
            return Err(PfError::NotIrreducible);
        }
        if !start.is_strictly_positive() {
            return Err(PfError::NonPositiveStart);
        }
        let lcm = start
            .entries()
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let current: Vec<BigUint> = start
            .entries()
            .iter()
            .map(|x| {
                (x.numer() * (&lcm / x.denom()))
                    .to_biguint()
                    .expect("positive start entry")
            })
            .collect();
        let shifted = m.shifted();
        let image = product(&shifted, &current);
        let mut it = Self {
            shifted,
            current,
            image,
            steps: 0,
            lower_at: 0,
            upper_at: 0,
        };
        it.locate_extremes();
        Ok(it)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&mut self) {
        let next = product(&self.shifted, &self.image);
        self.current = std::mem::replace(&mut self.image, next);
        self.steps += 1;
        // Both vectors share any common factor; strip it so sizes grow only
        // with the genuine spread of the iterate.
        let g = self
            .current
            .iter()
            .fold(BigUint::zero(), |acc, x| acc.gcd(x));
        if g > BigUint::one() {
            let g2 = self.image.iter().fold(g, |acc, x| acc.gcd(x));
            if g2 > BigUint::one() {
                for x in self.current.iter_mut().chain(self.image.iter_mut()) {
                    *x /= &g2;
                }
            }
        }
        self.locate_extremes();
    }

    fn locate_extremes(&mut self) {
        let n = self.current.len();
        let (mut lo, mut hi) = (0, 0);
        for i in 1..n {
            if self.cmp_quotients(i, lo) == Ordering::Less {
                lo = i;
            }
            if self.cmp_quotients(i, hi) == Ordering::Greater {
                hi = i;
            }
        }
        self.lower_at = lo;
        self.upper_at = hi;
    }

    // image_i / current_i  vs  image_j / current_j, by cross multiplication
    fn cmp_quotients(&self, i: usize, j: usize) -> Ordering {
        (&self.image[i] * &self.current[j]).cmp(&(&self.image[j] * &self.current[i]))
    }

    /// `upper - lower < width`, decided without reducing any fraction.
    pub fn narrower_than(&self, width: &Rational) -> bool {
        let (a, b) = (&self.image[self.lower_at], &self.current[self.lower_at]);
        let (c, d) = (&self.image[self.upper_at], &self.current[self.upper_at]);
        // (c/d - a/b) < p/q  <=>  (c b - a d) q < p b d
        let gap = to_int(&(c * b)) - to_int(&(a * d));
        gap * width.denom() < width.numer() * to_int(&(b * d))
    }

    /// `self.upper()` against `other.lower()`, without building either.
    pub fn cmp_upper_lower(&self, other: &PerronIteration) -> Ordering {
        let (a, b) = (&self.image[self.upper_at], &self.current[self.upper_at]);
        let (c, d) = (&other.image[other.lower_at], &other.current[other.lower_at]);
        (a * d).cmp(&(c * b))
    }

    pub fn lower(&self) -> Rational {
        self.quotient(self.lower_at) - Rational::one()
    }

    pub fn upper(&self) -> Rational {
        self.quotient(self.upper_at) - Rational::one()
    }

    fn quotient(&self, i: usize) -> Rational {
        Rational::new(to_int(&self.image[i]), to_int(&self.current[i]))
    }

    pub fn certificate(&self, width_reached: bool) -> PerronCertificate {
        let witness = WeightVector::new(
            self.current
                .iter()
                .map(|x| Rational::from_integer(to_int(x)))
                .collect(),
        )
        .expect("iterate stays strictly positive");
        PerronCertificate {
            lower: self.lower(),
            upper: self.upper(),
            witness,
            iterations: self.steps,
            width_reached,
        }
    }

    /// Steps until the bracket is narrower than `target_width` or
    /// `max_iterations` steps have been taken in total.
    pub fn run(&mut self, max_iterations: usize, target_width: &Rational) -> PerronCertificate {
        loop {
            if self.narrower_than(target_width) {
                return self.certificate(true);
            }
            if self.steps >= max_iterations {
                return self.certificate(false);
            }
            self.step();
        }
    }
}

fn to_int(x: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, x.clone())
}

fn product(m: &IncidenceMatrix, w: &[BigUint]) -> Vec<BigUint> {
    m.rows()
        .map(|row| {
            row.iter()
                .zip(w)
                .filter(|(a, _)| !a.is_zero())
                .fold(BigUint::zero(), |acc, (a, x)| acc + a * x)
        })
        .collect()
}

/// Certified bracket `[lower, upper]` around `λ(M)` starting from the
/// all-ones vector.
pub fn perron_bounds(
    m: &IncidenceMatrix,
    max_iterations: usize,
    target_width: &Rational,
) -> Result<PerronCertificate, PfError> {
    Ok(PerronIteration::new(m)?.run(max_iterations, target_width))
}

/// As [`perron_bounds`], starting from a caller-supplied positive vector.
/// Starting from a sub-invariant `v` (`Mv <= λv`) gives `upper <= λ` at once.
pub fn perron_bounds_from(
    m: &IncidenceMatrix,
    start: &WeightVector,
    max_iterations: usize,
    target_width: &Rational,
) -> Result<PerronCertificate, PfError> {
    Ok(PerronIteration::from_start(m, start)?.run(max_iterations, target_width))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio, ten_to_minus};

    fn mat(rows: &[&[u64]]) -> IncidenceMatrix {
        IncidenceMatrix::from_u64_rows(rows).unwrap()
    }

    #[test]
    fn one_by_one_is_exact() {
        let cert = perron_bounds(&mat(&[&[2]]), 10, &ten_to_minus(9)).unwrap();
        assert_eq!(cert.lower, int(2));
        assert_eq!(cert.upper, int(2));
        assert_eq!(cert.iterations, 0);
        assert!(cert.width_reached);
        assert!(cert.verify(&mat(&[&[2]])));
    }

    #[test]
    fn periodic_permutation() {
        let m = mat(&[&[0, 1], &[1, 0]]);
        let cert = perron_bounds(&m, 500, &ten_to_minus(9)).unwrap();
        assert!(cert.contains(&int(1)));
        assert!(cert.width() < ten_to_minus(9));
        assert!(cert.verify(&m));
    }

    #[test]
    fn golden_ratio_bracket() {
        let m = mat(&[&[1, 1], &[1, 0]]);
        let cert = perron_bounds(&m, 500, &ten_to_minus(9)).unwrap();
        assert!(cert.width_reached);
        // 1.61803398874 < φ < 1.61803398875
        assert!(cert.lower < ratio(161803398875, 100000000000));
        assert!(cert.upper > ratio(161803398874, 100000000000));
        assert!(cert.width() < ten_to_minus(9));
        assert!(cert.verify(&m));
    }

    #[test]
    fn rejects_reducible() {
        let m = mat(&[&[1, 1], &[0, 1]]);
        assert_eq!(
            perron_bounds(&m, 10, &ten_to_minus(3)),
            Err(PfError::NotIrreducible)
        );
    }

    #[test]
    fn budget_exhaustion_is_not_fatal() {
        let m = mat(&[&[1, 1], &[1, 0]]);
        let cert = perron_bounds(&m, 2, &ten_to_minus(30)).unwrap();
        assert!(!cert.width_reached);
        assert_eq!(cert.iterations, 2);
        assert!(cert.lower < cert.upper);
    }

    #[test]
    fn subinvariant_start_bounds_above() {
        let m = mat(&[&[1, 1], &[1, 0]]);
        let v = WeightVector::from_integers(&[2, 1]).unwrap();
        let cert = perron_bounds_from(&m, &v, 0, &Rational::zero()).unwrap();
        // Mv = (3, 2): quotients 3/2 and 2
        assert_eq!(cert.lower, ratio(3, 2));
        assert_eq!(cert.upper, int(2));
    }

    #[test]
    fn bounds_are_monotone() {
        let m = mat(&[&[0, 2, 1], &[1, 0, 0], &[0, 3, 1]]);
        let mut it = PerronIteration::new(&m).unwrap();
        let (mut lo, mut hi) = (it.lower(), it.upper());
        for _ in 0..40 {
            it.step();
            assert!(it.lower() >= lo);
            assert!(it.upper() <= hi);
            lo = it.lower();
            hi = it.upper();
        }
    }
}
