//! Oracles shared by the integration tests: integer-matrix helpers and an
//! exact characteristic-polynomial root counter.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;

use lamcert::rational::{self, int, ratio};
use lamcert::{IncidenceMatrix, Rational, WeightVector};

pub type Rows = Vec<Vec<u64>>;

pub fn big(x: u64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

pub fn lt(a: &Rational, b: &Rational) -> bool {
    rational::cmp(a, b).is_lt()
}

pub fn le(a: &Rational, b: &Rational) -> bool {
    rational::cmp(a, b).is_le()
}

// ---- graph and matrix oracles ----

pub fn reach(rows: &Rows) -> Vec<Vec<bool>> {
    let n = rows.len();
    let mut r: Vec<Vec<bool>> = rows.iter().map(|row| row.iter().map(|&x| x > 0).collect()).collect();
    for k in 0..n {
        let via = r[k].clone();
        for row in r.iter_mut().filter(|row| row[k]) {
            for (x, &y) in row.iter_mut().zip(&via) {
                *x |= y;
            }
        }
    }
    r
}

pub fn strongly_connected(rows: &Rows) -> bool {
    let n = rows.len();
    if n == 1 {
        return true;
    }
    let r = reach(rows);
    (0..n).all(|i| (0..n).all(|j| r[i][j]))
}

pub fn random_rows<R: Rng>(rng: &mut R, n: usize, max: u64) -> Rows {
    loop {
        let density = rng.gen_range(0.3..0.9);
        let rows: Rows = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| if rng.gen_bool(density) { rng.gen_range(1..=max) } else { 0 })
                    .collect()
            })
            .collect();
        if strongly_connected(&rows) {
            return rows;
        }
    }
}

pub fn matrix(rows: &Rows) -> IncidenceMatrix {
    IncidenceMatrix::from_u64_rows(rows).expect("square")
}

pub fn apply(rows: &Rows, v: &[Rational]) -> Vec<Rational> {
    rows.iter()
        .map(|row| row.iter().zip(v).fold(int(0), |acc, (&a, x)| acc + big(a) * x))
        .collect()
}

pub fn max_quotient(rows: &Rows, v: &[Rational]) -> Rational {
    apply(rows, v)
        .iter()
        .zip(v)
        .map(|(a, b)| a / b)
        .max_by(rational::cmp)
        .expect("nonempty")
}

pub fn positive_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    (0..n).map(|_| ratio(rng.gen_range(1..=6), rng.gen_range(1..=3))).collect()
}

pub fn weights(v: &[Rational]) -> WeightVector {
    WeightVector::new(v.to_vec()).expect("positive")
}

// ---- characteristic polynomial and Sturm counts ----

/// Coefficients, constant term first, without trailing zeros.
pub type Poly = Vec<Rational>;

pub fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![int(0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn add(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![int(0); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    trim(out)
}

pub fn scale(a: &Poly, c: &Rational) -> Poly {
    trim(a.iter().map(|x| x * c).collect())
}

/// Quotient and remainder of `a / b`, `b` nonzero.
pub fn divide(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut r = a.clone();
    let lead = b.last().expect("nonzero divisor").clone();
    let mut q = vec![int(0); a.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().expect("nonempty") / &lead;
        for (i, y) in b.iter().enumerate() {
            r[shift + i] -= &c * y;
        }
        q[shift] = c;
        r = trim(r);
    }
    (trim(q), r)
}

pub fn derivative(a: &Poly) -> Poly {
    trim(a.iter().enumerate().skip(1).map(|(i, x)| x * int(i as i64)).collect())
}

pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = divide(&x, &y).1;
        x = y;
        y = r;
    }
    x
}

pub fn eval(p: &Poly, x: &Rational) -> Rational {
    p.iter().rev().fold(int(0), |acc, c| acc * x + c)
}

pub fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, bool)>) {
        let n = used.len();
        if prefix.len() == n {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| prefix[i] > prefix[j])
                .count();
            out.push((prefix.clone(), inversions % 2 == 1));
            return;
        }
        for k in 0..n {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                go(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `det(xI - M)` by the permutation expansion.
pub fn char_poly(rows: &Rows) -> Poly {
    let n = rows.len();
    let mut total = Vec::new();
    for (sigma, odd) in permutations(n) {
        let mut term: Poly = vec![int(1)];
        for (i, &j) in sigma.iter().enumerate() {
            let constant = -big(rows[i][j]);
            let factor = if i == j { vec![constant, int(1)] } else { trim(vec![constant]) };
            term = mul(&term, &factor);
        }
        total = add(&total, &if odd { scale(&term, &int(-1)) } else { term });
    }
    total
}

/// Sturm chain of the square-free part; counts distinct real roots above a
/// point, the point itself excluded.
pub struct Sturm {
    chain: Vec<Poly>,
    q: Poly,
}

impl Sturm {
    pub fn new(p: &Poly) -> Self {
        let g = gcd(p, &derivative(p));
        let q = divide(p, &g).0;
        let mut chain = vec![q.clone(), derivative(&q)];
        while !chain.last().expect("two entries").is_empty() {
            let k = chain.len();
            let r = divide(&chain[k - 2], &chain[k - 1]).1;
            chain.push(scale(&r, &int(-1)));
        }
        chain.pop();
        Sturm { chain, q }
    }

    fn variations(signs: impl Iterator<Item = i32>) -> usize {
        let nonzero: Vec<i32> = signs.filter(|&s| s != 0).collect();
        nonzero.windows(2).filter(|w| w[0] != w[1]).count()
    }

    fn sign(r: &Rational) -> i32 {
        if r.is_positive() {
            1
        } else if r.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn count_above(&self, x: &Rational) -> usize {
        let at = Self::variations(self.chain.iter().map(|p| Self::sign(&eval(p, x))));
        let infinity = Self::variations(self.chain.iter().map(|p| Self::sign(p.last().expect("nonzero"))));
        at - infinity
    }

    pub fn is_root(&self, x: &Rational) -> bool {
        eval(&self.q, x).is_zero()
    }

    /// Largest real root, by bisection on the root count, to within `eps`.
    pub fn bisect_largest(&self, eps: &Rational) -> (Rational, Rational) {
        let bound = self
            .q
            .iter()
            .map(|c| (c / self.q.last().expect("nonzero")).abs())
            .fold(int(1), |acc, c| acc + c);
        let (mut lo, mut hi) = (-bound.clone(), bound);
        while !lt(&(&hi - &lo), eps) {
            let mid = (&lo + &hi) / int(2);
            if self.count_above(&mid) == 0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo, hi)
    }
}
