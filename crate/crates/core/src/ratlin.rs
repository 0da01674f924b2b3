//! Exact rational linear algebra.
//!
//! Everything here is value-semantic and arbitrary precision: determinants of
//! the tiling basis grow like `p^n + q^n` and fixed-width integers would wrap
//! silently. Matrices are small and square, so the algorithms are the plain
//! textbook ones (Gaussian elimination, cofactors, Gauss-Jordan) carried out
//! over `BigRational`.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. Always stored reduced with a positive denominator,
/// so `==` is structural equality.
pub type Rational = BigRational;

pub fn rat(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"a/b"` or a plain integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let err = |reason: &str| Error::Parse {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    if t.is_empty() {
        return Err(err("empty rational"));
    }
    match t.split_once('/') {
        Some((a, b)) => {
            let num = BigInt::from_str(a.trim()).map_err(|_| err("bad numerator"))?;
            let den = BigInt::from_str(b.trim()).map_err(|_| err("bad denominator"))?;
            if den.is_zero() {
                return Err(err("zero denominator"));
            }
            Ok(Rational::new(num, den))
        }
        None => BigInt::from_str(t)
            .map(Rational::from_integer)
            .map_err(|_| err("not an integer or a/b fraction")),
    }
}

/// Formats a rational as `a` or `a/b`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact vector of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatVec(Vec<Rational>);

impl RatVec {
    pub fn new(entries: Vec<Rational>) -> Self {
        RatVec(entries)
    }

    pub fn zeros(n: usize) -> Self {
        RatVec(vec![Rational::zero(); n])
    }

    /// Standard unit vector `e_i` (0-based `i`).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Rational::one();
        v
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        RatVec(entries.iter().map(|&x| rat(x)).collect())
    }

    pub fn from_bigints(entries: &[BigInt]) -> Self {
        RatVec(entries.iter().cloned().map(Rational::from_integer).collect())
    }

    /// Comma-separated rationals, e.g. `"5,0"` or `"1/2, 5/2"`.
    pub fn parse(s: &str) -> Result<Self> {
        s.split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()
            .map(RatVec)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn entries_mut(&mut self) -> &mut [Rational] {
        &mut self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn scale(&self, s: &Rational) -> RatVec {
        RatVec(self.0.iter().map(|x| x * s).collect())
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    /// The entries as integers, if every entry is integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.0
            .iter()
            .map(|x| x.is_integer().then(|| x.to_integer()))
            .collect()
    }

    fn check_len(&self, other: &RatVec) {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
    }
}

impl Index<usize> for RatVec {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl<'a> Add<&'a RatVec> for &'a RatVec {
    type Output = RatVec;
    fn add(self, rhs: &RatVec) -> RatVec {
        self.check_len(rhs);
        RatVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a RatVec> for &'a RatVec {
    type Output = RatVec;
    fn sub(self, rhs: &RatVec) -> RatVec {
        self.check_len(rhs);
        RatVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RatVec {
    type Output = RatVec;
    fn neg(self) -> RatVec {
        RatVec(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", fmt_rational(x))?;
        }
        write!(f, ")")
    }
}

/// Square matrix of rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMat {
    n: usize,
    entries: Vec<Rational>,
}

impl RatMat {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        RatMat { n, entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| Rational::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    /// Panics unless `rows` is square and non-empty.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let n = rows.len();
        assert!(n > 0, "empty matrix");
        assert!(rows.iter().all(|r| r.len() == n), "matrix is not square");
        RatMat {
            n,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    pub fn from_cols(cols: &[RatVec]) -> Self {
        let n = cols.len();
        assert!(cols.iter().all(|c| c.len() == n), "matrix is not square");
        Self::from_fn(n, |i, j| cols[j][i].clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.n + j] = v;
    }

    pub fn col(&self, j: usize) -> RatVec {
        RatVec((0..self.n).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn cols(&self) -> Vec<RatVec> {
        (0..self.n).map(|j| self.col(j)).collect()
    }

    pub fn row(&self, i: usize) -> RatVec {
        RatVec(self.entries[i * self.n..(i + 1) * self.n].to_vec())
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn transpose(&self) -> RatMat {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, s: &Rational) -> RatMat {
        RatMat {
            n: self.n,
            entries: self.entries.iter().map(|x| x * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &RatVec) -> RatVec {
        assert_eq!(self.n, v.len(), "dimension mismatch");
        RatVec(
            (0..self.n)
                .map(|i| {
                    (0..self.n).fold(Rational::zero(), |acc, j| {
                        if self.get(i, j).is_zero() {
                            acc
                        } else {
                            acc + self.get(i, j) * &v[j]
                        }
                    })
                })
                .collect(),
        )
    }

    /// `self · k` for an integer coefficient vector.
    pub fn mul_int_vec(&self, k: &[BigInt]) -> RatVec {
        self.mul_vec(&RatVec::from_bigints(k))
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_integer())
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.entries
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Converts an integral matrix to an [`IntMat`]; `None` if any entry is fractional.
    pub fn to_int(&self) -> Option<IntMat> {
        if !self.is_integral() {
            return None;
        }
        Some(IntMat {
            n: self.n,
            entries: self.entries.iter().map(|x| x.to_integer()).collect(),
        })
    }

    pub fn det(&self) -> Rational {
        det(self)
    }

    pub fn adjugate(&self) -> RatMat {
        adjugate(self)
    }

    pub fn inverse(&self) -> Result<RatMat> {
        inverse(self)
    }

    fn minor(&self, row: usize, col: usize) -> RatMat {
        let m = self.n - 1;
        Self::from_fn(m, |i, j| {
            let si = if i < row { i } else { i + 1 };
            let sj = if j < col { j } else { j + 1 };
            self.get(si, sj).clone()
        })
    }
}

impl Mul for &RatMat {
    type Output = RatMat;
    fn mul(self, rhs: &RatMat) -> RatMat {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        RatMat::from_fn(n, |i, j| {
            (0..n).fold(Rational::zero(), |acc, k| {
                let a = self.get(i, k);
                if a.is_zero() {
                    acc
                } else {
                    acc + a * rhs.get(k, j)
                }
            })
        })
    }
}

impl fmt::Display for RatMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", fmt_rational(self.get(i, j)))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Exact determinant by Gaussian elimination over the rationals.
pub fn det(m: &RatMat) -> Rational {
    let n = m.n;
    let mut a: Vec<Vec<Rational>> = (0..n).map(|i| m.row(i).into_entries()).collect();
    let mut sign_flip = false;
    let mut acc = Rational::one();
    for c in 0..n {
        let Some(pivot) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if pivot != c {
            a.swap(pivot, c);
            sign_flip = !sign_flip;
        }
        let pv = a[c][c].clone();
        acc *= &pv;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let factor = &a[r][c] / &pv;
            for k in c..n {
                let delta = &factor * &a[c][k];
                a[r][k] -= delta;
            }
        }
    }
    if sign_flip {
        -acc
    } else {
        acc
    }
}

/// Gauss-Jordan inverse.
pub fn inverse(m: &RatMat) -> Result<RatMat> {
    let n = m.n;
    let mut a: Vec<Vec<Rational>> = (0..n).map(|i| m.row(i).into_entries()).collect();
    let mut inv: Vec<Vec<Rational>> = (0..n).map(|i| RatVec::unit(n, i).into_entries()).collect();
    for c in 0..n {
        let pivot = (c..n)
            .find(|&r| !a[r][c].is_zero())
            .ok_or(Error::SingularMatrix)?;
        a.swap(pivot, c);
        inv.swap(pivot, c);
        let pv = a[c][c].clone();
        for k in 0..n {
            a[c][k] /= &pv;
            inv[c][k] /= &pv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let factor = a[r][c].clone();
            for k in 0..n {
                let da = &factor * &a[c][k];
                a[r][k] -= da;
                let di = &factor * &inv[c][k];
                inv[r][k] -= di;
            }
        }
    }
    Ok(RatMat::from_rows(inv))
}

/// Adjugate, `M · adj(M) = det(M) · I`. Defined for singular `M` too.
pub fn adjugate(m: &RatMat) -> RatMat {
    let n = m.n;
    if n == 1 {
        return RatMat::identity(1);
    }
    let d = det(m);
    if !d.is_zero() {
        // adj(M) = det(M) M^{-1}; nonsingular, so the inverse exists.
        return inverse(m).expect("nonsingular").scale(&d);
    }
    RatMat::from_fn(n, |i, j| {
        // transpose of the cofactor matrix
        let c = det(&m.minor(j, i));
        if (i + j) % 2 == 0 {
            c
        } else {
            -c
        }
    })
}

/// Unique `x` with `M · x = v`, computed as `adj(M) · v / det(M)`.
pub fn solve_exact(m: &RatMat, v: &RatVec) -> Result<RatVec> {
    if v.len() != m.n {
        return Err(Error::DimensionMismatch {
            expected: m.n,
            found: v.len(),
        });
    }
    let d = det(m);
    if d.is_zero() {
        return Err(Error::SingularMatrix);
    }
    Ok(adjugate(m).mul_vec(v).scale(&d.recip()))
}

/// Things whose entries can be tested for integrality.
pub trait Integral {
    fn is_integral(&self) -> bool;
}

impl Integral for RatVec {
    fn is_integral(&self) -> bool {
        RatVec::is_integral(self)
    }
}

impl Integral for RatMat {
    fn is_integral(&self) -> bool {
        RatMat::is_integral(self)
    }
}

pub fn is_integral<T: Integral + ?Sized>(x: &T) -> bool {
    x.is_integral()
}

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMat {
    n: usize,
    entries: Vec<BigInt>,
}

impl IntMat {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        IntMat { n, entries }
    }

    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        assert!(n > 0 && rows.iter().all(|r| r.len() == n), "matrix is not square");
        Self::from_fn(n, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| BigInt::from((i == j) as i64))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat::from_fn(self.n, |i, j| Rational::from_integer(self.get(i, j).clone()))
    }

    /// Column `j` as machine integers; panics on overflow.
    pub fn col_i64(&self, j: usize) -> Vec<i64> {
        use num_traits::ToPrimitive;
        (0..self.n)
            .map(|i| self.get(i, j).to_i64().expect("entry fits in i64"))
            .collect()
    }

    pub fn hnf(&self) -> Result<IntMat> {
        hnf(self)
    }

    fn col_axpy(&mut self, dst: usize, factor: &BigInt, src: usize) {
        // column dst -= factor * column src
        for i in 0..self.n {
            let delta = factor * &self.entries[i * self.n + src];
            self.entries[i * self.n + dst] -= delta;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.n {
            self.entries.swap(i * self.n + a, i * self.n + b);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.n {
            let idx = i * self.n + j;
            self.entries[idx] = -&self.entries[idx];
        }
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Column Hermite normal form.
///
/// Convention: `H = M · U` with `U` unimodular, `H` lower-triangular, positive
/// diagonal, and every entry left of the diagonal reduced into `[0, h_ii)`.
/// Two full-rank bases span the same lattice iff their forms are equal.
pub fn hnf(m: &IntMat) -> Result<IntMat> {
    let n = m.n;
    let mut h = m.clone();
    for i in 0..n {
        // Euclid on row i across columns i..n until only column i is nonzero.
        loop {
            let pivot = (i..n)
                .filter(|&j| !h.get(i, j).is_zero())
                .min_by(|&a, &b| h.get(i, a).abs().cmp(&h.get(i, b).abs()))
                .ok_or(Error::RankDeficient)?;
            h.swap_cols(i, pivot);
            let mut clean = true;
            for j in i + 1..n {
                if h.get(i, j).is_zero() {
                    continue;
                }
                let q = h.get(i, j).div_floor(h.get(i, i));
                h.col_axpy(j, &q, i);
                if !h.get(i, j).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h.get(i, i).is_negative() {
            h.negate_col(i);
        }
        for j in 0..i {
            let q = h.get(i, j).div_floor(h.get(i, i));
            if !q.is_zero() {
                h.col_axpy(j, &q, i);
            }
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Laplace expansion along the first row; independent of the elimination path.
    fn det_cofactor(m: &RatMat) -> Rational {
        let n = m.n();
        if n == 1 {
            return m.get(0, 0).clone();
        }
        (0..n).fold(Rational::zero(), |acc, j| {
            let term = m.get(0, j) * det_cofactor(&m.minor(0, j));
            if j % 2 == 0 {
                acc + term
            } else {
                acc - term
            }
        })
    }

    fn random_int_mat(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> RatMat {
        RatMat::from_fn(n, |_, _| rat(rng.gen_range(lo..=hi)))
    }

    fn a2() -> RatMat {
        RatMat::from_int_rows(&[&[2, 1], &[-1, 2]])
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&RatMat::identity(3)), rat(1));
        assert_eq!(det(&a2()), rat(5));
        let a3 = RatMat::from_int_rows(&[&[2, 0, 1], &[-1, 2, 0], &[0, -1, 2]]);
        assert_eq!(det(&a3), rat(9));
    }

    #[test]
    fn det_of_singular_is_zero() {
        let m = RatMat::from_int_rows(&[&[1, 2], &[2, 4]]);
        assert!(det(&m).is_zero());
    }

    #[test]
    fn adjugate_examples() {
        assert_eq!(adjugate(&RatMat::identity(4)), RatMat::identity(4));
        let adj = adjugate(&a2());
        assert_eq!(adj, RatMat::from_int_rows(&[&[2, -1], &[1, 2]]));
        assert_eq!(&a2() * &adj, RatMat::identity(2).scale(&rat(5)));

        let a3 = RatMat::from_int_rows(&[&[2, 0, 1], &[-1, 2, 0], &[0, -1, 2]]);
        assert_eq!(&a3 * &adjugate(&a3), RatMat::identity(3).scale(&rat(9)));
    }

    #[test]
    fn adjugate_of_singular_matrix() {
        let m = RatMat::from_int_rows(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let adj = adjugate(&m);
        assert_eq!(&m * &adj, RatMat::zeros(3));
        assert_eq!(adj, RatMat::from_int_rows(&[&[-3, 6, -3], &[6, -12, 6], &[-3, 6, -3]]));
    }

    #[test]
    fn solve_examples() {
        let v = RatVec::new(vec![ratio(3, 7), rat(-2), rat(11)]);
        assert_eq!(solve_exact(&RatMat::identity(3), &v).unwrap(), v);
        assert_eq!(
            solve_exact(&a2(), &RatVec::unit(2, 0)).unwrap(),
            RatVec::new(vec![ratio(2, 5), ratio(1, 5)])
        );
        assert_eq!(
            solve_exact(&a2(), &RatVec::from_ints(&[5, 0])).unwrap(),
            RatVec::from_ints(&[2, 1])
        );
    }

    #[test]
    fn solve_singular_and_mismatch() {
        let m = RatMat::from_int_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(
            solve_exact(&m, &RatVec::from_ints(&[1, 0])),
            Err(Error::SingularMatrix)
        );
        assert!(matches!(
            solve_exact(&a2(), &RatVec::from_ints(&[1, 0, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn integrality_examples() {
        assert!(is_integral(&RatVec::from_ints(&[2, 1])));
        assert!(!is_integral(&RatVec::new(vec![ratio(2, 5), ratio(1, 5)])));
        let inv = adjugate(&a2()).scale(&ratio(1, 5));
        assert!(!is_integral(&inv));
        assert!(is_integral(&a2()));
    }

    #[test]
    fn hnf_examples() {
        assert_eq!(hnf(&IntMat::identity(3)).unwrap(), IntMat::identity(3));

        let a = IntMat::from_rows(&[&[2, 1], &[-1, 2]]);
        let h = hnf(&a).unwrap();
        // columns permuted and negated: (1,2), -(2,-1)
        let b = IntMat::from_rows(&[&[1, -2], &[2, 1]]);
        assert_eq!(hnf(&b).unwrap(), h);
        // a_1 + a_2, a_2
        let c = IntMat::from_rows(&[&[3, 1], &[1, 2]]);
        assert_eq!(hnf(&c).unwrap(), h);
        assert_eq!(det(&h.to_rat()), rat(5));
        assert_eq!(h, IntMat::from_rows(&[&[1, 0], &[2, 5]]));
    }

    #[test]
    fn hnf_rank_deficient() {
        let m = IntMat::from_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(hnf(&m), Err(Error::RankDeficient));
        let z = IntMat::from_rows(&[&[0, 0], &[0, 0]]);
        assert_eq!(hnf(&z), Err(Error::RankDeficient));
    }

    #[test]
    fn hnf_distinguishes_lattices() {
        let a = IntMat::from_rows(&[&[2, 1], &[-1, 2]]);
        let mirror = IntMat::from_rows(&[&[2, 1], &[1, -2]]);
        assert_ne!(hnf(&a).unwrap(), hnf(&mirror).unwrap());
    }

    #[test]
    fn adjugate_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(1..=5);
            let m = random_int_mat(&mut rng, n, -9, 9);
            let d = det(&m);
            assert_eq!(&m * &adjugate(&m), RatMat::identity(n).scale(&d));
        }
    }

    #[test]
    fn adjugate_identity_random_singular() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let n = rng.gen_range(2..=4);
            let mut m = random_int_mat(&mut rng, n, -9, 9);
            // duplicate a column to force singularity
            for i in 0..n {
                let v = m.get(i, 0).clone();
                m.set(i, n - 1, v);
            }
            assert!(det(&m).is_zero());
            assert_eq!(&m * &adjugate(&m), RatMat::zeros(n));
        }
    }

    #[test]
    fn solve_multiply_back_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 1000 {
            let n = rng.gen_range(2..=5);
            let m = RatMat::from_fn(n, |_, _| ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4)));
            if det(&m).is_zero() {
                continue;
            }
            let v = RatVec::new((0..n).map(|_| ratio(rng.gen_range(-20..=20), rng.gen_range(1..=6))).collect());
            let x = solve_exact(&m, &v).unwrap();
            assert_eq!(m.mul_vec(&x), v);
            done += 1;
        }
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..400 {
            let n = rng.gen_range(1..=4);
            let m = RatMat::from_fn(n, |_, _| ratio(rng.gen_range(-9..=9), rng.gen_range(1..=3)));
            assert_eq!(det(&m), det_cofactor(&m));
        }
    }

    fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMat {
        // product of elementary column operations
        let mut u = IntMat::identity(n);
        for _ in 0..rng.gen_range(1..12) {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            match rng.gen_range(0..3) {
                0 if a != b => {
                    let f = BigInt::from(rng.gen_range(-3..=3));
                    u.col_axpy(a, &f, b);
                }
                1 => u.swap_cols(a, b),
                _ => u.negate_col(a),
            }
        }
        u
    }

    fn int_mul(a: &IntMat, b: &IntMat) -> IntMat {
        (&a.to_rat() * &b.to_rat()).to_int().unwrap()
    }

    #[test]
    fn hnf_invariant_under_unimodular_right_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 300 {
            let n = rng.gen_range(2..=5);
            let m = IntMat::from_fn(n, |_, _| BigInt::from(rng.gen_range(-9..=9)));
            let Ok(h) = hnf(&m) else {
                assert!(det(&m.to_rat()).is_zero());
                continue;
            };
            let u = random_unimodular(&mut rng, n);
            assert_eq!(det(&u.to_rat()).abs(), rat(1));
            assert_eq!(hnf(&int_mul(&m, &u)).unwrap(), h);
            assert_eq!(hnf(&h).unwrap(), h);
            assert_eq!(det(&h.to_rat()), det(&m.to_rat()).abs());
            checked += 1;
        }
    }

    proptest! {
        #[test]
        fn hnf_shape(entries in proptest::collection::vec(-9i64..=9, 9)) {
            let m = IntMat::from_fn(3, |i, j| BigInt::from(entries[3 * i + j]));
            if let Ok(h) = hnf(&m) {
                for i in 0..3 {
                    prop_assert!(h.get(i, i).is_positive());
                    for j in i + 1..3 {
                        prop_assert!(h.get(i, j).is_zero());
                    }
                    for j in 0..i {
                        prop_assert!(!h.get(i, j).is_negative());
                        prop_assert!(h.get(i, j) < h.get(i, i));
                    }
                }
            } else {
                prop_assert!(det(&m.to_rat()).is_zero());
            }
        }

        #[test]
        fn rational_parse_roundtrip(num in -1000i64..1000, den in 1i64..50) {
            let r = ratio(num, den);
            prop_assert_eq!(parse_rational(&fmt_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn parse_errors() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert_eq!(parse_rational(" -6/4 ").unwrap(), ratio(-3, 2));
        assert_eq!(RatVec::parse("5,0").unwrap(), RatVec::from_ints(&[5, 0]));
    }
}
