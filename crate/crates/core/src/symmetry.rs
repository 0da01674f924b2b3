//! Symmetries of the tiling inside the hyperoctahedral group.
//!
//! A signed permutation matrix `S` maps the tiling to itself iff
//! `A^{-1} S^{-1} A` is integral, i.e. iff `S^{-1}` maps every basis column
//! back into the lattice. The stabilizer turns out to be cyclic of order
//! `2n`, generated by the negacyclic shift `e_i -> e_{i+1}`, `e_n -> -e_1`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ratlin::{self, rat, RatMat, RatVec, Rational};
use crate::tiling::{build_basis, BasisA, TilingParams};

/// Largest dimension for which all of `B'_n` is enumerated (`2^6 · 6! = 46080`).
pub const MAX_BRUTE_FORCE_N: usize = 6;

/// `S e_j = signs[j] · e_{image[j]}` (0-based internally; 1-based when printed).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    image: Vec<usize>,
    negative: Vec<bool>,
}

impl SignedPermutation {
    /// `image` must be a permutation of `0..n`; `signs` entries are `±1`.
    pub fn new(image: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let n = image.len();
        if signs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: signs.len(),
            });
        }
        let mut seen = vec![false; n];
        for &i in &image {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParams(format!("{image:?} is not a permutation")));
            }
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParams(format!("signs must be ±1, got {signs:?}")));
        }
        Ok(SignedPermutation {
            image,
            negative: signs.iter().map(|&s| s < 0).collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        SignedPermutation {
            image: (0..n).collect(),
            negative: vec![false; n],
        }
    }

    /// The negacyclic shift: `e_i -> e_{i+1}` for `i < n`, `e_n -> -e_1`.
    pub fn negacyclic_shift(n: usize) -> Self {
        let mut negative = vec![false; n];
        negative[n - 1] = true;
        SignedPermutation {
            image: (0..n).map(|j| (j + 1) % n).collect(),
            negative,
        }
    }

    /// `-I`.
    pub fn negation(n: usize) -> Self {
        SignedPermutation {
            image: (0..n).collect(),
            negative: vec![true; n],
        }
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn sign(&self, j: usize) -> i8 {
        if self.negative[j] {
            -1
        } else {
            1
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.n()).map(|j| self.sign(j)).collect()
    }

    /// Entry `s_{i,j}` of the matrix form.
    pub fn entry(&self, i: usize, j: usize) -> i8 {
        if self.image[j] == i {
            self.sign(j)
        } else {
            0
        }
    }

    pub fn to_matrix(&self) -> RatMat {
        RatMat::from_fn(self.n(), |i, j| rat(self.entry(i, j) as i64))
    }

    pub fn apply(&self, v: &RatVec) -> RatVec {
        let mut out = RatVec::zeros(self.n());
        for j in 0..self.n() {
            out.entries_mut()[self.image[j]] = if self.negative[j] { -v[j].clone() } else { v[j].clone() };
        }
        out
    }

    /// `self ∘ other`, i.e. the matrix product `S · T`.
    pub fn compose(&self, other: &SignedPermutation) -> SignedPermutation {
        assert_eq!(self.n(), other.n(), "dimension mismatch");
        let (image, negative) = (0..self.n())
            .map(|j| {
                let mid = other.image[j];
                (self.image[mid], other.negative[j] ^ self.negative[mid])
            })
            .unzip();
        SignedPermutation { image, negative }
    }

    pub fn inverse(&self) -> SignedPermutation {
        let n = self.n();
        let mut image = vec![0; n];
        let mut negative = vec![false; n];
        for j in 0..n {
            image[self.image[j]] = j;
            negative[self.image[j]] = self.negative[j];
        }
        SignedPermutation { image, negative }
    }

    pub fn pow(&self, e: usize) -> SignedPermutation {
        (0..e).fold(Self::identity(self.n()), |acc, _| acc.compose(self))
    }

    /// Position and sign of the nonzero entry in the first column.
    pub fn first_column(&self) -> (usize, i8) {
        (self.image[0], self.sign(0))
    }

    /// Parses `perm=[2,3,1], signs=[+,+,-]` (1-based images).
    pub fn parse(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let list = |key: &str| -> Result<Vec<String>> {
            let start = s.find(key).ok_or_else(|| err("missing field"))? + key.len();
            let rest = &s[start..];
            let rest = rest.strip_prefix('[').ok_or_else(|| err("expected '['"))?;
            let end = rest.find(']').ok_or_else(|| err("expected ']'"))?;
            Ok(rest[..end]
                .split(',')
                .map(|t| t.trim().to_string())
                .filter(|t| !t.is_empty())
                .collect())
        };
        let image = list("perm=")?
            .iter()
            .map(|t| match t.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(err("perm entries are 1-based indices")),
            })
            .collect::<Result<Vec<_>>>()?;
        let signs = list("signs=")?
            .iter()
            .map(|t| match t.as_str() {
                "+" | "+1" | "1" => Ok(1),
                "-" | "−" | "-1" => Ok(-1),
                _ => Err(err("signs are + or -")),
            })
            .collect::<Result<Vec<_>>>()?;
        SignedPermutation::new(image, signs)
    }

    fn order_key(&self) -> (usize, bool, &[usize], &[bool]) {
        (self.image[0], self.negative[0], &self.image, &self.negative)
    }
}

/// Ordered by first-column position, then sign (`+` first), then the full data.
impl Ord for SignedPermutation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for SignedPermutation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let image: Vec<String> = self.image.iter().map(|i| (i + 1).to_string()).collect();
        let signs: Vec<&str> = self.negative.iter().map(|&neg| if neg { "-" } else { "+" }).collect();
        write!(f, "perm=[{}], signs=[{}]", image.join(","), signs.join(","))
    }
}

/// A signed permutation matching the stabilizer pattern
/// `s_{i,j} = s_{i+1,j+1}`, `s_{i,n} = -s_{i+1,1}`, `s_{n,j} = -s_{1,j+1}`,
/// `s_{n,n} = s_{1,1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StabilizerElement(SignedPermutation);

impl StabilizerElement {
    pub fn new(s: SignedPermutation) -> Result<Self> {
        if satisfies_pattern(&s) {
            Ok(StabilizerElement(s))
        } else {
            Err(Error::InvalidParams(format!("{s} does not match the stabilizer pattern")))
        }
    }

    pub fn as_perm(&self) -> &SignedPermutation {
        &self.0
    }

    pub fn into_perm(self) -> SignedPermutation {
        self.0
    }
}

impl fmt::Display for StabilizerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn satisfies_pattern(s: &SignedPermutation) -> bool {
    let n = s.n();
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            if s.entry(i, j) != s.entry(i + 1, j + 1) {
                return false;
            }
        }
        if s.entry(i, n - 1) != -s.entry(i + 1, 0) || s.entry(n - 1, i) != -s.entry(0, i + 1) {
            return false;
        }
    }
    s.entry(n - 1, n - 1) == s.entry(0, 0)
}

fn check_dim(s: &SignedPermutation, basis: &BasisA) -> Result<()> {
    if s.n() != basis.n() {
        return Err(Error::DimensionMismatch {
            expected: basis.n(),
            found: s.n(),
        });
    }
    Ok(())
}

/// `A^{-1} S^{-1} A` integral, checked one column at a time.
pub fn is_stabilizer(s: &SignedPermutation, basis: &BasisA) -> Result<bool> {
    check_dim(s, basis)?;
    let inv = s.inverse();
    for j in 0..basis.n() {
        if !basis.is_member(&inv.apply(&basis.column(j)))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The `2n` elements of the pattern, one per (first-column position, sign).
pub fn stabilizer_closed_form(n: usize) -> Result<Vec<StabilizerElement>> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("dimension must be at least 2, got {n}")));
    }
    let mut out = Vec::with_capacity(2 * n);
    for row in 0..n {
        for first_negative in [false, true] {
            let mut image = vec![row; n];
            let mut negative = vec![first_negative; n];
            for j in 1..n {
                // moving one step down the diagonal; wrapping past row n flips the sign
                let next = image[j - 1] + 1;
                if next == n {
                    image[j] = 0;
                    negative[j] = !negative[j - 1];
                } else {
                    image[j] = next;
                    negative[j] = negative[j - 1];
                }
            }
            out.push(StabilizerElement::new(SignedPermutation { image, negative })?);
        }
    }
    Ok(out)
}

/// Every element of `B'_n` in the deterministic order of [`SignedPermutation`].
pub fn all_signed_permutations(n: usize) -> Result<Vec<SignedPermutation>> {
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::TooLarge {
            n,
            max: MAX_BRUTE_FORCE_N,
        });
    }
    let mut perms = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        perms.push(perm.clone());
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let mut out = Vec::with_capacity(perms.len() << n);
    for image in perms {
        for mask in 0u32..(1 << n) {
            out.push(SignedPermutation {
                image: image.clone(),
                negative: (0..n).map(|j| mask >> j & 1 == 1).collect(),
            });
        }
    }
    out.sort();
    Ok(out)
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Exhaustive filter of `B'_n` by [`is_stabilizer`].
pub fn stabilizer_brute_force(n: usize, basis: &BasisA) -> Result<Vec<SignedPermutation>> {
    if n != basis.n() {
        return Err(Error::DimensionMismatch {
            expected: basis.n(),
            found: n,
        });
    }
    let mut out = Vec::new();
    for s in all_signed_permutations(n)? {
        if is_stabilizer(&s, basis)? {
            out.push(s);
        }
    }
    Ok(out)
}

fn scaled_hnf(m: &RatMat, scale: &BigInt) -> Result<ratlin::IntMat> {
    m.scale(&Rational::from_integer(scale.clone()))
        .to_int()
        .expect("scaled by the denominator lcm")
        .hnf()
}

/// Some `S ∈ B'_n` with `S A Z^n = Bc Z^n`, or `None`.
///
/// Both bases are scaled by the lcm of all their denominators and compared by
/// Hermite normal form. The first match in signed-permutation order wins, so
/// `Bc = A` returns the identity.
pub fn lattice_equivalent(bc: &RatMat, params: &TilingParams) -> Result<Option<SignedPermutation>> {
    let n = params.n();
    if bc.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bc.n(),
        });
    }
    if bc.det().is_zero() {
        return Err(Error::SingularMatrix);
    }
    let candidates = all_signed_permutations(n)?;
    let basis = build_basis(params);
    let a = basis.matrix();
    let scale = a.denominator_lcm().lcm(&bc.denominator_lcm());
    let target = scaled_hnf(bc, &scale)?;
    // |det| must agree before any HNF is worth computing
    if a.det().abs() == bc.det().abs() {
        for s in candidates {
            let sa = &s.to_matrix() * a;
            if scaled_hnf(&sa, &scale)? == target {
                return Ok(Some(s));
            }
        }
    }
    Ok(None)
}

/// `g^n = -I` and `g^{2n} = I` for the negacyclic shift.
pub fn generator_orders_hold(n: usize) -> bool {
    let g = SignedPermutation::negacyclic_shift(n);
    g.pow(n) == SignedPermutation::negation(n) && g.pow(2 * n) == SignedPermutation::identity(n)
}

/// Closure of a set under products and inverses.
pub fn is_group(elements: &[SignedPermutation]) -> bool {
    elements.iter().all(|a| {
        elements.contains(&a.inverse()) && elements.iter().all(|b| elements.contains(&a.compose(b)))
    })
}

/// `S a_j = ± a_i` for some `i`, for every column `a_j`.
pub fn permutes_basis_up_to_sign(s: &SignedPermutation, basis: &BasisA) -> bool {
    let cols = basis.matrix().cols();
    cols.iter().all(|a| {
        let image = s.apply(a);
        cols.iter().any(|b| image == *b || image == -b)
    })
}
