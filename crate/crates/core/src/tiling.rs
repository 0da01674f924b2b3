//! The two-size lattice cube tiling of `R^n` and point location in it.
//!
//! Side lengths are `p < q`; the big side `q` sits on the diagonal of the
//! lattice basis
//!
//! ```text
//!     a_k = q e_k - p e_{k+1}   (k < n)
//!     a_n = p e_1 + q e_n
//! ```
//!
//! and the fundamental domain is the half-open set
//! `C = [0,q)^n ∪ [0,p)^{n-1} × [q, q+p)`: a big cube with a small cube
//! resting on the corner of its top facet. Every point of `R^n` has exactly
//! one representative in `C`, which makes [`Tiling::locate`] a total function.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratlin::{self, fmt_rational, rat, RatMat, RatVec, Rational};

/// Dimension and side lengths of the tiling, `n >= 2` and `0 < p < q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TilingParams {
    n: usize,
    p: Rational,
    q: Rational,
}

impl TilingParams {
    pub fn new(n: usize, p: Rational, q: Rational) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("dimension must be at least 2, got {n}")));
        }
        if !p.is_positive() {
            return Err(Error::InvalidParams(format!(
                "small side must be positive, got {}",
                fmt_rational(&p)
            )));
        }
        if p >= q {
            return Err(Error::InvalidParams(format!(
                "small side p={} must be less than big side q={}",
                fmt_rational(&p),
                fmt_rational(&q)
            )));
        }
        Ok(TilingParams { n, p, q })
    }

    pub fn from_ints(n: usize, p: i64, q: i64) -> Result<Self> {
        Self::new(n, rat(p), rat(q))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    /// `p^n + q^n`, the covolume of the lattice.
    pub fn covolume(&self) -> Rational {
        pow(&self.p, self.n) + pow(&self.q, self.n)
    }
}

fn pow(x: &Rational, e: usize) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

/// The lattice basis `A` (columns `a_1..a_n`) with its adjugate and
/// determinant cached for membership tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisA {
    matrix: RatMat,
    adjugate: RatMat,
    det: Rational,
}

impl BasisA {
    pub fn matrix(&self) -> &RatMat {
        &self.matrix
    }

    pub fn adjugate(&self) -> &RatMat {
        &self.adjugate
    }

    pub fn det(&self) -> &Rational {
        &self.det
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn column(&self, j: usize) -> RatVec {
        self.matrix.col(j)
    }

    /// `A^{-1} v`.
    pub fn coordinates(&self, v: &RatVec) -> Result<RatVec> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: v.len(),
            });
        }
        Ok(self.adjugate.mul_vec(v).scale(&self.det.recip()))
    }

    /// `A k`.
    pub fn point(&self, k: &[BigInt]) -> RatVec {
        self.matrix.mul_int_vec(k)
    }

    pub fn is_member(&self, v: &RatVec) -> Result<bool> {
        Ok(self.coordinates(v)?.is_integral())
    }
}

pub fn build_basis(params: &TilingParams) -> BasisA {
    let n = params.n;
    let (p, q) = (&params.p, &params.q);
    let matrix = RatMat::from_fn(n, |i, j| {
        if i == j {
            q.clone()
        } else if j + 1 < n && i == j + 1 {
            -p.clone()
        } else if j == n - 1 && i == 0 {
            p.clone()
        } else {
            Rational::zero()
        }
    });
    let det = ratlin::det(&matrix);
    let adjugate = ratlin::adjugate(&matrix);
    BasisA {
        matrix,
        adjugate,
        det,
    }
}

/// Columns `b_1 = a_n`, `b_k = b_{k-1} - a_{k-1}`, used to shift points
/// vertically by `q` (or `p + q` for `b_n`) while keeping the first `n-1`
/// coordinates inside `[0, q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionBasis {
    matrix: RatMat,
    // coordinates of each b_l in terms of the a-columns
    coords: Vec<Vec<i64>>,
}

impl ReductionBasis {
    pub fn matrix(&self) -> &RatMat {
        &self.matrix
    }

    pub fn column(&self, l: usize) -> RatVec {
        self.matrix.col(l)
    }

    /// Integer coefficients expressing `b_l` in the columns of `A`.
    pub fn a_coordinates(&self, l: usize) -> &[i64] {
        &self.coords[l]
    }
}

pub fn build_reduction_basis(params: &TilingParams) -> ReductionBasis {
    let basis = build_basis(params);
    let n = params.n;
    let mut cols = Vec::with_capacity(n);
    let mut coords = Vec::with_capacity(n);
    let mut b = basis.column(n - 1);
    let mut c = vec![0i64; n];
    c[n - 1] = 1;
    cols.push(b.clone());
    coords.push(c.clone());
    for k in 1..n {
        b = &b - &basis.column(k - 1);
        c[k - 1] -= 1;
        cols.push(b.clone());
        coords.push(c.clone());
    }
    ReductionBasis {
        matrix: RatMat::from_cols(&cols),
        coords,
    }
}

/// `C = [0,q)^n ∪ [0,p)^{n-1} × [q, q+p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalDomain {
    params: TilingParams,
}

impl FundamentalDomain {
    pub fn new(params: &TilingParams) -> Self {
        FundamentalDomain {
            params: params.clone(),
        }
    }

    pub fn in_big(&self, c: &RatVec) -> bool {
        let zero = Rational::zero();
        c.len() == self.params.n && c.entries().iter().all(|x| *x >= zero && *x < self.params.q)
    }

    pub fn in_small(&self, c: &RatVec) -> bool {
        let n = self.params.n;
        if c.len() != n {
            return false;
        }
        let (p, q) = (&self.params.p, &self.params.q);
        let zero = Rational::zero();
        let top = p + q;
        c.entries()[..n - 1].iter().all(|x| *x >= zero && x < p) && c[n - 1] >= *q && c[n - 1] < top
    }

    pub fn contains(&self, c: &RatVec) -> bool {
        self.in_big(c) || self.in_small(c)
    }

    /// Kind of the cube of `C` containing `c`, if any.
    pub fn kind_of(&self, c: &RatVec) -> Option<TileKind> {
        if self.in_big(c) {
            Some(TileKind::Big)
        } else if self.in_small(c) {
            Some(TileKind::Small)
        } else {
            None
        }
    }

    pub fn volume(&self) -> Rational {
        self.params.covolume()
    }
}

/// A point reduced into `C`: `x = c + A k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalPoint {
    pub c: RatVec,
    pub k: Vec<BigInt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TileKind {
    Big,
    Small,
}

impl fmt::Display for TileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TileKind::Big => "Big",
            TileKind::Small => "Small",
        })
    }
}

/// A tile: `A k + [0,q]^n` (big) or `A k + [0,p]^{n-1} × [q, q+p]` (small).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TileRef {
    pub kind: TileKind,
    pub anchor: Vec<BigInt>,
}

impl PartialOrd for TileRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TileRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.anchor
            .cmp(&other.anchor)
            .then(self.kind.cmp(&other.kind))
    }
}

impl fmt::Display for TileRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} k=(", self.kind)?;
        for (i, x) in self.anchor.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Axis-aligned closed box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileBox {
    pub lo: RatVec,
    pub hi: RatVec,
}

impl TileBox {
    pub fn volume(&self) -> Rational {
        self.lo
            .entries()
            .iter()
            .zip(self.hi.entries())
            .fold(Rational::one(), |acc, (l, h)| acc * (h - l))
    }

    /// Intersection with positive volume, if any.
    pub fn intersect(&self, other: &TileBox) -> Option<TileBox> {
        let mut lo = Vec::with_capacity(self.lo.len());
        let mut hi = Vec::with_capacity(self.lo.len());
        for i in 0..self.lo.len() {
            let l = std::cmp::max(&self.lo[i], &other.lo[i]).clone();
            let h = std::cmp::min(&self.hi[i], &other.hi[i]).clone();
            if l >= h {
                return None;
            }
            lo.push(l);
            hi.push(h);
        }
        Some(TileBox {
            lo: RatVec::new(lo),
            hi: RatVec::new(hi),
        })
    }

    /// Half-open containment `lo <= x < hi`.
    pub fn owns(&self, x: &RatVec) -> bool {
        (0..x.len()).all(|i| x[i] >= self.lo[i] && x[i] < self.hi[i])
    }
}

/// Counters from one reduction, for checking the loop bounds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionTrace {
    /// Last coordinate after the first `n-1` columns were applied.
    pub last_after_columns: Rational,
    pub descents: usize,
    pub ascents: usize,
    pub final_fix: bool,
}

/// Params, basis and reduction basis bundled for repeated queries.
#[derive(Clone, Debug)]
pub struct Tiling {
    params: TilingParams,
    basis: BasisA,
    reduction: ReductionBasis,
    domain: FundamentalDomain,
}

impl Tiling {
    pub fn new(params: TilingParams) -> Self {
        Tiling {
            basis: build_basis(&params),
            reduction: build_reduction_basis(&params),
            domain: FundamentalDomain::new(&params),
            params,
        }
    }

    pub fn params(&self) -> &TilingParams {
        &self.params
    }

    pub fn basis(&self) -> &BasisA {
        &self.basis
    }

    pub fn reduction(&self) -> &ReductionBasis {
        &self.reduction
    }

    pub fn domain(&self) -> &FundamentalDomain {
        &self.domain
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.params.n {
            return Err(Error::DimensionMismatch {
                expected: self.params.n,
                found: len,
            });
        }
        Ok(())
    }

    pub fn canonicalize(&self, x: &RatVec) -> Result<CanonicalPoint> {
        self.canonicalize_traced(x).map(|(cp, _)| cp)
    }

    pub fn canonicalize_traced(&self, x: &RatVec) -> Result<(CanonicalPoint, ReductionTrace)> {
        self.check_dim(x.len())?;
        let n = self.params.n;
        let (p, q) = (&self.params.p, &self.params.q);
        let p_plus_q = p + q;
        let q_minus_p = q - p;
        let mut x = x.clone();
        let mut k = vec![BigInt::zero(); n];
        let mut trace = ReductionTrace::default();

        // Columns a_1..a_{n-1} push coordinates 1..n-1 into [0, q) in turn.
        for j in 0..n - 1 {
            let f = (&x[j] / q).floor();
            if !f.is_zero() {
                x = &x - &self.basis.column(j).scale(&f);
                k[j] += f.to_integer();
            }
        }
        trace.last_after_columns = x[n - 1].clone();

        while x[n - 1] >= p_plus_q {
            let l = (0..n - 1).find(|&i| x[i] >= *p).unwrap_or(n - 1);
            self.apply_reduction(&mut x, &mut k, l, false);
            trace.descents += 1;
        }
        while x[n - 1].is_negative() {
            let l = (0..n - 1).find(|&i| x[i] < q_minus_p).unwrap_or(n - 1);
            self.apply_reduction(&mut x, &mut k, l, true);
            trace.ascents += 1;
        }
        // Now x ∈ [0,q)^{n-1} × [0,p+q); outside C means it sits above the
        // big cube but not over the small one.
        if x[n - 1] >= *q {
            if let Some(l) = (0..n - 1).find(|&i| x[i] >= *p) {
                self.apply_reduction(&mut x, &mut k, l, false);
                trace.final_fix = true;
            }
        }
        debug_assert!(self.domain.contains(&x));
        Ok((CanonicalPoint { c: x, k }, trace))
    }

    fn apply_reduction(&self, x: &mut RatVec, k: &mut [BigInt], l: usize, add: bool) {
        let b = self.reduction.column(l);
        let coords = self.reduction.a_coordinates(l);
        // x = c + A k, so moving x by -b moves k by +coords(b)
        if add {
            *x = &*x + &b;
            for (ki, ci) in k.iter_mut().zip(coords) {
                *ki -= *ci;
            }
        } else {
            *x = &*x - &b;
            for (ki, ci) in k.iter_mut().zip(coords) {
                *ki += *ci;
            }
        }
    }

    pub fn locate(&self, x: &RatVec) -> Result<TileRef> {
        let cp = self.canonicalize(x)?;
        let kind = if self.domain.in_big(&cp.c) {
            TileKind::Big
        } else {
            TileKind::Small
        };
        Ok(TileRef {
            kind,
            anchor: cp.k,
        })
    }

    pub fn is_lattice_member(&self, v: &RatVec) -> Result<bool> {
        self.basis.is_member(v)
    }

    pub fn check_unilateral(&self) -> bool {
        self.unilateral_violation().is_none()
    }

    /// First of `p e_i`, `q e_i` found in the lattice, if any.
    pub fn unilateral_violation(&self) -> Option<RatVec> {
        let n = self.params.n;
        for i in 0..n {
            for s in [&self.params.p, &self.params.q] {
                let v = RatVec::unit(n, i).scale(s);
                if self.basis.is_member(&v).expect("dimension matches") {
                    return Some(v);
                }
            }
        }
        None
    }

    pub fn side(&self, kind: TileKind) -> &Rational {
        match kind {
            TileKind::Big => &self.params.q,
            TileKind::Small => &self.params.p,
        }
    }

    /// Closed extent of a tile.
    pub fn tile_box(&self, tile: &TileRef) -> TileBox {
        let n = self.params.n;
        let mut lo = self.basis.point(&tile.anchor);
        if tile.kind == TileKind::Small {
            lo.entries_mut()[n - 1] += &self.params.q;
        }
        let s = self.side(tile.kind);
        let hi = RatVec::new(lo.entries().iter().map(|x| x + s).collect());
        TileBox { lo, hi }
    }

    /// Every tile whose closed box meets `[lo, hi]` in positive volume,
    /// sorted by anchor then kind.
    pub fn tiles_in_box(&self, lo: &RatVec, hi: &RatVec) -> Result<Vec<TileRef>> {
        self.check_dim(lo.len())?;
        self.check_dim(hi.len())?;
        let n = self.params.n;
        if (0..n).any(|i| lo[i] >= hi[i]) {
            return Err(Error::InvalidParams(format!("box {lo}..{hi} has empty interior")));
        }
        let query = TileBox {
            lo: lo.clone(),
            hi: hi.clone(),
        };
        // Anchors A k of intersecting tiles lie in [lo - (p+q), hi].
        let reach = &self.params.p + &self.params.q;
        let inv = self.basis.adjugate().scale(&self.basis.det().recip());
        let mut ranges = Vec::with_capacity(n);
        for j in 0..n {
            let (mut kmin, mut kmax) = (Rational::zero(), Rational::zero());
            for i in 0..n {
                let w = inv.get(j, i);
                let a = w * (&lo[i] - &reach);
                let b = w * &hi[i];
                let (small, big) = if a <= b { (a, b) } else { (b, a) };
                kmin += small;
                kmax += big;
            }
            let from = kmin.ceil().to_integer().to_i64().expect("box too large");
            let to = kmax.floor().to_integer().to_i64().expect("box too large");
            ranges.push(from..=to);
        }
        let mut out = Vec::new();
        let mut k: Vec<i64> = ranges.iter().map(|r| *r.start()).collect();
        if ranges.iter().any(|r| r.is_empty()) {
            return Ok(out);
        }
        loop {
            let anchor: Vec<BigInt> = k.iter().map(|&x| BigInt::from(x)).collect();
            for kind in [TileKind::Big, TileKind::Small] {
                let tile = TileRef {
                    kind,
                    anchor: anchor.clone(),
                };
                if self.tile_box(&tile).intersect(&query).is_some() {
                    out.push(tile);
                }
            }
            // odometer
            let mut d = 0;
            loop {
                if d == n {
                    out.sort();
                    return Ok(out);
                }
                if k[d] < *ranges[d].end() {
                    k[d] += 1;
                    break;
                }
                k[d] = *ranges[d].start();
                d += 1;
            }
        }
    }
}

pub fn canonicalize(x: &RatVec, params: &TilingParams) -> Result<CanonicalPoint> {
    Tiling::new(params.clone()).canonicalize(x)
}

pub fn locate(x: &RatVec, params: &TilingParams) -> Result<TileRef> {
    Tiling::new(params.clone()).locate(x)
}

pub fn is_lattice_member(v: &RatVec, basis: &BasisA) -> Result<bool> {
    basis.is_member(v)
}

pub fn check_unilateral(params: &TilingParams) -> bool {
    Tiling::new(params.clone()).check_unilateral()
}

pub fn tiles_in_box(lo: &RatVec, hi: &RatVec, params: &TilingParams) -> Result<Vec<TileRef>> {
    Tiling::new(params.clone()).tiles_in_box(lo, hi)
}
