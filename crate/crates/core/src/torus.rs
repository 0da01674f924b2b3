//! Integer side lengths: axis periods and tilings of the discrete torus.
//!
//! For coprime integers `p < q` the lattice `A Z^n` contains `m Z^n` with
//! `m = p^n + q^n`, and `m` is the least period along every axis. Reducing the
//! tiling mod `m` gives an exact cover of `(Z/m)^n` by `m^{n-1}` big and
//! `m^{n-1}` small cubes.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratlin::{self, IntMat, RatMat, RatVec};
use crate::symmetry::lattice_equivalent;
use crate::tiling::{build_basis, TileKind, TilingParams};

pub const DEFAULT_CELL_BUDGET: u64 = 10_000_000;
pub const DEFAULT_HNF_BUDGET: u64 = 10_000;
/// Version of the structured torus report.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusParams {
    n: usize,
    p: i64,
    q: i64,
    m: i64,
}

impl TorusParams {
    /// Requires `n >= 2`, `0 < p < q`, `gcd(p, q) = 1`.
    pub fn new(n: usize, p: i64, q: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("dimension must be at least 2, got {n}")));
        }
        if p <= 0 || p >= q {
            return Err(Error::InvalidParams(format!("need 0 < p < q, got p={p}, q={q}")));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::InvalidParams(format!("p={p} and q={q} are not coprime")));
        }
        let pow = |b: i64| -> Option<i64> { (0..n).try_fold(1i64, |acc, _| acc.checked_mul(b)) };
        let m = pow(p)
            .zip(pow(q))
            .and_then(|(a, b)| a.checked_add(b))
            .ok_or_else(|| Error::InvalidParams(format!("p^n + q^n overflows for n={n}, q={q}")))?;
        Ok(TorusParams { n, p, q, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn tiling_params(&self) -> TilingParams {
        TilingParams::from_ints(self.n, self.p, self.q).expect("validated")
    }

    /// `m^n`, or `None` on overflow.
    pub fn cell_count(&self) -> Option<u64> {
        (0..self.n).try_fold(1u64, |acc, _| acc.checked_mul(self.m as u64))
    }

    fn side(&self, kind: TileKind) -> i64 {
        match kind {
            TileKind::Big => self.q,
            TileKind::Small => self.p,
        }
    }
}

fn integer_basis(params: &TorusParams) -> IntMat {
    build_basis(&params.tiling_params())
        .matrix()
        .to_int()
        .expect("integer sides give an integer basis")
}

/// Least `l > 0` with `l e_axis ∈ A Z^n` (`axis` is 0-based).
///
/// `l e_i ∈ A Z^n` iff `m | l · adj(A) e_i`, so the answer is
/// `m / gcd(m, g)` with `g` the gcd of column `i` of the adjugate.
pub fn minimal_axis_period(params: &TorusParams, axis: usize) -> Result<i64> {
    if axis >= params.n {
        return Err(Error::InvalidParams(format!(
            "axis {axis} out of range for dimension {}",
            params.n
        )));
    }
    let basis = build_basis(&params.tiling_params());
    let adj = basis.adjugate().to_int().expect("integral adjugate");
    let m = BigInt::from(params.m);
    let g = (0..params.n).fold(BigInt::from(0), |acc, i| acc.gcd(adj.get(i, axis)));
    Ok((&m / m.gcd(&g)).to_i64().expect("divides m"))
}

/// Direct search for the least `l` in `1..=limit` with `l e_axis` in the lattice.
pub fn scan_axis_period(params: &TorusParams, axis: usize, limit: i64) -> Option<i64> {
    let basis = build_basis(&params.tiling_params());
    (1..=limit).find(|&l| {
        let v = RatVec::unit(params.n, axis).scale(&ratlin::rat(l));
        basis.is_member(&v).expect("dimension matches")
    })
}

/// `|det(A_i)| = q^{n-1}` for every Cramer matrix
/// `A_i = (a_1, .., a_{i-1}, e_i, a_{i+1}, .., a_n)`, and `gcd(m, q^{n-1}) = 1`.
pub fn adjugate_entry_check(params: &TorusParams) -> bool {
    let n = params.n;
    let a = build_basis(&params.tiling_params());
    let q_pow = BigInt::from(params.q).pow(n as u32 - 1);
    let dets_ok = (0..n).all(|i| {
        let mut cols = a.matrix().cols();
        cols[i] = RatVec::unit(n, i);
        let d = ratlin::det(&RatMat::from_cols(&cols));
        d.is_integer() && d.to_integer().abs() == q_pow
    });
    dets_ok && BigInt::from(params.m).gcd(&q_pow) == BigInt::from(1)
}

/// A cube on the torus: kind plus its minimal-corner cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusTile {
    pub kind: TileKind,
    pub anchor: Vec<i64>,
}

/// Cell-to-tile assignment on `(Z/m)^n`.
///
/// Cells are stored densely, indexed by the mixed-radix code
/// `c_0 + c_1 m + c_2 m^2 + ...`; `assignment[cell]` indexes `tiles`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusTiling {
    params: TorusParams,
    residues: Vec<Vec<i64>>,
    tiles: Vec<TorusTile>,
    assignment: Vec<u32>,
}

pub const UNASSIGNED: u32 = u32::MAX;

impl TorusTiling {
    /// Assembles a tiling from raw parts without validation.
    pub fn from_parts(
        params: TorusParams,
        residues: Vec<Vec<i64>>,
        tiles: Vec<TorusTile>,
        assignment: Vec<u32>,
    ) -> Self {
        TorusTiling {
            params,
            residues,
            tiles,
            assignment,
        }
    }

    pub fn params(&self) -> &TorusParams {
        &self.params
    }

    /// Lattice residues mod `m`, sorted.
    pub fn residues(&self) -> &[Vec<i64>] {
        &self.residues
    }

    /// Tiles in order: the big then the small cube of each residue.
    pub fn tiles(&self) -> &[TorusTile] {
        &self.tiles
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn cell_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn owner(&self, cell: &[i64]) -> Option<&TorusTile> {
        let idx = self.assignment[encode(cell, self.params.m)];
        self.tiles.get(idx as usize)
    }

    pub fn owner_index(&self, cell: &[i64]) -> u32 {
        self.assignment[encode(cell, self.params.m)]
    }

    pub fn count(&self, kind: TileKind) -> usize {
        self.tiles.iter().filter(|t| t.kind == kind).count()
    }

    /// Overwrites the cells of a cube with a new tile, leaving everything else.
    pub fn paint(&mut self, kind: TileKind, anchor: Vec<i64>) {
        let id = self.tiles.len() as u32;
        let cells = cube_cells(&self.params, kind, &anchor);
        for cell in cells {
            self.assignment[cell] = id;
        }
        self.tiles.push(TorusTile { kind, anchor });
    }

    /// Every cell has an owner and every tile owns exactly its cube's cells.
    pub fn is_exact_cover(&self) -> bool {
        let mut owned = vec![0usize; self.tiles.len()];
        for &a in &self.assignment {
            if a == UNASSIGNED || a as usize >= self.tiles.len() {
                return false;
            }
            owned[a as usize] += 1;
        }
        self.tiles.iter().enumerate().all(|(id, t)| {
            let cells = cube_cells(&self.params, t.kind, &t.anchor);
            owned[id] == cells.len() && cells.iter().all(|&c| self.assignment[c] == id as u32)
        })
    }
}

fn encode(cell: &[i64], m: i64) -> usize {
    cell.iter()
        .rev()
        .fold(0usize, |acc, &c| acc * m as usize + c.rem_euclid(m) as usize)
}

fn decode(mut idx: usize, n: usize, m: i64) -> Vec<i64> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push((idx % m as usize) as i64);
        idx /= m as usize;
    }
    out
}

/// Cells of the cube `anchor + [0, side)^n` on the torus. Small-cube anchors
/// already include the `q e_n` offset.
fn cube_cells(params: &TorusParams, kind: TileKind, anchor: &[i64]) -> Vec<usize> {
    let n = params.n;
    let side = params.side(kind);
    let mut out = Vec::with_capacity((side as usize).pow(n as u32));
    let mut off = vec![0i64; n];
    loop {
        let cell: Vec<i64> = anchor.iter().zip(&off).map(|(a, o)| a + o).collect();
        out.push(encode(&cell, params.m));
        let mut d = 0;
        loop {
            if d == n {
                return out;
            }
            off[d] += 1;
            if off[d] < side {
                break;
            }
            off[d] = 0;
            d += 1;
        }
    }
}

fn small_anchor(params: &TorusParams, residue: &[i64]) -> Vec<i64> {
    let mut a = residue.to_vec();
    let last = params.n - 1;
    a[last] = (a[last] + params.q).rem_euclid(params.m);
    a
}

fn check_budget(params: &TorusParams, budget: u64) -> Result<usize> {
    let cells = params.cell_count().unwrap_or(u64::MAX);
    if cells > budget {
        return Err(Error::BudgetExceeded {
            what: "torus cells",
            needed: cells as u128,
            budget: budget as u128,
        });
    }
    Ok(cells as usize)
}

/// Subgroup of `(Z/m)^n` generated by `generators`, by breadth-first search.
fn residue_subgroup(params: &TorusParams, generators: &[Vec<i64>], cells: usize) -> Vec<Vec<i64>> {
    let (n, m) = (params.n, params.m);
    let mut seen = vec![false; cells];
    let zero = vec![0i64; n];
    seen[encode(&zero, m)] = true;
    let mut queue = VecDeque::from([zero]);
    let mut out = Vec::new();
    while let Some(r) = queue.pop_front() {
        for g in generators {
            let next: Vec<i64> = r.iter().zip(g).map(|(a, b)| (a + b).rem_euclid(m)).collect();
            let idx = encode(&next, m);
            if !seen[idx] {
                seen[idx] = true;
                queue.push_back(next);
            }
        }
        out.push(r);
    }
    out.sort();
    out
}

/// Places `C` at every residue of the lattice spanned by `generators`.
fn assemble(params: &TorusParams, generators: &[Vec<i64>], cells: usize) -> Result<TorusTiling> {
    let (n, m) = (params.n, params.m);
    let residues = residue_subgroup(params, generators, cells);
    let expected = (m as usize).pow(n as u32 - 1);
    if residues.len() != expected {
        return Err(Error::CoverViolation {
            cell: vec![0; n],
            reason: format!("residue subgroup has order {}, expected {expected}", residues.len()),
        });
    }
    let mut tiles = Vec::with_capacity(2 * residues.len());
    let mut assignment = vec![UNASSIGNED; cells];
    for r in &residues {
        for (kind, anchor) in [(TileKind::Big, r.clone()), (TileKind::Small, small_anchor(params, r))] {
            let id = tiles.len() as u32;
            for c in cube_cells(params, kind, &anchor) {
                if assignment[c] != UNASSIGNED {
                    return Err(Error::CoverViolation {
                        cell: decode(c, n, m),
                        reason: "cell covered twice".into(),
                    });
                }
                assignment[c] = id;
            }
            tiles.push(TorusTile { kind, anchor });
        }
    }
    if let Some(c) = assignment.iter().position(|&a| a == UNASSIGNED) {
        return Err(Error::CoverViolation {
            cell: decode(c, n, m),
            reason: "cell not covered".into(),
        });
    }
    Ok(TorusTiling {
        params: params.clone(),
        residues,
        tiles,
        assignment,
    })
}

fn columns_mod(h: &IntMat, m: i64) -> Vec<Vec<i64>> {
    (0..h.n())
        .map(|j| h.col_i64(j).into_iter().map(|x| x.rem_euclid(m)).collect())
        .collect()
}

pub fn build_torus_tiling(params: &TorusParams) -> Result<TorusTiling> {
    build_torus_tiling_with_budget(params, DEFAULT_CELL_BUDGET)
}

pub fn build_torus_tiling_with_budget(params: &TorusParams, cell_budget: u64) -> Result<TorusTiling> {
    let cells = check_budget(params, cell_budget)?;
    let gens = columns_mod(&integer_basis(params), params.m);
    assemble(params, &gens, cells)
}

/// Outcome of the two unilaterality checks on a torus tiling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnilateralAudit {
    /// No `p e_i` or `q e_i` is a lattice residue.
    pub residue_check: bool,
    /// No two equal cubes share a full facet in the assignment.
    pub facet_scan: bool,
    /// A pair of facet-sharing cubes, if the scan found one.
    pub counterexample: Option<(TorusTile, TorusTile)>,
}

impl UnilateralAudit {
    pub fn passed(&self) -> bool {
        self.residue_check && self.facet_scan
    }
}

pub fn audit_unilateral_torus(t: &TorusTiling) -> UnilateralAudit {
    let params = &t.params;
    let (n, m) = (params.n, params.m);
    let mut is_residue = vec![false; t.assignment.len()];
    for r in &t.residues {
        is_residue[encode(r, m)] = true;
    }
    let residue_check = (0..n).all(|i| {
        [params.p, params.q].iter().all(|&s| {
            let mut v = vec![0i64; n];
            v[i] = s;
            !is_residue[encode(&v, m)]
        })
    });

    let mut counterexample = None;
    'tiles: for (id, tile) in t.tiles.iter().enumerate() {
        let side = params.side(tile.kind);
        let cells = cube_cells(params, tile.kind, &tile.anchor);
        if !cells.iter().all(|&c| t.assignment[c] == id as u32) {
            continue;
        }
        for axis in 0..n {
            let mut facet = Vec::new();
            let mut across = Vec::new();
            for &c in &cells {
                let cell = decode(c, n, m);
                if (cell[axis] - tile.anchor[axis]).rem_euclid(m) == side - 1 {
                    let mut next = cell.clone();
                    next[axis] = (next[axis] + 1).rem_euclid(m);
                    facet.push(c);
                    across.push(encode(&next, m));
                }
            }
            let other = t.assignment[across[0]];
            if other == UNASSIGNED || other == id as u32 {
                continue;
            }
            let Some(neighbor) = t.tiles.get(other as usize) else { continue };
            if neighbor.kind == tile.kind && across.iter().all(|&c| t.assignment[c] == other) {
                counterexample = Some((tile.clone(), neighbor.clone()));
                break 'tiles;
            }
        }
    }
    UnilateralAudit {
        residue_check,
        facet_scan: counterexample.is_none(),
        counterexample,
    }
}

pub fn verify_unilateral_torus(t: &TorusTiling) -> bool {
    audit_unilateral_torus(t).passed()
}

/// Cube counts of the torus tiling; with `p = 1, q = 2` the big cubes are a
/// packing of `(2^n + 1)^{n-1}` side-2 cubes in `(Z/(2^n+1))^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingReport {
    pub n: usize,
    pub modulus: i64,
    pub big_side: i64,
    pub big_count: u64,
    pub small_side: i64,
    pub small_count: u64,
}

pub fn packing_report(params: &TorusParams) -> Result<PackingReport> {
    let t = build_torus_tiling(params)?;
    Ok(PackingReport {
        n: params.n,
        modulus: params.m,
        big_side: params.q,
        big_count: t.count(TileKind::Big) as u64,
        small_side: params.p,
        small_count: t.count(TileKind::Small) as u64,
    })
}

/// Every column Hermite normal form (lower-triangular, entries left of the
/// diagonal in `[0, h_ii)`) of determinant `index`.
pub fn hnf_with_index(n: usize, index: i64) -> Vec<IntMat> {
    let mut diagonals = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn split(rest: i64, slots: usize, current: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if slots == 1 {
            current.push(rest);
            out.push(current.clone());
            current.pop();
            return;
        }
        for d in (1..=rest).filter(|d| rest % d == 0) {
            current.push(d);
            split(rest / d, slots - 1, current, out);
            current.pop();
        }
    }
    split(index, n, &mut current, &mut diagonals);

    let mut out = Vec::new();
    for diag in diagonals {
        // free entries: row i, columns 0..i, each in [0, diag[i])
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
        let mut vals = vec![0i64; slots.len()];
        loop {
            let mut rows = vec![vec![0i64; n]; n];
            for i in 0..n {
                rows[i][i] = diag[i];
            }
            for (&(i, j), &v) in slots.iter().zip(&vals) {
                rows[i][j] = v;
            }
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            out.push(IntMat::from_rows(&refs));
            let mut d = 0;
            loop {
                if d == slots.len() {
                    break;
                }
                vals[d] += 1;
                if vals[d] < diag[slots[d].0] {
                    break;
                }
                vals[d] = 0;
                d += 1;
            }
            if d == slots.len() {
                break;
            }
        }
    }
    out
}

/// Number of index-`index` sublattices of `Z^n`, `Σ Π d_i^{i}` over ordered
/// factorisations (0-based `i`).
pub fn hnf_count(n: usize, index: i64) -> u64 {
    fn go(rest: i64, i: usize, n: usize) -> u64 {
        if i == n - 1 {
            return (rest as u64).pow(i as u32);
        }
        (1..=rest)
            .filter(|d| rest % d == 0)
            .map(|d| (d as u64).pow(i as u32) * go(rest / d, i + 1, n))
            .sum()
    }
    go(index, 0, n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSurvivor {
    /// Rows of the Hermite normal form.
    pub hnf: Vec<Vec<i64>>,
    pub is_basis_lattice: bool,
    /// Signed permutation carrying `A Z^n` onto this lattice, if any.
    pub equivalent_via: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n: usize,
    pub p: i64,
    pub q: i64,
    pub m: i64,
    pub candidates: u64,
    pub survivors: Vec<ScanSurvivor>,
}

impl ScanReport {
    pub fn contains_basis_lattice(&self) -> bool {
        self.survivors.iter().any(|s| s.is_basis_lattice)
    }

    pub fn all_equivalent(&self) -> bool {
        self.survivors.iter().all(|s| s.equivalent_via.is_some())
    }
}

pub const MAX_SCAN_N: usize = 3;

/// Tests every index-`m` sublattice of `Z^n` for whether translates of the
/// fixed domain `C` exactly cover `(Z/m)^n`.
///
/// A lattice `L` with `|det L| = m` contains `m Z^n` (`m L^{-1} = ±adj(L)` is
/// integral), so tiling `Z^n` by `C + L` is the same as tiling the torus.
pub fn scan_candidate_lattices(params: &TorusParams) -> Result<ScanReport> {
    scan_candidate_lattices_with_budget(params, DEFAULT_HNF_BUDGET, DEFAULT_CELL_BUDGET)
}

pub fn scan_candidate_lattices_with_budget(
    params: &TorusParams,
    hnf_budget: u64,
    cell_budget: u64,
) -> Result<ScanReport> {
    if params.n > MAX_SCAN_N {
        return Err(Error::TooLarge {
            n: params.n,
            max: MAX_SCAN_N,
        });
    }
    let count = hnf_count(params.n, params.m);
    if count > hnf_budget {
        return Err(Error::BudgetExceeded {
            what: "candidate lattices",
            needed: count as u128,
            budget: hnf_budget as u128,
        });
    }
    let cells = check_budget(params, cell_budget)?;
    let tiling_params = params.tiling_params();
    let own = integer_basis(params).hnf()?;
    let mut survivors = Vec::new();
    let candidates = hnf_with_index(params.n, params.m);
    debug_assert_eq!(candidates.len() as u64, count);
    for h in &candidates {
        match assemble(params, &columns_mod(h, params.m), cells) {
            Ok(_) => {}
            Err(Error::CoverViolation { .. }) => continue,
            Err(e) => return Err(e),
        }
        let via = lattice_equivalent(&h.to_rat(), &tiling_params)?;
        survivors.push(ScanSurvivor {
            hnf: (0..params.n).map(|i| (0..params.n).map(|j| h.get(i, j).to_i64().unwrap()).collect()).collect(),
            is_basis_lattice: *h == own,
            equivalent_via: via.map(|s| s.to_string()),
        });
    }
    Ok(ScanReport {
        n: params.n,
        p: params.p,
        q: params.q,
        m: params.m,
        candidates: candidates.len() as u64,
        survivors,
    })
}

/// Versioned summary document for one torus run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusReport {
    pub schema_version: u32,
    pub n: usize,
    pub p: i64,
    pub q: i64,
    pub m: i64,
    pub residue_count: u64,
    pub big_count: u64,
    pub small_count: u64,
    pub exact_cover: bool,
    pub unilateral: bool,
    pub min_period: i64,
    pub survivors: Vec<ScanSurvivor>,
}

/// Builds the tiling and fills a [`TorusReport`]; `survivors` is filled only
/// when `scan` is set.
pub fn torus_report(params: &TorusParams, cell_budget: u64, scan: bool) -> Result<TorusReport> {
    let t = build_torus_tiling_with_budget(params, cell_budget)?;
    let periods = (0..params.n)
        .map(|i| minimal_axis_period(params, i))
        .collect::<Result<Vec<_>>>()?;
    let min_period = *periods.iter().min().expect("n >= 2");
    let survivors = if scan {
        scan_candidate_lattices_with_budget(params, DEFAULT_HNF_BUDGET, cell_budget)?.survivors
    } else {
        Vec::new()
    };
    Ok(TorusReport {
        schema_version: REPORT_SCHEMA_VERSION,
        n: params.n,
        p: params.p,
        q: params.q,
        m: params.m,
        residue_count: t.residues.len() as u64,
        big_count: t.count(TileKind::Big) as u64,
        small_count: t.count(TileKind::Small) as u64,
        exact_cover: t.is_exact_cover(),
        unilateral: verify_unilateral_torus(&t),
        min_period,
        survivors,
    })
}
