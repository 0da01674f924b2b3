//! Aggregated self-check of one parameter set, as run by `hyptile verify`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ratlin::{fmt_rational, RatVec, Rational};
use crate::symmetry::{
    generator_orders_hold, is_group, is_stabilizer, stabilizer_brute_force, stabilizer_closed_form,
    SignedPermutation, MAX_BRUTE_FORCE_N,
};
use crate::tiling::{Tiling, TilingParams};
use crate::torus::{
    adjugate_entry_check, audit_unilateral_torus, build_torus_tiling_with_budget, minimal_axis_period,
    TorusParams,
};

pub const VERIFY_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub brute_force: bool,
    pub cell_budget: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 10_000,
            seed: 0x5eed,
            brute_force: false,
            cell_budget: crate::torus::DEFAULT_CELL_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub skipped: bool,
    pub detail: String,
    pub counterexample: Option<String>,
}

impl CheckResult {
    fn pass(name: &str, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            skipped: false,
            detail: detail.into(),
            counterexample: None,
        }
    }

    fn fail(name: &str, detail: impl Into<String>, counterexample: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            skipped: false,
            detail: detail.into(),
            counterexample: Some(counterexample.into()),
        }
    }

    fn skip(name: &str, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            skipped: true,
            detail: detail.into(),
            counterexample: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub n: usize,
    pub p: String,
    pub q: String,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Random rational point with coordinates in `[-spread, spread]` and
/// denominators up to 12.
pub fn random_point<R: Rng>(rng: &mut R, n: usize, spread: i64) -> RatVec {
    RatVec::new(
        (0..n)
            .map(|_| {
                let den = rng.gen_range(1..=12i64);
                let num = rng.gen_range(-spread * den..=spread * den);
                Rational::new(BigInt::from(num), BigInt::from(den))
            })
            .collect(),
    )
}

/// Random rational point of the half-open fundamental domain.
pub fn random_point_in_domain<R: Rng>(rng: &mut R, params: &TilingParams) -> RatVec {
    let n = params.n();
    let big = rng.gen_bool(0.5);
    let mut unit = || {
        let den = rng.gen_range(1..=60i64);
        Rational::new(BigInt::from(rng.gen_range(0..den)), BigInt::from(den))
    };
    let mut coords = Vec::with_capacity(n);
    for i in 0..n {
        let c = if big {
            params.q() * unit()
        } else if i + 1 < n {
            params.p() * unit()
        } else {
            params.q() + params.p() * unit()
        };
        coords.push(c);
    }
    RatVec::new(coords)
}

fn spread_for(params: &TilingParams) -> i64 {
    let reach = (params.p() + params.q()) * Rational::from_integer(BigInt::from(3));
    reach.ceil().to_integer().to_i64().unwrap_or(i64::MAX / 64).clamp(4, 1 << 20)
}

/// The integer torus parameters, when `p`, `q` are coprime integers.
pub fn torus_params_of(params: &TilingParams) -> Option<TorusParams> {
    if !params.p().is_integer() || !params.q().is_integer() {
        return None;
    }
    let p = params.p().to_integer().to_i64()?;
    let q = params.q().to_integer().to_i64()?;
    TorusParams::new(params.n(), p, q).ok()
}

pub fn run_verification(params: &TilingParams, config: &VerifyConfig) -> Result<VerificationReport> {
    let tiling = Tiling::new(params.clone());
    let n = params.n();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = Vec::new();

    let det = tiling.basis().det().clone();
    checks.push(if det == params.covolume() {
        CheckResult::pass("determinant", format!("det(A) = {}", fmt_rational(&det)))
    } else {
        CheckResult::fail(
            "determinant",
            "det(A) differs from p^n + q^n",
            fmt_rational(&det),
        )
    });

    let spread = spread_for(params);
    let mut roundtrip = None;
    for _ in 0..config.samples {
        let x = random_point(&mut rng, n, spread);
        let cp = tiling.canonicalize(&x)?;
        let back = &cp.c + &tiling.basis().point(&cp.k);
        let again = tiling.canonicalize(&cp.c)?;
        if back != x || !tiling.domain().contains(&cp.c) || again.c != cp.c || !again.k.iter().all(Zero::is_zero) {
            roundtrip = Some(x);
            break;
        }
    }
    checks.push(match roundtrip {
        None => CheckResult::pass("canonicalize-roundtrip", format!("{} samples", config.samples)),
        Some(x) => CheckResult::fail("canonicalize-roundtrip", "x != c + A k or c outside C", x.to_string()),
    });

    let mut clash = None;
    let mut pairs = 0;
    while pairs < config.samples {
        let a = random_point_in_domain(&mut rng, params);
        let b = random_point_in_domain(&mut rng, params);
        if a == b {
            continue;
        }
        pairs += 1;
        if tiling.is_lattice_member(&(&a - &b))? {
            clash = Some(format!("{a} ~ {b}"));
            break;
        }
    }
    checks.push(match clash {
        None => CheckResult::pass("representative-uniqueness", format!("{pairs} pairs")),
        Some(c) => CheckResult::fail("representative-uniqueness", "two points of C differ by a lattice vector", c),
    });

    checks.push(match tiling.unilateral_violation() {
        None => CheckResult::pass("unilateral", "no p e_i or q e_i in the lattice"),
        Some(v) => CheckResult::fail("unilateral", "axis vector in the lattice", v.to_string()),
    });

    let closed: Vec<SignedPermutation> = stabilizer_closed_form(n)?.into_iter().map(|s| s.into_perm()).collect();
    let mut bad = None;
    for s in &closed {
        if !is_stabilizer(s, tiling.basis())? {
            bad = Some(s.to_string());
            break;
        }
    }
    checks.push(match bad {
        None if is_group(&closed) && generator_orders_hold(n) => CheckResult::pass(
            "stabilizer-closed-form",
            format!("{} elements, cyclic, g^n = -I", closed.len()),
        ),
        None => CheckResult::fail("stabilizer-closed-form", "group axioms fail", "closed form"),
        Some(s) => CheckResult::fail("stabilizer-closed-form", "pattern element does not stabilize", s),
    });

    if config.brute_force && n <= MAX_BRUTE_FORCE_N {
        let brute = stabilizer_brute_force(n, tiling.basis())?;
        checks.push(if brute == closed {
            CheckResult::pass("stabilizer-brute-force", format!("{} of B'_{n} stabilize", brute.len()))
        } else {
            let extra = brute
                .iter()
                .find(|s| !closed.contains(s))
                .or_else(|| closed.iter().find(|s| !brute.contains(s)))
                .map(|s| s.to_string())
                .unwrap_or_default();
            CheckResult::fail("stabilizer-brute-force", "brute force disagrees with closed form", extra)
        });
    } else {
        checks.push(CheckResult::skip(
            "stabilizer-brute-force",
            format!("enable with --brute-force (n <= {MAX_BRUTE_FORCE_N})"),
        ));
    }

    match torus_params_of(params) {
        None => {
            checks.push(CheckResult::skip("axis-period", "needs coprime integer sides"));
            checks.push(CheckResult::skip("torus-cover", "needs coprime integer sides"));
        }
        Some(tp) => {
            let periods = (0..n).map(|i| minimal_axis_period(&tp, i)).collect::<Result<Vec<_>>>()?;
            checks.push(
                if periods.iter().all(|&l| l == tp.m()) && adjugate_entry_check(&tp) {
                    CheckResult::pass("axis-period", format!("period {} on every axis", tp.m()))
                } else {
                    CheckResult::fail("axis-period", "period differs from p^n + q^n", format!("{periods:?}"))
                },
            );
            checks.push(match build_torus_tiling_with_budget(&tp, config.cell_budget) {
                Ok(t) => {
                    let audit = audit_unilateral_torus(&t);
                    if t.is_exact_cover() && audit.passed() {
                        CheckResult::pass(
                            "torus-cover",
                            format!("(Z/{})^{n}: exact cover, unilateral", tp.m()),
                        )
                    } else {
                        CheckResult::fail(
                            "torus-cover",
                            "torus tiling is not a unilateral exact cover",
                            format!("{:?}", audit.counterexample),
                        )
                    }
                }
                Err(crate::Error::BudgetExceeded { needed, budget, .. }) => CheckResult::skip(
                    "torus-cover",
                    format!("{needed} cells exceed the budget {budget}"),
                ),
                Err(crate::Error::CoverViolation { cell, reason }) => {
                    CheckResult::fail("torus-cover", reason, format!("{cell:?}"))
                }
                Err(e) => return Err(e),
            });
        }
    }

    Ok(VerificationReport {
        schema_version: VERIFY_SCHEMA_VERSION,
        n,
        p: fmt_rational(params.p()),
        q: fmt_rational(params.q()),
        checks,
    })
}
