//! Subsets of `Z_M` and their pseudorandomness measures: density, Fourier
//! bias, the minimum-cardinality low-bias search, difference sets, and
//! seeded Bernoulli sampling.

use itertools::Itertools;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::signal::{dft, root_table, Signal, C64};

/// Largest modulus accepted by the exhaustive search (2^20 candidate subsets).
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 20;

/// A subset of `Z_M`, kept sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawIndexSet")]
pub struct IndexSet {
    modulus: usize,
    members: Vec<usize>,
}

#[derive(Deserialize)]
struct RawIndexSet {
    modulus: usize,
    members: Vec<usize>,
}

impl TryFrom<RawIndexSet> for IndexSet {
    type Error = Error;
    fn try_from(raw: RawIndexSet) -> Result<Self> {
        IndexSet::new(raw.modulus, raw.members)
    }
}

impl IndexSet {
    /// Builds a set, sorting and deduplicating the members.
    pub fn new(modulus: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Invalid {
                what: "index set",
                detail: "modulus must be positive".into(),
            });
        }
        let mut members: Vec<usize> = members.into_iter().collect();
        for &v in &members {
            if v >= modulus {
                return Err(Error::IndexOutOfRange { value: v, modulus });
            }
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self { modulus, members })
    }

    /// Builds a set from signed residues, reducing each into `[0, M)`.
    pub fn from_signed(modulus: usize, members: impl IntoIterator<Item = i64>) -> Result<Self> {
        let m = modulus as i64;
        Self::new(
            modulus,
            members.into_iter().map(|v| v.rem_euclid(m) as usize),
        )
    }

    pub fn full(modulus: usize) -> Self {
        Self {
            modulus,
            members: (0..modulus).collect(),
        }
    }

    pub fn empty(modulus: usize) -> Self {
        Self {
            modulus,
            members: Vec::new(),
        }
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, value: usize) -> bool {
        self.members.binary_search(&value).is_ok()
    }

    /// Position of `value` in the sorted member list.
    pub fn position(&self, value: usize) -> Option<usize> {
        self.members.binary_search(&value).ok()
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.modulus == other.modulus && self.members.iter().all(|&v| other.contains(v))
    }

    /// `P(A) = |A| / M`.
    pub fn density(&self) -> f64 {
        self.members.len() as f64 / self.modulus as f64
    }

    /// 0/1 indicator as a signal.
    pub fn indicator(&self) -> Signal {
        let mut values = vec![C64::new(0.0, 0.0); self.modulus];
        for &v in &self.members {
            values[v] = C64::new(1.0, 0.0);
        }
        Signal::new(values).expect("indicator entries are finite")
    }

    /// Fourier bias `max over m != 0 of |F(1_A)(m)|`; zero when `M = 1`.
    pub fn fourier_bias(&self) -> f64 {
        if self.modulus == 1 {
            return 0.0;
        }
        let spectrum = dft(&self.indicator());
        (1..self.modulus)
            .map(|j| spectrum.get(j).norm())
            .fold(0.0, f64::max)
    }

    /// `{(a - b) mod M : a, b in self}`; always contains 0 for nonempty sets.
    pub fn difference_set(&self) -> Result<IndexSet> {
        if self.is_empty() {
            return Err(Error::EmptySet { what: "set" });
        }
        let m = self.modulus as i64;
        let mut diffs = BTreeSet::new();
        for &a in &self.members {
            for &b in &self.members {
                diffs.insert((a as i64 - b as i64).rem_euclid(m) as usize);
            }
        }
        Ok(IndexSet {
            modulus: self.modulus,
            members: diffs.into_iter().collect(),
        })
    }
}

/// Bias of a member list against a shared root table; summation order matches
/// [`IndexSet::fourier_bias`] so both paths agree to the last bit.
fn bias_of_members(modulus: usize, members: &[usize], table: &[C64]) -> f64 {
    if modulus == 1 {
        return 0.0;
    }
    let scale = 1.0 / modulus as f64;
    let mut max = 0.0f64;
    for j in 1..modulus {
        let mut acc = C64::new(0.0, 0.0);
        for &a in members {
            acc += table[(j * a) % modulus];
        }
        max = max.max((acc * scale).norm());
    }
    max
}

/// `true` iff `||A||_u <= c * P(A)`. Rejects the empty set and factors
/// outside `(0, 1)`.
pub fn check_pseudorandom(set: &IndexSet, c: f64) -> Result<bool> {
    if set.is_empty() {
        return Err(Error::EmptySet { what: "set" });
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidFactor(c));
    }
    Ok(set.fourier_bias() <= c * set.density())
}

/// The bias-to-density factor `(C - 3) / (C - 1)` used throughout; requires
/// `C > 3`.
pub fn bias_ratio(big_c: f64) -> Result<f64> {
    if big_c.is_nan() || big_c <= 3.0 {
        return Err(Error::InvalidConstant(big_c));
    }
    Ok((big_c - 3.0) / (big_c - 1.0))
}

/// Bernoulli(rate) subset of `Z_M`, deterministic in the seed.
pub fn random_subset(modulus: usize, rate: f64, seed: u64) -> Result<IndexSet> {
    if modulus == 0 {
        return Err(Error::Invalid {
            what: "index set",
            detail: "modulus must be positive".into(),
        });
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidRate(rate));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members: Vec<usize> = (0..modulus).filter(|_| rng.random_bool(rate)).collect();
    Ok(IndexSet { modulus, members })
}

/// Search strategy for [`beta`].
#[derive(Clone, Debug)]
pub enum BetaMode {
    /// Enumerate all nonempty subsets by cardinality, then lexicographically.
    /// Refuses moduli above `max_modulus`.
    Exhaustive { max_modulus: usize },
    /// Seeded Bernoulli draws over a rate ladder; returns the smallest
    /// qualifying set seen, labeled as an upper bound.
    Randomized { trials: u64, seed: u64 },
}

impl BetaMode {
    pub fn exhaustive() -> Self {
        BetaMode::Exhaustive {
            max_modulus: DEFAULT_EXHAUSTIVE_LIMIT,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BetaResult {
    /// Cardinality of the witness; the exact minimum when `exact` holds.
    pub cardinality: usize,
    pub witness: IndexSet,
    /// `true` for the exhaustive search, `false` for a randomized upper bound.
    pub exact: bool,
}

/// Minimum cardinality of a nonempty `P` in `Z_M` with
/// `||P||_u <= ((C-3)/(C-1)) P(P)`, together with a witness.
///
/// The exhaustive mode returns the exact minimum and the lexicographically
/// smallest witness of that cardinality. The randomized mode returns an upper
/// bound (`exact = false`) or an explicit inconclusive error, never a silent
/// answer.
pub fn beta(modulus: usize, big_c: f64, mode: &BetaMode) -> Result<BetaResult> {
    if modulus == 0 {
        return Err(Error::Invalid {
            what: "beta search",
            detail: "modulus must be positive".into(),
        });
    }
    let c = bias_ratio(big_c)?;
    let table = root_table(modulus);
    let feasible = |members: &[usize]| -> bool {
        let density = members.len() as f64 / modulus as f64;
        bias_of_members(modulus, members, &table) <= c * density
    };
    match *mode {
        BetaMode::Exhaustive { max_modulus } => {
            if modulus > max_modulus {
                return Err(Error::BudgetExceeded {
                    required: 1u128 << modulus.min(127),
                    budget: 1u64 << max_modulus.min(63),
                });
            }
            for size in 1..=modulus {
                for combo in (0..modulus).combinations(size) {
                    if feasible(&combo) {
                        return Ok(BetaResult {
                            cardinality: size,
                            witness: IndexSet {
                                modulus,
                                members: combo,
                            },
                            exact: true,
                        });
                    }
                }
            }
            // The full set always qualifies (bias 0), so this is unreachable;
            // keep an explicit error rather than a panic.
            Err(Error::SearchInconclusive { trials: 0 })
        }
        BetaMode::Randomized { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best: Option<(usize, Vec<usize>)> = None;
            for trial in 0..trials {
                let rate = ((trial as usize % modulus) + 1) as f64 / modulus as f64;
                let members: Vec<usize> =
                    (0..modulus).filter(|_| rng.random_bool(rate)).collect();
                if members.is_empty() {
                    continue;
                }
                if best.as_ref().is_some_and(|(n, _)| members.len() >= *n) {
                    continue;
                }
                if feasible(&members) {
                    best = Some((members.len(), members));
                }
            }
            match best {
                Some((cardinality, members)) => Ok(BetaResult {
                    cardinality,
                    witness: IndexSet { modulus, members },
                    exact: false,
                }),
                None => Err(Error::SearchInconclusive { trials }),
            }
        }
    }
}
