//! Finite-dimensional complex signals and the time-frequency shift algebra on
//! `Z_M`: translation, modulation, the normalized DFT, and the metric on
//! up-to-global-phase equivalence classes.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A length-`M` complex vector. Entries are validated finite at construction
/// and immutable afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    values: Vec<C64>,
}

impl Signal {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid {
                what: "signal",
                detail: "dimension must be positive".into(),
            });
        }
        for (index, v) in values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(Self { values })
    }

    /// All-zero signal of dimension `m` (`m >= 1`).
    pub fn zeros(m: usize) -> Self {
        Self {
            values: vec![C64::new(0.0, 0.0); m],
        }
    }

    /// Standard complex Gaussian entries, driven by the supplied generator.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let values = (0..m)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn get(&self, m: usize) -> C64 {
        self.values[m]
    }

    /// Inner product, linear in `self` and conjugate-linear in `other`.
    pub fn inner(&self, other: &Signal) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, z: C64) -> Signal {
        Signal {
            values: self.values.iter().map(|v| v * z).collect(),
        }
    }
}

/// A point of `Z_M x Z_M`: time shift `k`, frequency shift `l`. Construction
/// reduces both coordinates into `[0, M)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TFIndex {
    pub k: usize,
    pub l: usize,
}

impl TFIndex {
    pub fn new(k: i64, l: i64, modulus: usize) -> Self {
        let m = modulus as i64;
        Self {
            k: k.rem_euclid(m) as usize,
            l: l.rem_euclid(m) as usize,
        }
    }
}

impl std::fmt::Display for TFIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.k, self.l)
    }
}

/// Table of `M`-th roots of unity, `w[r] = exp(-2 pi i r / M)`. Indexing the
/// table by `j*m mod M` keeps structurally exact values (e.g. `w[0] = 1`)
/// exact in floating point.
pub(crate) fn root_table(m: usize) -> Vec<C64> {
    (0..m)
        .map(|r| {
            let angle = -TAU * (r as f64) / (m as f64);
            C64::new(angle.cos(), angle.sin())
        })
        .collect()
}

/// Cyclic translation: `output(m) = x((m - k) mod M)`.
pub fn translate(x: &Signal, k: i64) -> Signal {
    let m = x.dim();
    let shift = k.rem_euclid(m as i64) as usize;
    let values = (0..m)
        .map(|i| x.values[(i + m - shift) % m])
        .collect();
    Signal { values }
}

/// Modulation: `output(m) = exp(2 pi i l m / M) x(m)`.
pub fn modulate(x: &Signal, l: i64) -> Signal {
    let m = x.dim();
    let shift = l.rem_euclid(m as i64) as usize;
    let table = root_table(m);
    let values = (0..m)
        .map(|i| x.values[i] * table[(shift * i) % m].conj())
        .collect();
    Signal { values }
}

/// Time-frequency shift `pi(k, l) = M_l T_k`.
pub fn tf_shift(x: &Signal, index: TFIndex) -> Signal {
    modulate(&translate(x, index.k as i64), index.l as i64)
}

/// Normalized forward DFT: `output(j) = (1/M) sum_m x(m) exp(-2 pi i j m / M)`.
/// With this normalization the transform of an indicator evaluates to the set
/// density at frequency zero.
pub fn dft(x: &Signal) -> Signal {
    let m = x.dim();
    let table = root_table(m);
    let scale = 1.0 / m as f64;
    let values = (0..m)
        .map(|j| {
            let mut acc = C64::new(0.0, 0.0);
            for (i, v) in x.values.iter().enumerate() {
                acc += v * table[(j * i) % m];
            }
            acc * scale
        })
        .collect();
    Signal { values }
}

/// Inverse of [`dft`]: `output(m) = sum_j y(j) exp(2 pi i j m / M)`.
pub fn inverse_dft(y: &Signal) -> Signal {
    let m = y.dim();
    let table = root_table(m);
    let values = (0..m)
        .map(|i| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, v) in y.values.iter().enumerate() {
                acc += v * table[(j * i) % m].conj();
            }
            acc
        })
        .collect();
    Signal { values }
}

/// Coordinatewise product `x ⊙ y`.
pub fn coordwise_product(x: &Signal, y: &Signal) -> Result<Signal> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            actual: y.dim(),
        });
    }
    let values = x
        .values
        .iter()
        .zip(&y.values)
        .map(|(a, b)| a * b)
        .collect();
    Ok(Signal { values })
}

/// Distance between up-to-global-phase equivalence classes:
/// `min over theta of ||x - exp(i theta) y||_2`.
///
/// Evaluated by aligning `y` with the optimal phase and subtracting, which
/// avoids the cancellation the closed form `sqrt(||x||^2 + ||y||^2 - 2|<x,y>|)`
/// suffers near zero.
pub fn phase_distance(x: &Signal, y: &Signal) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            actual: y.dim(),
        });
    }
    let ip = x.inner(y);
    let ip_norm = ip.norm();
    if ip_norm == 0.0 {
        return Ok((x.norm_sq() + y.norm_sq()).sqrt());
    }
    let rotation = ip / ip_norm;
    let diff_sq: f64 = x
        .values
        .iter()
        .zip(&y.values)
        .map(|(a, b)| (a - rotation * b).norm_sqr())
        .sum();
    Ok(diff_sq.sqrt())
}
