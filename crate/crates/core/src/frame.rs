//! Windows, auxiliary windows, lattices, the assembled multi-window Gabor
//! frame, the phaseless measurement map, and the full-spark checker.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::sets::IndexSet;
use crate::signal::{root_table, tf_shift, Signal, TFIndex, C64};

/// Smallest coordinate modulus accepted when sampling a random window. The
/// nowhere-vanishing assumption gives no threshold; this one keeps the
/// auxiliary-mask quotients `g(m-q)/g(m)` conditioned.
pub const MIN_WINDOW_MODULUS: f64 = 1e-8;

/// Determinant margin (relative to the product of column norms) below which a
/// subset counts as a spark failure.
pub const SPARK_MARGIN_THRESHOLD: f64 = 1e-10;

/// Default cap on the number of subsets the exhaustive spark check may visit.
pub const DEFAULT_SPARK_BUDGET: u64 = 1_000_000;

/// A nowhere-vanishing window. Only the primary window carries this
/// invariant; auxiliary windows are plain signals and may vanish.
#[derive(Clone, Debug)]
pub struct Window {
    signal: Signal,
    min_modulus: f64,
}

impl Window {
    pub fn new(signal: Signal) -> Result<Self> {
        let mut min_modulus = f64::INFINITY;
        let mut min_index = 0;
        for (i, v) in signal.values().iter().enumerate() {
            let modulus = v.norm();
            if modulus < min_modulus {
                min_modulus = modulus;
                min_index = i;
            }
        }
        if min_modulus == 0.0 {
            return Err(Error::VanishingWindow { index: min_index });
        }
        Ok(Self { signal, min_modulus })
    }

    pub fn signal(&self) -> &Signal {
        &self.signal
    }

    pub fn dim(&self) -> usize {
        self.signal.dim()
    }

    pub fn min_modulus(&self) -> f64 {
        self.min_modulus
    }
}

/// Unit-norm window drawn uniformly from the complex sphere, resampled until
/// every coordinate modulus clears [`MIN_WINDOW_MODULUS`].
pub fn random_window(m: usize, seed: u64) -> Window {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let raw = Signal::random(m, &mut rng);
        let norm = raw.norm();
        if norm == 0.0 {
            continue;
        }
        let unit = raw.scaled(C64::new(1.0 / norm, 0.0));
        match Window::new(unit) {
            Ok(window) if window.min_modulus() >= MIN_WINDOW_MODULUS => return window,
            _ => continue,
        }
    }
}

/// Auxiliary window `g_qpt(m) = g(m) + exp(2 pi i (m p / M + t / 3)) g(m - q)`,
/// i.e. `g ⊙ s_qpt` evaluated without forming the quotient mask. The result
/// may vanish at some coordinates; only the primary window is constrained.
pub fn auxiliary_window(g: &Window, q: i64, p: i64, t: u8) -> Result<Signal> {
    if t > 2 {
        return Err(Error::InvalidAuxPhase(t));
    }
    let m = g.dim();
    let q = q.rem_euclid(m as i64) as usize;
    let p = p.rem_euclid(m as i64) as usize;
    let table = root_table(m);
    let cube_phase = C64::from_polar(1.0, TAU * t as f64 / 3.0);
    let gv = g.signal().values();
    let values = (0..m)
        .map(|i| {
            let modulation = table[(p * i) % m].conj() * cube_phase;
            gv[i] + modulation * gv[(i + m - q) % m]
        })
        .collect();
    Signal::new(values)
}

/// The lattice `Λ = T x F` of time-frequency shifts, enumerated with `k`
/// major and `l` minor over the sorted supports.
#[derive(Clone, Debug)]
pub struct Lattice {
    t: IndexSet,
    f: IndexSet,
}

impl Lattice {
    pub fn new(t: IndexSet, f: IndexSet) -> Result<Self> {
        if t.modulus() != f.modulus() {
            return Err(Error::ModulusMismatch {
                left: t.modulus(),
                right: f.modulus(),
            });
        }
        if t.is_empty() {
            return Err(Error::EmptySet { what: "time support T" });
        }
        if f.is_empty() {
            return Err(Error::EmptySet { what: "frequency support F" });
        }
        Ok(Self { t, f })
    }

    pub fn full(m: usize) -> Self {
        Self {
            t: IndexSet::full(m),
            f: IndexSet::full(m),
        }
    }

    pub fn modulus(&self) -> usize {
        self.t.modulus()
    }

    pub fn time_support(&self) -> &IndexSet {
        &self.t
    }

    pub fn freq_support(&self) -> &IndexSet {
        &self.f
    }

    pub fn len(&self) -> usize {
        self.t.len() * self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_full(&self) -> bool {
        self.t.len() == self.modulus() && self.f.len() == self.modulus()
    }

    pub fn point(&self, local: usize) -> TFIndex {
        let f_len = self.f.len();
        TFIndex {
            k: self.t.members()[local / f_len],
            l: self.f.members()[local % f_len],
        }
    }

    /// Position of a lattice point in the canonical enumeration.
    pub fn position(&self, point: TFIndex) -> Option<usize> {
        let ti = self.t.position(point.k)?;
        let fi = self.f.position(point.l)?;
        Some(ti * self.f.len() + fi)
    }

    pub fn points(&self) -> impl Iterator<Item = TFIndex> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }
}

/// Which window a measurement row belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "window")]
pub enum WindowTag {
    #[serde(rename = "primary")]
    Primary,
    #[serde(rename = "aux")]
    Aux { q: usize, p: usize, t: u8 },
}

impl std::fmt::Display for WindowTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WindowTag::Primary => write!(f, "primary"),
            WindowTag::Aux { q, p, t } => write!(f, "aux:{q}:{p}:{t}"),
        }
    }
}

/// Position of one phaseless measurement: window, time shift, frequency shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MeasurementIndex {
    pub tag: WindowTag,
    pub k: usize,
    pub l: usize,
}

impl std::fmt::Display for MeasurementIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} at ({}, {})", self.tag, self.k, self.l)
    }
}

/// The frame `{pi(lambda) g} ∪ {pi(lambda) g_qpt}` in canonical order: the
/// primary block over `Λ` first (lexicographic), then one block per
/// `(q, p, t)` — `q` major, `p` next, `t` last — each again over `Λ`.
#[derive(Clone, Debug)]
pub struct MultiWindowGaborFrame {
    primary: Window,
    lattice: Lattice,
    q_set: IndexSet,
    p_set: IndexSet,
    aux: Vec<Signal>,
}

impl MultiWindowGaborFrame {
    pub fn assemble(
        primary: Window,
        lattice: Lattice,
        q_set: IndexSet,
        p_set: IndexSet,
    ) -> Result<Self> {
        let m = lattice.modulus();
        if primary.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: primary.dim(),
            });
        }
        for (set, name) in [(&q_set, "Q"), (&p_set, "P")] {
            if set.modulus() != m {
                return Err(Error::ModulusMismatch {
                    left: set.modulus(),
                    right: m,
                });
            }
            if set.is_empty() {
                return Err(Error::EmptySet {
                    what: if name == "Q" { "shift set Q" } else { "shift set P" },
                });
            }
        }
        let t_diffs = lattice.time_support().difference_set()?;
        if let Some(&bad) = q_set.members().iter().find(|&&v| !t_diffs.contains(v)) {
            return Err(Error::ShiftOutsideDifferences {
                set: "Q",
                value: bad,
                axis: "T",
            });
        }
        let f_diffs = lattice.freq_support().difference_set()?;
        if let Some(&bad) = p_set.members().iter().find(|&&v| !f_diffs.contains(v)) {
            return Err(Error::ShiftOutsideDifferences {
                set: "P",
                value: bad,
                axis: "F",
            });
        }
        let mut aux = Vec::with_capacity(3 * q_set.len() * p_set.len());
        for &q in q_set.members() {
            for &p in p_set.members() {
                for t in 0..3u8 {
                    aux.push(auxiliary_window(&primary, q as i64, p as i64, t)?);
                }
            }
        }
        Ok(Self {
            primary,
            lattice,
            q_set,
            p_set,
            aux,
        })
    }

    pub fn primary_window(&self) -> &Window {
        &self.primary
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn q_set(&self) -> &IndexSet {
        &self.q_set
    }

    pub fn p_set(&self) -> &IndexSet {
        &self.p_set
    }

    pub fn modulus(&self) -> usize {
        self.lattice.modulus()
    }

    pub fn aux_count(&self) -> usize {
        self.aux.len()
    }

    /// Total number of frame vectors, `|Λ| (1 + 3 |Q| |P|)`.
    pub fn len(&self) -> usize {
        self.lattice.len() * (1 + self.aux.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn aux_block_of(&self, tag: WindowTag) -> Option<usize> {
        match tag {
            WindowTag::Primary => None,
            WindowTag::Aux { q, p, t } => {
                let qi = self.q_set.position(q)?;
                let pi = self.p_set.position(p)?;
                if t > 2 {
                    return None;
                }
                Some((qi * self.p_set.len() + pi) * 3 + t as usize)
            }
        }
    }

    /// Window signal for a tag (primary or one of the `g_qpt`).
    pub fn window_signal(&self, tag: WindowTag) -> Option<&Signal> {
        match tag {
            WindowTag::Primary => Some(self.primary.signal()),
            WindowTag::Aux { .. } => self.aux_block_of(tag).map(|b| &self.aux[b]),
        }
    }

    /// Measurement index at enumeration position `j`.
    pub fn index_at(&self, j: usize) -> MeasurementIndex {
        let lattice_len = self.lattice.len();
        let block = j / lattice_len;
        let point = self.lattice.point(j % lattice_len);
        let tag = if block == 0 {
            WindowTag::Primary
        } else {
            let b = block - 1;
            let t = (b % 3) as u8;
            let rest = b / 3;
            let pi = rest % self.p_set.len();
            let qi = rest / self.p_set.len();
            WindowTag::Aux {
                q: self.q_set.members()[qi],
                p: self.p_set.members()[pi],
                t,
            }
        };
        MeasurementIndex {
            tag,
            k: point.k,
            l: point.l,
        }
    }

    /// Enumeration position of a measurement index.
    pub fn position_of(&self, index: &MeasurementIndex) -> Option<usize> {
        let local = self.lattice.position(TFIndex {
            k: index.k,
            l: index.l,
        })?;
        let block = match index.tag {
            WindowTag::Primary => 0,
            WindowTag::Aux { .. } => 1 + self.aux_block_of(index.tag)?,
        };
        Some(block * self.lattice.len() + local)
    }

    pub fn indices(&self) -> impl Iterator<Item = MeasurementIndex> + '_ {
        (0..self.len()).map(move |j| self.index_at(j))
    }

    /// Frame vector at enumeration position `j`, materialized.
    pub fn vector_at(&self, j: usize) -> Signal {
        let index = self.index_at(j);
        let window = self
            .window_signal(index.tag)
            .expect("tag from index_at is valid");
        tf_shift(
            window,
            TFIndex {
                k: index.k,
                l: index.l,
            },
        )
    }

    /// All phaseless measurements `|<x, pi(lambda) w>|^2` in canonical order.
    pub fn measure(&self, x: &Signal) -> Result<MeasurementVector> {
        let m = self.modulus();
        if x.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: x.dim(),
            });
        }
        let table = root_table(m);
        let mut values = Vec::with_capacity(self.len());
        let mut index = Vec::with_capacity(self.len());
        let mut block = |tag: WindowTag, window: &Signal| {
            for point in self.lattice.points() {
                let coeff = shift_coefficient(x, window, point, &table);
                values.push(coeff.norm_sqr());
                index.push(MeasurementIndex {
                    tag,
                    k: point.k,
                    l: point.l,
                });
            }
        };
        block(WindowTag::Primary, self.primary.signal());
        let mut aux_iter = self.aux.iter();
        for &q in self.q_set.members() {
            for &p in self.p_set.members() {
                for t in 0..3u8 {
                    let window = aux_iter.next().expect("aux block count matches");
                    block(WindowTag::Aux { q, p, t }, window);
                }
            }
        }
        MeasurementVector::new(values, index)
    }
}

/// `<x, pi(k, l) w>` without materializing the shifted window.
pub(crate) fn shift_coefficient(
    x: &Signal,
    window: &Signal,
    point: TFIndex,
    table: &[C64],
) -> C64 {
    let m = x.dim();
    let w = window.values();
    let xv = x.values();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..m {
        acc += xv[i] * table[(point.l * i) % m] * w[(i + m - point.k) % m].conj();
    }
    acc
}

/// Nonnegative phaseless measurements together with their index map, in the
/// frame's canonical order.
#[derive(Clone, Debug)]
pub struct MeasurementVector {
    values: Vec<f64>,
    index: Vec<MeasurementIndex>,
}

impl MeasurementVector {
    pub fn new(values: Vec<f64>, index: Vec<MeasurementIndex>) -> Result<Self> {
        if values.len() != index.len() {
            return Err(Error::DimensionMismatch {
                expected: index.len(),
                actual: values.len(),
            });
        }
        let mut seen = HashSet::with_capacity(index.len());
        for (row, (value, idx)) in values.iter().zip(&index).enumerate() {
            if !value.is_finite() || *value < 0.0 {
                return Err(Error::NegativeMeasurement { row, value: *value });
            }
            if !seen.insert(*idx) {
                return Err(Error::DuplicateMeasurement {
                    row,
                    index: idx.to_string(),
                });
            }
        }
        Ok(Self { values, index })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index(&self) -> &[MeasurementIndex] {
        &self.index
    }

    /// Checks that the rows follow the frame's canonical enumeration exactly.
    pub fn validate_layout(&self, frame: &MultiWindowGaborFrame) -> Result<()> {
        let expected_len = frame.len();
        for (row, idx) in self.index.iter().enumerate() {
            if row >= expected_len {
                return Err(Error::MeasurementLayout {
                    row,
                    expected: "end of measurements".into(),
                    found: idx.to_string(),
                });
            }
            let expected = frame.index_at(row);
            if *idx != expected {
                return Err(Error::MeasurementLayout {
                    row,
                    expected: expected.to_string(),
                    found: idx.to_string(),
                });
            }
        }
        if self.index.len() < expected_len {
            return Err(Error::MeasurementTruncated {
                missing: frame.index_at(self.index.len()).to_string(),
            });
        }
        Ok(())
    }
}

/// Mode for [`full_spark_check`].
#[derive(Clone, Debug)]
pub enum SparkMode {
    /// Visit every `M`-subset of the lattice; certifies the result.
    Exhaustive,
    /// Sample random `M`-subsets; reports observed failures only.
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct SparkFailure {
    pub points: Vec<TFIndex>,
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct SparkReport {
    pub subsets_checked: u64,
    pub failures: Vec<SparkFailure>,
    pub min_margin: f64,
    pub full_spark: bool,
    /// `true` only for a clean exhaustive run.
    pub certified: bool,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut result: u128 = 1;
    for i in 0..k.min(n - k) {
        result = result.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    result
}

/// Checks whether every `M`-subset of `{pi(lambda) g}` is linearly
/// independent, judging each subset by `|det| / prod(column norms)` against
/// [`SPARK_MARGIN_THRESHOLD`].
pub fn full_spark_check(
    g: &Window,
    lattice: &Lattice,
    mode: &SparkMode,
    budget: u64,
) -> Result<SparkReport> {
    let m = lattice.modulus();
    if g.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: g.dim(),
        });
    }
    let points: Vec<TFIndex> = lattice.points().collect();
    if points.len() < m {
        return Err(Error::LatticeTooSmall {
            points: points.len(),
            needed: m,
        });
    }
    let columns: Vec<Signal> = points.iter().map(|&pt| tf_shift(g.signal(), pt)).collect();

    let mut subsets_checked = 0u64;
    let mut failures = Vec::new();
    let mut min_margin = f64::INFINITY;
    let mut check = |subset: &[usize]| {
        let matrix = DMatrix::from_fn(m, m, |r, c| columns[subset[c]].get(r));
        let det = matrix.lu().determinant();
        let scale: f64 = subset.iter().map(|&c| columns[c].norm()).product();
        let margin = if scale > 0.0 { det.norm() / scale } else { 0.0 };
        min_margin = min_margin.min(margin);
        subsets_checked += 1;
        if margin <= SPARK_MARGIN_THRESHOLD {
            failures.push(SparkFailure {
                points: subset.iter().map(|&c| points[c]).collect(),
                margin,
            });
        }
    };

    match *mode {
        SparkMode::Exhaustive => {
            let required = binomial(points.len(), m);
            if required > budget as u128 {
                return Err(Error::BudgetExceeded { required, budget });
            }
            use itertools::Itertools;
            for subset in (0..points.len()).combinations(m) {
                check(&subset);
            }
        }
        SparkMode::MonteCarlo { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let mut subset = rand::seq::index::sample(&mut rng, points.len(), m).into_vec();
                subset.sort_unstable();
                check(&subset);
            }
        }
    }

    let full_spark = failures.is_empty();
    Ok(SparkReport {
        subsets_checked,
        failures,
        min_margin,
        full_spark,
        certified: full_spark && matches!(mode, SparkMode::Exhaustive),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::phase_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_signal(m: usize, seed: u64) -> Signal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Signal::random(m, &mut rng)
    }

    fn small_frame(m: usize, seed: u64) -> MultiWindowGaborFrame {
        let g = random_window(m, seed);
        MultiWindowGaborFrame::assemble(
            g,
            Lattice::full(m),
            IndexSet::new(m, vec![0, 1]).unwrap(),
            IndexSet::new(m, vec![0, 1]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn window_rejects_zero_coordinate() {
        let mut values = vec![C64::new(1.0, 0.0); 4];
        values[2] = C64::new(0.0, 0.0);
        let err = Window::new(Signal::new(values).unwrap());
        assert!(matches!(err, Err(Error::VanishingWindow { index: 2 })));
    }

    #[test]
    fn random_window_contract() {
        for seed in 0..5u64 {
            let w = random_window(16, seed);
            assert!((w.signal().norm() - 1.0).abs() < 1e-12);
            assert!(w.min_modulus() >= MIN_WINDOW_MODULUS);
        }
        let a = random_window(8, 42);
        let b = random_window(8, 42);
        assert_eq!(a.signal(), b.signal());
    }

    #[test]
    fn random_window_entries_center_on_zero() {
        // Gaussian symmetry: the empirical entrywise mean over many seeds
        // stays within 5 sigma of zero.
        let m = 4;
        let n = 10_000u64;
        let mut sums = vec![C64::new(0.0, 0.0); m];
        for seed in 0..n {
            let w = random_window(m, seed);
            for (s, v) in sums.iter_mut().zip(w.signal().values()) {
                *s += v;
            }
        }
        // each coordinate of a unit-normalized Gaussian vector has variance
        // about 1/(2m) per real component
        let sigma = (n as f64 / (2.0 * m as f64)).sqrt();
        for s in sums {
            assert!(s.re.abs() < 5.0 * sigma);
            assert!(s.im.abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn auxiliary_window_zero_shift_doubles() {
        let g = random_window(6, 1);
        let aux = auxiliary_window(&g, 0, 0, 0).unwrap();
        for i in 0..6 {
            assert!((aux.get(i) - g.signal().get(i) * 2.0).norm() < 1e-12);
        }
        assert!(auxiliary_window(&g, 0, 0, 3).is_err());
    }

    #[test]
    fn auxiliary_window_scalar_multiple_at_zero_shifts() {
        // g_{0,0,t} = (1 + e^{2 pi i t/3}) g
        let g = random_window(5, 9);
        for t in 0..3u8 {
            let aux = auxiliary_window(&g, 0, 0, t).unwrap();
            let factor = C64::new(1.0, 0.0) + C64::from_polar(1.0, TAU * t as f64 / 3.0);
            for i in 0..5 {
                assert!((aux.get(i) - g.signal().get(i) * factor).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn auxiliary_decomposition_identity() {
        // <x, pi(k,l) g_qpt> = <x, pi(k,l) g>
        //   + e^{-2 pi i t/3} e^{2 pi i k p / M} <x, pi(k+q, l+p) g>
        for m in [4usize, 6, 8] {
            let g = random_window(m, 100 + m as u64);
            let x = random_signal(m, 200 + m as u64);
            for q in 0..m {
                for p in 0..m {
                    for t in 0..3u8 {
                        let aux = auxiliary_window(&g, q as i64, p as i64, t).unwrap();
                        for k in 0..m {
                            for l in 0..m {
                                let lhs = x.inner(&tf_shift(&aux, TFIndex { k, l }));
                                let phase = C64::from_polar(1.0, -TAU * t as f64 / 3.0)
                                    * C64::from_polar(1.0, TAU * (k * p) as f64 / m as f64);
                                let rhs = x.inner(&tf_shift(g.signal(), TFIndex { k, l }))
                                    + phase
                                        * x.inner(&tf_shift(
                                            g.signal(),
                                            TFIndex::new((k + q) as i64, (l + p) as i64, m),
                                        ));
                                assert!(
                                    (lhs - rhs).norm() <= 1e-10 * x.norm() * g.signal().norm(),
                                    "m={m} q={q} p={p} t={t} k={k} l={l}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn assemble_counts_and_validation() {
        let m = 4;
        let g = random_window(m, 3);
        let frame = MultiWindowGaborFrame::assemble(
            g.clone(),
            Lattice::full(m),
            IndexSet::new(m, vec![0]).unwrap(),
            IndexSet::new(m, vec![0]).unwrap(),
        )
        .unwrap();
        // |Λ|(1 + 3|Q||P|) = 16 * 4 = 64
        assert_eq!(frame.len(), 64);
        assert_eq!(frame.aux_count(), 3);

        // Q outside T - T rejected
        let narrow = Lattice::new(
            IndexSet::new(8, vec![0, 1]).unwrap(),
            IndexSet::full(8),
        )
        .unwrap();
        let err = MultiWindowGaborFrame::assemble(
            random_window(8, 4),
            narrow,
            IndexSet::new(8, vec![0, 2]).unwrap(),
            IndexSet::new(8, vec![0]).unwrap(),
        );
        assert!(matches!(
            err,
            Err(Error::ShiftOutsideDifferences { set: "Q", value: 2, .. })
        ));
    }

    #[test]
    fn enumeration_round_trips() {
        let frame = small_frame(5, 7);
        for j in 0..frame.len() {
            let index = frame.index_at(j);
            assert_eq!(frame.position_of(&index), Some(j));
        }
        // primary block first, each vector with the primary window's norm
        let g_norm = frame.primary_window().signal().norm();
        for j in 0..frame.lattice().len() {
            assert_eq!(frame.index_at(j).tag, WindowTag::Primary);
            assert!((frame.vector_at(j).norm() - g_norm).abs() < 1e-12);
        }
        for j in 0..frame.len() {
            assert!(frame.vector_at(j).norm().is_finite());
        }
    }

    #[test]
    fn measure_matches_explicit_vectors() {
        let frame = small_frame(4, 11);
        let x = random_signal(4, 5);
        let b = frame.measure(&x).unwrap();
        assert_eq!(b.len(), frame.len());
        for j in 0..frame.len() {
            let direct = x.inner(&frame.vector_at(j)).norm_sqr();
            assert!((b.values()[j] - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn measure_zero_signal_and_phase_invariance() {
        let frame = small_frame(6, 2);
        let zero = Signal::zeros(6);
        let b = frame.measure(&zero).unwrap();
        assert!(b.values().iter().all(|&v| v == 0.0));

        let x = random_signal(6, 3);
        let base = frame.measure(&x).unwrap();
        for theta in [std::f64::consts::FRAC_PI_3, 1.0, 2.5] {
            let rotated = x.scaled(C64::from_polar(1.0, theta));
            let b2 = frame.measure(&rotated).unwrap();
            for (a, b) in base.values().iter().zip(b2.values()) {
                let scale = a.abs().max(1.0);
                assert!((a - b).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn full_lattice_primary_block_is_tight() {
        // sum over Z_M x Z_M of |<x, pi g>|^2 = M ||x||^2 ||g||^2
        for m in [4usize, 6, 8] {
            let g = random_window(m, 31 + m as u64);
            let x = random_signal(m, 47 + m as u64);
            let frame = MultiWindowGaborFrame::assemble(
                g.clone(),
                Lattice::full(m),
                IndexSet::new(m, vec![0]).unwrap(),
                IndexSet::new(m, vec![0]).unwrap(),
            )
            .unwrap();
            let b = frame.measure(&x).unwrap();
            let primary_sum: f64 = b.values()[..m * m].iter().sum();
            let expected = m as f64 * x.norm_sq() * g.signal().norm_sq();
            assert!((primary_sum - expected).abs() < 1e-9 * expected);
        }
    }

    #[test]
    fn measurement_vector_validation() {
        let frame = small_frame(4, 13);
        let x = random_signal(4, 1);
        let b = frame.measure(&x).unwrap();
        b.validate_layout(&frame).unwrap();

        // shuffled rows violate the ordering contract
        let mut values = b.values().to_vec();
        let mut index = b.index().to_vec();
        values.swap(0, 1);
        index.swap(0, 1);
        let shuffled = MeasurementVector::new(values, index).unwrap();
        assert!(matches!(
            shuffled.validate_layout(&frame),
            Err(Error::MeasurementLayout { row: 0, .. })
        ));

        // truncated rows name the first missing index
        let cut = frame.lattice().len(); // drop all aux blocks
        let truncated = MeasurementVector::new(
            b.values()[..cut].to_vec(),
            b.index()[..cut].to_vec(),
        )
        .unwrap();
        match truncated.validate_layout(&frame) {
            Err(Error::MeasurementTruncated { missing }) => {
                assert!(missing.contains("aux:0:0:0"), "missing = {missing}");
            }
            other => panic!("expected truncation error, got {other:?}"),
        }

        // negative values rejected at construction
        assert!(MeasurementVector::new(
            vec![-1.0],
            vec![MeasurementIndex { tag: WindowTag::Primary, k: 0, l: 0 }],
        )
        .is_err());
    }

    #[test]
    fn full_spark_expected_on_random_windows() {
        // 8 vectors in dimension 4, all 70 subsets
        let lattice = Lattice::new(
            IndexSet::new(4, vec![0, 1]).unwrap(),
            IndexSet::full(4),
        )
        .unwrap();
        let g = random_window(4, 21);
        let report =
            full_spark_check(&g, &lattice, &SparkMode::Exhaustive, DEFAULT_SPARK_BUDGET).unwrap();
        assert_eq!(report.subsets_checked, 70);
        assert!(report.full_spark);
        assert!(report.certified);
        assert!(report.min_margin > SPARK_MARGIN_THRESHOLD);
    }

    #[test]
    fn spark_budget_and_monte_carlo() {
        let lattice = Lattice::full(8);
        let g = random_window(8, 33);
        let err = full_spark_check(&g, &lattice, &SparkMode::Exhaustive, 1000);
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
        let report = full_spark_check(
            &g,
            &lattice,
            &SparkMode::MonteCarlo { trials: 50, seed: 1 },
            1000,
        )
        .unwrap();
        assert_eq!(report.subsets_checked, 50);
        assert!(report.full_spark);
        assert!(!report.certified);
    }

    #[test]
    fn phase_rotation_preserves_equivalence_class() {
        let x = random_signal(5, 77);
        let rotated = x.scaled(C64::from_polar(1.0, 1.3));
        assert!(phase_distance(&x, &rotated).unwrap() < 1e-12 * x.norm());
    }
}
