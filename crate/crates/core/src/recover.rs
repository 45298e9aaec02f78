//! Reconstruction from phaseless multi-window measurements: relative phases
//! of primary frame coefficients are polarized out of the auxiliary
//! measurements, assigned across the measurement graph by propagation or
//! angular synchronization, and the signal is recovered from the re-phased
//! coefficients by least squares.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::frame::{MeasurementIndex, MeasurementVector, MultiWindowGaborFrame, Window, WindowTag};
use crate::graph::{connected_components, prune_edges, PhaseGraph};
use crate::signal::{root_table, Signal, TFIndex, C64};

/// Relative coefficient-magnitude threshold below which a vertex counts as
/// vanishing and its edges are deleted.
pub const EPS_VANISH: f64 = 1e-10;

/// Power-iteration budget for angular synchronization.
pub const POWER_ITER_MAX: usize = 1000;

/// Power-iteration eigen-residual target.
pub const POWER_ITER_TOL: f64 = 1e-12;

/// Smallest singular-value ratio accepted by the subspace rank certificate.
pub const RANK_RATIO_THRESHOLD: f64 = 1e-10;

/// Condition number above which the coefficient solve refuses to answer.
const SOLVE_CONDITION_LIMIT: f64 = 1e12;

/// Entry modulus below which a synchronization eigenvector leaves a vertex
/// phase unresolved.
const SYNC_ENTRY_FLOOR: f64 = 1e-12;

/// A relative phase recovered from one edge's auxiliary measurements.
#[derive(Clone, Copy, Debug)]
pub struct RelativePhase {
    /// Unit-modulus relative phase `omega_e`.
    pub omega: C64,
    /// Modulus of the polarized product divided by `r1 r2`; 1 on consistent
    /// data, kept for diagnostics.
    pub raw_modulus: f64,
}

/// Polarizes the three auxiliary measurements
/// `aux_sq[t] = |<x, pi(k,l) g_qpt>|^2` into the relative phase between the
/// primary coefficients at `(k,l)` and `(k+q, l+p)`:
///
/// `<x, pi(k,l)g> conj(<x, pi(k+q,l+p)g>)
///     = (e^{2 pi i k p / M} / 3) * sum_t e^{-2 pi i t / 3} aux_sq[t]`
///
/// divided by the magnitudes `r1 r2` and renormalized to unit modulus.
pub fn relative_phase(
    aux_sq: [f64; 3],
    magnitudes: (f64, f64),
    k: usize,
    p: usize,
    modulus: usize,
    threshold: f64,
) -> Result<RelativePhase> {
    let (r1, r2) = magnitudes;
    for r in [r1, r2] {
        if r.is_nan() || r <= threshold {
            return Err(Error::MagnitudeBelowThreshold {
                value: r,
                threshold,
            });
        }
    }
    let mut acc = C64::new(0.0, 0.0);
    for (t, &sq) in aux_sq.iter().enumerate() {
        acc += C64::from_polar(1.0, -TAU * t as f64 / 3.0) * sq;
    }
    let front = C64::from_polar(1.0, TAU * ((k * p) % modulus) as f64 / modulus as f64);
    let scaled = front * acc / (3.0 * r1 * r2);
    let raw_modulus = scaled.norm();
    if raw_modulus < SYNC_ENTRY_FLOOR {
        return Err(Error::MagnitudeBelowThreshold {
            value: raw_modulus,
            threshold: SYNC_ENTRY_FLOOR,
        });
    }
    Ok(RelativePhase {
        omega: scaled / raw_modulus,
        raw_modulus,
    })
}

/// Vertex magnitudes and edge weights extracted from one measurement vector:
/// the weighted, pruned measurement graph the pipeline hands to the phase
/// assignment step.
#[derive(Clone, Debug)]
pub struct RelativePhaseAssignment {
    pub graph: PhaseGraph,
    /// Per-vertex `|<x, pi(lambda) g>|`, square roots of the primary block.
    pub magnitudes: Vec<f64>,
    /// Absolute prune threshold used (`eps_vanish` times the peak magnitude).
    pub threshold: f64,
    pub removed_edges: usize,
    pub flagged_vertices: usize,
}

/// Builds the weighted measurement graph from a measurement vector. Pruning
/// is relative to the peak primary magnitude, so the unknown signal norm
/// never enters.
pub fn extract_relative_phases(
    frame: &MultiWindowGaborFrame,
    b: &MeasurementVector,
    eps_vanish: f64,
) -> Result<RelativePhaseAssignment> {
    b.validate_layout(frame)?;
    let lattice_len = frame.lattice().len();
    let magnitudes: Vec<f64> = b.values()[..lattice_len].iter().map(|v| v.sqrt()).collect();
    let scale = magnitudes.iter().cloned().fold(0.0, f64::max);
    let threshold = eps_vanish * scale;

    let base = PhaseGraph::build(frame.lattice(), frame.q_set(), frame.p_set())?;
    let outcome = prune_edges(&base, &magnitudes, threshold)?;
    let mut graph = outcome.graph;

    let m = frame.modulus();
    for eid in 0..graph.edges().len() {
        let edge = graph.edges()[eid].clone();
        if edge.pruned {
            continue;
        }
        let source = graph.vertices()[edge.a];
        let mut aux_sq = [0.0f64; 3];
        for (t, slot) in aux_sq.iter_mut().enumerate() {
            let index = MeasurementIndex {
                tag: WindowTag::Aux {
                    q: edge.q,
                    p: edge.p,
                    t: t as u8,
                },
                k: source.k,
                l: source.l,
            };
            let position = frame.position_of(&index).ok_or(Error::Invalid {
                what: "measurement index",
                detail: format!("no measurement for {index}"),
            })?;
            *slot = b.values()[position];
        }
        let rel = relative_phase(
            aux_sq,
            (magnitudes[edge.a], magnitudes[edge.b]),
            source.k,
            edge.p,
            m,
            threshold,
        )?;
        graph.set_weight(eid, rel.omega)?;
    }

    Ok(RelativePhaseAssignment {
        graph,
        magnitudes,
        threshold,
        removed_edges: outcome.removed_edges,
        flagged_vertices: outcome.flagged_vertices,
    })
}

/// Per-vertex unit phases produced by propagation; `None` for vertices the
/// breadth-first search never reached.
#[derive(Clone, Debug)]
pub struct PhaseAssignment {
    values: Vec<Option<C64>>,
}

impl PhaseAssignment {
    pub fn get(&self, vertex: usize) -> Option<C64> {
        self.values[vertex]
    }

    pub fn values(&self) -> &[Option<C64>] {
        &self.values
    }

    /// Phase of a vertex that must be reachable.
    pub fn require(&self, vertex: usize, point: TFIndex) -> Result<C64> {
        self.values[vertex].ok_or(Error::UnreachableVertex {
            k: point.k,
            l: point.l,
        })
    }
}

/// Breadth-first spanning-tree phase assignment: `u(root) = 1` and each child
/// picks up the relative phase of its tree edge. Defined up to the global
/// phase fixed at the root.
pub fn propagate_phases(graph: &PhaseGraph, root: TFIndex) -> Result<PhaseAssignment> {
    let root_id = graph.vertex_index(root).ok_or(Error::Invalid {
        what: "propagation root",
        detail: format!("({}, {}) is not a lattice point", root.k, root.l),
    })?;
    let mut values = vec![None; graph.vertex_count()];
    values[root_id] = Some(C64::new(1.0, 0.0));
    let mut queue = VecDeque::from([root_id]);
    while let Some(u) = queue.pop_front() {
        let u_phase = values[u].expect("queued vertices are assigned");
        for &eid in graph.incident_edges(u) {
            let edge = &graph.edges()[eid];
            if edge.pruned {
                continue;
            }
            let weight = edge.weight.ok_or(Error::Invalid {
                what: "phase graph",
                detail: "unpruned edge without weight during propagation".into(),
            })?;
            // weight = phase(a) conj(phase(b))
            let (v, v_phase) = if edge.a == u {
                (edge.b, weight.conj() * u_phase)
            } else {
                (edge.a, weight * u_phase)
            };
            if values[v].is_none() {
                values[v] = Some(v_phase);
                queue.push_back(v);
            }
        }
    }
    Ok(PhaseAssignment { values })
}

/// Angular synchronization output over one component.
#[derive(Clone, Debug)]
pub struct SyncResult {
    /// Unit phases indexed like the graph vertices; `None` outside the
    /// component or for flagged entries.
    pub phases: Vec<Option<C64>>,
    /// Vertices whose eigenvector entry was too small to carry a phase.
    pub flagged: Vec<usize>,
    pub iterations: usize,
    /// Leading eigenvalue of the zero-diagonal Hermitian weight matrix.
    pub eigenvalue: f64,
    pub residual: f64,
}

/// Leading eigenvector of the Hermitian relative-phase matrix
/// (`H_uv = omega_(u,v)`, zero diagonal) on `component`, by power iteration
/// from the all-ones vector. A positive spectral shift keeps the iteration
/// convergent on bipartite components without moving the eigenvector.
pub fn angular_sync(graph: &PhaseGraph, component: &[usize]) -> Result<SyncResult> {
    if component.is_empty() {
        return Err(Error::EmptySet { what: "component" });
    }
    let n = component.len();
    let mut local = vec![usize::MAX; graph.vertex_count()];
    for (i, &v) in component.iter().enumerate() {
        local[v] = i;
    }

    let mut entries: Vec<(usize, usize, C64)> = Vec::new();
    let mut degree = vec![0usize; n];
    for edge in graph.edges() {
        if edge.pruned {
            continue;
        }
        let (la, lb) = (local[edge.a], local[edge.b]);
        if la == usize::MAX || lb == usize::MAX {
            continue;
        }
        let weight = edge.weight.ok_or(Error::Invalid {
            what: "phase graph",
            detail: "unpruned edge without weight during synchronization".into(),
        })?;
        entries.push((la, lb, weight));
        degree[la] += 1;
        degree[lb] += 1;
    }

    let mut phases = vec![None; graph.vertex_count()];
    if n == 1 {
        phases[component[0]] = Some(C64::new(1.0, 0.0));
        return Ok(SyncResult {
            phases,
            flagged: Vec::new(),
            iterations: 0,
            eigenvalue: 0.0,
            residual: 0.0,
        });
    }

    let shift = (*degree.iter().max().expect("nonempty") + 1) as f64;
    let mut v = vec![C64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    let mut eigenvalue = shift;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for iter in 1..=POWER_ITER_MAX {
        iterations = iter;
        let mut w = vec![C64::new(0.0, 0.0); n];
        for &(i, j, weight) in &entries {
            w[i] += weight * v[j];
            w[j] += weight.conj() * v[i];
        }
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += shift * vi;
        }
        // v is unit, so the Rayleigh quotient is a plain inner product
        let rayleigh: C64 = v.iter().zip(&w).map(|(vi, wi)| vi.conj() * wi).sum();
        eigenvalue = rayleigh.re;
        residual = v
            .iter()
            .zip(&w)
            .map(|(vi, wi)| (wi - eigenvalue * vi).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual <= POWER_ITER_TOL * eigenvalue.abs().max(1.0) {
            break;
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        for wi in &mut w {
            *wi /= norm;
        }
        v = w;
    }

    let mut flagged = Vec::new();
    for (i, &vertex) in component.iter().enumerate() {
        let modulus = v[i].norm();
        if modulus < SYNC_ENTRY_FLOOR {
            flagged.push(vertex);
        } else {
            phases[vertex] = Some(v[i] / modulus);
        }
    }
    Ok(SyncResult {
        phases,
        flagged,
        iterations,
        eigenvalue: eigenvalue - shift,
        residual,
    })
}

/// Result of a least-squares coefficient solve.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub estimate: Signal,
    pub residual: f64,
    pub condition: f64,
}

fn solve_least_squares(matrix: DMatrix<C64>, rhs: DVector<C64>) -> Result<(DVector<C64>, f64, f64)> {
    let svd = matrix.clone().svd(true, true);
    let mut s_max = 0.0f64;
    let mut s_min = f64::INFINITY;
    for &s in svd.singular_values.iter() {
        s_max = s_max.max(s);
        s_min = s_min.min(s);
    }
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    if condition.is_nan() || condition >= SOLVE_CONDITION_LIMIT {
        return Err(Error::RankDeficient { condition });
    }
    let solution = svd.solve(&rhs, 0.0).map_err(|detail| Error::Invalid {
        what: "least squares",
        detail: detail.into(),
    })?;
    let solution = DVector::from_column_slice(solution.as_slice());
    let residual = (&matrix * &solution - &rhs).norm();
    Ok((solution, residual, condition))
}

/// Least-squares recovery of `x` from re-phased frame coefficients
/// `<x, pi(lambda) g> = coeffs[lambda]` over at least `M` lattice points.
pub fn solve_coefficients(
    g: &Window,
    points: &[TFIndex],
    coeffs: &[C64],
) -> Result<SolveOutcome> {
    let m = g.dim();
    if points.len() != coeffs.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            actual: coeffs.len(),
        });
    }
    if points.len() < m {
        return Err(Error::LatticeTooSmall {
            points: points.len(),
            needed: m,
        });
    }
    let table = root_table(m);
    let gv = g.signal().values();
    let matrix = DMatrix::from_fn(points.len(), m, |row, col| {
        let point = points[row];
        table[(point.l * col) % m] * gv[(col + m - point.k) % m].conj()
    });
    let rhs = DVector::from_column_slice(coeffs);
    let (solution, residual, condition) = solve_least_squares(matrix, rhs)?;
    Ok(SolveOutcome {
        estimate: Signal::new(solution.iter().copied().collect())?,
        residual,
        condition,
    })
}

/// A known `d`-dimensional subspace of `C^M`, held as a synthesis map
/// `C^d -> C^M` with a numerical rank certificate.
#[derive(Clone, Debug)]
pub struct SubspacePrior {
    map: DMatrix<C64>,
    condition: f64,
}

impl SubspacePrior {
    /// Wraps an `M x d` synthesis matrix; fails unless the singular value
    /// ratio `sigma_d / sigma_1` clears [`RANK_RATIO_THRESHOLD`].
    pub fn from_matrix(map: DMatrix<C64>) -> Result<Self> {
        let (m, d) = map.shape();
        if d == 0 || m == 0 || d > m {
            return Err(Error::Invalid {
                what: "subspace prior",
                detail: format!("synthesis map of shape {m} x {d} is not tall"),
            });
        }
        let svd = map.clone().svd(false, false);
        let mut s_max = 0.0f64;
        let mut s_min = f64::INFINITY;
        for &s in svd.singular_values.iter() {
            s_max = s_max.max(s);
            s_min = s_min.min(s);
        }
        let ratio = if s_max > 0.0 { s_min / s_max } else { 0.0 };
        if ratio.is_nan() || ratio <= RANK_RATIO_THRESHOLD {
            return Err(Error::RankCertificate {
                ratio,
                threshold: RANK_RATIO_THRESHOLD,
            });
        }
        Ok(Self {
            map,
            condition: s_max / s_min,
        })
    }

    /// `d` basis signals of `C^M` as columns.
    pub fn from_basis(basis: &[Signal]) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::EmptySet { what: "subspace basis" });
        }
        let m = basis[0].dim();
        for s in basis {
            if s.dim() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    actual: s.dim(),
                });
            }
        }
        let map = DMatrix::from_fn(m, basis.len(), |r, c| basis[c].get(r));
        Self::from_matrix(map)
    }

    /// Gaussian random subspace map, deterministic in the seed.
    pub fn random(m: usize, d: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let columns: Vec<Signal> = (0..d).map(|_| Signal::random(m, &mut rng)).collect();
        Self::from_basis(&columns)
    }

    /// The identity embedding (`d = M`); the subspace pipeline then matches
    /// the full-dimensional one.
    pub fn identity(m: usize) -> Self {
        Self {
            map: DMatrix::identity(m, m),
            condition: 1.0,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.map.nrows()
    }

    pub fn subspace_dim(&self) -> usize {
        self.map.ncols()
    }

    /// Certified condition number `sigma_1 / sigma_d`.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `x = W h`.
    pub fn synthesize(&self, h: &[C64]) -> Result<Signal> {
        if h.len() != self.subspace_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.subspace_dim(),
                actual: h.len(),
            });
        }
        let x = &self.map * DVector::from_column_slice(h);
        Signal::new(x.iter().copied().collect())
    }

    /// `W* v`, the projected measurement vector in `C^d`.
    pub fn analyze(&self, v: &Signal) -> Result<Vec<C64>> {
        if v.dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                actual: v.dim(),
            });
        }
        let out = self.map.adjoint() * DVector::from_column_slice(v.values());
        Ok(out.iter().copied().collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseMethod {
    Propagate,
    Sync,
}

#[derive(Clone, Copy, Debug)]
pub struct RecoverOptions {
    pub method: PhaseMethod,
    pub eps_vanish: f64,
}

impl Default for RecoverOptions {
    fn default() -> Self {
        Self {
            method: PhaseMethod::Sync,
            eps_vanish: EPS_VANISH,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconstructionStatus {
    Success,
    ComponentTooSmall,
    UnresolvedPhases,
}

/// Outcome of a reconstruction attempt. `estimate` is the recovered class
/// representative on success and all zeros otherwise. `truth_distance` is
/// filled by [`ReconstructionResult::with_truth`] when ground truth exists.
#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub estimate: Signal,
    pub status: ReconstructionStatus,
    pub component_size: usize,
    pub pruned_vertices: usize,
    pub removed_edges: usize,
    pub solve_residual: Option<f64>,
    pub condition_number: Option<f64>,
    pub truth_distance: Option<f64>,
}

impl ReconstructionResult {
    pub fn is_success(&self) -> bool {
        self.status == ReconstructionStatus::Success
    }

    pub fn with_truth(mut self, truth: &Signal) -> Result<Self> {
        self.truth_distance = Some(crate::signal::phase_distance(&self.estimate, truth)?);
        Ok(self)
    }
}

fn refused(
    status: ReconstructionStatus,
    m: usize,
    component_size: usize,
    assignment: &RelativePhaseAssignment,
) -> ReconstructionResult {
    ReconstructionResult {
        estimate: Signal::zeros(m),
        status,
        component_size,
        pruned_vertices: assignment.flagged_vertices,
        removed_edges: assignment.removed_edges,
        solve_residual: None,
        condition_number: None,
        truth_distance: None,
    }
}

fn pipeline(
    frame: &MultiWindowGaborFrame,
    b: &MeasurementVector,
    options: &RecoverOptions,
    dim: usize,
    row_fn: &dyn Fn(TFIndex) -> Result<Vec<C64>>,
    finish: &dyn Fn(&DVector<C64>) -> Result<Signal>,
) -> Result<ReconstructionResult> {
    let m = frame.modulus();
    b.validate_layout(frame)?;

    let lattice_len = frame.lattice().len();
    let peak = b.values()[..lattice_len]
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    if peak == 0.0 {
        // the zero signal is recoverable trivially; report success
        return Ok(ReconstructionResult {
            estimate: Signal::zeros(m),
            status: ReconstructionStatus::Success,
            component_size: 0,
            pruned_vertices: lattice_len,
            removed_edges: 0,
            solve_residual: None,
            condition_number: None,
            truth_distance: None,
        });
    }

    let assignment = extract_relative_phases(frame, b, options.eps_vanish)?;
    let labeling = connected_components(&assignment.graph);
    let (label, size) = labeling.largest();
    if size < dim {
        return Ok(refused(
            ReconstructionStatus::ComponentTooSmall,
            m,
            size,
            &assignment,
        ));
    }
    let component = labeling.members_of(label);

    let phases: Vec<Option<C64>> = match options.method {
        PhaseMethod::Propagate => {
            let root = assignment.graph.vertices()[component[0]];
            let assignment_phases = propagate_phases(&assignment.graph, root)?;
            component
                .iter()
                .map(|&v| assignment_phases.get(v))
                .collect()
        }
        PhaseMethod::Sync => {
            let sync = angular_sync(&assignment.graph, &component)?;
            component.iter().map(|&v| sync.phases[v]).collect()
        }
    };

    let mut points = Vec::with_capacity(component.len());
    let mut coeffs = Vec::with_capacity(component.len());
    for (&vertex, phase) in component.iter().zip(&phases) {
        if let Some(phase) = phase {
            points.push(assignment.graph.vertices()[vertex]);
            coeffs.push(phase * assignment.magnitudes[vertex]);
        }
    }
    if points.len() < dim {
        return Ok(refused(
            ReconstructionStatus::UnresolvedPhases,
            m,
            size,
            &assignment,
        ));
    }

    let matrix = {
        let mut rows = Vec::with_capacity(points.len());
        for &point in &points {
            rows.push(row_fn(point)?);
        }
        DMatrix::from_fn(points.len(), dim, |r, c| rows[r][c])
    };
    let rhs = DVector::from_column_slice(&coeffs);
    let (solution, residual, condition) = solve_least_squares(matrix, rhs)?;
    Ok(ReconstructionResult {
        estimate: finish(&solution)?,
        status: ReconstructionStatus::Success,
        component_size: size,
        pruned_vertices: assignment.flagged_vertices,
        removed_edges: assignment.removed_edges,
        solve_residual: Some(residual),
        condition_number: Some(condition),
        truth_distance: None,
    })
}

/// Full reconstruction: magnitudes from the primary block, relative phases
/// from the auxiliary blocks, pruning, the largest component, phase
/// assignment, and the coefficient solve. Components smaller than `M` are
/// refused rather than guessed at.
pub fn reconstruct(
    frame: &MultiWindowGaborFrame,
    b: &MeasurementVector,
    options: &RecoverOptions,
) -> Result<ReconstructionResult> {
    let m = frame.modulus();
    let g = frame.primary_window().clone();
    let table = root_table(m);
    let row_fn = move |point: TFIndex| -> Result<Vec<C64>> {
        let gv = g.signal().values();
        Ok((0..m)
            .map(|col| table[(point.l * col) % m] * gv[(col + m - point.k) % m].conj())
            .collect())
    };
    let finish = |solution: &DVector<C64>| Signal::new(solution.iter().copied().collect());
    pipeline(frame, b, options, m, &row_fn, &finish)
}

/// Reconstruction under a known subspace prior `x = W h`: the same pipeline
/// run in dimension `d`, solving for `h` against the projected frame vectors
/// `W* pi(lambda) g` and returning `W h`.
pub fn reconstruct_subspace(
    frame: &MultiWindowGaborFrame,
    prior: &SubspacePrior,
    b: &MeasurementVector,
    options: &RecoverOptions,
) -> Result<ReconstructionResult> {
    let m = frame.modulus();
    if prior.ambient_dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: prior.ambient_dim(),
        });
    }
    let g = frame.primary_window().clone();
    let prior_rows = prior.clone();
    let row_fn = move |point: TFIndex| -> Result<Vec<C64>> {
        let shifted = crate::signal::tf_shift(g.signal(), point);
        let projected = prior_rows.analyze(&shifted)?;
        Ok(projected.into_iter().map(|z| z.conj()).collect())
    };
    let prior_finish = prior.clone();
    let finish = move |solution: &DVector<C64>| -> Result<Signal> {
        prior_finish.synthesize(solution.as_slice())
    };
    pipeline(
        frame,
        b,
        options,
        prior.subspace_dim(),
        &row_fn,
        &finish,
    )
}
