//! The measurement graph on `Λ`: vertices are lattice points, edges join
//! pairs whose time-frequency offset lies in `Q x P`. Connectivity after
//! deleting edges at vanishing coefficients is what makes phase propagation
//! possible, and is certified through the spectral gap.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Lattice;
use crate::sets::IndexSet;
use crate::signal::{TFIndex, C64};

/// One stored edge. The orientation satisfies
/// `vertex(b) - vertex(a) = (q, p) mod M`; the reverse direction carries the
/// conjugate weight implicitly.
#[derive(Clone, Debug)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub q: usize,
    pub p: usize,
    pub weight: Option<C64>,
    pub pruned: bool,
}

#[derive(Clone, Debug)]
pub struct PhaseGraph {
    lattice: Lattice,
    q_set: IndexSet,
    p_set: IndexSet,
    vertices: Vec<TFIndex>,
    edges: Vec<Edge>,
    incident: Vec<Vec<usize>>,
    flagged: Vec<bool>,
}

impl PhaseGraph {
    /// Builds the unweighted graph with edge set
    /// `{((k,l), (k',l')) : k'-k in Q, l'-l in P}`. Pairs with offset `(0,0)`
    /// are self-loops and stay out of the edge list; they still count in the
    /// degree used by the spectral paths.
    pub fn build(lattice: &Lattice, q_set: &IndexSet, p_set: &IndexSet) -> Result<Self> {
        let m = lattice.modulus();
        for set in [q_set, p_set] {
            if set.modulus() != m {
                return Err(Error::ModulusMismatch {
                    left: set.modulus(),
                    right: m,
                });
            }
        }
        if q_set.is_empty() {
            return Err(Error::EmptySet { what: "shift set Q" });
        }
        if p_set.is_empty() {
            return Err(Error::EmptySet { what: "shift set P" });
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

        let vertices: Vec<TFIndex> = lattice.points().collect();
        let reverse_in_sets = |q: usize, p: usize| {
            q_set.contains((m - q) % m) && p_set.contains((m - p) % m)
        };
        let mut edges = Vec::new();
        for (u, &point) in vertices.iter().enumerate() {
            for &q in q_set.members() {
                for &p in p_set.members() {
                    if q == 0 && p == 0 {
                        continue;
                    }
                    let target = TFIndex::new((point.k + q) as i64, (point.l + p) as i64, m);
                    let Some(v) = lattice.position(target) else {
                        continue;
                    };
                    // keep one record per unordered pair: the u < v
                    // orientation when both directions are valid
                    if u > v && reverse_in_sets(q, p) {
                        continue;
                    }
                    edges.push(Edge {
                        a: u,
                        b: v,
                        q,
                        p,
                        weight: None,
                        pruned: false,
                    });
                }
            }
        }
        let mut incident = vec![Vec::new(); vertices.len()];
        for (id, edge) in edges.iter().enumerate() {
            incident[edge.a].push(id);
            incident[edge.b].push(id);
        }
        Ok(Self {
            lattice: lattice.clone(),
            q_set: q_set.clone(),
            p_set: p_set.clone(),
            vertices,
            edges,
            incident,
            flagged: vec![false; lattice.len()],
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[TFIndex] {
        &self.vertices
    }

    pub fn vertex_index(&self, point: TFIndex) -> Option<usize> {
        self.lattice.position(point)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn incident_edges(&self, vertex: usize) -> &[usize] {
        &self.incident[vertex]
    }

    /// Vertices whose coefficient fell at or below the prune threshold.
    pub fn flagged(&self) -> &[bool] {
        &self.flagged
    }

    pub fn unpruned_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| !e.pruned).count()
    }

    /// Number of ordered neighbors of `vertex` (excluding the self-pair).
    pub fn out_degree(&self, vertex: usize) -> usize {
        let m = self.lattice.modulus();
        let point = self.vertices[vertex];
        let mut count = 0;
        for &q in self.q_set.members() {
            for &p in self.p_set.members() {
                if q == 0 && p == 0 {
                    continue;
                }
                let target = TFIndex::new((point.k + q) as i64, (point.l + p) as i64, m);
                if self.lattice.position(target).is_some() {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn set_weight(&mut self, edge: usize, weight: C64) -> Result<()> {
        let modulus_error = (weight.norm() - 1.0).abs();
        if modulus_error > 1e-12 {
            return Err(Error::Invalid {
                what: "edge weight",
                detail: format!("modulus deviates from 1 by {modulus_error:.3e}"),
            });
        }
        self.edges[edge].weight = Some(weight);
        Ok(())
    }

    /// Row sums of the ordered adjacency including the diagonal; the degree
    /// both spectral paths use.
    fn full_degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let m = self.lattice.modulus();
        let n = self.vertices.len();
        let mut out = vec![0usize; n];
        let mut into = vec![0usize; n];
        for (u, &point) in self.vertices.iter().enumerate() {
            for &q in self.q_set.members() {
                for &p in self.p_set.members() {
                    let target = TFIndex::new((point.k + q) as i64, (point.l + p) as i64, m);
                    if let Some(v) = self.lattice.position(target) {
                        out[u] += 1;
                        into[v] += 1;
                    }
                }
            }
        }
        (out, into)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMethod {
    CirculantFast,
    Dense,
}

/// Requested spectral path. `Auto` takes the circulant fast path when the
/// lattice covers all of `Z_M x Z_M` and falls back to the dense
/// eigendecomposition otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralStructure {
    Auto,
    Dense,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralReport {
    pub gap: f64,
    pub lambda_max: f64,
    pub method: SpectralMethod,
    /// Eigenvalue moduli sorted descending; dense mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalue_moduli: Option<Vec<f64>>,
}

/// Spectral gap `1 - max_{j != 0} |lambda_j| / lambda_max` of the (regular)
/// measurement graph, self-loops included in the adjacency.
///
/// On a full lattice the adjacency is the Kronecker product of two circulants
/// and the gap reduces to `1 - max(||Q||_u / P(Q), ||P||_u / P(P))`, two DFTs.
/// The dense path eigendecomposes the explicit adjacency and is the source of
/// truth for partial lattices, where the circulant indexing does not apply.
pub fn spectral_gap(graph: &PhaseGraph, structure: SpectralStructure) -> Result<SpectralReport> {
    let fast_valid = graph.lattice.is_full();
    if matches!(structure, SpectralStructure::Auto) && fast_valid {
        let q_ratio = graph.q_set.fourier_bias() / graph.q_set.density();
        let p_ratio = graph.p_set.fourier_bias() / graph.p_set.density();
        let gap = (1.0 - q_ratio.max(p_ratio)).clamp(0.0, 1.0);
        return Ok(SpectralReport {
            gap,
            lambda_max: (graph.q_set.len() * graph.p_set.len()) as f64,
            method: SpectralMethod::CirculantFast,
            eigenvalue_moduli: None,
        });
    }

    let (out_degrees, in_degrees) = graph.full_degrees();
    let d = out_degrees[0];
    if out_degrees.iter().any(|&v| v != d) || in_degrees.iter().any(|&v| v != d) {
        return Err(Error::NotRegular);
    }
    if d == 0 {
        return Err(Error::EmptySet { what: "edge set" });
    }

    let m = graph.lattice.modulus();
    let n = graph.vertices.len();
    let mut adjacency = DMatrix::<f64>::zeros(n, n);
    for (u, &point) in graph.vertices.iter().enumerate() {
        for &q in graph.q_set.members() {
            for &p in graph.p_set.members() {
                let target = TFIndex::new((point.k + q) as i64, (point.l + p) as i64, m);
                if let Some(v) = graph.lattice.position(target) {
                    adjacency[(u, v)] = 1.0;
                }
            }
        }
    }

    let symmetric = (0..n).all(|i| (i + 1..n).all(|j| adjacency[(i, j)] == adjacency[(j, i)]));
    let moduli_unsorted: Vec<f64> = if symmetric {
        adjacency
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|v| v.abs())
            .collect()
    } else if graph.lattice.is_full() {
        // Kronecker product of circulants: normal, so the eigenvalue moduli
        // are the singular values, which are far more robust to compute than
        // a nonsymmetric eigendecomposition
        adjacency.svd(false, false).singular_values.iter().copied().collect()
    } else {
        return Err(Error::Invalid {
            what: "spectral gap",
            detail: "asymmetric shift sets on a partial lattice have no regular-graph spectrum"
                .into(),
        });
    };

    let d_f = d as f64;
    // remove one copy of the top (Perron) modulus, which equals the degree
    let perron = (0..moduli_unsorted.len())
        .min_by(|&i, &j| {
            let di = (moduli_unsorted[i] - d_f).abs();
            let dj = (moduli_unsorted[j] - d_f).abs();
            di.partial_cmp(&dj).expect("finite eigenvalues")
        })
        .expect("at least one eigenvalue");
    let mut rest_max = 0.0f64;
    for (i, value) in moduli_unsorted.iter().enumerate() {
        if i != perron {
            rest_max = rest_max.max(*value);
        }
    }
    let gap = (1.0 - rest_max / d_f).clamp(0.0, 1.0);

    let mut moduli = moduli_unsorted;
    moduli.sort_by(|a, b| b.partial_cmp(a).expect("finite moduli"));
    Ok(SpectralReport {
        gap,
        lambda_max: d_f,
        method: SpectralMethod::Dense,
        eigenvalue_moduli: Some(moduli),
    })
}

#[derive(Clone, Debug)]
pub struct PruneOutcome {
    pub graph: PhaseGraph,
    pub removed_edges: usize,
    pub flagged_vertices: usize,
}

/// Removes every edge incident to a vertex whose coefficient magnitude is at
/// or below `threshold`. Magnitudes are indexed like the graph vertices.
pub fn prune_edges(graph: &PhaseGraph, magnitudes: &[f64], threshold: f64) -> Result<PruneOutcome> {
    if magnitudes.len() != graph.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.vertex_count(),
            actual: magnitudes.len(),
        });
    }
    let mut pruned = graph.clone();
    let flagged: Vec<bool> = magnitudes.iter().map(|&r| r <= threshold).collect();
    let mut removed = 0usize;
    for edge in &mut pruned.edges {
        let kill = flagged[edge.a] || flagged[edge.b];
        if kill && !edge.pruned {
            removed += 1;
        }
        edge.pruned = edge.pruned || kill;
    }
    let flagged_count = flagged.iter().filter(|&&f| f).count();
    pruned.flagged = flagged;
    Ok(PruneOutcome {
        graph: pruned,
        removed_edges: removed,
        flagged_vertices: flagged_count,
    })
}

/// Component labeling over unpruned edges. Each component is labeled by its
/// smallest vertex index.
#[derive(Clone, Debug)]
pub struct ComponentLabeling {
    labels: Vec<usize>,
}

impl ComponentLabeling {
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_of(&self, vertex: usize) -> usize {
        self.labels[vertex]
    }

    pub fn members_of(&self, label: usize) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&v| self.labels[v] == label)
            .collect()
    }

    /// `(label, size)` pairs sorted by label.
    pub fn sizes(&self) -> Vec<(usize, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for &label in &self.labels {
            *counts.entry(label).or_insert(0usize) += 1;
        }
        counts.into_iter().collect()
    }

    /// Largest component; ties resolve to the smallest label.
    pub fn largest(&self) -> (usize, usize) {
        let mut best = (usize::MAX, 0usize);
        for (label, size) in self.sizes() {
            if size > best.1 {
                best = (label, size);
            }
        }
        best
    }

    pub fn component_count(&self) -> usize {
        self.sizes().len()
    }
}

/// Breadth-first labeling of path-connected vertex sets over unpruned edges.
pub fn connected_components(graph: &PhaseGraph) -> ComponentLabeling {
    let n = graph.vertex_count();
    let mut labels = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        if labels[start] != usize::MAX {
            continue;
        }
        labels[start] = start;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &eid in graph.incident_edges(u) {
                let edge = &graph.edges()[eid];
                if edge.pruned {
                    continue;
                }
                let v = if edge.a == u { edge.b } else { edge.a };
                if labels[v] == usize::MAX {
                    labels[v] = start;
                    queue.push_back(v);
                }
            }
        }
    }
    ComponentLabeling { labels }
}

/// Guaranteed size of the largest component after deleting all edges at
/// `deleted_vertices` vertices of a regular graph with the given spectral
/// gap: `(1 - 2 D / (n * gap)) n`. Requires a positive gap.
pub fn component_bound(lattice_size: usize, gap: f64, deleted_vertices: usize) -> Result<f64> {
    if gap.is_nan() || gap <= 0.0 {
        return Err(Error::ZeroGap(gap));
    }
    let n = lattice_size as f64;
    Ok(n * (1.0 - 2.0 * deleted_vertices as f64 / (n * gap)))
}
