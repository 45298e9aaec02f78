//! File formats: frame descriptors and complex vectors as JSON, measurement
//! tables and graph edge lists as CSV, reconstruction and spectral reports as
//! JSON.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::frame::{
    random_window, Lattice, MeasurementIndex, MeasurementVector, MultiWindowGaborFrame, Window,
    WindowTag,
};
use crate::graph::PhaseGraph;
use crate::recover::{ReconstructionResult, ReconstructionStatus};
use crate::sets::IndexSet;
use crate::signal::{Signal, C64};

pub const SCHEMA_VERSION: u32 = 1;

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

/// A lattice axis: the full cyclic group or an explicit support.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Keyword(AxisKeyword),
    Explicit(Vec<usize>),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisKeyword {
    Full,
}

impl AxisSpec {
    pub fn full() -> Self {
        AxisSpec::Keyword(AxisKeyword::Full)
    }

    pub fn resolve(&self, m: usize) -> Result<IndexSet> {
        match self {
            AxisSpec::Keyword(AxisKeyword::Full) => Ok(IndexSet::full(m)),
            AxisSpec::Explicit(members) => IndexSet::new(m, members.iter().copied()),
        }
    }
}

/// The primary window: a seed for the uniform-sphere sampler, or explicit
/// values.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowSpec {
    Seed { seed: u64 },
    Values { values: Vec<[f64; 2]> },
}

impl WindowSpec {
    pub fn resolve(&self, m: usize) -> Result<Window> {
        match self {
            WindowSpec::Seed { seed } => Ok(random_window(m, *seed)),
            WindowSpec::Values { values } => {
                let signal = pairs_to_signal(values)?;
                if signal.dim() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        actual: signal.dim(),
                    });
                }
                Window::new(signal)
            }
        }
    }
}

/// Everything needed to rebuild a frame deterministically:
/// `{M, T, F, Q, P, seed or explicit window values}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameDescriptor {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub m: usize,
    pub t: AxisSpec,
    pub f: AxisSpec,
    pub q: Vec<usize>,
    pub p: Vec<usize>,
    pub window: WindowSpec,
}

impl FrameDescriptor {
    pub fn build(&self) -> Result<MultiWindowGaborFrame> {
        let lattice = Lattice::new(self.t.resolve(self.m)?, self.f.resolve(self.m)?)?;
        let q = IndexSet::new(self.m, self.q.iter().copied())?;
        let p = IndexSet::new(self.m, self.p.iter().copied())?;
        let window = self.window.resolve(self.m)?;
        MultiWindowGaborFrame::assemble(window, lattice, q, p)
    }

    /// Descriptor with the window resolved to explicit values, so downstream
    /// stages need no seed.
    pub fn canonical(frame: &MultiWindowGaborFrame) -> Self {
        FrameDescriptor {
            schema_version: SCHEMA_VERSION,
            m: frame.modulus(),
            t: AxisSpec::Explicit(frame.lattice().time_support().members().to_vec()),
            f: AxisSpec::Explicit(frame.lattice().freq_support().members().to_vec()),
            q: frame.q_set().members().to_vec(),
            p: frame.p_set().members().to_vec(),
            window: WindowSpec::Values {
                values: signal_to_pairs(frame.primary_window().signal()),
            },
        }
    }
}

pub fn signal_to_pairs(signal: &Signal) -> Vec<[f64; 2]> {
    signal.values().iter().map(|v| [v.re, v.im]).collect()
}

pub fn pairs_to_signal(pairs: &[[f64; 2]]) -> Result<Signal> {
    Signal::new(pairs.iter().map(|&[re, im]| C64::new(re, im)).collect())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Complex vectors serialize as JSON arrays of `[re, im]` pairs.
pub fn read_signal(path: &Path) -> Result<Signal> {
    let pairs: Vec<[f64; 2]> = read_json(path)?;
    pairs_to_signal(&pairs)
}

pub fn write_signal(path: &Path, signal: &Signal) -> Result<()> {
    write_json(path, &signal_to_pairs(signal))
}

fn parse_tag(raw: &str, row: usize) -> Result<WindowTag> {
    if raw == "primary" {
        return Ok(WindowTag::Primary);
    }
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() == 4 && parts[0] == "aux" {
        let q = parts[1].parse().ok();
        let p = parts[2].parse().ok();
        let t = parts[3].parse().ok();
        if let (Some(q), Some(p), Some(t)) = (q, p, t) {
            if t <= 2 {
                return Ok(WindowTag::Aux { q, p, t });
            }
        }
    }
    Err(Error::MeasurementLayout {
        row,
        expected: "primary or aux:q:p:t".into(),
        found: raw.to_string(),
    })
}

/// Measurement CSV, one row per frame vector in canonical order:
/// `window_tag,k,l,value`.
pub fn write_measurements<W: Write>(writer: W, b: &MeasurementVector) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["window_tag", "k", "l", "value"])?;
    for (index, value) in b.index().iter().zip(b.values()) {
        csv.write_record([
            index.tag.to_string(),
            index.k.to_string(),
            index.l.to_string(),
            format!("{value:.17e}"),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_measurements_path(path: &Path, b: &MeasurementVector) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_measurements(std::io::BufWriter::new(file), b)
}

pub fn read_measurements<R: Read>(reader: R) -> Result<MeasurementVector> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    {
        let headers = csv.headers()?;
        let expected = ["window_tag", "k", "l", "value"];
        if headers.len() != 4 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::Invalid {
                what: "measurement csv",
                detail: format!("header must be window_tag,k,l,value, found {headers:?}"),
            });
        }
    }
    let mut values = Vec::new();
    let mut index = Vec::new();
    for (row, record) in csv.records().enumerate() {
        let record = record?;
        if record.len() != 4 {
            return Err(Error::Invalid {
                what: "measurement csv",
                detail: format!("row {row} has {} fields", record.len()),
            });
        }
        let tag = parse_tag(&record[0], row)?;
        let parse_usize = |field: &str| -> Result<usize> {
            field.trim().parse().map_err(|_| Error::Invalid {
                what: "measurement csv",
                detail: format!("row {row}: bad integer {field:?}"),
            })
        };
        let k = parse_usize(&record[1])?;
        let l = parse_usize(&record[2])?;
        let value: f64 = record[3].trim().parse().map_err(|_| Error::Invalid {
            what: "measurement csv",
            detail: format!("row {row}: bad value {:?}", &record[3]),
        })?;
        values.push(value);
        index.push(MeasurementIndex { tag, k, l });
    }
    MeasurementVector::new(values, index)
}

pub fn read_measurements_path(path: &Path) -> Result<MeasurementVector> {
    let file = std::fs::File::open(path)?;
    read_measurements(std::io::BufReader::new(file))
}

/// Edge-list CSV: `k,l,k2,l2,re_omega,im_omega,pruned`; weight fields stay
/// empty for unweighted edges.
pub fn write_graph_edges<W: Write>(writer: W, graph: &PhaseGraph) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["k", "l", "k2", "l2", "re_omega", "im_omega", "pruned"])?;
    for edge in graph.edges() {
        let a = graph.vertices()[edge.a];
        let b = graph.vertices()[edge.b];
        let (re, im) = match edge.weight {
            Some(w) => (format!("{:.17e}", w.re), format!("{:.17e}", w.im)),
            None => (String::new(), String::new()),
        };
        csv.write_record([
            a.k.to_string(),
            a.l.to_string(),
            b.k.to_string(),
            b.l.to_string(),
            re,
            im,
            edge.pruned.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_graph_edges_path(path: &Path, graph: &PhaseGraph) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_graph_edges(std::io::BufWriter::new(file), graph)
}

/// Reconstruction report as written by the CLI; everything numeric the
/// pipeline produced plus optional timing.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReconstructionReport {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub status: ReconstructionStatus,
    pub component_size: usize,
    pub pruned_vertices: usize,
    pub removed_edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_number: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
    pub estimate: Vec<[f64; 2]>,
}

impl ReconstructionReport {
    pub fn from_result(result: &ReconstructionResult, wall_ms: Option<u64>) -> Self {
        ReconstructionReport {
            schema_version: SCHEMA_VERSION,
            status: result.status,
            component_size: result.component_size,
            pruned_vertices: result.pruned_vertices,
            removed_edges: result.removed_edges,
            solve_residual: result.solve_residual,
            condition_number: result.condition_number,
            truth_distance: result.truth_distance,
            wall_ms,
            estimate: signal_to_pairs(&result.estimate),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{random_window, Lattice};
    use crate::sets::IndexSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_frame(m: usize) -> MultiWindowGaborFrame {
        MultiWindowGaborFrame::assemble(
            random_window(m, 5),
            Lattice::full(m),
            IndexSet::new(m, vec![0, 1]).unwrap(),
            IndexSet::new(m, vec![0, 2]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn descriptor_round_trip_rebuilds_the_same_frame() {
        let frame = sample_frame(4);
        let descriptor = FrameDescriptor::canonical(&frame);
        let json = serde_json::to_string(&descriptor).unwrap();
        let parsed: FrameDescriptor = serde_json::from_str(&json).unwrap();
        let rebuilt = parsed.build().unwrap();
        assert_eq!(rebuilt.len(), frame.len());
        assert_eq!(
            rebuilt.primary_window().signal(),
            frame.primary_window().signal()
        );
    }

    #[test]
    fn descriptor_accepts_full_keyword_and_seeds() {
        let json = r#"{
            "m": 6,
            "t": "full",
            "f": [0, 2, 4],
            "q": [0, 1],
            "p": [0, 2],
            "window": {"seed": 9}
        }"#;
        let descriptor: FrameDescriptor = serde_json::from_str(json).unwrap();
        let frame = descriptor.build().unwrap();
        assert_eq!(frame.lattice().len(), 18);
        assert_eq!(frame.primary_window().signal(), random_window(6, 9).signal());
    }

    #[test]
    fn measurement_csv_round_trip() {
        let frame = sample_frame(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Signal::random(4, &mut rng);
        let b = frame.measure(&x).unwrap();

        let mut buffer = Vec::new();
        write_measurements(&mut buffer, &b).unwrap();
        let back = read_measurements(buffer.as_slice()).unwrap();
        assert_eq!(back.index(), b.index());
        for (a, b) in back.values().iter().zip(b.values()) {
            assert_eq!(a, b, "values survive the text round trip exactly");
        }
        back.validate_layout(&frame).unwrap();
    }

    #[test]
    fn measurement_csv_rejects_garbage() {
        let text = "window_tag,k,l,value\nprimary,0,0,-1.0\n";
        assert!(matches!(
            read_measurements(text.as_bytes()),
            Err(Error::NegativeMeasurement { .. })
        ));
        let text = "window_tag,k,l,value\nsideways,0,0,1.0\n";
        assert!(read_measurements(text.as_bytes()).is_err());
        let text = "wrong,header,entirely,here\n";
        assert!(read_measurements(text.as_bytes()).is_err());
    }

    #[test]
    fn signal_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Signal::random(5, &mut rng);
        let dir = std::env::temp_dir().join("gaborpol-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("signal.json");
        write_signal(&path, &x).unwrap();
        let back = read_signal(&path).unwrap();
        assert_eq!(back, x);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn edge_csv_has_expected_shape() {
        let frame = sample_frame(4);
        let graph = crate::graph::PhaseGraph::build(
            frame.lattice(),
            frame.q_set(),
            frame.p_set(),
        )
        .unwrap();
        let mut buffer = Vec::new();
        write_graph_edges(&mut buffer, &graph).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "k,l,k2,l2,re_omega,im_omega,pruned");
        assert_eq!(text.lines().count(), graph.edges().len() + 1);
    }
}
