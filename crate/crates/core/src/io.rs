//! File formats for grids, sampled functions, time-frequency dumps and
//! nuclear representations.
//!
//! A sampled function is a JSON descriptor plus a flat data file holding one
//! value per node in row-major order (last axis fastest). Complex data is
//! stored as interleaved `re, im`; real data as a single column. The binary
//! format is little-endian `f64`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Axis, ProductGrid, SampledFunction, WeightFunction};
use crate::mixed_norm::{ExponentTuple, WeightConvention};
use crate::nuclear::{NormDescriptor, NuclearRepresentation};
use crate::timefreq::TfGrid;
use crate::variable_exponent::VariableExponent;

/// One axis of a grid descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AxisDescriptor {
    /// `count` nodes on `[start, end)`, left Riemann weights.
    Uniform { start: f64, end: f64, count: usize },
    /// `count` nodes on `[0, period)`, equal weights.
    Periodic { period: f64, count: usize },
    Explicit { nodes: Vec<f64>, weights: Vec<f64>, periodic: bool, extent: f64 },
}

impl AxisDescriptor {
    pub fn build(&self) -> Result<Axis> {
        match self {
            AxisDescriptor::Uniform { start, end, count } => Axis::uniform(*start, *end, *count),
            AxisDescriptor::Periodic { period, count } => Axis::periodic_uniform(*count, *period),
            AxisDescriptor::Explicit { nodes, weights, periodic, extent } => {
                Axis::new(nodes.clone(), weights.clone(), *periodic, *extent)
            }
        }
    }

    pub fn describe(axis: &Axis) -> Self {
        let n = axis.len();
        if let Some(h) = axis.uniform_spacing() {
            let equal = axis.quad_weights().iter().all(|w| (w - h).abs() <= 1e-12 * h.abs());
            let start = axis.nodes()[0];
            if equal && n >= 2 {
                if axis.is_periodic() && start == 0.0 && (axis.extent() - h * n as f64).abs() <= 1e-12 * axis.extent() {
                    let candidate = AxisDescriptor::Periodic { period: axis.extent(), count: n };
                    if candidate.build().ok().as_ref() == Some(axis) {
                        return candidate;
                    }
                }
                if !axis.is_periodic() {
                    let candidate = AxisDescriptor::Uniform { start, end: start + axis.extent(), count: n };
                    if candidate.build().ok().as_ref() == Some(axis) {
                        return candidate;
                    }
                }
            }
        }
        AxisDescriptor::Explicit {
            nodes: axis.nodes().to_vec(),
            weights: axis.quad_weights().to_vec(),
            periodic: axis.is_periodic(),
            extent: axis.extent(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub axes: Vec<AxisDescriptor>,
}

impl GridDescriptor {
    pub fn describe(grid: &ProductGrid) -> Self {
        Self { axes: grid.axes().iter().map(AxisDescriptor::describe).collect() }
    }

    pub fn build(&self) -> Result<ProductGrid> {
        ProductGrid::new(self.axes.iter().map(|a| a.build()).collect::<Result<_>>()?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Binary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Complex,
    Real,
}

/// Descriptor written next to every data file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionDescriptor {
    pub grid: GridDescriptor,
    pub format: DataFormat,
    pub values: ValueKind,
    /// Data file name, relative to the descriptor.
    pub data: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub header: Option<serde_json::Value>,
}

fn data_name(stem: &str, format: DataFormat) -> String {
    match format {
        DataFormat::Csv => format!("{stem}.csv"),
        DataFormat::Binary => format!("{stem}.bin"),
    }
}

fn encode(values: &[f64], columns: usize, format: DataFormat) -> Vec<u8> {
    match format {
        DataFormat::Binary => values.iter().flat_map(|v| v.to_le_bytes()).collect(),
        DataFormat::Csv => {
            let mut s = String::with_capacity(values.len() * 24);
            s.push_str(if columns == 2 { "re,im\n" } else { "value\n" });
            for row in values.chunks(columns) {
                let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
                s.push_str(&line.join(","));
                s.push('\n');
            }
            s.into_bytes()
        }
    }
}

fn decode(bytes: &[u8], columns: usize, format: DataFormat) -> Result<Vec<f64>> {
    match format {
        DataFormat::Binary => {
            if !bytes.len().is_multiple_of(8) {
                return Err(Error::Format(format!("binary data length {} is not a multiple of 8", bytes.len())));
            }
            Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
        }
        DataFormat::Csv => {
            let text = std::str::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))?;
            let mut out = Vec::new();
            for (n, line) in text.lines().enumerate() {
                let line = line.trim();
                if n == 0 && line.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
                    continue;
                }
                if line.is_empty() {
                    continue;
                }
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() != columns {
                    return Err(Error::Format(format!("line {}: expected {columns} fields, got {}", n + 1, fields.len())));
                }
                for f in fields {
                    out.push(f.trim().parse::<f64>().map_err(|e| Error::Format(format!("line {}: {e}", n + 1)))?);
                }
            }
            Ok(out)
        }
    }
}

fn write_values(
    grid: &ProductGrid,
    flat: &[f64],
    kind: ValueKind,
    dir: &Path,
    stem: &str,
    format: DataFormat,
    header: Option<serde_json::Value>,
) -> Result<PathBuf> {
    let columns = if kind == ValueKind::Complex { 2 } else { 1 };
    let data = data_name(stem, format);
    std::fs::write(dir.join(&data), encode(flat, columns, format))?;
    let desc = FunctionDescriptor { grid: GridDescriptor::describe(grid), format, values: kind, data, header };
    let path = dir.join(format!("{stem}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&desc)?)?;
    Ok(path)
}

fn read_values(path: &Path, expect: ValueKind) -> Result<(FunctionDescriptor, ProductGrid, Vec<f64>)> {
    let desc: FunctionDescriptor = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if desc.values != expect {
        return Err(Error::Format(format!("{} holds {:?} values, expected {:?}", path.display(), desc.values, expect)));
    }
    let grid = desc.grid.build()?;
    let base = path.parent().unwrap_or(Path::new("."));
    let columns = if expect == ValueKind::Complex { 2 } else { 1 };
    let flat = decode(&std::fs::read(base.join(&desc.data))?, columns, desc.format)?;
    if flat.len() != grid.node_count() * columns {
        return Err(Error::DimensionMismatch { expected: grid.node_count() * columns, got: flat.len() });
    }
    Ok((desc, grid, flat))
}

/// Write `f` as `<stem>.json` plus `<stem>.csv` or `<stem>.bin`; returns the descriptor path.
pub fn write_function(f: &SampledFunction, dir: &Path, stem: &str, format: DataFormat) -> Result<PathBuf> {
    let flat: Vec<f64> = f.values().iter().flat_map(|z| [z.re, z.im]).collect();
    write_values(f.grid(), &flat, ValueKind::Complex, dir, stem, format, None)
}

pub fn read_function(path: &Path) -> Result<SampledFunction> {
    let (_, grid, flat) = read_values(path, ValueKind::Complex)?;
    let values = flat.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    SampledFunction::new(Arc::new(grid), values)
}

/// Real-valued samples such as exponents and weights.
pub fn write_real(grid: &ProductGrid, values: &[f64], dir: &Path, stem: &str, format: DataFormat) -> Result<PathBuf> {
    if values.len() != grid.node_count() {
        return Err(Error::DimensionMismatch { expected: grid.node_count(), got: values.len() });
    }
    write_values(grid, values, ValueKind::Real, dir, stem, format, None)
}

pub fn read_real(path: &Path) -> Result<(ProductGrid, Vec<f64>)> {
    let (_, grid, flat) = read_values(path, ValueKind::Real)?;
    Ok((grid, flat))
}

pub fn write_exponent(p: &VariableExponent, dir: &Path, stem: &str, format: DataFormat) -> Result<PathBuf> {
    write_real(p.grid(), p.values(), dir, stem, format)
}

pub fn read_exponent(path: &Path) -> Result<VariableExponent> {
    let (grid, values) = read_real(path)?;
    VariableExponent::new(Arc::new(grid), values)
}

/// A function on the time-frequency plane, with the convention header.
pub fn write_tf_dump(v: &SampledFunction, tf: &TfGrid, dir: &Path, stem: &str, format: DataFormat) -> Result<PathBuf> {
    if **v.grid() != **tf.plane() {
        return Err(Error::GridMismatch);
    }
    let flat: Vec<f64> = v.values().iter().flat_map(|z| [z.re, z.im]).collect();
    write_values(v.grid(), &flat, ValueKind::Complex, dir, stem, format, Some(tf.header()))
}

/// Read a plane dump and its header.
pub fn read_tf_dump(path: &Path) -> Result<(SampledFunction, serde_json::Value)> {
    let (desc, grid, flat) = read_values(path, ValueKind::Complex)?;
    let header = desc.header.ok_or_else(|| Error::Format("plane dump has no convention header".into()))?;
    let values = flat.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    Ok((SampledFunction::new(Arc::new(grid), values)?, header))
}

/// Serialized form of a [`NormDescriptor`]; sampled parts live in side files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum NormManifest {
    Mixed { exponents: Vec<f64>, convention: WeightConvention, weight: String },
    Variable { exponent: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairFiles {
    pub g: String,
    pub h: String,
}

/// Manifest of a finite nuclear representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationManifest {
    #[serde(rename = "N")]
    pub rank: usize,
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<NormManifest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<NormManifest>,
    pub source_grid: GridDescriptor,
    pub target_grid: GridDescriptor,
    pub pairs: Vec<PairFiles>,
}

fn write_norm(d: &NormDescriptor, dir: &Path, stem: &str, format: DataFormat) -> Result<NormManifest> {
    Ok(match d {
        NormDescriptor::Mixed { exponents, weight, convention } => {
            let path = write_real(weight.grid(), weight.values(), dir, stem, format)?;
            NormManifest::Mixed {
                exponents: exponents.entries().to_vec(),
                convention: *convention,
                weight: file_name(&path),
            }
        }
        NormDescriptor::Variable(p) => NormManifest::Variable { exponent: file_name(&write_exponent(p, dir, stem, format)?) },
    })
}

fn read_norm(m: &NormManifest, dir: &Path) -> Result<NormDescriptor> {
    Ok(match m {
        NormManifest::Mixed { exponents, convention, weight } => {
            let (grid, values) = read_real(&dir.join(weight))?;
            NormDescriptor::Mixed {
                exponents: ExponentTuple::new(exponents.clone())?,
                weight: WeightFunction::new(Arc::new(grid), values)?,
                convention: *convention,
            }
        }
        NormManifest::Variable { exponent } => NormDescriptor::Variable(read_exponent(&dir.join(exponent))?),
    })
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Write `manifest.json` and one descriptor/data pair per `g_n` and `h_n` into `dir`.
pub fn write_representation(rep: &NuclearRepresentation, dir: &Path, format: DataFormat) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut pairs = Vec::with_capacity(rep.rank());
    for (n, (g, h)) in rep.terms().iter().enumerate() {
        let gp = write_function(g, dir, &format!("g_{n:04}"), format)?;
        let hp = write_function(h, dir, &format!("h_{n:04}"), format)?;
        pairs.push(PairFiles { g: file_name(&gp), h: file_name(&hp) });
    }
    let manifest = RepresentationManifest {
        rank: rep.rank(),
        r: rep.order(),
        source: rep.source_descriptor().map(|d| write_norm(d, dir, "source_norm", format)).transpose()?,
        target: rep.target_descriptor().map(|d| write_norm(d, dir, "target_norm", format)).transpose()?,
        source_grid: GridDescriptor::describe(rep.source_grid()),
        target_grid: GridDescriptor::describe(rep.target_grid()),
        pairs,
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}

pub fn read_representation(manifest_path: &Path) -> Result<NuclearRepresentation> {
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let m: RepresentationManifest = serde_json::from_str(&std::fs::read_to_string(manifest_path)?)?;
    if m.pairs.len() != m.rank {
        return Err(Error::Format(format!("manifest declares N = {} but lists {} pairs", m.rank, m.pairs.len())));
    }
    let source_grid = Arc::new(m.source_grid.build()?);
    let target_grid = Arc::new(m.target_grid.build()?);
    let mut rep = NuclearRepresentation::new(target_grid.clone(), source_grid.clone(), m.r)?;
    for pair in &m.pairs {
        let g = read_function(&dir.join(&pair.g))?;
        let h = read_function(&dir.join(&pair.h))?;
        // share the manifest's grid allocations
        let g = SampledFunction::new(target_grid.clone(), g.into_values())?;
        let h = SampledFunction::new(source_grid.clone(), h.into_values())?;
        rep.push(g, h)?;
    }
    if let Some(s) = &m.source {
        rep = rep.with_source(read_norm(s, dir)?);
    }
    if let Some(t) = &m.target {
        rep = rep.with_target(read_norm(t, dir)?);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Axis;

    fn sample() -> SampledFunction {
        let g = Arc::new(ProductGrid::new(vec![Axis::uniform(-1.0, 2.0, 5).unwrap(), Axis::unit_torus(3).unwrap()]).unwrap());
        SampledFunction::from_fn(g, |x| Complex64::new(x[0].sin() / 3.0, x[1] * 0.1 + 1e-300)).unwrap()
    }

    #[test]
    fn function_round_trip_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let f = sample();
        for fmt in [DataFormat::Csv, DataFormat::Binary] {
            let p = write_function(&f, dir.path(), &format!("f_{fmt:?}"), fmt).unwrap();
            let back = read_function(&p).unwrap();
            assert_eq!(back.values(), f.values());
            assert_eq!(**back.grid(), **f.grid());
        }
    }

    #[test]
    fn binary_layout_is_little_endian_interleaved() {
        let dir = tempfile::tempdir().unwrap();
        let g = Arc::new(ProductGrid::unit_torus(1, 2).unwrap());
        let f = SampledFunction::new(g, vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.25)]).unwrap();
        write_function(&f, dir.path(), "f", DataFormat::Binary).unwrap();
        let bytes = std::fs::read(dir.path().join("f.bin")).unwrap();
        assert_eq!(bytes.len(), 32);
        assert_eq!(&bytes[8..16], &(-2.0f64).to_le_bytes());
        assert_eq!(&bytes[16..24], &0.5f64.to_le_bytes());
    }

    #[test]
    fn descriptor_uses_compact_axes() {
        let g = ProductGrid::new(vec![Axis::centered(3.0, 8).unwrap(), Axis::unit_torus(4).unwrap()]).unwrap();
        let d = GridDescriptor::describe(&g);
        assert!(matches!(d.axes[0], AxisDescriptor::Uniform { count: 8, .. }));
        assert!(matches!(d.axes[1], AxisDescriptor::Periodic { count: 4, .. }));
        assert_eq!(d.build().unwrap(), g);
    }

    #[test]
    fn exponent_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Arc::new(ProductGrid::unit_torus(1, 16).unwrap());
        let p = VariableExponent::from_fn(g, |x| 1.5 + x[0]).unwrap();
        let path = write_exponent(&p, dir.path(), "p", DataFormat::Csv).unwrap();
        assert_eq!(read_exponent(&path).unwrap().values(), p.values());
    }

    #[test]
    fn tf_dump_carries_header() {
        let dir = tempfile::tempdir().unwrap();
        let tf = TfGrid::centered(1, 4.0, 8).unwrap();
        let v = SampledFunction::constant(tf.plane().clone(), Complex64::new(1.0, 0.0));
        let path = write_tf_dump(&v, &tf, dir.path(), "v", DataFormat::Binary).unwrap();
        let (back, header) = read_tf_dump(&path).unwrap();
        assert_eq!(back.values(), v.values());
        assert_eq!(header["angular"], true);
        assert_eq!(header["d"], 1);
    }

    #[test]
    fn representation_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Arc::new(ProductGrid::unit_torus(1, 8).unwrap());
        let a = SampledFunction::from_real_fn(g.clone(), |x| 1.0 + x[0]).unwrap();
        let b = SampledFunction::from_real_fn(g.clone(), |x| (x[0] * 3.0).cos()).unwrap();
        let p = VariableExponent::from_fn(g.clone(), |x| 2.0 + x[0]).unwrap();
        let rep = NuclearRepresentation::from_pairs(g.clone(), 0.5, vec![(a.clone(), b.clone()), (b, a)])
            .unwrap()
            .with_source(NormDescriptor::Variable(p))
            .with_target(NormDescriptor::lebesgue(g, ExponentTuple::new(vec![3.0]).unwrap()));
        let path = write_representation(&rep, &dir.path().join("rep"), DataFormat::Csv).unwrap();
        let back = read_representation(&path).unwrap();
        assert_eq!(back.rank(), 2);
        assert_eq!(back.order(), 0.5);
        assert_eq!(back.quasinorm().unwrap().total, rep.quasinorm().unwrap().total);
        let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(manifest["N"], 2);
    }

    #[test]
    fn malformed_data_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_function(&sample(), dir.path(), "f", DataFormat::Csv).unwrap();
        std::fs::write(dir.path().join("f.csv"), "re,im\n1,2,3\n").unwrap();
        assert!(matches!(read_function(&p), Err(Error::Format(_))));
        std::fs::write(dir.path().join("f.csv"), "re,im\n1,2\n").unwrap();
        assert!(matches!(read_function(&p), Err(Error::DimensionMismatch { .. })));
    }
}
