//! Masked grid domains, sampled fields and discrete probability measures.
//!
//! A [`GridDomain`] approximates an open set `Ω` of finite measure by the
//! cell centers of an axis-aligned grid that satisfy a mask predicate.
//! Quadrature is the midpoint rule over masked cells; the essential
//! supremum is approximated by the grid maximum.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::{Error, Result};

/// Axis-aligned box discretized into cells, with a boolean mask selecting
/// which cell centers belong to the domain.
///
/// Only masked-in cells are stored; `measure = cells() * cell_measure()`.
#[derive(Clone, Debug)]
pub struct GridDomain {
    bounds: Vec<(f64, f64)>,
    resolution: Vec<usize>,
    widths: Vec<f64>,
    cell_measure: f64,
    /// Flat multi-indices of masked cells, `cells() * dim` entries.
    indices: Vec<usize>,
    /// Flat coordinates of masked cell centers, `cells() * dim` entries.
    centers: Vec<f64>,
}

impl GridDomain {
    /// Builds a grid over `bounds` with the given per-axis resolution,
    /// keeping the cells whose center satisfies `mask`.
    pub fn build(
        bounds: &[(f64, f64)],
        resolution: &[usize],
        mask: impl Fn(&[f64]) -> bool,
    ) -> Result<Self> {
        if bounds.is_empty() || bounds.len() != resolution.len() {
            return Err(Error::InvalidParameter(
                "bounds and resolution must be nonempty and of equal dimension".into(),
            ));
        }
        for (lo, hi) in bounds {
            if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "degenerate box axis ({lo}, {hi})"
                )));
            }
        }
        if resolution.iter().any(|&r| r == 0) {
            return Err(Error::InvalidParameter("resolution must be >= 1 per axis".into()));
        }
        let dim = bounds.len();
        let widths: Vec<f64> = bounds
            .iter()
            .zip(resolution)
            .map(|((lo, hi), &r)| (hi - lo) / r as f64)
            .collect();
        let cell_measure: f64 = widths.iter().product();

        let total: usize = resolution.iter().product();
        let mut indices = Vec::new();
        let mut centers = Vec::new();
        let mut idx = vec![0usize; dim];
        let mut point = vec![0.0f64; dim];
        for _ in 0..total {
            for a in 0..dim {
                point[a] = bounds[a].0 + (idx[a] as f64 + 0.5) * widths[a];
            }
            if mask(&point) {
                indices.extend_from_slice(&idx);
                centers.extend_from_slice(&point);
            }
            // odometer increment
            for a in (0..dim).rev() {
                idx[a] += 1;
                if idx[a] < resolution[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        if centers.is_empty() {
            return Err(Error::EmptyMask);
        }
        Ok(Self {
            bounds: bounds.to_vec(),
            resolution: resolution.to_vec(),
            widths,
            cell_measure,
            indices,
            centers,
        })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    /// Number of masked-in cells.
    pub fn cells(&self) -> usize {
        self.centers.len() / self.dim()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn cell_measure(&self) -> f64 {
        self.cell_measure
    }

    /// Cell width along `axis`.
    pub fn width(&self, axis: usize) -> f64 {
        self.widths[axis]
    }

    /// `|Ω|`: number of masked cells times the cell measure.
    pub fn measure(&self) -> f64 {
        self.cells() as f64 * self.cell_measure
    }

    /// Coordinates of the `i`-th masked cell center.
    pub fn center(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.centers[i * d..(i + 1) * d]
    }

    pub fn centers(&self) -> impl Iterator<Item = &[f64]> {
        self.centers.chunks_exact(self.dim())
    }

    /// Grid multi-index of the `i`-th masked cell.
    pub fn multi_index(&self, i: usize) -> &[usize] {
        let d = self.dim();
        &self.indices[i * d..(i + 1) * d]
    }
}

/// Values on masked cell centers, `components` per cell.
/// Values live in `[-∞, +∞]`; `NaN` is rejected at construction.
#[derive(Clone, Debug)]
pub struct SampledField {
    components: usize,
    values: Vec<f64>,
}

impl SampledField {
    pub fn new(components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 || values.len() % components != 0 {
            return Err(Error::InvalidParameter(
                "value array shape does not match component count".into(),
            ));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::NanValue("sampled field value".into()));
        }
        Ok(Self { components, values })
    }

    pub fn scalar(values: Vec<f64>) -> Result<Self> {
        Self::new(1, values)
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn cells(&self) -> usize {
        self.values.len() / self.components
    }

    /// Scalar value at a cell (first component).
    pub fn value(&self, cell: usize) -> f64 {
        self.values[cell * self.components]
    }

    pub fn component(&self, cell: usize, c: usize) -> f64 {
        self.values[cell * self.components + c]
    }

    /// Euclidean magnitude of the value vector at a cell.
    pub fn magnitude(&self, cell: usize) -> f64 {
        if self.components == 1 {
            self.value(cell).abs()
        } else {
            let off = cell * self.components;
            self.values[off..off + self.components]
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt()
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.components, self.values.iter().map(|&v| f(v)).collect())
    }
}

type ValueFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Analytic field `u : Ω → R^d` with an optional analytic gradient
/// `x ↦ R^{N·d}` (axis-major: entry `axis*d + comp`).
#[derive(Clone)]
pub struct FieldExpr {
    components: usize,
    value: Arc<ValueFn>,
    gradient: Option<Arc<ValueFn>>,
}

impl FieldExpr {
    pub fn new(
        components: usize,
        value: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { components, value: Arc::new(value), gradient: None }
    }

    pub fn scalar(value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(1, move |x| vec![value(x)])
    }

    /// Scalar field with analytic gradient `x ↦ (∂u/∂x_1, …, ∂u/∂x_N)`.
    pub fn scalar_with_gradient(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            components: 1,
            value: Arc::new(move |x| vec![value(x)]),
            gradient: Some(Arc::new(gradient)),
        }
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn value_at(&self, x: &[f64]) -> Vec<f64> {
        (self.value)(x)
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    /// Analytic gradient at a point, when one was supplied.
    pub fn gradient_at(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.gradient.as_ref().map(|g| g(x))
    }
}

/// Samples a field expression at the masked cell centers.
pub fn sample(expr: &FieldExpr, domain: &GridDomain) -> Result<SampledField> {
    let mut values = Vec::with_capacity(domain.cells() * expr.components);
    for x in domain.centers() {
        let v = expr.value_at(x);
        if v.len() != expr.components {
            return Err(Error::InvalidParameter(
                "field expression returned wrong component count".into(),
            ));
        }
        values.extend_from_slice(&v);
    }
    SampledField::new(expr.components, values)
}

/// Gradient of a field expression on the grid: analytic when present,
/// otherwise central differences with step half the cell width.
/// Returns `N·d` components per cell, axis-major.
pub fn gradient(expr: &FieldExpr, domain: &GridDomain) -> Result<SampledField> {
    let n = domain.dim();
    let d = expr.components;
    let mut values = Vec::with_capacity(domain.cells() * n * d);
    if let Some(g) = &expr.gradient {
        for x in domain.centers() {
            let gv = g(x);
            if gv.len() != n * d {
                return Err(Error::InvalidParameter(
                    "gradient expression returned wrong component count".into(),
                ));
            }
            values.extend_from_slice(&gv);
        }
    } else {
        let mut xp = vec![0.0; n];
        let mut xm = vec![0.0; n];
        for x in domain.centers() {
            for axis in 0..n {
                let h = 0.5 * domain.width(axis);
                xp.copy_from_slice(x);
                xm.copy_from_slice(x);
                xp[axis] = x[axis] + h;
                xm[axis] = x[axis] - h;
                let vp = expr.value_at(&xp);
                let vm = expr.value_at(&xm);
                for c in 0..d {
                    values.push((vp[c] - vm[c]) / (2.0 * h));
                }
            }
        }
    }
    SampledField::new(n * d, values)
}

/// Midpoint-rule integral of a scalar field over the masked grid.
/// Any `+∞` cell value makes the integral `+∞`.
pub fn integrate(field: &SampledField, domain: &GridDomain) -> f64 {
    debug_assert_eq!(field.cells(), domain.cells());
    let mut sum = 0.0;
    for cell in 0..field.cells() {
        let v = field.value(cell);
        if v.is_infinite() {
            return if v > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        sum += v;
    }
    sum * domain.cell_measure()
}

/// Essential supremum approximated by the maximum over masked cell centers.
pub fn ess_sup(field: &SampledField, domain: &GridDomain) -> f64 {
    debug_assert_eq!(field.cells(), domain.cells());
    (0..field.cells())
        .map(|c| field.value(c))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Maximum of the Euclidean magnitude over masked cells.
pub fn sup_magnitude(field: &SampledField) -> f64 {
    (0..field.cells()).map(|c| field.magnitude(c)).fold(0.0, f64::max)
}

/// Finitely supported probability measure: atoms in `R^k` with positive
/// weights summing to 1 (within 1e-12).
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(Error::InvalidParameter(
                "atoms and weights must be nonempty and of equal length".into(),
            ));
        }
        let k = atoms[0].len();
        if atoms.iter().any(|a| a.len() != k) {
            return Err(Error::InvalidParameter("atoms must share a dimension".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("weights must be positive and finite".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {total}, expected 1 within 1e-12"
            )));
        }
        Ok(Self { atoms, weights })
    }

    /// Point mass at a single atom.
    pub fn dirac(atom: Vec<f64>) -> Self {
        Self { atoms: vec![atom], weights: vec![1.0] }
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `Σ wᵢ ξᵢ`.
    pub fn barycenter(&self) -> Vec<f64> {
        let k = self.atoms[0].len();
        let mut b = vec![0.0; k];
        for (a, &w) in self.atoms.iter().zip(&self.weights) {
            for (bj, aj) in b.iter_mut().zip(a) {
                *bj += w * aj;
            }
        }
        b
    }
}

/// Writes a field as CSV: per-axis index columns `i0..i{N-1}`, then
/// component columns `c0..c{d-1}`, one row per masked cell.
pub fn write_field_csv<W: Write>(
    domain: &GridDomain,
    field: &SampledField,
    out: &mut W,
) -> Result<()> {
    let n = domain.dim();
    let d = field.components();
    let mut header = Vec::with_capacity(n + d);
    for a in 0..n {
        header.push(format!("i{a}"));
    }
    for c in 0..d {
        header.push(format!("c{c}"));
    }
    writeln!(out, "{}", header.join(","))?;
    for cell in 0..domain.cells() {
        let mut row: Vec<String> =
            domain.multi_index(cell).iter().map(|i| i.to_string()).collect();
        for c in 0..d {
            row.push(crate::fmt_csv_float(field.component(cell, c)));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Reads a field written by [`write_field_csv`] back onto the same domain.
/// Rows must appear in the domain's masked-cell order.
pub fn read_field_csv<R: BufRead>(domain: &GridDomain, input: R) -> Result<SampledField> {
    let n = domain.dim();
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty field CSV".into()))??;
    let cols = header.split(',').count();
    if cols <= n {
        return Err(Error::Config("field CSV has no component columns".into()));
    }
    let d = cols - n;
    let mut values = Vec::with_capacity(domain.cells() * d);
    for (cell, line) in lines.enumerate() {
        let line = line?;
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != cols {
            return Err(Error::Config(format!("ragged CSV row {cell}")));
        }
        for (a, part) in parts[..n].iter().enumerate() {
            let idx: usize = part
                .parse()
                .map_err(|_| Error::Config(format!("bad index in CSV row {cell}")))?;
            if domain.multi_index(cell)[a] != idx {
                return Err(Error::Config(format!(
                    "CSV row {cell} does not match the domain's masked-cell order"
                )));
            }
        }
        for part in &parts[n..] {
            let v = match *part {
                "inf" => f64::INFINITY,
                "-inf" => f64::NEG_INFINITY,
                s => s
                    .parse()
                    .map_err(|_| Error::Config(format!("bad value in CSV row {cell}")))?,
            };
            values.push(v);
        }
    }
    if values.len() != domain.cells() * d {
        return Err(Error::Config("field CSV row count does not match the domain".into()));
    }
    SampledField::new(d, values)
}
