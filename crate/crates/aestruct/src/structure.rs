//! Manifold specs and point frames.
//!
//! A `ManifoldSpec` is one chart of an (alpha, epsilon)-structure: the
//! dimension, the signs alpha and epsilon, coordinate names, the metric and
//! J as matrices of component expressions, and a sampling domain. A
//! `PointFrame` is everything evaluated at a single point: g, its inverse
//! and partials, J and its partials, the Levi-Civita coefficients and
//! nabla_g J. The derived tensors Phi, nabla_g Phi, the Nijenhuis tensor
//! (two independent routes) and the second Nijenhuis tensor are computed
//! from frames.
//!
//! Index conventions: Gamma^k_ij means nabla_{d_i} d_j = Gamma^k_ij d_k;
//! (nabla J)^k_ij means ((nabla_{d_i} J) d_j)^k; storage order is always
//! [k][i][j] for (1,2) data and [k][i][j] for partials d_k of a matrix
//! entry [i][j].

use crate::exprlang::{self, Expression, ExprError};
use crate::rng::SplitMix64;
use crate::tensor::{det_matrix, invert_matrix, leading_minors_positive, Slot, TensorValue};
use crate::DET_G_FLOOR;
use serde::Deserialize;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum SpecError {
    #[error("invalid spec JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Shape(String),
    #[error("expression error in {place}: {err}")]
    Entry { place: String, err: ExprError },
    #[error("alpha and epsilon must be -1 or 1, got alpha={alpha}, epsilon={epsilon}")]
    Signs { alpha: i64, epsilon: i64 },
    #[error("degenerate metric at {point:?}: |det g| = {det:e}")]
    DegenerateMetric { point: Vec<f64>, det: f64 },
    #[error("evaluation error at {point:?}: {err}")]
    Eval { point: Vec<f64>, err: ExprError },
}

/// One chart of an (alpha, epsilon)-structure.
#[derive(Clone, Debug)]
pub struct ManifoldSpec {
    pub name: String,
    pub dimension: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub coordinates: Vec<String>,
    /// Entry [i][j] = g_ij.
    pub metric: Vec<Vec<Expression>>,
    /// Entry [i][j] = J^i_j (row = upper index).
    pub j: Vec<Vec<Expression>>,
    pub domain: Vec<[f64; 2]>,
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: String,
    dimension: usize,
    alpha: i64,
    epsilon: i64,
    coordinates: Vec<String>,
    metric: Vec<Vec<String>>,
    #[serde(rename = "J")]
    j: Vec<Vec<String>>,
    domain: Vec<[f64; 2]>,
    #[serde(default)]
    seed: Option<u64>,
}

const RESERVED: &[&str] = &[
    "pi", "e", "sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt", "abs",
];

fn parse_matrix(
    raw: &[Vec<String>],
    what: &str,
    n: usize,
    coords: &[String],
) -> Result<Vec<Vec<Expression>>, SpecError> {
    if raw.len() != n || raw.iter().any(|row| row.len() != n) {
        return Err(SpecError::Shape(format!(
            "{what} must be a {n}x{n} matrix of expression strings"
        )));
    }
    let mut out = Vec::with_capacity(n);
    for (i, row) in raw.iter().enumerate() {
        let mut out_row = Vec::with_capacity(n);
        for (j, text) in row.iter().enumerate() {
            let expr = exprlang::parse_expression(text, coords).map_err(|err| SpecError::Entry {
                place: format!("{what} entry ({},{})", i + 1, j + 1),
                err,
            })?;
            out_row.push(expr);
        }
        out.push(out_row);
    }
    Ok(out)
}

/// Parse and shape-check a spec from its JSON bytes.
pub fn load_spec(bytes: &[u8]) -> Result<ManifoldSpec, SpecError> {
    let raw: RawSpec =
        serde_json::from_slice(bytes).map_err(|e| SpecError::Json(e.to_string()))?;
    let n = raw.dimension;
    if n == 0 {
        return Err(SpecError::Shape("dimension must be positive".into()));
    }
    if !matches!(raw.alpha, -1 | 1) || !matches!(raw.epsilon, -1 | 1) {
        return Err(SpecError::Signs {
            alpha: raw.alpha,
            epsilon: raw.epsilon,
        });
    }
    if raw.coordinates.len() != n {
        return Err(SpecError::Shape(format!(
            "expected {n} coordinate names, got {}",
            raw.coordinates.len()
        )));
    }
    for (i, c) in raw.coordinates.iter().enumerate() {
        let mut chars = c.chars();
        let head_ok = chars
            .next()
            .map(|ch| ch.is_ascii_alphabetic() || ch == '_')
            .unwrap_or(false);
        if !head_ok || !chars.all(|ch| ch.is_ascii_alphanumeric() || ch == '_') {
            return Err(SpecError::Shape(format!(
                "coordinate {} (`{c}`) is not a valid identifier",
                i + 1
            )));
        }
        if RESERVED.contains(&c.as_str()) {
            return Err(SpecError::Shape(format!(
                "coordinate name `{c}` collides with a builtin function or constant"
            )));
        }
        if raw.coordinates[..i].contains(c) {
            return Err(SpecError::Shape(format!("duplicate coordinate name `{c}`")));
        }
    }
    if raw.domain.len() != n {
        return Err(SpecError::Shape(format!(
            "expected {n} domain intervals, got {}",
            raw.domain.len()
        )));
    }
    for (i, iv) in raw.domain.iter().enumerate() {
        if !(iv[0] < iv[1]) {
            return Err(SpecError::Shape(format!(
                "domain interval {} must satisfy lo < hi, got [{}, {}]",
                i + 1,
                iv[0],
                iv[1]
            )));
        }
    }
    let metric = parse_matrix(&raw.metric, "metric", n, &raw.coordinates)?;
    let j = parse_matrix(&raw.j, "J", n, &raw.coordinates)?;
    Ok(ManifoldSpec {
        name: raw.name,
        dimension: n,
        alpha: raw.alpha as f64,
        epsilon: raw.epsilon as f64,
        coordinates: raw.coordinates,
        metric,
        j,
        domain: raw.domain,
        seed: raw.seed.unwrap_or(0),
    })
}

impl ManifoldSpec {
    pub fn n(&self) -> usize {
        self.dimension
    }

    /// Deterministic sample points; the override replaces the spec seed.
    pub fn sample_points(&self, samples: usize, seed_override: Option<u64>) -> Vec<Vec<f64>> {
        let mut rng = SplitMix64::new(seed_override.unwrap_or(self.seed));
        (0..samples)
            .map(|_| rng.sample_point(&self.domain))
            .collect()
    }
}

/// Everything evaluated at one point.
#[derive(Clone, Debug)]
pub struct PointFrame {
    pub point: Vec<f64>,
    pub alpha: f64,
    pub epsilon: f64,
    /// (0,2), symmetrized.
    pub g: TensorValue,
    /// (2,0).
    pub g_inv: TensorValue,
    /// [k][i][j] = d_k g_ij.
    pub dg: TensorValue,
    /// (1,1), [i][j] = J^i_j.
    pub j: TensorValue,
    /// [k][i][j] = d_k J^i_j.
    pub dj: TensorValue,
    /// Levi-Civita coefficients, [k][i][j] = Gamma^k_ij.
    pub gamma_g: TensorValue,
    /// [k][i][j] = (nabla_g J)^k_ij = ((nabla_{d_i} J) d_j)^k.
    pub nabla_g_j: TensorValue,
}

impl PointFrame {
    pub fn n(&self) -> usize {
        self.point.len()
    }
}

struct EvaluatedMatrix {
    value: Vec<f64>,    // [i*n + j]
    partial: Vec<f64>,  // [k][i][j] flattened as (k*n + i)*n + j
    asymmetry: f64,
}

fn eval_matrix(
    m: &[Vec<Expression>],
    point: &[f64],
    symmetrize: bool,
) -> Result<EvaluatedMatrix, ExprError> {
    let n = point.len();
    let mut value = vec![0.0; n * n];
    let mut partial = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let d = exprlang::eval_with_gradient(&m[i][j], point)?;
            value[i * n + j] = d.value;
            for k in 0..n {
                partial[(k * n + i) * n + j] = d.partials[k];
            }
        }
    }
    let mut asymmetry = 0.0f64;
    if symmetrize {
        for i in 0..n {
            for j in (i + 1)..n {
                asymmetry = asymmetry.max((value[i * n + j] - value[j * n + i]).abs());
                let avg = 0.5 * (value[i * n + j] + value[j * n + i]);
                value[i * n + j] = avg;
                value[j * n + i] = avg;
                for k in 0..n {
                    let a = partial[(k * n + i) * n + j];
                    let b = partial[(k * n + j) * n + i];
                    let avg = 0.5 * (a + b);
                    partial[(k * n + i) * n + j] = avg;
                    partial[(k * n + j) * n + i] = avg;
                }
            }
        }
    }
    Ok(EvaluatedMatrix {
        value,
        partial,
        asymmetry,
    })
}

/// Evaluate the full frame at `point`: fields, their partials via dual
/// numbers, the Levi-Civita coefficients
/// Gamma^k_ij = (1/2) g^km (d_i g_jm + d_j g_im - d_m g_ij),
/// and (nabla_g J)^k_ij = d_i J^k_j + Gamma^k_im J^m_j - Gamma^m_ij J^k_m.
pub fn frame_at(spec: &ManifoldSpec, point: &[f64]) -> Result<PointFrame, SpecError> {
    let n = spec.n();
    let wrap = |err: ExprError| SpecError::Eval {
        point: point.to_vec(),
        err,
    };
    let gm = eval_matrix(&spec.metric, point, true).map_err(wrap)?;
    let jm = eval_matrix(&spec.j, point, false).map_err(wrap)?;
    let det = det_matrix(n, &gm.value);
    if det.abs() <= DET_G_FLOOR {
        return Err(SpecError::DegenerateMetric {
            point: point.to_vec(),
            det: det.abs(),
        });
    }
    let g_inv_data = invert_matrix(n, &gm.value).ok_or(SpecError::DegenerateMetric {
        point: point.to_vec(),
        det: det.abs(),
    })?;

    let g = TensorValue::new(vec![Slot::Lower, Slot::Lower], n, gm.value).unwrap();
    let g_inv = TensorValue::new(vec![Slot::Upper, Slot::Upper], n, g_inv_data).unwrap();
    let dg = TensorValue::new(vec![Slot::Lower, Slot::Lower, Slot::Lower], n, gm.partial).unwrap();
    let j = TensorValue::new(vec![Slot::Upper, Slot::Lower], n, jm.value).unwrap();
    let dj = TensorValue::new(vec![Slot::Lower, Slot::Upper, Slot::Lower], n, jm.partial).unwrap();

    let mut gamma = TensorValue::zeros(vec![Slot::Upper, Slot::Lower, Slot::Lower], n);
    for k in 0..n {
        for i in 0..n {
            for jj in 0..n {
                let mut s = 0.0;
                for m in 0..n {
                    s += g_inv.get(&[k, m])
                        * (dg.get(&[i, jj, m]) + dg.get(&[jj, i, m]) - dg.get(&[m, i, jj]));
                }
                gamma.set(&[k, i, jj], 0.5 * s);
            }
        }
    }

    let mut nabla_j = TensorValue::zeros(vec![Slot::Upper, Slot::Lower, Slot::Lower], n);
    for k in 0..n {
        for i in 0..n {
            for jj in 0..n {
                let mut s = dj.get(&[i, k, jj]);
                for m in 0..n {
                    s += gamma.get(&[k, i, m]) * j.get(&[m, jj])
                        - gamma.get(&[m, i, jj]) * j.get(&[k, m]);
                }
                nabla_j.set(&[k, i, jj], s);
            }
        }
    }

    Ok(PointFrame {
        point: point.to_vec(),
        alpha: spec.alpha,
        epsilon: spec.epsilon,
        g,
        g_inv,
        dg,
        j,
        dj,
        gamma_g: gamma,
        nabla_g_j: nabla_j,
    })
}

/// Structural residuals over sampled points.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub spec_name: String,
    pub samples: usize,
    pub tol: f64,
    /// max |(J^2)^i_j - alpha delta^i_j|
    pub j_squared_residual: f64,
    /// max |J^m_i J^l_j g_ml - epsilon g_ij|
    pub compatibility_residual: f64,
    /// max |trace J|
    pub trace_residual: f64,
    /// max |g_ij - g_ji| as written, before symmetrization
    pub metric_symmetry_residual: f64,
    pub min_abs_det: f64,
    /// vacuously true unless epsilon = +1, where it means every sampled
    /// metric had all leading principal minors positive
    pub spd_ok: bool,
    pub trace_enforced: bool,
    pub warnings: Vec<String>,
    pub pass: bool,
}

/// As `validate_structure`, with the trace-free requirement made
/// optional: when `enforce_trace` is false a nonzero trace of J is still
/// reported but does not fail the verdict.
pub fn validate_structure_with(
    spec: &ManifoldSpec,
    samples: usize,
    tol: f64,
    enforce_trace: bool,
) -> Result<ValidationReport, SpecError> {
    let n = spec.n();
    let points = spec.sample_points(samples.max(1), None);
    let mut j_sq = 0.0f64;
    let mut compat = 0.0f64;
    let mut trace_r = 0.0f64;
    let mut asym = 0.0f64;
    let mut min_det = f64::INFINITY;
    let mut spd_ok = true;
    let mut warnings = Vec::new();
    for point in &points {
        let wrap = |err: ExprError| SpecError::Eval {
            point: point.clone(),
            err,
        };
        let gm = eval_matrix(&spec.metric, point, true).map_err(wrap)?;
        let jm = eval_matrix(&spec.j, point, false).map_err(wrap)?;
        asym = asym.max(gm.asymmetry);
        let det = det_matrix(n, &gm.value);
        min_det = min_det.min(det.abs());
        if spec.epsilon == 1.0 && !leading_minors_positive(n, &gm.value) {
            spd_ok = false;
        }
        let mut trace = 0.0;
        for i in 0..n {
            trace += jm.value[i * n + i];
            for jj in 0..n {
                let mut sq = 0.0;
                for m in 0..n {
                    sq += jm.value[i * n + m] * jm.value[m * n + jj];
                }
                let id = if i == jj { spec.alpha } else { 0.0 };
                j_sq = j_sq.max((sq - id).abs());
                let mut pulled = 0.0;
                for m in 0..n {
                    for l in 0..n {
                        pulled += jm.value[m * n + i] * jm.value[l * n + jj] * gm.value[m * n + l];
                    }
                }
                compat = compat.max((pulled - spec.epsilon * gm.value[i * n + jj]).abs());
            }
        }
        trace_r = trace_r.max(trace.abs());
    }
    if asym > 1e-12 {
        warnings.push(format!(
            "metric expression matrix is asymmetric as written (residual {asym:e}); it was symmetrized on evaluation"
        ));
    }
    if !enforce_trace && trace_r >= tol {
        warnings.push(format!(
            "trace J residual {trace_r:e} exceeds tol but trace enforcement is off"
        ));
    }
    let mut pass = j_sq < tol && compat < tol && asym < tol && min_det > DET_G_FLOOR && spd_ok;
    if enforce_trace {
        pass = pass && trace_r < tol;
    }
    Ok(ValidationReport {
        spec_name: spec.name.clone(),
        samples: points.len(),
        tol,
        j_squared_residual: j_sq,
        compatibility_residual: compat,
        trace_residual: trace_r,
        metric_symmetry_residual: asym,
        min_abs_det: min_det,
        spd_ok,
        trace_enforced: enforce_trace,
        warnings,
        pass,
    })
}

/// Check the defining algebraic conditions at sampled points: J^2 =
/// alpha Id, g(JX,JY) = epsilon g(X,Y), trace J = 0, symmetry and
/// nondegeneracy of g, and positive definiteness when epsilon = +1.
pub fn validate_structure(
    spec: &ManifoldSpec,
    samples: usize,
    tol: f64,
) -> Result<ValidationReport, SpecError> {
    validate_structure_with(spec, samples, tol, true)
}

/// Phi_ij = J^m_i g_mj, the bilinear form g(J., .); antisymmetric when
/// alpha*epsilon = -1, symmetric when alpha*epsilon = +1.
pub fn fundamental_tensor(frame: &PointFrame) -> TensorValue {
    let n = frame.n();
    TensorValue::from_fn(vec![Slot::Lower, Slot::Lower], n, |idx| {
        (0..n)
            .map(|m| frame.j.get(&[m, idx[0]]) * frame.g.get(&[m, idx[1]]))
            .sum()
    })
}

/// (nabla_g Phi)_ijk = g_mk (nabla_g J)^m_ij = g((nabla_{d_i} J) d_j, d_k).
pub fn nabla_g_phi(frame: &PointFrame) -> TensorValue {
    let n = frame.n();
    TensorValue::from_fn(vec![Slot::Lower, Slot::Lower, Slot::Lower], n, |idx| {
        (0..n)
            .map(|m| frame.g.get(&[m, idx[2]]) * frame.nabla_g_j.get(&[m, idx[0], idx[1]]))
            .sum()
    })
}

/// Nijenhuis tensor from nabla_g J:
/// N^k_ij = (nJ)^k_im J^m_j + J^m_i (nJ)^k_mj - (nJ)^k_jm J^m_i - J^m_j (nJ)^k_mi.
pub fn nijenhuis(frame: &PointFrame) -> TensorValue {
    let n = frame.n();
    let a = &frame.nabla_g_j;
    let j = &frame.j;
    TensorValue::from_fn(vec![Slot::Upper, Slot::Lower, Slot::Lower], n, |idx| {
        let (k, i, jj) = (idx[0], idx[1], idx[2]);
        (0..n)
            .map(|m| {
                a.get(&[k, i, m]) * j.get(&[m, jj]) + j.get(&[m, i]) * a.get(&[k, m, jj])
                    - a.get(&[k, jj, m]) * j.get(&[m, i])
                    - j.get(&[m, jj]) * a.get(&[k, m, i])
            })
            .sum()
    })
}

/// Connection-free Nijenhuis oracle from raw partials of J:
/// N^k_ij = J^m_i d_m J^k_j - J^m_j d_m J^k_i - J^k_m (d_i J^m_j - d_j J^m_i).
pub fn nijenhuis_bracket(frame: &PointFrame) -> TensorValue {
    let n = frame.n();
    let j = &frame.j;
    let dj = &frame.dj;
    TensorValue::from_fn(vec![Slot::Upper, Slot::Lower, Slot::Lower], n, |idx| {
        let (k, i, jj) = (idx[0], idx[1], idx[2]);
        (0..n)
            .map(|m| {
                j.get(&[m, i]) * dj.get(&[m, k, jj]) - j.get(&[m, jj]) * dj.get(&[m, k, i])
                    - j.get(&[k, m]) * (dj.get(&[i, m, jj]) - dj.get(&[jj, m, i]))
            })
            .sum()
    })
}

/// Second Nijenhuis tensor:
/// Nt^k_ij = (nJ)^k_im J^m_j + ae (J^m_i (nJ)^k_mj + (nJ)^k_jm J^m_i) + J^m_j (nJ)^k_mi
/// with ae = alpha*epsilon.
pub fn second_nijenhuis(frame: &PointFrame) -> TensorValue {
    let n = frame.n();
    let ae = frame.alpha * frame.epsilon;
    let a = &frame.nabla_g_j;
    let j = &frame.j;
    TensorValue::from_fn(vec![Slot::Upper, Slot::Lower, Slot::Lower], n, |idx| {
        let (k, i, jj) = (idx[0], idx[1], idx[2]);
        (0..n)
            .map(|m| {
                a.get(&[k, i, m]) * j.get(&[m, jj])
                    + ae * (j.get(&[m, i]) * a.get(&[k, m, jj]) + a.get(&[k, jj, m]) * j.get(&[m, i]))
                    + j.get(&[m, jj]) * a.get(&[k, m, i])
            })
            .sum()
    })
}

// ─── Bundled catalog ───

/// Names and JSON sources of the bundled example specs.
pub fn catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("flat_kahler", FLAT_KAHLER),
        ("flat_para_kahler", FLAT_PARA_KAHLER),
        ("flat_norden", FLAT_NORDEN),
        ("flat_product", FLAT_PRODUCT),
        ("norden2d", NORDEN2D),
        ("hermitian2d", HERMITIAN2D),
        ("hermitian4d", HERMITIAN4D),
        ("norden4d", NORDEN4D),
        ("para4d", PARA4D),
        ("product4d", PRODUCT4D),
    ]
}

/// Load a bundled spec by name.
pub fn catalog_spec(name: &str) -> Option<ManifoldSpec> {
    catalog()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, json)| load_spec(json.as_bytes()).expect("bundled spec must load"))
}

/// Every bundled spec, loaded.
pub fn catalog_specs() -> Vec<ManifoldSpec> {
    catalog()
        .into_iter()
        .map(|(_, json)| load_spec(json.as_bytes()).expect("bundled spec must load"))
        .collect()
}

const FLAT_KAHLER: &str = r#"{
  "name": "flat_kahler",
  "dimension": 2,
  "alpha": -1,
  "epsilon": 1,
  "coordinates": ["x1", "x2"],
  "metric": [["1", "0"], ["0", "1"]],
  "J": [["0", "-1"], ["1", "0"]],
  "domain": [[-1, 1], [-1, 1]],
  "seed": 0
}
"#;

const FLAT_PARA_KAHLER: &str = r#"{
  "name": "flat_para_kahler",
  "dimension": 2,
  "alpha": 1,
  "epsilon": -1,
  "coordinates": ["x1", "x2"],
  "metric": [["0", "1"], ["1", "0"]],
  "J": [["1", "0"], ["0", "-1"]],
  "domain": [[-1, 1], [-1, 1]],
  "seed": 0
}
"#;

const FLAT_NORDEN: &str = r#"{
  "name": "flat_norden",
  "dimension": 2,
  "alpha": -1,
  "epsilon": -1,
  "coordinates": ["x1", "x2"],
  "metric": [["1", "0"], ["0", "-1"]],
  "J": [["0", "-1"], ["1", "0"]],
  "domain": [[-1, 1], [-1, 1]],
  "seed": 0
}
"#;

const FLAT_PRODUCT: &str = r#"{
  "name": "flat_product",
  "dimension": 2,
  "alpha": 1,
  "epsilon": 1,
  "coordinates": ["x1", "x2"],
  "metric": [["1", "0"], ["0", "1"]],
  "J": [["1", "0"], ["0", "-1"]],
  "domain": [[-1, 1], [-1, 1]],
  "seed": 0
}
"#;

const NORDEN2D: &str = r#"{
  "name": "norden2d",
  "dimension": 2,
  "alpha": -1,
  "epsilon": -1,
  "coordinates": ["x1", "x2"],
  "metric": [["1", "0"], ["0", "-(1 + x1)^2"]],
  "J": [["0", "-(1 + x1)"], ["1/(1 + x1)", "0"]],
  "domain": [[-0.4, 0.4], [-0.4, 0.4]],
  "seed": 0
}
"#;

const HERMITIAN2D: &str = r#"{
  "name": "hermitian2d",
  "dimension": 2,
  "alpha": -1,
  "epsilon": 1,
  "coordinates": ["x1", "x2"],
  "metric": [["1", "0"], ["0", "(1 + x1)^2"]],
  "J": [["0", "-(1 + x1)"], ["1/(1 + x1)", "0"]],
  "domain": [[-0.4, 0.4], [-0.4, 0.4]],
  "seed": 0
}
"#;

const HERMITIAN4D: &str = r#"{
  "name": "hermitian4d",
  "dimension": 4,
  "alpha": -1,
  "epsilon": 1,
  "coordinates": ["x1", "x2", "x3", "x4"],
  "metric": [
    ["1", "0", "0", "0"],
    ["0", "(1 + x3)^2", "0", "0"],
    ["0", "0", "1", "0"],
    ["0", "0", "0", "(1 + x1)^2"]
  ],
  "J": [
    ["0", "-(1 + x3)", "0", "0"],
    ["1/(1 + x3)", "0", "0", "0"],
    ["0", "0", "0", "-(1 + x1)"],
    ["0", "0", "1/(1 + x1)", "0"]
  ],
  "domain": [[-0.4, 0.4], [-0.4, 0.4], [-0.4, 0.4], [-0.4, 0.4]],
  "seed": 0
}
"#;

const NORDEN4D: &str = r#"{
  "name": "norden4d",
  "dimension": 4,
  "alpha": -1,
  "epsilon": -1,
  "coordinates": ["x1", "x2", "x3", "x4"],
  "metric": [
    ["1", "0", "0", "0"],
    ["0", "-(1 + x3)^2", "0", "0"],
    ["0", "0", "1", "0"],
    ["0", "0", "0", "-(1 + x1)^2"]
  ],
  "J": [
    ["0", "-(1 + x3)", "0", "0"],
    ["1/(1 + x3)", "0", "0", "0"],
    ["0", "0", "0", "-(1 + x1)"],
    ["0", "0", "1/(1 + x1)", "0"]
  ],
  "domain": [[-0.4, 0.4], [-0.4, 0.4], [-0.4, 0.4], [-0.4, 0.4]],
  "seed": 0
}
"#;

const PARA4D: &str = r#"{
  "name": "para4d",
  "dimension": 4,
  "alpha": 1,
  "epsilon": -1,
  "coordinates": ["x1", "x2", "x3", "x4"],
  "metric": [
    ["1", "0", "0", "0"],
    ["0", "-(1 + x3)^2", "0", "0"],
    ["0", "0", "1", "0"],
    ["0", "0", "0", "-(1 + x1)^2"]
  ],
  "J": [
    ["0", "1 + x3", "0", "0"],
    ["1/(1 + x3)", "0", "0", "0"],
    ["0", "0", "0", "1 + x1"],
    ["0", "0", "1/(1 + x1)", "0"]
  ],
  "domain": [[-0.4, 0.4], [-0.4, 0.4], [-0.4, 0.4], [-0.4, 0.4]],
  "seed": 0
}
"#;

const PRODUCT4D: &str = r#"{
  "name": "product4d",
  "dimension": 4,
  "alpha": 1,
  "epsilon": 1,
  "coordinates": ["x1", "x2", "x3", "x4"],
  "metric": [
    ["1", "0", "0", "0"],
    ["0", "(1 + x3)^2", "0", "0"],
    ["0", "0", "1", "0"],
    ["0", "0", "0", "(1 + x1)^2"]
  ],
  "J": [
    ["0", "1 + x3", "0", "0"],
    ["1/(1 + x3)", "0", "0", "0"],
    ["0", "0", "0", "1 + x1"],
    ["0", "0", "1/(1 + x1)", "0"]
  ],
  "domain": [[-0.4, 0.4], [-0.4, 0.4], [-0.4, 0.4], [-0.4, 0.4]],
  "seed": 0
}
"#;

#[cfg(test)]
mod tests {
    use super::*;

    fn load(name: &str) -> ManifoldSpec {
        catalog_spec(name).unwrap()
    }

    #[test]
    fn load_flat_kahler_roundtrip() {
        let s = load("flat_kahler");
        assert_eq!(s.dimension, 2);
        assert_eq!(s.alpha, -1.0);
        assert_eq!(s.epsilon, 1.0);
        assert_eq!(s.coordinates, vec!["x1", "x2"]);
        assert_eq!(s.seed, 0);
    }

    #[test]
    fn load_rejects_bad_shapes_and_signs() {
        let wrong_shape = r#"{
          "name": "bad", "dimension": 2, "alpha": -1, "epsilon": 1,
          "coordinates": ["x1", "x2"],
          "metric": [["1", "0", "0"], ["0", "1", "0"]],
          "J": [["0", "-1"], ["1", "0"]],
          "domain": [[-1, 1], [-1, 1]]
        }"#;
        assert!(matches!(
            load_spec(wrong_shape.as_bytes()),
            Err(SpecError::Shape(_))
        ));
        let bad_sign = r#"{
          "name": "bad", "dimension": 2, "alpha": 2, "epsilon": 1,
          "coordinates": ["x1", "x2"],
          "metric": [["1", "0"], ["0", "1"]],
          "J": [["0", "-1"], ["1", "0"]],
          "domain": [[-1, 1], [-1, 1]]
        }"#;
        assert!(matches!(
            load_spec(bad_sign.as_bytes()),
            Err(SpecError::Signs { .. })
        ));
        assert!(matches!(
            load_spec(b"not json"),
            Err(SpecError::Json(_))
        ));
    }

    #[test]
    fn load_names_offending_entry() {
        let bad_entry = r#"{
          "name": "bad", "dimension": 2, "alpha": -1, "epsilon": 1,
          "coordinates": ["x1", "x2"],
          "metric": [["x9", "0"], ["0", "1"]],
          "J": [["0", "-1"], ["1", "0"]],
          "domain": [[-1, 1], [-1, 1]]
        }"#;
        match load_spec(bad_entry.as_bytes()) {
            Err(SpecError::Entry { place, .. }) => assert_eq!(place, "metric entry (1,1)"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validate_flat_models_exactly() {
        for name in ["flat_kahler", "flat_para_kahler", "flat_norden", "flat_product"] {
            let r = validate_structure(&load(name), 50, 1e-10).unwrap();
            assert!(r.pass, "{name}: {r:?}");
            assert_eq!(r.j_squared_residual, 0.0);
            assert_eq!(r.compatibility_residual, 0.0);
            assert_eq!(r.trace_residual, 0.0);
            assert_eq!(r.metric_symmetry_residual, 0.0);
        }
    }

    #[test]
    fn validate_whole_catalog() {
        for spec in catalog_specs() {
            let r = validate_structure(&spec, 100, 1e-10).unwrap();
            assert!(r.pass, "{}: {r:?}", spec.name);
        }
    }

    #[test]
    fn validate_detects_wrong_epsilon() {
        // Flat Kähler fields with epsilon mislabeled as -1: the
        // compatibility defect is |g - (-g)| = 2.
        let flipped = r#"{
          "name": "flipped", "dimension": 2, "alpha": -1, "epsilon": -1,
          "coordinates": ["x1", "x2"],
          "metric": [["1", "0"], ["0", "1"]],
          "J": [["0", "-1"], ["1", "0"]],
          "domain": [[-1, 1], [-1, 1]]
        }"#;
        let spec = load_spec(flipped.as_bytes()).unwrap();
        let r = validate_structure(&spec, 10, 1e-10).unwrap();
        assert!(!r.pass);
        assert_eq!(r.compatibility_residual, 2.0);
    }

    #[test]
    fn validate_trace_policy() {
        // J = Id satisfies J^2 = Id and g(J., J.) = g but has trace 2.
        let traced = r#"{
          "name": "traced", "dimension": 2, "alpha": 1, "epsilon": 1,
          "coordinates": ["x1", "x2"],
          "metric": [["1", "0"], ["0", "1"]],
          "J": [["1", "0"], ["0", "1"]],
          "domain": [[-1, 1], [-1, 1]]
        }"#;
        let spec = load_spec(traced.as_bytes()).unwrap();
        let strict = validate_structure(&spec, 10, 1e-10).unwrap();
        assert!(!strict.pass);
        assert_eq!(strict.trace_residual, 2.0);
        let lax = validate_structure_with(&spec, 10, 1e-10, false).unwrap();
        assert!(lax.pass);
        assert!(!lax.warnings.is_empty());
    }

    #[test]
    fn validate_spd_check_for_positive_epsilon() {
        let indefinite = r#"{
          "name": "bad_metric", "dimension": 2, "alpha": 1, "epsilon": 1,
          "coordinates": ["x1", "x2"],
          "metric": [["1", "0"], ["0", "-1"]],
          "J": [["1", "0"], ["0", "-1"]],
          "domain": [[-1, 1], [-1, 1]]
        }"#;
        let spec = load_spec(indefinite.as_bytes()).unwrap();
        let r = validate_structure(&spec, 10, 1e-10).unwrap();
        assert!(!r.spd_ok);
        assert!(!r.pass);
    }

    #[test]
    fn frame_flat_models_have_no_curving() {
        for name in ["flat_kahler", "flat_para_kahler", "flat_norden", "flat_product"] {
            let spec = load(name);
            for p in spec.sample_points(10, None) {
                let f = frame_at(&spec, &p).unwrap();
                assert_eq!(f.gamma_g.max_abs(), 0.0, "{name}");
                assert_eq!(f.nabla_g_j.max_abs(), 0.0, "{name}");
            }
        }
    }

    #[test]
    fn frame_norden2d_origin_frozen_values() {
        let spec = load("norden2d");
        let f = frame_at(&spec, &[0.0, 0.0]).unwrap();
        // Christoffel symbols at the origin.
        let mut expected_gamma = TensorValue::zeros(vec![Slot::Upper, Slot::Lower, Slot::Lower], 2);
        expected_gamma.set(&[1, 0, 1], 1.0);
        expected_gamma.set(&[1, 1, 0], 1.0);
        expected_gamma.set(&[0, 1, 1], 1.0);
        assert!(f.gamma_g.max_abs_diff(&expected_gamma) < 1e-14);
        // Covariant derivative of J at the origin.
        let mut expected_nj = TensorValue::zeros(vec![Slot::Upper, Slot::Lower, Slot::Lower], 2);
        expected_nj.set(&[0, 1, 0], 2.0);
        expected_nj.set(&[1, 1, 1], -2.0);
        assert!(f.nabla_g_j.max_abs_diff(&expected_nj) < 1e-14);
    }

    /// Christoffel symbols recomputed from central finite differences of
    /// the evaluated metric, independent of the dual-number machinery.
    #[test]
    fn frame_christoffel_matches_finite_difference_oracle() {
        for name in ["norden2d", "hermitian2d", "hermitian4d", "para4d"] {
            let spec = load(name);
            for p in spec.sample_points(5, Some(17)) {
                let f = frame_at(&spec, &p).unwrap();
                let n = spec.n();
                let h = 1e-6;
                // Numeric partials of g.
                let g_at = |q: &[f64]| eval_matrix(&spec.metric, q, true).unwrap().value;
                let mut dg = vec![0.0; n * n * n];
                for k in 0..n {
                    let mut hi = p.clone();
                    let mut lo = p.clone();
                    hi[k] += h;
                    lo[k] -= h;
                    let (gh, gl) = (g_at(&hi), g_at(&lo));
                    for ij in 0..n * n {
                        dg[k * n * n + ij] = (gh[ij] - gl[ij]) / (2.0 * h);
                    }
                }
                let ginv = invert_matrix(n, &g_at(&p)).unwrap();
                let oracle = TensorValue::from_fn(
                    vec![Slot::Upper, Slot::Lower, Slot::Lower],
                    n,
                    |idx| {
                        let (k, i, j) = (idx[0], idx[1], idx[2]);
                        (0..n)
                            .map(|m| {
                                0.5 * ginv[k * n + m]
                                    * (dg[i * n * n + j * n + m] + dg[j * n * n + i * n + m]
                                        - dg[m * n * n + i * n + j])
                            })
                            .sum::<f64>()
                    },
                );
                assert!(
                    f.gamma_g.max_abs_diff(&oracle) < 1e-7,
                    "{name} at {p:?}"
                );
            }
        }
    }

    #[test]
    fn frame_metricity_and_symmetry() {
        for spec in catalog_specs() {
            let n = spec.n();
            for p in spec.sample_points(16, None) {
                let f = frame_at(&spec, &p).unwrap();
                let mut worst = 0.0f64;
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            // Symmetry of the lower indices.
                            worst = worst
                                .max((f.gamma_g.get(&[k, i, j]) - f.gamma_g.get(&[k, j, i])).abs());
                            // Metricity: d_k g_ij = G^m_ki g_mj + G^m_kj g_im.
                            let mut s = f.dg.get(&[k, i, j]);
                            for m in 0..n {
                                s -= f.gamma_g.get(&[m, k, i]) * f.g.get(&[m, j])
                                    + f.gamma_g.get(&[m, k, j]) * f.g.get(&[i, m]);
                            }
                            worst = worst.max(s.abs());
                        }
                    }
                }
                assert!(worst < 1e-10, "{} at {p:?}: {worst}", spec.name);
            }
        }
    }

    #[test]
    fn hermitian2d_is_kahler_type() {
        let spec = load("hermitian2d");
        for p in spec.sample_points(100, None) {
            let f = frame_at(&spec, &p).unwrap();
            assert!(f.nabla_g_j.max_abs() < 1e-13, "at {p:?}");
        }
    }

    #[test]
    fn fundamental_tensor_flat_examples() {
        let f = frame_at(&load("flat_kahler"), &[0.3, -0.2]).unwrap();
        let phi = fundamental_tensor(&f);
        assert_eq!(phi.get(&[0, 1]), 1.0);
        assert_eq!(phi.get(&[1, 0]), -1.0);
        assert_eq!(phi.get(&[0, 0]), 0.0);
        assert_eq!(phi.get(&[1, 1]), 0.0);

        let f = frame_at(&load("flat_product"), &[0.0, 0.0]).unwrap();
        let phi = fundamental_tensor(&f);
        assert_eq!(phi.get(&[0, 0]), 1.0);
        assert_eq!(phi.get(&[1, 1]), -1.0);
        assert_eq!(phi.get(&[0, 1]), 0.0);
    }

    #[test]
    fn fundamental_tensor_norden2d_origin() {
        let f = frame_at(&load("norden2d"), &[0.0, 0.0]).unwrap();
        let phi = fundamental_tensor(&f);
        assert!((phi.get(&[0, 1]) + 1.0).abs() < 1e-14);
        assert!((phi.get(&[1, 0]) + 1.0).abs() < 1e-14);
        assert_eq!(phi.get(&[0, 0]), 0.0);
        assert_eq!(phi.get(&[1, 1]), 0.0);
    }

    #[test]
    fn fundamental_tensor_symmetry_matches_sign() {
        for spec in catalog_specs() {
            let ae = spec.alpha * spec.epsilon;
            for p in spec.sample_points(16, None) {
                let f = frame_at(&spec, &p).unwrap();
                let phi = fundamental_tensor(&f);
                let n = spec.n();
                for i in 0..n {
                    for j in 0..n {
                        let d = phi.get(&[i, j]) - ae * phi.get(&[j, i]);
                        assert!(d.abs() < 1e-12, "{} at {p:?}", spec.name);
                    }
                }
            }
        }
    }

    #[test]
    fn nabla_g_phi_is_lowered_nabla_g_j() {
        let spec = load("norden2d");
        let f = frame_at(&spec, &[0.0, 0.0]).unwrap();
        let np = nabla_g_phi(&f);
        // Nonzero exactly where nabla_g J is, lowered by g: components
        // (2,1,1) and (2,2,2) in 1-based labels.
        assert!((np.get(&[1, 0, 0]) - 2.0).abs() < 1e-14);
        assert!((np.get(&[1, 1, 1]) - 2.0).abs() < 1e-14);
        let mut rest = 0.0f64;
        for idx in crate::tensor::indices(3, 2) {
            if idx != [1, 0, 0] && idx != [1, 1, 1] {
                rest = rest.max(np.get(&idx).abs());
            }
        }
        assert!(rest < 1e-14);
        // And the flats vanish.
        let f = frame_at(&load("flat_norden"), &[0.1, 0.9]).unwrap();
        assert_eq!(nabla_g_phi(&f).max_abs(), 0.0);
    }

    #[test]
    fn nijenhuis_vanishes_in_dimension_two_complex_case() {
        for name in ["norden2d", "hermitian2d", "flat_kahler", "flat_norden"] {
            let spec = load(name);
            for p in spec.sample_points(32, None) {
                let f = frame_at(&spec, &p).unwrap();
                assert!(nijenhuis(&f).max_abs() < 1e-12, "{name} at {p:?}");
                assert!(nijenhuis_bracket(&f).max_abs() < 1e-12, "{name} at {p:?}");
            }
        }
    }

    #[test]
    fn nijenhuis_hermitian4d_origin_frozen_values() {
        let spec = load("hermitian4d");
        let f = frame_at(&spec, &[0.0, 0.0, 0.0, 0.0]).unwrap();
        for nj in [nijenhuis(&f), nijenhuis_bracket(&f)] {
            assert!((nj.get(&[0, 0, 2]) - 1.0).abs() < 1e-13);
            assert!((nj.get(&[2, 0, 2]) + 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn nijenhuis_two_routes_agree_everywhere() {
        for spec in catalog_specs() {
            for p in spec.sample_points(64, None) {
                let f = frame_at(&spec, &p).unwrap();
                let d = nijenhuis(&f).max_abs_diff(&nijenhuis_bracket(&f));
                assert!(d < 1e-7, "{} at {p:?}: {d}", spec.name);
            }
        }
    }

    #[test]
    fn second_nijenhuis_norden2d_origin_frozen_value() {
        let f = frame_at(&load("norden2d"), &[0.0, 0.0]).unwrap();
        let nt = second_nijenhuis(&f);
        assert!((nt.get(&[0, 0, 0]) - 4.0).abs() < 1e-13);
        // And the Kähler-type charts kill it.
        let f = frame_at(&load("hermitian2d"), &[0.2, -0.1]).unwrap();
        assert!(second_nijenhuis(&f).max_abs() < 1e-13);
        let f = frame_at(&load("flat_product"), &[0.2, -0.1]).unwrap();
        assert_eq!(second_nijenhuis(&f).max_abs(), 0.0);
    }

    #[test]
    fn nabla_j_relations_hold_on_catalog() {
        // (nabla_X J)JY = -J (nabla_X J)Y and the three metric pairings.
        for spec in catalog_specs() {
            let ae = spec.alpha * spec.epsilon;
            let n = spec.n();
            for p in spec.sample_points(16, None) {
                let f = frame_at(&spec, &p).unwrap();
                let a = &f.nabla_g_j;
                let j = &f.j;
                let g = &f.g;
                let mut worst = 0.0f64;
                for k in 0..n {
                    for i in 0..n {
                        for y in 0..n {
                            let mut lhs = 0.0;
                            let mut rhs = 0.0;
                            for m in 0..n {
                                lhs += a.get(&[k, i, m]) * j.get(&[m, y]);
                                rhs -= j.get(&[k, m]) * a.get(&[m, i, y]);
                            }
                            worst = worst.max((lhs - rhs).abs());
                        }
                    }
                }
                let pair = |x: usize, i: usize, y: usize| -> f64 {
                    // g((nabla_{d_i} J) d_y, d_x)
                    (0..n).map(|m| g.get(&[m, x]) * a.get(&[m, i, y])).sum()
                };
                let jpair = |x: usize, i: usize, y: usize| -> f64 {
                    // g((nabla_{d_i} J) J d_y, d_x)
                    (0..n)
                        .map(|m| {
                            (0..n)
                                .map(|q| g.get(&[m, x]) * a.get(&[m, i, q]) * j.get(&[q, y]))
                                .sum::<f64>()
                        })
                        .sum()
                };
                for i in 0..n {
                    for y in 0..n {
                        for z in 0..n {
                            worst = worst.max((pair(z, i, y) - ae * pair(y, i, z)).abs());
                            let jz: f64 =
                                (0..n).map(|m| {
                                    (0..n)
                                        .map(|q| {
                                            g.get(&[m, q]) * j.get(&[q, z]) * a.get(&[m, i, y])
                                        })
                                        .sum::<f64>()
                                })
                                .sum();
                            worst = worst.max((jpair(z, i, y) + ae * jz).abs());
                            worst = worst.max((jpair(z, i, y) + jpair(y, i, z)).abs());
                        }
                    }
                }
                assert!(worst < 1e-11, "{} at {p:?}: {worst}", spec.name);
            }
        }
    }

    #[test]
    fn j_metric_adjoint_relation() {
        // g(JX, Y) = alpha*epsilon g(X, JY) componentwise.
        for spec in catalog_specs() {
            let ae = spec.alpha * spec.epsilon;
            let n = spec.n();
            for p in spec.sample_points(16, None) {
                let f = frame_at(&spec, &p).unwrap();
                let mut worst = 0.0f64;
                for i in 0..n {
                    for j in 0..n {
                        let lhs: f64 =
                            (0..n).map(|m| f.j.get(&[m, i]) * f.g.get(&[m, j])).sum();
                        let rhs: f64 =
                            (0..n).map(|m| f.j.get(&[m, j]) * f.g.get(&[i, m])).sum();
                        worst = worst.max((lhs - ae * rhs).abs());
                    }
                }
                assert!(worst < 1e-12, "{} at {p:?}", spec.name);
            }
        }
    }

    #[test]
    fn degenerate_metric_is_an_error() {
        let degenerate = r#"{
          "name": "deg", "dimension": 2, "alpha": 1, "epsilon": -1,
          "coordinates": ["x1", "x2"],
          "metric": [["x1", "0"], ["0", "x1"]],
          "J": [["1", "0"], ["0", "-1"]],
          "domain": [[-1, 1], [-1, 1]]
        }"#;
        let spec = load_spec(degenerate.as_bytes()).unwrap();
        assert!(matches!(
            frame_at(&spec, &[0.0, 0.5]),
            Err(SpecError::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn asymmetric_metric_symmetrized_with_warning() {
        let asym = r#"{
          "name": "asym", "dimension": 2, "alpha": 1, "epsilon": -1,
          "coordinates": ["x1", "x2"],
          "metric": [["0", "1.0001"], ["0.9999", "0"]],
          "J": [["1", "0"], ["0", "-1"]],
          "domain": [[-1, 1], [-1, 1]]
        }"#;
        let spec = load_spec(asym.as_bytes()).unwrap();
        let f = frame_at(&spec, &[0.0, 0.0]).unwrap();
        assert_eq!(f.g.get(&[0, 1]), 1.0);
        assert_eq!(f.g.get(&[1, 0]), 1.0);
        let r = validate_structure(&spec, 4, 1e-10).unwrap();
        assert!(!r.warnings.is_empty());
        assert!((r.metric_symmetry_residual - 2e-4).abs() < 1e-12);
        assert!(!r.pass);
    }

    #[test]
    fn sampling_respects_seed_override() {
        let spec = load("norden2d");
        let a = spec.sample_points(5, None);
        let b = spec.sample_points(5, Some(0));
        assert_eq!(a, b);
        let c = spec.sample_points(5, Some(1));
        assert_ne!(a, c);
    }
}
