//! Quasiconformality of the Gauss map of two-dimensional p-minimal surfaces.
//!
//! The differential of the Gauss map is the shape operator, so its distortion
//! at a node is the ratio of the principal curvatures in absolute value. On a
//! p-minimal surface `λ1 = -λ2 q(ψ)` where `ψ` is the angle of `e^T` in the
//! principal frame, hence `λ1 λ2 < 0` and the distortion is at most
//! `max(p - 1, 1/(p - 1))`.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geom::Point;
use crate::io::write_table;
use crate::profile::PExponent;
use crate::report::{json_f64, CheckReport};
use crate::surface::{curvature_at, CurvatureData, Patch, CRITICAL_TOL};

pub const GAUSS_MAP_CHECK: &str = "gauss-map";
pub const GAUSS_MAP_STATEMENT: &str = "lambda1 lambda2 < 0 and max|lambda|/min|lambda| <= max(p-1, 1/(p-1))";

/// `max(p - 1, 1/(p - 1))`.
#[allow(non_snake_case)]
pub fn K_bound(p: PExponent) -> f64 {
    let q = p.value() - 1.0;
    q.max(1.0 / q)
}

/// `(1 + (p-2) sin^2 ψ) / (1 + (p-2) cos^2 ψ)`.
pub fn q_of_psi(p: PExponent, psi: f64) -> f64 {
    let c = p.value() - 2.0;
    let (s, co) = psi.sin_cos();
    (1.0 + c * s * s) / (1.0 + c * co * co)
}

/// Distortion of the Gauss map at a point with principal curvatures `λ1, λ2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Distortion {
    Finite(f64),
    /// One principal curvature vanishes, the other does not.
    Unbounded,
    /// Both vanish (planar point).
    Undefined,
}

impl Distortion {
    /// `+∞` for unbounded, NaN for undefined.
    pub fn value(self) -> f64 {
        match self {
            Distortion::Finite(v) => v,
            Distortion::Unbounded => f64::INFINITY,
            Distortion::Undefined => f64::NAN,
        }
    }
}

pub fn distortion_at(lambda1: f64, lambda2: f64) -> Distortion {
    let (a, b) = (lambda1.abs(), lambda2.abs());
    let (hi, lo) = (a.max(b), a.min(b));
    if hi == 0.0 {
        Distortion::Undefined
    } else if lo == 0.0 {
        Distortion::Unbounded
    } else {
        Distortion::Finite(hi / lo)
    }
}

/// Per-node data for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionSample {
    pub node: Vec<usize>,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Angle of `e^T / |e^T|` from the first principal direction, in `[0, 2π)`.
    pub psi: f64,
    pub k_m: f64,
    pub jacobian: f64,
}

pub fn write_distortion_csv(samples: &[DistortionSample], path: &Path) -> Result<()> {
    let header: Vec<String> =
        ["i", "j", "lambda1", "lambda2", "psi", "K_m", "jacobian"].iter().map(|s| s.to_string()).collect();
    let rows = samples.iter().map(|s| {
        vec![s.node[0] as f64, s.node[1] as f64, s.lambda1, s.lambda2, s.psi, s.k_m, s.jacobian]
    });
    write_table(path, &header, rows)
}

/// Settings of [`verify_theorem1`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaussMapOptions {
    /// `C` in `slack = C (max normalized defect + h^2)`.
    pub slack_constant: f64,
    /// Nodes with `|A| <= planar_fraction * max |A|` are skipped as planar.
    pub planar_fraction: f64,
    /// Largest admissible `|H + (p-2) k_e| / |A|` over the patch.
    pub minimality_threshold: f64,
}

impl Default for GaussMapOptions {
    fn default() -> Self {
        GaussMapOptions { slack_constant: 10.0, planar_fraction: 1e-7, minimality_threshold: 1e-2 }
    }
}

struct NodeData {
    node: Vec<usize>,
    data: CurvatureData,
    defect: f64,
    psi: f64,
}

fn node_data(patch: &Patch, node: Vec<usize>, e: &Point, p: PExponent) -> Result<Option<NodeData>> {
    let data = curvature_at(patch, &node, e)?;
    let len = data.e_tangent.norm();
    if len <= CRITICAL_TOL {
        return Ok(None);
    }
    let t = data.e_tangent.scale(1.0 / len);
    let c1 = t.dot(&data.principal_directions[0]);
    let c2 = t.dot(&data.principal_directions[1]);
    let psi = c2.atan2(c1).rem_euclid(std::f64::consts::TAU);
    let k_e = data.principal[0] * c1 * c1 + data.principal[1] * c2 * c2;
    let defect = data.mean + (p.value() - 2.0) * k_e;
    Ok(Some(NodeData { node, data, defect, psi }))
}

/// Checks the sign of the Gauss-map Jacobian and the distortion bound at
/// every interior, non-critical, non-planar node of a two-dimensional patch.
///
/// Fails with [`Error::Precondition`] when the patch is not p-minimal to
/// within `options.minimality_threshold`.
pub fn verify_theorem1(
    patch: &Patch,
    p: PExponent,
    e: &Point,
    options: &GaussMapOptions,
) -> Result<(CheckReport, Vec<DistortionSample>)> {
    if patch.dim() != 2 {
        return domain("the Gauss-map check applies to two-dimensional surfaces");
    }
    let nodes = patch.interior_nodes(1);
    let collected: Vec<Result<Option<NodeData>>> =
        nodes.into_par_iter().map(|node| node_data(patch, node, e, p)).collect();
    let mut all = Vec::new();
    let mut critical = 0usize;
    for item in collected {
        match item? {
            Some(d) => all.push(d),
            None => critical += 1,
        }
    }
    let scale = all.iter().map(|d| d.data.shape_norm()).fold(0.0, f64::max);
    let planar_cut = options.planar_fraction * scale;
    let (curved, planar): (Vec<NodeData>, Vec<NodeData>) =
        all.into_iter().partition(|d| scale > 0.0 && d.data.shape_norm() > planar_cut);

    let mut worst_defect = 0.0_f64;
    let mut worst_node = Vec::new();
    for d in &curved {
        let r = d.defect.abs() / d.data.shape_norm();
        if r > worst_defect {
            worst_defect = r;
            worst_node = d.node.clone();
        }
    }
    if worst_defect > options.minimality_threshold {
        return Err(Error::Precondition {
            message: format!(
                "surface is not p-minimal: |H + (p-2) k_e| / |A| reaches {worst_defect:e} (threshold {:e})",
                options.minimality_threshold
            ),
            max_residual: worst_defect,
            worst_node,
        });
    }

    let h = patch.h();
    let slack = options.slack_constant * (worst_defect + h * h);
    let bound = K_bound(p);
    let mut samples = Vec::with_capacity(curved.len());
    let mut max_k = 0.0_f64;
    let mut max_jac = f64::NEG_INFINITY;
    let mut worst_relation = 0.0_f64;
    let mut violation = f64::NEG_INFINITY;
    for d in &curved {
        let (l1, l2) = (d.data.principal[0], d.data.principal[1]);
        let norm = d.data.shape_norm();
        let k_m = distortion_at(l1, l2).value();
        let jac = l1 * l2;
        max_k = max_k.max(k_m);
        max_jac = max_jac.max(jac / (norm * norm));
        worst_relation = worst_relation.max((l1 + l2 * q_of_psi(p, d.psi)).abs() / norm);
        violation = violation.max(k_m - bound).max(jac / (norm * norm));
        samples.push(DistortionSample {
            node: d.node.clone(),
            lambda1: l1,
            lambda2: l2,
            psi: d.psi,
            k_m,
            jacobian: jac,
        });
    }
    if curved.is_empty() {
        let report = CheckReport::skipped(GAUSS_MAP_CHECK, GAUSS_MAP_STATEMENT, "no curved interior nodes")
            .with("planar_nodes", planar.len())
            .with("critical_nodes", critical);
        return Ok((report, samples));
    }
    let report = CheckReport::decided(GAUSS_MAP_CHECK, GAUSS_MAP_STATEMENT, violation, slack)
        .with("p", p.value())
        .with("K_bound", bound)
        .with("max_K_m", json_f64(max_k))
        .with("max_normalized_jacobian", json_f64(max_jac))
        .with("max_normalized_defect", worst_defect)
        .with("max_relation_defect", worst_relation)
        .with("nodes_checked", curved.len())
        .with("planar_nodes", planar.len())
        .with("critical_nodes", critical);
    Ok((report, samples))
}
