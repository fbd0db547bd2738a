//! Sampled phase-plane figures: the classical ellipse, the discrete orbits
//! `S¹_N = {q² + p² = 2N + 1}`, confocal phase-cell ellipses and the
//! world-sheet cylinders `S¹_N × [t_min, t_max]`.

use std::f64::consts::TAU;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oscillator::{csv_error, PhysicalConstants};

pub const DEFAULT_ANGULAR_SAMPLES: usize = 256;
pub const DEFAULT_TIME_SAMPLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitKind {
    Ellipse,
    Circle,
    Cylinder,
}

impl OrbitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ellipse => "ellipse",
            Self::Circle => "circle",
            Self::Cylinder => "cylinder",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitPoint {
    pub q: f64,
    pub p: f64,
    pub t: Option<f64>,
}

/// Point set on the level set `(1/2)[(l/ħ)² p² + (q/l)²] = level`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitGeometry {
    kind: OrbitKind,
    n: Option<usize>,
    level: f64,
    constants: PhysicalConstants,
    points: Vec<OrbitPoint>,
}

/// Parameters of one object, without its points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometrySummary {
    pub kind: OrbitKind,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub level: f64,
    pub q_semi_axis: f64,
    pub p_semi_axis: f64,
    pub radius: Option<f64>,
    pub points: usize,
}

impl OrbitGeometry {
    pub fn kind(&self) -> OrbitKind {
        self.kind
    }

    pub fn n(&self) -> Option<usize> {
        self.n
    }

    /// `E / ħν` of the level set.
    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn points(&self) -> &[OrbitPoint] {
        &self.points
    }

    /// `(q_max, p_max) = (l √(2E), (ħ/l) √(2E))`.
    pub fn semi_axes(&self) -> (f64, f64) {
        let root = (2.0 * self.level).sqrt();
        (self.constants.l() * root, self.constants.hbar() / self.constants.l() * root)
    }

    /// Radius of a circular orbit; `None` when the semi-axes differ.
    pub fn radius(&self) -> Option<f64> {
        let (a, b) = self.semi_axes();
        (a == b).then_some(a)
    }

    /// Largest deviation of the sampled points from the level-set equation.
    pub fn level_set_residual(&self) -> f64 {
        let (l, hbar) = (self.constants.l(), self.constants.hbar());
        self.points
            .iter()
            .map(|pt| (0.5 * ((l / hbar * pt.p).powi(2) + (pt.q / l).powi(2)) - self.level).abs())
            .fold(0.0, f64::max)
    }

    pub fn summary(&self) -> GeometrySummary {
        let (q_semi_axis, p_semi_axis) = self.semi_axes();
        GeometrySummary {
            kind: self.kind,
            n: self.n,
            level: self.level,
            q_semi_axis,
            p_semi_axis,
            radius: self.radius(),
            points: self.points.len(),
        }
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 3 {
        return Err(Error::Domain(format!("need at least 3 angular samples, got {samples}")));
    }
    Ok(())
}

fn ring(level: f64, constants: &PhysicalConstants, samples: usize, t: Option<f64>) -> impl Iterator<Item = OrbitPoint> {
    let root = (2.0 * level).sqrt();
    let (q_max, p_max) = (constants.l() * root, constants.hbar() / constants.l() * root);
    (0..samples).map(move |k| {
        let theta = TAU * k as f64 / samples as f64;
        OrbitPoint {
            q: q_max * theta.cos(),
            p: p_max * theta.sin(),
            t,
        }
    })
}

/// Classical trajectory at energy `E = e_over_hnu · ħν`.
pub fn classical_ellipse(e_over_hnu: f64, constants: &PhysicalConstants, samples: usize) -> Result<OrbitGeometry> {
    if !(e_over_hnu.is_finite() && e_over_hnu > 0.0) {
        return Err(Error::Domain(format!("energy must be positive, got {e_over_hnu}")));
    }
    check_samples(samples)?;
    Ok(OrbitGeometry {
        kind: OrbitKind::Ellipse,
        n: None,
        level: e_over_hnu,
        constants: *constants,
        points: ring(e_over_hnu, constants, samples, None).collect(),
    })
}

/// `S¹_N`, radius `√(2N + 1)`.
pub fn orbit_circle(n: usize, samples: usize) -> Result<OrbitGeometry> {
    check_samples(samples)?;
    let constants = PhysicalConstants::fundamental();
    let level = n as f64 + 0.5;
    Ok(OrbitGeometry {
        kind: OrbitKind::Circle,
        n: Some(n),
        level,
        constants,
        points: ring(level, &constants, samples, None).collect(),
    })
}

/// One ellipse per level `N + 1/2`, sampled with `samples` points each.
pub fn confocal_phase_cells(
    n_list: &[usize],
    constants: &PhysicalConstants,
    samples: usize,
) -> Result<Vec<OrbitGeometry>> {
    if n_list.is_empty() {
        return Err(Error::Domain("phase-cell list is empty".into()));
    }
    check_samples(samples)?;
    Ok(n_list
        .iter()
        .map(|&n| {
            let level = n as f64 + 0.5;
            OrbitGeometry {
                kind: OrbitKind::Ellipse,
                n: Some(n),
                level,
                constants: *constants,
                points: ring(level, constants, samples, None).collect(),
            }
        })
        .collect())
}

/// `S¹_N × [t_min, t_max]` on a `samples_theta × samples_t` grid, time
/// varying slowest.
pub fn worldsheet_cylinder(
    n: usize,
    t_min: f64,
    t_max: f64,
    samples_theta: usize,
    samples_t: usize,
) -> Result<OrbitGeometry> {
    if !(t_min.is_finite() && t_max.is_finite() && t_min < t_max) {
        return Err(Error::Domain(format!("degenerate time interval [{t_min}, {t_max}]")));
    }
    check_samples(samples_theta)?;
    if samples_t < 2 {
        return Err(Error::Domain(format!("need at least 2 time samples, got {samples_t}")));
    }
    let constants = PhysicalConstants::fundamental();
    let level = n as f64 + 0.5;
    let points = (0..samples_t)
        .flat_map(|j| {
            let t = t_min + (t_max - t_min) * j as f64 / (samples_t - 1) as f64;
            ring(level, &constants, samples_theta, Some(t))
        })
        .collect();
    Ok(OrbitGeometry {
        kind: OrbitKind::Cylinder,
        n: Some(n),
        level,
        constants,
        points,
    })
}

/// CSV with header `kind,N,q,p,t`; `N` and `t` are empty where absent.
pub fn write_geometry_csv<W: Write>(out: W, geometries: &[OrbitGeometry]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["kind", "N", "q", "p", "t"]).map_err(csv_error)?;
    for g in geometries {
        let n = g.n.map(|n| n.to_string()).unwrap_or_default();
        for pt in &g.points {
            writer
                .write_record([
                    g.kind.as_str().to_string(),
                    n.clone(),
                    format!("{:.17e}", pt.q),
                    format!("{:.17e}", pt.p),
                    pt.t.map(|t| format!("{t:.17e}")).unwrap_or_default(),
                ])
                .map_err(csv_error)?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// CSV with header `kind,N,level,q_semi_axis,p_semi_axis,radius,points`.
pub fn write_summary_csv<W: Write>(out: W, geometries: &[OrbitGeometry]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer
        .write_record(["kind", "N", "level", "q_semi_axis", "p_semi_axis", "radius", "points"])
        .map_err(csv_error)?;
    for g in geometries {
        let s = g.summary();
        writer
            .write_record([
                s.kind.as_str().to_string(),
                s.n.map(|n| n.to_string()).unwrap_or_default(),
                format!("{:.17e}", s.level),
                format!("{:.17e}", s.q_semi_axis),
                format!("{:.17e}", s.p_semi_axis),
                s.radius.map(|r| format!("{r:.17e}")).unwrap_or_default(),
                s.points.to_string(),
            ])
            .map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}
