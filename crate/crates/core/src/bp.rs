//! Belief propagation on cones and the Bethe approximation.
//!
//! Every edge carries two messages: `m_{v→w}` in the edge cone and `m_{w→v}`
//! in its dual. A sweep first recomputes every `w → v` message from the
//! previous `v → w` messages, then every `v → w` message from the fresh
//! `w → v` ones:
//!
//! ```text
//! m_{w→v} ∝ ⟨⊗_{v'≠v} m_{v'→w}, g_w⟩        normalized so ⟨u, m_{w→v}⟩ = 1
//! m_{v→w} ∝ ⟨f_v, ⊗_{w'≠w} m_{w'→v}⟩        normalized so ⟨m_{v→w}, u*⟩ = 1
//! ```
//!
//! where `(u, u*)` are the cone's reference interior points.

use crate::cones::ConeKind;
use crate::error::{Direction, Error, Result};
use crate::model::BipartiteModel;
use crate::tensor;

const CONE_TOL: f64 = 1e-9;
const ZERO_PAIRING: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// All `w → v` messages from the previous sweep, then all `v → w` messages.
    #[default]
    Synchronous,
    /// Edge by edge in canonical order, `w → v` then `v → w`, always reading the latest messages.
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpConfig {
    pub max_iterations: usize,
    /// Sup-norm threshold on the change of normalized messages.
    pub tolerance: f64,
    /// Weight of the previous message in `[0, 1)`.
    pub damping: f64,
    pub schedule: Schedule,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig { max_iterations: 1000, tolerance: 1e-10, damping: 0.0, schedule: Schedule::Synchronous }
    }
}

impl BpConfig {
    fn check(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::Format(format!("damping must lie in [0, 1), got {}", self.damping)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Format(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

/// Messages per edge, indexed like the model's edges.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageSet {
    /// `m_{v→w}`.
    pub to_right: Vec<Vec<f64>>,
    /// `m_{w→v}`.
    pub to_left: Vec<Vec<f64>>,
    /// Sweeps applied since initialization.
    pub iteration: usize,
}

#[derive(Debug, Clone)]
pub struct BpResult {
    pub messages: MessageSet,
    pub converged: bool,
    /// Change during the last sweep; `+∞` when no sweep ran.
    pub residual: f64,
    pub iterations: usize,
    pub bethe: f64,
}

struct Units {
    u: Vec<Vec<f64>>,
    u_star: Vec<Vec<f64>>,
    cones: Vec<ConeKind>,
}

fn units(m: &BipartiteModel) -> Result<Units> {
    let mut u = Vec::new();
    let mut u_star = Vec::new();
    let mut cones = Vec::new();
    for (k, e) in m.edges().iter().enumerate() {
        let cone = e.cone.clone().ok_or(Error::MissingCone { edge: k })?;
        let (a, b) = cone.interior_raw(&e.space)?;
        u.push(a);
        u_star.push(b);
        cones.push(cone);
    }
    Ok(Units { u, u_star, cones })
}

/// `m⁰_{v→w} = u / ⟨u, u*⟩`, `m⁰_{w→v} = u* / ⟨u, u*⟩`.
pub fn init_messages(m: &BipartiteModel) -> Result<MessageSet> {
    let units = units(m)?;
    let mut to_right = Vec::new();
    let mut to_left = Vec::new();
    for (k, e) in m.edges().iter().enumerate() {
        let z = e.space.pair(&units.u[k], &units.u_star[k]);
        if !(z > 0.0) {
            return Err(Error::NonpositiveNormalizer { edge: k, direction: Direction::LeftToRight, value: z });
        }
        to_right.push(units.u[k].iter().map(|x| x / z).collect());
        to_left.push(units.u_star[k].iter().map(|x| x / z).collect());
    }
    Ok(MessageSet { to_right, to_left, iteration: 0 })
}

/// Normalized `m_{w→v}` for edge `e` from the current `v → w` messages.
fn message_to_left(m: &BipartiteModel, units: &Units, to_right: &[Vec<f64>], e: usize) -> Result<Vec<f64>> {
    let edge = &m.edges()[e];
    let w = edge.right;
    let incident = m.right_incident(w);
    let lowered: Vec<Vec<f64>> = incident.iter().map(|&k| m.edges()[k].space.lower(&to_right[k])).collect();
    let refs: Vec<&[f64]> = lowered.iter().map(Vec::as_slice).collect();
    let pos = incident.iter().position(|&k| k == e).expect("edge is incident");
    let raw = tensor::contract_all_but(m.g(w).coeffs(), &m.g(w).shape, pos, &refs);
    let z = edge.space.pair(&units.u[e], &raw);
    finish(raw, z, e, Direction::RightToLeft, |c| units.cones[e].dual_contains_raw(&edge.space, c, CONE_TOL))
}

/// Normalized `m_{v→w}` for edge `e` from the current `w → v` messages.
fn message_to_right(m: &BipartiteModel, units: &Units, to_left: &[Vec<f64>], e: usize) -> Result<Vec<f64>> {
    let edge = &m.edges()[e];
    let v = edge.left;
    let incident = m.left_incident(v);
    let lowered: Vec<Vec<f64>> = incident.iter().map(|&k| m.edges()[k].space.lower(&to_left[k])).collect();
    let refs: Vec<&[f64]> = lowered.iter().map(Vec::as_slice).collect();
    let pos = incident.iter().position(|&k| k == e).expect("edge is incident");
    let raw = tensor::contract_all_but(m.f(v).coeffs(), &m.f(v).shape, pos, &refs);
    let z = edge.space.pair(&raw, &units.u_star[e]);
    finish(raw, z, e, Direction::LeftToRight, |c| units.cones[e].contains_raw(&edge.space, c, CONE_TOL))
}

fn finish(
    raw: Vec<f64>,
    z: f64,
    edge: usize,
    direction: Direction,
    in_cone: impl Fn(&[f64]) -> bool,
) -> Result<Vec<f64>> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::NonpositiveNormalizer { edge, direction, value: z });
    }
    let msg: Vec<f64> = raw.into_iter().map(|x| x / z).collect();
    if !in_cone(&msg) {
        return Err(Error::ConeViolation { edge, direction });
    }
    Ok(msg)
}

fn blend(new: Vec<f64>, old: &[f64], damping: f64, unit: &[f64], space: &crate::spaces::Space, unit_on_right: bool) -> Vec<f64> {
    if damping == 0.0 {
        return new;
    }
    let mixed: Vec<f64> = new.iter().zip(old).map(|(a, b)| (1.0 - damping) * a + damping * b).collect();
    let z = if unit_on_right { space.pair(&mixed, unit) } else { space.pair(unit, &mixed) };
    mixed.into_iter().map(|x| x / z).collect()
}

fn sup_change(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

fn sweep_with(m: &BipartiteModel, units: &Units, msgs: &MessageSet, cfg: &BpConfig) -> Result<(MessageSet, f64)> {
    let n = m.edges().len();
    let space = |e: usize| &m.edges()[e].space;
    let mut next = msgs.clone();
    match cfg.schedule {
        Schedule::Synchronous => {
            for e in 0..n {
                let new = message_to_left(m, units, &msgs.to_right, e)?;
                next.to_left[e] = blend(new, &msgs.to_left[e], cfg.damping, &units.u[e], space(e), false);
            }
            for e in 0..n {
                let new = message_to_right(m, units, &next.to_left, e)?;
                next.to_right[e] = blend(new, &msgs.to_right[e], cfg.damping, &units.u_star[e], space(e), true);
            }
        }
        Schedule::Sequential => {
            for e in 0..n {
                let new = message_to_left(m, units, &next.to_right, e)?;
                next.to_left[e] = blend(new, &msgs.to_left[e], cfg.damping, &units.u[e], space(e), false);
                let new = message_to_right(m, units, &next.to_left, e)?;
                next.to_right[e] = blend(new, &msgs.to_right[e], cfg.damping, &units.u_star[e], space(e), true);
            }
        }
    }
    next.iteration += 1;
    let residual = sup_change(&next.to_left, &msgs.to_left).max(sup_change(&next.to_right, &msgs.to_right));
    Ok((next, residual))
}

/// One sweep; returns the new messages and the sup-norm change.
pub fn bp_sweep(m: &BipartiteModel, msgs: &MessageSet, cfg: &BpConfig) -> Result<(MessageSet, f64)> {
    cfg.check()?;
    check_shape(m, msgs)?;
    sweep_with(m, &units(m)?, msgs, cfg)
}

fn check_shape(m: &BipartiteModel, msgs: &MessageSet) -> Result<()> {
    let n = m.edges().len();
    if msgs.to_right.len() != n || msgs.to_left.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: msgs.to_right.len() });
    }
    for (k, e) in m.edges().iter().enumerate() {
        for v in [&msgs.to_right[k], &msgs.to_left[k]] {
            if v.len() != e.space.dim() {
                return Err(Error::DimensionMismatch { expected: e.space.dim(), found: v.len() });
            }
        }
    }
    Ok(())
}

/// Iterates sweeps from the initial messages until the residual drops to the tolerance.
pub fn run_bp(m: &BipartiteModel, cfg: &BpConfig) -> Result<BpResult> {
    cfg.check()?;
    let units = units(m)?;
    let mut msgs = init_messages(m)?;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    for _ in 0..cfg.max_iterations {
        let (next, r) = sweep_with(m, &units, &msgs, cfg)?;
        msgs = next;
        residual = r;
        if r <= cfg.tolerance {
            converged = true;
            break;
        }
    }
    let bethe = bethe_value(m, &msgs)?;
    Ok(BpResult { iterations: msgs.iteration, messages: msgs, converged, residual, bethe })
}

/// `scale · ∏_v ⟨f_v, ⊗m_{w→v}⟩ · ∏_w ⟨⊗m_{v→w}, g_w⟩ · ∏_e ⟨m_{v→w}, m_{w→v}⟩⁻¹`.
pub fn bethe_value(m: &BipartiteModel, msgs: &MessageSet) -> Result<f64> {
    check_shape(m, msgs)?;
    let mut value = m.scale();
    for (e, edge) in m.edges().iter().enumerate() {
        let p = edge.space.pair(&msgs.to_right[e], &msgs.to_left[e]);
        if p.abs() <= ZERO_PAIRING {
            return Err(Error::ZeroEdgePairing { edge: e, value: p });
        }
        value /= p;
    }
    for v in 0..m.n_left() {
        value *= vertex_pairing(m, &msgs.to_left, m.left_incident(v), m.f(v));
    }
    for w in 0..m.n_right() {
        value *= vertex_pairing(m, &msgs.to_right, m.right_incident(w), m.g(w));
    }
    Ok(value)
}

fn vertex_pairing(m: &BipartiteModel, msgs: &[Vec<f64>], incident: &[usize], t: &crate::model::VertexTensor) -> f64 {
    let lowered: Vec<Vec<f64>> = incident.iter().map(|&k| m.edges()[k].space.lower(&msgs[k])).collect();
    let refs: Vec<&[f64]> = lowered.iter().map(Vec::as_slice).collect();
    tensor::contract_rank_one(t.coeffs(), &t.shape, &refs)
}

/// Residual of one undamped synchronous sweep from `msgs`.
pub fn fixed_point_residual(m: &BipartiteModel, msgs: &MessageSet) -> Result<f64> {
    let cfg = BpConfig { damping: 0.0, schedule: Schedule::Synchronous, ..BpConfig::default() };
    Ok(bp_sweep(m, msgs, &cfg)?.1)
}

/// Largest deviation of the `u`-pairings from 1 over all messages.
pub fn normalization_defect(m: &BipartiteModel, msgs: &MessageSet) -> Result<f64> {
    let units = units(m)?;
    let mut worst = 0.0f64;
    for (e, edge) in m.edges().iter().enumerate() {
        worst = worst.max((edge.space.pair(&msgs.to_right[e], &units.u_star[e]) - 1.0).abs());
        worst = worst.max((edge.space.pair(&units.u[e], &msgs.to_left[e]) - 1.0).abs());
    }
    Ok(worst)
}

/// Whether every `v → w` message is in its cone and every `w → v` message in the dual, at `tol`.
pub fn messages_in_cones(m: &BipartiteModel, msgs: &MessageSet, tol: f64) -> Result<bool> {
    let units = units(m)?;
    Ok(m.edges().iter().enumerate().all(|(e, edge)| {
        units.cones[e].contains_raw(&edge.space, &msgs.to_right[e], tol)
            && units.cones[e].dual_contains_raw(&edge.space, &msgs.to_left[e], tol)
    }))
}
