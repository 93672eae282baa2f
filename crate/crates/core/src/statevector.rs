//! Full N-dimensional Grover iteration from explicit reflections.
//!
//! This is the brute-force check on the two-dimensional models: the state
//! is a complex N-vector and each step applies the target sign flip followed
//! by inversion about the mean, `O(N)` work with no dense operator.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::search::{grover_power, SearchInstance};

/// Largest dimension accepted by [`success_curve`].
pub const DEFAULT_MAX_DIMENSION: usize = 1 << 22;

/// Below this size the per-step sums run sequentially.
const PARALLEL_THRESHOLD: usize = 1 << 16;
const SUM_CHUNK: usize = 1 << 13;

#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    amplitudes: Vec<Complex64>,
}

impl FullState {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let s = Self { amplitudes };
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Unnormalized(norm));
        }
        Ok(s)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    fn sum(&self) -> Complex64 {
        if self.amplitudes.len() >= PARALLEL_THRESHOLD {
            // fixed chunks summed in order keep the result independent of thread count
            let partial: Vec<Complex64> = self
                .amplitudes
                .par_chunks(SUM_CHUNK)
                .map(|c| c.iter().copied().sum())
                .collect();
            partial.into_iter().sum()
        } else {
            self.amplitudes.iter().copied().sum()
        }
    }

    /// One application of `−(1 − 2|s⟩⟨s|)(1 − 2|t⟩⟨t|)`.
    fn grover_step(&mut self, target: usize) {
        self.amplitudes[target] = -self.amplitudes[target];
        let twice_mean = self.sum() * (2.0 / self.amplitudes.len() as f64);
        if self.amplitudes.len() >= PARALLEL_THRESHOLD {
            self.amplitudes.par_iter_mut().for_each(|a| *a = twice_mean - *a);
        } else {
            self.amplitudes.iter_mut().for_each(|a| *a = twice_mean - *a);
        }
    }
}

/// `|s⟩`: every amplitude `1/√N`.
pub fn uniform_state(n: usize) -> Result<FullState> {
    if n < 2 {
        return Err(Error::DatabaseTooSmall(n as u64));
    }
    let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    Ok(FullState { amplitudes: vec![a; n] })
}

/// Applies the Grover operator `steps` times.
pub fn grover_iterate(state: &FullState, target: usize, steps: u64) -> Result<FullState> {
    if target >= state.dimension() {
        return Err(Error::IndexOutOfRange { index: target, dim: state.dimension() });
    }
    let mut out = state.clone();
    for _ in 0..steps {
        out.grover_step(target);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub step: u64,
    pub probability: f64,
}

/// Success probability `|⟨t|ψ_k⟩|²` for `k = 0..=max_steps`.
pub fn success_curve(n: usize, max_steps: u64) -> Result<Vec<CurvePoint>> {
    success_curve_with(n, 0, max_steps, DEFAULT_MAX_DIMENSION)
}

pub fn success_curve_with(n: usize, target: usize, max_steps: u64, max_dimension: usize) -> Result<Vec<CurvePoint>> {
    if max_steps < 1 {
        return Err(invalid("max_steps", "must be at least 1"));
    }
    if n > max_dimension {
        return Err(invalid("N", format!("{n} exceeds the configured cap {max_dimension}")));
    }
    let mut state = uniform_state(n)?;
    if target >= n {
        return Err(Error::IndexOutOfRange { index: target, dim: n });
    }
    let mut curve = Vec::with_capacity(max_steps as usize + 1);
    curve.push(CurvePoint { step: 0, probability: state.probability(target) });
    for step in 1..=max_steps {
        state.grover_step(target);
        curve.push(CurvePoint { step, probability: state.probability(target) });
    }
    Ok(curve)
}

/// Earliest step with the highest success probability.
pub fn peak(curve: &[CurvePoint]) -> Option<CurvePoint> {
    curve
        .iter()
        .copied()
        .fold(None, |best: Option<CurvePoint>, p| match best {
            Some(b) if b.probability >= p.probability => Some(b),
            _ => Some(p),
        })
}

/// Steps covering the first rise and fall of the curve, `⌊2 Q_T⌋` but at least 2.
pub fn first_lobe_steps(inst: &SearchInstance) -> u64 {
    ((2.0 * crate::search::step_params(inst).q_total).floor() as u64).max(2)
}

/// Largest deviation between the full simulation and the two-dimensional
/// model `(U_G)^k |s⟩` over steps `0..=steps`.
///
/// At each step it compares `⟨t|ψ⟩`, the signed overlap with
/// `|t⊥⟩ = Σ_{i≠t}|i⟩/√(N−1)`, and the norm of whatever lies outside
/// span{|t⟩, |t⊥⟩}.
pub fn subspace_agreement(n: usize, steps: u64) -> Result<f64> {
    subspace_agreement_with_target(n, 0, steps)
}

pub fn subspace_agreement_with_target(n: usize, target: usize, steps: u64) -> Result<f64> {
    let inst = SearchInstance::new(n as u64)?;
    if target >= n {
        return Err(Error::IndexOutOfRange { index: target, dim: n });
    }
    let mut state = uniform_state(n)?;
    let perp_scale = 1.0 / ((n - 1) as f64).sqrt();
    let s2 = inst.source_state();
    let mut worst = 0.0f64;
    for k in 0..=steps {
        if k > 0 {
            state.grover_step(target);
        }
        let model = grover_power(&inst, k as f64).apply(&s2);
        let on_target = state.amplitudes[target];
        let perp = (state.sum() - on_target) * perp_scale;
        let outside: f64 = state
            .amplitudes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != target)
            .map(|(_, a)| (*a - perp * perp_scale).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst
            .max((on_target - model[0]).norm())
            .max((perp - model[1]).norm())
            .max(outside);
    }
    Ok(worst)
}

/// Writes `step,probability` with 17 significant digits.
pub fn write_curve_csv<W: Write>(mut out: W, curve: &[CurvePoint]) -> std::io::Result<()> {
    writeln!(out, "step,probability")?;
    for p in curve {
        writeln!(out, "{},{:.16e}", p.step, p.probability)?;
    }
    Ok(())
}
