//! First-order Lie–Trotter evolution for sums of exactly exponentiable terms.
//!
//! A [`HermitianTermSet`] holds `H = Σ_i H_i` as coordinate lists. Each
//! Trotter step is `exp(-iH_1 Δt) exp(-iH_2 Δt) ⋯ exp(-iH_l Δt)` with the
//! factors multiplied left to right in declared term order, and the step is
//! raised to the `n`-th power.
//!
//! The leading error generator is `E⁽²⁾ = (i/2) Σ_{i<j} [H_i, H_j]`; the
//! planner picks the largest `Δt` with `t ‖E⁽²⁾‖ Δt ≤ ε`.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CMatrix, HERMITIAN_TOLERANCE};

/// Default cap on the number of Trotter steps a plan may request.
pub const DEFAULT_STEP_CAP: u64 = 10_000_000;

/// Slack between the leading-order bound `t‖E⁽²⁾‖Δt` and the measured error.
pub const BOUND_SLACK: f64 = 2.0;

/// One Hermitian term in coordinate form. Both `(r, c)` and `(c, r)` are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub label: String,
    entries: Vec<(usize, usize, Complex64)>,
}

impl Term {
    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn to_dense(&self, dim: usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }
}

/// `H = Σ_i H_i` over a Hilbert space of dimension `dimension`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianTermSet {
    dimension: usize,
    terms: Vec<Term>,
}

impl HermitianTermSet {
    /// Validates indices, rejects duplicate coordinates and checks each term
    /// is Hermitian to [`HERMITIAN_TOLERANCE`].
    pub fn new(dimension: usize, terms: Vec<(String, Vec<(usize, usize, Complex64)>)>) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("dimension", "must be positive"));
        }
        let mut out = Vec::with_capacity(terms.len());
        for (label, entries) in terms {
            let mut seen = BTreeMap::new();
            for &(r, c, v) in &entries {
                for idx in [r, c] {
                    if idx >= dimension {
                        return Err(Error::IndexOutOfRange { index: idx, dim: dimension });
                    }
                }
                if seen.insert((r, c), v).is_some() {
                    return Err(invalid("entries", format!("term `{label}` repeats ({r}, {c})")));
                }
            }
            let zero = Complex64::new(0.0, 0.0);
            let dev = seen
                .iter()
                .map(|(&(r, c), &v)| (v - seen.get(&(c, r)).copied().unwrap_or(zero).conj()).norm())
                .fold(0.0, f64::max);
            if dev > HERMITIAN_TOLERANCE {
                return Err(Error::NotHermitian(dev));
            }
            out.push(Term { label, entries });
        }
        Ok(Self { dimension, terms: out })
    }

    /// Builds a term set from dense matrices, keeping nonzero entries.
    pub fn from_dense(terms: Vec<(String, CMatrix)>) -> Result<Self> {
        let dimension = terms.first().map(|(_, m)| m.nrows()).unwrap_or(0);
        let mut sparse = Vec::with_capacity(terms.len());
        for (label, m) in terms {
            if m.nrows() != dimension || m.ncols() != dimension {
                return Err(Error::DimensionMismatch { expected: dimension, got: m.nrows() });
            }
            let mut entries = Vec::new();
            for r in 0..dimension {
                for c in 0..dimension {
                    if m[(r, c)] != Complex64::new(0.0, 0.0) {
                        entries.push((r, c, m[(r, c)]));
                    }
                }
            }
            sparse.push((label, entries));
        }
        Self::new(dimension, sparse)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn labels(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.label.clone()).collect()
    }

    pub fn dense_terms(&self) -> Vec<CMatrix> {
        self.terms.iter().map(|t| t.to_dense(self.dimension)).collect()
    }

    /// `Σ_i H_i` as a dense matrix.
    pub fn total(&self) -> CMatrix {
        let mut sum = CMatrix::zeros(self.dimension, self.dimension);
        for t in &self.terms {
            for &(r, c, v) in &t.entries {
                sum[(r, c)] += v;
            }
        }
        sum
    }

    pub fn to_document(&self) -> TermSetDocument {
        TermSetDocument {
            dimension: self.dimension,
            terms: self
                .terms
                .iter()
                .map(|t| TermDocument {
                    label: t.label.clone(),
                    entries: t.entries.iter().map(|&(r, c, v)| (r, c, v.re, v.im)).collect(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: TermSetDocument) -> Result<Self> {
        let terms = doc
            .terms
            .into_iter()
            .map(|t| {
                let entries = t
                    .entries
                    .into_iter()
                    .map(|(r, c, re, im)| (r, c, Complex64::new(re, im)))
                    .collect();
                (t.label, entries)
            })
            .collect();
        Self::new(doc.dimension, terms)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> std::io::Result<Result<Self>> {
        Ok(Self::from_json(&std::fs::read_to_string(path)?))
    }
}

/// Wire form: `{dimension, terms: [{label, entries: [[row, col, re, im], …]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSetDocument {
    pub dimension: usize,
    pub terms: Vec<TermDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDocument {
    pub label: String,
    pub entries: Vec<(usize, usize, f64, f64)>,
}

/// Total time, step, step count and error budget of one evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrotterPlan {
    pub total_time: f64,
    /// `total_time / steps`.
    pub step: f64,
    pub steps: u64,
    pub error_budget: f64,
    /// The step the budget formula asked for before rounding to an integer `n`.
    pub budget_step: f64,
}

impl TrotterPlan {
    pub fn with_steps(total_time: f64, steps: u64, error_budget: f64) -> Result<Self> {
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(invalid("total_time", format!("must be positive, got {total_time}")));
        }
        if steps == 0 {
            return Err(invalid("steps", "must be at least 1"));
        }
        if !(error_budget > 0.0) {
            return Err(invalid("error_budget", format!("must be positive, got {error_budget}")));
        }
        let step = total_time / steps as f64;
        Ok(Self { total_time, step, steps, error_budget, budget_step: step })
    }

    /// Smallest `n` whose step `t/n` does not exceed `requested_step`.
    pub fn from_step(total_time: f64, requested_step: f64, error_budget: f64, cap: u64) -> Result<Self> {
        if !(requested_step > 0.0) {
            return Err(invalid("step", format!("must be positive, got {requested_step}")));
        }
        let ratio = total_time / requested_step;
        // absorb round-off so that t/Δt = 4.000000001 stays 4
        let steps = (ratio * (1.0 - 1e-12)).ceil().max(1.0);
        if steps > cap as f64 {
            return Err(Error::StepCapExceeded { required: steps, cap });
        }
        let mut plan = Self::with_steps(total_time, steps as u64, error_budget)?;
        plan.budget_step = requested_step;
        Ok(plan)
    }
}

/// Spectral norm of the leading error generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutatorEstimate {
    pub norm_e2: f64,
}

/// `exp(-i H τ)`; the result keeps the block pattern of `H`.
pub fn exact_term_exponential(h: &CMatrix, tau: f64) -> Result<CMatrix> {
    linalg::exp_hermitian(h, tau)
}

/// One Lie–Trotter step `Π_i exp(-i H_i Δt)` in declared order.
pub fn trotter_step(terms: &HermitianTermSet, dt: f64) -> Result<CMatrix> {
    let mut u = linalg::identity(terms.dimension());
    for h in terms.dense_terms() {
        u = &u * exact_term_exponential(&h, dt)?;
    }
    Ok(u)
}

/// `(Π_i exp(-i H_i Δt))^n`.
pub fn trotter_evolve(terms: &HermitianTermSet, plan: &TrotterPlan) -> Result<CMatrix> {
    let step = trotter_step(terms, plan.step)?;
    Ok(linalg::matrix_power(&step, plan.steps))
}

/// `exp(-i H t)` of the summed Hamiltonian.
pub fn exact_evolution(terms: &HermitianTermSet, t: f64) -> Result<CMatrix> {
    exact_term_exponential(&terms.total(), t)
}

/// `‖(1/2) Σ_{i<j} [H_i, H_j]‖`. Sets with fewer than two terms give zero.
pub fn commutator_error(terms: &HermitianTermSet) -> CommutatorEstimate {
    let dense = terms.dense_terms();
    let n = terms.dimension();
    let mut sum = CMatrix::zeros(n, n);
    for i in 0..dense.len() {
        for j in (i + 1)..dense.len() {
            sum += linalg::commutator(&dense[i], &dense[j]);
        }
    }
    CommutatorEstimate {
        norm_e2: 0.5 * linalg::spectral_norm(&sum),
    }
}

/// Largest step with `t ‖E⁽²⁾‖ Δt ≤ ε`, rounded down so `t/Δt` is an integer.
pub fn plan_for_budget(terms: &HermitianTermSet, t: f64, epsilon: f64) -> Result<TrotterPlan> {
    plan_for_budget_capped(terms, t, epsilon, DEFAULT_STEP_CAP)
}

pub fn plan_for_budget_capped(
    terms: &HermitianTermSet,
    t: f64,
    epsilon: f64,
    cap: u64,
) -> Result<TrotterPlan> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    if !(epsilon > 0.0) {
        return Err(invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    let norm = commutator_error(terms).norm_e2;
    let dt = if norm == 0.0 { t } else { (epsilon / (t * norm)).min(t) };
    TrotterPlan::from_step(t, dt, epsilon, cap)
}

/// `(‖Xⁿ − Yⁿ‖, n‖X − Y‖)`.
pub fn telescoping_bound_check(x: &CMatrix, y: &CMatrix, n: u64) -> (f64, f64) {
    let lhs = linalg::spectral_norm(&(linalg::matrix_power(x, n) - linalg::matrix_power(y, n)));
    let rhs = n as f64 * linalg::spectral_norm(&(x - y));
    (lhs, rhs)
}

/// `|⟨ψ|U† H U|ψ⟩ − ⟨ψ|H|ψ⟩|`: energy drift of an approximate evolution.
pub fn energy_drift(terms: &HermitianTermSet, u: &CMatrix, psi: &nalgebra::DVector<Complex64>) -> f64 {
    let h = terms.total();
    let before = psi.dotc(&(&h * psi)).re;
    let evolved = u * psi;
    let after = evolved.dotc(&(&h * &evolved)).re;
    (after - before).abs()
}

/// One row of an error-vs-step scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub dt: f64,
    pub steps: u64,
    pub error: f64,
    /// `t ‖E⁽²⁾‖ Δt`
    pub bound: f64,
}

/// Measures `‖U_trotter − exp(-iHt)‖` on a grid of requested steps.
pub fn error_scan(terms: &HermitianTermSet, t: f64, steps: &[f64], cap: u64) -> Result<Vec<ScanPoint>> {
    let exact = exact_evolution(terms, t)?;
    let norm = commutator_error(terms).norm_e2;
    steps
        .iter()
        .map(|&dt| {
            let plan = TrotterPlan::from_step(t, dt, 1.0, cap)?;
            let u = trotter_evolve(terms, &plan)?;
            Ok(ScanPoint {
                dt: plan.step,
                steps: plan.steps,
                error: linalg::spectral_norm(&(u - &exact)),
                bound: t * norm * plan.step,
            })
        })
        .collect()
}

/// Least-squares slope of `ln(error)` against `ln(dt)`.
pub fn loglog_slope(points: &[ScanPoint]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.error > 0.0 && p.dt > 0.0)
        .map(|p| (p.dt.ln(), p.error.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::laplacian_chain;
    use crate::decompose::{color_edges, decompose};
    use crate::search::{evolve_continuous, projector_terms, SearchInstance};
    use crate::pauli::{phase_aligned_distance, ComplexMatrix2};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Oracle: Taylor series with scaling and squaring, independent of eigensolvers.
    fn expm_taylor(h: &CMatrix, tau: f64) -> CMatrix {
        let a = h * c(0.0, -tau);
        let norm = linalg::max_abs(&a) * a.nrows() as f64;
        let squarings = (norm.max(1e-300).log2().ceil() as i32 + 4).max(0) as u32;
        let scaled = &a / c(2f64.powi(squarings as i32), 0.0);
        let mut term = linalg::identity(a.nrows());
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * &scaled / c(k as f64, 0.0);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    fn ring(l: usize) -> HermitianTermSet {
        let (h, g) = laplacian_chain(l, true).unwrap();
        decompose(&h, &g, &color_edges(&g).unwrap()).unwrap()
    }

    fn to_cm(m: &CMatrix) -> ComplexMatrix2 {
        ComplexMatrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
    }

    #[test]
    fn zero_time_exponential_is_identity() {
        let h = ring(8).total();
        assert_eq!(exact_term_exponential(&h, 0.0).unwrap(), linalg::identity(8));
    }

    #[test]
    fn projector_at_pi_is_reflection() {
        let v = nalgebra::DVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0)]);
        let p = &v * v.adjoint();
        let r = exact_term_exponential(&p, PI).unwrap();
        let expect = linalg::identity(4) - &p * c(2.0, 0.0);
        assert!(linalg::max_abs(&(r - expect)) < 1e-12);
    }

    #[test]
    fn even_edge_term_matches_taylor_oracle() {
        let terms = ring(8);
        let h_e = terms.dense_terms()[0].clone();
        let u = exact_term_exponential(&h_e, 0.3).unwrap();
        assert!(linalg::max_abs(&(&u - expm_taylor(&h_e, 0.3))) < 1e-10);
        assert!(linalg::unitary_deviation(&u) < 1e-11);
    }

    #[test]
    fn rejects_non_hermitian_term() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(exact_term_exponential(&m, 1.0).is_err());
        let bad = HermitianTermSet::new(2, vec![("x".into(), vec![(0, 1, c(1.0, 0.0))])]);
        assert!(matches!(bad, Err(Error::NotHermitian(_))));
        let oob = HermitianTermSet::new(2, vec![("x".into(), vec![(0, 2, c(1.0, 0.0))])]);
        assert!(matches!(oob, Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn commuting_terms_are_exact() {
        let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-2.0, 0.0), c(0.5, 0.0)]));
        let b = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.3, 0.0), c(0.0, 0.0), c(4.0, 0.0)]));
        let set = HermitianTermSet::from_dense(vec![("a".into(), a), ("b".into(), b)]).unwrap();
        assert_eq!(commutator_error(&set).norm_e2, 0.0);
        for dt in [1.7, 0.5, 0.01] {
            let plan = TrotterPlan::from_step(1.7, dt, 1e-3, DEFAULT_STEP_CAP).unwrap();
            let u = trotter_evolve(&set, &plan).unwrap();
            let exact = exact_evolution(&set, 1.7).unwrap();
            assert!(linalg::spectral_norm(&(u - exact)) < 1e-10);
        }
        let plan = plan_for_budget(&set, 1.7, 1e-6).unwrap();
        assert_eq!(plan.steps, 1);
        assert_eq!(plan.step, 1.7);
    }

    #[test]
    fn projector_split_reaches_target() {
        let inst = SearchInstance::new(16).unwrap();
        let set = projector_terms(&inst);
        let t = inst.search_time();
        let plan = TrotterPlan::from_step(t, 1e-3, 1.0, DEFAULT_STEP_CAP).unwrap();
        let u = to_cm(&trotter_evolve(&set, &plan).unwrap());
        let fid = u.apply(&inst.source_state())[0].norm_sqr();
        assert!(fid >= 1.0 - 1e-4, "fidelity {fid}");
        assert!(u.is_unitary(1e-9));
    }

    #[test]
    fn commutator_estimate_for_projector_split() {
        for n in [2u64, 4, 16, 1000] {
            let inst = SearchInstance::new(n).unwrap();
            let e = commutator_error(&projector_terms(&inst)).norm_e2;
            let nf = n as f64;
            assert_abs_diff_eq!(e, 0.5 * (nf - 1.0).sqrt() / nf, epsilon = 1e-12);
        }
    }

    #[test]
    fn commutator_estimate_for_ring_matches_dense_oracle() {
        let set = ring(8);
        let d = set.dense_terms();
        let direct = &d[0] * &d[1] - &d[1] * &d[0];
        // [A,B] is anti-Hermitian; i[A,B] is Hermitian with the same norm
        let herm = direct * c(0.0, 1.0);
        let ev = linalg::hermitian_eigenvalues(&herm).unwrap();
        let oracle = 0.5 * ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let est = commutator_error(&set).norm_e2;
        assert!(est > 0.0);
        assert_abs_diff_eq!(est, oracle, epsilon = 1e-12);
    }

    #[test]
    fn first_order_scaling_on_projector_split() {
        let inst = SearchInstance::new(16).unwrap();
        let set = projector_terms(&inst);
        let t = inst.search_time();
        let pts = error_scan(&set, t, &[0.2, 0.1, 0.05, 0.025], DEFAULT_STEP_CAP).unwrap();
        for w in pts.windows(2) {
            let ratio = w[0].error / w[1].error;
            let step_ratio = w[0].dt / w[1].dt;
            assert!((ratio / step_ratio - 1.0).abs() < 0.15, "ratio {ratio}");
        }
        let slope = loglog_slope(&pts).unwrap();
        assert!((0.9..=1.1).contains(&slope), "slope {slope}");
        for p in &pts {
            assert!(p.error <= BOUND_SLACK * p.bound);
        }
    }

    #[test]
    fn plan_meets_budget_on_projector_split() {
        let inst = SearchInstance::new(16).unwrap();
        let set = projector_terms(&inst);
        let t = inst.search_time();
        let eps = 1e-3;
        let norm = commutator_error(&set).norm_e2;
        let plan = plan_for_budget(&set, t, eps).unwrap();
        assert_abs_diff_eq!(plan.budget_step, eps / (t * norm), epsilon = 1e-15);
        assert!(plan.step <= plan.budget_step);
        assert_abs_diff_eq!(plan.steps as f64 * plan.step, t, epsilon = 1e-12);
        let u = to_cm(&trotter_evolve(&set, &plan).unwrap());
        let exact = evolve_continuous(&inst, t).unwrap();
        assert!(phase_aligned_distance(&u, &exact) <= 2.0 * eps);

        let doubled = plan_for_budget(&set, t, 2.0 * eps).unwrap();
        assert_eq!(doubled.budget_step, 2.0 * plan.budget_step);
        assert!(doubled.steps <= plan.steps / 2 + 1);
    }

    #[test]
    fn plan_respects_step_cap() {
        let inst = SearchInstance::new(16).unwrap();
        let set = projector_terms(&inst);
        let err = plan_for_budget_capped(&set, 10.0, 1e-9, 1000);
        assert!(matches!(err, Err(Error::StepCapExceeded { .. })));
        assert!(plan_for_budget(&set, -1.0, 1e-3).is_err());
        assert!(plan_for_budget(&set, 1.0, 0.0).is_err());
    }

    #[test]
    fn plan_invariants() {
        assert!(TrotterPlan::with_steps(1.0, 0, 1.0).is_err());
        let p = TrotterPlan::from_step(1.0, 0.25, 1e-3, 10).unwrap();
        assert_eq!(p.steps, 4);
        let p = TrotterPlan::from_step(1.0, 0.3, 1e-3, 10).unwrap();
        assert_eq!(p.steps, 4);
        assert!((p.steps as f64 * p.step - 1.0).abs() < 1e-12);
    }

    #[test]
    fn telescoping_examples() {
        let inst = SearchInstance::new(16).unwrap();
        let g = crate::search::grover_step(&inst);
        let to_dense = |m: ComplexMatrix2| CMatrix::from_fn(2, 2, |r, c| m.get(r, c));
        let x = to_dense(g);
        assert_eq!(telescoping_bound_check(&x, &x, 5), (0.0, 0.0));
        let y = to_dense(crate::pauli::rotation_unitary(&crate::pauli::AxisAngle::y(-inst.step_angle() + 1e-3)));
        let (lhs, rhs) = telescoping_bound_check(&x, &y, 100);
        assert!(lhs <= rhs && lhs > 0.0);
    }

    #[test]
    fn energy_drift_is_reported() {
        let set = ring(8);
        let plan = TrotterPlan::from_step(2.0, 0.2, 1.0, 100).unwrap();
        let u = trotter_evolve(&set, &plan).unwrap();
        let mut psi = nalgebra::DVector::zeros(8);
        psi[0] = c(1.0, 0.0);
        let drift = energy_drift(&set, &u, &psi);
        assert!(drift.is_finite() && drift >= 0.0);
        let exact = exact_evolution(&set, 2.0).unwrap();
        assert!(energy_drift(&set, &exact, &psi) < 1e-12);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let set = ring(4);
        let back = HermitianTermSet::from_json(&set.to_json().unwrap()).unwrap();
        assert_eq!(back, set);
        let bad = r#"{"dimension":2,"terms":[{"label":"a","entries":[[0,1,1.0,0.0]]}]}"#;
        assert!(matches!(HermitianTermSet::from_json(bad), Err(Error::NotHermitian(_))));
        let unknown = r#"{"dimension":2,"terms":[],"extra":1}"#;
        assert!(matches!(HermitianTermSet::from_json(unknown), Err(Error::Json(_))));
    }

    fn arb_hermitian(dim: usize) -> impl Strategy<Value = CMatrix> {
        proptest::collection::vec(-1.0..1.0f64, 2 * dim * dim).prop_map(move |v| {
            let m = CMatrix::from_fn(dim, dim, |r, cc| c(v[2 * (r * dim + cc)], v[2 * (r * dim + cc) + 1]));
            (&m + m.adjoint()) * c(0.5, 0.0)
        })
    }

    fn arb_unitary_pair() -> impl Strategy<Value = (CMatrix, CMatrix, u64)> {
        (2usize..=4).prop_flat_map(|d| {
            (arb_hermitian(d), arb_hermitian(d), 0.0..3.0f64, 1u64..=64).prop_map(|(a, b, t, n)| {
                (
                    exact_term_exponential(&a, t).unwrap(),
                    exact_term_exponential(&b, t).unwrap(),
                    n,
                )
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn telescoping_bound_holds((x, y, n) in arb_unitary_pair()) {
            let (lhs, rhs) = telescoping_bound_check(&x, &y, n);
            prop_assert!(lhs <= rhs + 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trotter_evolution_stays_unitary(a in arb_hermitian(3), b in arb_hermitian(3), steps in 1u64..2000) {
            let set = HermitianTermSet::from_dense(vec![("a".into(), a), ("b".into(), b)]).unwrap();
            let plan = TrotterPlan::with_steps(1.5, steps, 1.0).unwrap();
            let u = trotter_evolve(&set, &plan).unwrap();
            prop_assert!(linalg::unitary_deviation(&u) < 1e-9);
        }
    }
}
