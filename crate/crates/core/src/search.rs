//! Continuous and discrete quantum search in the invariant plane.
//!
//! The continuous route evolves under `H_C = |s⟩⟨s| + |t⟩⟨t|`; the discrete
//! route iterates the Grover operator, the product of the two reflections.
//! Both act on span{|t⟩, |t⊥⟩}, where
//! `|s⟩ = (1/√N, √((N−1)/N))`.
//!
//! The Grover operator equals `exp(-i H_G τ)` with
//! `H_G = i[|t⟩⟨t|, |s⟩⟨s|] = −(√(N−1)/N) σ₂`. In the rotation convention of
//! [`crate::pauli`] this is a rotation by `−4 arcsin(1/√N)` about ŷ, so
//! fractional powers are `exp(-i H_G τ q)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pauli::{
    bloch_point, phase_aligned_distance, rotation_unitary, AxisAngle, ComplexMatrix2,
    PauliVector, Spinor,
};
use crate::trotter::HermitianTermSet;

/// Relative slack when checking `t ≤ T`.
const DOMAIN_SLACK: f64 = 1e-12;

/// A search over `N` items with a single marked target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchInstance {
    n: u64,
}

impl SearchInstance {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::DatabaseTooSmall(n));
        }
        Ok(Self { n })
    }

    pub fn size(&self) -> u64 {
        self.n
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `⟨t|s⟩ = 1/√N`
    pub fn overlap(&self) -> f64 {
        1.0 / self.nf().sqrt()
    }

    /// `α = 2 arcsin(1/√N)`; each Grover step turns the Bloch vector by `2α`.
    pub fn alpha(&self) -> f64 {
        2.0 * self.overlap().asin()
    }

    pub fn step_angle(&self) -> f64 {
        2.0 * self.alpha()
    }

    pub fn target_state(&self) -> Spinor {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    }

    pub fn source_state(&self) -> Spinor {
        let n = self.nf();
        [
            Complex64::new(self.overlap(), 0.0),
            Complex64::new(((n - 1.0) / n).sqrt(), 0.0),
        ]
    }

    /// `T = (π/2)√N`, the continuous search time.
    pub fn search_time(&self) -> f64 {
        FRAC_PI_2 * self.nf().sqrt()
    }

    /// Rotation axis of `H_C`: `n̂ = (√((N−1)/N), 0, 1/√N)`.
    pub fn continuous_axis(&self) -> [f64; 3] {
        let n = self.nf();
        [((n - 1.0) / n).sqrt(), 0.0, self.overlap()]
    }

    /// Rotation axis of `H_G`.
    pub fn grover_axis(&self) -> [f64; 3] {
        [0.0, 1.0, 0.0]
    }

    /// `⌊Q_T + 1/2⌋`, the number of Grover steps run in practice.
    pub fn integer_steps(&self) -> u64 {
        (step_params(self).q_total + 0.5).floor() as u64
    }

    pub fn source_projector(&self) -> ComplexMatrix2 {
        ComplexMatrix2::outer(&self.source_state())
    }

    pub fn target_projector(&self) -> ComplexMatrix2 {
        ComplexMatrix2::outer(&self.target_state())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let max = self.search_time();
        if !(0.0..=max * (1.0 + DOMAIN_SLACK)).contains(&t) {
            return Err(Error::TimeOutOfDomain { t, max });
        }
        Ok(())
    }
}

/// Evolution time per Grover step and the unrounded step count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroverStepParams {
    pub tau: f64,
    pub q_total: f64,
}

/// Grover power and σ₃ phase angle that reproduce `U_C(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceParams {
    pub qt: f64,
    pub beta: f64,
}

/// `H_C = I + (√(N−1)/N) σ₁ + (1/N) σ₃`.
pub fn hamiltonian_continuous(inst: &SearchInstance) -> PauliVector {
    let n = inst.nf();
    PauliVector::real(1.0, (n - 1.0).sqrt() / n, 0.0, 1.0 / n)
}

/// `U_C(t) = exp(-i n̂·σ t/√N)`, the continuous evolution without its global phase.
pub fn evolve_continuous(inst: &SearchInstance, t: f64) -> Result<ComplexMatrix2> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("must be finite and non-negative, got {t}"),
        });
    }
    let rot = AxisAngle::new(inst.continuous_axis(), 2.0 * t / inst.nf().sqrt())?;
    Ok(rotation_unitary(&rot))
}

/// `U_G = −(1 − 2|s⟩⟨s|)(1 − 2|t⟩⟨t|)`, built from the two reflections.
pub fn grover_step(inst: &SearchInstance) -> ComplexMatrix2 {
    let id = ComplexMatrix2::identity();
    let two = Complex64::new(2.0, 0.0);
    let reflect_s = id - inst.source_projector().scale(two);
    let reflect_t = id - inst.target_projector().scale(two);
    -(reflect_s * reflect_t)
}

/// `H_G = −(√(N−1)/N) σ₂`.
pub fn grover_hamiltonian(inst: &SearchInstance) -> PauliVector {
    let n = inst.nf();
    PauliVector::real(0.0, 0.0, -(n - 1.0).sqrt() / n, 0.0)
}

/// `i[|t⟩⟨t|, |s⟩⟨s|]` evaluated from the projector matrices.
pub fn projector_commutator(inst: &SearchInstance) -> ComplexMatrix2 {
    inst.target_projector()
        .commutator(&inst.source_projector())
        .scale(Complex64::new(0.0, 1.0))
}

/// `τ = (2N/√(N−1)) arcsin(1/√N)` and `Q_T = arccos(1/√N) / (2 arcsin(1/√N))`.
pub fn step_params(inst: &SearchInstance) -> GroverStepParams {
    let n = inst.nf();
    let asin = inst.overlap().asin();
    GroverStepParams {
        tau: 2.0 * n / (n - 1.0).sqrt() * asin,
        q_total: inst.overlap().acos() / (2.0 * asin),
    }
}

/// `(U_G)^q` for real `q`, i.e. `exp(-i H_G τ q)`.
pub fn grover_power(inst: &SearchInstance, q: f64) -> ComplexMatrix2 {
    rotation_unitary(&AxisAngle::y(-q * inst.step_angle()))
}

/// `Q_t` and `β` for `0 ≤ t ≤ T` (principal branches only).
pub fn equivalence_params(inst: &SearchInstance, t: f64) -> Result<EquivalenceParams> {
    inst.check_time(t)?;
    let n = inst.nf();
    let x = (t / n.sqrt()).min(FRAC_PI_2);
    let (sin_x, cos_x) = x.sin_cos();
    let arg = (((n - 1.0) / n).sqrt() * sin_x).min(1.0);
    let qt = arg.asin() / (2.0 * inst.overlap().asin());
    // arctan(tan(x)/√N) on x ∈ [0, π/2], finite at x = π/2
    let beta = -FRAC_PI_4 - 0.5 * sin_x.atan2(n.sqrt() * cos_x);
    Ok(EquivalenceParams { qt, beta })
}

/// `exp(iβσ₃) (U_G)^{Q_t} exp(i(π/2 + β)σ₃)`.
pub fn discrete_reconstruction(inst: &SearchInstance, t: f64) -> Result<ComplexMatrix2> {
    let p = equivalence_params(inst, t)?;
    let before = rotation_unitary(&AxisAngle::z(-2.0 * (FRAC_PI_2 + p.beta)));
    let after = rotation_unitary(&AxisAngle::z(-2.0 * p.beta));
    Ok(after * grover_power(inst, p.qt) * before)
}

/// Phase-aligned distance between `U_C(t)` and its reconstruction from Grover steps.
pub fn equivalence_residual(inst: &SearchInstance, t: f64) -> Result<f64> {
    let lhs = evolve_continuous(inst, t)?;
    let rhs = discrete_reconstruction(inst, t)?;
    Ok(phase_aligned_distance(&lhs, &rhs))
}

/// Phase-aligned distance between `U_C(T)` and `i(1 − 2|t⟩⟨t|)(U_G)^{Q_T}`.
pub fn endpoint_residual(inst: &SearchInstance) -> f64 {
    let lhs = evolve_continuous(inst, inst.search_time()).expect("T is finite and positive");
    let reflect_t = ComplexMatrix2::identity()
        - inst.target_projector().scale(Complex64::new(2.0, 0.0));
    let rhs = reflect_t.scale(Complex64::new(0.0, 1.0)) * grover_power(inst, step_params(inst).q_total);
    phase_aligned_distance(&lhs, &rhs)
}

/// One sample of the two Bloch trajectories from `|s⟩` towards `|t⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub continuous: [f64; 3],
    pub discrete: [f64; 3],
}

/// Samples both trajectories on `samples` evenly spaced times in `[0, T]`.
///
/// The discrete trajectory is the fractional Grover rotation `(U_G)^q` with
/// `q = Q_T · t/T`, so both curves start at `|s⟩` and end at `|t⟩`.
pub fn bloch_trajectories(inst: &SearchInstance, samples: usize) -> Result<Vec<TrajectoryPoint>> {
    if samples < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: format!("need at least 2, got {samples}"),
        });
    }
    let big_t = inst.search_time();
    let q_total = step_params(inst).q_total;
    let s = inst.source_state();
    (0..samples)
        .map(|k| {
            let frac = k as f64 / (samples - 1) as f64;
            let t = big_t * frac;
            let uc = evolve_continuous(inst, t)?;
            let ug = grover_power(inst, q_total * frac);
            Ok(TrajectoryPoint {
                t,
                continuous: bloch_point(&renormalize(uc.apply(&s)))?,
                discrete: bloch_point(&renormalize(ug.apply(&s)))?,
            })
        })
        .collect()
}

fn renormalize(v: Spinor) -> Spinor {
    let n = crate::pauli::spinor_norm(&v);
    [v[0] / n, v[1] / n]
}

/// `H_C` as the two-term set `[|s⟩⟨s|, |t⟩⟨t|]` for the Trotter engine.
pub fn projector_terms(inst: &SearchInstance) -> HermitianTermSet {
    let dense = |m: ComplexMatrix2| CMatrix::from_fn(2, 2, |r, c| m.get(r, c));
    HermitianTermSet::from_dense(vec![
        ("source".to_string(), dense(inst.source_projector())),
        ("target".to_string(), dense(inst.target_projector())),
    ])
    .expect("projectors are Hermitian")
}

/// `|⟨t|U|s⟩|²`
pub fn target_fidelity(inst: &SearchInstance, u: &ComplexMatrix2) -> f64 {
    u.apply(&inst.source_state())[0].norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{dot3, pauli_decompose};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn inst(n: u64) -> SearchInstance {
        SearchInstance::new(n).unwrap()
    }

    #[test]
    fn rejects_tiny_databases() {
        assert!(SearchInstance::new(1).is_err());
        assert!(SearchInstance::new(0).is_err());
    }

    #[test]
    fn instance_invariants() {
        for n in [2, 3, 4, 17, 1 << 20] {
            let i = inst(n);
            let s = i.source_state();
            let t = i.target_state();
            let ov = (t[0].conj() * s[0] + t[1].conj() * s[1]).norm();
            assert_abs_diff_eq!(ov, 1.0 / (n as f64).sqrt(), epsilon = 1e-16);
            assert!(i.alpha() > 0.0 && i.alpha() <= PI);
        }
    }

    #[test]
    fn continuous_hamiltonian_coefficients() {
        let h = hamiltonian_continuous(&inst(4));
        let [a0, a1, a2, a3] = h.real_parts();
        assert_abs_diff_eq!(a0, 1.0);
        assert_abs_diff_eq!(a1, 3f64.sqrt() / 4.0, epsilon = 1e-16);
        assert_eq!(a2, 0.0);
        assert_abs_diff_eq!(a3, 0.25);

        let big = hamiltonian_continuous(&inst(1 << 40)).real_parts();
        assert!(big[1] < 1e-5 && big[3] < 1e-11);

        // the Pauli form equals the projector sum
        for n in [2, 5, 64] {
            let i = inst(n);
            let direct = i.source_projector() + i.target_projector();
            assert!((h_matrix(&i) - direct).max_abs() < 1e-15);
        }
    }

    fn h_matrix(i: &SearchInstance) -> ComplexMatrix2 {
        hamiltonian_continuous(i).to_matrix()
    }

    #[test]
    fn continuous_hamiltonian_spectrum_matches_dense_solver() {
        let i = inst(16);
        let h = h_matrix(&i);
        let dense = nalgebra::Matrix2::new(h.get(0, 0), h.get(0, 1), h.get(1, 0), h.get(1, 1));
        let mut ev: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let v = hamiltonian_continuous(&i).vector_re();
        let len = dot3(&v, &v).sqrt();
        assert_abs_diff_eq!(ev[0], 1.0 - len, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 1.0 + len, epsilon = 1e-14);
        assert_abs_diff_eq!(len, 0.25, epsilon = 1e-15);

        // |s⟩ ± |t⟩ are eigenvectors
        for sign in [1.0, -1.0] {
            let s = i.source_state();
            let t = i.target_state();
            let v = [s[0] + t[0] * sign, s[1] + t[1] * sign];
            let hv = h.apply(&v);
            let lambda = 1.0 + sign * len;
            assert!((hv[0] - v[0] * lambda).norm() < 1e-14);
            assert!((hv[1] - v[1] * lambda).norm() < 1e-14);
        }
    }

    #[test]
    fn continuous_evolution_reaches_target() {
        let i = inst(4);
        assert_eq!(evolve_continuous(&i, 0.0).unwrap(), ComplexMatrix2::identity());
        let u = evolve_continuous(&i, PI).unwrap();
        assert_abs_diff_eq!(target_fidelity(&i, &u), 1.0, epsilon = 1e-14);
        assert!(evolve_continuous(&i, -1.0).is_err());
    }

    #[test]
    fn continuous_evolution_matches_fine_trotter_integration() {
        // Oracle: alternate exp(-i|s⟩⟨s|dt) and exp(-i|t⟩⟨t|dt), each written as
        // 1 + (e^{-i dt} − 1)P, with dt ≈ 1e-4.
        let i = inst(16);
        let t_half = 0.5 * i.search_time();
        let steps = (t_half / 1e-4).round() as u64;
        let dt = t_half / steps as f64;
        let k = Complex64::from_polar(1.0, -dt) - 1.0;
        let es = ComplexMatrix2::identity() + i.source_projector().scale(k);
        let et = ComplexMatrix2::identity() + i.target_projector().scale(k);
        let mut psi = i.source_state();
        for _ in 0..steps {
            psi = es.apply(&et.apply(&psi));
        }
        let oracle = psi[0].norm_sqr();
        let u = evolve_continuous(&i, t_half).unwrap();
        assert_abs_diff_eq!(target_fidelity(&i, &u), oracle, epsilon = 2e-4);
    }

    #[test]
    fn grover_step_closed_forms() {
        let i = inst(4);
        let g = grover_step(&i);
        let h = 3f64.sqrt() / 2.0;
        let expect = ComplexMatrix2::from_real(0.5, h, -h, 0.5);
        assert!((g - expect).max_abs() < 1e-15);
        let out = g.apply(&i.source_state());
        assert_abs_diff_eq!(out[0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1].norm(), 0.0, epsilon = 1e-15);

        // N = 2: half turn
        assert_abs_diff_eq!(inst(2).step_angle(), PI, epsilon = 1e-15);

        for n in [2, 3, 4, 16, 1000, 1 << 30] {
            let i = inst(n);
            let g = grover_step(&i);
            assert!(g.is_unitary(1e-12));
            let pauli = pauli_decompose(&g);
            let nf = n as f64;
            assert_abs_diff_eq!(pauli.a0.re, 1.0 - 2.0 / nf, epsilon = 1e-14);
            assert_abs_diff_eq!(pauli.a[1].im, 2.0 * (nf - 1.0).sqrt() / nf, epsilon = 1e-14);
            let rot = rotation_unitary(&AxisAngle::y(-i.step_angle()));
            assert!(phase_aligned_distance(&g, &rot) < 1e-12);
        }
    }

    #[test]
    fn grover_hamiltonian_is_projector_commutator() {
        assert_abs_diff_eq!(grover_hamiltonian(&inst(4)).a[1].re, -3f64.sqrt() / 4.0);
        assert_abs_diff_eq!(grover_hamiltonian(&inst(2)).a[1].re, -0.5);
        for n in [2, 4, 16, 999] {
            let i = inst(n);
            let diff = grover_hamiltonian(&i).to_matrix() - projector_commutator(&i);
            assert!(diff.max_abs() < 1e-14, "N={n}");
            let comm = pauli_decompose(&projector_commutator(&i));
            assert!((comm.a[1] - grover_hamiltonian(&i).a[1]).norm() < 1e-15);
        }
    }

    #[test]
    fn grover_hamiltonian_generates_the_step() {
        for n in [2, 3, 16, 4096] {
            let i = inst(n);
            let p = step_params(&i);
            let u = crate::pauli::exp_hermitian(&grover_hamiltonian(&i), p.tau).unwrap();
            assert!((u - grover_step(&i)).max_abs() < 1e-13);
        }
    }

    #[test]
    fn step_param_examples() {
        assert_abs_diff_eq!(step_params(&inst(4)).q_total, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(step_params(&inst(2)).q_total, 0.5, epsilon = 1e-15);
        let q = step_params(&inst(1024)).q_total;
        assert_abs_diff_eq!(q, 24.628_649_480_872, epsilon = 1e-9);
        // the large-N estimate overshoots by about half a step
        let approx = PI / 4.0 * 32.0;
        assert!(((q - approx) / approx).abs() < 0.021);
        for n in [2, 3] {
            let p = step_params(&inst(n));
            assert!(p.tau.is_finite() && p.q_total.is_finite() && p.tau > 0.0);
        }
        for n in [64, 100, 1000, 65536] {
            let q = step_params(&inst(n)).q_total;
            let approx = PI / 4.0 * (n as f64).sqrt() - 0.5;
            assert!((q - approx).abs() < 1.0 / (n as f64).sqrt(), "N={n}");
        }
    }

    #[test]
    fn grover_power_integer_and_fractional() {
        let i = inst(16);
        assert!((grover_power(&i, 0.0) - ComplexMatrix2::identity()).max_abs() < 1e-15);
        assert!(phase_aligned_distance(&grover_power(&i, 1.0), &grover_step(&i)) < 1e-15);
        for k in 0..12u64 {
            let d = phase_aligned_distance(&grover_power(&i, k as f64), &grover_step(&i).powu(k));
            assert!(d < 1e-11);
        }

        // Oracle: U_G = cos α I + i sin α σ₂ with σ₂ eigenvectors (1, ±i)/√2,
        // so U_G^q = e^{iαq} P₊ + e^{-iαq} P₋.
        let alpha = i.alpha();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let vp = [Complex64::new(r, 0.0), Complex64::new(0.0, r)];
        let vm = [Complex64::new(r, 0.0), Complex64::new(0.0, -r)];
        let q = 2.5;
        let oracle = ComplexMatrix2::outer(&vp).scale(Complex64::from_polar(1.0, alpha * q))
            + ComplexMatrix2::outer(&vm).scale(Complex64::from_polar(1.0, -alpha * q));
        assert!((oracle - grover_power(&i, q)).max_abs() < 1e-14);
        let composed = grover_step(&i).powu(2) * grover_power(&i, 0.5);
        assert!((composed - oracle).max_abs() < 1e-14);
    }

    #[test]
    fn equivalence_param_examples() {
        let i = inst(16);
        let p0 = equivalence_params(&i, 0.0).unwrap();
        assert_eq!(p0.qt, 0.0);
        assert_abs_diff_eq!(p0.beta, -FRAC_PI_4);

        for n in [2, 3, 4, 64, 1024] {
            let i = inst(n);
            let pt = equivalence_params(&i, i.search_time()).unwrap();
            assert_abs_diff_eq!(pt.qt, step_params(&i).q_total, epsilon = 1e-12);
            assert!(pt.beta.is_finite());
        }

        let q = equivalence_params(&inst(100), 5.0).unwrap().qt;
        assert!((q - 2.5).abs() / 2.5 < 0.1);

        assert!(matches!(
            equivalence_params(&i, 1.01 * i.search_time()),
            Err(Error::TimeOutOfDomain { .. })
        ));
        assert!(equivalence_params(&i, -0.1).is_err());
    }

    #[test]
    fn equivalence_qt_is_monotone() {
        for n in [2, 4, 16, 256] {
            let i = inst(n);
            let big_t = i.search_time();
            let qs: Vec<f64> = (0..=200)
                .map(|k| equivalence_params(&i, big_t * k as f64 / 200.0).unwrap().qt)
                .collect();
            assert!(qs.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn qt_tracks_half_time() {
        for n in [100, 1024, 4096] {
            let i = inst(n);
            let half = 0.5 * i.search_time();
            for k in 1..=10 {
                let t = half * k as f64 / 10.0;
                let q = equivalence_params(&i, t).unwrap().qt;
                assert!((q - t / 2.0).abs() / (t / 2.0) < 0.1, "N={n} t={t}");
            }
        }
    }

    #[test]
    fn equivalence_residual_sweep() {
        assert!(equivalence_residual(&inst(16), 0.0).unwrap() < 1e-12);
        let i = inst(64);
        assert!(equivalence_residual(&i, i.search_time()).unwrap() < 1e-10);
        for n in [2, 3, 4, 16, 256] {
            let i = inst(n);
            let big_t = i.search_time();
            for k in 0..20 {
                let t = big_t * k as f64 / 19.0;
                let r = equivalence_residual(&i, t).unwrap();
                assert!(r < 1e-9, "N={n} t={t} residual={r}");
            }
            assert!(endpoint_residual(&i) < 1e-10);
        }
    }

    #[test]
    fn axes_are_orthogonal() {
        for n in [2, 3, 4, 100, 1 << 40] {
            let i = inst(n);
            assert!(dot3(&i.continuous_axis(), &i.grover_axis()).abs() < 1e-14);
        }
    }

    #[test]
    fn trajectories_meet_only_at_endpoints() {
        let i = inst(4);
        let traj = bloch_trajectories(&i, 3).unwrap();
        let s = [3f64.sqrt() / 2.0, 0.0, -0.5];
        for p in [traj[0].continuous, traj[0].discrete] {
            for k in 0..3 {
                assert_abs_diff_eq!(p[k], s[k], epsilon = 1e-9);
            }
        }
        for p in [traj[2].continuous, traj[2].discrete] {
            for (k, e) in [0.0, 0.0, 1.0].iter().enumerate() {
                assert_abs_diff_eq!(p[k], *e, epsilon = 1e-9);
            }
        }
        for n in [4, 16, 1024] {
            let traj = bloch_trajectories(&inst(n), 101).unwrap();
            let gap = traj
                .iter()
                .map(|p| (0..3).map(|k| (p.continuous[k] - p.discrete[k]).powi(2)).sum::<f64>().sqrt())
                .fold(0.0, f64::max);
            assert!(gap > 0.1);
            for p in &traj {
                assert!((dot3(&p.continuous, &p.continuous).sqrt() - 1.0).abs() < 1e-9);
                assert!((dot3(&p.discrete, &p.discrete).sqrt() - 1.0).abs() < 1e-9);
            }
        }
        assert!(bloch_trajectories(&i, 1).is_err());
    }

    #[test]
    fn rounded_grover_steps_meet_error_bound() {
        for n in 2..=4096u64 {
            let i = inst(n);
            let p = target_fidelity(&i, &grover_step(&i).powu(i.integer_steps()));
            assert!(p >= 1.0 - 1.0 / n as f64 - 1e-12, "N={n} p={p}");
        }
    }
}
