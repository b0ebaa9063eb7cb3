use std::f64::consts::PI;

use super::*;
use crate::diagnostics::{original_energy, record_step, scheme_residual};

fn torus(n: usize) -> Grid {
    Grid::square(n, 2.0 * PI).unwrap()
}

fn cosine(g: Grid, amp: f64) -> Field {
    Field::from_fn(g, |x, _| amp * x.cos()).unwrap()
}

fn ex1(g: Grid) -> Field {
    Field::from_fn(g, |x, y| 1.0 + 0.5 * x.sin() * y.sin()).unwrap()
}

fn flat_params(alpha: f64, s: f64, tau: f64) -> ModelParams {
    ModelParams::new(alpha, 0.1, s, tau, Potential::constant(1.0).unwrap()).unwrap()
}

fn ex1_params(alpha: f64, s: f64, tau: f64) -> ModelParams {
    ModelParams::new(alpha, 0.1, s, tau, Potential::double_well(1.0, 0.0).unwrap()).unwrap()
}

fn amplitude(u: &Field) -> f64 {
    u.get(0, 0)
}

#[test]
fn sav_be_linear_mode_decay() {
    let g = torus(8);
    let stepper = Stepper::new(g, flat_params(0.0, 0.0, 0.1)).unwrap();
    let st = SchemeState::initial(Scheme::SavBe, cosine(g, 1.0), &stepper.params().potential).unwrap();
    let next = stepper.step(&st).unwrap();
    assert!((amplitude(&next.phi) - 1.0 / 1.01).abs() < 1e-14);
    assert!((1.0 / 1.01f64 - 0.990099).abs() < 1e-6);

    // With b ≡ 0 the system is [I + τ𝒢𝓛]φ = φⁿ.
    let sys = RankOneSystem {
        diag: stepper.diag(1.0, 1.0, 0.0),
        gb: Field::zeros(g),
        b: Field::zeros(g),
        rhs: st.phi.clone(),
        weight: 0.05,
    };
    let dense = dense_solve_oracle(stepper.spectral(), &sys).unwrap();
    let err = dense.sub(&next.phi).unwrap();
    assert!(err.values().iter().all(|v| v.abs() < 1e-13));
}

#[test]
fn isav_be_linear_mode_decay() {
    let g = torus(8);
    let stepper = Stepper::new(g, flat_params(0.0, 6.0, 0.1)).unwrap();
    let st = SchemeState::initial(Scheme::IsavBe, cosine(g, 1.0), &stepper.params().potential).unwrap();
    let next = stepper.step(&st).unwrap();
    let expect = 1.06 / 1.07;
    assert!((amplitude(&next.phi) - expect).abs() < 1e-14);
    assert!((expect - 0.990654).abs() < 1e-6);

    let sys = RankOneSystem {
        diag: stepper.diag(1.0, 1.0, 6.0),
        gb: Field::zeros(g),
        b: Field::zeros(g),
        rhs: stepper
            .spectral()
            .apply_symbol(&st.phi, &stepper.diag(1.0, 1.0, 6.0).iter().map(|d| d - 0.01).collect::<Vec<_>>(), 1.0)
            .unwrap(),
        weight: 0.05,
    };
    let dense = dense_solve_oracle(stepper.spectral(), &sys).unwrap();
    assert!(dense.sub(&next.phi).unwrap().values().iter().all(|v| v.abs() < 1e-13));
}

#[test]
fn sav_bdf_linear_mode_matches_bdf2_recurrence() {
    let g = torus(8);
    let tau = 0.1;
    let stepper = Stepper::new(g, flat_params(1.0, 0.0, tau)).unwrap();
    // λ = γ|k|^{2α}|k|² = 0.1 for cos(x) with α = 1.
    let lambda = 0.1;
    let (a0, a1) = (1.0, 0.97);
    let p = stepper.params().potential;
    let st = SchemeState {
        scheme: Scheme::SavBdf,
        step: 1,
        phi: cosine(g, a1),
        phi_prev: Some(cosine(g, a0)),
        r: p.r_of_phi(&cosine(g, a1)).unwrap(),
        r_prev: Some(p.r_of_phi(&cosine(g, a0)).unwrap()),
        mu: None,
    };
    let next = stepper.step(&st).unwrap();
    let a2 = (4.0 * a1 - a0) / (3.0 + 2.0 * tau * lambda);
    assert!((amplitude(&next.phi) - a2).abs() < 1e-14);

    let rhs = st.phi.lin_comb(4.0, st.phi_prev.as_ref().unwrap(), -1.0).unwrap();
    let sys = RankOneSystem {
        diag: stepper.diag(3.0, 2.0, 0.0),
        gb: Field::zeros(g),
        b: Field::zeros(g),
        rhs,
        weight: tau,
    };
    let dense = dense_solve_oracle(stepper.spectral(), &sys).unwrap();
    assert!(dense.sub(&next.phi).unwrap().values().iter().all(|v| v.abs() < 1e-13));
}

#[test]
fn bdf_schemes_coincide_for_linear_flow() {
    let g = torus(8);
    let stepper = Stepper::new(g, flat_params(1.0, 0.0, 0.05)).unwrap();
    let phi0 = Field::from_fn(g, |x, y| (x + y).cos() + 0.3 * (2.0 * x).sin()).unwrap();
    let p = stepper.params().potential;
    let mut sav = SchemeState::initial(Scheme::SavBdf, phi0.clone(), &p).unwrap();
    let mut isav = SchemeState::initial(Scheme::IsavBdf, phi0, &p).unwrap();
    for _ in 0..5 {
        sav = stepper.step(&sav).unwrap();
        isav = stepper.step(&isav).unwrap();
        assert_eq!(sav.phi, isav.phi);
    }
}

#[test]
fn mass_is_conserved_for_cahn_hilliard() {
    let g = torus(16);
    let phi0 = ex1(g);
    let m0 = phi0.mean();
    for scheme in Scheme::ALL {
        let stepper = Stepper::new(g, ex1_params(1.0, 6.0, 0.05)).unwrap();
        let mut st = SchemeState::initial(scheme, phi0.clone(), &stepper.params().potential).unwrap();
        for _ in 0..20 {
            st = stepper.step(&st).unwrap();
            assert!((st.phi.mean() - m0).abs() < 1e-13, "{scheme}");
        }
    }
}

#[test]
fn all_steppers_satisfy_their_relations() {
    let g = torus(16);
    for alpha in [0.0, 1.0] {
        for scheme in Scheme::ALL {
            let stepper = Stepper::new(g, ex1_params(alpha, 6.0, 0.05)).unwrap();
            let mut st = SchemeState::initial(scheme, ex1(g), &stepper.params().potential).unwrap();
            for _ in 0..4 {
                let next = stepper.step(&st).unwrap();
                let res = scheme_residual(&stepper, &st, &next).unwrap();
                assert!(res.max() < 1e-10, "{scheme} α={alpha}: {res:?}");
                st = next;
            }
        }
    }
}

#[test]
fn isav_be_r_tilde_consistency() {
    let g = torus(16);
    let stepper = Stepper::new(g, ex1_params(0.0, 6.0, 0.05)).unwrap();
    let p = stepper.params().potential;
    let st = SchemeState::initial(Scheme::IsavBe, ex1(g), &p).unwrap();
    let next = stepper.step(&st).unwrap();
    let b = p
        .derivative_field(&st.phi)
        .unwrap()
        .scaled(1.0 / p.r_of_phi(&st.phi).unwrap());
    let inc = next.phi.sub(&st.phi).unwrap();
    let expect = 0.5 * stepper.spectral().inner(&b, &inc).unwrap();
    let got = next.r - p.r_of_phi(&st.phi).unwrap();
    assert!((got - expect).abs() < 1e-14 * (1.0 + expect.abs()));
}

#[test]
fn sav_be_modified_energy_decreases_in_one_step() {
    let g = torus(16);
    let stepper = Stepper::new(g, ex1_params(0.0, 0.0, 0.05)).unwrap();
    let st = SchemeState::initial(Scheme::SavBe, ex1(g), &stepper.params().potential).unwrap();
    let r0 = record_step(&stepper, &st, None).unwrap();
    let next = stepper.step(&st).unwrap();
    let r1 = record_step(&stepper, &next, Some(&r0)).unwrap();
    assert!(r1.e_mod <= r0.e_mod);
}

#[test]
fn isav_be_without_stabilization_still_runs() {
    let g = torus(16);
    let stepper = Stepper::new(g, ex1_params(0.0, 0.0, 0.05)).unwrap();
    let mut st = SchemeState::initial(Scheme::IsavBe, ex1(g), &stepper.params().potential).unwrap();
    for _ in 0..10 {
        st = stepper.step(&st).unwrap();
    }
    st.phi.check_finite("phi").unwrap();
}

#[test]
fn isav_be_dissipates_original_energy_with_adequate_s() {
    let g = torus(16);
    let p = Potential::double_well(1.0, 0.0).unwrap();
    let s = p.suggest_s(-1.6, 1.6).unwrap();
    let stepper = Stepper::new(g, ModelParams::new(0.0, 0.1, s, 0.5, p).unwrap()).unwrap();
    let mut st = SchemeState::initial(Scheme::IsavBe, ex1(g), &p).unwrap();
    for _ in 0..10 {
        let next = stepper.step(&st).unwrap();
        let sp = stepper.spectral();
        let sym = stepper.symbols();
        let e0 = original_energy(sp, sym, &st.phi, &p).unwrap();
        let e1 = original_energy(sp, sym, &next.phi, &p).unwrap();
        let diss = 0.5 * sp.quadratic_form(next.mu.as_ref().unwrap(), &sym.g_sym).unwrap();
        assert!(e1 - e0 + diss <= 1e-10 * (1.0 + e0.abs()));
        st = next;
    }
}

#[test]
fn bootstrap_of_constant_state() {
    let g = torus(8);
    let stepper = Stepper::new(g, flat_params(0.0, 0.0, 0.1)).unwrap();
    let phi0 = Field::constant(g, 0.4);
    let st = SchemeState::initial(Scheme::IsavBdf, phi0.clone(), &stepper.params().potential).unwrap();
    let one = stepper.step(&st).unwrap();
    assert_eq!(one.step, 1);
    assert_eq!(one.phi_prev.as_ref(), Some(&phi0));
    for (a, b) in one.phi.values().iter().zip(phi0.values()) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn bootstrap_sets_sav_scalars() {
    let g = torus(16);
    let stepper = Stepper::new(g, ex1_params(0.0, 6.0, 0.05)).unwrap();
    let p = stepper.params().potential;
    let phi0 = ex1(g);
    let be0 = SchemeState::initial(Scheme::IsavBe, phi0.clone(), &p).unwrap();
    let be1 = stepper.step(&be0).unwrap();
    let bdf = bootstrap_bdf(&phi0, &be1, Scheme::SavBdf, &p).unwrap();
    assert_eq!(bdf.step, 1);
    assert_eq!(bdf.r, be1.r);
    assert_eq!(bdf.r_prev, Some(p.r_of_phi(&phi0).unwrap()));
    assert!(bootstrap_bdf(&phi0, &be1, Scheme::IsavBe, &p).is_err());
}

#[test]
fn extrapolant_failure_is_reported() {
    let g = torus(8);
    let p = Potential::double_well(1.0, 0.0).unwrap();
    let stepper = Stepper::new(g, ModelParams::new(0.0, 0.1, 0.0, 0.1, p).unwrap()).unwrap();
    let st = SchemeState {
        scheme: Scheme::SavBdf,
        step: 1,
        phi: Field::constant(g, 1.0),
        phi_prev: Some(Field::constant(g, 1.0)),
        r: 1.0,
        r_prev: Some(1.0),
        mu: None,
    };
    assert!(matches!(stepper.step(&st), Err(Error::NonPositiveBulk { .. })));
}

#[test]
fn tag_mismatch_is_rejected() {
    let g = torus(8);
    let stepper = Stepper::new(g, flat_params(0.0, 0.0, 0.1)).unwrap();
    let st = SchemeState::initial(Scheme::SavBe, cosine(g, 1.0), &stepper.params().potential).unwrap();
    assert!(stepper.step_isav_be(&st).is_err());
    let mut bdf = st.clone();
    bdf.scheme = Scheme::SavBdf;
    assert!(stepper.step_sav_bdf(&bdf).is_err());
}

#[test]
fn scheme_names_round_trip() {
    for s in Scheme::ALL {
        assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
    }
    assert!("crank-nicolson".parse::<Scheme>().is_err());
}

#[test]
fn parameter_validation() {
    let p = Potential::double_well(1.0, 0.0).unwrap();
    assert!(ModelParams::new(0.0, 0.1, -1.0, 0.1, p).is_err());
    assert!(ModelParams::new(0.0, 0.1, 1.0, 0.0, p).is_err());
    let bad_alpha = ModelParams { alpha: 2.0, ..ModelParams::new(0.0, 0.1, 1.0, 0.1, p).unwrap() };
    assert!(Stepper::new(torus(8), bad_alpha).is_err());
}

mod props {
    use super::*;
    use crate::diagnostics::StepRecord;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn sav_be_modified_energy_never_increases(
            tau in 0.001f64..1.0,
            eps in 0.1f64..1.0,
            a1 in -1.0f64..1.0,
            a2 in -1.0f64..1.0,
            alpha in prop::sample::select(vec![0.0, 1.0]),
        ) {
            let g = torus(16);
            let p = Potential::double_well(eps, 1.0).unwrap();
            let stepper = Stepper::new(g, ModelParams::new(alpha, 0.5, 0.0, tau, p).unwrap()).unwrap();
            let phi0 = Field::from_fn(g, |x, y| a1 * x.sin() * y.cos() + a2 * (2.0 * y).cos()).unwrap();
            let mut st = SchemeState::initial(Scheme::SavBe, phi0, &p).unwrap();
            let mut prev: StepRecord = record_step(&stepper, &st, None).unwrap();
            for _ in 0..5 {
                st = stepper.step(&st).unwrap();
                let rec = record_step(&stepper, &st, Some(&prev)).unwrap();
                prop_assert!(rec.e_mod <= prev.e_mod + 1e-12 * prev.e_mod.abs());
                prev = rec;
            }
        }
    }
}
