mod common;

use common::*;
use qd_cascade::generator::{
    embed_blocks, full_generator, hamiltonian, lindblad_sum, phonon_channels, phonon_liouvillian,
    radiative_liouvillian, rhs_components, rhs_reduced, CoherenceBlock, PopulationBlock, Superoperator,
};
use qd_cascade::linalg::{self, c, cross_dissipator, dissipator, transition, Op9};
use qd_cascade::model::{basis_transform, dressed_parameters, SystemParams};
use qd_cascade::{oracles, BasisKind, Params};

const DIRECT: [BasisKind; 3] = [BasisKind::Bare, BasisKind::Superposition, BasisKind::Dressed];

fn bases_for(p: &Params) -> Vec<BasisKind> {
    BasisKind::ALL
        .into_iter()
        .filter(|b| *b != BasisKind::Dressed || p.omega_w_vanishes().unwrap())
        .collect()
}

#[test]
fn trace_and_hermiticity_preserved() {
    let mut r = rng(1);
    for k in 0..100 {
        let p = if k % 2 == 0 { random_params(&mut r) } else { random_ow_zero(&mut r, true) };
        for basis in bases_for(&p) {
            let l = full_generator(&p, basis).unwrap();
            assert!(l.trace_defect() < 1e-12, "{basis}: {}", l.trace_defect());
            assert!(l.hermiticity_defect() < 1e-12, "{basis}");
        }
    }
}

#[test]
fn generators_covariant_across_bases() {
    let mut r = rng(2);
    for k in 0..100 {
        let p = if k % 2 == 0 { random_params(&mut r) } else { random_ow_zero(&mut r, true) };
        let bases = bases_for(&p);
        for &from in &bases {
            let l = full_generator(&p, from).unwrap();
            for &to in &bases {
                let direct = full_generator(&p, to).unwrap();
                let moved = l.in_basis(to, &p).unwrap();
                assert!(direct.max_abs_diff(&moved) < 1e-10, "{from} -> {to}: {}", direct.max_abs_diff(&moved));
            }
        }
    }
}

#[test]
fn component_pieces_covariant() {
    let mut r = rng(3);
    for _ in 0..50 {
        let p = random_ow_zero(&mut r, true);
        for from in DIRECT {
            for to in DIRECT {
                for build in [phonon_liouvillian::<f64>, radiative_liouvillian::<f64>] {
                    let a = build(&p, from).unwrap().in_basis(to, &p).unwrap();
                    let b = build(&p, to).unwrap();
                    assert!(a.max_abs_diff(&b) < 1e-10);
                }
                let u = basis_transform(from, to, &p).unwrap().matrix;
                let h = u * hamiltonian(&p, from).unwrap() * u.adjoint();
                assert!(linalg::max_abs(&(h - hamiltonian(&p, to).unwrap())) < 1e-10);
            }
        }
    }
}

#[test]
fn phonon_single_channel_route_matches_expanded_forms() {
    let mut r = rng(4);
    for _ in 0..50 {
        let p = random_ow_zero(&mut r, false);
        for basis in DIRECT {
            let channels = phonon_channels(&p, basis).unwrap();
            let single = lindblad_sum(&channels, basis);
            let expanded = phonon_liouvillian(&p, basis).unwrap();
            assert!(single.max_abs_diff(&expanded) < 1e-12, "{basis}");
        }
    }
}

#[test]
fn components_matches_superoperator() {
    let mut r = rng(5);
    for _ in 0..100 {
        let p = random_params(&mut r);
        let l = full_generator(&p, BasisKind::Superposition).unwrap();
        let rho = random_unit_trace_hermitian(&mut r);
        let by_hand = rhs_components(&p, &rho).unwrap();
        assert!(max_abs(&(by_hand - l.apply_matrix(&rho))) < 1e-12);
    }
}

#[test]
fn components_u_state_does_not_decay_without_radiation() {
    let mut r = rng(6);
    let mut p = random_params(&mut r);
    p.big_gamma2 = 0.0;
    p.big_gamma3 = 0.0;
    p.omega1 = 0.0;
    p.omega3 = 0.0;
    let d = rhs_components(&p, &transition(2, 2)).unwrap();
    assert_eq!(d[(2, 2)].re, 0.0);
}

#[test]
fn reduced_blocks_match_full_generator() {
    let mut r = rng(7);
    for _ in 0..100 {
        let p = random_ow_zero(&mut r, false);
        let l = full_generator(&p, BasisKind::Superposition).unwrap();
        let rho = random_unit_trace_hermitian(&mut r);
        let full = l.apply_matrix(&rho);
        let (dp, dq) = rhs_reduced(&p, &PopulationBlock::of(&rho), &CoherenceBlock::of(&rho)).unwrap();
        // Ω_w vanishes only to rounding, so the blocks agree to rounding
        assert!(max_abs(&(embed_blocks(&dp, &dq) - full)) < 1e-11);
    }
}

#[test]
fn reduced_blocks_do_not_mix() {
    let mut r = rng(8);
    let p = random_ow_zero(&mut r, false);
    let rho = random_unit_trace_hermitian(&mut r);
    let pops = PopulationBlock::of(&rho);
    let zero = CoherenceBlock { rho_2w: c(0.0), rho_wu: c(0.0) };
    let (_, dq) = rhs_reduced(&p, &pops, &zero).unwrap();
    assert_eq!(dq, zero);
    let coh = CoherenceBlock::of(&rho);
    let none = PopulationBlock { rho_22: 0.0, rho_ww: 0.0, rho_uu: 0.0, rho_2u: c(0.0) };
    let (dp, _) = rhs_reduced(&p, &none, &coh).unwrap();
    assert_eq!(dp, none);
}

#[test]
fn wu_coherence_decay_without_drive() {
    let p = SystemParams { gamma1: 1.0, gamma3: 2.0, nbar: 0.7, ..Default::default() };
    let pops = PopulationBlock { rho_22: 0.0, rho_ww: 0.5, rho_uu: 0.5, rho_2u: c(0.0) };
    let coh = CoherenceBlock { rho_2w: c(0.0), rho_wu: linalg::ci(0.2, -0.1) };
    let (_, dq) = rhs_reduced(&p, &pops, &coh).unwrap();
    let want = coh.rho_wu * c(-0.7 * 3.0);
    assert!((dq.rho_wu - want).norm() < 1e-15);
}

#[test]
fn pure_detuning_keeps_diagonal_states() {
    let p = SystemParams { gamma1: 1.0, gamma3: 1.0, delta: 2.0, ..Default::default() };
    let h = hamiltonian(&p, BasisKind::Superposition).unwrap();
    let comm = Superoperator { entries: linalg::commutator(&h), basis: BasisKind::Superposition };
    let diag = transition(0, 0) * c(0.2) + transition(1, 1) * c(0.5) + transition(2, 2) * c(0.3);
    assert!(max_abs(&comm.apply_matrix(&diag)) < 1e-15);
}

#[test]
fn closed_form_steady_state_is_stationary() {
    let mut r = rng(9);
    for _ in 0..20 {
        let p = random_ow_zero(&mut r, false);
        let rho = oracles::steady_closed_form(&p).unwrap().bare_matrix();
        let l = full_generator(&p, BasisKind::Bare).unwrap();
        assert!(max_abs(&l.apply_matrix(&rho)) < 1e-10);
    }
}

/// Dressed phonon part in the common rate form, with the rates and cross term
/// taken at face value: γ_k D[A_wk] + n̄/(n̄+1) γ_k D[A_kw]
/// − √(γ_mγ_n)(cross(A_wm, A_wn) + h.c.).
fn dressed_phonon_rate_form(p: &Params) -> Op9<f64> {
    let d = dressed_parameters(p).unwrap();
    let (a_wm, a_wn) = (transition::<f64>(0, 1), transition::<f64>(0, 2));
    let (a_mw, a_nw) = (transition::<f64>(1, 0), transition::<f64>(2, 0));
    let ratio = p.nbar / (p.nbar + 1.0);
    dissipator(&a_wm) * c(d.gamma_m)
        + dissipator(&a_wn) * c(d.gamma_n)
        + (dissipator(&a_mw) * c(d.gamma_m) + dissipator(&a_nw) * c(d.gamma_n)) * c(ratio)
        - (cross_dissipator(&a_wm, &a_wn) + cross_dissipator(&a_wn, &a_wm)) * c((d.gamma_m * d.gamma_n).sqrt())
}

#[test]
fn rate_form_dressed_generator_misses_superposition_dynamics() {
    let p = oracles_params();
    let derived = phonon_liouvillian(&p, BasisKind::Dressed).unwrap();
    let rate_form = dressed_phonon_rate_form(&p);
    let gap = linalg::max_abs(&(derived.entries - rate_form));
    assert!(gap > 0.1, "gap {gap}");
    let from_super = phonon_liouvillian(&p, BasisKind::Superposition).unwrap().in_basis(BasisKind::Dressed, &p).unwrap();
    assert!(derived.max_abs_diff(&from_super) < 1e-12);
}

fn oracles_params() -> Params {
    let p = SystemParams { gamma1: 1.0, gamma3: 3.0, omega3: 2.0, delta: 1.5, nbar: 0.5, ..Default::default() };
    qd_cascade::DriveCase::OmegaWZero.apply(&p).unwrap()
}

#[test]
fn dressed_rates_relate_to_generator_rates() {
    // the D[A_wm] coefficient is γ_m/2, so |m⟩ empties into |w⟩ at γ_m
    let p = oracles_params();
    let d = dressed_parameters(&p).unwrap();
    let l = phonon_liouvillian(&p, BasisKind::Dressed).unwrap();
    let out = l.apply_matrix(&transition(1, 1));
    assert!((out[(0, 0)].re - d.gamma_m).abs() < 1e-12);
    assert!((out[(1, 1)].re + d.gamma_m).abs() < 1e-12);
}
