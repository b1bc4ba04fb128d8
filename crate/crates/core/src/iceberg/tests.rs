use super::*;
use crate::sim::{build_qpe_circuit, exact_outcome_prob};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn random_logical(rng: &mut ChaCha8Rng, fourth_plus: bool) -> StateVector {
    let dim = if fourth_plus { 8 } else { 16 };
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    if !fourth_plus {
        return StateVector::from_amplitudes(v).unwrap();
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let full = v.iter().flat_map(|&a| [a * r, a * r]).collect();
    StateVector::from_amplitudes(full).unwrap()
}

fn params(k: u32, beta: f64, init: InitKind) -> QpeParams {
    QpeParams {
        k,
        beta,
        t: 0.1 * PI,
        s: 1,
        init,
        t_split: None,
    }
}

fn letter_word(q: usize, p: Pauli) -> PauliString {
    PauliString::single(q, p)
}

#[test]
fn code_words_are_stabilized() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let enc = encode_logical(&random_logical(&mut rng, false)).unwrap();
        assert!((enc.expectation(&stabilizer_x()).unwrap() - 1.0).abs() < 1e-12);
        assert!((enc.expectation(&stabilizer_z()).unwrap() - 1.0).abs() < 1e-12);
    }
    assert!(stabilizer_x().commutes_with(&stabilizer_z()));
}

#[test]
fn logical_paulis_match_unencoded() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut states = vec![logical_initial_state(InitKind::HartreeFock, (0.0, 0.0)).unwrap()];
    states.extend((0..5).map(|_| random_logical(&mut rng, false)));
    for psi in states {
        let enc = encode_logical(&psi).unwrap();
        for i in 1..=4 {
            for (logical, p) in [
                (logical_x(i).unwrap(), Pauli::X),
                (logical_z(i).unwrap(), Pauli::Z),
                (logical_y(i).unwrap(), Pauli::Y),
            ] {
                let want = psi.expectation(&letter_word(i - 1, p)).unwrap();
                let got = enc.expectation(&logical).unwrap();
                assert!((got - want).abs() < 1e-12, "logical {i} {p:?}");
            }
        }
        let back = decode_logical(&enc).unwrap();
        assert!((back.fidelity(&psi) - 1.0).abs() < 1e-12);
    }
    assert!(logical_x(0).is_err() && logical_z(5).is_err());
}

#[test]
fn encoded_plus_zero_zero_plus() {
    let enc = encode_logical_state(InitKind::HartreeFock).unwrap();
    let expect = [
        (1, Pauli::X, 1.0),
        (2, Pauli::Z, 1.0),
        (3, Pauli::Z, 1.0),
        (4, Pauli::X, 1.0),
    ];
    for (i, p, v) in expect {
        let op = if p == Pauli::X {
            logical_x(i)
        } else {
            logical_z(i)
        }
        .unwrap();
        assert!((enc.expectation(&op).unwrap() - v).abs() < 1e-12);
    }
}

#[test]
fn rotated_exact_state_has_unencoded_correlator() {
    let enc = encode_logical_state(InitKind::ExactEigenstate).unwrap();
    let mut plain = StateVector::new(4).unwrap();
    plain.apply_clifford(Clifford1::H, 0).unwrap();
    plain.apply_clifford(Clifford1::H, 3).unwrap();
    plain
        .apply_pauli_exp(&"Y1 X2".parse().unwrap(), EXACT_ALPHA)
        .unwrap();
    let want = plain.expectation(&"Y1 X2".parse().unwrap()).unwrap();
    let (_, op) = logical_y(2).unwrap().mul(&logical_x(3).unwrap());
    let got = enc.expectation(&op.unwrap()).unwrap();
    assert!((got - want).abs() < 1e-12);
    let logical = |i: usize, p: Pauli| {
        match p {
            Pauli::X => logical_x(i),
            Pauli::Y => logical_y(i),
            Pauli::Z => logical_z(i),
        }
        .unwrap()
    };
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            let (_, op) = logical(2, a).mul(&logical(3, b));
            let got = enc.expectation(&op.unwrap()).unwrap();
            let want = plain
                .expectation(&PauliString::new(vec![(1, a), (2, b)]).unwrap())
                .unwrap();
            assert!((got - want).abs() < 1e-12, "{a:?}{b:?}");
        }
    }
    let zz = plain.expectation(&"Z1 Z2".parse().unwrap()).unwrap();
    assert!((zz - 1.0).abs() < 1e-12);
    let yy = plain.expectation(&"Y1 Y2".parse().unwrap()).unwrap();
    assert!((yy + EXACT_ALPHA.sin()).abs() < 1e-12);
}

fn apply_all(state: &mut StateVector, gates: &[GateOp]) {
    execute(state, gates, &NoiseModel::noiseless(), None).unwrap();
}

#[test]
fn compiled_ctrl_u_is_logically_transparent() {
    let h = SpinHamiltonian::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tau = 0.1 * PI;
    let compiled = compile_logical_ctrl_u(&h, tau);
    assert_eq!(compiled.len(), 6);
    assert_eq!(compiled.iter().map(GateOp::cost_2q).sum::<u32>(), 6);
    for g in &compiled {
        let GateOp::PauliExp { pauli, .. } = g else {
            panic!()
        };
        assert_eq!(pauli.weight(), 2);
        assert!(pauli.commutes_with(&stabilizer_x()) && pauli.commutes_with(&stabilizer_z()));
    }
    for _ in 0..50 {
        let psi = random_logical(&mut rng, true);
        let mut physical = encode_logical(&psi).unwrap();
        apply_all(&mut physical, &compiled);
        let mut logical = psi.clone();
        apply_all(&mut logical, &logical_reference_ctrl_u(&h, tau));
        let want = encode_logical(&logical).unwrap();
        assert!(physical.fidelity(&want) > 1.0 - 1e-10);
    }
}

#[test]
fn compiled_ctrl_v_is_logically_transparent() {
    let h = SpinHamiltonian::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let compiled = compile_logical_ctrl_v(&h, 17, 0.1 * PI, 0.7);
    assert_eq!(compiled.iter().map(GateOp::cost_2q).sum::<u32>(), 3);
    for g in &compiled {
        let GateOp::PauliExp { pauli, .. } = g else {
            panic!()
        };
        assert!(pauli.commutes_with(&stabilizer_x()) && pauli.commutes_with(&stabilizer_z()));
    }
    for _ in 0..50 {
        let psi = random_logical(&mut rng, false);
        let mut physical = encode_logical(&psi).unwrap();
        apply_all(&mut physical, &compiled);
        let mut logical = psi.clone();
        apply_all(
            &mut logical,
            &logical_reference_ctrl_v(&h, 17, 0.1 * PI, 0.7),
        );
        let want = encode_logical(&logical).unwrap();
        // Agreement up to a global phase.
        assert!(physical.fidelity(&want) > 1.0 - 1e-10);
    }
}

#[test]
fn reference_gates_follow_unencoded_circuit_in_rotated_frame() {
    // S†⊗S† on the system turns the unencoded YY rotation into XX.
    let h = SpinHamiltonian::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tau = 0.1 * PI;
    let psi = random_logical(&mut rng, true);
    let mut a = psi.clone();
    let unencoded: Vec<GateOp> = {
        let mut g = Vec::new();
        g.extend(controlled_pauli_exp(
            0,
            &PauliString::uniform(&[1, 2], Pauli::Y),
            h.h[2] * tau,
        ));
        g.extend(controlled_pauli_exp(
            0,
            &PauliString::single(2, Pauli::Z),
            h.h[1] * tau,
        ));
        g.extend(controlled_pauli_exp(
            0,
            &PauliString::single(1, Pauli::Z),
            h.h[0] * tau,
        ));
        g
    };
    apply_all(&mut a, &unencoded);
    a.apply_clifford(Clifford1::Sdg, 1).unwrap();
    a.apply_clifford(Clifford1::Sdg, 2).unwrap();
    let mut b = psi;
    b.apply_clifford(Clifford1::Sdg, 1).unwrap();
    b.apply_clifford(Clifford1::Sdg, 2).unwrap();
    apply_all(&mut b, &logical_reference_ctrl_u(&h, tau));
    assert!((a.fidelity(&b) - 1.0).abs() < 1e-12);
}

#[test]
fn gate_counts() {
    let h = SpinHamiltonian::default();
    let c = build_encoded_qpe(
        &h,
        &params(120, 0.0, InitKind::HartreeFock),
        EncodedOptions::default(),
    )
    .unwrap();
    assert_eq!(c.two_qubit_count, 920);
    assert_eq!(
        c.two_qubit_count,
        encoded_gate_count(120, 8, InitKind::HartreeFock)
    );
    let c = build_encoded_qpe(
        &h,
        &params(8, 0.0, InitKind::HartreeFock),
        EncodedOptions::default(),
    )
    .unwrap();
    assert_eq!(c.two_qubit_count, 80);
    let c = build_encoded_qpe(
        &h,
        &params(13, 0.0, InitKind::ExactEigenstate),
        EncodedOptions::default(),
    )
    .unwrap();
    assert_eq!(c.two_qubit_count, 6 * 13 + 12 + 20 + 5);
    assert_eq!(c.syndrome_points().len(), 1);
    assert_eq!(c.exit_points().len(), 3);
    let c = build_encoded_qpe(
        &h,
        &params(16, 0.0, InitKind::HartreeFock),
        EncodedOptions {
            f: 8,
            insert_sx: true,
        },
    )
    .unwrap();
    assert_eq!(
        c.segments
            .iter()
            .filter(|s| **s == Segment::InsertSx)
            .count(),
        2
    );
    assert!(build_encoded_qpe(
        &h,
        &params(16, 0.0, InitKind::HartreeFock),
        EncodedOptions {
            f: 0,
            insert_sx: true
        }
    )
    .is_err());
}

#[test]
fn discard_model_values() {
    assert!((discard_rate_model(120, 8, 1.6e-3, InitKind::HartreeFock) - 0.77).abs() < 0.005);
    assert_eq!(crate::sim::global_error_rate(1.6e-3, 0), 0.0);
    let n = encoded_gate_count(40, 8, InitKind::HartreeFock);
    assert_eq!(n, 240 + 60 + 20);
    let d40 = 1.0 - (1.0 - 1.6e-3f64).powi(n as i32);
    assert!((discard_rate_model(40, 8, 1.6e-3, InitKind::HartreeFock) - d40).abs() < 1e-12);
}

#[test]
fn noiseless_encoded_matches_unencoded() {
    let h = SpinHamiltonian::default();
    for init in [InitKind::HartreeFock, InitKind::ExactEigenstate] {
        for k in [1, 8, 13, 40] {
            for beta in [-2.0, 0.0, 1.3] {
                let p = params(k, beta, init);
                let enc = build_encoded_qpe(&h, &p, EncodedOptions::default()).unwrap();
                let plain = build_qpe_circuit(&h, &p).unwrap();
                let a = encoded_outcome_prob(&enc).unwrap();
                let b = exact_outcome_prob(&plain).unwrap();
                assert!((a - b).abs() < 1e-8, "{init:?} k={k} β={beta}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn split_schedule_encoded_matches_unencoded() {
    let h = SpinHamiltonian::default();
    let p = QpeParams {
        k: 12,
        beta: 0.3,
        t: 0.1 * PI,
        s: 1,
        init: InitKind::ExactEigenstate,
        t_split: Some((-0.05 * PI, 0.25 * PI)),
    };
    let enc = build_encoded_qpe(&h, &p, EncodedOptions::default()).unwrap();
    let plain = build_qpe_circuit(&h, &p).unwrap();
    assert!(
        (encoded_outcome_prob(&enc).unwrap() - exact_outcome_prob(&plain).unwrap()).abs() < 1e-8
    );
}

#[test]
fn sx_insertion_is_inert_without_noise() {
    let h = SpinHamiltonian::default();
    let p = params(24, 0.9, InitKind::HartreeFock);
    let with = build_encoded_qpe(
        &h,
        &p,
        EncodedOptions {
            f: 8,
            insert_sx: true,
        },
    )
    .unwrap();
    let without = build_encoded_qpe(
        &h,
        &p,
        EncodedOptions {
            f: 8,
            insert_sx: false,
        },
    )
    .unwrap();
    assert!(
        (encoded_outcome_prob(&with).unwrap() - encoded_outcome_prob(&without).unwrap()).abs()
            < 1e-12
    );
    assert_eq!(with.two_qubit_count, without.two_qubit_count);
}

#[test]
fn every_single_qubit_error_is_detected() {
    let h = SpinHamiltonian::default();
    let circ = build_encoded_qpe(
        &h,
        &params(16, 0.4, InitKind::HartreeFock),
        EncodedOptions::default(),
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let gate_segments: Vec<usize> = circ
        .segments
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s, Segment::Gates(_)))
        .map(|(i, _)| i)
        .collect();
    for &after in &gate_segments {
        for q in 0..N_PHYSICAL {
            for p in Pauli::ALL {
                let faulty = circ.with_injected_error(after, PauliString::single(q, p));
                let rec = run_encoded_shot(&faulty, &NoiseModel::noiseless(), &mut rng).unwrap();
                assert!(rec.discarded, "{p:?} on {q} after segment {after}");
                assert!(rec.m.is_none());
                let profile = coherent_profile(&faulty, &NoiseModel::noiseless()).unwrap();
                assert!(profile.acceptance() < 1e-20);
            }
        }
    }
}

#[test]
fn x_error_mid_block_trips_next_syndrome() {
    let h = SpinHamiltonian::default();
    let circ = build_encoded_qpe(
        &h,
        &params(16, 0.4, InitKind::HartreeFock),
        EncodedOptions::default(),
    )
    .unwrap();
    let faulty = circ.with_injected_error(1, PauliString::single(2, Pauli::X));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rec = run_encoded_shot(&faulty, &NoiseModel::noiseless(), &mut rng).unwrap();
    assert_eq!(rec.stage, DiscardStage::Syndrome(0));
    assert_eq!(rec.g2q, circ.gates_through(circ.syndrome_points()[0]));
}

#[test]
fn noiseless_shots_never_discard() {
    let h = SpinHamiltonian::default();
    let circ = build_encoded_qpe(
        &h,
        &params(10, 0.5, InitKind::ExactEigenstate),
        EncodedOptions::default(),
    )
    .unwrap();
    let p0 = encoded_outcome_prob(&circ).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 4000;
    let records: Vec<ShotRecord> = (0..n)
        .map(|_| run_encoded_shot(&circ, &NoiseModel::noiseless(), &mut rng).unwrap())
        .collect();
    assert!(records
        .iter()
        .all(|r| !r.discarded && r.g2q == circ.two_qubit_count));
    let zeros = records.iter().filter(|r| r.m == Some(0)).count() as f64;
    let sigma = (n as f64 * p0 * (1.0 - p0)).sqrt();
    assert!((zeros - n as f64 * p0).abs() < 3.0 * sigma);
    assert_eq!(conditional_exit_ratio(&records, &circ), Some(1.0));
}

#[test]
fn exit_ratio_when_all_exit_at_first_syndrome() {
    let h = SpinHamiltonian::default();
    let circ = build_encoded_qpe(
        &h,
        &params(40, 0.0, InitKind::HartreeFock),
        EncodedOptions::default(),
    )
    .unwrap();
    let first = circ.gates_through(circ.syndrome_points()[0]);
    let rec = ShotRecord {
        m: None,
        discarded: true,
        stage: DiscardStage::Syndrome(0),
        g2q: first,
        k: 40,
        beta: 0.0,
    };
    let ratio = conditional_exit_ratio(&[rec; 5], &circ).unwrap();
    assert!((ratio - f64::from(first) / f64::from(circ.two_qubit_count)).abs() < 1e-15);
    assert_eq!(conditional_exit_ratio(&[], &circ), None);
}

#[test]
fn global_mode_discards_at_model_rate() {
    let h = SpinHamiltonian::default();
    let circ = build_encoded_qpe(
        &h,
        &params(60, 0.0, InitKind::HartreeFock),
        EncodedOptions::default(),
    )
    .unwrap();
    let noise = NoiseModel::depolarizing(1.6e-3, NoiseMode::GlobalAnalytic).unwrap();
    let profile = coherent_profile(&circ, &noise).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 20_000;
    let records: Vec<ShotRecord> = (0..n)
        .map(|_| sample_global(&circ, &profile, noise.p2, &mut rng))
        .collect();
    let d = discard_fraction(&records).unwrap();
    let model = discard_rate_model(60, 8, 1.6e-3, InitKind::HartreeFock);
    assert!((d - model).abs() < 4.0 * (model * (1.0 - model) / n as f64).sqrt());
}

#[test]
fn shot_records_round_trip() {
    let rec = ShotRecord {
        m: None,
        discarded: true,
        stage: DiscardStage::Syndrome(3),
        g2q: 77,
        k: 40,
        beta: -1.5,
    };
    let json = serde_json::to_string(&rec).unwrap();
    assert!(json.contains(r#""stage":"syndrome_3""#) && json.contains(r#""m":null"#));
    assert_eq!(serde_json::from_str::<ShotRecord>(&json).unwrap(), rec);
    for stage in [DiscardStage::None, DiscardStage::Prep, DiscardStage::Final] {
        assert_eq!(stage.to_string().parse::<DiscardStage>().unwrap(), stage);
    }
    assert!("syndrome_x".parse::<DiscardStage>().is_err());
}
