use dipolar_qlm::evolve::{evolve_krylov, inner, norm_sqr, time_evolve, time_grid, EvolutionRecord, EvolveOptions, SpectralPropagator, SCHEMA_VERSION};
use dipolar_qlm::linalg::Spectrum;
use dipolar_qlm::qlm::{build_hamiltonian, string_preset, LinkSpin, QlmBasis, QlmParams, StringDirection};
use dipolar_qlm::sparse::SparseOperator;
use num_complex::Complex64;
use proptest::prelude::*;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `exp(−iHt) ψ` by a truncated Taylor series on short substeps.
fn taylor_expm(h: &SparseOperator, psi: &[Complex64], t: f64) -> Vec<Complex64> {
    let steps = ((h.norm_bound() * t.abs()).ceil() as usize).max(1) * 4;
    let dt = t / steps as f64;
    let mut out = psi.to_vec();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..40 {
            term = h.matvec_complex(&term).into_iter().map(|z| -I * z * dt / k as f64).collect();
            for (a, b) in acc.iter_mut().zip(&term) {
                *a += b;
            }
        }
        out = acc;
    }
    out
}

/// Distance between two states after aligning their global phase.
fn phase_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let ov = inner(a, b);
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
    a.iter().zip(b).map(|(x, y)| (x * phase - y).norm_sqr()).sum::<f64>().sqrt()
}

fn random_symmetric(n: usize, seed: &[f64]) -> SparseOperator {
    let mut t = vec![];
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            let v = seed[k % seed.len()] * ((i * 7 + j * 3) as f64).cos();
            k += 1;
            t.push((i, j, v));
            if i != j {
                t.push((j, i, v));
            }
        }
    }
    SparseOperator::from_triplets(n, t)
}

fn normalized(v: Vec<Complex64>) -> Vec<Complex64> {
    let n = norm_sqr(&v).sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn link_model(spin: LinkSpin, n: usize, m: f64) -> (QlmBasis, SparseOperator, Vec<Complex64>) {
    let s = string_preset(spin, n, StringDirection::Right).unwrap();
    let basis = QlmBasis::enumerate(spin, n, Some(*s.flux2.last().unwrap()), Some(n)).unwrap();
    let h = build_hamiltonian(&QlmParams { spin, n_cells: n, w: 1.0, m, g2: 0.5 }, &basis).unwrap();
    let mut psi = vec![Complex64::new(0.0, 0.0); basis.dim()];
    psi[basis.index_of(&s).unwrap()] = Complex64::new(1.0, 0.0);
    (basis, h, psi)
}

#[test]
fn spectral_propagator_matches_taylor_series() {
    let h = random_symmetric(6, &[0.3, -1.1, 0.7, 2.0, -0.4]);
    let psi = normalized((0..6).map(|k| Complex64::new(1.0 + k as f64, 0.5 - k as f64)).collect());
    let times = [0.0, 0.5, 1.7, 4.0];
    let prop = SpectralPropagator::new(&h, &psi, 1.0).unwrap();
    for (t, got) in times.iter().zip(prop.states(&times)) {
        assert!(phase_distance(&taylor_expm(&h, &psi, *t), &got) < 1e-10, "t = {t}");
    }
    let e = h.expectation(&psi);
    assert!((prop.energy() - e).abs() < 1e-12);
    assert!((prop.captured_weight() - 1.0).abs() < 1e-12);
}

#[test]
fn amplitudes_select_rows_of_full_states() {
    let (_, h, psi) = link_model(LinkSpin::Half, 2, 0.3);
    let times = time_grid(3.0, 7).unwrap();
    let prop = SpectralPropagator::new(&h, &psi, 1.0).unwrap();
    let full = prop.states(&times);
    let rows = [0, 2, 3];
    for (a, f) in prop.amplitudes(&rows, &times).iter().zip(&full) {
        for (r, &k) in rows.iter().enumerate() {
            assert!((a[r] - f[k]).norm() < 1e-14);
        }
    }
}

#[test]
fn time_scale_stretches_the_clock() {
    let (_, h, psi) = link_model(LinkSpin::Half, 2, 0.3);
    let slow = SpectralPropagator::new(&h, &psi, 0.5).unwrap().states(&[2.0]);
    let fast = SpectralPropagator::new(&h, &psi, 1.0).unwrap().states(&[1.0]);
    assert!(phase_distance(&slow[0], &fast[0]) < 1e-12);
}

#[test]
fn energy_window_captures_the_initial_state() {
    let (_, h, psi) = link_model(LinkSpin::One, 2, 0.25);
    let full = SpectralPropagator::new(&h, &psi, 1.0).unwrap();
    let e = full.energy();
    let windowed = SpectralPropagator::from_dense(h.to_dense(), &psi, 1.0, Spectrum::Window { lo: e - 50.0, hi: e + 50.0 }).unwrap();
    assert!((windowed.captured_weight() - 1.0).abs() < 1e-12);
    let times = [0.0, 1.0, 5.0];
    for (a, b) in windowed.states(&times).iter().zip(full.states(&times)) {
        assert!(phase_distance(a, &b) < 1e-10);
    }
}

#[test]
fn krylov_agrees_with_dense_on_the_link_model() {
    let (_, h, psi) = link_model(LinkSpin::One, 2, 0.25);
    let times = time_grid(10.0, 11).unwrap();
    let dense = time_evolve(&h, &psi, &times, EvolveOptions::default()).unwrap();
    let krylov = evolve_krylov(&h, &psi, &times, EvolveOptions { krylov_dim: 12, ..EvolveOptions::default() }).unwrap();
    let forced = time_evolve(&h, &psi, &times, EvolveOptions { dense_cap: 0, ..EvolveOptions::default() }).unwrap();
    for ((d, k), f) in dense.iter().zip(&krylov).zip(&forced) {
        assert!(phase_distance(d, k) < 1e-8);
        assert_eq!(k, f);
    }
}

#[test]
fn bad_inputs_are_rejected() {
    let (_, h, psi) = link_model(LinkSpin::Half, 1, 0.3);
    let twice: Vec<Complex64> = psi.iter().map(|z| z * 2.0).collect();
    assert_eq!(time_evolve(&h, &twice, &[1.0], EvolveOptions::default()).unwrap_err().kind(), "invalid_argument");
    assert_eq!(time_evolve(&h, &psi[1..], &[1.0], EvolveOptions::default()).unwrap_err().kind(), "basis_mismatch");
    let skew = SparseOperator::from_triplets(psi.len(), vec![(0, 1, 1.0)]);
    assert!(time_evolve(&skew, &psi, &[1.0], EvolveOptions::default()).is_err());
    assert!(evolve_krylov(&h, &psi, &[1.0, 0.5], EvolveOptions::default()).is_err());
    assert!(time_grid(1.0, 1).is_err());
    assert!(time_grid(0.0, 5).is_err());
    assert_eq!(time_grid(2.0, 5).unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
}

#[test]
fn record_observables_and_serialization() {
    let (basis, h, psi) = link_model(LinkSpin::Half, 2, 0.3);
    let times = time_grid(2.0, 5).unwrap();
    let states = time_evolve(&h, &psi, &times, EvolveOptions::default()).unwrap();
    let rec = EvolutionRecord::from_amplitudes("qlm", &basis, &times, &states, Some(&states)).unwrap();
    assert_eq!(rec.schema_version, SCHEMA_VERSION);
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
    assert!(close(&rec.site_densities[0], &[1.0, 0.0, 1.0, 0.0]));
    assert!(close(&rec.link_flux[0], &[0.5; 4]));
    assert!((rec.flux_sum[0] - 1.5).abs() < 1e-12);
    for ti in 0..times.len() {
        assert!((rec.norm[ti] - 1.0).abs() < 1e-12);
        assert!(rec.gauss_g[ti] < 1e-12);
        assert!((rec.fidelity.as_ref().unwrap()[ti] - 1.0).abs() < 1e-12);
    }
    assert!((rec.mean_fidelity().unwrap() - 1.0).abs() < 1e-12);

    let mut buf = Vec::new();
    rec.write_csv(&mut buf, Some(2.5)).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,t_seconds,n1,n2,n3,n4,E1,E2,E3,E4,flux_sum,gauss_g,norm,fidelity");
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row.len(), 14);
    assert_eq!(text.lines().count(), times.len() + 1);
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[1], 5.0);

    let json: serde_json::Value = serde_json::from_str(&rec.to_json().unwrap()).unwrap();
    assert_eq!(json["schema_version"], SCHEMA_VERSION);
    assert_eq!(json["model"], "qlm");
    let back: EvolutionRecord = serde_json::from_value(json).unwrap();
    assert_eq!(back.flux_sum, rec.flux_sum);

    assert!(EvolutionRecord::from_amplitudes("qlm", &basis, &times[1..], &states, None).is_err());
    let plain = EvolutionRecord::from_amplitudes("qlm", &basis, &times, &states, None).unwrap();
    assert!(!plain.csv_header(false).contains(&"fidelity".to_string()));
    assert_eq!(plain.mean_fidelity(), None);
}

proptest! {
    #[test]
    fn evolution_is_unitary_and_conserves_energy(m in -2.0f64..2.0, t in 0.0f64..20.0, one in any::<bool>()) {
        let spin = if one { LinkSpin::One } else { LinkSpin::Half };
        let (_, h, psi) = link_model(spin, 2, m);
        let e0 = h.expectation(&psi);
        for opts in [EvolveOptions::default(), EvolveOptions { dense_cap: 0, ..EvolveOptions::default() }] {
            let out = time_evolve(&h, &psi, &[t], opts).unwrap();
            prop_assert!((norm_sqr(&out[0]) - 1.0).abs() < 1e-9);
            prop_assert!((h.expectation(&out[0]) - e0).abs() < 1e-9);
        }
    }
}
