use dipolar_qlm::dipole::RotLevel;
use dipolar_qlm::dmh::{
    a_count_diag, build_dmh_hamiltonian, dmh_basis_for, leading_diag, levels_to_qlm, neighbourhood, qlm_to_levels, DmhBasis, DmhOptions, Embedding,
};
use dipolar_qlm::evolve::norm_sqr;
use dipolar_qlm::params::{allowed_levels, assign_energies, molecule_role, ChainGeometry, EnergyLadder, ParameterSet};
use dipolar_qlm::qlm::{string_preset, LinkSpin, QlmBasis, StringDirection};
use num_complex::Complex64;
use proptest::prelude::*;

fn defaults(spin: LinkSpin, n: usize) -> ParameterSet {
    let ladder = EnergyLadder::default_for(spin);
    let gamma = if spin == LinkSpin::One { 1.5 } else { 1.0 };
    let geometry = ChainGeometry::default_for(spin, &ladder, gamma);
    assign_energies(spin, n, 0.3, 0.5, ladder, geometry).unwrap()
}

fn sector(spin: LinkSpin, n: usize) -> QlmBasis {
    let preset = string_preset(spin, n, StringDirection::Right).unwrap();
    QlmBasis::enumerate(spin, n, Some(*preset.flux2.last().unwrap()), Some(n)).unwrap()
}

/// Every level assignment allowed by the roles, filtered afterwards.
fn brute_force_count(spin: LinkSpin, n: usize, n_a: Option<usize>, frozen: Option<RotLevel>) -> usize {
    let n_mol = 4 * n;
    let choices: Vec<&[RotLevel]> = (0..n_mol).map(|i| allowed_levels(spin, molecule_role(i).0)).collect();
    let total: usize = choices.iter().map(|c| c.len()).product();
    let mut count = 0;
    for mut code in 0..total {
        let mut levels = Vec::with_capacity(n_mol);
        for c in &choices {
            levels.push(c[code % c.len()]);
            code /= c.len();
        }
        if let Some(k) = n_a {
            if levels.iter().filter(|&&l| l == RotLevel::A).count() != k {
                continue;
            }
        }
        if let Some(f) = frozen {
            if levels[n_mol - 1] != f {
                continue;
            }
        }
        count += 1;
    }
    count
}

#[test]
fn basis_sizes_match_brute_force() {
    assert_eq!(DmhBasis::enumerate(LinkSpin::Half, 1, None, None).unwrap().dim(), 36);
    for spin in [LinkSpin::Half, LinkSpin::One] {
        for n in 1..=2 {
            for n_a in [None, Some(n), Some(2 * n)] {
                for frozen in [None, Some(RotLevel::D)] {
                    let b = DmhBasis::enumerate(spin, n, n_a, frozen).unwrap();
                    assert_eq!(b.dim(), brute_force_count(spin, n, n_a, frozen), "S={} N={n} {n_a:?} {frozen:?}", spin.value());
                }
            }
        }
    }
}

#[test]
fn basis_rejects_bad_arguments() {
    assert!(DmhBasis::enumerate(LinkSpin::Half, 0, None, None).is_err());
    assert!(DmhBasis::enumerate(LinkSpin::Half, 9, None, None).is_err());
    assert!(DmhBasis::enumerate(LinkSpin::Half, 1, None, Some(RotLevel::C)).is_err());
}

#[test]
fn basis_order_and_labels() {
    let b = DmhBasis::enumerate(LinkSpin::Half, 1, None, None).unwrap();
    assert_eq!(b.label(0), "aaaa");
    for k in 0..b.dim() {
        assert_eq!(b.index_of(&b.levels(k)), Some(k));
        if k > 0 {
            assert!(b.label(k - 1) < b.label(k));
        }
    }
    assert_eq!(b.index_of(&[RotLevel::A]), None);
    let sub = b.subset(&[5, 2]);
    assert_eq!(sub.dim(), 2);
    assert_eq!(sub.label(0), b.label(5));
    assert_eq!(sub.index_of(&b.levels(2)), Some(1));
}

#[test]
fn qlm_states_map_to_levels_and_back() {
    for spin in [LinkSpin::Half, LinkSpin::One] {
        let qlm = QlmBasis::enumerate(spin, 2, None, None).unwrap();
        for s in qlm.states() {
            let levels = qlm_to_levels(spin, s).unwrap();
            assert_eq!(levels_to_qlm(spin, &levels).as_ref(), Some(s));
        }
    }
    // A site in a link-only level has no QLM meaning.
    assert_eq!(levels_to_qlm(LinkSpin::Half, &[RotLevel::D, RotLevel::B]), None);
    let s = string_preset(LinkSpin::Half, 1, StringDirection::Right).unwrap();
    let labels: String = qlm_to_levels(LinkSpin::Half, &s).unwrap().iter().map(|l| l.label()).collect();
    assert_eq!(labels, "adbd");
}

#[test]
fn embedding_is_an_isometry_with_projection_as_inverse() {
    for spin in [LinkSpin::Half, LinkSpin::One] {
        let qlm = sector(spin, 2);
        let dmh = dmh_basis_for(&qlm).unwrap();
        let emb = Embedding::new(&qlm, &dmh).unwrap();
        assert_eq!(emb.qlm_dim(), qlm.dim());
        let mut seen = vec![false; dmh.dim()];
        for &t in &emb.targets {
            assert!(!seen[t]);
            seen[t] = true;
        }
        let psi: Vec<Complex64> = (0..qlm.dim()).map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.3).cos())).collect();
        let up = emb.embed(&psi).unwrap();
        assert!((norm_sqr(&up) - norm_sqr(&psi)).abs() < 1e-12);
        assert_eq!(emb.project(&up).unwrap(), psi);
        assert!(emb.embed(&psi[1..]).is_err());
        assert!(emb.project(&psi).is_err());
    }
    let other = DmhBasis::enumerate(LinkSpin::Half, 3, Some(3), Some(RotLevel::D)).unwrap();
    assert!(Embedding::new(&sector(LinkSpin::Half, 2), &other).is_err());
}

#[test]
fn hamiltonian_matches_one_body_and_pair_couplings() {
    for spin in [LinkSpin::Half, LinkSpin::One] {
        let p = defaults(spin, 1);
        let basis = DmhBasis::enumerate(spin, 1, Some(1), None).unwrap();
        let h = build_dmh_hamiltonian(&p, &basis, DmhOptions::default()).unwrap();
        assert!(h.asymmetry() < 1e-14);
        for k in 0..basis.dim() {
            let from = basis.levels(k);
            let diag: f64 = from.iter().enumerate().map(|(i, &l)| p.one_body(i, l).unwrap()).sum();
            assert!((h.get(k, k) - diag).abs() < 1e-9);
            for l in 0..basis.dim() {
                if l == k {
                    continue;
                }
                let to = basis.levels(l);
                let changed: Vec<usize> = (0..4).filter(|&i| from[i] != to[i]).collect();
                let want = if changed.len() == 2 {
                    let (i, j) = (changed[0], changed[1]);
                    p.chain.coupling(i, j, from[i], from[j], to[i], to[j])
                } else {
                    0.0
                };
                assert!((h.get(l, k) - want).abs() < 1e-14, "{} -> {}", basis.label(k), basis.label(l));
            }
        }
    }
}

#[test]
fn range_cutoff_drops_distant_pairs() {
    let p = defaults(LinkSpin::Half, 2);
    let qlm = sector(LinkSpin::Half, 2);
    let basis = dmh_basis_for(&qlm).unwrap();
    let full = build_dmh_hamiltonian(&p, &basis, DmhOptions::default()).unwrap();
    let near = build_dmh_hamiltonian(&p, &basis, DmhOptions { max_range: Some(1.01) }).unwrap();
    assert!(near.nnz() < full.nnz());
    for (i, j, v) in near.triplets() {
        assert_eq!(full.get(i, j), v);
    }
}

#[test]
fn molecular_sector_conserves_the_a_count() {
    let p = defaults(LinkSpin::One, 1);
    let basis = DmhBasis::enumerate(LinkSpin::One, 1, Some(1), None).unwrap();
    let counts = a_count_diag(&basis);
    assert!(counts.iter().all(|&c| c == 1.0));
    let h = build_dmh_hamiltonian(&p, &basis, DmhOptions::default()).unwrap();
    assert_eq!(h.dim(), basis.dim());
}

#[test]
fn physical_image_is_resonant_on_the_ladder() {
    for spin in [LinkSpin::Half, LinkSpin::One] {
        let p = defaults(spin, 2);
        let qlm = sector(spin, 2);
        let basis = dmh_basis_for(&qlm).unwrap();
        let emb = Embedding::new(&qlm, &basis).unwrap();
        let lead = leading_diag(&p, &basis).unwrap();
        let phys = qlm.physical_indices();
        let e0 = lead[emb.targets[phys[0]]];
        for &q in &phys {
            assert!((lead[emb.targets[q]] - e0).abs() < 1e-9);
        }
    }
}

#[test]
fn neighbourhood_keeps_seeds_and_grows_with_order() {
    let p = defaults(LinkSpin::Half, 2);
    let qlm = sector(LinkSpin::Half, 2);
    let basis = dmh_basis_for(&qlm).unwrap();
    let emb = Embedding::new(&qlm, &basis).unwrap();
    let h = build_dmh_hamiltonian(&p, &basis, DmhOptions::default()).unwrap();
    let lead = leading_diag(&p, &basis).unwrap();
    let start = emb.targets[qlm.index_of(&string_preset(LinkSpin::Half, 2, StringDirection::Right).unwrap()).unwrap()];
    let mut last = 0;
    for order in 0..4 {
        let keep = neighbourhood(&h, &lead, start, &emb.targets, order, None);
        assert!(keep.windows(2).all(|w| w[0] < w[1]));
        assert!(emb.targets.iter().all(|t| keep.binary_search(t).is_ok()));
        assert!(keep.len() >= last);
        last = keep.len();
    }
    let capped = neighbourhood(&h, &lead, start, &emb.targets, 3, Some(1.0));
    assert!(capped.len() < last);
}

proptest! {
    #[test]
    fn hamiltonian_is_hermitian_for_any_geometry(gamma in 1.0f64..4.0, m in -2.0f64..2.0, one in any::<bool>()) {
        let spin = if one { LinkSpin::One } else { LinkSpin::Half };
        let ladder = EnergyLadder::default_for(spin);
        let geometry = ChainGeometry::default_for(spin, &ladder, gamma);
        let p = assign_energies(spin, 1, m, 1.0, ladder, geometry).unwrap();
        let qlm = sector(spin, 1);
        let basis = dmh_basis_for(&qlm).unwrap();
        let h = build_dmh_hamiltonian(&p, &basis, DmhOptions::default()).unwrap();
        prop_assert!(h.asymmetry() < 1e-14);
    }
}
