use dipolar_qlm::dmh::{dmh_basis_for, DmhBasis, Embedding};
use dipolar_qlm::effective::{residual_terms, second_order_effective, SubspacePartition};
use dipolar_qlm::linalg::{sym_eigen, DenseMatrix, Spectrum};
use dipolar_qlm::qlm::{build_hamiltonian, LinkSpin, QlmBasis, QlmParams};
use dipolar_qlm::scenario::{effective_residuals, Model, ScenarioConfig, ScenarioSystem};
use dipolar_qlm::sparse::SparseOperator;
use proptest::prelude::*;

fn eigenvalues(m: DenseMatrix) -> Vec<f64> {
    sym_eigen(m, Spectrum::All).unwrap().values
}

/// Two degenerate states at zero coupled to `far.len()` distant states.
fn toy(g: &[[f64; 2]], far: &[f64]) -> SparseOperator {
    let mut t = vec![];
    for (k, (gk, &e)) in g.iter().zip(far).enumerate() {
        let l = k + 2;
        t.push((l, l, e));
        for a in 0..2 {
            t.push((a, l, gk[a]));
            t.push((l, a, gk[a]));
        }
    }
    SparseOperator::from_triplets(far.len() + 2, t)
}

#[test]
fn two_level_block_matches_closed_form() {
    let (g, gp, d) = (0.02, -0.03, 1.5);
    let h = toy(&[[g, gp]], &[d]);
    let part = SubspacePartition::explicit(h.diagonal(), vec![0, 1]);
    let heff = second_order_effective(&h, &part).unwrap();
    assert_eq!(heff.alpha, vec![0, 1]);
    assert!((heff.matrix.get(0, 0) + g * g / d).abs() < 1e-15);
    assert!((heff.matrix.get(1, 1) + gp * gp / d).abs() < 1e-15);
    assert!((heff.matrix.get(0, 1) + g * gp / d).abs() < 1e-15);
    assert_eq!(heff.matrix.get(0, 1), heff.matrix.get(1, 0));
    assert_eq!(heff.first_order_max, 0.0);
}

#[test]
fn uncoupled_hamiltonian_stays_diagonal() {
    let h = SparseOperator::diagonal_from(&[0.1, -0.2, 5.0, 7.0]);
    let part = SubspacePartition::by_energy(vec![0.0, 0.0, 5.0, 7.0], &[0], 1.0).unwrap();
    assert_eq!(part.alpha, vec![0, 1]);
    assert_eq!(part.complement, vec![2, 3]);
    let heff = second_order_effective(&h, &part).unwrap();
    assert_eq!(heff.matrix.get(0, 0), 0.1);
    assert_eq!(heff.matrix.get(1, 1), -0.2);
    assert_eq!(heff.matrix.get(0, 1), 0.0);
}

#[test]
fn degenerate_complement_and_bad_inputs_are_rejected() {
    let h = toy(&[[0.1, 0.1]], &[0.0]);
    let part = SubspacePartition::explicit(vec![0.0; 3], vec![0, 1]);
    let err = second_order_effective(&h, &part).unwrap_err();
    assert_eq!(err.kind(), "perturbative");
    let short = SubspacePartition::explicit(vec![0.0; 2], vec![0]);
    assert!(second_order_effective(&h, &short).is_err());
    assert!(SubspacePartition::by_energy(vec![0.0], &[], 1.0).is_err());
}

#[test]
fn residual_removes_a_constant_shift() {
    let qlm = QlmBasis::enumerate(LinkSpin::Half, 2, Some(1), Some(2)).unwrap();
    let target = build_hamiltonian(&QlmParams { spin: LinkSpin::Half, n_cells: 2, w: 1.0, m: 0.4, g2: 0.0 }, &qlm).unwrap();
    let dmh: DmhBasis = dmh_basis_for(&qlm).unwrap();
    let emb = Embedding::new(&qlm, &dmh).unwrap();
    let physical = qlm.physical_indices();
    let (unit, offset) = (0.25, 3.0);
    let mut t = vec![];
    for (a, &k) in emb.targets.iter().enumerate() {
        t.push((k, k, offset));
        for (b, v) in target.row(a) {
            t.push((k, emb.targets[b], unit * v));
        }
    }
    let h = SparseOperator::from_triplets(dmh.dim(), t);
    let heff = second_order_effective(&h, &SubspacePartition::explicit(vec![0.0; dmh.dim()], emb.targets.clone())).unwrap();
    let report = residual_terms(&heff, &target, &emb, &physical, unit, &dmh).unwrap();
    assert!((report.shift - offset / unit).abs() < 1e-12);
    assert!(report.max_residual < 1e-12);
    assert!(report.only_diagonal_above(1e-12));
    assert_eq!(report.entries.len(), physical.len() * (physical.len() + 1) / 2);
}

fn residual(spin: LinkSpin, m: f64, max_range: Option<f64>) -> dipolar_qlm::effective::ResidualReport {
    let g2 = if spin == LinkSpin::One { 1.0 } else { 0.0 };
    let mut config = ScenarioConfig::new("heff", Model::Dmh, spin, 2, m, g2);
    config.max_range = max_range;
    effective_residuals(&ScenarioSystem::build(&config).unwrap()).unwrap()
}

#[test]
fn nearest_neighbour_molecules_reproduce_the_link_model() {
    for m in [0.1, 2.0] {
        let r = residual(LinkSpin::Half, m, Some(1.01));
        assert!(r.max_residual < 1e-6, "m = {m}: {}", r.max_residual);
        assert!(r.first_order_max < 1e-12);
    }
}

#[test]
fn full_range_residuals_stay_below_one_percent_of_the_hopping() {
    let r = residual(LinkSpin::Half, 0.1, None);
    assert!(r.max_residual <= 1e-2, "{}", r.max_residual);
    let r = residual(LinkSpin::One, 0.25, None);
    assert!(r.max_offdiagonal <= 1e-2, "{}", r.max_offdiagonal);
    assert!(r.max_gauss_breaking <= 1e-2, "{}", r.max_gauss_breaking);
}

proptest! {
    /// Block eigenvalues match the low end of the exact spectrum to fourth order.
    #[test]
    fn block_spectrum_matches_exact_diagonalization(
        g in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5),
        far in prop::collection::vec(2.0f64..6.0, 5),
    ) {
        let eps = 1e-2;
        let g: Vec<[f64; 2]> = g.iter().map(|&(a, b)| [eps * a, eps * b]).collect();
        let far = &far[..g.len()];
        let h = toy(&g, far);
        let heff = second_order_effective(&h, &SubspacePartition::explicit(h.diagonal(), vec![0, 1])).unwrap();
        let approx = eigenvalues(heff.matrix);
        let exact = eigenvalues(h.to_dense());
        for k in 0..2 {
            prop_assert!((approx[k] - exact[k]).abs() < 1e-6, "{approx:?} vs {exact:?}");
        }
    }
}
