use proptest::prelude::*;
use tileupb::linalg::{hermitian_eig, numeric_rank, orthonormal_complement};
use tileupb::states;
use tileupb::tiles::{self, Party, Variant};
use tileupb::verify::{self, SeesawConfig};
use tileupb::{ComplexMatrix, Ket, Status, C64};

fn odd_d() -> impl Strategy<Value = usize> {
    prop_oneof![Just(3_usize), Just(5), Just(7)]
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Dft), Just(Variant::Real)]
}

fn probabilities(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01_f64..1.0, len).prop_map(|v| {
        let t: f64 = v.iter().sum();
        v.into_iter().map(|x| x / t).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn upb_states_pairwise_orthogonal(d in odd_d(), v in variant()) {
        let all = tiles::upb(d, v).unwrap().all_states();
        prop_assert_eq!(all.len(), (d - 1) * (d - 1) + 1);
        for (i, s) in all.iter().enumerate() {
            for t in &all[i + 1..] {
                prop_assert!(s.normalized_inner(t).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn tiles_cover_grid_once(d in odd_d()) {
        let layout = tiles::layout(d).unwrap();
        let mut hits = vec![0_u32; d * d];
        for layer in &layout.layers {
            for t in &layer.tiles {
                for (r, c) in t.cells() {
                    hits[r * d + c] += 1;
                }
            }
        }
        let center = layout.center * d + layout.center;
        for (i, h) in hits.iter().enumerate() {
            prop_assert_eq!(*h, u32::from(i != center));
        }
    }

    #[test]
    fn family_is_ppt_with_rank_2d_minus_2(p in probabilities(3)) {
        let rho = states::sigma_family(7, &p).unwrap();
        let pt = rho.partial_transpose(Party::B);
        prop_assert!(hermitian_eig(&pt).unwrap().min() > -1e-10);
        prop_assert_eq!(numeric_rank(&rho.matrix, 1e-9), 12);
    }

    #[test]
    fn decomposition_reweights(p in probabilities(2)) {
        let factors: Vec<_> = (1..=2).map(|m| states::sigma(5, m).unwrap().state).collect();
        let rho = states::sigma_family(5, &p).unwrap();
        let c = verify::check_decomposition_of(&rho, &factors, &p).unwrap();
        prop_assert_eq!(c.status, Status::Pass);
    }

    #[test]
    fn partial_transpose_is_involution(seed in 0_u64..1000) {
        let n = 9;
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            let x = ((seed as usize + 7 * i + 13 * j) % 29) as f64 / 29.0;
            C64::new(x, ((i * j + seed as usize) % 5) as f64 / 5.0)
        });
        let once = tileupb::linalg::partial_transpose(&m, 3, 3, Party::B).unwrap();
        let twice = tileupb::linalg::partial_transpose(&once, 3, 3, Party::B).unwrap();
        prop_assert!((&twice - &m).max_abs() < 1e-15);
    }

    #[test]
    fn unequal_qutrit_mixtures_are_npt(p in probabilities(4)) {
        let spread = p.iter().cloned().fold(f64::MIN, f64::max) - p.iter().cloned().fold(f64::MAX, f64::min);
        prop_assume!(spread > 0.02);
        let rho = states::rho3_unequal(&[p[0], p[1], p[2], p[3]]).unwrap();
        let c = verify::check_ppt(&rho, 1e-9).unwrap();
        prop_assert_eq!(c.status, Status::Fail);
    }
}

#[test]
fn exhaustive_and_search_agree() {
    let cfg = SeesawConfig { restarts: 60, ..Default::default() };
    for d in [3, 5] {
        let upb = tiles::upb(d, Variant::Real).unwrap();
        let he = states::entangled_subspace(&upb);
        assert_eq!(verify::check_upb_unextendible(&upb, 1 << 30).unwrap().status, Status::Pass);
        assert_eq!(verify::search_product_in_subspace(&he, d, d, &cfg).unwrap().status, Status::Pass);
    }
    let control = verify::extendible_control_set(5, Variant::Real).unwrap();
    let kets: Vec<Ket> = control.iter().map(|s| s.normalized_ket()).collect();
    let space = orthonormal_complement(&kets, 25);
    let exhaustive = verify::check_unextendible_exhaustive(&control, 1 << 20).unwrap();
    let search = verify::search_product_in_subspace(&space, 5, 5, &cfg).unwrap();
    assert_eq!(exhaustive.status, Status::Fail);
    assert_eq!(search.status, Status::Fail);
    // Both witnesses lie in the complement of the control set.
    for cert in [&exhaustive, &search] {
        let a: Ket = serde_json::from_value(cert.witnesses["product_a"].clone()).unwrap();
        let b: Ket = serde_json::from_value(cert.witnesses["product_b"].clone()).unwrap();
        let w = tileupb::linalg::tensor(&a.normalized(), &b.normalized());
        assert!(space.overlap(&w) > 1.0 - 1e-6);
    }
}

#[test]
fn artifacts_round_trip_through_json() {
    let upb = tiles::upb(5, Variant::Dft).unwrap();
    let back: tileupb::Upb = serde_json::from_str(&serde_json::to_string(&upb).unwrap()).unwrap();
    assert_eq!(back, upb);
    let rho = states::rho_d(3, Variant::Real).unwrap();
    let text = serde_json::to_string(&rho.matrix).unwrap();
    assert!(text.starts_with(r#"{"rows":9,"cols":9,"data":[["#));
    let m: ComplexMatrix = serde_json::from_str(&text).unwrap();
    assert_eq!(m, rho.matrix);
}

#[test]
fn entangled_basis_spans_upb_complement() {
    for d in [3, 5, 7] {
        let basis = states::entangled_basis(d).unwrap();
        assert_eq!(basis.len(), 2 * (d - 1));
        let he = states::entangled_subspace(&tiles::upb(d, Variant::Dft).unwrap());
        for v in &basis {
            assert!(he.residual(v) < 1e-10);
        }
    }
}
