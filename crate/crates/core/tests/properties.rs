use fourbody::chain::{chain_coefficient, lambda_envelope, quadratic_lhs, MU_R_LIMIT};
use fourbody::criterion::{classify_via_scalar_condition, solve_scalar_condition};
use fourbody::ecg::{matrix_elements, CoulombSystem, GaussianBasisElement, JacobiCoordinates, Provenance};
use fourbody::effpot::{pair_distance_oracle, InteractionDecomposition, Split};
use fourbody::twocenter::{two_center_ground, BasisSpec};
use fourbody::{classify, Classification, FourBodySystem};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn mass() -> impl Strategy<Value = f64> {
    (-3.0f64..4.0).prop_map(|e| 10f64.powf(e))
}

fn masses() -> impl Strategy<Value = [f64; 4]> {
    [mass(), mass(), mass(), mass()]
}

fn vec3(span: f64) -> impl Strategy<Value = [f64; 3]> {
    [-span..span, -span..span, -span..span]
}

fn mu(m: f64, n: f64) -> f64 {
    m * n / (m + n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn frame_is_ordered_and_mu_r_bounded(m in masses()) {
        let f = FourBodySystem::new(m).unwrap().jacobi();
        prop_assert!(f.mu_x >= f.mu_y);
        prop_assert!(f.mu_r >= f.mu_r_lower_bound() * (1.0 - 1e-12));
    }

    #[test]
    fn chosen_pairing_has_lowest_threshold(m in masses()) {
        let f = FourBodySystem::new(m).unwrap().jacobi();
        let sum_a = mu(m[0], m[1]) + mu(m[2], m[3]);
        let sum_b = mu(m[0], m[3]) + mu(m[2], m[1]);
        let rejected = -sum_a.min(sum_b) / 2.0;
        prop_assert!(f.threshold_energy(false) <= rejected);
        prop_assert!(rel(f.threshold_energy(false), -sum_a.max(sum_b) / 2.0) < 1e-14);
    }

    #[test]
    fn scale_invariance(m in masses(), e in -3.0f64..3.0) {
        let c = 10f64.powf(e);
        let s = FourBodySystem::new(m).unwrap();
        let t = s.scaled(c).unwrap();
        let (f, g) = (s.jacobi(), t.jacobi());
        prop_assert!(rel(f.ratio_x(), g.ratio_x()) < 1e-12);
        prop_assert!(rel(f.ratio_y(), g.ratio_y()) < 1e-12);
        prop_assert!((f.a - g.a).abs() < 1e-12 && (f.b - g.b).abs() < 1e-12);
        let (v, w) = (classify(&s), classify(&t));
        prop_assert!(rel(v.ratio, w.ratio) < 1e-12);
        // away from the boundary the verdict cannot flip on rounding
        if v.margin.abs() > 1e-12 {
            prop_assert_eq!(v.classification, w.classification);
        }
    }

    #[test]
    fn relabel_invariance(m in masses()) {
        let s = FourBodySystem::new(m).unwrap();
        let (f, g) = (s.jacobi(), s.swap_pairs().jacobi());
        prop_assert_eq!(f.mu_x, g.mu_x);
        prop_assert_eq!(f.mu_y, g.mu_y);
        prop_assert_eq!(f.mu_r, g.mu_r);
        prop_assert_eq!((f.a, f.b), (g.a, g.b));
        prop_assert_eq!(f.masses, g.masses);
        prop_assert_eq!(classify(&s).classification, classify(&s.swap_pairs()).classification);
    }

    #[test]
    fn lambda_envelope_closed_form(b in -3.0f64..1.0, mu_r in 1e-3f64..10.0) {
        let beta = 10f64.powf(b);
        let env = lambda_envelope(beta, mu_r).unwrap();
        let scale = env.closed_form.abs().max(beta * beta);
        prop_assert!((env.maximum - env.closed_form).abs() <= 1e-9 * scale);
    }

    #[test]
    fn chain_coefficient_increasing(p in 1e-4f64..0.374, q in 1e-4f64..0.374) {
        prop_assume!(p != q);
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        prop_assert!(chain_coefficient(lo).unwrap() < chain_coefficient(hi).unwrap());
    }

    #[test]
    fn quadratic_form_nonnegative(mu_r in 1e-3f64..(MU_R_LIMIT - 1e-3), alpha in 0.0f64..5.0, beta in 0.0f64..5.0) {
        let v = quadratic_lhs(mu_r, alpha, beta).unwrap();
        prop_assert!(v >= -1e-12 * (1.0 + beta.powi(4) / mu_r));
    }

    #[test]
    fn scalar_condition_matches_product(mu_r in 1e-4f64..0.374) {
        let c = chain_coefficient(mu_r).unwrap();
        let lhs = 3.0 * mu_r * c;
        if (lhs - 1.0).abs() > 1e-12 {
            prop_assert_eq!(solve_scalar_condition(mu_r).unwrap(), lhs <= 1.0);
        }
    }

    #[test]
    fn interaction_parts_decompose(a in 0.01f64..0.99, b in 0.01f64..0.99,
                                   x in vec3(5.0), y in vec3(5.0), r in vec3(5.0)) {
        let d = InteractionDecomposition::new(a, b).unwrap();
        let w = d.w(x, y, r);
        let (plus, minus) = (d.w_plus(x, y, r), d.w_minus(x, y, r));
        prop_assert!(plus >= 0.0 && minus >= 0.0);
        prop_assert_eq!(plus * minus, 0.0);
        prop_assert!((plus - minus - w).abs() <= 1e-14 * w.abs().max(1.0));
        prop_assert!((d.w1(x, y, r) + d.w2(x, y, r) - w).abs() <= 1e-12 * (1.0 + w.abs()));
        let split = d.split_minus(Split::W1, x, y, r) + d.split_minus(Split::W2, x, y, r);
        prop_assert!(minus <= split + 1e-12 * (1.0 + split));
    }

    #[test]
    fn interaction_matches_distance_oracle(m in masses(), x in vec3(10.0), y in vec3(10.0), r in vec3(10.0)) {
        let s = FourBodySystem::new(m).unwrap();
        let f = s.jacobi();
        let d = InteractionDecomposition::from_frame(&f);
        let dist = pair_distance_oracle(f.masses, x, y, r);
        prop_assert!(rel(d.v13(x, y, r), 1.0 / dist[1]) < 1e-12);
        prop_assert!(rel(d.v14(x, y, r), -1.0 / dist[2]) < 1e-12);
        prop_assert!(rel(d.v23(x, y, r), -1.0 / dist[3]) < 1e-12);
        prop_assert!(rel(d.v24(x, y, r), 1.0 / dist[4]) < 1e-12);
    }

    #[test]
    fn correlated_gaussian_elements_symmetric(m in masses(), widths in proptest::collection::vec(-2.0f64..1.0, 12)) {
        let sys = CoulombSystem::from_four_body(&FourBodySystem::new(m).unwrap());
        let coords = JacobiCoordinates::new(&sys);
        let alpha = |w: &[f64]| w.iter().map(|e| 10f64.powf(*e)).collect::<Vec<_>>();
        let ei = GaussianBasisElement::from_pair_form(&coords, &alpha(&widths[..6]), Provenance::default()).unwrap();
        let ej = GaussianBasisElement::from_pair_form(&coords, &alpha(&widths[6..]), Provenance::default()).unwrap();
        let ij = matrix_elements(&ei, &ej, &coords).unwrap();
        let ji = matrix_elements(&ej, &ei, &coords).unwrap();
        prop_assert!(rel(ij.overlap, ji.overlap) < 1e-12);
        prop_assert!(rel(ij.kinetic, ji.kinetic) < 1e-10);
        prop_assert!((ij.hamiltonian - ji.hamiltonian).abs() < 1e-10 * (ij.kinetic.abs() + ij.coulomb.iter().sum::<f64>()));
        prop_assert!(ij.overlap > 0.0 && ij.overlap <= 1.0 + 1e-12);
        let ii = matrix_elements(&ei, &ei, &coords).unwrap();
        prop_assert!((ii.overlap - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn two_center_coulomb_scaling(coupling in 0.1f64..3.0, mu_r in 0.1f64..5.0, d in 0.0f64..6.0) {
        let basis = BasisSpec::default();
        let e = two_center_ground(coupling, mu_r, d, &basis).unwrap().energy;
        let unit = two_center_ground(1.0, 1.0, coupling * mu_r * d, &basis).unwrap().energy;
        prop_assert!(rel(e, coupling * coupling * mu_r * unit) < 1e-6);
    }
}

/// Both formulations of the criterion agree on 10^4 random systems.
#[test]
fn classification_formulations_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut unstable = 0;
    for _ in 0..10_000 {
        let m: [f64; 4] = std::array::from_fn(|_| 10f64.powf(rng.random_range(-3.0..4.0)));
        let s = FourBodySystem::new(m).unwrap();
        let v = classify(&s);
        if v.margin.abs() < 1e-13 {
            continue;
        }
        assert_eq!(v.classification, classify_via_scalar_condition(&s), "masses {m:?}");
        unstable += usize::from(v.classification == Classification::ProvenUnstable);
    }
    // the sample covers both sides of the boundary
    assert!(unstable > 100 && unstable < 9_900, "{unstable}");
}
