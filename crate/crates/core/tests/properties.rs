use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use chernoff_tradeoff::bayes::{
    exact_min_error_iid, exponent_chernoff, exponent_sanov, exponent_t, min_grouped_chernoff,
    TestTarget,
};
use chernoff_tradeoff::fixtures::example_model;
use chernoff_tradeoff::model::{blockwise_extend, induced_output_laws, Alphabet, OutputLaws};
use chernoff_tradeoff::optimizer::random_kernel;
use chernoff_tradeoff::probkit::{chernoff_information, kl_divergence, t_mu_nu, DualPoint, Pmf};
use chernoff_tradeoff::verify::identity_slack;

fn weights(size: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.02f64..1.0, size).prop_map(|w| {
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    })
}

fn pmf_pair() -> impl Strategy<Value = (Pmf, Pmf)> {
    (2usize..=5)
        .prop_flat_map(|n| (weights(n), weights(n)))
        .prop_map(|(a, b)| (Pmf::from_probs(a).unwrap(), Pmf::from_probs(b).unwrap()))
}

fn pmf_triple() -> impl Strategy<Value = [Pmf; 3]> {
    (2usize..=4)
        .prop_flat_map(|n| (weights(n), weights(n), weights(n)))
        .prop_map(|(a, b, c)| [a, b, c].map(|w| Pmf::from_probs(w).unwrap()))
}

fn laws_over(size: usize) -> impl Strategy<Value = OutputLaws> {
    (weights(size), weights(size), weights(size), weights(size)).prop_map(move |(a, b, c, d)| {
        let alphabet = Alphabet::new((0..size).map(|i| i as f64).collect()).unwrap();
        OutputLaws::new(1, alphabet, [a, b, c, d]).unwrap()
    })
}

fn max_gap(a: &OutputLaws, b: &OutputLaws) -> f64 {
    a.laws()
        .iter()
        .zip(b.laws())
        .flat_map(|(x, y)| x.probs().iter().zip(y.probs()).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kl_is_nonnegative((p, q) in pmf_pair()) {
        prop_assert!(kl_divergence(&p, &q).unwrap() >= 0.0);
        prop_assert!(kl_divergence(&p, &p).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn chernoff_is_symmetric_and_below_both_kls((p, q) in pmf_pair()) {
        let ab = chernoff_information(&p, &q).unwrap().value;
        let ba = chernoff_information(&q, &p).unwrap().value;
        prop_assert!((ab - ba).abs() <= 1e-8);
        prop_assert!(ab <= kl_divergence(&p, &q).unwrap() + 1e-12);
        prop_assert!(ab <= kl_divergence(&q, &p).unwrap() + 1e-12);
        prop_assert_eq!(chernoff_information(&p, &p).unwrap().value, 0.0);
    }

    #[test]
    fn t_objective_is_jointly_concave(
        [a, b, c] in pmf_triple(),
        (m1, n1, m2, n2) in (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0),
        tau in 0.01f64..0.99,
    ) {
        // points of the unit square scaled into the triangle mu + nu <= 1
        let x = DualPoint { mu: m1, nu: n1 * (1.0 - m1) };
        let y = DualPoint { mu: m2, nu: n2 * (1.0 - m2) };
        let mid = DualPoint {
            mu: tau * x.mu + (1.0 - tau) * y.mu,
            nu: tau * x.nu + (1.0 - tau) * y.nu,
        };
        let f = |d| t_mu_nu(&a, &b, &c, d).unwrap();
        prop_assert!(f(mid) >= tau * f(x) + (1.0 - tau) * f(y) - 1e-9);
    }

    #[test]
    fn three_exponent_forms_agree_on_binary_laws(laws in laws_over(2)) {
        for target in TestTarget::ALL {
            let c = exponent_chernoff(&laws, target).unwrap().value;
            let t = exponent_t(&laws, target).unwrap().value;
            let s = exponent_sanov(&laws, target, 1e-3).unwrap().value;
            prop_assert!((c - t).abs() <= 1e-6, "chernoff {c} vs t {t}");
            prop_assert!((c - s).abs() <= 1e-3, "chernoff {c} vs sanov {s}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn three_exponent_forms_agree_on_ternary_laws(laws in laws_over(3)) {
        for target in TestTarget::ALL {
            let c = exponent_chernoff(&laws, target).unwrap().value;
            let t = exponent_t(&laws, target).unwrap().value;
            let s = exponent_sanov(&laws, target, 1e-3).unwrap().value;
            prop_assert!((c - t).abs() <= 1e-6, "chernoff {c} vs t {t}");
            prop_assert!((c - s).abs() <= 1e-3, "chernoff {c} vs sanov {s}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn outputs_never_beat_the_source(seed in any::<u64>(), s in prop::sample::select(vec![1.0, 2.0])) {
        let model = example_model();
        let kernel = random_kernel(&model, 1, s, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(kernel.validate().is_valid());
        let out = induced_output_laws(&model, &kernel).unwrap();
        let source = OutputLaws::from_source(&model);
        for target in TestTarget::ALL {
            let (y, _) = min_grouped_chernoff(&out, target).unwrap();
            let (x, _) = min_grouped_chernoff(&source, target).unwrap();
            prop_assert!(y <= x + 1e-12);
        }
    }

    #[test]
    fn induced_laws_are_linear_in_the_kernel(seed in any::<u64>(), tau in 0.0f64..=1.0) {
        let model = example_model();
        let s = identity_slack(&model);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_kernel(&model, 1, s, &mut rng).unwrap();
        let b = random_kernel(&model, 1, s, &mut rng).unwrap();
        let mixed = induced_output_laws(&model, &a.mix(&b, tau).unwrap()).unwrap();
        let (la, lb) = (
            induced_output_laws(&model, &a).unwrap(),
            induced_output_laws(&model, &b).unwrap(),
        );
        for ((m, x), y) in mixed.laws().iter().zip(la.laws()).zip(lb.laws()) {
            for ((pm, px), py) in m.probs().iter().zip(x.probs()).zip(y.probs()) {
                prop_assert!((pm - (tau * px + (1.0 - tau) * py)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn extension_commutes_with_induced_laws(seed in any::<u64>(), l in 2usize..=3) {
        let model = example_model();
        let kernel = random_kernel(&model, 1, 2.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let extended = blockwise_extend(&kernel, l).unwrap();
        prop_assert!(extended.validate().is_valid());
        let lhs = induced_output_laws(&model, &extended).unwrap();
        let rhs = induced_output_laws(&model, &kernel).unwrap().power(l).unwrap();
        prop_assert!(max_gap(&lhs, &rhs) <= 1e-12);
    }
}

#[test]
fn exact_error_is_nonincreasing_in_horizon() {
    let model = example_model();
    let laws = OutputLaws::from_source(&model);
    let joint = model.prior.joint();
    for target in TestTarget::ALL {
        let grouped = target
            .side(0)
            .iter()
            .map(|&(u, p)| joint[u][p])
            .sum::<f64>();
        let cap = grouped.min(1.0 - grouped);
        let mut previous = f64::INFINITY;
        for n in (1..=40).chain([100, 200, 400, 800]) {
            let err = exact_min_error_iid(&laws, &model.prior, target, n).unwrap();
            assert!(err.alpha >= 0.0 && err.alpha <= cap + 1e-12);
            assert!(err.ln_alpha <= previous + 1e-12, "{target} n={n}");
            previous = err.ln_alpha;
        }
    }
}
