//! Analytic laws against direct sampling of the quantities they describe.

use proptest::prelude::*;
use qacs_core::analytics::femtocell::{cdf_xf, pmf_nq_vector, sf_interference_given};
use qacs_core::analytics::macrocell::{conditional_gamma_m, sf_gamma_mk};
use qacs_core::analytics::{FemtoAnalysisParams, MacroAnalysisParams, Quadrature};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Exp1};

const DRAWS: usize = 100_000;
/// Well above the 1% KS critical value 1.63/√n at 10⁵ draws.
const KS_MAX: f64 = 0.006;

fn ks(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn best_of_k_exponentials() {
    let mut r = rng(1);
    for k in [1, 4, 10] {
        let sample: Vec<f64> = (0..DRAWS)
            .map(|_| (0..k).map(|_| Exp1.sample(&mut r)).fold(0.0, f64::max))
            .collect();
        let d = ks(sample, |x| cdf_xf(x, k));
        assert!(d < KS_MAX, "k = {k}: D = {d}");
    }
}

#[test]
fn interference_is_a_truncated_minimum() {
    let p = FemtoAnalysisParams {
        n_total: 10,
        n_m: 4,
        lambda_f: 0.3,
        mu_f: 0.05,
        gamma_f_req: 2.0,
    };
    let x = 1.5;
    let cap = p.interference_cap(x);
    let exp = Exp::new(1.0 / p.lambda_f).unwrap();
    let mut r = rng(2);
    let mut truncated = || loop {
        let v: f64 = exp.sample(&mut r);
        if v <= cap {
            return v;
        }
    };
    for n in 1..=p.n_m {
        let sample: Vec<f64> = (0..DRAWS)
            .map(|_| (0..n).map(|_| truncated()).fold(f64::INFINITY, f64::min))
            .collect();
        let d = ks(sample, |u| 1.0 - sf_interference_given(u, x, n, &p));
        assert!(d < KS_MAX, "n = {n}: D = {d}");
    }
}

#[test]
fn served_macro_sinr_is_left_truncated() {
    let quad = Quadrature::default();
    let p = MacroAnalysisParams {
        n_q: 3,
        k_m: 50,
        lambda_m: 0.4,
        mu_m: 0.2,
        gamma_m_req: 4.0,
    };
    let mut r = rng(3);
    let mut sample = Vec::with_capacity(DRAWS);
    let mut tried = 0u64;
    while sample.len() < DRAWS {
        tried += 1;
        let x = (0..p.n_q).map(|_| Exp1.sample(&mut r)).fold(0.0, f64::max);
        let y: f64 = Exp1.sample(&mut r);
        let g = x / (p.lambda_m * y + p.mu_m);
        if g >= p.gamma_m_req {
            sample.push(g);
        }
    }
    let tail = sf_gamma_mk(p.gamma_m_req, &p, &quad).unwrap();
    let accepted = DRAWS as f64 / tried as f64;
    assert!((accepted - tail).abs() < 4.0 * (tail * (1.0 - tail) / tried as f64).sqrt());
    let d = ks(sample, |g| conditional_gamma_m(g, &p, &quad).unwrap().0);
    assert!(d < KS_MAX, "D = {d}");
}

#[test]
fn qualified_beam_count_matches_sampling() {
    let quad = Quadrature::default();
    let p = FemtoAnalysisParams {
        n_total: 6,
        n_m: 4,
        lambda_f: 0.05,
        mu_f: 0.02,
        gamma_f_req: 20.0,
    };
    let pmf = pmf_nq_vector(&p, &quad).unwrap();
    let mut r = rng(4);
    let mut counts = vec![0u64; p.n_m + 1];
    for _ in 0..DRAWS {
        let x: f64 = (0..p.n_total).map(|_| Exp1.sample(&mut r)).fold(0.0, f64::max);
        let q = (0..p.n_m)
            .filter(|_| {
                let y: f64 = Exp1.sample(&mut r);
                x / (p.lambda_f * y + p.mu_f) >= p.gamma_f_req
            })
            .count();
        counts[q] += 1;
    }
    for (m, (&c, &pr)) in counts.iter().zip(&pmf).enumerate() {
        let sd = (DRAWS as f64 * pr * (1.0 - pr)).sqrt();
        assert!(
            (c as f64 - DRAWS as f64 * pr).abs() <= 4.0 * sd + 1.0,
            "m = {m}: {c} vs {}",
            DRAWS as f64 * pr
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nq_pmf_is_a_distribution(
        n_total in 1usize..12,
        n_m in 1usize..6,
        lambda_f in 1e-3f64..2.0,
        mu_f in 1e-4f64..0.5,
        gamma_db in -5.0f64..30.0,
    ) {
        let p = FemtoAnalysisParams {
            n_total,
            n_m,
            lambda_f,
            mu_f,
            gamma_f_req: 10f64.powf(gamma_db / 10.0),
        };
        let pmf = pmf_nq_vector(&p, &Quadrature::default()).unwrap();
        prop_assert!(pmf.iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));
        prop_assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn macro_survival_is_monotone(
        n_q in 1usize..6,
        lambda_m in 1e-3f64..3.0,
        mu_m in 1e-3f64..3.0,
        g1 in 0.0f64..50.0,
        dg in 0.0f64..50.0,
    ) {
        let p = MacroAnalysisParams { n_q, k_m: 10, lambda_m, mu_m, gamma_m_req: 1.0 };
        let quad = Quadrature::default();
        let a = sf_gamma_mk(g1, &p, &quad).unwrap();
        let b = sf_gamma_mk(g1 + dg, &p, &quad).unwrap();
        prop_assert!(b <= a + 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }
}
