use slepf::exact_pf::{pfaffian_form, z_four};
use slepf::linkpat::{enumerate, LinkPattern};
use slepf::mc_pf::{estimate_z, symmetry_check, CascadeConfig, LinkChoice};

fn lp(s: &str) -> LinkPattern {
    s.parse().unwrap()
}

fn config(kappa: f64, alpha: &str, pts: &[f64], samples: u64, seed: u64) -> CascadeConfig {
    let mut c = CascadeConfig::new(kappa, lp(alpha), pts.to_vec());
    c.samples = samples;
    c.seed = seed;
    c
}

#[test]
fn two_links_match_the_hypergeometric_formula() {
    let pts = [0.0, 1.0, 2.0, 4.0];
    for kappa in [2.5, 3.0, 4.0] {
        for alpha in ["1-2,3-4", "1-4,2-3"] {
            let est = estimate_z(&config(kappa, alpha, &pts, 3000, 21)).unwrap();
            let exact = z_four(kappa, &lp(alpha), &pts).unwrap();
            let z = (est.mean - exact) / est.se;
            assert!(z.abs() < 4.0, "kappa {kappa} {alpha}: {} +- {} vs {exact}", est.mean, est.se);
        }
    }
}

#[test]
fn three_links_sum_to_the_pfaffian() {
    // At kappa = 3 the sum over planar patterns is the Pfaffian of 1/(x_j - x_i).
    let pts = [0.0, 1.0, 2.0, 3.5, 5.0, 6.0];
    let (mut total, mut var) = (0.0, 0.0);
    for alpha in enumerate(3).unwrap() {
        let mut c = CascadeConfig::new(3.0, alpha, pts.to_vec());
        c.samples = 3000;
        c.seed = 8;
        let est = estimate_z(&c).unwrap();
        total += est.mean;
        var += est.se * est.se;
    }
    let want = pfaffian_form(&pts).unwrap();
    assert!((total - want).abs() < 4.0 * var.sqrt(), "{total} +- {} vs {want}", var.sqrt());
}

#[test]
fn tight_clusters_survive_nesting() {
    // Remaining points squeezed next to the first link used to collapse to a
    // single floating point image in some samples.
    let pts = [0.0, 1.0, 1.001, 1.002, 1.003, 50.0];
    let est = estimate_z(&config(3.0, "1-6,2-5,3-4", &pts, 400, 3)).unwrap();
    assert!(est.mean.is_finite() && est.mean > 0.0);
}

#[test]
fn starting_link_does_not_matter() {
    let c = config(3.0, "1-2,3-4", &[0.0, 1.0, 2.5, 4.0], 3000, 5);
    let r = symmetry_check(&c, (1, 2), (3, 4)).unwrap();
    assert!(r.pass, "z = {}", r.z_score);

    let mut random = config(3.0, "1-4,2-3", &[0.0, 1.0, 2.5, 4.0], 3000, 6);
    random.link_choice = LinkChoice::Random;
    let est = estimate_z(&random).unwrap();
    let exact = z_four(3.0, &lp("1-4,2-3"), &[0.0, 1.0, 2.5, 4.0]).unwrap();
    assert!((est.mean - exact).abs() < 4.0 * est.se);
}

#[test]
fn result_is_independent_of_thread_count() {
    let c = config(3.0, "1-2,3-6,4-5", &[0.0, 1.0, 2.0, 3.5, 5.0, 6.0], 300, 12);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| estimate_z(&c).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(1));
}
