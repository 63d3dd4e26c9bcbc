use num_complex::Complex64;
use slepf::loewner::{evolve_complex, poisson_ratio, rng_for, sample_driving, swallow_fraction, DrivingFunction, LoewnerChain};

#[test]
fn constant_driving_matches_the_slit_map() {
    let dt = 1e-5;
    let drv = DrivingFunction::constant(0.0, dt, 100_000);
    let mut chain = LoewnerChain::new(0.0, &[0.7, -1.3, 4.0]).unwrap();
    chain.evolve(&drv, 1.0).unwrap();
    for (i, &x) in [0.7f64, -1.3, 4.0].iter().enumerate() {
        let g = x.signum() * (x * x + 4.0).sqrt();
        assert!((chain.g(i) - g).abs() < 1e-6 * g.abs());
        let dg = x.abs() / (x * x + 4.0).sqrt();
        assert!((chain.points[i].log_dg.exp() - dg).abs() < 1e-6 * dg);
    }
    // Branch of sqrt(z^2 + 4) that stays in the upper half-plane.
    let z = Complex64::new(-0.4, 0.3);
    let mut want = (z * z + 4.0).sqrt();
    if want.im < 0.0 {
        want = -want;
    }
    assert!((evolve_complex(z, &drv, 1.0) - want).norm() < 1e-6);
}

#[test]
fn capacity_grows_like_two_t() {
    for seed in 0..3 {
        let drv = sample_driving(4.0, 0.5, 1e-4, 0.0, &mut rng_for(seed, 0)).unwrap();
        let z = Complex64::new(0.0, 1e4);
        let hcap = ((evolve_complex(z, &drv, 0.5) - z) * z).re;
        assert!((hcap - 1.0).abs() < 0.01, "seed {seed}: {hcap}");
    }
}

#[test]
fn poisson_ratios_lie_in_the_unit_interval() {
    for k in 0..1000u64 {
        let mut chain = LoewnerChain::new(0.0, &[-2.0, -0.5, 0.4, 1.5]).unwrap();
        chain.evolve_adaptive(3.0, 0.3, 1e-3, 4e-3, &mut rng_for(21, k)).unwrap();
        for (i, j) in [(0, 1), (2, 3)] {
            let r = poisson_ratio(&chain, i, j).unwrap().value;
            assert!((0.0..=1.0).contains(&r), "run {k}: ratio {r}");
        }
    }
}

#[test]
fn simple_phase_never_swallows() {
    let f = swallow_fraction(3.0, &[-1.0, 0.5, 1.0], 1.0, 1000, 5).unwrap();
    assert_eq!(f, 0.0);
}

#[test]
fn swallowing_phase_swallows() {
    let f = swallow_fraction(6.0, &[-1.0, 0.5, 1.0], 1.0, 1000, 5).unwrap();
    assert!(f > 0.1, "fraction {f}");
}
