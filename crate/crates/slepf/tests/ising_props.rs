use slepf::ising::{beta_critical, crossing_experiment, Dynamics, IsingConfig, SpinField};
use slepf::linkpat::LinkPattern;
use slepf::loewner::rng_for;

/// Rectangle whose boundary is `+` everywhere except the corner site, which
/// touches no interior spin.
fn plus_boundary(width: usize, height: usize, beta: f64) -> IsingConfig {
    let mut c = IsingConfig::corners(width, height);
    c.marks = vec![0, c.ring_len() - 1];
    c.beta = beta;
    c
}

/// Mean interior magnetization over `n` updates after `burn` updates.
fn mean_magnetization(config: &IsingConfig, interior: i8, burn: usize, n: usize, seed: u64) -> f64 {
    let mut rng = rng_for(seed, 0);
    let mut field = SpinField::new(config, interior);
    for _ in 0..burn {
        field.update(config.dynamics, config.beta, &mut rng);
    }
    (0..n)
        .map(|_| {
            field.update(config.dynamics, config.beta, &mut rng);
            field.magnetization()
        })
        .sum::<f64>()
        / n as f64
}

#[test]
fn magnetization_grows_through_the_critical_point() {
    let bc = beta_critical();
    let hot = mean_magnetization(&plus_boundary(64, 64, 0.9 * bc), 1, 100, 100, 1);
    let cold = mean_magnetization(&plus_boundary(64, 64, 1.1 * bc), 1, 100, 100, 1);
    assert!(hot < cold, "{hot} vs {cold}");
    assert!(cold > 0.8);
}

#[test]
fn ordered_phase_follows_the_boundary() {
    // Start from the opposite sign: the interior cluster is free to flip and
    // then sticks to the boundary.
    let c = plus_boundary(16, 16, 3.0);
    let m = mean_magnetization(&c, -1, 60, 10, 2);
    assert!(m > 0.99, "{m}");
}

#[test]
fn energy_is_stable_under_doubled_sweeps() {
    let bc = beta_critical();
    let energy = |sweeps: usize| {
        let c = IsingConfig::corners(32, 32);
        let mut rng = rng_for(3, sweeps as u64);
        let mut field = SpinField::new(&c, 1);
        for _ in 0..200 {
            field.update(Dynamics::SwendsenWang, bc, &mut rng);
        }
        let n = 300;
        let mut total = 0.0;
        for _ in 0..n {
            for _ in 0..sweeps {
                field.update(Dynamics::SwendsenWang, bc, &mut rng);
            }
            total += field.energy_per_edge();
        }
        total / n as f64
    };
    let (e1, e2) = (energy(2), energy(4));
    assert!(((e1 - e2) / e2).abs() < 0.01, "{e1} vs {e2}");
}

#[test]
fn interfaces_are_always_planar() {
    let mut c = IsingConfig::corners(16, 16);
    c.marks = vec![0, 10, 20, 35, 45, 60];
    c.samples = 10_000;
    c.sweeps = 1;
    c.burn_in = 20;
    c.seed = 5;
    let r = crossing_experiment(&c).expect("every sample pairs the marks without crossing");
    assert_eq!(r.rows.len(), 5);
    assert_eq!(r.rows.iter().map(|row| row.count).sum::<u64>(), 10_000);
}

#[test]
fn mirrored_rectangle_gives_mirrored_connectivities() {
    let (w, h) = (12, 8);
    let mut c = IsingConfig::corners(w, h);
    c.marks = vec![1, 9, 20, 33];
    c.samples = 4000;
    c.sweeps = 4;
    c.seed = 6;
    let len = c.ring_len();
    // Reflection i -> w + 1 - i sends ring site k to w + 1 - k and reverses
    // the orientation, so the edge after site m goes to the edge after w - m.
    let image: Vec<usize> = c.marks.iter().map(|&m| (w + len - m) % len).collect();
    let mut mirrored = c.clone();
    mirrored.marks = image.clone();
    mirrored.marks.sort_unstable();
    mirrored.seed = 7;
    let rank = |m: usize| mirrored.marks.iter().position(|&x| x == m).unwrap() + 1;

    let direct = crossing_experiment(&c).unwrap();
    let reflected = crossing_experiment(&mirrored).unwrap();
    for row in &direct.rows {
        let alpha = LinkPattern::new(row.alpha.links().iter().map(|&(a, b)| (rank(image[a - 1]), rank(image[b - 1])))).unwrap();
        let other = reflected.rows.iter().find(|r| r.alpha == alpha).unwrap();
        let se = row.stderr_batch.hypot(other.stderr_batch);
        assert!(
            (row.empirical - other.empirical).abs() <= 2.0 * se,
            "{} {} vs {} {} (se {se})",
            row.alpha,
            row.empirical,
            alpha,
            other.empirical
        );
    }
}
