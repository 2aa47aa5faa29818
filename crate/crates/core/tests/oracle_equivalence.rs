use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repeaterlab_core::connection::connect_pair;
use repeaterlab_core::oracle::{oracle_connection, oracle_purification_step, DensityMatrix};
use repeaterlab_core::purification::{scheme_a_step, scheme_b_step, scheme_c_step};
use repeaterlab_core::{BellDiagonal, NoiseParams, Scheme};

const TOL: f64 = 1e-10;

fn grid() -> Vec<(f64, f64, f64)> {
    let fs = [0.3, 0.45, 0.6, 0.8, 0.95];
    let ps = [0.9, 0.925, 0.95, 0.975, 1.0];
    let mut out = Vec::new();
    for &f in &fs {
        for &p2 in &ps {
            for &eta in &ps {
                out.push((f, p2, eta));
            }
        }
    }
    out
}

fn random_state(rng: &mut ChaCha8Rng) -> BellDiagonal {
    let w: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() + 1e-3);
    let sum: f64 = w.iter().sum();
    BellDiagonal::new(w[0] / sum, w[1] / sum, w[2] / sum, 1.0 - (w[0] + w[1] + w[2]) / sum).unwrap()
}

fn random_noise(rng: &mut ChaCha8Rng) -> NoiseParams {
    NoiseParams::new(
        rng.random_range(0.85..=1.0),
        rng.random_range(0.85..=1.0),
        rng.random_range(0.85..=1.0),
    )
    .unwrap()
}

#[test]
fn scheme_a_grid() {
    for (f, p2, eta) in grid() {
        let n = NoiseParams::new(1.0, p2, eta).unwrap();
        let w = BellDiagonal::werner(f).unwrap();
        let (o, po) = oracle_purification_step(&w, &w, Scheme::A, &n).unwrap();
        let (fa, pa) = scheme_a_step(f, &n).unwrap();
        assert!((o.fidelity() - fa).abs() < TOL, "{f} {p2} {eta}");
        assert!((po - pa).abs() < TOL, "{f} {p2} {eta}");
    }
}

#[test]
fn scheme_b_and_c_grid() {
    for (f, p2, eta) in grid() {
        let n = NoiseParams::new(1.0, p2, eta).unwrap();
        let s = BellDiagonal::epsilon(f, 0.7).unwrap();
        let aux = BellDiagonal::werner(f).unwrap();
        let (o, po) = oracle_purification_step(&s, &s, Scheme::B, &n).unwrap();
        let (b, pb) = scheme_b_step(&s, &n).unwrap();
        assert!(o.max_abs_diff(&b) < TOL && (po - pb).abs() < TOL, "{f} {p2} {eta}");
        let (o, po) = oracle_purification_step(&s, &aux, Scheme::B, &n).unwrap();
        let (c, pc) = scheme_c_step(&s, &aux, &n).unwrap();
        assert!(o.max_abs_diff(&c) < TOL && (po - pc).abs() < TOL, "{f} {p2} {eta}");
    }
}

#[test]
fn connection_grid() {
    for (f, p2, eta) in grid() {
        for p1 in [0.95, 1.0] {
            let n = NoiseParams::new(p1, p2, eta).unwrap();
            let w = BellDiagonal::werner(f).unwrap();
            let o = oracle_connection(&w, &w, &n).unwrap();
            assert!(o.max_abs_diff(&connect_pair(&w, &w, &n).unwrap()) < TOL, "{f} {p2} {eta}");
        }
    }
}

#[test]
fn random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..100 {
        let (s1, s2, n) = (random_state(&mut rng), random_state(&mut rng), random_noise(&mut rng));
        let (o, po) = oracle_purification_step(&s1, &s2, Scheme::B, &n).unwrap();
        let (c, pc) = scheme_c_step(&s1, &s2, &n).unwrap();
        assert!(o.max_abs_diff(&c) < 1e-12 && (po - pc).abs() < 1e-12);
        let (o, _) = oracle_purification_step(&s1, &s1, Scheme::B, &n).unwrap();
        assert!(o.max_abs_diff(&scheme_b_step(&s1, &n).unwrap().0) < 1e-12);

        let o = oracle_connection(&s1, &s2, &n).unwrap();
        assert!(o.max_abs_diff(&connect_pair(&s1, &s2, &n).unwrap()) < 1e-12);
    }
}

#[test]
fn rotated_step_keeps_states_bell_diagonal() {
    // the oracle output has no Bell-basis coherences, so comparing
    // diagonals loses nothing
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let s = random_state(&mut rng);
        let rho = DensityMatrix::from_bell_diagonal(&s);
        assert!(rho.bell_coherence().unwrap() < 1e-15);
        assert!(rho.validate().is_ok());
    }
}

#[test]
fn mixed_pairs_stay_mixed() {
    let mixed = BellDiagonal::MIXED;
    for (_, p2, eta) in grid() {
        let n = NoiseParams::new(1.0, p2, eta).unwrap();
        for scheme in [Scheme::A, Scheme::B] {
            let (o, _) = oracle_purification_step(&mixed, &mixed, scheme, &n).unwrap();
            assert!((o.fidelity() - 0.25).abs() < 1e-12);
        }
    }
}
