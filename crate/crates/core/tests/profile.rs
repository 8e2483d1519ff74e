use ep_stability::params::{critical_amplitude, ion_sound_speed};
use ep_stability::profile::*;
use ep_stability::{EpError, PlasmaParams};
use proptest::prelude::*;

fn wave(k: f64, eps: f64) -> WaveProfile {
    WaveProfile::compute(&PlasmaParams::new(k, eps).unwrap(), &ProfileOptions::default()).unwrap()
}

#[test]
fn sound_speed_values() {
    assert_eq!(ion_sound_speed(0.0), 1.0);
    assert_eq!(ion_sound_speed(3.0), 2.0);
    assert!((ion_sound_speed(1.0) - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn enthalpy_reference_points() {
    let p = PlasmaParams::new(1.0, 0.1550).unwrap();
    assert_eq!(enthalpy(0.0, p.c(), 1.0), 0.0);
    assert!((enthalpy(0.5529, p.c(), 1.0) - 0.2805).abs() < 1e-3);
    let ns = sonic_density(p.c(), 1.0).unwrap();
    assert!(enthalpy_dn(ns, p.c(), 1.0).abs() < 1e-15);
}

#[test]
fn potential_reference_points() {
    let p = PlasmaParams::new(1.0, 0.1).unwrap();
    assert_eq!(sagdeev_g(0.0, p.c(), 1.0), 0.0);
    assert!(sagdeev_g(0.25, p.c(), 1.0) > 0.0);
    let pk = peak_state(&p).unwrap();
    assert!(sagdeev_g(pk.n_star, p.c(), 1.0).abs() < 1e-10);
    assert_eq!(sagdeev_u(0.0, 1.4), 0.0);
}

#[test]
fn cold_ion_peaks_from_table() {
    for (eps, phi) in [(0.40, 0.9383), (0.585, 1.2561)] {
        let pk = peak_state(&PlasmaParams::new(0.0, eps).unwrap()).unwrap();
        assert!((pk.phi_star - phi).abs() < 1e-3, "{eps}: {}", pk.phi_star);
    }
    let pk = peak_state(&PlasmaParams::new(0.0, 0.585).unwrap()).unwrap();
    assert!((pk.n_star / 5.209e3 - 1.0).abs() < 0.05);
}

#[test]
fn warm_ion_peaks_from_table() {
    let pk = peak_state(&PlasmaParams::new(0.0, 0.01).unwrap()).unwrap();
    for (a, b) in [(pk.n_star, 0.0305), (pk.u_star, 0.0299), (pk.phi_star, 0.0298)] {
        assert!((a - b).abs() < 1e-3);
    }
    let pk = peak_state(&PlasmaParams::new(0.001, 0.5474).unwrap()).unwrap();
    assert!((pk.n_star - 45.3119).abs() < 0.05);
    let pk = peak_state(&PlasmaParams::new(10.0, 0.0523).unwrap()).unwrap();
    for (a, b) in [(pk.n_star, 0.0642), (pk.u_star, 0.2033), (pk.phi_star, 0.0418)] {
        assert!((a - b).abs() < 1e-3);
    }
    let pk = peak_state(&PlasmaParams::new(1.0, 0.002).unwrap()).unwrap();
    for (a, b) in [(pk.n_star, 0.0043), (pk.u_star, 0.0060), (pk.phi_star, 0.0042)] {
        assert!((a - b).abs() < 1e-3);
    }
}

#[test]
fn beyond_existence_is_reported() {
    let eps_k = critical_amplitude(1.0).unwrap().eps;
    let p = PlasmaParams::new(1.0, eps_k * 1.01).unwrap();
    assert!(matches!(peak_state(&p), Err(EpError::BeyondExistence { .. })));
    assert!(PlasmaParams::new(1.0, 0.0).is_err());
    assert!(PlasmaParams::new(-1.0, 0.1).is_err());
}

#[test]
fn decay_rate_closed_form() {
    // direct evaluation of sqrt((c^2 - 1 - K) / (c^2 - K))
    let r = far_field_decay_rate(&PlasmaParams::new(1.0, 0.1).unwrap());
    let c2 = (2f64.sqrt() + 0.1).powi(2);
    assert!((r - ((c2 - 2.0) / (c2 - 1.0)).sqrt()).abs() < 1e-14);
    assert!((r - 0.47594).abs() < 1e-5);
    let r0 = far_field_decay_rate(&PlasmaParams::new(0.0, 0.5).unwrap());
    assert!((r0 - (1.25f64 / 2.25).sqrt()).abs() < 1e-14);
    assert!(far_field_decay_rate(&PlasmaParams::new(1.0, 1e-12).unwrap()) < 1e-5);
}

#[test]
fn peak_at_origin_and_tail_bound() {
    let w = wave(1.0, 0.05);
    let s = w.sample(0.0);
    assert_eq!(s.n, w.peak().n_star);
    assert_eq!(s.e_field, 0.0);
    let tail = w.sample(w.x_max()).n;
    assert!(tail.abs() <= w.peak().n_star * (-w.decay_rate() * w.x_max()).exp() * 10.0);
}

#[test]
fn tail_log_slope_matches_decay_rate() {
    let w = wave(1.0, 0.05);
    let (a, b) = (0.6 * w.x_max(), w.x_max());
    let slope = (w.sample(b).n.ln() - w.sample(a).n.ln()) / (b - a);
    assert!((slope / -w.decay_rate() - 1.0).abs() < 0.05, "{slope}");
}

#[test]
fn density_increases_towards_peak() {
    let w = wave(10.0, 0.03);
    let left: Vec<f64> = w.samples().iter().filter(|s| s.x <= 0.0).map(|s| s.n).collect();
    assert!(left.windows(2).all(|p| p[1] > p[0]));
}

#[test]
fn peak_density_grows_with_amplitude() {
    for k in [0.0, 0.001, 1.0, 10.0] {
        let top = critical_amplitude(k).unwrap().eps;
        let n: Vec<f64> = (1..20)
            .map(|i| peak_state(&PlasmaParams::new(k, top * i as f64 / 20.0).unwrap()).unwrap().n_star)
            .collect();
        assert!(n.windows(2).all(|p| p[1] > p[0]), "K = {k}");
    }
}

#[test]
fn cold_limit_is_continuous() {
    for eps in [0.05, 0.3, 0.5] {
        let a = peak_state(&PlasmaParams::new(0.0, eps).unwrap()).unwrap();
        let b = peak_state(&PlasmaParams::new(1e-6, eps).unwrap()).unwrap();
        assert!((a.n_star - b.n_star).abs() < 1e-3 * a.n_star.max(1.0));
        assert!((a.phi_star - b.phi_star).abs() < 1e-3);
    }
}

#[test]
fn uniform_grid_spans_domain() {
    let w = wave(1.0, 0.1);
    let g = w.uniform(11);
    assert_eq!(g.len(), 11);
    assert_eq!(g[0].x, -w.x_max());
    assert_eq!(g[10].x, w.x_max());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn potential_positive_below_peak(k in prop::sample::select(vec![0.001, 0.1, 1.0, 10.0]), frac in 0.02f64..0.98) {
        let eps = frac * critical_amplitude(k).unwrap().eps;
        let p = PlasmaParams::new(k, eps).unwrap();
        let pk = peak_state(&p).unwrap();
        for i in 1..100 {
            let n = pk.n_star * i as f64 / 100.0;
            prop_assert!(sagdeev_g(n, p.c(), k) > 0.0);
            prop_assert!(enthalpy_dn(n, p.c(), k) > 0.0);
        }
        prop_assert!(sagdeev_g(pk.n_star, p.c(), k).abs() < 1e-10);
    }

    #[test]
    fn sample_identities(k in prop::sample::select(vec![0.001, 1.0, 10.0]), frac in 0.05f64..0.9, t in -1.0f64..1.0) {
        let eps = frac * critical_amplitude(k).unwrap().eps;
        let w = wave(k, eps);
        let (c, x) = (w.params().c(), t * w.x_max());
        let s = w.sample(x);
        prop_assert!((s.u - c * s.n / (1.0 + s.n)).abs() < 1e-12);
        prop_assert!((s.phi - enthalpy(s.n, c, k)).abs() < 1e-12);
        prop_assert!((s.d2phi_dx2 - (s.phi.exp() - 1.0 - s.n)).abs() < 1e-12);
        prop_assert!((s.dn_dx + s.e_field / enthalpy_dn(s.n, c, k)).abs() < 1e-12 * (1.0 + s.dn_dx.abs()));
        prop_assert!((s.du_dx - c * s.dn_dx / (1.0 + s.n).powi(2)).abs() < 1e-12 * (1.0 + s.du_dx.abs()));
        let g = sagdeev_g(s.n, c, k);
        prop_assert!((0.5 * s.e_field * s.e_field - g).abs() < 1e-8 * w.peak().n_star.powi(2));
        let m = w.sample(-x);
        prop_assert!((m.n - s.n).abs() < 1e-10 * w.peak().n_star);
        prop_assert!((m.e_field + s.e_field).abs() < 1e-12);
    }

    #[test]
    fn cold_ion_identities(frac in 0.05f64..0.95, t in -1.0f64..1.0) {
        let eps = frac * critical_amplitude(0.0).unwrap().eps;
        let w = wave(0.0, eps);
        let c = w.params().c();
        let s = w.sample(t * w.x_max());
        prop_assert!((s.u - c * s.n / (1.0 + s.n)).abs() < 1e-12 * (1.0 + s.n));
        prop_assert!((s.d2phi_dx2 - (s.phi.exp() - 1.0 - s.n)).abs() < 1e-10 * (1.0 + s.n));
        let u = sagdeev_u(s.phi, c);
        prop_assert!((0.5 * s.e_field * s.e_field - u).abs() < 1e-8 * w.peak().phi_star.powi(2));
    }
}
