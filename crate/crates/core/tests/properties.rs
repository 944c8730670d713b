//! Randomised invariants over the public API.

use phytolink::linkstats::midpoint_thresholds;
use phytolink::mycorrhizal::MycoNetwork;
use phytolink::numerics::{convolve_causal, trapezoid_integral};
use phytolink::receiver::{root_uptake_mm, UptakeParams};
use phytolink::scenario::{export_csv, read_csv};
use phytolink::{TimeSeries, Unit};
use proptest::prelude::*;

fn series(values: Vec<f64>, unit: Unit) -> TimeSeries {
    TimeSeries::new(0.0, 0.1, values, unit).unwrap()
}

proptest! {
    #[test]
    fn convolution_is_linear_in_the_input(
        a in prop::collection::vec(-1.0..1.0f64, 1..40),
        h in prop::collection::vec(0.0..1.0f64, 1..40),
        s in -5.0..5.0f64,
    ) {
        let x = series(a.clone(), Unit::Flux);
        let k = series(h, Unit::ResponsePerMole);
        let y = convolve_causal(&x, &k).unwrap();
        let ys = convolve_causal(&x.scale(s).unwrap(), &k).unwrap();
        prop_assert_eq!(y.len(), a.len() + k.len() - 1);
        for (p, q) in y.values().iter().zip(ys.values()) {
            prop_assert!((p * s - q).abs() <= 1e-12 * (1.0 + q.abs()));
        }
    }

    #[test]
    fn convolution_mass_is_product_of_masses(
        a in prop::collection::vec(0.0..1.0f64, 1..40),
        h in prop::collection::vec(0.0..1.0f64, 1..40),
    ) {
        // Σ-based masses multiply exactly up to rounding
        let x = series(a.clone(), Unit::Flux);
        let k = series(h.clone(), Unit::ResponsePerMole);
        let y = convolve_causal(&x, &k).unwrap();
        let mass = |v: &[f64]| v.iter().sum::<f64>() * 0.1;
        let expect = mass(&a) * mass(&h);
        prop_assert!((mass(y.values()) - expect).abs() <= 1e-12 * (1.0 + expect));
        prop_assert!(trapezoid_integral(&y).is_finite());
    }

    #[test]
    fn thresholds_separate_sorted_levels(mut levels in prop::collection::vec(-1e3..1e3f64, 2..8)) {
        let t = midpoint_thresholds(&levels);
        levels.sort_by(f64::total_cmp);
        prop_assert_eq!(t.len(), levels.len() - 1);
        for (i, th) in t.iter().enumerate() {
            prop_assert!(levels[i] <= *th && *th <= levels[i + 1]);
        }
    }

    #[test]
    fn saturating_uptake_is_bounded_and_monotone(c in 0.0..1e3f64, dc in 0.0..1e3f64) {
        let p = UptakeParams::default();
        let j = root_uptake_mm(c, &p);
        prop_assert!((0.0..=p.j_max).contains(&j));
        prop_assert!(root_uptake_mm(c + dc, &p) >= j);
    }

    #[test]
    fn laplacian_rows_sum_to_zero(
        n in 2usize..10,
        extra in prop::collection::vec((0usize..10, 0usize..10), 0..20),
        k in 1e-3..10.0f64,
    ) {
        // a path keeps the graph connected; extra chords are deduplicated
        let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        for (a, b) in extra {
            let (a, b) = (a % n, b % n);
            if a != b && !pairs.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)) {
                pairs.push((a, b));
            }
        }
        let g = MycoNetwork::from_pairs(n, &pairs, k).unwrap();
        prop_assert!(g.is_connected());
        let l = g.laplacian();
        let incident = |i: usize| -> f64 {
            g.edges().iter().filter(|e| e.i == i || e.j == i).map(|e| e.conductance).sum()
        };
        for i in 0..n {
            prop_assert!(l.row(i).sum().abs() <= 1e-12 * incident(i));
            prop_assert!((l[(i, i)] - incident(i)).abs() <= 1e-12 * incident(i));
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact(values in prop::collection::vec(prop::num::f64::NORMAL, 1..50)) {
        let dir = tempfile::tempdir().unwrap();
        let ts = series(values, Unit::Concentration);
        let paths = export_csv(&[("x".into(), ts.clone())], dir.path()).unwrap();
        let (t, v) = read_csv(&paths[0]).unwrap();
        prop_assert_eq!(v, ts.values().to_vec());
        prop_assert_eq!(t, ts.times().collect::<Vec<_>>());
    }
}
