use niph::density::{find_peak, kde, scott_bandwidth};
use niph::persistence::WeightedDeaths;
use niph::transport::{mult_shifts, ot_1d};
use proptest::prelude::*;

fn weighted() -> impl Strategy<Value = WeightedDeaths> {
    prop::collection::vec((0.05..20.0f64, 0.01..5.0f64), 1..25).prop_map(|v| {
        let (d, w) = v.into_iter().unzip();
        WeightedDeaths::new(d, w).unwrap()
    })
}

fn samples() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    prop::collection::vec((0.5..3.0f64, 0.1..2.0f64), 2..60)
        .prop_filter("needs spread", |v| {
            v.iter().any(|p| (p.0 - v[0].0).abs() > 1e-3)
        })
        .prop_map(|v| v.into_iter().unzip())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn plan_conserves_marginals(a in weighted(), b in weighted()) {
        let plan = ot_1d(&a, &b).unwrap();
        for (r, m) in plan.row_sums().iter().zip(&plan.source_mass) {
            prop_assert!((r - m).abs() <= 1e-9);
        }
        for (c, m) in plan.col_sums().iter().zip(&plan.target_mass) {
            prop_assert!((c - m).abs() <= 1e-9);
        }
        prop_assert!(plan.entries.iter().all(|e| e.2 > 0.0));
    }

    #[test]
    fn plan_has_no_crossings(a in weighted(), b in weighted()) {
        let plan = ot_1d(&a, &b).unwrap();
        for &(i, j, _) in &plan.entries {
            for &(k, l, _) in &plan.entries {
                let (x, xk) = (a.deaths[i], a.deaths[k]);
                let (y, yl) = (b.deaths[j], b.deaths[l]);
                prop_assert!(!(x < xk && y > yl), "({i},{j}) crosses ({k},{l})");
            }
        }
    }

    #[test]
    fn shifts_are_scale_free(a in weighted(), b in weighted(), c in 1e-3..1e3f64) {
        let shifts = mult_shifts(&ot_1d(&a, &b).unwrap(), &a, &b).unwrap();
        let scale = |d: &WeightedDeaths| {
            WeightedDeaths::new(d.deaths.iter().map(|x| x * c).collect(), d.weights.clone()).unwrap()
        };
        let (ac, bc) = (scale(&a), scale(&b));
        let scaled = mult_shifts(&ot_1d(&ac, &bc).unwrap(), &ac, &bc).unwrap();
        prop_assert_eq!(&shifts.source_index, &scaled.source_index);
        for (x, y) in shifts.shifts.iter().zip(&scaled.shifts) {
            prop_assert!(*x > 0.0);
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn kde_normalized_and_translation_equivariant((s, w) in samples(), c in -5.0..5.0f64) {
        let h = scott_bandwidth(&s, &w).unwrap();
        let curve = kde(&s, &w, h, 512).unwrap();
        let area = curve.integral();
        prop_assert!((0.95..=1.01).contains(&area), "area {area}");
        prop_assert!(curve.values.iter().all(|v| *v >= 0.0));
        let moved: Vec<f64> = s.iter().map(|x| x + c).collect();
        let shifted = kde(&moved, &w, h, 512).unwrap();
        for k in 0..512 {
            prop_assert!((shifted.grid[k] - curve.grid[k] - c).abs() <= 1e-12);
            prop_assert!((shifted.values[k] - curve.values[k]).abs() <= 1e-12 * curve.values[k].max(1.0));
        }
    }

    #[test]
    fn peak_stable_under_refinement((s, w) in samples()) {
        let h = scott_bandwidth(&s, &w).unwrap();
        let coarse = kde(&s, &w, h, 512).unwrap();
        let fine = kde(&s, &w, h, 1024).unwrap();
        let (p, q) = (find_peak(&coarse).unwrap(), find_peak(&fine).unwrap());
        prop_assert!((p - q).abs() <= coarse.step() + 1e-12, "{p} vs {q}");
        let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(p >= lo - coarse.step() && p <= hi + coarse.step());
    }
}
