//! Randomized invariant checks across the pipeline stages.

use proptest::prelude::*;
use recession_frontier::classifier::{run_state_machine, Zeta};
use recession_frontier::indicator::{
    boxcox_gap, combine, materialize, Combo, IndicatorSpec, LegSpec, Smoothing,
};
use recession_frontier::ingest::{
    parse_calendar, parse_monthly_series, splice_scaled, write_calendar, write_monthly_series,
};
use recession_frontier::month::MonthIndex;
use recession_frontier::series::{MonthlySeries, RecessionCalendar};

fn month_strategy() -> impl Strategy<Value = MonthIndex> {
    (1800i32..2200, 1u32..=12).prop_map(|(y, m)| MonthIndex::new(y, m))
}

fn series_strategy(max_len: usize) -> impl Strategy<Value = MonthlySeries> {
    (
        month_strategy(),
        prop::collection::vec(0.01f64..30.0, 1..max_len),
    )
        .prop_map(|(start, values)| MonthlySeries::new(start, values).unwrap())
}

fn leg_strategy() -> impl Strategy<Value = LegSpec> {
    (
        prop_oneof![
            (0u8..=11).prop_map(|alpha| Smoothing::Simple { alpha }),
            (1u8..=10).prop_map(|alpha_tenths| Smoothing::Exponential { alpha_tenths }),
        ],
        1u8..=18,
        0u8..=10,
    )
        .prop_map(|(smoothing, beta, gamma_tenths)| LegSpec {
            smoothing,
            beta,
            gamma_tenths,
        })
}

fn spec_strategy() -> impl Strategy<Value = IndicatorSpec> {
    (
        prop_oneof![Just(Combo::Linear), Just(Combo::MinMax)],
        leg_strategy(),
        0u8..=10,
    )
        .prop_map(|(combo, leg, delta_tenths)| IndicatorSpec {
            combo,
            leg,
            delta_tenths,
        })
}

proptest! {
    #[test]
    fn month_serial_round_trip(m in month_strategy()) {
        prop_assert_eq!(MonthIndex::from_serial(m.serial()), m);
        prop_assert_eq!(MonthIndex::new(m.year(), m.month()), m);
        let parsed: MonthIndex = m.to_string().parse().unwrap();
        prop_assert_eq!(parsed, m);
    }

    #[test]
    fn month_arithmetic_is_consistent(m in month_strategy(), k in -600i32..600) {
        prop_assert_eq!((m + k) - m, k);
        prop_assert_eq!((m + k) - k, m);
    }

    #[test]
    fn series_csv_round_trip(series in series_strategy(120)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        write_monthly_series(&path, &series).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = parse_monthly_series(&text, "value").unwrap();
        prop_assert_eq!(parsed, series);
    }

    #[test]
    fn calendar_csv_round_trip(
        mut offsets in prop::collection::btree_set(0i32..1_200, 1..20),
        origin in month_strategy(),
        with_ends in any::<bool>(),
    ) {
        let starts: Vec<MonthIndex> =
            offsets.iter().map(|&o| origin + o).collect();
        offsets.clear();
        let ends = starts
            .iter()
            .map(|&s| with_ends.then(|| s + 6))
            .collect();
        let calendar = RecessionCalendar::new(starts, ends).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("calendar.csv");
        write_calendar(&path, &calendar).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        prop_assert_eq!(parse_calendar(&text).unwrap(), calendar);
    }

    #[test]
    fn smoothing_stays_within_input_range(
        series in series_strategy(80),
        smoothing in prop_oneof![
            (0u8..=11).prop_map(|alpha| Smoothing::Simple { alpha }),
            (1u8..=10).prop_map(|alpha_tenths| Smoothing::Exponential { alpha_tenths }),
        ],
    ) {
        let lo = series.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = series.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let smoothed = smoothing.apply(&series).unwrap();
        prop_assert_eq!(smoothed.len(), series.len());
        prop_assert_eq!(smoothed.start(), series.start());
        for &x in smoothed.values() {
            prop_assert!(x >= lo - 1e-12 && x <= hi + 1e-12);
        }
    }

    #[test]
    fn gap_is_nonnegative_and_zero_at_equality(
        series in series_strategy(80),
        beta in 1u8..=18,
        gamma_tenths in 0u8..=10,
    ) {
        use recession_frontier::indicator::{trailing_extremum, ExtremumMode};
        let low = trailing_extremum(&series, beta, ExtremumMode::Min).unwrap();
        let gap = boxcox_gap(&series, &low, gamma_tenths).unwrap();
        for (i, &g) in gap.values().iter().enumerate() {
            prop_assert!(g >= 0.0);
            if series.values()[i] == low.values()[i] {
                prop_assert_eq!(g, 0.0);
            }
        }
    }

    #[test]
    fn linear_weight_is_sandwiched_by_min_and_max(
        series in series_strategy(60),
        leg in leg_strategy(),
        delta_tenths in 0u8..=10,
    ) {
        use recession_frontier::indicator::{materialize_leg, Direction};
        let v = series.map(|x| 31.0 - x);
        let u_hat = materialize_leg(&leg, &series, Direction::RiseInRecession).unwrap();
        let v_hat = materialize_leg(&leg, &v, Direction::FallInRecession).unwrap();
        let linear = combine(&u_hat, &v_hat, Combo::Linear, delta_tenths).unwrap();
        let lo = combine(&u_hat, &v_hat, Combo::MinMax, 10).unwrap();
        let hi = combine(&u_hat, &v_hat, Combo::MinMax, 0).unwrap();
        for i in 0..linear.len() {
            prop_assert!(linear.values()[i] >= lo.values()[i] - 1e-12);
            prop_assert!(linear.values()[i] <= hi.values()[i] + 1e-12);
        }
    }

    #[test]
    fn spec_string_round_trip(spec in spec_strategy()) {
        let parsed: IndicatorSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(parsed, spec);
    }

    #[test]
    fn indicator_is_causal(
        series in series_strategy(60),
        spec in spec_strategy(),
        tail in 0.01f64..30.0,
    ) {
        // appending a month never changes earlier indicator values
        let v = series.map(|x| 31.0 - x);
        let base = materialize(&spec, &series, &v).unwrap();
        let mut u2 = series.values().to_vec();
        u2.push(tail);
        let mut v2 = v.values().to_vec();
        v2.push(31.0 - tail);
        let u2 = MonthlySeries::new(series.start(), u2).unwrap();
        let v2 = MonthlySeries::new(series.start(), v2).unwrap();
        let extended = materialize(&spec, &u2, &v2).unwrap();
        prop_assert_eq!(
            &extended.series.values()[..base.series.len()],
            base.series.values()
        );
    }

    #[test]
    fn splice_is_continuous_at_the_anchor(
        early in series_strategy(60),
        scale in 0.2f64..5.0,
        anchor_offset in 0i32..40,
    ) {
        prop_assume!(anchor_offset < early.len() as i32);
        let late = early.map(|x| x * scale);
        let anchor = early.start() + anchor_offset;
        let spliced = splice_scaled(&early, &late, anchor).unwrap();
        prop_assert_eq!(spliced.start(), early.start());
        prop_assert_eq!(spliced.end(), late.end());
        // at and after the anchor the late series wins verbatim
        for m in std::iter::successors(Some(anchor), |&m| {
            (m < late.end()).then(|| m + 1)
        }) {
            prop_assert_eq!(spliced.value_at(m), late.value_at(m));
        }
        // before it, the early series is rescaled by the anchor ratio
        let factor = late.value_at(anchor).unwrap() / early.value_at(anchor).unwrap();
        for i in 0..anchor_offset {
            let m = early.start() + i;
            let expected = early.value_at(m).unwrap() * factor;
            prop_assert!((spliced.value_at(m).unwrap() - expected).abs() <= 1e-9);
        }
    }

    #[test]
    fn state_machine_invariants(
        values in prop::collection::vec(
            prop_oneof![3 => Just(0.0), 7 => 0.0001f64..0.4], 2..300),
        zeta_k in 1u32..=2_500,
    ) {
        let series = MonthlySeries::new(MonthIndex::new(1990, 1), values).unwrap();
        let zeta = Zeta::from_ten_thousandths(zeta_k).unwrap();
        let window = (series.start(), series.end());
        let outcome = run_state_machine(&series, zeta, window, 0.0).unwrap();
        let states = outcome.state_path();
        let mut detections = outcome.detections().iter();
        let mut prev = false;
        for (i, &in_recession) in states.iter().enumerate() {
            let month = series.start() + i as i32;
            let value = series.values()[i];
            if in_recession && !prev {
                // entry requires a threshold crossing, recorded as a detection
                prop_assert!(value >= zeta.value());
                prop_assert_eq!(detections.next().copied(), Some(month));
            }
            if prev && !in_recession {
                prop_assert_eq!(value, 0.0);
            }
            if in_recession {
                prop_assert!(value > 0.0);
            }
            prev = in_recession;
        }
        prop_assert_eq!(detections.next(), None);
    }
}
