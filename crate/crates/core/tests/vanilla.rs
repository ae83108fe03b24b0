mod common;

use common::{mean_se, terminals};
use proptest::prelude::*;
use xccy_eps::market::{delta_q, MarketParams, VolVector};
use xccy_eps::structure::*;
use xccy_eps::vanilla::*;

const T: f64 = 1.0;

/// A closed-form quote with the option pricer of its explicit route.
type Route<'a> = (f64, Box<dyn Fn(OptionKind, f64) -> f64 + 'a>);

/// A closed-form quote with its discounted simulated payoff.
type Case<'a> = (
    f64,
    Box<dyn Fn(&xccy_eps::market::TerminalSample) -> f64 + 'a>,
);

fn per100(v: f64) -> f64 {
    100.0 * v
}

fn within(got: f64, printed: f64, tol: f64) {
    assert!(
        (got - printed).abs() <= tol,
        "got {got:.5}, printed {printed}"
    );
}

fn dom(s: &EpsStructure, p: &MarketParams) -> f64 {
    price_eps_domestic(s, p, T).unwrap().value
}

fn nominal_net(w: f64, s: &EpsStructure, p: &MarketParams) -> f64 {
    let f = price_eps_nominal_foreign(s, p, T).unwrap();
    w * dom(s, p) + (1.0 - w) * f.domestic_value(p)
}

fn effective_net(w: f64, s: &EpsStructure, p: &MarketParams) -> f64 {
    let f = price_eps_effective(s, p, T).unwrap();
    net_weighted_cost(w, &EpsQuote::domestic(dom(s, p), ReturnKind::Domestic), &f)
        .unwrap()
        .value
}

fn quanto_net(w: f64, s: &EpsStructure, p: &MarketParams) -> f64 {
    let f = price_eps_quanto(s, p, T, p.q0).unwrap();
    w * dom(s, p) + (1.0 - w) * f.value
}

fn strike_grid() -> Vec<f64> {
    (0..20).map(|i| 0.6 + 0.045 * i as f64).collect()
}

#[test]
fn bs_degenerate_and_parity() {
    assert_eq!(
        bs_option(OptionKind::Call, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0).unwrap(),
        0.0
    );
    let c = bs_option(OptionKind::Call, 1.0, 0.95, 0.0435, 0.0, 0.10, 1.0).unwrap();
    let p = bs_option(OptionKind::Put, 1.0, 0.95, 0.0435, 0.0, 0.10, 1.0).unwrap();
    assert!((c - p - (1.0 - 0.95 * (-0.0435f64).exp())).abs() <= 1e-12);
    assert!(bs_option(OptionKind::Put, 1.0, -0.95, 0.0, 0.0, 0.1, 1.0).is_err());
    assert!(bs_option(OptionKind::Put, 1.0, 0.95, 0.0, 0.0, 0.1, 0.0).is_err());
}

#[test]
fn bs_put_matches_simulation() {
    let p = MarketParams::default();
    let xs = terminals(&p, 1_000_000, 101);
    let df = (-p.r_d).exp();
    let pay: Vec<f64> = xs
        .iter()
        .map(|s| df * (0.95 - s.s_d_t / p.s_d0).max(0.0))
        .collect();
    let (m, se) = mean_se(&pay);
    let closed = bs_option(OptionKind::Put, 1.0, 0.95, 0.0435, 0.0, 0.10, 1.0).unwrap();
    assert!(
        (closed - m).abs() <= 3.0 * se,
        "closed {closed} mc {m} se {se}"
    );
    assert!((closed - 0.00866).abs() <= 2e-4, "closed {closed}");
}

#[test]
fn table_two_examples() {
    let p = MarketParams::default();
    let b1 = make_buffer(-0.05, 0.05, 0.5, 0.5).unwrap();
    within(per100(dom(&b1, &p)), -1.431, 0.002);
    within(per100(nominal_net(0.5, &b1, &p)), -2.231, 0.002);
    within(per100(effective_net(0.5, &b1, &p)), -1.620, 0.002);
    within(per100(quanto_net(0.5, &b1, &p)), -2.264, 0.002);

    let b = make_buffer(-0.05, 0.10, 0.5, 0.5).unwrap();
    within(per100(nominal_net(0.5, &b, &p)), -1.055, 0.002);
    within(per100(nominal_net(0.8, &b, &p)), -0.751, 0.002);

    let f3 = make_floor(-0.05, 0.10, 0.8, 0.5).unwrap();
    within(per100(dom(&f3, &p)), 0.024, 0.002);
    let f12 = make_floor(-0.15, 0.10, 0.8, 0.5).unwrap();
    within(per100(effective_net(0.5, &f12, &p)), 0.732, 0.002);
    within(per100(quanto_net(0.8, &f12, &p)), 0.662, 0.002);
}

#[test]
fn zero_structure_and_weight_collapse() {
    let p = MarketParams::default();
    let zero = EpsStructure::new(
        vec![-0.05],
        vec![0.0, 0.0],
        vec![0.05],
        vec![0.0, 0.0],
        RateCheck::Unit,
    )
    .unwrap();
    assert_eq!(dom(&zero, &p), 0.0);
    assert_eq!(price_eps_nominal_foreign(&zero, &p, T).unwrap().value, 0.0);
    assert_eq!(price_eps_effective(&zero, &p, T).unwrap().value, 0.0);
    assert_eq!(price_eps_quanto(&zero, &p, T, p.q0).unwrap().value, 0.0);
    let b = make_buffer(-0.05, 0.05, 0.5, 0.5).unwrap();
    assert_eq!(nominal_net(1.0, &b, &p), dom(&b, &p));
    let d = EpsQuote::domestic(0.3, ReturnKind::Domestic);
    let f = EpsQuote::domestic(-0.7, ReturnKind::EffectiveForeign);
    assert_eq!(net_weighted_cost(1.0, &d, &f).unwrap().value, 0.3);
    assert!(net_weighted_cost(1.5, &d, &f).is_err());
    let foreign = price_eps_nominal_foreign(&b, &p, T).unwrap();
    assert!(net_weighted_cost(0.5, &d, &foreign).is_err());
}

#[test]
fn domestic_parity_grid() {
    let p = MarketParams::default();
    let v = p.sigma_d.norm();
    for k in strike_grid() {
        let c = bs_option(OptionKind::Call, 1.0, k, p.r_d, 0.0, v, T).unwrap();
        let q = bs_option(OptionKind::Put, 1.0, k, p.r_d, 0.0, v, T).unwrap();
        assert!(
            (c - q - (1.0 - k * (-p.r_d * T).exp())).abs() <= 1e-12,
            "k={k}"
        );
    }
}

#[test]
fn effective_parity_grid() {
    let p = MarketParams::default();
    for k in strike_grid() {
        let kd = k * p.s_fe0();
        let c = effective_option(OptionKind::Call, &p, kd, T).unwrap();
        let q = effective_option(OptionKind::Put, &p, kd, T).unwrap();
        let want = p.s_fe0() - kd * (-p.r_d * T).exp();
        assert!((c - q - want).abs() <= 1e-12 * p.s_fe0(), "k={k}");
    }
}

#[test]
fn quanto_parity_grid() {
    let p = MarketParams::default();
    for k in strike_grid() {
        let kf = k * p.s_f0;
        let c = quanto_option(OptionKind::Call, &p, kf, T, p.q0).unwrap();
        let q = quanto_option(OptionKind::Put, &p, kf, T, p.q0).unwrap();
        let want = p.q0 * (p.s_f0 * (delta_q(&p) * T).exp() - kf * (-p.r_d * T).exp());
        assert!((c - q - want).abs() <= 1e-12 * p.q0 * p.s_f0, "k={k}");
    }
    assert!(quanto_option(OptionKind::Call, &p, 1.0, T, 0.0).is_err());
}

#[test]
fn effective_option_degenerates_without_volatility() {
    let p = MarketParams {
        sigma_q: -MarketParams::default().sigma_f,
        ..Default::default()
    };
    for k in [60.0, 77.7, 90.0] {
        let c = effective_option(OptionKind::Call, &p, k, T).unwrap();
        let want = (p.s_fe0() - k * (-p.r_d * T).exp()).max(0.0);
        assert!((c - want).abs() <= 1e-12, "k={k}");
    }
}

#[test]
fn effective_call_matches_simulation() {
    let base = MarketParams::default();
    let p = MarketParams {
        s_f0: 1.0 / base.q0,
        ..base
    };
    let xs = terminals(&p, 1_000_000, 102);
    let df = (-p.r_d * T).exp();
    let pay: Vec<f64> = xs
        .iter()
        .map(|s| df * (s.s_fe_t() - 1.1).max(0.0))
        .collect();
    let (m, se) = mean_se(&pay);
    let c = effective_option(OptionKind::Call, &p, 1.1, T).unwrap();
    assert!((c - m).abs() <= 3.0 * se, "closed {c} mc {m} se {se}");
}

#[test]
fn quanto_call_matches_simulation() {
    let p = MarketParams {
        s_f0: 1.0,
        ..Default::default()
    };
    let xs = terminals(&p, 1_000_000, 103);
    let df = (-p.r_d * T).exp();
    let pay: Vec<f64> = xs
        .iter()
        .map(|s| df * 1.48 * (s.s_f_t - 1.0).max(0.0))
        .collect();
    let (m, se) = mean_se(&pay);
    let c = quanto_option(OptionKind::Call, &p, 1.0, T, 1.48).unwrap();
    assert!((c - m).abs() <= 3.0 * se, "closed {c} mc {m} se {se}");
}

#[test]
fn quanto_collapses_to_black_scholes() {
    let p = MarketParams {
        sigma_q: VolVector::ZERO,
        r_f: 0.0435,
        ..Default::default()
    };
    assert_eq!(delta_q(&p), 0.0);
    for k in [40.0, 52.5, 60.0] {
        let q = quanto_option(OptionKind::Put, &p, k, T, 1.0).unwrap();
        let b = bs_option(OptionKind::Put, p.s_f0, k, p.r_d, 0.0, p.sigma_f.norm(), T).unwrap();
        assert!((q - b).abs() <= 1e-13);
    }
    let s = make_floor(-0.15, 0.10, 0.8, 0.5).unwrap();
    let as_domestic = MarketParams {
        sigma_d: p.sigma_f,
        ..p
    };
    let q = price_eps_quanto(&s, &p, T, 1.0).unwrap().value;
    assert!((q - dom(&s, &as_domestic)).abs() <= 1e-14);
}

#[test]
fn eps_prices_match_simulation() {
    let p = MarketParams::default();
    let xs = terminals(&p, 1_000_000, 104);
    let df = (-p.r_d * T).exp();
    for s in [
        make_buffer(-0.05, 0.10, 0.8, 0.5).unwrap(),
        make_floor(-0.15, 0.10, 0.8, 0.5).unwrap(),
    ] {
        let cases: [Case<'_>; 4] = [
            (
                dom(&s, &p),
                Box::new(|x| -df * s.psi(x.s_d_t / p.s_d0 - 1.0).unwrap()),
            ),
            (
                price_eps_nominal_foreign(&s, &p, T).unwrap().value,
                Box::new(|x| -df * (x.q_t / p.q0) * s.psi(x.s_f_t / p.s_f0 - 1.0).unwrap()),
            ),
            (
                price_eps_effective(&s, &p, T).unwrap().value,
                Box::new(|x| -df * s.psi(x.s_fe_t() / p.s_fe0() - 1.0).unwrap()),
            ),
            (
                price_eps_quanto(&s, &p, T, p.q0).unwrap().value,
                Box::new(|x| -df * p.q0 * s.psi(x.s_f_t / p.s_f0 - 1.0).unwrap()),
            ),
        ];
        for (i, (closed, payoff)) in cases.iter().enumerate() {
            let (m, se) = mean_se(&xs.iter().map(payoff).collect::<Vec<_>>());
            assert!(
                (closed - m).abs() <= 3.0 * se,
                "case {i}: closed {closed} mc {m} se {se}"
            );
        }
    }
}

#[test]
fn fair_fee_reference_buffer() {
    let p = MarketParams::default();
    let v = p.sigma_d.norm();
    let put = bs_option(OptionKind::Put, 1.0, 0.95, p.r_d, 0.0, v, T).unwrap();
    let call = bs_option(OptionKind::Call, 1.0, 1.05, p.r_d, 0.0, v, T).unwrap();
    let oracle = 0.5 * put / call;
    let unit = make_buffer(-0.05, 0.05, 0.5, 1.0).unwrap();
    let f = fair_fee(&unit, |s| Ok(price_eps_domestic(s, &p, T)?.value)).unwrap();
    assert!((f - oracle).abs() <= 1e-14, "{f} vs {oracle}");
    assert!((f - 0.116).abs() <= 2e-3, "{f}");
    let solved = make_buffer(-0.05, 0.05, 0.5, f).unwrap();
    assert!(dom(&solved, &p).abs() <= 1e-12);
}

#[test]
fn fair_fee_floor_and_zero_protection() {
    let p = MarketParams::default();
    let v = p.sigma_d.norm();
    let put = |k| bs_option(OptionKind::Put, 1.0, k, p.r_d, 0.0, v, T).unwrap();
    let call = bs_option(OptionKind::Call, 1.0, 1.10, p.r_d, 0.0, v, T).unwrap();
    let unit = make_floor(-0.05, 0.10, 0.8, 1.0).unwrap();
    let f = fair_fee(&unit, |s| Ok(price_eps_domestic(s, &p, T)?.value)).unwrap();
    assert!((f - 0.8 * (put(1.0) - put(0.95)) / call).abs() <= 1e-14);
    let no_protection = EpsStructure::new(
        vec![-0.05],
        vec![0.0, 0.0],
        vec![0.05],
        vec![0.0, 1.0],
        RateCheck::Unit,
    )
    .unwrap();
    let f = fair_fee(&no_protection, |s| Ok(price_eps_domestic(s, &p, T)?.value)).unwrap();
    assert_eq!(f, 0.0);
}

fn arb_structure() -> impl Strategy<Value = EpsStructure> {
    (
        1usize..4,
        1usize..4,
        prop::collection::vec(0.0f64..=1.0, 8),
        0.01f64..0.2,
        0.01f64..0.3,
    )
        .prop_map(|(n, m, rates, lstep, gstep)| {
            let l: Vec<f64> = (1..=n)
                .map(|i| -lstep * i as f64)
                .filter(|x| *x > -0.95)
                .collect();
            let g: Vec<f64> = (1..=m).map(|j| gstep * j as f64).collect();
            let p = rates[..=l.len()].to_vec();
            let f = rates[4..=4 + g.len()].to_vec();
            EpsStructure::new(l, p, g, f, RateCheck::Unit).unwrap()
        })
}

proptest! {
    #[test]
    fn replication_route_matches_explicit_sums(s in arb_structure(), t in 0.1f64..5.0) {
        let p = MarketParams::default();
        let (vd, vf) = (p.sigma_d.norm(), p.sigma_f.norm());
        let dq = delta_q(&p);
        let routes: [Route<'_>; 4] = [
            (price_eps_domestic(&s, &p, t).unwrap().value,
             Box::new(|k, x| bs_option(k, 1.0, x, p.r_d, 0.0, vd, t).unwrap())),
            (price_eps_nominal_foreign(&s, &p, t).unwrap().value,
             Box::new(|k, x| bs_option(k, 1.0, x, p.r_f, 0.0, vf, t).unwrap())),
            (price_eps_effective(&s, &p, t).unwrap().value,
             Box::new(|k, x| effective_option(k, &p, x * p.s_fe0(), t).unwrap() / p.s_fe0())),
            (price_eps_quanto(&s, &p, t, 1.3).unwrap().value,
             Box::new(|k, x| 1.3 * bs_option(k, 1.0, x, p.r_d, dq, vf, t).unwrap())),
        ];
        for (closed, opt) in routes.iter() {
            let rep: f64 = s.replication_weights(Underlying::Normalized).positions.iter()
                .map(|pos| pos.quantity * opt(pos.kind, pos.strike)).sum();
            prop_assert!((closed - rep).abs() <= 1e-12, "closed {closed} replication {rep}");
        }
    }

    #[test]
    fn quotes_monotone_in_rates(p2 in 0.0f64..0.9, f2 in 0.0f64..0.9, bump in 0.001f64..0.1) {
        let m = MarketParams::default();
        let quote = |pr: f64, fr: f64| {
            let s = EpsStructure::new(vec![-0.05], vec![0.2, pr], vec![0.05], vec![0.1, fr], RateCheck::Unit).unwrap();
            [
                price_eps_domestic(&s, &m, T).unwrap().value,
                price_eps_nominal_foreign(&s, &m, T).unwrap().value,
                price_eps_effective(&s, &m, T).unwrap().value,
                price_eps_quanto(&s, &m, T, m.q0).unwrap().value,
            ]
        };
        let base = quote(p2, f2);
        let more_p = quote(p2 + bump, f2);
        let more_f = quote(p2, f2 + bump);
        for i in 0..4 {
            prop_assert!(more_p[i] >= base[i]);
            prop_assert!(more_f[i] <= base[i]);
        }
    }
}
