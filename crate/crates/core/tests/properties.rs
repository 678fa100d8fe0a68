mod common;

use proptest::prelude::*;

use common::{geometry_ok, rounded, top_of, Class, Thresholds};
use strip_forge::baselines::{ffdh, nfdh, upper_bound_pack};
use strip_forge::classify::{classify_dims, medium_vertical_count_bound, round_height, FSpec, ItemClass, Params};
use strip_forge::cli::io;
use strip_forge::cli::svg::render_svg;
use strip_forge::model::Rect;
use strip_forge::rational::{q, qi};
use strip_forge::solver::{
    dp_place_tall_vertical_with, dual_approx_search, exact_oracle, probe_budget, psi, solve_structured, DpOptions,
    DualOutcome, Job, Mode, OracleLimits, TvBox, TvItem,
};
use strip_forge::{lower_bound, validate_packing, Instance, Item};

fn instance(max_n: usize, max_w: i64, max_h: i64) -> impl Strategy<Value = Instance> {
    (1..=max_w).prop_flat_map(move |w| {
        prop::collection::vec((1..=w, 1..=max_h), 1..=max_n).prop_map(move |d| Instance::from_dims(w, &d))
    })
}

fn rect() -> impl Strategy<Value = Rect> {
    (-5i64..20, -5i64..20, 1i64..8, 1i64..8).prop_map(|(x, y, w, h)| Rect::new(x, y, w, h))
}

fn to_class(c: ItemClass) -> Class {
    match c {
        ItemClass::Large => Class::Large,
        ItemClass::Tall => Class::Tall,
        ItemClass::Vertical => Class::Vertical,
        ItemClass::MediumVertical => Class::MediumVertical,
        ItemClass::Horizontal => Class::Horizontal,
        ItemClass::Small => Class::Small,
        ItemClass::Medium => Class::Medium,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn overlap_is_symmetric_and_irreflexive_in_area(a in rect(), b in rect()) {
        prop_assert_eq!(a.overlaps(&b), b.overlaps(&a));
        prop_assert!(a.overlaps(&a));
        let cells = |r: &Rect| (r.x..r.right()).flat_map(move |x| (r.y..r.top()).map(move |y| (x, y))).collect::<std::collections::BTreeSet<_>>();
        prop_assert_eq!(a.overlaps(&b), !cells(&a).is_disjoint(&cells(&b)));
    }

    #[test]
    fn shelf_packings_validate(inst in instance(25, 60, 40)) {
        for p in [nfdh(&inst), ffdh(&inst), upper_bound_pack(&inst).unwrap().0] {
            prop_assert!(validate_packing(&inst, &p, false).is_valid());
            prop_assert!(geometry_ok(&inst, &p, false));
            prop_assert_eq!(top_of(&inst, &p), p.height);
        }
        let p = nfdh(&inst);
        let area: i64 = inst.items.iter().map(|i| i.width * i.height).sum();
        prop_assert!(p.height * inst.strip_width <= 2 * area + inst.max_height() * inst.strip_width);
    }

    #[test]
    fn bounds_bracket_the_optimum(inst in instance(5, 6, 6)) {
        let (opt, p) = exact_oracle(&inst, OracleLimits::default(), false).unwrap();
        prop_assert!(geometry_ok(&inst, &p, false));
        prop_assert!(lower_bound(&inst) <= opt);
        prop_assert!(opt <= upper_bound_pack(&inst).unwrap().0.height);
        prop_assert!(opt <= nfdh(&inst).height);
    }

    #[test]
    fn classes_follow_the_thresholds(w in 1i64..=200, h in 1i64..=400, pick in 0usize..3) {
        let (eps, delta, mu) = [(q(1, 4), q(1, 16), q(1, 64)), (q(1, 10), q(1, 10), q(1, 100)), (q(1, 4), q(1, 4), q(1, 32))][pick].clone();
        let (t, sw) = (200, 200);
        let p = Params::new(eps.clone(), delta.clone(), mu.clone(), t, FSpec::LINEAR).unwrap();
        let th = Thresholds { epsilon: eps, delta, mu, t, w: sw };
        prop_assert_eq!(to_class(classify_dims(w, h, &p, sw)), th.class(w, h));
    }

    #[test]
    fn medium_vertical_count_is_bounded(inst in instance(40, 64, 64)) {
        let p = Params::new(q(1, 4), q(1, 16), q(1, 64), 64, FSpec::LINEAR).unwrap();
        let th = Thresholds { epsilon: p.epsilon.clone(), delta: p.delta.clone(), mu: p.mu.clone(), t: 64, w: inst.strip_width };
        // The bound presumes the medium area budget holds.
        let budget = p.f_value() * qi(inst.strip_width) * qi(64);
        prop_assume!(qi(th.medium_area(&inst)) <= budget);
        let mv = inst.items.iter().filter(|i| th.class(i.width, i.height) == Class::MediumVertical).count();
        prop_assert!(qi(mv as i64) <= medium_vertical_count_bound(&p, inst.strip_width));
    }

    #[test]
    fn rounding_is_monotone_and_bounded(t in 1i64..=300, a in 1i64..=300, b in 1i64..=300, quarter in any::<bool>()) {
        let eps = if quarter { q(1, 4) } else { q(1, 2) };
        let (a, b) = (a.min(t), b.min(t));
        let (lo, hi) = (a.min(b), a.max(b));
        let (rl, _, _) = round_height(lo, &eps, t).unwrap();
        let (rh, _, _) = round_height(hi, &eps, t).unwrap();
        prop_assert!(rl <= rh);
        prop_assert!(rl >= qi(lo) && rl <= (qi(1) + &eps) * qi(lo));
        prop_assert_eq!(rl, rounded(lo, &eps, t).unwrap());
    }

    #[test]
    fn dp_dedup_keeps_the_verdict(
        boxes in prop::collection::vec((0usize..2, 1i64..6), 0..4),
        items in prop::collection::vec((0usize..2, 1i64..4), 0..7),
    ) {
        let hs = [4, 7];
        let boxes: Vec<TvBox> = boxes.iter().map(|&(k, w)| TvBox { height: hs[k], width: w }).collect();
        let items: Vec<TvItem> = items.iter().map(|&(k, w)| TvItem { height: hs[k], width: w }).collect();
        let a = dp_place_tall_vertical_with(&boxes, &items, DpOptions { dedup: true });
        let b = dp_place_tall_vertical_with(&boxes, &items, DpOptions { dedup: false });
        prop_assert_eq!(a.is_some(), b.is_some());
    }

    #[test]
    fn dual_search_finds_the_threshold(lo in -50i64..50, len in 1i64..500, cut in -60i64..600) {
        let hi = lo + len - 1;
        let mut calls = 0;
        let out = dual_approx_search(lo..=hi, |t| { calls += 1; (t >= cut).then_some(t) });
        let expect = (lo..=hi).find(|&t| t >= cut);
        match out {
            DualOutcome::Found { t, .. } => prop_assert_eq!(Some(t), expect),
            DualOutcome::Exhausted { .. } => prop_assert_eq!(expect, None),
        }
        prop_assert!(calls <= probe_budget(len));
    }

    #[test]
    fn psi_is_nonincreasing(allot in prop::collection::btree_map(1i64..8, 1i64..20, 1..5), p1 in 1i64..25, p2 in 1i64..25) {
        let j = Job { id: "j".into(), allotments: allot };
        let (a, b) = (p1.min(p2), p1.max(p2));
        match (psi(&j, a), psi(&j, b)) {
            (Some(x), Some(y)) => prop_assert!(y <= x),
            (Some(_), None) => prop_assert!(false, "longer time lost its allotment"),
            _ => {}
        }
    }

    #[test]
    fn heuristic_structured_output_validates(inst in instance(20, 40, 30)) {
        let r = solve_structured(&inst, &q(1, 4), &Mode::Heuristic).unwrap();
        prop_assert!(validate_packing(&inst, &r.packing, false).is_valid());
        prop_assert!(r.height() <= r.fallback_height);
        if let Some(s) = r.structured_height {
            prop_assert!(r.height() <= s);
        }
    }

    #[test]
    fn formats_round_trip(inst in instance(15, 50, 50)) {
        prop_assert_eq!(io::parse_instance(&io::emit_instance(&inst)).unwrap(), inst.clone());
        let p = ffdh(&inst);
        prop_assert_eq!(io::parse_packing(&io::emit_packing(&p)).unwrap(), p);
    }

    #[test]
    fn svg_uses_scaled_integers(inst in instance(10, 30, 30), scale in 1i64..12) {
        let p = nfdh(&inst);
        let s = render_svg(&inst, &p, scale, None);
        for line in s.lines().filter(|l| l.starts_with("<rect id=")) {
            for key in ["x", "y", "width", "height"] {
                let tag = format!(" {key}=\"");
                let start = line.find(&tag).unwrap() + tag.len();
                let v: i64 = line[start..].split('"').next().unwrap().parse().unwrap();
                prop_assert_eq!(v % scale, 0);
            }
        }
    }
}

#[test]
fn every_item_gets_exactly_one_class() {
    let p = Params::new(q(1, 4), q(1, 16), q(1, 64), 64, FSpec::LINEAR).unwrap();
    let w = 64;
    for width in 1..=w {
        for h in 1..=128 {
            let it = Item::new("x", width, h);
            let c = strip_forge::classify::classify(&it, &p, w);
            assert_eq!(c, classify_dims(width, h, &p, w));
        }
    }
}
