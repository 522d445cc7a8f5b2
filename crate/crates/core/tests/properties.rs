mod common;

use std::collections::VecDeque;

use gridmapper::planner::{plan_nearest_frontier, plan_random, step_allowed};
use gridmapper::predictor::{null_predict, synthesize};
use gridmapper::sensing::visible_cells;
use gridmapper::{
    f1_score, generate_floorplan, sense, threshold, CellCategory, Coord, GeneratorConfig, ObservationMap,
    OccupancyGrid, OneHotGrid, PlannerState, ProbabilityGrid, SensorRig, ThresholdConfig,
};
use proptest::prelude::*;

fn category() -> impl Strategy<Value = CellCategory> {
    prop_oneof![
        Just(CellCategory::Free),
        Just(CellCategory::Obstacle),
        Just(CellCategory::Unknown)
    ]
}

fn grid(max: usize) -> impl Strategy<Value = OccupancyGrid> {
    (1..=max, 1..=max).prop_flat_map(|(h, w)| {
        prop::collection::vec(category(), h * w).prop_map(move |cells| OccupancyGrid::from_cells(h, w, cells).unwrap())
    })
}

fn known_grid(max: usize) -> impl Strategy<Value = OccupancyGrid> {
    (1..=max, 1..=max).prop_flat_map(|(h, w)| {
        prop::collection::vec(
            prop_oneof![Just(CellCategory::Free), Just(CellCategory::Obstacle)],
            h * w,
        )
        .prop_map(move |cells| OccupancyGrid::from_cells(h, w, cells).unwrap())
    })
}

fn four_connected(g: &OccupancyGrid) -> bool {
    let free: Vec<Coord> = g.coords().filter(|&c| g.is_free(c)).collect();
    let Some(&start) = free.first() else { return true };
    let mut seen = vec![false; g.len()];
    let mut queue = VecDeque::from([start]);
    seen[g.index(start)] = true;
    let mut count = 0;
    while let Some(c) = queue.pop_front() {
        count += 1;
        for n in g.neighbors4(c).collect::<Vec<_>>() {
            if g.is_free(n) && !seen[g.index(n)] {
                seen[g.index(n)] = true;
                queue.push_back(n);
            }
        }
    }
    count == free.len()
}

proptest! {
    #[test]
    fn one_hot_round_trip(g in grid(12)) {
        let enc = OneHotGrid::encode(&g);
        prop_assert_eq!(enc.decode().unwrap(), g.clone());
        let (h, w) = g.dims();
        for i in 0..h * w {
            let total: f32 = (0..3).map(|ch| enc.channel(ch)[i]).sum();
            prop_assert_eq!(total, 1.0);
        }
    }

    #[test]
    fn text_round_trip(g in grid(12)) {
        prop_assert_eq!(OccupancyGrid::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn wall_fraction_counts_obstacles(g in known_grid(12)) {
        let expected = g.cells().iter().filter(|&&c| c == CellCategory::Obstacle).count() as f64 / g.len() as f64;
        prop_assert_eq!(g.fraction_of_walls().unwrap(), expected);
    }

    #[test]
    fn threshold_is_monotone(p in 0.0f64..=1.0, q in 0.0f64..=1.0, df in 0.0f64..=1.0, dob in 0.0f64..=1.0) {
        let t = ThresholdConfig::new(df, dob);
        let rank = |c: CellCategory| match c {
            CellCategory::Free => 0,
            CellCategory::Unknown => 1,
            CellCategory::Obstacle => 2,
        };
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        prop_assert!(rank(t.classify(lo)) <= rank(t.classify(hi)));
    }

    #[test]
    fn null_pipeline_is_identity(g in grid(10), df in 1e-9f64..=1.0, dob in 1e-9f64..=1.0) {
        let obs = ObservationMap::from_grid(g.clone());
        let t = ThresholdConfig::new(df, dob);
        let constructed = synthesize(&obs, &threshold(&null_predict(&obs), &t)).unwrap();
        prop_assert_eq!(constructed, g);
    }

    #[test]
    fn synthesis_keeps_observations(g in grid(10), values in prop::collection::vec(0.0f64..=1.0, 100)) {
        let (h, w) = g.dims();
        let p = ProbabilityGrid::from_values(h, w, values[..h * w].to_vec()).unwrap();
        let obs = ObservationMap::from_grid(g.clone());
        let merged = synthesize(&obs, &threshold(&p, &ThresholdConfig::default())).unwrap();
        for c in g.coords() {
            if g.get(c).is_known() {
                prop_assert_eq!(merged.get(c), g.get(c));
            }
        }
    }

    #[test]
    fn f1_is_harmonic_mean((h, w, a, b) in (1usize..8, 1usize..8).prop_flat_map(|(h, w)| {
        let cells = || prop::collection::vec(category(), h * w);
        (Just(h), Just(w), cells(), cells())
    })) {
        let a = OccupancyGrid::from_cells(h, w, a).unwrap();
        let b = OccupancyGrid::from_cells(h, w, b).unwrap();
        let s = f1_score(&a, &b).unwrap();
        if s.precision + s.recall > 0.0 {
            let harmonic = 2.0 * s.precision * s.recall / (s.precision + s.recall);
            prop_assert!((harmonic - s.f1).abs() <= 1e-12);
        }
    }

    #[test]
    fn observations_agree_with_truth(seed in 0u64..500, steps in 1usize..6) {
        let cfg = GeneratorConfig { height: 32, width: 32, ..GeneratorConfig::with_seed(seed) };
        let truth = generate_floorplan(&cfg).unwrap();
        let free: Vec<Coord> = truth.coords().filter(|&c| truth.is_free(c)).collect();
        let rig = SensorRig::default();
        let mut obs = ObservationMap::new(32, 32);
        let mut known = 0;
        for k in 0..steps {
            let pose = free[(seed as usize * 31 + k * 97) % free.len()];
            let readings = sense(&truth, pose, &rig).unwrap();
            for &(c, cat) in &readings {
                prop_assert_eq!(truth.get(c), cat);
                prop_assert!(c.distance(pose) <= rig.range);
            }
            obs.absorb(&readings).unwrap();
            let now = obs.grid().coords().filter(|&c| obs.grid().get(c).is_known()).count();
            prop_assert!(now >= known);
            known = now;
        }
        prop_assert!(obs.consistent_with(&truth));
    }

    #[test]
    fn visibility_has_right_angle_symmetry(g in known_grid(9)) {
        // transposing the map mirrors the beam fan, which is symmetric under 90 degree turns
        let (h, w) = g.dims();
        let t = OccupancyGrid::from_cells(w, h, (0..w * h).map(|i| g.get(Coord::new(i % h, i / h))).collect()).unwrap();
        let rig = SensorRig::default();
        for pose in g.coords().filter(|&c| g.is_free(c)) {
            let mut a: Vec<_> = visible_cells(&g, pose, &rig).into_iter().map(|(c, k)| (Coord::new(c.col, c.row), k)).collect();
            a.sort_by_key(|&(c, _)| c);
            let b = visible_cells(&t, Coord::new(pose.col, pose.row), &rig);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn nearest_matches_argmin(g in grid(8), pick in any::<prop::sample::Index>()) {
        let free: Vec<Coord> = g.coords().filter(|&c| g.is_free(c)).collect();
        prop_assume!(!free.is_empty());
        let pose = free[pick.index(free.len())];
        let oracle = common::bellman_ford(&g, pose);
        let length = |c: Coord| oracle[g.index(c)].map(|(s, d)| s as f64 + d as f64 * std::f64::consts::SQRT_2);
        let argmin = common::frontier_scan(&g)
            .into_iter()
            .filter(|&c| c != pose && length(c).is_some())
            .min_by(|a, b| length(*a).unwrap().total_cmp(&length(*b).unwrap()).then(a.cmp(b)));
        let mut state = PlannerState::new(pose, g.clone(), SensorRig::default(), 0);
        let chosen = plan_nearest_frontier(&mut state).unwrap();
        prop_assert_eq!(chosen.as_ref().map(|p| p.waypoint), argmin);
        if let Some(p) = chosen {
            let mut prev = pose;
            for &c in &p.path {
                prop_assert!(step_allowed(&g, prev, c));
                prev = c;
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn floorplans_are_closed_and_connected(seed in any::<u64>(), h in 16usize..80, w in 16usize..80) {
        let g = generate_floorplan(&GeneratorConfig { height: h, width: w, ..GeneratorConfig::with_seed(seed) }).unwrap();
        prop_assert!(g.boundary_closed());
        prop_assert!(four_connected(&g));
        prop_assert_eq!(g.count(CellCategory::Unknown), 0);
    }
}

#[test]
fn wall_fraction_is_stable_across_seeds() {
    let fractions: Vec<f64> = (0..500)
        .map(|s| {
            generate_floorplan(&GeneratorConfig::with_seed(s))
                .unwrap()
                .fraction_of_walls()
                .unwrap()
        })
        .collect();
    let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
    let var = fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / fractions.len() as f64;
    assert!(var.sqrt() < 0.05, "std {}", var.sqrt());
}

#[test]
fn random_planner_is_uniform() {
    // four reachable frontier cells, 10,000 draws
    let map = OccupancyGrid::parse("#?#?#?#?#\n#.......#\n#########\n").unwrap();
    let mut state = PlannerState::new(Coord::new(1, 4), map, SensorRig::default(), 3);
    let mut counts = std::collections::BTreeMap::new();
    for _ in 0..10_000 {
        let p = plan_random(&mut state).unwrap().unwrap();
        *counts.entry(p.waypoint).or_insert(0usize) += 1;
    }
    assert_eq!(counts.len(), 4, "{counts:?}");
    for (&c, &n) in &counts {
        let share = n as f64 / 10_000.0;
        assert!((share - 0.25).abs() <= 0.02, "{c:?} drew {share}");
    }
}

#[test]
fn every_generated_seed_connects() {
    for s in 0..200 {
        let g = generate_floorplan(&GeneratorConfig::with_seed(s)).unwrap();
        assert!(four_connected(&g), "seed {s}");
    }
}
