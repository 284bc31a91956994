mod common;

use common::{betti, cloud, params, rank_lowstar};
use lowstar_core::{
    build_vietoris_rips, compute_beta, extract_pairs, reduce, reduce_standard, reduce_twist, Algo, BoundaryMatrix,
    Execution, PmsOptions, SchedulePolicy, TraceCounters, TraceSink,
};
use proptest::prelude::*;

fn all_pms_options() -> Vec<PmsOptions> {
    let mut out = Vec::new();
    for schedule_policy in SchedulePolicy::ALL {
        for processor_cap in [Some(1), Some(2), None] {
            for enable_compression_clearing in [false, true] {
                out.push(PmsOptions {
                    schedule_policy,
                    processor_cap,
                    enable_compression_clearing,
                    ..PmsOptions::default()
                });
            }
        }
    }
    out
}

fn matrix_of(c: &lowstar_core::PointCloud, (r, div, dim): (f64, usize, usize)) -> (lowstar_core::Filtration, BoundaryMatrix) {
    let f = build_vietoris_rips(c, r, div, dim).unwrap();
    let m = f.boundary_matrix();
    (f, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn standard_matches_rank_oracle(c in cloud(7), p in params()) {
        let (_, m) = matrix_of(&c, p);
        let r = reduce_standard(&mut m.clone(), &mut TraceSink::disabled(Algo::Standard));
        prop_assert!(r.low.is_reduced());
        prop_assert_eq!(r.low, rank_lowstar(&m));
    }

    #[test]
    fn every_reducer_agrees(c in cloud(7), p in params()) {
        let (f, m) = matrix_of(&c, p);
        let std = reduce_standard(&mut m.clone(), &mut TraceSink::disabled(Algo::Standard));
        let twist = reduce_twist(&mut m.clone(), &mut TraceSink::disabled(Algo::Twist));
        prop_assert_eq!(&twist.low, &std.low);
        prop_assert!(twist.total_col_adds <= std.total_col_adds);
        let barcode = extract_pairs(&f, &std.low).unwrap().sorted();
        for opts in all_pms_options() {
            let mut reduced = m.clone();
            let r = reduce(Algo::Pms, &mut reduced, &opts, &mut TraceSink::disabled(Algo::Pms)).unwrap();
            prop_assert!(r.converged);
            prop_assert_eq!(&r.low, &std.low, "{:?}", opts);
            prop_assert_eq!(reduced.lows(), r.low.clone());
            prop_assert_eq!(extract_pairs(&f, &r.low).unwrap().sorted(), barcode.clone());
        }
    }

    #[test]
    fn essential_intervals_count_betti_numbers(c in cloud(7), p in params()) {
        let (f, m) = matrix_of(&c, p);
        let r = reduce_standard(&mut m.clone(), &mut TraceSink::disabled(Algo::Standard));
        let barcode = extract_pairs(&f, &r.low).unwrap();
        let mut per_dim = vec![0usize; m.max_dim() + 1];
        for i in barcode.essential() {
            per_dim[i.dim] += 1;
        }
        prop_assert_eq!(per_dim, betti(&m));
        for i in barcode.finite() {
            prop_assert!(i.birth <= i.death);
        }
    }

    #[test]
    fn beta_bounds_and_invariance(c in cloud(7), p in params(), picks in prop::collection::vec((0usize..1000, 0usize..1000), 0..40)) {
        let (_, m) = matrix_of(&c, p);
        let beta = compute_beta(&m);
        let star = reduce_standard(&mut m.clone(), &mut TraceSink::disabled(Algo::Standard)).low;
        let initial = m.lows();
        for j in 1..=m.size() {
            prop_assert!(beta.get(j) <= star.get(j));
            prop_assert!(star.get(j) <= initial.get(j));
            if beta.get(j) > 0 {
                prop_assert!(star.get(j) > 0);
            }
        }
        // random left-to-right additions within a dimension keep beta fixed
        let blocks = m.columns_by_dim();
        let mut work = m.clone();
        let mut counters = TraceCounters::default();
        for (a, b) in picks {
            let Some(block) = blocks.iter().filter(|b| b.len() >= 2).nth(a % blocks.len().max(1)) else { continue };
            let x = block[a % block.len()];
            let y = block[b % block.len()];
            if x == y {
                continue;
            }
            let (src, dst) = (x.min(y), x.max(y));
            work.add_columns(src, dst, &mut counters).unwrap();
        }
        prop_assert_eq!(compute_beta(&work), beta);
    }

    #[test]
    fn filtration_is_compatible_and_complete(c in cloud(6), p in params()) {
        let (r_max, div, max_dim) = p;
        let (f, _) = matrix_of(&c, p);
        let n = c.len();
        let diam = |vs: &[usize]| {
            let mut d = 0f64;
            for (k, &a) in vs.iter().enumerate() {
                for &b in &vs[k + 1..] {
                    d = d.max(c.distance(a, b));
                }
            }
            d
        };
        let mut expected = 0;
        for mask in 1u32..(1 << n) {
            let vs: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if vs.len() > max_dim + 1 {
                continue;
            }
            let d = diam(&vs);
            let entry = if vs.len() == 1 {
                Some(0.0)
            } else {
                (1..=div).map(|i| i as f64 * r_max / div as f64).find(|&r| d <= 2.0 * r)
            };
            let found = f.simplices().iter().find(|s| s.vertices == vs);
            match entry {
                Some(scale) => {
                    expected += 1;
                    prop_assert_eq!(found.map(|s| s.scale), Some(scale), "{:?}", vs);
                }
                None => prop_assert!(found.is_none()),
            }
        }
        prop_assert_eq!(f.len(), expected);
        for w in f.simplices().windows(2) {
            prop_assert!(w[0].scale <= w[1].scale);
        }
    }

    #[test]
    fn parallel_execution_matches_simulation(c in cloud(7), p in params()) {
        let (_, m) = matrix_of(&c, p);
        let sim = PmsOptions::default();
        let par = PmsOptions { execution: Execution::Parallel { workers: 3 }, ..sim };
        let a = reduce(Algo::Pms, &mut m.clone(), &sim, &mut TraceSink::new(Algo::Pms, None)).unwrap();
        let b = reduce(Algo::Pms, &mut m.clone(), &par, &mut TraceSink::new(Algo::Pms, None)).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn twist_never_adds_into_positive_columns() {
    // a filled tetrahedron boundary plus a few extra points
    let pts = vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![1.0, 1.0],
        vec![2.0, 0.5],
        vec![0.5, 2.0],
    ];
    let cloud = lowstar_core::PointCloud::new(pts).unwrap();
    let f = build_vietoris_rips(&cloud, 1.0, 4, 3).unwrap();
    let m = f.boundary_matrix();
    let star = reduce_standard(&mut m.clone(), &mut TraceSink::disabled(Algo::Standard)).low;
    let r = reduce_twist(&mut m.clone(), &mut TraceSink::disabled(Algo::Twist));
    let top = m.max_dim();
    for j in 1..=m.size() {
        let positive_paired = star.as_slice().contains(&j);
        if positive_paired && m.dim(j) < top {
            assert_eq!(r.column_adds[j - 1], 0, "column {j}");
            assert!(m.column(j).is_empty() || r.cleared.contains(&j));
        }
    }
}
