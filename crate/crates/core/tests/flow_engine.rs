use ftlocal::flow::*;
use ftlocal::catalog::CircuitCatalog;
use ftlocal::local::GeometryParams;
use ftlocal::model::{NonlocalMap, ProtocolParams};
use ftlocal::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nl() -> NonlocalMap {
    NonlocalMap::default()
}

fn ray() -> Ray {
    Ray::nonlocal_standard(0.1).unwrap()
}

fn threshold() -> ThresholdEstimate {
    bisect_threshold(&nl(), &ray(), 1e-5, 1e-2, &BisectOptions::default()).unwrap()
}

#[test]
fn starts_on_either_side_of_threshold() {
    let o = FlowOptions::default();
    let below = iterate_flow(&nl(), &ray().point(3e-4), &o).unwrap();
    assert_eq!(below.classification, Classification::Below);
    assert!(below.last().iter().all(|&v| v < 1e-12));
    let above = iterate_flow(&nl(), &ray().point(4e-4), &o).unwrap();
    assert_eq!(above.classification, Classification::Above);
    assert_eq!(above.iterations_used, above.trajectory.len());
}

#[test]
fn bracket_is_consistent_with_classification() {
    let opts = BisectOptions::default();
    let t = threshold();
    assert!(t.lo < t.scale && t.scale < t.hi);
    assert!(t.hi - t.lo <= opts.rel_tol * t.hi);
    assert_eq!(t.undecided, 0);
    let f = FlowOptions::default();
    let lower = t.scale * (1.0 - 2.0 * opts.rel_tol);
    let upper = t.scale * (1.0 + 2.0 * opts.rel_tol);
    assert_eq!(classify(&nl(), &ray().point(lower), &f).unwrap(), Classification::Below);
    assert_eq!(classify(&nl(), &ray().point(upper), &f).unwrap(), Classification::Above);
}

#[test]
fn trajectories_near_threshold_keep_the_unstable_ratio() {
    let t = threshold().scale;
    for factor in [0.9, 0.95, 1.05, 1.1] {
        let flow = iterate_flow(&nl(), &ray().point(factor * t), &FlowOptions::default()).unwrap();
        let mut checked = 0;
        for x in flow.trajectory.iter().skip(1) {
            let m = x.iter().copied().fold(0.0, f64::max);
            if !(1e-12..=1e-2).contains(&m) {
                continue;
            }
            let ratio = x[1] / x[0];
            assert!((ratio - 2.0).abs() <= 0.3, "factor {factor}: ratio {ratio} at {x:?}");
            checked += 1;
        }
        assert!(checked >= 2, "factor {factor}: only {checked} levels checked");
    }
}

#[test]
fn one_level_decrease_does_not_decide_the_flow() {
    // Just above threshold both gate rates drop at the first level, but the
    // wait rate rises and the flow still diverges.
    let t = threshold().scale;
    let x0 = ray().point(1.05 * t);
    let x1 = nl().apply(&x0).unwrap();
    assert!(x1[0] < x0[0] && x1[1] < x0[1]);
    assert!(x1[2] > x0[2]);
    assert_eq!(classify(&nl(), &x0, &FlowOptions::default()).unwrap(), Classification::Above);
}

#[test]
fn pointwise_decrease_implies_nonincreasing_flow() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let map = nl();
    let mut hits = 0;
    for _ in 0..600 {
        let x: Vec<f64> = (0..5).map(|_| 10f64.powf(rng.gen_range(-6.0..-3.0))).collect();
        let y = map.apply(&x).unwrap();
        if y.iter().zip(&x).any(|(b, a)| b > a) {
            continue;
        }
        hits += 1;
        let flow = iterate_flow(&map, &x, &FlowOptions::default()).unwrap();
        assert_eq!(flow.classification, Classification::Below);
        for w in flow.trajectory.windows(2) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                assert!(b <= a, "{:?} -> {:?}", w[0], w[1]);
            }
        }
    }
    assert!(hits >= 20, "{hits}");
}

#[test]
fn fixed_point_has_one_unstable_direction() {
    let guess = [0.69e-4, 1.50e-4, 0.69e-4, 0.69e-4, 0.69e-4];
    let fp = find_fixed_point(&nl(), &guess, &FixedPointOptions::default()).unwrap();
    assert!(fp.residual < 1e-12);
    assert_eq!(fp.unstable_count, 1);
    assert!(fp.eigenvalue_magnitudes[0] > 1.0);
    let ratio = fp.location[1] / fp.location[0];
    assert!((ratio - 2.0).abs() < 0.3, "{ratio}");
    // The fixed point separates the two basins along its own direction.
    let below: Vec<f64> = fp.location.iter().map(|v| 0.98 * v).collect();
    let above: Vec<f64> = fp.location.iter().map(|v| 1.02 * v).collect();
    assert_eq!(classify(&nl(), &below, &FlowOptions::default()).unwrap(), Classification::Below);
    assert_eq!(classify(&nl(), &above, &FlowOptions::default()).unwrap(), Classification::Above);
}

#[test]
fn jacobian_agrees_with_central_differences() {
    let map = nl();
    let x = [7e-5, 1.5e-4, 7e-5, 7e-5, 7e-5];
    let jac = jacobian(&map, &x, &FixedPointOptions::default()).unwrap();
    for j in 0..5 {
        let h = 1e-3 * x[j];
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let fp = map.apply(&xp).unwrap();
        let fm = map.apply(&xm).unwrap();
        for i in 0..5 {
            let central = (fp[i] - fm[i]) / (2.0 * h);
            let scale = central.abs().max(1e-3);
            assert!((jac[i][j] - central).abs() <= 2e-3 * scale, "J[{i}][{j}] = {} vs {central}", jac[i][j]);
        }
    }
}

#[test]
fn gate_pseudothreshold_exceeds_threshold() {
    let t = threshold().scale;
    let p2 = pseudothreshold(&nl(), &ray(), 1, 1e-5, 1e-2, 1e-4).unwrap();
    assert!(p2 > 3e-4 && p2 < 1e-3, "{p2}");
    let p1 = pseudothreshold(&nl(), &ray(), 0, 1e-5, 1e-2, 1e-4).unwrap();
    assert!(p1 > t, "{p1} vs {t}");
}

#[test]
fn wait_pseudothreshold_leaves_the_bracket_on_the_axis() {
    let on_ray = pseudothreshold(&nl(), &ray(), 2, 1e-7, 0.4, 1e-3).unwrap();
    assert!(on_ray < threshold().scale, "{on_ray}");
    // With gamma_w = 0 at level zero any positive rate elsewhere makes it grow.
    let axis = Ray::nonlocal_standard(0.0).unwrap();
    let err = pseudothreshold(&nl(), &axis, 2, 1e-7, 0.4, 1e-3).unwrap_err();
    assert!(matches!(err, Error::Domain(_)), "{err}");
    assert!(pseudothreshold(&nl(), &axis, 0, 1e-5, 1e-2, 1e-3).is_ok());
    assert!(pseudothreshold(&nl(), &axis, 1, 1e-5, 1e-2, 1e-3).is_ok());
}

#[test]
fn degenerate_rays_rejected() {
    assert!(Ray::through_origin(vec![0.0; 5]).is_err());
    assert!(Ray::new(vec![0.0; 4], vec![1.0; 5]).is_err());
    assert!(Ray::through_origin(vec![1.0, -1.0, 1.0, 1.0, 1.0]).is_err());
    let short = Ray::through_origin(vec![1.0; 4]).unwrap();
    assert!(bisect_threshold(&nl(), &short, 1e-5, 1e-2, &BisectOptions::default()).is_err());
}

#[test]
fn tau_scan_respects_range_and_picks_the_maximum() {
    let params = ProtocolParams::default();
    let catalog = CircuitCatalog::steane();
    let opts = BisectOptions { rel_tol: 1e-2, ..BisectOptions::default() };
    let g = GeometryParams::new(3, 1, 1.0).unwrap();

    let single = optimize_tau(&g, &params, &catalog, 3..=3, (1e-7, 1e-3), &opts).unwrap();
    assert_eq!(single.tau, 3);
    assert_eq!(single.curve.len(), 1);

    let scan = optimize_tau(&g, &params, &catalog, 1..=10, (1e-7, 1e-3), &opts).unwrap();
    assert_eq!(scan.curve.iter().map(|c| c.0).collect::<Vec<_>>(), vec![1, 2, 3]);
    assert!(scan.curve.iter().all(|(_, t)| t.scale <= scan.threshold.scale));
    assert_eq!(scan.curve.iter().find(|c| c.0 == scan.tau).unwrap().1, scan.threshold);

    assert!(optimize_tau(&g, &params, &catalog, 4..=10, (1e-7, 1e-3), &opts).is_err());
}
