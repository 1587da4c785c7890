use ftlocal::catalog::CircuitCatalog;
use ftlocal::flow::{classify, Classification, FlowOptions, RateMap};
use ftlocal::local::*;
use ftlocal::model::{NonlocalMap, ProtocolParams};
use proptest::prelude::*;

fn map(r: u32, tau: u32, epsilon: f64) -> LocalMap {
    LocalMap::from_geometry(&GeometryParams::new(r, tau, epsilon).unwrap()).unwrap()
}

fn rate() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), (-7.0f64..-2.5).prop_map(|e| 10f64.powf(e))]
}

fn local_rates() -> impl Strategy<Value = [f64; 8]> {
    [rate(), rate(), rate(), rate(), rate(), rate(), rate(), rate()]
}

#[test]
fn base_start_below_threshold_converges() {
    let g = GeometryParams::new(20, 2, 1.0).unwrap();
    let start = LocalRates::base(0.72e-4, &g).unwrap();
    let class = classify(&map(20, 2, 1.0), &start.to_array(), &FlowOptions::default()).unwrap();
    assert_eq!(class, Classification::Below);
}

#[test]
fn base_start_well_above_threshold_diverges() {
    let g = GeometryParams::new(20, 2, 1.0).unwrap();
    let start = LocalRates::base(1.5e-4, &g).unwrap();
    let class = classify(&map(20, 2, 1.0), &start.to_array(), &FlowOptions::default()).unwrap();
    assert_eq!(class, Classification::Above);
}

#[test]
fn tau_equal_to_r_moves_one_site_between_corrections() {
    let g = GeometryParams::new(7, 7, 0.5).unwrap();
    assert_eq!(g.d(), 1);
    let t = ReplacementTable::from_geometry(&g);
    use ElementaryKind::*;
    assert_eq!(t.composite(Two), &[(MoveD, 14), (WaitD, 14), (Two, 1)]);
    assert_eq!(t.composite(MoveD), &[(MoveD, 7)]);
    let base = LocalRates::base(1e-5, &g).unwrap();
    assert_eq!(base.gamma_md, 0.5e-5);
    assert!((base.gamma_wd - 1e-6).abs() < 1e-21);
}

#[test]
fn segment_length_rounds_up() {
    assert_eq!(GeometryParams::new(50, 4, 1.0).unwrap().d(), 13);
    assert_eq!(GeometryParams::new(50, 5, 1.0).unwrap().d(), 10);
    assert!(GeometryParams::new(10, 11, 1.0).is_err());
    assert!(GeometryParams::new(10, 0, 1.0).is_err());
}

#[test]
fn origin_is_fixed() {
    assert_eq!(map(50, 4, 1.0).apply(&[0.0; 8]).unwrap(), vec![0.0; 8]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composite_dominates_its_parts(x in local_rates(), r in 1u32..60, tau_frac in 0.0f64..1.0, eps in 0.0f64..=1.0) {
        let tau = 1 + ((r - 1) as f64 * tau_frac) as u32;
        let table = ReplacementTable::from_geometry(&GeometryParams::new(r, tau, eps).unwrap());
        let elem = LocalRates::from_array(x);
        let comp = table.compose(&elem);
        for kind in ElementaryKind::ALL {
            for &(part, m) in table.composite(kind) {
                if m > 0 {
                    prop_assert!(comp.get(kind) >= elem.get(part));
                }
            }
        }
    }

    #[test]
    fn transit_composites_grow_with_distance(x in local_rates(), r in 1u32..60) {
        let elem = LocalRates::from_array(x);
        let near = ReplacementTable::from_geometry(&GeometryParams::new(r, 1, 1.0).unwrap()).compose(&elem);
        let far = ReplacementTable::from_geometry(&GeometryParams::new(r + 1, 1, 1.0).unwrap()).compose(&elem);
        prop_assert!(far.gamma_md >= near.gamma_md);
        prop_assert!(far.gamma_wd >= near.gamma_wd);
        // More corrections in transit mean more elementary pieces per gate.
        let tau2 = ReplacementTable::from_geometry(&GeometryParams::new(r + 1, 2, 1.0).unwrap()).compose(&elem);
        prop_assert!(tau2.gamma_2 >= far.gamma_2);
    }

    #[test]
    fn map_stays_in_unit_cube(x in [0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0]) {
        for v in map(30, 3, 0.3).apply(&x).unwrap() {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn map_is_monotone(x in local_rates(), bump in prop::array::uniform8(0.0f64..1e-4)) {
        let m = map(40, 4, 1.0);
        let y: Vec<f64> = x.iter().zip(bump).map(|(v, b)| v + b).collect();
        let fx = m.apply(&x).unwrap();
        let fy = m.apply(&y).unwrap();
        for (a, b) in fx.iter().zip(&fy) {
            prop_assert!(*b >= *a * (1.0 - 1e-12));
        }
    }

    #[test]
    fn in_situ_step_reduces_to_nonlocal(g1 in rate(), g2 in rate(), gw in rate(), g1m in rate()) {
        let local = LocalMap::new(ProtocolParams::default(), CircuitCatalog::steane(), ReplacementTable::in_situ());
        let x = [g1, g2, gw, gw, 0.0, 0.0, g1m, g1];
        let y = local.apply(&x).unwrap();
        let z = NonlocalMap::default().apply(&[g1, g2, gw, g1m, g1]).unwrap();
        let pairs = [(y[0], z[0]), (y[1], z[1]), (y[2], z[2]), (y[3], z[2]), (y[6], z[3]), (y[7], z[4])];
        for (a, b) in pairs {
            prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
        }
        prop_assert_eq!(y[4], 0.0);
        prop_assert_eq!(y[5], 0.0);
    }
}
