use std::path::Path;

use hfvrp::io::load_solomon;
use hfvrp::model::{schedule_route, Route};

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/solomon").join(name)
}

#[test]
fn bundled_files_parse() {
    for (file, n, vehicles, capacity) in [
        ("c101.txt", 100, 25, 200.0),
        ("c201.txt", 100, 25, 700.0),
        ("r101.txt", 100, 25, 200.0),
        ("rc101.txt", 100, 25, 200.0),
        ("c1_2_1.txt", 200, 50, 200.0),
    ] {
        let inst = load_solomon(data(file)).unwrap();
        assert_eq!(inst.customers.len(), n, "{file}");
        assert_eq!(inst.fleet.len(), vehicles, "{file}");
        assert!(inst.fleet.iter().all(|v| v.max_weight == capacity && v.variable_cost == 1.0), "{file}");
        assert!(inst.customers.iter().all(|c| c.window_start <= c.window_end), "{file}");
    }
}

#[test]
fn c101_first_customer() {
    let inst = load_solomon(data("c101.txt")).unwrap();
    let c = &inst.customers[0];
    assert_eq!((c.x, c.y, c.demand_weight), (45.0, 68.0, 10.0));
    assert_eq!(c.service_time, 90.0);
    assert_eq!((inst.depot.x, inst.depot.y, inst.depot.open, inst.depot.close), (40.0, 50.0, 0.0, 1236.0));
    // out-and-back distance to the first customer: 2·√(5² + 18²)
    let s = schedule_route(&Route::new(vec![0], None), &inst).unwrap();
    assert!((s.total_distance - 2.0 * (25.0f64 + 324.0).sqrt()).abs() < 1e-12);
}
