//! A reduced check suite printed as JSON lines.

use upsilon::verify::{all_passed, run_suite, SuiteConfig};

fn main() {
    let config = SuiteConfig {
        dims: vec![2],
        t_points: 3,
        trials: 10,
        multiplicativity: Vec::new(),
        ..SuiteConfig::default()
    };
    let results = run_suite(&config);
    for r in &results {
        println!("{}", r.to_json());
    }
    eprintln!("{} checks, all passed: {}", results.len(), all_passed(&results));
}
