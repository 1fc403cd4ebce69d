//! Run every acceptance criterion and print one line each.

use curveflow::suite::{run_suite, SuiteConfig};

fn main() {
    let r = run_suite(&SuiteConfig::default());
    for c in &r.criteria {
        println!("{}", c.summary_line());
    }
    println!("overall: {:?}", r.status);
}
