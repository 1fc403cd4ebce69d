//! Bracket tables, derived series and the thermodynamic projection.

use curveflow::eulersys::HCase;
use curveflow::liealg::{structure_report, Sampler};

fn main() {
    let sampler = Sampler::default();
    for case in HCase::all_symbolic() {
        let r = structure_report(&case, &sampler).unwrap();
        let series: Vec<&str> = r.derived_series.iter().map(|t| t.label.as_str()).collect();
        println!("{:<10} series {}  solvable={}", case.name(), series.join(" > "), r.solvable);
        let ys: Vec<String> = r.thermo_part.iter().map(|y| y.to_string()).collect();
        println!("           thermodynamic part [{}]", ys.join(", "));
        println!("           kernel {:?}", r.kernel);
    }
}
