//! Check every listed generator of every height profile against its system.

use curveflow::eulersys::{HCase, SystemParams};
use curveflow::suite::symmetry_table;
use curveflow::symcore::ZeroConfig;

fn main() {
    for case in HCase::all_symbolic() {
        let t = symmetry_table(&case, &SystemParams::default(), &ZeroConfig::default()).unwrap();
        let labels: Vec<&str> = t.generators.iter().map(|g| g.label.as_str()).collect();
        println!("{:<10} {:?}  {}", case.name(), t.status, labels.join(" "));
    }
    let quad = HCase::symbolic("quadratic").unwrap();
    for g in symmetry_table(&quad, &SystemParams::default(), &ZeroConfig::default()).unwrap().generators.iter().skip(5) {
        println!("  {} = {}", g.label, g.field);
    }
}
