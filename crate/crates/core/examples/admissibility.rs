//! Sign-condition classification of general states, cross-checked by sampling kappa.

use curveflow::symcore::rat;
use curveflow::thermostate::{admissible_theorem2, kappa, kappa_at, theorem2_sweep, RatioKind, SweepConfig, Theorem2Params};

fn main() {
    let even = Theorem2Params {
        gamma: [rat(-1, 1), rat(1, 1), rat(1, 1), rat(2, 1)],
        c1: rat(1, 1),
        c2: rat(1, 1),
        s0: rat(0, 1),
        ratio: RatioKind::Rational { m: 1, k: 2 },
    };
    println!("{:?}", admissible_theorem2(&even).unwrap());
    let family = even.family();
    let form = kappa(&family).unwrap();
    println!("{:?}", kappa_at(&family, &form, 1.0, -0.5).unwrap());

    let mut odd = even.clone();
    odd.c2 = rat(-1, 1);
    println!("{:?}", admissible_theorem2(&odd).unwrap());

    let sweep = theorem2_sweep(&SweepConfig { configurations: 200, ..SweepConfig::default() });
    println!(
        "sweep: {} admissible, {} not, {} disagreements",
        sweep.predicted_admissible,
        sweep.predicted_inadmissible,
        sweep.disagreements.len()
    );
}
