//! Kinematic and Euler invariants, including both readings of the power-case exponents.

use curveflow::eulersys::HCase;
use curveflow::invariants::{independent_count, invariance_report, kinematic_basis, xi_symbols, AlgebraSelector, Reading};

fn main() {
    let generic = HCase::symbolic("generic").unwrap();
    let basis = kinematic_basis(&generic);
    println!("generic kinematic order-1 count: {}", independent_count(&basis.invariants, 1).unwrap());

    for name in ["const", "power"] {
        let case = HCase::symbolic(name).unwrap();
        let xi = AlgebraSelector::Euler(xi_symbols(&case));
        for reading in [Reading::AsPrinted, Reading::Lambda2] {
            let r = invariance_report(&case, &xi, reading).unwrap();
            println!("{name} {reading:?}: {:?}, failing {:?}", r.verdict(), r.failures);
        }
    }
}
