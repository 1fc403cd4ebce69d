//! Symmetric thermodynamic states: Legendrian check, internal energy and kappa.

use curveflow::symcore::is_zero;
use curveflow::thermostate::{internal_energy, kappa, FamilyKind, StateFamily};

fn main() {
    for kind in [FamilyKind::General, FamilyKind::Case3, FamilyKind::Case4, FamilyKind::Case6] {
        let f = StateFamily::symbolic(kind);
        println!("{}", kind.name());
        println!("  p   = {}", f.p_of_rho);
        println!("  T   = {}", f.t_of_s);
        println!("  Z   = {}", f.symmetry);
        println!("  [F, G] on L: {:?}", is_zero(&f.legendrian_residual().unwrap()));
        println!("  eps = {}", internal_energy(&f).unwrap());
        let k = kappa(&f).unwrap();
        println!("  kappa cross term: {}", k.q_rs);
    }
}
