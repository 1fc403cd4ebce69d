//! Lift the unit circle for each height profile and write the log-case table.

use curveflow::liftcurve::{lift, verify, write_csv, Branch, LiftOptions, PlaneCurve};
use curveflow::suite::lift_scenarios;

fn main() {
    for s in lift_scenarios() {
        let c = PlaneCurve::circle_arc(2001, s.tau_max).unwrap();
        let r = lift(&s.case, s.z0, &c, s.branch, &LiftOptions::default()).unwrap();
        let v = verify(&r, &c);
        println!(
            "{:<10} z: {:.4} -> {:.4}  equation residual {:.1e}  height residual {:.1e}",
            s.case.name(),
            r.z[0],
            r.z[r.z.len() - 1],
            v.max_ode_residual,
            v.h_residual
        );
    }
    let log = lift_scenarios().into_iter().last().unwrap();
    let r = lift(&log.case, log.z0, &PlaneCurve::circle(41).unwrap(), Branch::Plus, &LiftOptions::default()).unwrap();
    let mut out = std::io::stdout().lock();
    write_csv(&r, &mut out).unwrap();
}
