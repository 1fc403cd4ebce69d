pub mod symcore;
pub mod jetspace;
pub mod eulersys;
pub mod liealg;
pub mod thermostate;
pub mod invariants;
pub mod liftcurve;
pub mod suite;
pub mod cli;
