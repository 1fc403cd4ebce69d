//! Prolong the Galilean boost and apply it to jet functions.

use curveflow::jetspace::{apply_field, prolong, total_derivative};
use curveflow::liealg::parse_field;
use curveflow::symcore::{normalize, parse, BaseVar, Field, JetVar};

fn main() {
    let boost = parse_field("t*d_a + d_u").unwrap();
    let pr = prolong(&boost, 2);
    for j in [JetVar::new(Field::U, 1, 0), JetVar::new(Field::Rho, 1, 0), JetVar::new(Field::S, 1, 1)] {
        println!("coefficient of d/d{} : {}", j.name(), pr.coefficient(j).unwrap());
    }

    let j = parse("s_t + u*s_a").unwrap();
    println!("D_t({j}) = {}", total_derivative(&j, BaseVar::T));
    println!("X({j}) = {}", normalize(&apply_field(&boost, &j)));
}
