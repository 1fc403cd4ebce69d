//! Parse, differentiate and zero-test expressions.

use curveflow::symcore::{differentiate, normalize, parse, zero_test, Symbol, ZeroConfig};

fn main() {
    let e = parse("rho^(xi5/xi4 - 1)*rho_a + sin(a)^2").unwrap();
    let d = differentiate(&e, &Symbol::new("rho"));
    println!("e          = {e}");
    println!("de/drho    = {}", normalize(&d));

    for text in ["sin(a)^2 + cos(a)^2 - 1", "(u + 1)^2 - u^2 - 2*u", "exp(a)*exp(-a) - 2"] {
        let r = zero_test(&parse(text).unwrap(), &ZeroConfig::default());
        println!("{text:<28} -> {:?} via {:?}", r.verdict, r.method);
    }
}
