//! Symbolic expression kernel.

pub mod diff;
pub mod eval;
pub mod expr;
pub mod normalize;
pub mod parse;
pub mod poly;
pub mod symbol;
pub mod zero;

pub use diff::differentiate;
pub use eval::{eval_exact, eval_f64, eval_scaled, Env, EvalError};
pub use expr::{rat, Expr, Func, Rational};
pub use normalize::{expand, normalize};
pub use parse::{parse, parse_rational, parse_with, ParseError};
pub use symbol::{BaseVar, Field, JetVar, Symbol, SymbolKind, SymbolTable};
pub use zero::{is_zero, zero_test, Method, Verdict, ZeroConfig, ZeroReport};
