//! Brackets, derived series, solvability and the thermodynamic projection `theta`.
//!
//! Spans are decided numerically: every coefficient is evaluated at a fixed set
//! of seeded sample points (parameters included), and ranks come from Gaussian
//! elimination on the stacked values. Generator coefficients are analytic, so a
//! linear relation that holds at generic points holds identically.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::eulersys::{generators, Generator, HCase};
pub use crate::jetspace::bracket;
use crate::jetspace::PointField;
use crate::symcore::{eval_f64, is_zero, normalize, rat, Expr, Field, Rational, Symbol, Verdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("[{0}, {1}] leaves the span of the algebra")]
    NotClosed(String, String),
    #[error("coefficient of d_{0} in {1} depends on t, a or u")]
    NotProjectable(&'static str, String),
    #[error("cannot evaluate {0} at a sample point")]
    Evaluation(String),
}

/// A finite list of point fields, with a display label such as `g^1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraBasis {
    pub label: String,
    pub generators: Vec<Generator>,
}

impl AlgebraBasis {
    pub fn new(label: impl Into<String>, generators: Vec<Generator>) -> Self {
        AlgebraBasis { label: label.into(), generators }
    }

    /// `g^i`: the point symmetry algebra of a case, with symbolic gravity `g`.
    pub fn of_case(case: &HCase) -> Self {
        AlgebraBasis::new(format!("g^{}", case.index()), generators(case, &Expr::sym("g")))
    }

    pub fn fields(&self) -> Vec<PointField> {
        self.generators.iter().map(|g| g.field.clone()).collect()
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }
}

// ---------------------------------------------------------------------------
// numeric spans

const SAMPLE_POINTS: usize = 6;
const RANK_TOL: f64 = 1e-8;

/// Seeded numeric bindings for every symbol a field may mention.
#[derive(Debug, Clone)]
pub struct Sampler {
    points: Vec<HashMap<Symbol, f64>>,
    params: HashMap<Symbol, f64>,
    rng_seed: u64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..SAMPLE_POINTS)
            .map(|_| PointField::COORDINATES.iter().map(|c| (Symbol::new(c), rng.gen_range(0.5..2.5))).collect())
            .collect();
        Sampler { points, params: HashMap::new(), rng_seed: seed }
    }

    pub fn seed(&self) -> u64 {
        self.rng_seed
    }

    /// Pins a parameter to a value instead of the seeded default.
    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(Symbol::new(name), value);
        self
    }

    /// Parameters get one positive value shared by all points, derived from the name.
    fn param(&self, s: &Symbol) -> f64 {
        if let Some(v) = self.params.get(s) {
            return *v;
        }
        let mut h: u64 = self.rng_seed ^ 0x9e37_79b9_7f4a_7c15;
        for b in s.name().bytes() {
            h = (h ^ b as u64).wrapping_mul(0x100_0000_01b3);
        }
        ChaCha8Rng::seed_from_u64(h).gen_range(0.6..2.4)
    }

    pub fn eval(&self, e: &Expr) -> Result<Vec<f64>, AlgebraError> {
        self.points
            .iter()
            .map(|pt| {
                let env = |s: &Symbol| pt.get(s).copied().or_else(|| Some(self.param(s)));
                eval_f64(e, &env).map_err(|_| AlgebraError::Evaluation(e.to_string()))
            })
            .collect()
    }

    /// All coefficients of `exprs` stacked into one column.
    pub fn column<'a, I: IntoIterator<Item = &'a Expr>>(&self, exprs: I) -> Result<Vec<f64>, AlgebraError> {
        let mut out = Vec::new();
        for e in exprs {
            out.extend(self.eval(e)?);
        }
        Ok(out)
    }

    pub fn field_column(&self, x: &PointField) -> Result<Vec<f64>, AlgebraError> {
        self.column(x.coefficients())
    }
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler::new(0x5eed1e)
    }
}

/// Row-reduces the matrix whose columns are `cols`; returns pivot columns and the reduced rows.
fn row_reduce(cols: &[Vec<f64>]) -> (Vec<usize>, Vec<Vec<f64>>) {
    let n = cols.len();
    let m = cols.first().map(|c| c.len()).unwrap_or(0);
    // columns scaled to unit max-norm so the tolerance is relative
    let mut a: Vec<Vec<f64>> = (0..m).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
    let norms: Vec<f64> = (0..n).map(|j| (0..m).map(|i| a[i][j].abs()).fold(0.0, f64::max)).collect();
    let global = norms.iter().copied().fold(0.0, f64::max);
    for (j, &s) in norms.iter().enumerate() {
        // cancellation noise in an identically zero column stays zero
        if s <= RANK_TOL * global {
            for row in a.iter_mut() {
                row[j] = 0.0;
            }
        } else {
            for row in a.iter_mut() {
                row[j] /= s;
            }
        }
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..n {
        if r == m {
            break;
        }
        let (best, val) = (r..m).map(|i| (i, a[i][j].abs())).fold((r, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val < RANK_TOL {
            continue;
        }
        a.swap(r, best);
        let p = a[r][j];
        for v in a[r].iter_mut() {
            *v /= p;
        }
        for i in 0..m {
            if i != r && a[i][j] != 0.0 {
                let (f, pivot) = (a[i][j], a[r].clone());
                for (x, p) in a[i].iter_mut().zip(&pivot) {
                    *x -= f * p;
                }
            }
        }
        pivots.push(j);
        r += 1;
    }
    a.truncate(r);
    (pivots, a)
}

pub fn numeric_rank(cols: &[Vec<f64>]) -> usize {
    row_reduce(cols).0.len()
}

/// Basis of the null space, one vector of length `cols.len()` per free column.
///
/// Entries refer to the unscaled columns.
pub fn null_space(cols: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = cols.len();
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().fold(0.0, |m: f64, v| m.max(v.abs()))).collect();
    let global = norms.iter().copied().fold(0.0, f64::max);
    let scale: Vec<f64> = norms.iter().map(|&s| if s <= RANK_TOL * global { 0.0 } else { s }).collect();
    let (pivots, rows) = row_reduce(cols);
    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0.0; n];
            v[f] = 1.0;
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rows[r][f];
            }
            // undo column scaling: x_j = y_j / s_j
            for j in 0..n {
                if scale[j] > 0.0 {
                    v[j] /= scale[j];
                }
            }
            let m = v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
            v.iter().map(|x| x / m).collect()
        })
        .collect()
}

/// Indices of a maximal independent subset, scanning left to right.
pub fn independent_subset(cols: &[Vec<f64>]) -> Vec<usize> {
    row_reduce(cols).0
}

/// Nearest rational with denominator at most `max_den`, if within `tol`.
pub fn snap_rational(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
    (1..=max_den).find_map(|d| {
        let n = (x * d as f64).round();
        ((x - n / d as f64).abs() < tol).then(|| rat(n as i64, d))
    })
}

/// Rank of a set of fields over the constants.
pub fn rank(fields: &[PointField], sampler: &Sampler) -> Result<usize, AlgebraError> {
    let cols = fields.iter().map(|f| sampler.field_column(f)).collect::<Result<Vec<_>, _>>()?;
    Ok(numeric_rank(&cols))
}

pub fn in_span(x: &PointField, span: &[PointField], sampler: &Sampler) -> Result<bool, AlgebraError> {
    let mut all = span.to_vec();
    let r = rank(&all, sampler)?;
    all.push(x.clone());
    Ok(rank(&all, sampler)? == r)
}

pub fn same_span(a: &[PointField], b: &[PointField], sampler: &Sampler) -> Result<bool, AlgebraError> {
    let ra = rank(a, sampler)?;
    let rb = rank(b, sampler)?;
    let mut both = a.to_vec();
    both.extend_from_slice(b);
    Ok(ra == rb && rank(&both, sampler)? == ra)
}

// ---------------------------------------------------------------------------
// derived series

/// Checks that every pairwise bracket stays in the span.
pub fn check_closed(alg: &AlgebraBasis, sampler: &Sampler) -> Result<(), AlgebraError> {
    let fields = alg.fields();
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            if !in_span(&bracket(&fields[i], &fields[j]), &fields, sampler)? {
                let l = &alg.generators;
                return Err(AlgebraError::NotClosed(l[i].label.clone(), l[j].label.clone()));
            }
        }
    }
    Ok(())
}

fn derived(alg: &AlgebraBasis, sampler: &Sampler) -> Result<Vec<Generator>, AlgebraError> {
    let g = &alg.generators;
    let mut candidates = Vec::new();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            let b = bracket(&g[i].field, &g[j].field);
            if !b.is_zero_literal() {
                candidates.push(Generator { label: format!("[{},{}]", g[i].label, g[j].label), field: b });
            }
        }
    }
    let cols = candidates.iter().map(|c| sampler.field_column(&c.field)).collect::<Result<Vec<_>, _>>()?;
    Ok(independent_subset(&cols).into_iter().map(|k| candidates[k].clone()).collect())
}

/// The labels of `reference` generators spanning `term`, when they do.
pub fn span_label(term: &[PointField], reference: &[Generator], sampler: &Sampler) -> Result<Option<Vec<String>>, AlgebraError> {
    if term.is_empty() {
        return Ok(Some(vec![]));
    }
    let mut inside = Vec::new();
    for g in reference {
        if in_span(&g.field, term, sampler)? {
            inside.push(g.clone());
        }
    }
    let fields: Vec<PointField> = inside.iter().map(|g| g.field.clone()).collect();
    if same_span(&fields, term, sampler)? {
        Ok(Some(inside.into_iter().map(|g| g.label).collect()))
    } else {
        Ok(None)
    }
}

/// `[A, A', A'', ...]`, ending with the zero algebra or with the first repeated term.
pub fn derived_series(alg: &AlgebraBasis, sampler: &Sampler) -> Result<Vec<AlgebraBasis>, AlgebraError> {
    check_closed(alg, sampler)?;
    let mut out = vec![alg.clone()];
    loop {
        let last = out.last().unwrap();
        if last.dim() == 0 {
            return Ok(out);
        }
        let next = derived(last, sampler)?;
        if next.len() == last.dim() {
            return Ok(out);
        }
        let fields: Vec<PointField> = next.iter().map(|g| g.field.clone()).collect();
        let label = match span_label(&fields, &alg.generators, sampler)? {
            Some(l) if l.is_empty() => "0".to_string(),
            Some(l) => format!("<{}>", l.join(",")),
            None => format!("{}^({})", alg.label, out.len()),
        };
        out.push(AlgebraBasis::new(label, next));
    }
}

pub fn is_solvable(alg: &AlgebraBasis, sampler: &Sampler) -> Result<bool, AlgebraError> {
    Ok(derived_series(alg, sampler)?.last().map(|a| a.dim() == 0).unwrap_or(true))
}

// ---------------------------------------------------------------------------
// thermodynamic projection

/// `c_p d_p + c_rho d_rho + c_s d_s + c_T d_T` over (p, rho, s, T).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThermoField {
    /// Ordered p, rho, s, T.
    pub coeffs: [Expr; 4],
}

impl ThermoField {
    pub const COORDINATES: [&'static str; 4] = ["p", "rho", "s", "T"];
    const FIELDS: [Field; 4] = [Field::P, Field::Rho, Field::S, Field::T];

    pub fn parse(parts: &[(&str, &str)]) -> ThermoField {
        theta(&PointField::parse(parts).expect("static thermodynamic field")).expect("thermodynamic by construction")
    }

    pub fn to_point_field(&self) -> PointField {
        let mut out = PointField::zero();
        for (f, c) in Self::FIELDS.iter().zip(&self.coeffs) {
            out.phi[f.index()] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| is_zero(c) == Verdict::Zero)
    }
}

impl fmt::Display for ThermoField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_point_field().fmt(f)
    }
}

impl Serialize for ThermoField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_point_field().serialize(s)
    }
}

/// Projection onto the thermodynamic coordinates; the `d_u` part is dropped.
pub fn theta(x: &PointField) -> Result<ThermoField, AlgebraError> {
    let banned: BTreeSet<Symbol> = ["t", "a", "u"].iter().map(|s| Symbol::new(s)).collect();
    for (name, f) in ThermoField::COORDINATES.iter().zip(ThermoField::FIELDS) {
        let c = x.fiber(f);
        if c.symbols().iter().any(|s| banned.contains(s) || s.as_jet().map(|j| j.order() > 0).unwrap_or(false)) {
            return Err(AlgebraError::NotProjectable(name, x.to_string()));
        }
    }
    Ok(ThermoField { coeffs: ThermoField::FIELDS.map(|f| normalize(x.fiber(f))) })
}

/// The listed basis `Y_1, Y_2, ...` of the pure thermodynamic algebra of a case.
pub fn thermo_part(case: &HCase) -> Vec<ThermoField> {
    let mut spec: Vec<Vec<(&str, &str)>> = vec![vec![("p", "1")], vec![("s", "1")], vec![("T", "T")]];
    let extra: Vec<Vec<(&str, &str)>> = match case {
        HCase::Generic(_) => vec![vec![("p", "p"), ("rho", "rho"), ("s", "-s")]],
        HCase::Const | HCase::Linear(_) => vec![vec![("p", "p")], vec![("rho", "rho")], vec![("s", "s")]],
        HCase::Quadratic(_) => vec![vec![("rho", "rho")], vec![("p", "p"), ("s", "-s")]],
        HCase::Power(..) => vec![
            vec![("rho", "2*lambda2*rho"), ("s", "-(lambda2 - 2)*s")],
            vec![("p", "p"), ("rho", "rho"), ("s", "-s")],
        ],
        HCase::Exp(..) => vec![vec![("p", "p"), ("rho", "-rho")], vec![("rho", "2*rho"), ("s", "-s")]],
        HCase::Log => vec![vec![("s", "s")], vec![("p", "p"), ("rho", "rho")]],
    };
    spec.extend(extra);
    let mut out: Vec<ThermoField> = spec.iter().map(|parts| ThermoField::parse(parts)).collect();
    if let HCase::Power(_, l2) = case {
        // the table is written for a symbolic exponent; bind it when numeric
        let sym = Symbol::new("lambda2");
        for y in out.iter_mut() {
            y.coeffs = y.coeffs.clone().map(|c| normalize(&c.subs1(&sym, l2)));
        }
    }
    out
}

/// Basis of `{X in span(A) : theta(X) = 0}`.
///
/// The null space is found numerically, snapped to small rationals and then
/// confirmed symbolically; combinations that fail confirmation are dropped.
pub fn kernel_theta(alg: &AlgebraBasis, sampler: &Sampler) -> Result<AlgebraBasis, AlgebraError> {
    let images = alg.generators.iter().map(|g| theta(&g.field)).collect::<Result<Vec<_>, _>>()?;
    let cols = images.iter().map(|y| sampler.column(&y.coeffs)).collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for v in null_space(&cols) {
        let Some(coeffs) = v.iter().map(|x| snap_rational(*x, 64, 1e-7)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let terms: Vec<(Rational, &Generator)> = coeffs.into_iter().zip(&alg.generators).filter(|(c, _)| !c.is_zero()).collect();
        let field = PointField::linear_combination(terms.iter().map(|(c, g)| (Expr::num(c.clone()), &g.field)));
        if !theta(&field)?.is_zero() {
            continue;
        }
        let label = terms
            .iter()
            .map(|(c, g)| if c.is_one() { g.label.clone() } else { format!("({})*{}", c, g.label) })
            .collect::<Vec<_>>()
            .join(" + ");
        out.push(Generator { label, field });
    }
    Ok(AlgebraBasis::new(format!("ker theta({})", alg.label), out))
}

// ---------------------------------------------------------------------------
// report

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesTerm {
    pub label: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub case: String,
    pub algebra: String,
    pub generators: Vec<Generator>,
    /// Upper triangle, `brackets[i][j - i - 1] = [X_i, X_j]`.
    pub brackets: Vec<Vec<String>>,
    pub derived_series: Vec<SeriesTerm>,
    pub solvable: bool,
    pub theta_images: Vec<ThermoField>,
    pub thermo_part: Vec<ThermoField>,
    pub thermo_part_matches: bool,
    pub kernel: Vec<String>,
}

pub fn structure_report(case: &HCase, sampler: &Sampler) -> Result<StructureReport, AlgebraError> {
    let alg = AlgebraBasis::of_case(case);
    let fields = alg.fields();
    let brackets = (0..fields.len())
        .map(|i| (i + 1..fields.len()).map(|j| bracket(&fields[i], &fields[j]).to_string()).collect())
        .collect();
    let series = derived_series(&alg, sampler)?;
    let solvable = series.last().map(|a| a.dim() == 0).unwrap_or(true);
    let theta_images = fields.iter().map(theta).collect::<Result<Vec<_>, _>>()?;
    let ys = thermo_part(case);
    let as_points = |v: &[ThermoField]| v.iter().map(|y| y.to_point_field()).collect::<Vec<_>>();
    let thermo_part_matches = same_span(&as_points(&theta_images), &as_points(&ys), sampler)?;
    let kernel = kernel_theta(&alg, sampler)?.generators.into_iter().map(|g| g.label).collect();
    Ok(StructureReport {
        case: case.name().to_string(),
        algebra: alg.label.clone(),
        generators: alg.generators,
        brackets,
        derived_series: series.iter().map(|a| SeriesTerm { label: a.label.clone(), dim: a.dim() }).collect(),
        solvable,
        theta_images,
        thermo_part: ys,
        thermo_part_matches,
        kernel,
    })
}

/// Parses a space separated list of field descriptions like `t*d_a + d_u`.
pub fn parse_field(text: &str) -> Result<PointField, String> {
    let mut parts: Vec<(String, String)> = Vec::new();
    for term in split_top_level(text) {
        let (coeff, coord) = match term.rsplit_once("d_") {
            Some((c, name)) => (c.trim().trim_end_matches('*').trim().to_string(), name.trim().to_string()),
            None => return Err(format!("term `{term}` has no d_<coordinate>")),
        };
        let coeff = match coeff.as_str() {
            "" | "+" => "1".to_string(),
            "-" => "-1".to_string(),
            _ => coeff,
        };
        parts.push((coord, coeff));
    }
    let refs: Vec<(&str, &str)> = parts.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    PointField::parse(&refs).map_err(|e| e.to_string())
}

/// Splits on `+` outside parentheses, keeping a leading `-` with its term.
fn split_top_level(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut prev_op = true;
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && c == '+' && !prev_op {
            out.push(std::mem::take(&mut cur));
            prev_op = true;
            continue;
        }
        if !c.is_whitespace() {
            prev_op = "+-*/^(".contains(c);
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(name: &str) -> HCase {
        HCase::symbolic(name).unwrap()
    }

    fn gens(name: &str) -> Vec<PointField> {
        AlgebraBasis::of_case(&case(name)).fields()
    }

    #[test]
    fn bracket_examples() {
        let g = gens("const");
        assert_eq!(bracket(&g[1], &g[4]), g[1]);
        assert_eq!(bracket(&g[0], &g[6]), g[5]);
        assert!(bracket(&g[3], &g[4]).is_zero_literal());
    }

    #[test]
    fn rank_of_generators_is_full() {
        let s = Sampler::default();
        for c in HCase::all_symbolic() {
            let a = AlgebraBasis::of_case(&c);
            assert_eq!(rank(&a.fields(), &s).unwrap(), a.dim(), "{c}");
        }
    }

    #[test]
    fn dependent_fields_detected() {
        let s = Sampler::default();
        let x = parse_field("t*d_a + d_u").unwrap();
        let y = parse_field("d_a").unwrap();
        let z = parse_field("2*t*d_a + 2*d_u + lambda*d_a").unwrap();
        assert_eq!(rank(&[x.clone(), y.clone(), z], &s).unwrap(), 2);
        let w = parse_field("a*d_a").unwrap();
        assert!(!in_span(&w, &[x, y], &s).unwrap());
    }

    #[test]
    fn generic_series() {
        let s = Sampler::default();
        let series = derived_series(&AlgebraBasis::of_case(&case("generic")), &s).unwrap();
        let labels: Vec<&str> = series.iter().map(|a| a.label.as_str()).collect();
        assert_eq!(labels, vec!["g^0", "<X2,X3>", "0"]);
    }

    #[test]
    fn abelian_is_solvable() {
        let s = Sampler::default();
        let one = AlgebraBasis::new("x1", vec![Generator { label: "X1".into(), field: parse_field("d_t").unwrap() }]);
        assert!(is_solvable(&one, &s).unwrap());
    }

    #[test]
    fn non_closed_rejected() {
        let s = Sampler::default();
        let g = vec![
            Generator { label: "A".into(), field: parse_field("d_t").unwrap() },
            Generator { label: "B".into(), field: parse_field("t^2*d_a").unwrap() },
        ];
        assert!(matches!(derived_series(&AlgebraBasis::new("bad", g), &s), Err(AlgebraError::NotClosed(..))));
    }

    #[test]
    fn sl2_is_not_solvable() {
        let s = Sampler::default();
        let g = ["d_t", "t*d_t", "t^2*d_t"]
            .iter()
            .enumerate()
            .map(|(i, f)| Generator { label: format!("L{i}"), field: parse_field(f).unwrap() })
            .collect();
        assert!(!is_solvable(&AlgebraBasis::new("sl2", g), &s).unwrap());
    }

    #[test]
    fn theta_examples() {
        let g = gens("const");
        assert!(theta(&g[0]).unwrap().is_zero());
        assert_eq!(theta(&g[4]).unwrap(), ThermoField::parse(&[("p", "p"), ("rho", "rho"), ("s", "-s")]));
        assert_eq!(theta(&g[8]).unwrap(), ThermoField::parse(&[("p", "-2*p"), ("s", "s")]));
        let bad = parse_field("t*d_p").unwrap();
        assert!(matches!(theta(&bad), Err(AlgebraError::NotProjectable("p", _))));
    }

    #[test]
    fn kernels() {
        let s = Sampler::default();
        let k = |n: &str| kernel_theta(&AlgebraBasis::of_case(&case(n)), &s).unwrap();
        assert_eq!(k("generic").dim(), 1);
        let q = k("quadratic");
        assert_eq!(q.dim(), 3);
        assert!(same_span(&q.fields(), &[gens("quadratic")[0].clone(), gens("quadratic")[6].clone(), gens("quadratic")[7].clone()], &s).unwrap());
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_rational(-0.5, 64, 1e-9), Some(rat(-1, 2)));
        assert_eq!(snap_rational(std::f64::consts::PI, 64, 1e-9), None);
    }

    #[test]
    fn field_parsing() {
        let x = parse_field("p*d_p + rho*d_rho + -s*d_s").unwrap();
        assert_eq!(x.to_string(), "p*d_p + rho*d_rho + -s*d_s");
        let y = parse_field("-(t + a)*d_u + d_T").unwrap();
        assert_eq!(parse_field(&y.to_string()).unwrap(), y);
        assert!(parse_field("t*u").is_err());
    }
}
