use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Role a symbol plays on the jet space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    /// Independent variables `t` and `a`.
    Base,
    /// Dependent variables `u, p, rho, s, T`.
    Fiber,
    /// Partial derivatives of a fiber variable, e.g. `u_ta`.
    Jet,
    /// Constants of the model (`lambda`, `g`, `xi3`, ...).
    Parameter,
    /// Auxiliary unknowns such as the internal energy `eps` and its derivatives.
    Auxiliary,
}

/// The five dependent variables of the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    U,
    P,
    Rho,
    S,
    T,
}

impl Field {
    pub const ALL: [Field; 5] = [Field::U, Field::P, Field::Rho, Field::S, Field::T];

    pub fn name(self) -> &'static str {
        match self {
            Field::U => "u",
            Field::P => "p",
            Field::Rho => "rho",
            Field::S => "s",
            Field::T => "T",
        }
    }

    pub fn from_name(name: &str) -> Option<Field> {
        match name {
            "u" => Some(Field::U),
            "p" => Some(Field::P),
            "rho" => Some(Field::Rho),
            "s" => Some(Field::S),
            "T" => Some(Field::T),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// A jet coordinate `w_{t^i a^j}`; `(0, 0)` is the fiber variable itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar {
    pub field: Field,
    pub nt: u32,
    pub na: u32,
}

impl JetVar {
    pub fn new(field: Field, nt: u32, na: u32) -> Self {
        JetVar { field, nt, na }
    }

    pub fn fiber(field: Field) -> Self {
        JetVar { field, nt: 0, na: 0 }
    }

    pub fn order(&self) -> u32 {
        self.nt + self.na
    }

    /// The jet obtained by one more derivative in the given base direction.
    pub fn bump(&self, dir: BaseVar) -> JetVar {
        match dir {
            BaseVar::T => JetVar::new(self.field, self.nt + 1, self.na),
            BaseVar::A => JetVar::new(self.field, self.nt, self.na + 1),
        }
    }

    pub fn name(&self) -> String {
        if self.order() == 0 {
            return self.field.name().to_string();
        }
        let mut s = String::with_capacity(8);
        s.push_str(self.field.name());
        s.push('_');
        for _ in 0..self.nt {
            s.push('t');
        }
        for _ in 0..self.na {
            s.push('a');
        }
        s
    }

    /// Parses `u`, `rho_ta`, `T_aa`, ... . Derivative letters may come in any order.
    pub fn parse(name: &str) -> Option<JetVar> {
        if let Some(field) = Field::from_name(name) {
            return Some(JetVar::fiber(field));
        }
        let (head, tail) = name.split_once('_')?;
        let field = Field::from_name(head)?;
        if tail.is_empty() {
            return None;
        }
        let mut nt = 0;
        let mut na = 0;
        for c in tail.chars() {
            match c {
                't' => nt += 1,
                'a' => na += 1,
                _ => return None,
            }
        }
        Some(JetVar::new(field, nt, na))
    }

    pub fn symbol(&self) -> Symbol {
        Symbol::new(&self.name())
    }

    /// All jets of order exactly `k` for one field.
    pub fn of_order(field: Field, k: u32) -> Vec<JetVar> {
        (0..=k).rev().map(|nt| JetVar::new(field, nt, k - nt)).collect()
    }
}

/// Independent variable of the curve flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseVar {
    T,
    A,
}

impl BaseVar {
    pub fn name(self) -> &'static str {
        match self {
            BaseVar::T => "t",
            BaseVar::A => "a",
        }
    }

    pub fn symbol(self) -> Symbol {
        Symbol::new(self.name())
    }
}

/// Interned-by-value symbol name. The kind is a pure function of the name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn kind(&self) -> SymbolKind {
        match self.name() {
            "t" | "a" => SymbolKind::Base,
            n if Field::from_name(n).is_some() => SymbolKind::Fiber,
            n if JetVar::parse(n).is_some() => SymbolKind::Jet,
            n if n == "eps" || n.starts_with("eps_") => SymbolKind::Auxiliary,
            _ => SymbolKind::Parameter,
        }
    }

    /// Jet coordinate for fiber and jet symbols (order 0 for fibers).
    pub fn as_jet(&self) -> Option<JetVar> {
        match self.kind() {
            SymbolKind::Fiber | SymbolKind::Jet => JetVar::parse(self.name()),
            _ => None,
        }
    }

    pub fn as_base(&self) -> Option<BaseVar> {
        match self.name() {
            "t" => Some(BaseVar::T),
            "a" => Some(BaseVar::A),
            _ => None,
        }
    }

    /// True for symbols that depend on the point of the jet space (base, fiber, jet).
    pub fn is_coordinate(&self) -> bool {
        matches!(self.kind(), SymbolKind::Base | SymbolKind::Fiber | SymbolKind::Jet)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

const DEFAULT_PARAMETERS: &[&str] = &[
    "lambda", "lambda1", "lambda2", "g", "k", "gamma1", "gamma2", "gamma3", "gamma4", "gamma5", "xi1",
    "xi2", "xi3", "xi4", "xi5", "xi6", "C1", "C2", "s0", "a0", "h0", "mu", "omega",
];

const DEFAULT_AUXILIARY: &[&str] = &["eps", "eps_r", "eps_s", "eps_rr", "eps_rs", "eps_ss"];

/// Names the parser accepts. Base, fiber and jet names are always known;
/// parameters and undefined functions must be registered.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    names: BTreeSet<String>,
    functions: BTreeSet<String>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        let mut names = BTreeSet::new();
        for n in DEFAULT_PARAMETERS.iter().chain(DEFAULT_AUXILIARY) {
            names.insert((*n).to_string());
        }
        let mut functions = BTreeSet::new();
        functions.insert("h".to_string());
        SymbolTable { names, functions }
    }
}

impl SymbolTable {
    pub fn empty() -> Self {
        SymbolTable { names: BTreeSet::new(), functions: BTreeSet::new() }
    }

    pub fn with_param(mut self, name: &str) -> Self {
        self.names.insert(name.to_string());
        self
    }

    pub fn with_function(mut self, name: &str) -> Self {
        self.functions.insert(name.to_string());
        self
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        let sym = Symbol::new(name);
        match sym.kind() {
            SymbolKind::Base | SymbolKind::Fiber => Some(sym),
            SymbolKind::Jet => Some(JetVar::parse(name)?.symbol()),
            _ if self.names.contains(name) => Some(sym),
            _ => None,
        }
    }

    pub fn has_function(&self, name: &str) -> bool {
        self.functions.contains(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_names_round_trip() {
        let j = JetVar::new(Field::T, 0, 2);
        assert_eq!(j.name(), "T_aa");
        assert_eq!(JetVar::parse("T_aa"), Some(j));
        assert_eq!(JetVar::parse("u_at"), Some(JetVar::new(Field::U, 1, 1)));
        assert_eq!(JetVar::parse("u_x"), None);
        assert_eq!(JetVar::parse("rho"), Some(JetVar::fiber(Field::Rho)));
    }

    #[test]
    fn kinds() {
        assert_eq!(Symbol::new("t").kind(), SymbolKind::Base);
        assert_eq!(Symbol::new("rho").kind(), SymbolKind::Fiber);
        assert_eq!(Symbol::new("s_ta").kind(), SymbolKind::Jet);
        assert_eq!(Symbol::new("xi4").kind(), SymbolKind::Parameter);
        assert_eq!(Symbol::new("eps_rs").kind(), SymbolKind::Auxiliary);
    }

    #[test]
    fn table_canonicalises_jets_and_rejects_unknown() {
        let table = SymbolTable::default();
        assert_eq!(table.lookup("u_at").unwrap().name(), "u_ta");
        assert!(table.lookup("zeta").is_none());
        assert!(table.with_param("zeta").lookup("zeta").is_some());
    }
}
