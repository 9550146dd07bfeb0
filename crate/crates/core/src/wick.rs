//! Symbolic normal ordering of ladder-operator strings.
//!
//! Strings are written in a small text grammar:
//!
//! ```text
//! expr   := prefix ':' atom*
//! prefix := "bose" | "fermi"
//! atom   := "a(" label ")" | "a+(" label ")"
//! ```
//!
//! with atoms separated by whitespace and labels free of whitespace and
//! parentheses. Labels are abstract: `x` and `y` are different symbols even
//! though they may later be assigned the same concrete mode.
//!
//! [`normal_order`] repeatedly rewrites the leftmost adjacent
//! `a(α) a+(β)` pair as `δ(α,β) ± a+(β) a(α)`. Every rewrite removes one
//! inversion, so the process terminates. Surviving strings are then sorted
//! (creators by label, then annihilators by label) with the exchange sign,
//! and like terms are merged, giving a canonical [`NormalForm`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::fock::{LadderKind, LadderOp, Statistics};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LadderSymbol {
    pub kind: LadderKind,
    pub label: String,
}

impl LadderSymbol {
    pub fn create(label: impl Into<String>) -> Self {
        Self { kind: LadderKind::Create, label: label.into() }
    }

    pub fn annihilate(label: impl Into<String>) -> Self {
        Self { kind: LadderKind::Annihilate, label: label.into() }
    }
}

impl fmt::Display for LadderSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LadderKind::Create => write!(f, "a+({})", self.label),
            LadderKind::Annihilate => write!(f, "a({})", self.label),
        }
    }
}

/// Product of ladder symbols, leftmost first. The empty string is the
/// identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperatorString {
    pub statistics: Statistics,
    pub symbols: Vec<LadderSymbol>,
}

impl OperatorString {
    pub fn new(statistics: Statistics, symbols: Vec<LadderSymbol>) -> Self {
        Self { statistics, symbols }
    }

    pub fn labels(&self) -> BTreeSet<String> {
        self.symbols.iter().map(|s| s.label.clone()).collect()
    }

    /// Concrete ladder operators (species 0) under a label assignment.
    pub fn to_ladder_ops(&self, assignment: &BTreeMap<String, usize>) -> Result<Vec<LadderOp>> {
        self.symbols
            .iter()
            .map(|s| {
                let mode = *assignment.get(&s.label).ok_or_else(|| Error::MissingLabel(s.label.clone()))?;
                Ok(LadderOp { kind: s.kind, mode, species: 0 })
            })
            .collect()
    }
}

impl fmt::Display for OperatorString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.statistics)?;
        for s in &self.symbols {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

/// Kronecker delta between two labels, stored with the smaller label first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Delta(String, String);

impl Delta {
    /// `None` when both labels are identical (the delta is 1).
    pub fn new(a: &str, b: &str) -> Option<Self> {
        match a.cmp(b) {
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Less => Some(Self(a.to_owned(), b.to_owned())),
            std::cmp::Ordering::Greater => Some(Self(b.to_owned(), a.to_owned())),
        }
    }

    pub fn labels(&self) -> (&str, &str) {
        (&self.0, &self.1)
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d({},{})", self.0, self.1)
    }
}

/// One term of a normal form: `coefficient · Π δ · normal_string`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coefficient: i64,
    pub deltas: Vec<Delta>,
    pub string: Vec<LadderSymbol>,
}

impl Term {
    fn write_body(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.deltas.iter().map(ToString::to_string).collect();
        parts.extend(self.string.iter().map(ToString::to_string));
        let magnitude = self.coefficient.unsigned_abs();
        match (magnitude, parts.is_empty()) {
            (1, true) => f.write_str("1"),
            (1, false) => f.write_str(&parts.join(" ")),
            (m, true) => write!(f, "{m}"),
            (m, false) => write!(f, "{m} {}", parts.join(" ")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub statistics: Statistics,
    pub terms: Vec<Term>,
}

impl NormalForm {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, term) in self.terms.iter().enumerate() {
            match (i, term.coefficient < 0) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            term.write_body(f)?;
        }
        Ok(())
    }
}

/// Integer polynomial in Kronecker deltas: the vacuum expectation value of a
/// string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaPolynomial {
    pub terms: Vec<(i64, Vec<Delta>)>,
    /// Labels of the source string; an assignment must cover all of them.
    pub labels: BTreeSet<String>,
}

impl DeltaPolynomial {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Substitute concrete indices for labels.
    pub fn evaluate(&self, assignment: &BTreeMap<String, usize>) -> Result<i64> {
        if let Some(missing) = self.labels.iter().find(|l| !assignment.contains_key(*l)) {
            return Err(Error::MissingLabel(missing.clone()));
        }
        let index = |label: &str| assignment.get(label).copied().ok_or_else(|| Error::MissingLabel(label.to_owned()));
        let mut total = 0;
        for (coefficient, deltas) in &self.terms {
            let mut all = true;
            for d in deltas {
                let (a, b) = d.labels();
                if index(a)? != index(b)? {
                    all = false;
                    break;
                }
            }
            if all {
                total += coefficient;
            }
        }
        Ok(total)
    }
}

impl fmt::Display for DeltaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nf = NormalForm {
            statistics: Statistics::Bose,
            terms: self
                .terms
                .iter()
                .map(|(c, d)| Term { coefficient: *c, deltas: d.clone(), string: Vec::new() })
                .collect(),
        };
        nf.fmt(f)
    }
}

pub fn parse(text: &str) -> Result<OperatorString> {
    let colon = text.find(':').ok_or_else(|| Error::Parse {
        position: 0,
        message: "missing statistics prefix (`bose:` or `fermi:`)".into(),
    })?;
    let prefix = text[..colon].trim();
    let statistics = match prefix {
        "bose" => Statistics::Bose,
        "fermi" => Statistics::Fermi,
        other => {
            let position = text.find(|c: char| !c.is_whitespace()).unwrap_or(0);
            return Err(Error::Parse { position, message: format!("unknown statistics prefix `{other}`") });
        }
    };

    let bytes = text.as_bytes();
    let mut symbols = Vec::new();
    let mut i = colon + 1;
    loop {
        while i < bytes.len() && (bytes[i] as char).is_ascii_whitespace() {
            i += 1;
        }
        if i >= bytes.len() {
            break;
        }
        let start = i;
        if bytes[i] != b'a' {
            return Err(Error::Parse { position: start, message: "expected `a(` or `a+(`".into() });
        }
        i += 1;
        let kind = if bytes.get(i) == Some(&b'+') {
            i += 1;
            LadderKind::Create
        } else {
            LadderKind::Annihilate
        };
        if bytes.get(i) != Some(&b'(') {
            return Err(Error::Parse { position: start, message: "expected `(` after operator name".into() });
        }
        i += 1;
        let label_start = i;
        while i < bytes.len() && bytes[i] != b')' {
            let c = bytes[i] as char;
            if c.is_ascii_whitespace() || c == '(' {
                break;
            }
            i += 1;
        }
        if bytes.get(i) != Some(&b')') {
            return Err(Error::Parse { position: start, message: "unclosed atom".into() });
        }
        if i == label_start {
            return Err(Error::Parse { position: start, message: "empty label".into() });
        }
        let label = text[label_start..i].to_owned();
        i += 1;
        if i < bytes.len() && !(bytes[i] as char).is_ascii_whitespace() {
            return Err(Error::Parse { position: i, message: "atoms must be separated by whitespace".into() });
        }
        symbols.push(LadderSymbol { kind, label });
    }
    Ok(OperatorString { statistics, symbols })
}

struct Pending {
    coefficient: i64,
    deltas: BTreeSet<Delta>,
    string: Vec<LadderSymbol>,
}

/// Sort a normal-ordered string into canonical order, returning the sign of
/// the permutation, or `None` when two identical fermionic symbols meet.
fn canonicalize(string: &mut [LadderSymbol], statistics: Statistics) -> Option<i64> {
    let mut sign = 1;
    // insertion sort keeps the transposition count explicit
    for i in 1..string.len() {
        let mut j = i;
        while j > 0 && string[j - 1] >= string[j] {
            if string[j - 1] == string[j] {
                if statistics == Statistics::Fermi {
                    return None;
                }
                break;
            }
            string.swap(j - 1, j);
            sign *= statistics.exchange_sign();
            j -= 1;
        }
    }
    Some(sign)
}

pub fn normal_order(s: &OperatorString) -> NormalForm {
    let exchange = s.statistics.exchange_sign();
    let mut done: BTreeMap<(Vec<LadderSymbol>, Vec<Delta>), i64> = BTreeMap::new();
    let mut work = vec![Pending { coefficient: 1, deltas: BTreeSet::new(), string: s.symbols.clone() }];

    while let Some(mut term) = work.pop() {
        let offending =
            term.string.windows(2).position(|w| w[0].kind == LadderKind::Annihilate && w[1].kind == LadderKind::Create);
        match offending {
            Some(i) => {
                let (ann, cre) = (&term.string[i], &term.string[i + 1]);
                // a(α) a+(β) = δ(α,β) ± a+(β) a(α)
                let mut contracted = term.deltas.clone();
                if let Some(d) = Delta::new(&ann.label, &cre.label) {
                    contracted.insert(d);
                }
                let mut rest = term.string.clone();
                rest.drain(i..i + 2);
                work.push(Pending { coefficient: term.coefficient, deltas: contracted, string: rest });

                term.string.swap(i, i + 1);
                term.coefficient *= exchange;
                work.push(term);
            }
            None => {
                if let Some(sign) = canonicalize(&mut term.string, s.statistics) {
                    let key = (term.string, term.deltas.into_iter().collect());
                    *done.entry(key).or_insert(0) += sign * term.coefficient;
                }
            }
        }
    }

    NormalForm {
        statistics: s.statistics,
        terms: done
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|((string, deltas), coefficient)| Term { coefficient, deltas, string })
            .collect(),
    }
}

/// `⟨ψ₀, s ψ₀⟩` as a delta polynomial: the identity terms of the normal form.
pub fn vacuum_expectation(s: &OperatorString) -> DeltaPolynomial {
    let nf = normal_order(s);
    DeltaPolynomial {
        terms: nf.terms.into_iter().filter(|t| t.string.is_empty()).map(|t| (t.coefficient, t.deltas)).collect(),
        labels: s.labels(),
    }
}

/// Parse, normal-order and print in one step.
pub fn normal_order_text(text: &str) -> Result<String> {
    Ok(normal_order(&parse(text)?).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nf(text: &str) -> String {
        normal_order_text(text).unwrap()
    }

    #[test]
    fn parses_both_prefixes() {
        let s = parse("bose: a(x1) a+(x2)").unwrap();
        assert_eq!(s.statistics, Statistics::Bose);
        assert_eq!(s.symbols, vec![LadderSymbol::annihilate("x1"), LadderSymbol::create("x2")]);
        let f = parse("fermi: a+(p) a(p)").unwrap();
        assert_eq!(f.statistics, Statistics::Fermi);
        assert_eq!(f.symbols, vec![LadderSymbol::create("p"), LadderSymbol::annihilate("p")]);
        assert_eq!(parse("bose:").unwrap().symbols, vec![]);
    }

    #[test]
    fn parse_errors_report_position() {
        assert_eq!(parse("bose: a(x1 a+(x2)"), Err(Error::Parse { position: 6, message: "unclosed atom".into() }));
        assert!(matches!(parse("boson: a(x)"), Err(Error::Parse { position: 0, .. })));
        assert!(matches!(parse("fermi: a()"), Err(Error::Parse { position: 7, .. })));
        assert!(matches!(parse("a(x)"), Err(Error::Parse { .. })));
        assert!(matches!(parse("bose: b(x)"), Err(Error::Parse { position: 6, .. })));
        assert!(matches!(parse("bose: a(x)a(y)"), Err(Error::Parse { position: 10, .. })));
    }

    #[test]
    fn printer_round_trips() {
        for text in ["bose: a(x1) a+(x2)", "fermi: a+(p) a(p) a+(q')", "bose:"] {
            assert_eq!(parse(text).unwrap().to_string(), text);
        }
    }

    #[test]
    fn single_contraction() {
        assert_eq!(nf("bose: a(x1) a+(x2)"), "d(x1,x2) + a+(x2) a(x1)");
        assert_eq!(nf("fermi: a(x1) a+(x2)"), "d(x1,x2) - a+(x2) a(x1)");
        assert_eq!(nf("bose: a(x) a+(x)"), "1 + a+(x) a(x)");
    }

    #[test]
    fn normal_string_is_fixed_point() {
        let s = parse("bose: a+(b) a(a)").unwrap();
        let form = normal_order(&s);
        assert_eq!(form.terms.len(), 1);
        assert_eq!(form.terms[0].coefficient, 1);
        assert!(form.terms[0].deltas.is_empty());
        assert_eq!(form.terms[0].string, s.symbols);
    }

    #[test]
    fn number_density_contraction() {
        let s = parse("bose: a(x') a+(x) a(x) a+(x'')").unwrap();
        let vev = vacuum_expectation(&s);
        assert_eq!(vev.to_string(), "d(x,x') d(x,x'')");
        let fermi = parse("fermi: a(x') a+(x) a(x) a+(x'')").unwrap();
        assert_eq!(vacuum_expectation(&fermi).to_string(), "d(x,x') d(x,x'')");
    }

    #[test]
    fn evaluate_deltas() {
        let s = parse("bose: a(x') a+(x) a(x) a+(x'')").unwrap();
        let vev = vacuum_expectation(&s);
        let assign = |a: usize, b: usize, c: usize| {
            BTreeMap::from([("x".to_string(), a), ("x'".to_string(), b), ("x''".to_string(), c)])
        };
        assert_eq!(vev.evaluate(&assign(3, 3, 3)).unwrap(), 1);
        assert_eq!(vev.evaluate(&assign(3, 2, 3)).unwrap(), 0);
        let partial = BTreeMap::from([("x".to_string(), 0)]);
        assert!(matches!(vev.evaluate(&partial), Err(Error::MissingLabel(_))));
    }

    #[test]
    fn fermi_pair_signs() {
        let direct = vacuum_expectation(&parse("fermi: a(x1) a(x2) a+(x2) a+(x1)").unwrap());
        let crossed = vacuum_expectation(&parse("fermi: a(x1) a(x2) a+(x1) a+(x2)").unwrap());
        let distinct = BTreeMap::from([("x1".to_string(), 0), ("x2".to_string(), 1)]);
        assert_eq!(direct.evaluate(&distinct).unwrap(), 1);
        assert_eq!(crossed.evaluate(&distinct).unwrap(), -1);
    }

    #[test]
    fn unbalanced_strings_vanish_in_vacuum() {
        assert!(vacuum_expectation(&parse("bose: a(x) a+(y) a+(z)").unwrap()).is_zero());
        assert!(vacuum_expectation(&parse("fermi: a+(x)").unwrap()).is_zero());
    }

    #[test]
    fn repeated_fermion_annihilators_vanish() {
        assert!(normal_order(&parse("fermi: a(x) a(x) a+(y)").unwrap()).is_zero());
        assert_eq!(nf("fermi: a+(y) a+(x)"), "-a+(x) a+(y)");
    }
}
