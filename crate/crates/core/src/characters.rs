//! Class functions on `S_n`, character polynomials, and the representation
//! stability checks built on them.
//!
//! A character polynomial is a polynomial in the class functions
//! `X_k^{(j)}` = number of `k`-cycles in the `j`-th factor. It defines a
//! class function on every `S_n` at once.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arrangement::{build_lattice, primitive_classes, ArrangementSpec, PrimitiveClass};
use crate::error::{Error, Result};
use crate::exactlin::{format_rational, parse_rational, rat, Rational, RationalMatrix};
use crate::fim::{
    act_on_vector, class_representative, conj_classes, degree_times, enumerate_group,
    group_order, partitions, ConjClass, MultiIndex, Partition,
};
use crate::homology::{
    gm_betti, local_degree, order_complex, trace_on_homology, GMReport, LocalCohomology,
};
use crate::par;

fn big(n: u128) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A rational-valued function on the conjugacy classes of `S_level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    level: MultiIndex,
    classes: Vec<ConjClass>,
    values: Vec<Rational>,
}

impl ClassFunction {
    /// Values must be listed in the order of [`conj_classes`].
    pub fn new(level: MultiIndex, values: Vec<Rational>) -> Result<Self> {
        let classes = conj_classes(&level);
        if classes.len() != values.len() {
            return Err(Error::Shape {
                expected: format!("{} class values", classes.len()),
                found: format!("{} values", values.len()),
            });
        }
        Ok(Self {
            level,
            classes,
            values,
        })
    }

    pub fn from_fn(level: &MultiIndex, f: impl Fn(&ConjClass) -> Rational) -> Self {
        let classes = conj_classes(level);
        let values = classes.iter().map(f).collect();
        Self {
            level: level.clone(),
            classes,
            values,
        }
    }

    pub fn constant(level: &MultiIndex, v: Rational) -> Self {
        Self::from_fn(level, |_| v.clone())
    }

    pub fn zero(level: &MultiIndex) -> Self {
        Self::constant(level, Rational::zero())
    }

    pub fn level(&self) -> &MultiIndex {
        &self.level
    }

    pub fn classes(&self) -> &[ConjClass] {
        &self.classes
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ConjClass, &Rational)> {
        self.classes.iter().zip(&self.values)
    }

    pub fn value(&self, c: &ConjClass) -> Option<&Rational> {
        self.classes
            .binary_search_by(|probe| probe.parts().cmp(c.parts()))
            .ok()
            .map(|i| &self.values[i])
    }

    /// Value at the identity, i.e. the dimension for a character.
    pub fn degree(&self) -> &Rational {
        &self.values[0]
    }

    fn check_level(&self, other: &ClassFunction) -> Result<()> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level.clone(), other.level.clone()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ClassFunction) -> Result<ClassFunction> {
        self.check_level(other)?;
        Ok(Self {
            level: self.level.clone(),
            classes: self.classes.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }
}

/// `⟨a, b⟩ = (1/|G|) Σ_g a(g) b(g^{-1})`. Cycle type is inversion invariant,
/// so `b(g^{-1}) = b(g)` classwise.
pub fn inner_product(a: &ClassFunction, b: &ClassFunction) -> Result<Rational> {
    a.check_level(b)?;
    let sum = a
        .classes
        .iter()
        .zip(a.values.iter().zip(&b.values))
        .fold(Rational::zero(), |acc, (c, (x, y))| acc + big(c.size()) * x * y);
    Ok(sum / big(group_order(&a.level)))
}

pub fn tensor_char(a: &ClassFunction, b: &ClassFunction) -> Result<ClassFunction> {
    a.check_level(b)?;
    Ok(ClassFunction {
        level: a.level.clone(),
        classes: a.classes.clone(),
        values: a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect(),
    })
}

/// Character of the dual: the value at the inverse class, which for
/// symmetric groups is the same class.
pub fn dual_char(a: &ClassFunction) -> ClassFunction {
    ClassFunction::from_fn(&a.level, |c| {
        let inverse = ConjClass::new(c.parts().to_vec());
        a.value(&inverse).cloned().expect("same level")
    })
}

/// Dimension of the invariants, `⟨χ, 1⟩`; must be a nonnegative integer.
pub fn invariants_dim(chi: &ClassFunction) -> Result<Rational> {
    let d = inner_product(chi, &ClassFunction::constant(chi.level(), Rational::one()))?;
    if !d.is_integer() || d.is_negative() {
        return Err(Error::NotACharacter(format_rational(&d)));
    }
    Ok(d)
}

/// Twisted Betti number `⟨H^*, N⟩`.
pub fn twisted_betti(chi_h: &ClassFunction, chi_n: &ClassFunction) -> Result<Rational> {
    inner_product(&dual_char(chi_h), chi_n)
}

/// The variable `X_k^{(j)}` (both 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub factor: usize,
    pub cycle: usize,
}

impl Var {
    pub fn new(cycle: usize, factor: usize) -> Self {
        Self { factor, cycle }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}^({})", self.cycle, self.factor)
    }
}

/// Exponents per variable, sorted by `(factor, cycle)`, no zero exponents.
pub type Monomial = Vec<(Var, u32)>;

fn monomial_weight(mono: &Monomial, m: usize) -> Vec<usize> {
    let mut w = vec![0; m];
    for (v, e) in mono {
        if v.factor >= 1 && v.factor <= m {
            w[v.factor - 1] += v.cycle * *e as usize;
        }
    }
    w
}

fn multiply_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut map: BTreeMap<Var, u32> = a.iter().copied().collect();
    for &(v, e) in b {
        *map.entry(v).or_insert(0) += e;
    }
    map.into_iter().collect()
}

/// A rational polynomial in the `X_k^{(j)}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CharacterPolynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl CharacterPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    /// `X_k^{(j)}`.
    pub fn var(k: usize, j: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![(Var::new(k, j), 1)], Rational::one());
        p
    }

    /// `binom(X_k^{(j)}, a)` expanded in monomials.
    pub fn binomial_of(k: usize, j: usize, a: usize) -> Self {
        let x = Self::var(k, j);
        let mut p = Self::constant(Rational::one());
        for i in 0..a {
            p = p.mul(&x.sub(&Self::constant(rat(i as i64))));
            p = p.scale(&Rational::new(BigInt::one(), BigInt::from(i + 1)));
        }
        p
    }

    fn add_term(&mut self, mono: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                out.add_term(multiply_monomials(ma, mb), a * b);
            }
        }
        out
    }

    /// Largest factor index appearing.
    pub fn factors(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|(v, _)| v.factor))
            .max()
            .unwrap_or(0)
    }

    /// Componentwise maximum over monomials of `Σ k·a_{kj} ē^{(j)}`.
    pub fn multidegree(&self, m: usize) -> MultiIndex {
        let mut deg = vec![0; m];
        for mono in self.terms.keys() {
            for (d, w) in deg.iter_mut().zip(monomial_weight(mono, m)) {
                *d = (*d).max(w);
            }
        }
        MultiIndex::new(deg)
    }

    pub fn evaluate(&self, c: &ConjClass) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (mono, coef)| {
            let v = mono.iter().fold(coef.clone(), |acc, (var, e)| {
                acc * rat(c.cycle_count(var.factor, var.cycle) as i64).pow(*e as i32)
            });
            acc + v
        })
    }

    pub fn on_level(&self, level: &MultiIndex) -> ClassFunction {
        ClassFunction::from_fn(level, |c| self.evaluate(c))
    }

    fn ordered_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let m = self.factors();
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let wa: usize = monomial_weight(a, m).iter().sum();
            let wb: usize = monomial_weight(b, m).iter().sum();
            wb.cmp(&wa).then_with(|| a.cmp(b))
        });
        terms
    }

    /// Rendering in the basis of products of `binom(X_k^{(j)}, a)`.
    pub fn to_binomial_string(&self) -> String {
        // x^a = Σ_s S(a, s) s! binom(x, s)
        let mut out: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (mono, coef) in &self.terms {
            let mut acc: Vec<(Monomial, Rational)> = vec![(Vec::new(), coef.clone())];
            for &(v, e) in mono {
                let expansion = falling_expansion(e as usize);
                let mut next = Vec::new();
                for (partial, c) in &acc {
                    for (s, w) in &expansion {
                        let mut p = partial.clone();
                        p.push((v, *s as u32));
                        next.push((p, c * w));
                    }
                }
                acc = next;
            }
            for (p, c) in acc {
                let key: Monomial = p.into_iter().filter(|(_, s)| *s > 0).collect();
                let entry = out.entry(key.clone()).or_insert_with(Rational::zero);
                *entry += c;
                if entry.is_zero() {
                    out.remove(&key);
                }
            }
        }
        let as_poly = CharacterPolynomial { terms: out };
        render_terms(&as_poly.ordered_terms(), |v, s| {
            if s == 1 {
                v.to_string()
            } else {
                format!("binom({v},{s})")
            }
        })
    }

    /// Parses the text form produced by `Display`; `Xk` without a factor
    /// means `Xk^(1)`.
    pub fn parse(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms: Vec<String> = Vec::new();
        let mut current = String::new();
        let mut prev: Option<char> = None;
        for ch in compact.chars() {
            let splits = (ch == '+' || ch == '-')
                && !current.is_empty()
                && !matches!(prev, Some('*' | '/' | '^' | '('));
            if splits {
                terms.push(std::mem::take(&mut current));
            }
            current.push(ch);
            prev = Some(ch);
        }
        terms.push(current);
        let mut poly = Self::zero();
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-Rational::one(), rest),
                None => (Rational::one(), term.strip_prefix('+').unwrap_or(&term)),
            };
            let mut factor = Self::constant(sign);
            for piece in body.split('*') {
                let next = if piece.starts_with('X') {
                    parse_power(piece)?
                } else {
                    Self::constant(parse_rational(piece)?)
                };
                factor = factor.mul(&next);
            }
            poly = poly.add(&factor);
        }
        Ok(poly)
    }
}

/// `X_k^{(j)}` optionally raised to `^e`.
fn parse_power(s: &str) -> Result<CharacterPolynomial> {
    let bad = || Error::Parse(format!("bad variable {s:?}"));
    let rest = s.strip_prefix('X').ok_or_else(bad)?;
    let digits: String = rest.chars().take_while(char::is_ascii_digit).collect();
    let k: usize = digits.parse().map_err(|_| bad())?;
    let mut rest = &rest[digits.len()..];
    let mut j = 1;
    if let Some(r) = rest.strip_prefix("^(") {
        let (inner, after) = r.split_once(')').ok_or_else(bad)?;
        j = inner.parse().map_err(|_| bad())?;
        rest = after;
    }
    let mut e = 1u32;
    if let Some(r) = rest.strip_prefix('^') {
        e = r.parse().map_err(|_| bad())?;
        rest = "";
    }
    if !rest.is_empty() || k == 0 || j == 0 {
        return Err(bad());
    }
    let mut p = CharacterPolynomial::zero();
    p.add_term(vec![(Var::new(k, j), e)], Rational::one());
    Ok(p)
}

/// `x^a = Σ_s S(a, s) s! binom(x, s)`, as `(s, S(a,s) s!)` pairs.
fn falling_expansion(a: usize) -> Vec<(usize, Rational)> {
    // Stirling numbers of the second kind by the usual recurrence
    let mut row = vec![BigInt::one()];
    for n in 1..=a {
        let mut next = vec![BigInt::zero(); n + 1];
        for k in 1..=n {
            let carry = if k < row.len() { &row[k] * BigInt::from(k) } else { BigInt::zero() };
            next[k] = &row[k - 1] + carry;
        }
        row = next;
    }
    let mut fact = BigInt::one();
    let mut out = Vec::new();
    for (s, stirling) in row.into_iter().enumerate() {
        if s > 0 {
            fact *= BigInt::from(s);
        }
        if !stirling.is_zero() {
            out.push((s, Rational::from_integer(stirling * &fact)));
        }
    }
    out
}

fn render_terms(terms: &[(&Monomial, &Rational)], var: impl Fn(Var, u32) -> String) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, (mono, coef)) in terms.iter().enumerate() {
        let negative = coef.is_negative();
        if i == 0 {
            if negative {
                s.push('-');
            }
        } else {
            s.push_str(if negative { " - " } else { " + " });
        }
        let abs = coef.abs();
        let vars: Vec<String> = mono.iter().map(|&(v, e)| var(v, e)).collect();
        if vars.is_empty() {
            s.push_str(&format_rational(&abs));
        } else {
            if !abs.is_one() {
                s.push_str(&format_rational(&abs));
                s.push('*');
            }
            s.push_str(&vars.join("*"));
        }
    }
    s
}

impl fmt::Display for CharacterPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_terms(&self.ordered_terms(), |v, e| {
            if e == 1 {
                v.to_string()
            } else {
                format!("{v}^{e}")
            }
        }))
    }
}

/// All monomials of multidegree at most `bound`.
pub fn monomial_basis(bound: &MultiIndex) -> Vec<Monomial> {
    let per_factor: Vec<Vec<Monomial>> = bound
        .entries()
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            (0..=b)
                .flat_map(partitions)
                .map(|lambda| {
                    lambda
                        .iter()
                        .counts()
                        .into_iter()
                        .map(|(&k, e)| (Var::new(k, j + 1), e as u32))
                        .sorted()
                        .collect::<Monomial>()
                })
                .collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for options in per_factor {
        out = out
            .iter()
            .flat_map(|prefix: &Monomial| {
                options.iter().map(move |o| {
                    let mut m = prefix.clone();
                    m.extend(o.iter().copied());
                    m
                })
            })
            .collect();
    }
    out
}

/// The unique character polynomial of multidegree `<= bound` agreeing with
/// every sample, found by an exact linear solve over the monomial basis.
pub fn fit_character_polynomial(
    samples: &[ClassFunction],
    bound: &MultiIndex,
) -> Result<CharacterPolynomial> {
    let levels: Vec<&MultiIndex> = samples.iter().map(|s| s.level()).unique().collect();
    if levels.len() < 2 {
        return Err(Error::Precondition(
            "fitting needs samples at two or more distinct levels".into(),
        ));
    }
    if let Some(l) = levels.iter().find(|l| !bound.le(l)) {
        return Err(Error::Precondition(format!(
            "sample level {l} is not >= the degree bound {bound}"
        )));
    }
    let basis = monomial_basis(bound);
    let unknowns = basis.len();
    let mut rows = Vec::new();
    for sample in samples {
        for (c, v) in sample.iter() {
            let mut row: Vec<Rational> = basis
                .iter()
                .map(|mono| {
                    let mut p = CharacterPolynomial::zero();
                    p.add_term(mono.clone(), Rational::one());
                    p.evaluate(c)
                })
                .collect();
            row.push(v.clone());
            rows.push(row);
        }
    }
    let (reduced, pivots) = RationalMatrix::from_rows(unknowns + 1, rows)?.rref_with_pivots();
    if pivots.last() == Some(&unknowns) {
        return Err(Error::FitInconsistent(bound.clone()));
    }
    if pivots.len() < unknowns {
        return Err(Error::FitUnderdetermined {
            bound: bound.clone(),
            rank: pivots.len(),
            unknowns,
        });
    }
    let mut poly = CharacterPolynomial::zero();
    for (i, &p) in pivots.iter().enumerate() {
        poly.add_term(basis[p].clone(), reduced[(i, unknowns)].clone());
    }
    Ok(poly)
}

/// Character of `H^i` of the complement at level `n`.
pub fn character_of_cohomology(
    spec: &ArrangementSpec,
    n: &MultiIndex,
    i: usize,
) -> Result<ClassFunction> {
    if i == 0 {
        return Ok(ClassFunction::constant(n, Rational::one()));
    }
    let lat = build_lattice(spec, n, i)?;
    character_from_lattice(&lat, i)
}

/// As [`character_of_cohomology`] on an already built lattice.
pub fn character_from_lattice(
    lat: &crate::arrangement::IntersectionLattice,
    i: usize,
) -> Result<ClassFunction> {
    let local = LocalCohomology::new(lat, i)?;
    let classes = conj_classes(lat.level());
    let values = par::try_map(&classes, |c| local.trace(&class_representative(c)))?;
    ClassFunction::new(lat.level().clone(), values)
}

/// [`gm_betti`] with the character values of `H^i` filled in.
pub fn gm_betti_with_characters(
    lat: &crate::arrangement::IntersectionLattice,
    i: usize,
) -> Result<GMReport> {
    let mut report = gm_betti(lat, i)?;
    let chi = character_from_lattice(lat, i)?;
    report.characters = Some(chi.iter().map(|(c, v)| (c.clone(), v.clone())).collect());
    Ok(report)
}

/// Character of `Ind_c(W)` at level `n`: each `g`-stable `c`-subset is a
/// union of cycles of `g`, and `g` acts on it with the cycle type of the
/// chosen cycles.
pub fn induction_character(
    c: &MultiIndex,
    chi_w: &ClassFunction,
    n: &MultiIndex,
) -> Result<ClassFunction> {
    if chi_w.level() != c {
        return Err(Error::LevelMismatch(chi_w.level().clone(), c.clone()));
    }
    if !c.le(n) {
        return Ok(ClassFunction::zero(n));
    }
    Ok(ClassFunction::from_fn(n, |class| {
        let choices: Vec<Vec<Partition>> = class
            .parts()
            .iter()
            .zip(c.entries())
            .map(|(parts, &size)| cycle_subsets(parts, size))
            .collect();
        choices
            .into_iter()
            .multi_cartesian_product()
            .chain(if n.m() == 0 { Some(Vec::new()) } else { None })
            .map(|restricted| {
                chi_w
                    .value(&ConjClass::new(restricted))
                    .cloned()
                    .expect("restricted class lives at level c")
            })
            .fold(Rational::zero(), |acc, v| acc + v)
    }))
}

/// Cycle types of all unions of cycles (chosen by position) with total `size`.
fn cycle_subsets(parts: &[usize], size: usize) -> Vec<Partition> {
    (0..parts.len())
        .powerset()
        .filter(|idx| idx.iter().map(|&i| parts[i]).sum::<usize>() == size)
        .map(|idx| idx.into_iter().map(|i| parts[i]).collect())
        .collect()
}

/// `χ^λ(μ)` by the Murnaghan–Nakayama rule on beta-sets.
pub fn mn_character(lambda: &[usize], mu: &[usize]) -> i64 {
    fn beta_set(lambda: &[usize]) -> Vec<usize> {
        let len = lambda.len();
        lambda.iter().enumerate().map(|(i, &p)| p + len - 1 - i).collect()
    }
    fn go(beta: &mut Vec<usize>, mu: &[usize]) -> i64 {
        let Some((&k, rest)) = mu.split_first() else {
            return 1;
        };
        let mut total = 0;
        for idx in 0..beta.len() {
            let b = beta[idx];
            if b < k || beta.contains(&(b - k)) {
                continue;
            }
            let between = beta.iter().filter(|&&x| x > b - k && x < b).count();
            beta[idx] = b - k;
            let sign = if between % 2 == 0 { 1 } else { -1 };
            total += sign * go(beta, rest);
            beta[idx] = b;
        }
        total
    }
    if lambda.iter().sum::<usize>() != mu.iter().sum::<usize>() {
        return 0;
    }
    go(&mut beta_set(lambda), mu)
}

/// The irreducible character `χ^{λ̄}` of `S_n`, a product over the factors.
pub fn irreducible_character(lambdas: &[Partition]) -> ClassFunction {
    let level = MultiIndex::new(lambdas.iter().map(|l| l.iter().sum()).collect());
    ClassFunction::from_fn(&level, |c| {
        rat(lambdas
            .iter()
            .zip(c.parts())
            .map(|(l, mu)| mn_character(l, mu))
            .product())
    })
}

/// Largest level entry accepted by [`irreducible_multiplicities`].
pub const MULTIPLICITY_GUARD: usize = 8;

/// `⟨χ, χ^{λ̄}⟩` for every irreducible of `S_level`.
pub fn irreducible_multiplicities(chi: &ClassFunction) -> Result<BTreeMap<Vec<Partition>, Rational>> {
    if chi.level().entries().iter().any(|&n| n > MULTIPLICITY_GUARD) {
        return Err(Error::CostGuard(chi.level().clone(), MULTIPLICITY_GUARD));
    }
    chi.classes()
        .iter()
        .map(|c| {
            let lambdas = c.parts().to_vec();
            let m = inner_product(chi, &irreducible_character(&lambdas))?;
            Ok((lambdas, m))
        })
        .collect()
}

/// Outcome of comparing a sampled sequence against a predicted onset of stability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    /// Smallest sampled level from which every larger sample agrees.
    pub onset: Option<MultiIndex>,
    pub stable_value: Option<Rational>,
    pub predicted_onset: MultiIndex,
    /// Whether all samples at or beyond the predicted onset agree.
    pub prediction_holds: bool,
}

pub fn stability_report(
    values: &BTreeMap<MultiIndex, Rational>,
    predicted_onset: &MultiIndex,
) -> StabilityReport {
    let mut candidates: Vec<&MultiIndex> = values.keys().collect();
    candidates.sort_by_key(|l| (l.total(), (*l).clone()));
    let onset = candidates
        .into_iter()
        .find(|o| {
            values
                .iter()
                .filter(|(l, _)| o.le(l))
                .all(|(_, v)| v == &values[*o])
        })
        .cloned();
    let predicted: Vec<&Rational> = values
        .iter()
        .filter(|(l, _)| predicted_onset.le(l))
        .map(|(_, v)| v)
        .collect();
    StabilityReport {
        stable_value: onset.as_ref().map(|o| values[o].clone()),
        onset,
        predicted_onset: predicted_onset.clone(),
        prediction_holds: predicted.windows(2).all(|w| w[0] == w[1]),
    }
}

/// A primitive class contributing to `H^i`, with the character of `G_c`
/// that generates its summand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeGenerator {
    pub class: PrimitiveClass,
    pub local_betti: usize,
    pub character: ClassFunction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelComparison {
    pub level: MultiIndex,
    pub predicted: ClassFunction,
    pub actual: ClassFunction,
}

impl LevelComparison {
    pub fn matches(&self) -> bool {
        self.predicted == self.actual
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreenessReport {
    pub degree: usize,
    pub degree_bound: MultiIndex,
    pub generators: Vec<FreeGenerator>,
    pub levels: Vec<LevelComparison>,
}

impl FreenessReport {
    pub fn degrees_within_bound(&self) -> bool {
        self.generators
            .iter()
            .all(|g| g.class.degree.le(&self.degree_bound))
    }

    pub fn passed(&self) -> bool {
        self.degrees_within_bound() && self.levels.iter().all(LevelComparison::matches)
    }
}

/// Character of `Stab(z)` on the local homology of `z`, induced up to `G_c`.
fn generating_character(
    spec: &ArrangementSpec,
    class: &PrimitiveClass,
    i: usize,
) -> Result<Option<(usize, ClassFunction)>> {
    let c = &class.degree;
    let lat = build_lattice(spec, c, i)?;
    let z = lat
        .position(&class.subspace)
        .ok_or_else(|| Error::NotInLattice(class.subspace.serialize()))?;
    let d = local_degree(class.codim(), i);
    let (poset, members) = lat.lower_interval(z);
    let complex = order_complex(&poset);
    let betti = crate::homology::reduced_betti(&complex, d);
    if betti == 0 {
        return Ok(None);
    }
    let r = spec.r();
    let group = enumerate_group(c);
    let stabilizer: Vec<_> = par::try_map(&group, |h| -> Result<Option<_>> {
        let moved = class.subspace.preimage(&act_on_vector(&h.inverse(), r))?;
        Ok((moved == class.subspace).then(|| h.clone()))
    })?
    .into_iter()
    .flatten()
    .collect();
    let local: HashMap<usize, usize> = members.iter().enumerate().map(|(l, &g)| (g, l)).collect();
    // Σ_{h ∈ Stab ∩ C} χ(h), per class of G_c
    let mut class_sums: HashMap<Vec<Partition>, Rational> = HashMap::new();
    let traces = par::try_map(&stabilizer, |h| -> Result<(Vec<Partition>, Rational)> {
        let perm = lat.act(h)?;
        let vperm: Vec<usize> = members.iter().map(|g| local[&perm[*g]]).collect();
        Ok((h.cycle_type().parts().to_vec(), trace_on_homology(&complex, &vperm, d)))
    })?;
    for (parts, t) in traces {
        *class_sums.entry(parts).or_insert_with(Rational::zero) += t;
    }
    // Ind(g) = |G| / (|H| |C|) Σ_{h ∈ H ∩ C} χ(h)
    let g_order = big(group_order(c));
    let h_order = big(stabilizer.len() as u128);
    let induced = ClassFunction::from_fn(c, |cl| {
        class_sums.get(cl.parts()).map_or_else(Rational::zero, |s| {
            &g_order * s / (&h_order * big(cl.size()))
        })
    });
    Ok(Some((betti, induced)))
}

/// Checks that `H^i` is the free module `⊕_z Ind_{c_z}(W_z)` over the
/// primitive classes `z`, level by level, and that every generator degree
/// is at most `i × (max generator degree)`.
pub fn verify_free_decomposition(
    spec: &ArrangementSpec,
    i: usize,
    levels: &[MultiIndex],
) -> Result<FreenessReport> {
    if i == 0 {
        return Err(Error::Precondition("freeness is checked for i >= 1".into()));
    }
    let classes = primitive_classes(spec, i)?;
    let mut generators = Vec::new();
    for class in classes {
        if !(i.div_ceil(2) <= class.codim() && class.codim() <= i) {
            continue;
        }
        if let Some((local_betti, character)) = generating_character(spec, &class, i)? {
            generators.push(FreeGenerator {
                class,
                local_betti,
                character,
            });
        }
    }
    let mut comparisons = Vec::new();
    for n in levels {
        let mut predicted = ClassFunction::zero(n);
        for g in &generators {
            predicted = predicted.add(&induction_character(&g.class.degree, &g.character, n)?)?;
        }
        let actual = character_of_cohomology(spec, n, i)?;
        comparisons.push(LevelComparison {
            level: n.clone(),
            predicted,
            actual,
        });
    }
    Ok(FreenessReport {
        degree: i,
        degree_bound: degree_times(i, &spec.max_degree()),
        generators,
        levels: comparisons,
    })
}
