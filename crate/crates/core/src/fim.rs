//! The indexing category FI^m.
//!
//! Objects are multi-indices `(n_1, …, n_m)`, morphisms are tuples of
//! injections, and automorphism groups are products of symmetric groups.
//! Everything is 0-based internally; the textual forms are 1-based.
//!
//! The point space `V^n` with `V = Q^r` is laid out block-major: factor
//! `j`, then point index within the factor, then vector component.

use std::fmt;

use itertools::Itertools;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exactlin::{LinearMap, Rational, RationalMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        Self(entries)
    }

    pub fn zero(m: usize) -> Self {
        Self(vec![0; m])
    }

    pub fn ones(m: usize) -> Self {
        Self(vec![1; m])
    }

    /// `(k, …, k)` with `m` entries.
    pub fn constant(m: usize, k: usize) -> Self {
        Self(vec![k; m])
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    fn check_len(&self, other: &MultiIndex) -> Result<()> {
        if self.m() != other.m() {
            return Err(Error::LengthMismatch(self.m(), other.m()));
        }
        Ok(())
    }

    /// Componentwise `self <= other`. Indices of different length are incomparable.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.m() == other.m() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn lt(&self, other: &MultiIndex) -> bool {
        self.le(other) && self != other
    }

    pub fn max(&self, other: &MultiIndex) -> Result<MultiIndex> {
        self.check_len(other)?;
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect(),
        ))
    }

    /// Every multi-index `d` with `self <= d <= upper`, in lexicographic order.
    pub fn box_to(&self, upper: &MultiIndex) -> Vec<MultiIndex> {
        if !self.le(upper) {
            return Vec::new();
        }
        per_factor_product(
            self.0
                .iter()
                .zip(&upper.0)
                .map(|(&a, &b)| (a..=b).collect())
                .collect(),
        )
        .into_iter()
        .map(MultiIndex)
        .collect()
    }

    /// Offset of the first coordinate of factor `j` in `V^self`, counted in points.
    pub fn factor_offset(&self, j: usize) -> usize {
        self.0[..j].iter().sum()
    }

    /// Textual form `n1|n2|…`.
    pub fn render(&self) -> String {
        self.0.iter().join("|")
    }

    pub fn parse(s: &str) -> Result<MultiIndex> {
        s.split('|')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad multi-index {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

pub fn degree_add(c: &MultiIndex, d: &MultiIndex) -> Result<MultiIndex> {
    c.check_len(d)?;
    Ok(MultiIndex(c.0.iter().zip(&d.0).map(|(a, b)| a + b).collect()))
}

/// `i × c`; in FI^m this is coordinatewise scaling.
pub fn degree_times(i: usize, c: &MultiIndex) -> MultiIndex {
    MultiIndex(c.0.iter().map(|a| i * a).collect())
}

/// A morphism `source -> target` of FI^m.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Injection {
    target: MultiIndex,
    /// `images[j][i]` is the image of point `i` of factor `j`.
    images: Vec<Vec<usize>>,
}

impl Injection {
    pub fn new(target: MultiIndex, images: Vec<Vec<usize>>) -> Result<Self> {
        if images.len() != target.m() {
            return Err(Error::LengthMismatch(images.len(), target.m()));
        }
        for (img, &d) in images.iter().zip(target.entries()) {
            if img.iter().any(|&x| x >= d) || img.iter().duplicates().next().is_some() {
                return Err(Error::Precondition(format!(
                    "{img:?} is not an injection into {d} points"
                )));
            }
        }
        Ok(Self { target, images })
    }

    pub fn identity(n: &MultiIndex) -> Self {
        Self {
            target: n.clone(),
            images: n.entries().iter().map(|&k| (0..k).collect()).collect(),
        }
    }

    pub fn source(&self) -> MultiIndex {
        MultiIndex(self.images.iter().map(Vec::len).collect())
    }

    pub fn target(&self) -> &MultiIndex {
        &self.target
    }

    pub fn images(&self) -> &[Vec<usize>] {
        &self.images
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Injection) -> Result<Injection> {
        if inner.target != self.source() {
            return Err(Error::Shape {
                expected: format!("inner map into {}", self.source()),
                found: format!("inner map into {}", inner.target),
            });
        }
        Ok(Injection {
            target: self.target.clone(),
            images: inner
                .images
                .iter()
                .zip(&self.images)
                .map(|(a, b)| a.iter().map(|&x| b[x]).collect())
                .collect(),
        })
    }

    /// 1-based text form, e.g. `1,3|2`.
    pub fn render(&self) -> String {
        self.images
            .iter()
            .map(|img| img.iter().map(|x| x + 1).join(","))
            .join("|")
    }

    pub fn parse(target: &MultiIndex, s: &str) -> Result<Injection> {
        let images = s
            .split('|')
            .map(|part| {
                if part.trim().is_empty() {
                    return Ok(Vec::new());
                }
                part.split(',')
                    .map(|x| match x.trim().parse::<usize>() {
                        Ok(v) if v >= 1 => Ok(v - 1),
                        _ => Err(Error::Parse(format!("bad injection {s:?}"))),
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()?;
        Injection::new(target.clone(), images)
    }
}

fn per_factor_product<T: Clone>(factors: Vec<Vec<T>>) -> Vec<Vec<T>> {
    if factors.is_empty() {
        return vec![Vec::new()];
    }
    factors.into_iter().multi_cartesian_product().collect()
}

/// All injections `c -> d`, ordered lexicographically by component images.
pub fn enumerate_injections(c: &MultiIndex, d: &MultiIndex) -> Vec<Injection> {
    if c.m() != d.m() || !c.le(d) {
        return Vec::new();
    }
    let factors: Vec<Vec<Vec<usize>>> = c
        .entries()
        .iter()
        .zip(d.entries())
        .map(|(&a, &b)| (0..b).permutations(a).collect())
        .collect();
    per_factor_product(factors)
        .into_iter()
        .map(|images| Injection {
            target: d.clone(),
            images,
        })
        .collect()
}

/// One order-preserving injection per element of the binomial set `(d choose c)`.
pub fn binomial_representatives(c: &MultiIndex, d: &MultiIndex) -> Vec<Injection> {
    if c.m() != d.m() || !c.le(d) {
        return Vec::new();
    }
    let factors: Vec<Vec<Vec<usize>>> = c
        .entries()
        .iter()
        .zip(d.entries())
        .map(|(&a, &b)| (0..b).combinations(a).collect())
        .collect();
    per_factor_product(factors)
        .into_iter()
        .map(|images| Injection {
            target: d.clone(),
            images,
        })
        .collect()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// `|Hom(c, d) / G_c| = ∏_j C(d_j, c_j)`.
pub fn binomial_set_size(c: &MultiIndex, d: &MultiIndex) -> u128 {
    if c.m() != d.m() {
        return 0;
    }
    c.entries()
        .iter()
        .zip(d.entries())
        .map(|(&a, &b)| binomial(b, a))
        .product()
}

/// `|S_n| = ∏_j n_j!`.
pub fn group_order(n: &MultiIndex) -> u128 {
    n.entries().iter().map(|&k| factorial(k)).product()
}

/// The restriction map `V(f): V^d -> V^c`, i.e. precomposition with `f`.
pub fn induced_linear_map(f: &Injection, r: usize) -> LinearMap {
    let source = f.source();
    let target = f.target();
    let mut mat = RationalMatrix::zeros(r * source.total(), r * target.total());
    for (j, img) in f.images.iter().enumerate() {
        let row_base = source.factor_offset(j);
        let col_base = target.factor_offset(j);
        for (i, &fi) in img.iter().enumerate() {
            for t in 0..r {
                mat[(r * (row_base + i) + t, r * (col_base + fi) + t)] = Rational::one();
            }
        }
    }
    LinearMap::new(mat)
}

/// An element of `S_n = S_{n_1} × … × S_{n_m}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermTuple(Vec<Vec<usize>>);

impl PermTuple {
    pub fn new(components: Vec<Vec<usize>>) -> Result<Self> {
        for c in &components {
            let mut seen = vec![false; c.len()];
            for &x in c {
                if x >= c.len() || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::Precondition(format!("{c:?} is not a permutation")));
                }
            }
        }
        Ok(Self(components))
    }

    pub fn identity(n: &MultiIndex) -> Self {
        Self(n.entries().iter().map(|&k| (0..k).collect()).collect())
    }

    /// Builds a permutation of `0..n` from 1-based cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for cyc in cycles {
            for (a, b) in cyc.iter().zip(cyc.iter().cycle().skip(1)) {
                p[a - 1] = b - 1;
            }
        }
        p
    }

    pub fn level(&self) -> MultiIndex {
        MultiIndex(self.0.iter().map(Vec::len).collect())
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.0
    }

    /// `(self · other)(x) = self(other(x))`.
    pub fn compose(&self, other: &PermTuple) -> PermTuple {
        PermTuple(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(g, h)| h.iter().map(|&x| g[x]).collect())
                .collect(),
        )
    }

    pub fn inverse(&self) -> PermTuple {
        PermTuple(
            self.0
                .iter()
                .map(|g| {
                    let mut inv = vec![0; g.len()];
                    for (i, &gi) in g.iter().enumerate() {
                        inv[gi] = i;
                    }
                    inv
                })
                .collect(),
        )
    }

    /// Cycle type of each component.
    pub fn cycle_type(&self) -> ConjClass {
        ConjClass::new(self.0.iter().map(|g| cycle_lengths(g)).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|g| g.iter().enumerate().all(|(i, &x)| i == x))
    }

    /// The same permutation viewed as an injection `n -> n`.
    pub fn as_injection(&self) -> Injection {
        Injection {
            target: self.level(),
            images: self.0.clone(),
        }
    }
}

fn cycle_lengths(g: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; g.len()];
    let mut lengths = Vec::new();
    for start in 0..g.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = g[x];
            len += 1;
        }
        lengths.push(len);
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    lengths
}

/// Every element of `S_n`, in lexicographic order.
pub fn enumerate_group(n: &MultiIndex) -> Vec<PermTuple> {
    enumerate_injections(n, n)
        .into_iter()
        .map(|f| PermTuple(f.images))
        .collect()
}

/// Adjacent transpositions of every factor; together they generate `S_n`.
pub fn coxeter_generators(n: &MultiIndex) -> Vec<PermTuple> {
    let mut gens = Vec::new();
    for (j, &k) in n.entries().iter().enumerate() {
        for i in 0..k.saturating_sub(1) {
            let mut g = PermTuple::identity(n);
            g.0[j].swap(i, i + 1);
            gens.push(g);
        }
    }
    gens
}

/// Permutation matrix of `g` on `V^n`: the point in slot `i` moves to slot `g(i)`.
pub fn act_on_vector(g: &PermTuple, r: usize) -> LinearMap {
    let n = g.level();
    let dim = r * n.total();
    let mut mat = RationalMatrix::zeros(dim, dim);
    for (j, comp) in g.0.iter().enumerate() {
        let base = n.factor_offset(j);
        for (i, &gi) in comp.iter().enumerate() {
            for t in 0..r {
                mat[(r * (base + gi) + t, r * (base + i) + t)] = Rational::one();
            }
        }
    }
    LinearMap::new(mat)
}

/// A weakly decreasing sequence of positive parts.
pub type Partition = Vec<usize>;

/// All partitions of `n`, in increasing lexicographic order
/// (so `1^n` comes first and `(n)` last).
pub fn partitions(n: usize) -> Vec<Partition> {
    fn go(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in 1..=max.min(n) {
            prefix.push(part);
            go(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// `z_λ = ∏_k k^{m_k} m_k!`, the order of the centralizer of cycle type `λ`.
pub fn centralizer_order(lambda: &[usize]) -> u128 {
    lambda
        .iter()
        .counts()
        .into_iter()
        .map(|(&k, mult)| (k as u128).pow(mult as u32) * factorial(mult))
        .product()
}

/// A conjugacy class of `S_n`: one cycle type per factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjClass {
    parts: Vec<Partition>,
    size: u128,
}

impl ConjClass {
    pub fn new(parts: Vec<Partition>) -> Self {
        let size = parts
            .iter()
            .map(|p| factorial(p.iter().sum()) / centralizer_order(p))
            .product();
        Self { parts, size }
    }

    pub fn parts(&self) -> &[Partition] {
        &self.parts
    }

    pub fn size(&self) -> u128 {
        self.size
    }

    pub fn level(&self) -> MultiIndex {
        MultiIndex(self.parts.iter().map(|p| p.iter().sum()).collect())
    }

    /// Number of `k`-cycles in factor `j` (both 1-based as in `X_k^{(j)}`).
    pub fn cycle_count(&self, j: usize, k: usize) -> usize {
        self.parts
            .get(j - 1)
            .map_or(0, |p| p.iter().filter(|&&x| x == k).count())
    }

    /// Textual form: parts joined by `+`, factors by `|`; the empty partition is `0`.
    pub fn render(&self) -> String {
        self.parts
            .iter()
            .map(|p| {
                if p.is_empty() {
                    "0".to_string()
                } else {
                    p.iter().join("+")
                }
            })
            .join("|")
    }
}

impl fmt::Display for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Conjugacy classes of `S_n`, lexicographic in the per-factor partition order.
pub fn conj_classes(n: &MultiIndex) -> Vec<ConjClass> {
    per_factor_product(n.entries().iter().map(|&k| partitions(k)).collect())
        .into_iter()
        .map(ConjClass::new)
        .collect()
}

/// Cycles of the given sizes laid out on consecutive blocks of points.
pub fn class_representative(c: &ConjClass) -> PermTuple {
    PermTuple(
        c.parts
            .iter()
            .map(|p| {
                let mut perm = Vec::with_capacity(p.iter().sum());
                let mut start = 0;
                for &len in p {
                    for i in 0..len {
                        perm.push(start + (i + 1) % len);
                    }
                    start += len;
                }
                perm
            })
            .collect(),
    )
}
