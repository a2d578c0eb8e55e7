//! Poset homology over the rationals and the cohomology of arrangement
//! complements assembled from it.
//!
//! For an arrangement with intersection poset `L` (ranked by complex
//! codimension `cd`), the complement satisfies
//!
//! ```text
//! H^i(M) ≅ ⊕_{x ∈ L} H̃_{2cd(x) − i − 2}(Δ(L^{<x}))
//! ```
//!
//! and only `⌈i/2⌉ <= cd(x) <= i` can contribute. The isomorphism is natural
//! in poset automorphisms, which is how the `S_n` characters are computed.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::arrangement::IntersectionLattice;
use crate::error::{Error, Result};
use crate::exactlin::{free_columns, kernel_from_rref, Rational, RationalMatrix};
use crate::fim::{ConjClass, MultiIndex, PermTuple};
use crate::par;

/// A finite poset with a rank function that strictly increases along the
/// order. Elements are `0..len`, sorted by rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedPoset {
    ranks: Vec<usize>,
    /// `below[j]`: all `i` with `i < j`, ascending.
    below: Vec<Vec<usize>>,
    above: Vec<Vec<usize>>,
}

impl RankedPoset {
    /// `below[j]` lists the elements strictly below `j`; the relation must be
    /// transitive and `ranks` must be nondecreasing in the element index.
    pub fn new(ranks: Vec<usize>, below: Vec<Vec<usize>>) -> Self {
        assert_eq!(ranks.len(), below.len());
        let mut above = vec![Vec::new(); ranks.len()];
        let mut below = below;
        for (j, b) in below.iter_mut().enumerate() {
            b.sort_unstable();
            for &i in b.iter() {
                assert!(ranks[i] < ranks[j], "rank must strictly increase along the order");
                above[i].push(j);
            }
        }
        Self {
            ranks,
            below,
            above,
        }
    }

    /// Builds a poset from a strict order predicate.
    pub fn from_relation(ranks: Vec<usize>, lt: impl Fn(usize, usize) -> bool) -> Self {
        let n = ranks.len();
        let below = (0..n).map(|j| (0..n).filter(|&i| lt(i, j)).collect()).collect();
        Self::new(ranks, below)
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn rank(&self, i: usize) -> usize {
        self.ranks[i]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.below[b].binary_search(&a).is_ok()
    }

    pub fn is_antichain(&self) -> bool {
        self.below.iter().all(Vec::is_empty)
    }

    /// The subposet of elements strictly below `x`.
    pub fn lower_interval(&self, x: usize) -> RankedPoset {
        let members = &self.below[x];
        let local: HashMap<usize, usize> =
            members.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        RankedPoset::new(
            members.iter().map(|&g| self.ranks[g]).collect(),
            members
                .iter()
                .map(|&g| self.below[g].iter().filter_map(|h| local.get(h).copied()).collect())
                .collect(),
        )
    }
}

/// The simplicial complex of strict chains of a poset, with the empty chain
/// included so that the chain complex comes out augmented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderComplex {
    vertices: usize,
    /// `chains[k]`: chains with `k` elements, each increasing, lexicographic.
    chains: Vec<Vec<Vec<usize>>>,
}

pub fn order_complex(p: &RankedPoset) -> OrderComplex {
    fn extend(p: &RankedPoset, chain: &mut Vec<usize>, chains: &mut Vec<Vec<Vec<usize>>>) {
        let k = chain.len();
        if chains.len() <= k {
            chains.push(Vec::new());
        }
        chains[k].push(chain.clone());
        let last = *chain.last().expect("nonempty chain");
        for &next in &p.above[last] {
            chain.push(next);
            extend(p, chain, chains);
            chain.pop();
        }
    }
    let mut chains = vec![vec![Vec::new()]];
    for v in 0..p.len() {
        extend(p, &mut vec![v], &mut chains);
    }
    for level in chains.iter_mut() {
        level.sort();
    }
    OrderComplex {
        vertices: p.len(),
        chains,
    }
}

impl OrderComplex {
    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    /// Simplicial dimension: `-1` for the empty complex.
    pub fn dim(&self) -> isize {
        self.chains.len() as isize - 2
    }

    /// Simplices of dimension `d`; `d = -1` is the empty simplex.
    pub fn simplices(&self, d: isize) -> &[Vec<usize>] {
        if d < -1 {
            return &[];
        }
        self.chains.get((d + 1) as usize).map_or(&[], Vec::as_slice)
    }

    pub fn simplex_count(&self, d: isize) -> usize {
        self.simplices(d).len()
    }

    pub fn chain_complex(&self) -> ChainComplex {
        let index: Vec<HashMap<&[usize], usize>> = self
            .chains
            .iter()
            .map(|lvl| lvl.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect())
            .collect();
        let mut boundaries = vec![RationalMatrix::zeros(0, 1)];
        for k in 1..self.chains.len() {
            let mut m = RationalMatrix::zeros(self.chains[k - 1].len(), self.chains[k].len());
            for (col, chain) in self.chains[k].iter().enumerate() {
                for drop in 0..chain.len() {
                    let face: Vec<usize> = chain
                        .iter()
                        .enumerate()
                        .filter(|&(pos, _)| pos != drop)
                        .map(|(_, &v)| v)
                        .collect();
                    let row = index[k - 1][face.as_slice()];
                    m[(row, col)] = if drop % 2 == 0 {
                        Rational::one()
                    } else {
                        -Rational::one()
                    };
                }
            }
            boundaries.push(m);
        }
        ChainComplex { boundaries }
    }
}

/// The augmented chain complex of an order complex: `boundaries[k]` maps
/// chains with `k` elements to chains with `k - 1` elements (`boundaries[0]`
/// is the zero map out of the empty chain).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    boundaries: Vec<RationalMatrix>,
}

impl ChainComplex {
    /// `∂_d: C_d -> C_{d-1}` in simplicial degrees; zero outside the complex.
    pub fn boundary(&self, d: isize) -> Option<&RationalMatrix> {
        if d < -1 {
            return None;
        }
        self.boundaries.get((d + 1) as usize)
    }

    pub fn rank(&self, d: isize) -> usize {
        self.boundary(d).map_or(0, RationalMatrix::rank)
    }

    pub fn chain_dim(&self, d: isize) -> usize {
        self.boundary(d).map_or(0, RationalMatrix::cols)
    }

    /// Whether `∂_{d-1} ∘ ∂_d = 0` for every `d`.
    pub fn is_complex(&self) -> bool {
        self.boundaries
            .windows(2)
            .all(|w| w[0].mul(&w[1]).is_ok_and(|m| m.is_zero()))
    }

    /// Basis of the harmonic chains `ker ∂_d ∩ ker ∂_{d+1}^T`, a complement
    /// of the boundaries inside the cycles, with the free column of each
    /// basis vector.
    fn harmonic_basis(&self, d: isize) -> (Vec<Vec<Rational>>, Vec<usize>) {
        let n = self.chain_dim(d);
        if n == 0 {
            return (Vec::new(), Vec::new());
        }
        let own = self.boundary(d).expect("nonempty degree");
        let stacked = match self.boundary(d + 1) {
            Some(up) => own.vstack(&up.transpose()).expect("matching chain dimension"),
            None => own.clone(),
        };
        let (r, pivots) = stacked.rref_with_pivots();
        let free = free_columns(n, &pivots);
        (kernel_from_rref(&r, &pivots), free)
    }
}

/// `dim H̃_d(c; Q)`. The empty complex has `H̃_{-1} = Q`.
pub fn reduced_betti(c: &OrderComplex, d: isize) -> usize {
    reduced_betti_of(&c.chain_complex(), d)
}

pub fn reduced_betti_of(cc: &ChainComplex, d: isize) -> usize {
    if d < -1 {
        return 0;
    }
    cc.chain_dim(d) - cc.rank(d) - cc.rank(d + 1)
}

/// Trace of a vertex permutation (an order automorphism of the underlying
/// poset) on `H̃_d`. Chains map to chains with their order intact, so the
/// chain map is a plain permutation.
pub fn trace_on_homology(c: &OrderComplex, vertex_perm: &[usize], d: isize) -> Rational {
    let cc = c.chain_complex();
    trace_with(c, &cc, vertex_perm, d)
}

fn trace_with(c: &OrderComplex, cc: &ChainComplex, vertex_perm: &[usize], d: isize) -> Rational {
    let (basis, free) = cc.harmonic_basis(d);
    if basis.is_empty() {
        return Rational::zero();
    }
    let chains = c.simplices(d);
    let index: HashMap<&[usize], usize> = chains
        .iter()
        .enumerate()
        .map(|(i, ch)| (ch.as_slice(), i))
        .collect();
    // preimage[σ(c)] = c
    let mut preimage = vec![0; chains.len()];
    for (i, ch) in chains.iter().enumerate() {
        let img: Vec<usize> = ch.iter().map(|&v| vertex_perm[v]).collect();
        preimage[index[img.as_slice()]] = i;
    }
    // coordinates in the harmonic basis are read off the free columns
    basis
        .iter()
        .zip(&free)
        .fold(Rational::zero(), |acc, (h, &f)| acc + &h[preimage[f]])
}

/// `WH_n = ⊕_{rank x = n} H̃_{n-2}(P^{<x})`, dimensions per rank.
pub fn whitney_homology_dims(p: &RankedPoset) -> BTreeMap<usize, usize> {
    let dims = par::map_range(p.len(), |x| {
        let rank = p.rank(x);
        (rank, reduced_betti(&order_complex(&p.lower_interval(x)), rank as isize - 2))
    });
    let mut out = BTreeMap::new();
    for (rank, b) in dims {
        *out.entry(rank).or_insert(0) += b;
    }
    out
}

/// One lattice element's share of `H^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contribution {
    pub element: usize,
    pub codim: usize,
    pub local_degree: isize,
    pub local_betti: usize,
}

/// `H^i` of the complement at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GMReport {
    pub level: MultiIndex,
    pub degree: usize,
    pub total: usize,
    /// Nonzero contributions, in lattice order.
    pub contributions: Vec<Contribution>,
    pub characters: Option<Vec<(ConjClass, Rational)>>,
}

/// The homological degree an element of codimension `cd` contributes in.
pub fn local_degree(cd: usize, i: usize) -> isize {
    2 * cd as isize - i as isize - 2
}

fn in_range(cd: usize, i: usize) -> bool {
    i.div_ceil(2) <= cd && cd <= i
}

fn check_degree(lat: &IntersectionLattice, i: usize) -> Result<()> {
    if i == 0 {
        return Err(Error::Precondition(
            "degree 0 is the trivial representation and is not assembled from the lattice".into(),
        ));
    }
    if lat.max_codim() < i {
        return Err(Error::Truncated {
            level: lat.level().clone(),
            max_codim: lat.max_codim(),
            degree: i,
        });
    }
    Ok(())
}

fn assemble(lat: &IntersectionLattice, i: usize, filter: bool) -> GMReport {
    let candidates: Vec<usize> = (0..lat.len())
        .filter(|&x| !filter || in_range(lat.codim(x), i))
        .collect();
    let contributions: Vec<Contribution> = par::map(&candidates, |&x| {
        let cd = lat.codim(x);
        let d = local_degree(cd, i);
        let b = if d < -1 {
            0
        } else {
            reduced_betti(&order_complex(&lat.lower_interval(x).0), d)
        };
        Contribution {
            element: x,
            codim: cd,
            local_degree: d,
            local_betti: b,
        }
    })
    .into_iter()
    .filter(|c| c.local_betti > 0)
    .collect();
    GMReport {
        level: lat.level().clone(),
        degree: i,
        total: contributions.iter().map(|c| c.local_betti).sum(),
        contributions,
        characters: None,
    }
}

/// `dim H^i(M; Q)` with per-element contributions, for `i >= 1`.
pub fn gm_betti(lat: &IntersectionLattice, i: usize) -> Result<GMReport> {
    check_degree(lat, i)?;
    Ok(assemble(lat, i, true))
}

/// Same sum over every element, ignoring the codimension window. Only
/// meaningful on untruncated lattices.
pub fn gm_betti_unfiltered(lat: &IntersectionLattice, i: usize) -> Result<GMReport> {
    check_degree(lat, i)?;
    Ok(assemble(lat, i, false))
}

/// Local homology data for every element that can contribute to `H^i`,
/// prepared once so that traces of many group elements are cheap.
pub struct LocalCohomology<'a> {
    lat: &'a IntersectionLattice,
    degree: usize,
    /// (element, lower-interval members, order complex, chain complex)
    pieces: Vec<(usize, Vec<usize>, OrderComplex, ChainComplex)>,
}

impl<'a> LocalCohomology<'a> {
    pub fn new(lat: &'a IntersectionLattice, i: usize) -> Result<Self> {
        check_degree(lat, i)?;
        let candidates: Vec<usize> = (0..lat.len())
            .filter(|&x| in_range(lat.codim(x), i))
            .collect();
        let pieces = par::map(&candidates, |&x| {
            let (p, members) = lat.lower_interval(x);
            let oc = order_complex(&p);
            let cc = oc.chain_complex();
            (x, members, oc, cc)
        })
        .into_iter()
        .filter(|(x, _, _, cc)| reduced_betti_of(cc, local_degree(lat.codim(*x), i)) > 0)
        .collect();
        Ok(Self {
            lat,
            degree: i,
            pieces,
        })
    }

    /// Trace of a lattice permutation (as returned by `act`) on `H^i`, summed
    /// over the fixed elements.
    pub fn trace_of_permutation(&self, perm: &[usize]) -> Rational {
        self.trace_restricted(perm, |_| true)
    }

    /// As [`Self::trace_of_permutation`], restricted to elements accepted by `keep`.
    pub fn trace_restricted(&self, perm: &[usize], keep: impl Fn(usize) -> bool) -> Rational {
        let mut total = Rational::zero();
        for (x, members, oc, cc) in &self.pieces {
            if perm[*x] != *x || !keep(*x) {
                continue;
            }
            let local: HashMap<usize, usize> =
                members.iter().enumerate().map(|(l, &g)| (g, l)).collect();
            let vperm: Vec<usize> = members.iter().map(|&g| local[&perm[g]]).collect();
            total += trace_with(oc, cc, &vperm, local_degree(self.lat.codim(*x), self.degree));
        }
        total
    }

    pub fn trace(&self, g: &PermTuple) -> Result<Rational> {
        Ok(self.trace_of_permutation(&self.lat.act(g)?))
    }

    /// Elements with nonzero local homology in the relevant degree.
    pub fn contributing_elements(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.0).collect()
    }
}

/// Character value of `g` on `H^i(M; Q)`.
pub fn equivariant_trace(lat: &IntersectionLattice, g: &PermTuple, i: usize) -> Result<Rational> {
    LocalCohomology::new(lat, i)?.trace(g)
}
