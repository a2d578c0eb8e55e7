//! FI^m-arrangements given by finitely many generating subspaces, and their
//! intersection lattices.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::exactlin::{rat, RationalMatrix, Subspace};
use crate::fim::{
    act_on_vector, binomial_representatives, coxeter_generators, degree_times,
    enumerate_injections, group_order, induced_linear_map, Injection, MultiIndex, PermTuple,
};
use crate::homology::RankedPoset;
use crate::par;

/// A generating subspace `x ⊂ V^degree`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub degree: MultiIndex,
    pub subspace: Subspace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrangementSpec {
    m: usize,
    r: usize,
    generators: Vec<Generator>,
}

impl ArrangementSpec {
    pub fn new(m: usize, r: usize, generators: Vec<Generator>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidSpec("point dimension r must be positive".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.degree.m() != m {
                return Err(Error::InvalidSpec(format!(
                    "generator {i} has degree {} but m = {m}",
                    g.degree
                )));
            }
            let expected = r * g.degree.total();
            if g.subspace.ambient_dim() != expected {
                return Err(Error::InvalidSpec(format!(
                    "generator {i} lives in Q^{} but degree {} with r = {r} needs Q^{expected}",
                    g.subspace.ambient_dim(),
                    g.degree
                )));
            }
            if g.subspace.codim() == 0 {
                return Err(Error::InvalidSpec(format!("generator {i} has codimension 0")));
            }
        }
        Ok(Self { m, r, generators })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Componentwise maximum of the generator degrees.
    pub fn max_degree(&self) -> MultiIndex {
        self.generators
            .iter()
            .fold(MultiIndex::zero(self.m), |acc, g| {
                MultiIndex::max(&acc, &g.degree).expect("validated lengths")
            })
    }

    /// Canonical text used for cache keys.
    pub fn serialize(&self) -> String {
        let mut s = format!("m={};r={}", self.m, self.r);
        for g in &self.generators {
            s.push_str(&format!(";{}@{}", g.degree.render(), g.subspace.serialize()));
        }
        s
    }
}

/// The arrangement `M_{m,k}(C^r)`: one generator at degree `(k, …, k)`, the
/// locus where all `mk` points coincide.
pub fn family_mkr(m: usize, k: usize, r: usize) -> Result<ArrangementSpec> {
    if m == 0 || k == 0 || r == 0 {
        return Err(Error::InvalidSpec(format!(
            "family mkr needs m, k, r >= 1 (got {m}, {k}, {r})"
        )));
    }
    let points = m * k;
    let dim = r * points;
    let mut rows = Vec::new();
    for p in 1..points {
        for t in 0..r {
            let mut row = vec![rat(0); dim];
            row[t] = rat(1);
            row[r * p + t] = rat(-1);
            rows.push(row);
        }
    }
    let diag = Subspace::from_constraints(dim, &RationalMatrix::from_rows(dim, rows)?)?;
    ArrangementSpec::new(
        m,
        r,
        vec![Generator {
            degree: MultiIndex::constant(m, k),
            subspace: diag,
        }],
    )
}

/// One witnessing preimage `L(f) x_generator`.
pub type Witness = (usize, Injection);

/// The intersection poset at one level, truncated at `max_codim`, ordered by
/// reverse inclusion and ranked by codimension. The ambient space itself is
/// not stored.
#[derive(Clone, Debug)]
pub struct IntersectionLattice {
    level: MultiIndex,
    r: usize,
    max_codim: usize,
    elements: Vec<Subspace>,
    index: HashMap<Subspace, usize>,
    /// `below[x]`: the elements strictly containing `x`, ascending.
    below: Vec<Vec<usize>>,
    provenance: Vec<Vec<Witness>>,
}

impl IntersectionLattice {
    /// Assembles a lattice from its elements, sorting them canonically and
    /// recomputing the order relation.
    pub fn from_parts(
        level: MultiIndex,
        r: usize,
        max_codim: usize,
        elements: Vec<(Subspace, Vec<Witness>)>,
    ) -> Result<Self> {
        let dim = r * level.total();
        let mut elements = elements;
        for (x, _) in &elements {
            if x.ambient_dim() != dim {
                return Err(Error::AmbientMismatch(x.ambient_dim(), dim));
            }
        }
        elements.sort_by_cached_key(|(x, _)| (x.codim(), x.serialize()));
        elements.dedup_by(|a, b| a.0 == b.0);
        let (elements, provenance): (Vec<_>, Vec<_>) = elements.into_iter().unzip();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, x)| (x.clone(), i))
            .collect();
        let below = par::map_range(elements.len(), |j| {
            let x: &Subspace = &elements[j];
            (0..j)
                .filter(|&i| {
                    elements[i].codim() < x.codim()
                        && elements[i].contains(x).expect("same ambient")
                })
                .collect()
        });
        Ok(Self {
            level,
            r,
            max_codim,
            elements,
            index,
            below,
            provenance,
        })
    }

    pub fn level(&self) -> &MultiIndex {
        &self.level
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn max_codim(&self) -> usize {
        self.max_codim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Subspace] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Subspace {
        &self.elements[i]
    }

    pub fn codim(&self, i: usize) -> usize {
        self.elements[i].codim()
    }

    pub fn position(&self, x: &Subspace) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn provenance(&self, i: usize) -> &[Witness] {
        &self.provenance[i]
    }

    /// Indices of the elements strictly containing element `i`.
    pub fn below(&self, i: usize) -> &[usize] {
        &self.below[i]
    }

    /// Strict order: `a < b` iff `a ⊋ b`.
    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.below[b].binary_search(&a).is_ok()
    }

    /// `L^{<x}` as a ranked poset, together with the global index of each of
    /// its elements.
    pub fn lower_interval(&self, i: usize) -> (RankedPoset, Vec<usize>) {
        let members = self.below[i].clone();
        let local: HashMap<usize, usize> =
            members.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let ranks = members.iter().map(|&g| self.codim(g)).collect();
        let lower = members
            .iter()
            .map(|&g| self.below[g].iter().filter_map(|h| local.get(h).copied()).collect())
            .collect();
        (RankedPoset::new(ranks, lower), members)
    }

    /// `L^{<x}` looked up by subspace.
    pub fn lower_interval_of(&self, x: &Subspace) -> Result<(RankedPoset, Vec<usize>)> {
        let i = self
            .position(x)
            .ok_or_else(|| Error::NotInLattice(x.serialize()))?;
        Ok(self.lower_interval(i))
    }

    /// The permutation of the elements induced by `g ∈ S_level`.
    pub fn act(&self, g: &PermTuple) -> Result<Vec<usize>> {
        if g.level() != self.level {
            return Err(Error::Shape {
                expected: format!("permutation at level {}", self.level),
                found: format!("permutation at level {}", g.level()),
            });
        }
        let inverse = act_on_vector(&g.inverse(), self.r);
        let images = par::map(&self.elements, |x| {
            x.preimage(&inverse).map(|y| self.position(&y))
        });
        images
            .into_iter()
            .enumerate()
            .map(|(i, img)| img?.ok_or(Error::CorruptAction(i)))
            .collect()
    }

    /// Whether the saturation invariant holds for every pair of elements.
    pub fn is_saturated(&self) -> bool {
        (0..self.len()).all(|a| {
            (a..self.len()).all(|b| {
                let y = self.elements[a]
                    .intersect(&self.elements[b])
                    .expect("same ambient");
                y.codim() > self.max_codim || self.position(&y).is_some()
            })
        })
    }
}

/// The intersection lattice at level `n`, truncated at `max_codim`.
///
/// Seeds are all preimages `L(f) x` of generators under injections into `n`;
/// the lattice is their closure under intersection. Every element is reached
/// by intersecting seeds one at a time, and codimension never drops along
/// the way, so pruning at `max_codim` loses nothing below the cut.
pub fn build_lattice(
    spec: &ArrangementSpec,
    n: &MultiIndex,
    max_codim: usize,
) -> Result<IntersectionLattice> {
    if max_codim == 0 {
        return Err(Error::Precondition("max_codim must be at least 1".into()));
    }
    if n.m() != spec.m {
        return Err(Error::LengthMismatch(n.m(), spec.m));
    }
    let r = spec.r;
    let mut seeds: Vec<(Subspace, Witness)> = Vec::new();
    let mut seen: HashSet<Subspace> = HashSet::new();
    for (gi, g) in spec.generators.iter().enumerate() {
        if g.subspace.codim() > max_codim {
            continue;
        }
        let injections = enumerate_injections(&g.degree, n);
        let pulled = par::try_map(&injections, |f| {
            g.subspace.preimage(&induced_linear_map(f, r))
        })?;
        for (y, f) in pulled.into_iter().zip(injections) {
            if seen.insert(y.clone()) {
                seeds.push((y, (gi, f)));
            }
        }
    }

    let mut found: HashMap<Subspace, Vec<Witness>> = seeds
        .iter()
        .map(|(y, w)| (y.clone(), vec![w.clone()]))
        .collect();
    let mut frontier: Vec<Subspace> = seeds.iter().map(|(y, _)| y.clone()).collect();
    while !frontier.is_empty() {
        let products = par::map(&frontier, |x| {
            seeds
                .iter()
                .filter_map(|(s, w)| {
                    let y = x.intersect(s).expect("same ambient");
                    (y.codim() <= max_codim && y != *x).then(|| (y, w.clone()))
                })
                .collect::<Vec<_>>()
        });
        let mut next = Vec::new();
        for (x, prods) in frontier.iter().zip(products) {
            for (y, w) in prods {
                if !found.contains_key(&y) {
                    let mut witness = found[x].clone();
                    witness.push(w);
                    found.insert(y.clone(), witness);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    IntersectionLattice::from_parts(n.clone(), r, max_codim, found.into_iter().collect())
}

/// The subspace `ker V(f)`.
pub fn kernel_subspace(f: &Injection, r: usize) -> Result<Subspace> {
    let v = induced_linear_map(f, r);
    Subspace::span(v.source_dim(), &v.kernel_basis())
}

/// Whether `x ⊂ V^degree` contains the kernel of no map induced from a
/// strictly smaller degree.
///
/// Every strictly smaller `c` factors through some `degree - e_j`, whose
/// kernels are the smallest candidates, so only those maps are tested.
pub fn is_primitive(spec: &ArrangementSpec, degree: &MultiIndex, x: &Subspace) -> Result<bool> {
    let r = spec.r;
    if x.ambient_dim() != r * degree.total() {
        return Err(Error::AmbientMismatch(x.ambient_dim(), r * degree.total()));
    }
    for j in 0..degree.m() {
        if degree.entries()[j] == 0 {
            continue;
        }
        let mut c = degree.entries().to_vec();
        c[j] -= 1;
        for f in binomial_representatives(&MultiIndex::new(c), degree) {
            if x.contains(&kernel_subspace(&f, r)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalityViolation {
    pub injection: Injection,
    pub element: Subspace,
    /// The direct image that should have been in the lattice at the source.
    pub missing: Subspace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalityReport {
    /// Number of (injection, element) pairs whose element contains the kernel.
    pub checked: usize,
    pub violation: Option<NormalityViolation>,
}

impl NormalityReport {
    pub fn is_normal(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks normality directly on the listed degrees, for every pair `c < d`:
/// each element of `L_d` containing `ker V(f)` must have its direct image in
/// `L_c`. Stops at the first violation.
pub fn verify_normal(
    spec: &ArrangementSpec,
    degrees: &[MultiIndex],
    max_codim: usize,
) -> Result<NormalityReport> {
    let mut lattices: BTreeMap<MultiIndex, IntersectionLattice> = BTreeMap::new();
    for d in degrees {
        if !lattices.contains_key(d) {
            lattices.insert(d.clone(), build_lattice(spec, d, max_codim)?);
        }
    }
    let mut checked = 0;
    for c in degrees {
        for d in degrees {
            if !c.lt(d) {
                continue;
            }
            let (lc, ld) = (&lattices[c], &lattices[d]);
            for f in binomial_representatives(c, d) {
                let kernel = kernel_subspace(&f, spec.r)?;
                let v = induced_linear_map(&f, spec.r);
                for x in ld.elements() {
                    if !x.contains(&kernel)? {
                        continue;
                    }
                    checked += 1;
                    let z = x.direct_image(&v)?;
                    if lc.position(&z).is_none() {
                        return Ok(NormalityReport {
                            checked,
                            violation: Some(NormalityViolation {
                                injection: f,
                                element: x.clone(),
                                missing: z,
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok(NormalityReport {
        checked,
        violation: None,
    })
}

/// Replaces every generator by its primitive form: the direct image under the
/// first map `f: e -> degree` (smallest `e` first) whose kernel the generator
/// contains.
pub fn normalize(spec: &ArrangementSpec) -> Result<ArrangementSpec> {
    let r = spec.r;
    let mut out: Vec<Generator> = Vec::new();
    for g in &spec.generators {
        let mut candidates = MultiIndex::zero(spec.m).box_to(&g.degree);
        candidates.sort_by_key(MultiIndex::total);
        let mut replaced = None;
        'scan: for e in candidates {
            for f in binomial_representatives(&e, &g.degree) {
                if g.subspace.contains(&kernel_subspace(&f, r)?)? {
                    let z = g.subspace.direct_image(&induced_linear_map(&f, r))?;
                    replaced = Some(Generator {
                        degree: e,
                        subspace: z,
                    });
                    break 'scan;
                }
            }
        }
        let z = replaced.expect("the identity of the generator degree always qualifies");
        if !out.contains(&z) {
            out.push(z);
        }
    }
    ArrangementSpec::new(spec.m, spec.r, out)
}

/// A representative of an equivalence class of primitive subspaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveClass {
    pub degree: MultiIndex,
    pub subspace: Subspace,
    pub stabilizer_order: u128,
    pub orbit_size: usize,
}

impl PrimitiveClass {
    pub fn codim(&self) -> usize {
        self.subspace.codim()
    }
}

/// Orbits of `S_level` on the elements satisfying `keep`, via the adjacent
/// transpositions. Orbits come out ordered by their smallest member.
fn orbits(lat: &IntersectionLattice, keep: &[bool]) -> Result<Vec<Vec<usize>>> {
    let perms = coxeter_generators(lat.level())
        .iter()
        .map(|g| lat.act(g))
        .collect::<Result<Vec<_>>>()?;
    let mut assigned = vec![false; lat.len()];
    let mut out = Vec::new();
    for start in 0..lat.len() {
        if !keep[start] || assigned[start] {
            continue;
        }
        assigned[start] = true;
        let mut orbit = vec![start];
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            for p in &perms {
                let y = p[x];
                if !assigned[y] {
                    assigned[y] = true;
                    orbit.push(y);
                }
            }
            k += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    Ok(out)
}

/// Representatives of all primitive subspaces of codimension `<= max_codim`,
/// up to the action of the automorphism groups.
///
/// A primitive subspace of codimension `q` involves every point and is an
/// intersection of at most `q` generator preimages, so its degree is at most
/// `q × (max generator degree)`; only those degrees are searched.
pub fn primitive_classes(spec: &ArrangementSpec, max_codim: usize) -> Result<Vec<PrimitiveClass>> {
    let cmax = spec.max_degree();
    let report = verify_normal(spec, &MultiIndex::zero(spec.m).box_to(&cmax), max_codim.max(1))?;
    if let Some(v) = report.violation {
        return Err(Error::Precondition(format!(
            "arrangement is not normal: {} contains the kernel of {} but {} is missing",
            v.element,
            v.injection.render(),
            v.missing
        )));
    }
    let bound = degree_times(max_codim, &cmax);
    let mut classes = Vec::new();
    for e in MultiIndex::zero(spec.m).box_to(&bound) {
        if e.total() == 0 {
            continue;
        }
        let lat = build_lattice(spec, &e, max_codim.max(1))?;
        let keep = par::try_map(lat.elements(), |x| is_primitive(spec, &e, x))?;
        let order = group_order(&e);
        for orbit in orbits(&lat, &keep)? {
            classes.push(PrimitiveClass {
                degree: e.clone(),
                subspace: lat.element(orbit[0]).clone(),
                stabilizer_order: order / orbit.len() as u128,
                orbit_size: orbit.len(),
            });
        }
    }
    Ok(classes)
}

/// Points of each factor involved in the constraints of `x`.
pub fn support(x: &Subspace, level: &MultiIndex, r: usize) -> Vec<Vec<usize>> {
    level
        .entries()
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let base = level.factor_offset(j);
            (0..k)
                .filter(|&p| (0..r).any(|t| x.uses_coordinate(r * (base + p) + t)))
                .collect()
        })
        .collect()
}

/// One primitive class's share of a lattice, split by binomial class
/// (the support of the element, one sorted point list per factor).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitBlock {
    pub class: usize,
    pub binomial_classes: BTreeMap<Vec<Vec<usize>>, Vec<usize>>,
}

impl OrbitBlock {
    pub fn len(&self) -> usize {
        self.binomial_classes.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.binomial_classes.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDecomposition {
    /// One block per class that occurs, in class order.
    pub blocks: Vec<OrbitBlock>,
    /// The class of each lattice element.
    pub class_of: Vec<usize>,
}

/// All subspaces `g z` for `g ∈ S_degree`.
fn subspace_orbit(z: &Subspace, degree: &MultiIndex, r: usize) -> Result<HashSet<Subspace>> {
    let gens: Vec<_> = coxeter_generators(degree)
        .iter()
        .map(|g| act_on_vector(g, r))
        .collect();
    let mut seen = HashSet::from([z.clone()]);
    let mut queue = vec![z.clone()];
    while let Some(x) = queue.pop() {
        for g in &gens {
            // adjacent transpositions are involutions
            let y = x.preimage(g)?;
            if seen.insert(y.clone()) {
                queue.push(y);
            }
        }
    }
    Ok(seen)
}

/// Assigns every lattice element to the primitive class it comes from and to
/// the binomial class of the injection carrying it there.
pub fn orbit_decomposition(
    lat: &IntersectionLattice,
    classes: &[PrimitiveClass],
) -> Result<OrbitDecomposition> {
    let r = lat.r();
    let class_orbits = classes
        .iter()
        .map(|c| subspace_orbit(&c.subspace, &c.degree, r))
        .collect::<Result<Vec<_>>>()?;
    let level = lat.level();
    let matches = par::try_map(lat.elements(), |x| -> Result<(Vec<Vec<usize>>, Vec<usize>)> {
        let supp = support(x, level, r);
        let e = MultiIndex::new(supp.iter().map(Vec::len).collect());
        let f = Injection::new(level.clone(), supp.clone())?;
        let z = x.direct_image(&induced_linear_map(&f, r))?;
        let hits = classes
            .iter()
            .zip(&class_orbits)
            .enumerate()
            .filter(|(_, (c, orbit))| c.degree == e && orbit.contains(&z))
            .map(|(k, _)| k)
            .collect();
        Ok((supp, hits))
    })?;
    let mut blocks: BTreeMap<usize, OrbitBlock> = BTreeMap::new();
    let mut class_of = Vec::with_capacity(lat.len());
    for (element, (supp, hits)) in matches.into_iter().enumerate() {
        if hits.len() != 1 {
            return Err(Error::OrbitMatch {
                element,
                matches: hits.len(),
            });
        }
        let class = hits[0];
        class_of.push(class);
        blocks
            .entry(class)
            .or_insert_with(|| OrbitBlock {
                class,
                binomial_classes: BTreeMap::new(),
            })
            .binomial_classes
            .entry(supp)
            .or_default()
            .push(element);
    }
    Ok(OrbitDecomposition {
        blocks: blocks.into_values().collect(),
        class_of,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DownwardStabilityReport {
    /// Number of (injection, element) pairs checked.
    pub checked: usize,
    pub failure: Option<String>,
}

impl DownwardStabilityReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks that for each `f: c -> d` (one per binomial class) and each `x` in
/// `L_c`, the map `L(f)` restricts to a rank-preserving order isomorphism
/// `L_c^{<x} -> L_d^{<L(f)x}`.
pub fn verify_downward_stability(
    spec: &ArrangementSpec,
    c: &MultiIndex,
    d: &MultiIndex,
    max_codim: usize,
) -> Result<DownwardStabilityReport> {
    if !c.le(d) {
        return Err(Error::Precondition(format!("{c} is not <= {d}")));
    }
    let lc = build_lattice(spec, c, max_codim)?;
    let ld = build_lattice(spec, d, max_codim)?;
    let mut checked = 0;
    for f in binomial_representatives(c, d) {
        let v = induced_linear_map(&f, spec.r);
        let image = lc
            .elements()
            .iter()
            .map(|x| Ok(ld.position(&x.preimage(&v)?)))
            .collect::<Result<Vec<_>>>()?;
        for x in 0..lc.len() {
            checked += 1;
            let fail = |why: String| {
                Ok(DownwardStabilityReport {
                    checked,
                    failure: Some(format!("{} at {}: {why}", f.render(), lc.element(x))),
                })
            };
            let Some(y) = image[x] else {
                return fail("image not in the target lattice".into());
            };
            let src = lc.below(x);
            let mut mapped = Vec::with_capacity(src.len());
            for &a in src {
                match image[a] {
                    Some(b) if lc.codim(a) == ld.codim(b) => mapped.push(b),
                    _ => return fail("rank not preserved".into()),
                }
            }
            let mut sorted = mapped.clone();
            sorted.sort_unstable();
            if sorted != ld.below(y) {
                return fail("lower intervals differ".into());
            }
            for (ia, &a) in src.iter().enumerate() {
                for (ib, &b) in src.iter().enumerate() {
                    if lc.lt(a, b) != ld.lt(mapped[ia], mapped[ib]) {
                        return fail("order not preserved".into());
                    }
                }
            }
        }
    }
    Ok(DownwardStabilityReport {
        checked,
        failure: None,
    })
}
