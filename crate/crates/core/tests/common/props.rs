//! Randomized property checks, one function per invariant. Each returns a
//! readable failure instead of panicking so that both the plain test target
//! and the acceptance report can drive them.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use arrstab_core::arrangement::{
    build_lattice, family_mkr, normalize, orbit_decomposition, primitive_classes, verify_normal,
    ArrangementSpec, Generator, IntersectionLattice,
};
use arrstab_core::characters::{
    character_of_cohomology, fit_character_polynomial, inner_product, invariants_dim,
    irreducible_character, irreducible_multiplicities, monomial_basis, verify_free_decomposition,
    CharacterPolynomial,
};
use arrstab_core::exactlin::{ratio, LinearMap, Rational, RationalMatrix, Subspace};
use arrstab_core::fim::{
    act_on_vector, binomial_set_size, conj_classes, enumerate_group, enumerate_injections,
    factorial, group_order, induced_linear_map, partitions, Injection, MultiIndex,
};
use arrstab_core::homology::{
    equivariant_trace, gm_betti, gm_betti_unfiltered, order_complex, reduced_betti, RankedPoset,
};
use num_traits::{One, Zero};

use super::mi;

pub type Check = fn(u32) -> Result<(), String>;

/// Every property, labelled by module.
pub const ALL: &[(&str, Check)] = &[
    ("exactlin: rref is idempotent", rref_idempotent),
    ("exactlin: intersect is a semilattice operation", intersect_laws),
    ("exactlin: mutual containment is equality", containment_antisymmetric),
    ("exactlin: preimage undoes direct image above the kernel", direct_image_roundtrip),
    ("exactlin: surjective preimage keeps codimension", surjective_preimage_codim),
    ("fim: injection count", injection_count),
    ("fim: class sizes sum to the group order", class_sizes_sum),
    ("fim: induced maps are contravariant", induced_contravariant),
    ("fim: action on vectors is a homomorphism", action_homomorphism),
    ("arrangement: braid lattice sizes are Bell(n) - 1", braid_sizes),
    ("arrangement: lattices are saturated", saturation),
    ("arrangement: the symmetric group acts by automorphisms", lattice_action),
    ("arrangement: normalize is idempotent and normal", normalize_idempotent),
    ("arrangement: normalization preserves large lattices", normalize_agrees),
    ("arrangement: orbit blocks are uniform", orbit_blocks),
    ("homology: boundary squares to zero", boundary_squared),
    ("homology: Euler characteristics agree", euler_consistency),
    ("homology: identity trace is the Betti number", identity_trace),
    ("homology: traces are class functions", trace_class_function),
    ("homology: contributions respect the codimension window", codim_window),
    ("characters: fits reproduce their samples", fit_reproduces),
    ("characters: irreducible characters are orthonormal", mn_orthonormal),
    ("characters: multiplicities are nonnegative integers", multiplicities_integral),
    ("characters: inner products stabilize", inner_product_stability),
    ("characters: cohomology is free", freeness),
];

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn fail(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=3).prop_map(|(p, q)| ratio(p, q))
}

fn matrix(rows: std::ops::RangeInclusive<usize>, cols: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec(prop::collection::vec(rational(), cols), rows)
        .prop_map(move |r| RationalMatrix::from_rows(cols, r).unwrap())
}

fn subspace(n: usize) -> impl Strategy<Value = Subspace> {
    matrix(0..=4, n).prop_map(move |m| Subspace::from_constraints(n, &m).unwrap())
}

pub fn rref_idempotent(cases: u32) -> Result<(), String> {
    run(cases, (1usize..=5, 1usize..=6).prop_flat_map(|(r, c)| matrix(r..=r, c)), |m| {
        let once = m.rref();
        prop_assert_eq!(once.rref(), once.clone());
        prop_assert_eq!(once.rank(), m.rank());
        Ok(())
    })
}

pub fn intersect_laws(cases: u32) -> Result<(), String> {
    run(cases, (subspace(6), subspace(6), subspace(6)), |(a, b, c)| {
        let ab = a.intersect(&b).map_err(fail)?;
        prop_assert_eq!(&ab, &b.intersect(&a).map_err(fail)?);
        let left = ab.intersect(&c).map_err(fail)?;
        let right = a.intersect(&b.intersect(&c).map_err(fail)?).map_err(fail)?;
        prop_assert_eq!(left.serialize(), right.serialize());
        prop_assert_eq!(a.intersect(&a).map_err(fail)?, a);
        Ok(())
    })
}

pub fn containment_antisymmetric(cases: u32) -> Result<(), String> {
    // b restates a's constraints through random combinations, so mutual
    // containment holds often enough to matter.
    let pair = (matrix(1..=3, 5), matrix(1..=4, 3)).prop_map(|(a, mix)| {
        let mix = RationalMatrix::from_rows(a.rows(), {
            let rows = mix.to_rows();
            rows.into_iter().map(|r| r.into_iter().cycle().take(a.rows()).collect()).collect()
        })
        .unwrap();
        let combined = mix.mul(&a).unwrap();
        (
            Subspace::from_constraints(5, &a).unwrap(),
            Subspace::from_constraints(5, &combined).unwrap(),
        )
    });
    run(cases, pair, |(a, b)| {
        if a.contains(&b).map_err(fail)? && b.contains(&a).map_err(fail)? {
            prop_assert_eq!(a.serialize(), b.serialize());
        }
        // b is cut out by combinations of a's rows, so it always contains a
        prop_assert!(b.contains(&a).map_err(fail)?);
        Ok(())
    })
}

fn linear_map(target: usize, source: usize) -> impl Strategy<Value = LinearMap> {
    matrix(target..=target, source).prop_map(LinearMap::new)
}

pub fn direct_image_roundtrip(cases: u32) -> Result<(), String> {
    run(cases, (linear_map(3, 5), subspace(3), subspace(5)), |(f, y, x)| {
        // preimages always contain the kernel
        let pulled = y.preimage(&f).map_err(fail)?;
        let back = pulled.direct_image(&f).map_err(fail)?.preimage(&f).map_err(fail)?;
        prop_assert_eq!(back, pulled);
        let kernel = Subspace::span(5, &f.kernel_basis()).map_err(fail)?;
        if x.contains(&kernel).map_err(fail)? {
            let back = x.direct_image(&f).map_err(fail)?.preimage(&f).map_err(fail)?;
            prop_assert_eq!(back, x);
        }
        Ok(())
    })
}

pub fn surjective_preimage_codim(cases: u32) -> Result<(), String> {
    run(cases, (linear_map(3, 5), subspace(3)), |(f, x)| {
        prop_assume!(f.is_surjective());
        prop_assert_eq!(x.preimage(&f).map_err(fail)?.codim(), x.codim());
        Ok(())
    })
}

fn multi_index(m: usize, max: usize) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max, m).prop_map(MultiIndex::new)
}

pub fn injection_count(cases: u32) -> Result<(), String> {
    let pair = (1usize..=2)
        .prop_flat_map(|m| (multi_index(m, 5), multi_index(m, 5)))
        .prop_map(|(a, b)| {
            let lo = MultiIndex::new(a.entries().iter().zip(b.entries()).map(|(x, y)| *x.min(y)).collect());
            let hi = MultiIndex::new(a.entries().iter().zip(b.entries()).map(|(x, y)| *x.max(y)).collect());
            (lo, hi)
        })
        // two full factors of S_5 would mean 14400 injections per case
        .prop_filter("keep enumeration small", |(c, d)| {
            let count: u128 = c
                .entries()
                .iter()
                .zip(d.entries())
                .map(|(&a, &b)| factorial(b) / factorial(b - a))
                .product();
            count <= 2000
        });
    run(cases, pair, |(c, d)| {
        let expected =
            binomial_set_size(&c, &d) * c.entries().iter().map(|&k| factorial(k)).product::<u128>();
        prop_assert_eq!(enumerate_injections(&c, &d).len() as u128, expected);
        Ok(())
    })
}

pub fn class_sizes_sum(cases: u32) -> Result<(), String> {
    run(cases, (1usize..=2).prop_flat_map(|m| multi_index(m, 6)), |n| {
        let total: u128 = conj_classes(&n).iter().map(|c| c.size()).sum();
        prop_assert_eq!(total, group_order(&n));
        Ok(())
    })
}

fn injection(c: MultiIndex, d: MultiIndex) -> impl Strategy<Value = Injection> {
    let all = enumerate_injections(&c, &d);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

pub fn induced_contravariant(cases: u32) -> Result<(), String> {
    // g: b -> c, f: c -> d
    let chain = (1usize..=3, 0usize..=1, 0usize..=1, 1usize..=2)
        .prop_flat_map(|(b, dc, dd, r)| {
            let (b, c, d) = (mi(&[b, 1]), mi(&[b + dc, 1]), mi(&[b + dc + dd, 2]));
            (injection(c.clone(), d), injection(b, c), Just(r))
        });
    run(cases, chain, |(f, g, r)| {
        let fg = f.compose(&g).map_err(fail)?;
        let lhs = induced_linear_map(&fg, r);
        let rhs = induced_linear_map(&g, r)
            .compose(&induced_linear_map(&f, r))
            .map_err(fail)?;
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })
}

fn group_element(n: MultiIndex) -> impl Strategy<Value = arrstab_core::PermTuple> {
    let all = enumerate_group(&n);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

pub fn action_homomorphism(cases: u32) -> Result<(), String> {
    let n = mi(&[4]);
    run(cases, (group_element(n.clone()), group_element(n), 1usize..=2), |(g, h, r)| {
        let gh = act_on_vector(&g.compose(&h), r);
        let product = act_on_vector(&g, r).matrix().mul(act_on_vector(&h, r).matrix()).map_err(fail)?;
        prop_assert_eq!(gh.matrix(), &product);
        Ok(())
    })
}

pub fn braid_sizes(_cases: u32) -> Result<(), String> {
    let braid = family_mkr(1, 2, 1).map_err(|e| e.to_string())?;
    for n in 2..=6 {
        let lat = build_lattice(&braid, &mi(&[n]), n).map_err(|e| e.to_string())?;
        let expected = super::set_partitions(n).len() - 1;
        if lat.len() != expected {
            return Err(format!("braid at n={n}: {} elements, expected {expected}", lat.len()));
        }
    }
    Ok(())
}

/// A small zoo of lattices, some truncated, built once.
pub fn pool() -> &'static [(ArrangementSpec, IntersectionLattice)] {
    static POOL: OnceLock<Vec<(ArrangementSpec, IntersectionLattice)>> = OnceLock::new();
    POOL.get_or_init(|| {
        // ((m, k, r), level, max_codim)
        type Entry = ((usize, usize, usize), &'static [usize], usize);
        let cases: [Entry; 7] = [
            ((1, 2, 1), &[4], 3),
            ((1, 2, 1), &[5], 2),
            ((1, 2, 1), &[5], 4),
            ((1, 3, 1), &[5], 4),
            ((2, 1, 1), &[2, 2], 3),
            ((2, 1, 1), &[3, 2], 2),
            ((1, 2, 2), &[3], 4),
        ];
        cases
            .iter()
            .map(|&((m, k, r), n, c)| {
                let spec = family_mkr(m, k, r).unwrap();
                let lat = build_lattice(&spec, &mi(n), c).unwrap();
                (spec, lat)
            })
            .collect()
    })
}

/// Pool entries whose lattice is not truncated.
fn full_pool() -> Vec<usize> {
    pool()
        .iter()
        .enumerate()
        .filter(|(_, (_, lat))| {
            let top = lat.elements().iter().map(Subspace::codim).max().unwrap_or(0);
            top < lat.max_codim() || lat.max_codim() >= lat.r() * (lat.level().total() - 1)
        })
        .map(|(i, _)| i)
        .collect()
}

fn pool_pair() -> impl Strategy<Value = (usize, usize, usize)> {
    (0..pool().len()).prop_flat_map(|p| {
        let len = pool()[p].1.len();
        (Just(p), 0..len, 0..len)
    })
}

pub fn saturation(cases: u32) -> Result<(), String> {
    run(cases, pool_pair(), |(p, a, b)| {
        let lat = &pool()[p].1;
        let meet = lat.element(a).intersect(lat.element(b)).map_err(fail)?;
        prop_assert!(lat.position(&meet).is_some() || meet.codim() > lat.max_codim());
        Ok(())
    })
}

fn pool_group_pair() -> impl Strategy<Value = (usize, arrstab_core::PermTuple, arrstab_core::PermTuple)> {
    (0..pool().len()).prop_flat_map(|p| {
        let n = pool()[p].1.level().clone();
        (Just(p), group_element(n.clone()), group_element(n))
    })
}

pub fn lattice_action(cases: u32) -> Result<(), String> {
    run(cases, pool_group_pair(), |(p, g, h)| {
        let lat = &pool()[p].1;
        let pg = lat.act(&g).map_err(fail)?;
        let ph = lat.act(&h).map_err(fail)?;
        let pgh = lat.act(&g.compose(&h)).map_err(fail)?;
        for x in 0..lat.len() {
            prop_assert_eq!(lat.codim(pg[x]), lat.codim(x));
            prop_assert_eq!(pgh[x], pg[ph[x]]);
        }
        for a in 0..lat.len() {
            for b in 0..lat.len() {
                prop_assert_eq!(lat.lt(a, b), lat.lt(pg[a], pg[b]));
            }
        }
        Ok(())
    })
}

/// One or two generators with a single random integer constraint each.
fn random_spec() -> impl Strategy<Value = ArrangementSpec> {
    let generator = |m: usize| {
        prop::collection::vec(1usize..=if m == 1 { 3 } else { 2 }, m).prop_flat_map(move |deg| {
            let n: usize = deg.iter().sum();
            prop::collection::vec(-2i64..=2, n)
                .prop_filter("nonzero row", |row| row.iter().any(|&x| x != 0))
                .prop_map(move |row| Generator {
                    degree: MultiIndex::new(deg.clone()),
                    subspace: Subspace::from_i64(row.len(), &[row]).unwrap(),
                })
        })
    };
    (1usize..=2).prop_flat_map(move |m| {
        prop::collection::vec(generator(m), 1..=2)
            .prop_map(move |gens| ArrangementSpec::new(m, 1, gens).unwrap())
    })
}

pub fn normalize_idempotent(cases: u32) -> Result<(), String> {
    run(cases, random_spec(), |spec| {
        let once = normalize(&spec).map_err(fail)?;
        prop_assert_eq!(&normalize(&once).map_err(fail)?, &once);
        let top = once.max_degree();
        let upper = MultiIndex::new(top.entries().iter().map(|k| k + 1).collect());
        let degrees = MultiIndex::zero(once.m()).box_to(&upper);
        let report = verify_normal(&once, &degrees, 2).map_err(fail)?;
        prop_assert!(report.is_normal(), "{:?}", report.violation);
        Ok(())
    })
}

pub fn normalize_agrees(cases: u32) -> Result<(), String> {
    run(cases, random_spec(), |spec| {
        let normal = normalize(&spec).map_err(fail)?;
        let top = spec.max_degree();
        let next = MultiIndex::new(top.entries().iter().map(|k| k + 1).collect());
        for n in [top, next] {
            let a = build_lattice(&spec, &n, 2).map_err(fail)?;
            let b = build_lattice(&normal, &n, 2).map_err(fail)?;
            prop_assert_eq!(a.elements(), b.elements(), "at level {}", n);
        }
        Ok(())
    })
}

pub fn orbit_blocks(cases: u32) -> Result<(), String> {
    type Decomposed = (
        Vec<arrstab_core::arrangement::PrimitiveClass>,
        arrstab_core::arrangement::OrbitDecomposition,
    );
    static DECOMPOSED: OnceLock<Vec<Decomposed>> = OnceLock::new();
    // the class search reaches degree max_codim × (generator degree), so
    // skip pool entries where that gets large
    let usable: Vec<usize> = (0..pool().len())
        .filter(|&p| {
            let (spec, lat) = &pool()[p];
            lat.max_codim() * spec.max_degree().total() <= 6
        })
        .collect();
    let decomposed = DECOMPOSED.get_or_init(|| {
        usable
            .iter()
            .map(|&p| {
                let (spec, lat) = &pool()[p];
                let classes = primitive_classes(spec, lat.max_codim()).unwrap();
                let dec = orbit_decomposition(lat, &classes).unwrap();
                (classes, dec)
            })
            .collect()
    });
    for (k, (classes, dec)) in decomposed.iter().enumerate() {
        let lat = &pool()[usable[k]].1;
        for block in &dec.blocks {
            let class = &classes[block.class];
            let expected = binomial_set_size(&class.degree, lat.level());
            if block.binomial_classes.len() as u128 != expected {
                return Err(format!(
                    "{} at {}: {} binomial classes, expected {expected}",
                    class.subspace,
                    lat.level(),
                    block.binomial_classes.len()
                ));
            }
            let sizes: Vec<usize> = block.binomial_classes.values().map(Vec::len).collect();
            if sizes.windows(2).any(|w| w[0] != w[1]) {
                return Err(format!("{} at {}: uneven blocks {sizes:?}", class.subspace, lat.level()));
            }
        }
    }
    // the decomposition is invariant under the group action
    let indices = usable.clone();
    let strategy = (0..usable.len()).prop_flat_map(move |k| {
        let p = indices[k];
        (Just(k), group_element(pool()[p].1.level().clone()))
    });
    run(cases, strategy, |(k, g)| {
        let lat = &pool()[usable[k]].1;
        let class_of = &decomposed[k].1.class_of;
        let moved = lat.act(&g).map_err(fail)?;
        for x in 0..lat.len() {
            prop_assert_eq!(class_of[moved[x]], class_of[x]);
        }
        Ok(())
    })
}

/// Random ranked posets on up to seven elements, transitively closed.
fn random_poset() -> impl Strategy<Value = RankedPoset> {
    (1usize..=7)
        .prop_flat_map(|n| (prop::collection::vec(0usize..=3, n), prop::collection::vec(any::<bool>(), n * n)))
        .prop_map(|(ranks, edges)| {
            let n = ranks.len();
            let mut lt = vec![vec![false; n]; n];
            for a in 0..n {
                for b in 0..n {
                    lt[a][b] = ranks[a] < ranks[b] && edges[a * n + b];
                }
            }
            for k in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        if lt[a][k] && lt[k][b] {
                            lt[a][b] = true;
                        }
                    }
                }
            }
            RankedPoset::from_relation(ranks, |a, b| lt[a][b])
        })
}

fn lower_interval_or_poset() -> impl Strategy<Value = RankedPoset> {
    prop_oneof![
        random_poset(),
        pool_pair().prop_map(|(p, x, _)| pool()[p].1.lower_interval(x).0),
    ]
}

pub fn boundary_squared(cases: u32) -> Result<(), String> {
    run(cases, lower_interval_or_poset(), |poset| {
        prop_assert!(order_complex(&poset).chain_complex().is_complex());
        Ok(())
    })
}

pub fn euler_consistency(cases: u32) -> Result<(), String> {
    run(cases, lower_interval_or_poset(), |poset| {
        let complex = order_complex(&poset);
        let sign = |d: isize| if d.rem_euclid(2) == 0 { 1i64 } else { -1 };
        let chains: i64 = (-1..=complex.dim()).map(|d| sign(d) * complex.simplex_count(d) as i64).sum();
        let betti: i64 = (-1..=complex.dim()).map(|d| sign(d) * reduced_betti(&complex, d) as i64).sum();
        prop_assert_eq!(chains, betti);
        Ok(())
    })
}

fn pool_degree() -> impl Strategy<Value = (usize, usize)> {
    (0..pool().len()).prop_flat_map(|p| (Just(p), 1..=pool()[p].1.max_codim()))
}

pub fn identity_trace(cases: u32) -> Result<(), String> {
    run(cases, pool_degree(), |(p, i)| {
        let lat = &pool()[p].1;
        let id = arrstab_core::PermTuple::identity(lat.level());
        let trace = equivariant_trace(lat, &id, i).map_err(fail)?;
        let betti = gm_betti(lat, i).map_err(fail)?.total;
        prop_assert_eq!(trace, Rational::from_integer(betti.into()));
        Ok(())
    })
}

pub fn trace_class_function(cases: u32) -> Result<(), String> {
    static BRAIDS: OnceLock<Vec<IntersectionLattice>> = OnceLock::new();
    let braids = BRAIDS.get_or_init(|| {
        let braid = family_mkr(1, 2, 1).unwrap();
        vec![
            build_lattice(&braid, &mi(&[4]), 3).unwrap(),
            build_lattice(&braid, &mi(&[5]), 3).unwrap(),
        ]
    });
    let strategy = (0usize..2, 1usize..=3).prop_flat_map(|(b, i)| {
        let n = mi(&[4 + b]);
        (Just(b), Just(i), group_element(n.clone()), group_element(n))
    });
    run(cases, strategy, |(b, i, g, h)| {
        let lat = &braids[b];
        let conjugate = h.compose(&g).compose(&h.inverse());
        prop_assert_eq!(
            equivariant_trace(lat, &g, i).map_err(fail)?,
            equivariant_trace(lat, &conjugate, i).map_err(fail)?
        );
        Ok(())
    })
}

pub fn codim_window(cases: u32) -> Result<(), String> {
    let full = full_pool();
    let strategy = (0..full.len()).prop_flat_map(move |k| {
        let p = full[k];
        (Just(p), 1..=pool()[p].1.max_codim())
    });
    run(cases, strategy, |(p, i)| {
        let lat = &pool()[p].1;
        let report = gm_betti_unfiltered(lat, i).map_err(fail)?;
        for c in &report.contributions {
            prop_assert!(i.div_ceil(2) <= c.codim && c.codim <= i, "{:?} at i={}", c, i);
        }
        prop_assert_eq!(report.total, gm_betti(lat, i).map_err(fail)?.total);
        Ok(())
    })
}

/// Random combination of up to four monomials of multidegree `<= bound`.
fn random_polynomial(bound: MultiIndex) -> impl Strategy<Value = CharacterPolynomial> {
    let basis = monomial_basis(&bound);
    let len = basis.len();
    prop::collection::vec((0..len, rational()), 1..=4).prop_map(move |terms| {
        terms.into_iter().fold(CharacterPolynomial::zero(), |acc, (i, c)| {
            let mono = basis[i].iter().fold(CharacterPolynomial::constant(c), |p, (v, e)| {
                (0..*e).fold(p, |p, _| p.mul(&CharacterPolynomial::var(v.cycle, v.factor)))
            });
            acc.add(&mono)
        })
    })
}

pub fn fit_reproduces(cases: u32) -> Result<(), String> {
    let strategy = prop_oneof![Just(mi(&[1])), Just(mi(&[2])), Just(mi(&[3])), Just(mi(&[1, 1]))]
        .prop_flat_map(|b| (Just(b.clone()), random_polynomial(b)));
    run(cases, strategy, |(bound, poly)| {
        let levels: Vec<MultiIndex> = (0..=2)
            .map(|s| MultiIndex::new(bound.entries().iter().map(|k| k + s).collect()))
            .collect();
        let samples: Vec<_> = levels.iter().map(|n| poly.on_level(n)).collect();
        let fitted = fit_character_polynomial(&samples, &bound).map_err(fail)?;
        for s in &samples {
            prop_assert_eq!(&fitted.on_level(s.level()), s);
        }
        prop_assert_eq!(fitted, poly);
        Ok(())
    })
}

pub fn mn_orthonormal(_cases: u32) -> Result<(), String> {
    for n in 1..=6 {
        let level = mi(&[n]);
        let chars: Vec<_> = partitions(n).into_iter().map(|l| (l.clone(), irreducible_character(&[l]))).collect();
        for (la, a) in &chars {
            for (lb, b) in &chars {
                let ip = inner_product(a, b).map_err(|e| e.to_string())?;
                let expected = if la == lb { Rational::one() } else { Rational::zero() };
                if ip != expected || a.level() != &level {
                    return Err(format!("<chi_{la:?}, chi_{lb:?}> = {ip} at n={n}"));
                }
            }
        }
    }
    Ok(())
}

pub fn multiplicities_integral(cases: u32) -> Result<(), String> {
    let strategy = (0..pool().len()).prop_flat_map(|p| (Just(p), 0..=pool()[p].1.max_codim()));
    run(cases, strategy, |(p, i)| {
        let (spec, lat) = &pool()[p];
        let chi = character_of_cohomology(spec, lat.level(), i).map_err(fail)?;
        invariants_dim(&chi).map_err(fail)?;
        for (lambda, m) in irreducible_multiplicities(&chi).map_err(fail)? {
            prop_assert!(m.is_integer() && m >= Rational::zero(), "{:?}: {}", lambda, m);
        }
        Ok(())
    })
}

pub fn inner_product_stability(cases: u32) -> Result<(), String> {
    let strategy = (1usize..=3, 1usize..=3)
        .prop_flat_map(|(p, q)| (random_polynomial(mi(&[p])), random_polynomial(mi(&[q]))));
    run(cases, strategy, |(a, b)| {
        let onset = a.multidegree(1).total() + b.multidegree(1).total();
        let values: BTreeMap<usize, Rational> = (onset..=8)
            .map(|n| {
                let level = mi(&[n]);
                (n, inner_product(&a.on_level(&level), &b.on_level(&level)).unwrap())
            })
            .collect();
        let first = values.values().next().cloned();
        prop_assert!(values.values().all(|v| Some(v) == first.as_ref()), "{:?}", values);
        Ok(())
    })
}

pub fn freeness(_cases: u32) -> Result<(), String> {
    let braid = family_mkr(1, 2, 1).map_err(|e| e.to_string())?;
    let braid_levels: Vec<_> = (1..=6).map(|n| mi(&[n])).collect();
    let rational_maps = family_mkr(2, 1, 1).map_err(|e| e.to_string())?;
    let grid = mi(&[0, 0]).box_to(&mi(&[3, 3]));
    let jobs = [(&braid, 3, &braid_levels), (&rational_maps, 2, &grid)];
    for (spec, top, levels) in jobs {
        for i in 1..=top {
            let report = verify_free_decomposition(spec, i, levels).map_err(|e| e.to_string())?;
            if !report.passed() {
                let bad: Vec<String> = report
                    .levels
                    .iter()
                    .filter(|l| !l.matches())
                    .map(|l| l.level.to_string())
                    .collect();
                return Err(format!("{} H^{i}: mismatch at {}", spec.serialize(), bad.join(", ")));
            }
        }
    }
    Ok(())
}
