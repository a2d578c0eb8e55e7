//! Named arrangement families.

/// `(m, k, r)` of the braid arrangement.
pub const BRAID: (usize, usize, usize) = (1, 2, 1);

pub fn conf(r: usize) -> (usize, usize, usize) {
    (1, 2, r)
}

pub fn k_equals(k: usize) -> (usize, usize, usize) {
    (1, k, 1)
}

pub fn rational_maps(m: usize) -> (usize, usize, usize) {
    (m, 1, 1)
}

pub const ENTRIES: &[(&str, &str, &str)] = &[
    (
        "braid",
        "mkr(1,2,1)",
        "braid arrangement; complement is PConf_n(C), quotient relates to monic square-free polynomials",
    ),
    (
        "conf(r)",
        "mkr(1,2,r)",
        "ordered configuration space of n points in C^r",
    ),
    (
        "k-equals(k)",
        "mkr(1,k,1)",
        "k-equals arrangement, intersection lattice Pi_{n,k}",
    ),
    (
        "rational-maps(m)",
        "mkr(m,1,1)",
        "m-tuples of point sets with no common point; based rational maps for m = 2",
    ),
];

pub fn listing() -> String {
    let width = ENTRIES.iter().map(|(n, f, _)| n.len() + f.len() + 3).max().unwrap_or(0);
    let mut out = String::new();
    for (name, family, about) in ENTRIES {
        let head = format!("{name} = {family}");
        out.push_str(&format!("{head:width$}  {about}\n"));
    }
    out
}
