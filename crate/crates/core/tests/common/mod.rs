//! Independent oracles and fixtures shared by the integration tests.

#![allow(dead_code)]

pub mod props;

use arrstab_core::characters::CharacterPolynomial;
use arrstab_core::MultiIndex;

pub fn mi(v: &[usize]) -> MultiIndex {
    MultiIndex::new(v.to_vec())
}

/// Set partitions of `{0..n}` as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for b in 0..=next {
            prefix.push(b);
            go(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

/// Set partitions of `n` points with at least one block of size `>= k`,
/// i.e. the non-minimal elements of the `k`-equal partition lattice when
/// all non-singleton blocks have size `>= k`.
pub fn k_equal_partitions(n: usize, k: usize) -> usize {
    set_partitions(n)
        .into_iter()
        .filter(|p| {
            let blocks = p.iter().max().map_or(0, |m| m + 1);
            let sizes: Vec<usize> = (0..blocks).map(|b| p.iter().filter(|&&x| x == b).count()).collect();
            sizes.iter().any(|&s| s > 1) && sizes.iter().all(|&s| s == 1 || s >= k)
        })
        .count()
}

/// Coefficients of `∏_{j=0}^{n-1} (1 + j t^s)`, indexed by the power of `t`.
pub fn product_coefficients(n: usize, s: usize) -> Vec<u64> {
    let mut coeffs = vec![1u64];
    for j in 0..n as u64 {
        let mut next = vec![0u64; coeffs.len() + s];
        for (p, c) in coeffs.iter().enumerate() {
            next[p] += c;
            next[p + s] += c * j;
        }
        coeffs = next;
    }
    while coeffs.len() > 1 && coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    coeffs
}

pub fn choose(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// `X_1(X_1 - 1)/2 + X_2`: the number of transposition-type fixed pairs,
/// the character of `H^1` of ordered configuration space.
pub fn fixed_pair_polynomial() -> CharacterPolynomial {
    let x1 = CharacterPolynomial::var(1, 1);
    let x2 = CharacterPolynomial::var(2, 1);
    let half = arrstab_core::exactlin::ratio(1, 2);
    x1.mul(&x1.sub(&CharacterPolynomial::constant(arrstab_core::exactlin::rat(1))))
        .scale(&half)
        .add(&x2)
}

/// Counts 2-subsets `{a, b}` fixed setwise by a permutation with the given
/// one-line images.
pub fn fixed_pairs(perm: &[usize]) -> usize {
    let n = perm.len();
    let mut count = 0;
    for a in 0..n {
        for b in a + 1..n {
            let (x, y) = (perm[a], perm[b]);
            if (x == a && y == b) || (x == b && y == a) {
                count += 1;
            }
        }
    }
    count
}
