//! Lexicographic enumeration of k-subsets of {0..n} as bitmasks.

use std::sync::OnceLock;

pub const MAX_DIM: usize = 9;

struct Tables {
    /// `by_degree[k]` lists masks of popcount k in lex order of their sorted index tuples.
    by_degree: Vec<Vec<u16>>,
    /// position of each mask inside its degree list
    index: Vec<u32>,
}

fn build(n: usize) -> Tables {
    let mut by_degree: Vec<Vec<u16>> = vec![Vec::new(); n + 1];
    let mut tuples: Vec<(Vec<usize>, u16)> = (0u32..1 << n)
        .map(|m| ((0..n).filter(|&i| m >> i & 1 == 1).collect(), m as u16))
        .collect();
    tuples.sort();
    for (t, m) in tuples {
        by_degree[t.len()].push(m);
    }
    let mut index = vec![0u32; 1 << n];
    for list in &by_degree {
        for (pos, &m) in list.iter().enumerate() {
            index[m as usize] = pos as u32;
        }
    }
    Tables { by_degree, index }
}

fn tables(n: usize) -> &'static Tables {
    static CELLS: [OnceLock<Tables>; MAX_DIM + 1] = [const { OnceLock::new() }; MAX_DIM + 1];
    assert!(n <= MAX_DIM, "ambient dimension {n} too large");
    CELLS[n].get_or_init(|| build(n))
}

/// Basis masks of Λ^k(F^n) in lex order.
pub fn masks(n: usize, k: usize) -> &'static [u16] {
    &tables(n).by_degree[k]
}

pub fn mask_index(n: usize, mask: u16) -> usize {
    tables(n).index[mask as usize] as usize
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Index of the increasing triple (i, j, k) in the lex order of Λ³(F^n).
pub fn triple_index(n: usize, i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i < j && j < k && k < n);
    mask_index(n, (1 << i | 1 << j | 1 << k) as u16)
}

/// Sorted indices of a mask.
pub fn indices(mask: u16) -> impl Iterator<Item = usize> {
    (0..16).filter(move |&i| mask >> i & 1 == 1)
}

/// Sign of the permutation sorting the concatenation of `a` then `b` (disjoint).
pub fn merge_sign(a: u16, b: u16) -> bool {
    // count pairs (x in a, y in b) with x > y
    let mut inversions = 0u32;
    for y in indices(b) {
        inversions += (a >> (y + 1)).count_ones();
    }
    inversions % 2 == 1
}
