//! Reference implementations used as oracles. They work on plain `u32`
//! bitmasks and share no code with the library.
#![allow(dead_code)]

use faultbasis::{Signature, VerdictMatrix};
use num_rational::BigRational;

pub fn mask_to_sig(mask: u32, width: usize) -> Signature {
    Signature::from_ones(width, (0..width).filter(|&j| mask >> j & 1 == 1))
}

pub fn matrix_from_masks(masks: &[u32], width: usize) -> VerdictMatrix {
    let ids = (0..masks.len()).map(|i| format!("w{i}")).collect();
    let rows = masks.iter().map(|&m| mask_to_sig(m, width)).collect();
    VerdictMatrix::new("p", width, ids, rows).unwrap()
}

/// Independent iff no nonempty sub-multiset XORs to zero.
pub fn independent_by_enumeration(rows: &[u32]) -> bool {
    let k = rows.len();
    (1u32..(1 << k)).all(|pick| {
        let x = (0..k).filter(|&i| pick >> i & 1 == 1).fold(0, |acc, i| acc ^ rows[i]);
        x != 0
    })
}

/// Size of the largest independent subset.
pub fn rank_by_enumeration(rows: &[u32]) -> usize {
    let n = rows.len();
    (0u32..(1 << n))
        .filter(|&s| {
            let sub: Vec<u32> = (0..n).filter(|&i| s >> i & 1 == 1).map(|i| rows[i]).collect();
            independent_by_enumeration(&sub)
        })
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Whether `r` equals the XOR of some subset of `rows`.
pub fn in_span_by_enumeration(r: u32, rows: &[u32]) -> bool {
    let k = rows.len();
    (0u32..(1 << k)).any(|pick| {
        (0..k).filter(|&i| pick >> i & 1 == 1).fold(0, |acc, i| acc ^ rows[i]) == r
    })
}

pub fn jaccard_ref(a: u32, b: u32) -> BigRational {
    BigRational::new(((a & b).count_ones() as i64).into(), ((a | b).count_ones() as i64).into())
}

pub fn diversity_ref(rows: &[u32]) -> BigRational {
    let k = rows.len();
    if k < 2 {
        return BigRational::from_integer(0.into());
    }
    let mut sum = BigRational::from_integer(0.into());
    for i in 0..k {
        for j in i + 1..k {
            sum += jaccard_ref(rows[i], rows[j]);
        }
    }
    sum / BigRational::from_integer(((k * (k - 1) / 2) as i64).into())
}

/// Best-improvement descent that materialises every neighbor and re-checks
/// rank by enumeration. Same tie rule as the library: smallest (out, in).
pub fn descend_ref(masks: &[u32], start: &[usize], max_steps: usize) -> (Vec<usize>, BigRational, usize) {
    let rank = rank_by_enumeration(masks);
    let mut cur: Vec<usize> = start.to_vec();
    cur.sort();
    let f_of = |idx: &[usize]| diversity_ref(&idx.iter().map(|&i| masks[i]).collect::<Vec<_>>());
    let mut f = f_of(&cur);
    let mut steps = 0;
    while steps < max_steps {
        let mut neighbors = Vec::new();
        for &out in &cur {
            for cand in 0..masks.len() {
                if cur.contains(&cand) {
                    continue;
                }
                let mut next: Vec<usize> = cur.iter().map(|&i| if i == out { cand } else { i }).collect();
                next.sort();
                let rows: Vec<u32> = next.iter().map(|&i| masks[i]).collect();
                if rank_by_enumeration(&rows) == rank {
                    neighbors.push((f_of(&next), out, cand, next));
                }
            }
        }
        let best = neighbors
            .into_iter()
            .min_by(|a, b| a.0.cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        match best {
            Some((nf, _, _, next)) if nf < f => {
                cur = next;
                f = nf;
                steps += 1;
            }
            _ => break,
        }
    }
    (cur, f, steps)
}
