//! Best-improvement swap search under the rank constraint.
//!
//! Scores are tracked as sums of pairwise Jaccard terms (the objective times
//! the fixed pair count). Candidates are screened in `f64`; any comparison
//! closer than the float error bound is settled with exact rationals, so
//! every accept/reject decision is exact.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::fraction::Fraction;
use crate::sigmatrix::{
    overlap, pair_count, pair_mean, Coordinates, JaccardDelta, JaccardSum, Signature, VerdictMatrix,
};

/// An improving swap: the new basis (sorted) and its diversity.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub indices: Vec<usize>,
    pub diversity: Fraction,
    pub swapped_out: usize,
    pub swapped_in: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    StepBudget,
    ZeroDiversity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOutcome {
    pub indices: Vec<usize>,
    pub diversity: Fraction,
    pub steps: usize,
    pub termination: Termination,
    /// Diversity of the start basis followed by every accepted move.
    pub path: Vec<Fraction>,
}

pub(crate) fn exact_diversity(m: &VerdictMatrix, indices: &[usize]) -> Fraction {
    let rows: Vec<&Signature> = indices.iter().map(|&i| m.row(i)).collect();
    pair_mean(&rows)
}

/// Matrices up to this many rows get a precomputed pair table.
const TABLE_MAX_ROWS: usize = 2048;

/// Pairwise `(shared, union)` counts for the rows of one matrix, computed
/// once and shared by every step and restart of a search.
pub(crate) struct Overlaps<'m> {
    m: &'m VerdictMatrix,
    table: Option<Vec<(u32, u32)>>,
}

impl<'m> Overlaps<'m> {
    pub(crate) fn new(m: &'m VerdictMatrix) -> Self {
        let n = m.len();
        let table = (n <= TABLE_MAX_ROWS).then(|| {
            let mut t = vec![(0, 0); n * n];
            for i in 0..n {
                for j in i..n {
                    let o = overlap(m.row(i), m.row(j));
                    t[i * n + j] = o;
                    t[j * n + i] = o;
                }
            }
            t
        });
        Self { m, table }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> (u32, u32) {
        match &self.table {
            Some(t) => t[i * self.m.len() + j],
            None => overlap(self.m.row(i), self.m.row(j)),
        }
    }

    #[inline]
    fn jaccard(&self, i: usize, j: usize) -> f64 {
        let (shared, union) = self.get(i, j);
        debug_assert!(union > 0);
        f64::from(shared) / f64::from(union)
    }

    fn diversity(&self, indices: &[usize]) -> Fraction {
        let pairs = pair_count(indices.len());
        if pairs == 0 {
            return Fraction::zero();
        }
        let mut acc = JaccardSum::new();
        for (x, &i) in indices.iter().enumerate() {
            for &j in &indices[x + 1..] {
                let (shared, union) = self.get(i, j);
                acc.add(shared, union);
            }
        }
        acc.mean_over(pairs)
    }

    /// Exact change in the pair sum when `basis[pos]` is replaced by `cand`.
    fn swap_delta(&self, basis: &[usize], pos: usize, cand: usize) -> JaccardDelta {
        let out = basis[pos];
        let mut d = JaccardDelta::default();
        for (x, &b) in basis.iter().enumerate() {
            if x == pos {
                continue;
            }
            let (shared, union) = self.get(cand, b);
            d.add(shared, union, 1);
            let (shared, union) = self.get(out, b);
            d.add(shared, union, -1);
        }
        d
    }
}

/// Scans every admissible swap of `basis` and returns the one with the
/// strictly smallest diversity below `current`, if any. Ties go to the
/// smallest `(out, in)` row-index pair.
///
/// `basis` must be a row basis of `m`; `current` its diversity.
pub fn best_neighbor(basis: &[usize], m: &VerdictMatrix, current: &Fraction) -> Option<Neighbor> {
    best_neighbor_in(&Overlaps::new(m), basis, current)
}

fn best_neighbor_in(ov: &Overlaps, basis: &[usize], current: &Fraction) -> Option<Neighbor> {
    let m = ov.m;
    let k = basis.len();
    let pairs = pair_count(k);
    if pairs == 0 {
        // Every basis of size < 2 scores 0.
        return None;
    }
    let n = m.len();
    let mut sorted = basis.to_vec();
    sorted.sort_unstable();
    let mut in_basis = vec![false; n];
    for &i in &sorted {
        in_basis[i] = true;
    }

    // row_sum[a]: similarity of basis member a to the other members.
    let mut row_sum = vec![0.0f64; k];
    for a in 0..k {
        for b in a + 1..k {
            let j = ov.jaccard(sorted[a], sorted[b]);
            row_sum[a] += j;
            row_sum[b] += j;
        }
    }
    let total: f64 = row_sum.iter().sum::<f64>() / 2.0;
    // to_all[c]: similarity of outside row c to every member.
    let outside: Vec<usize> = (0..n).filter(|&c| !in_basis[c]).collect();
    let to_all: Vec<f64> = outside
        .iter()
        .map(|&c| sorted.iter().map(|&i| ov.jaccard(c, i)).sum())
        .collect();

    let tol = 1e-9 * (1.0 + pairs as f64);
    let mut best_approx = total;
    // Exact change in the pair sum for the best swap so far; the current
    // basis is the zero change.
    let mut best_delta: Option<JaccardDelta> = Some(JaccardDelta::default());
    let mut best: Option<(usize, usize)> = None;
    // A swap keeps full rank iff the incoming row's representation in the
    // current basis uses the outgoing row.
    let basis_rows: Vec<&Signature> = sorted.iter().map(|&i| m.row(i)).collect();
    let coords = Coordinates::new(&basis_rows);
    let mut coord_of: Vec<Option<Signature>> = vec![None; outside.len()];
    for (a, &out) in sorted.iter().enumerate() {
        for (c_pos, &cand) in outside.iter().enumerate() {
            let approx = total - row_sum[a] + to_all[c_pos] - ov.jaccard(cand, out);
            let mut cand_delta = None;
            let better = if approx < best_approx - tol {
                true
            } else if approx > best_approx + tol {
                false
            } else {
                let exact = ov.swap_delta(&sorted, a, cand);
                let reference = best_delta.get_or_insert_with(|| {
                    let (o, i) = best.expect("best_delta is only cleared once a swap is recorded");
                    let pos = sorted.iter().position(|&x| x == o).expect("swapped-out row is in the basis");
                    ov.swap_delta(&sorted, pos, i)
                });
                let lt = exact.cmp_to(reference).is_lt();
                cand_delta = Some(exact);
                lt
            };
            if !better {
                continue;
            }
            let coord = coord_of[c_pos].get_or_insert_with(|| {
                coords.of(m.row(cand)).expect("a row basis spans every row")
            });
            if !coord.get(a) {
                continue;
            }
            best = Some((out, cand));
            best_approx = approx;
            best_delta = cand_delta;
        }
    }

    let (out, cand) = best?;
    let indices = swapped(&sorted, out, cand);
    let diversity = ov.diversity(&indices);
    debug_assert!(diversity < *current);
    Some(Neighbor {
        indices,
        diversity,
        swapped_out: out,
        swapped_in: cand,
    })
}

fn swapped(sorted: &[usize], out: usize, cand: usize) -> Vec<usize> {
    let mut v: Vec<usize> = sorted.iter().map(|&i| if i == out { cand } else { i }).collect();
    v.sort_unstable();
    v
}

/// Repeatedly moves to the best neighbor until none improves, `max_steps`
/// moves have been made, or (with `stop_at_zero`) the diversity reaches 0.
pub fn local_search(
    start: &[usize],
    m: &VerdictMatrix,
    max_steps: usize,
    stop_at_zero: bool,
) -> LocalOutcome {
    local_search_in(&Overlaps::new(m), start, max_steps, stop_at_zero)
}

pub(crate) fn local_search_in(
    ov: &Overlaps,
    start: &[usize],
    max_steps: usize,
    stop_at_zero: bool,
) -> LocalOutcome {
    let mut indices = start.to_vec();
    indices.sort_unstable();
    let mut diversity = ov.diversity(&indices);
    let mut path = vec![diversity.clone()];
    let mut steps = 0;
    let termination = loop {
        if stop_at_zero && diversity.is_zero() {
            break Termination::ZeroDiversity;
        }
        if steps == max_steps {
            break Termination::StepBudget;
        }
        match best_neighbor_in(ov, &indices, &diversity) {
            None => break Termination::Converged,
            Some(next) => {
                indices = next.indices;
                diversity = next.diversity;
                path.push(diversity.clone());
                steps += 1;
            }
        }
    };
    LocalOutcome {
        indices,
        diversity,
        steps,
        termination,
        path,
    }
}
