//! Synthetic matrices with a planted, perfectly diverse basis.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{derive_seed, stream_rng};
use crate::sigmatrix::{Signature, Verdict, VerdictMatrix};

use super::records::ProblemBundle;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("cannot plant {planted_rank} disjoint nonzero rows in {d} columns")]
    InfeasibleSpec { planted_rank: usize, d: usize },
    #[error("overlap_bias must be in [0, 1], got {0}")]
    BadOverlapBias(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub planted_rank: usize,
    pub extra_dependent_rows: usize,
    pub noise_rows: usize,
    pub d: usize,
    /// Probability that each planted row joins a dependent row's combination.
    pub overlap_bias: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthInstance {
    pub matrix: VerdictMatrix,
    /// Row positions of the planted disjoint rows, ascending.
    pub planted: Vec<usize>,
}

/// Bit probability for noise rows.
const NOISE_DENSITY: f64 = 0.3;

/// Builds a matrix containing `planted_rank` pairwise-disjoint rows, GF(2)
/// combinations of them, and random nonzero noise rows, in shuffled order.
///
/// Every column is covered by at most one planted row; columns left over
/// after seeding one per planted row join a random planted row with
/// probability 1/2 and otherwise stay empty.
pub fn synth(spec: &SynthSpec) -> Result<SynthInstance, SynthError> {
    if spec.planted_rank == 0 || spec.planted_rank > spec.d {
        return Err(SynthError::InfeasibleSpec {
            planted_rank: spec.planted_rank,
            d: spec.d,
        });
    }
    if !(0.0..=1.0).contains(&spec.overlap_bias) {
        return Err(SynthError::BadOverlapBias(spec.overlap_bias));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k = spec.planted_rank;

    let mut columns: Vec<usize> = (0..spec.d).collect();
    columns.shuffle(&mut rng);
    let mut blocks: Vec<Vec<usize>> = columns[..k].iter().map(|&c| vec![c]).collect();
    for &c in &columns[k..] {
        if rng.gen_bool(0.5) {
            blocks[rng.gen_range(0..k)].push(c);
        }
    }
    let planted: Vec<Signature> = blocks
        .iter()
        .map(|b| Signature::from_ones(spec.d, b.iter().copied()))
        .collect();

    let mut rows: Vec<(bool, Signature)> = planted.iter().map(|r| (true, r.clone())).collect();
    for _ in 0..spec.extra_dependent_rows {
        let mut chosen: Vec<usize> = (0..k).filter(|_| rng.gen_bool(spec.overlap_bias)).collect();
        let want = k.min(2);
        while chosen.len() < want {
            let extra = rng.gen_range(0..k);
            if !chosen.contains(&extra) {
                chosen.push(extra);
            }
        }
        let mut row = Signature::zeros(spec.d);
        for &i in &chosen {
            row.xor_assign(&planted[i]);
        }
        rows.push((false, row));
    }
    for _ in 0..spec.noise_rows {
        let row = loop {
            let bits: Vec<bool> = (0..spec.d).map(|_| rng.gen_bool(NOISE_DENSITY)).collect();
            let r = Signature::from_bools(&bits);
            if !r.is_zero() {
                break r;
            }
        };
        rows.push((false, row));
    }
    rows.shuffle(&mut rng);

    let planted_at: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, (p, _))| *p)
        .map(|(i, _)| i)
        .collect();
    let ids = (0..rows.len()).map(|i| format!("w{i}")).collect();
    let sigs = rows.into_iter().map(|(_, r)| r).collect();
    let problem_id = format!("synth-{}", spec.seed);
    let matrix = VerdictMatrix::new(problem_id, spec.d, ids, sigs)
        .expect("synthetic rows are nonzero, equal width and uniquely named");
    Ok(SynthInstance {
        matrix,
        planted: planted_at,
    })
}

/// Turns an instance into a verdict-record bundle. Failing cells become WA,
/// with occasional RE or TLE; `correct` correct codes get runtimes skewed
/// towards the fast end.
pub fn to_bundle(
    inst: &SynthInstance,
    problem_id: &str,
    correct: usize,
    seed: u64,
) -> ProblemBundle {
    let mut rng = stream_rng(seed, 0);
    let wrong = inst
        .matrix
        .row_ids()
        .iter()
        .zip(inst.matrix.rows())
        .map(|(id, row)| {
            let verdicts = (0..row.width())
                .map(|j| {
                    if !row.get(j) {
                        return Verdict::Accepted;
                    }
                    match rng.gen_range(0..20) {
                        0 => Verdict::RuntimeError,
                        1 => Verdict::TimeLimitExceeded,
                        _ => Verdict::WrongAnswer,
                    }
                })
                .collect();
            (id.clone(), verdicts)
        })
        .collect();
    let correct = (0..correct)
        .map(|i| {
            let u: f64 = rng.gen();
            let runtime = (100.0 + 900.0 * u * u * u).round();
            (format!("c{i}"), runtime)
        })
        .collect();
    ProblemBundle {
        problem_id: problem_id.to_owned(),
        wrong,
        correct,
    }
}

/// Parameters for a multi-problem synthetic corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub problems: usize,
    pub planted_rank: usize,
    pub extra_dependent_rows: usize,
    pub noise_rows: usize,
    pub d: usize,
    pub overlap_bias: f64,
    pub correct_codes: usize,
    pub seed: u64,
}

/// `problems` independent synthetic problems named `p000`, `p001`, ...
pub fn synth_corpus(spec: &CorpusSpec) -> Result<Vec<ProblemBundle>, SynthError> {
    let width = spec.problems.saturating_sub(1).to_string().len().max(3);
    (0..spec.problems)
        .map(|i| {
            let id = format!("p{i:0width$}");
            let inst = synth(&SynthSpec {
                planted_rank: spec.planted_rank,
                extra_dependent_rows: spec.extra_dependent_rows,
                noise_rows: spec.noise_rows,
                d: spec.d,
                overlap_bias: spec.overlap_bias,
                seed: derive_seed(spec.seed, &id, "synth"),
            })?;
            Ok(to_bundle(
                &inst,
                &id,
                spec.correct_codes,
                derive_seed(spec.seed, &id, "synth-verdicts"),
            ))
        })
        .collect()
}
