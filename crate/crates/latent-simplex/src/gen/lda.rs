//! Topic-model instance generator: documents as normalized multinomial
//! word counts over convex combinations of topic vectors.

use rand::Rng;

use crate::error::Result;
use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::rng::{self, stream};

use super::dirichlet::dirichlet_with;
use super::{Instance, ModelKind, ModelParams};

/// Where the topic vectors come from.
#[derive(Debug, Clone)]
pub enum TopicSpec {
    /// k explicit probability vectors (columns must lie on the unit simplex).
    Explicit(DenseMatrix),
    /// Each topic spreads mass proportional to 1/rank over its own random
    /// permutation of a shared anchor-word set, concentrating weight on a
    /// few words so topic vectors keep Ω(1) Euclidean norm.
    PowerLaw,
}

/// Generates an instance with n documents of m_words words each over a
/// d-word vocabulary and k topics with symmetric Dirichlet(β) weights.
pub fn gen_lda(
    d: usize,
    n: usize,
    k: usize,
    m_words: usize,
    beta: f64,
    topics: &TopicSpec,
    seed: u64,
) -> Result<Instance> {
    if k < 1 || d < k {
        return Err(crate::error::invalid(format!("need d >= k >= 1, got d={d}, k={k}")));
    }
    if m_words < 1 {
        return Err(crate::error::invalid("m_words must be at least 1"));
    }
    if beta <= 0.0 {
        return Err(crate::error::invalid("beta must be positive"));
    }

    let m = match topics {
        TopicSpec::Explicit(m) => {
            validate_topics(m, d, k)?;
            m.clone()
        }
        TopicSpec::PowerLaw => power_law_topics(d, k, seed),
    };

    let mut w_rng = rng::seeded(seed, stream::GEN_WEIGHTS);
    let mut w = DenseMatrix::zeros(k, n);
    for j in 0..n {
        w.set_column(j, &dirichlet_with(beta, k, &mut w_rng));
    }
    let p = m.times(&w);

    let mut a_rng = rng::seeded(seed, stream::GEN_OBSERVED);
    let mut columns = Vec::with_capacity(n);
    let inv_m = 1.0 / m_words as f64;
    let mut counts = vec![0u32; d];
    for j in 0..n {
        counts.fill(0);
        multinomial_counts(p.column(j), m_words, &mut a_rng, &mut counts);
        let col: Vec<(usize, f64)> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i, c as f64 * inv_m))
            .collect();
        columns.push(col);
    }
    let a = SparseMatrix::new(d, n, columns)?;

    Ok(Instance {
        a,
        p,
        m,
        w,
        model: ModelKind::Lda,
        params: ModelParams::Lda { m_words, beta },
        seed,
    })
}

fn validate_topics(m: &DenseMatrix, d: usize, k: usize) -> Result<()> {
    if m.n_rows() != d || m.n_cols() != k {
        return Err(crate::error::invalid(format!(
            "topic matrix must be {d}x{k}, got {}x{}",
            m.n_rows(),
            m.n_cols()
        )));
    }
    for ell in 0..k {
        let col = m.column(ell);
        if col.iter().any(|&x| x < 0.0) {
            return Err(crate::error::invalid(format!("topic {ell} has negative mass")));
        }
        let sum: f64 = col.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(crate::error::invalid(format!(
                "topic {ell} is not on the unit simplex (sum {sum})"
            )));
        }
    }
    Ok(())
}

/// Anchor-word topics: mass ∝ 1/rank over a per-topic permutation of the
/// top ~d/10 words (at least 2k so distinct topics stay independent).
fn power_law_topics(d: usize, k: usize, seed: u64) -> DenseMatrix {
    let support = (d / 10).max(2 * k).min(d);
    let harmonic: f64 = (1..=support).map(|r| 1.0 / r as f64).sum();
    let mut rng = rng::seeded(seed, stream::GEN_MODEL);
    let mut m = DenseMatrix::zeros(d, k);
    let mut words: Vec<usize> = (0..support).collect();
    for ell in 0..k {
        shuffle(&mut words, &mut rng);
        for (rank, &word) in words.iter().enumerate() {
            m.set(word, ell, 1.0 / ((rank + 1) as f64 * harmonic));
        }
    }
    m
}

fn shuffle<R: Rng>(items: &mut [usize], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// m iid categorical draws from the probability vector, by inverse CDF.
fn multinomial_counts<R: Rng>(p: &[f64], m: usize, rng: &mut R, counts: &mut [u32]) {
    let mut cum = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &x in p {
        acc += x;
        cum.push(acc);
    }
    let total = acc;
    for _ in 0..m {
        let u = rng.gen::<f64>() * total;
        let idx = match cum.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) | Err(i) => i.min(p.len() - 1),
        };
        counts[idx] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_single_topic_is_copied_exactly() {
        let mut topic = vec![0.0; 5];
        topic[0] = 1.0;
        let spec = TopicSpec::Explicit(DenseMatrix::from_columns(5, &[topic.clone()]).unwrap());
        let inst = gen_lda(5, 12, 1, 7, 1.0, &spec, 3).unwrap();
        for j in 0..12 {
            let col = inst.a.column(j);
            assert_eq!(col, &[(0, 1.0)]);
        }
    }

    #[test]
    fn columns_are_frequency_vectors() {
        let inst = gen_lda(40, 25, 3, 9, 1.0 / 3.0, &TopicSpec::PowerLaw, 11).unwrap();
        for j in 0..25 {
            let col = inst.a.column(j);
            assert!(col.len() <= 9, "column {j} has more nonzeros than words");
            let sum: f64 = col.iter().map(|&(_, v)| v).sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            assert!(col.iter().all(|&(_, v)| v > 0.0));
        }
    }

    #[test]
    fn rejects_topics_off_the_simplex() {
        let bad = DenseMatrix::from_columns(3, &[vec![0.5, 0.2, 0.1]]).unwrap();
        assert!(gen_lda(3, 4, 1, 2, 1.0, &TopicSpec::Explicit(bad), 0).is_err());
    }

    #[test]
    fn power_law_topics_have_order_one_norm() {
        let inst = gen_lda(100, 5, 3, 10, 1.0 / 3.0, &TopicSpec::PowerLaw, 2).unwrap();
        for ell in 0..3 {
            let norm = inst.m.column_norm(ell);
            assert!(norm > 0.3, "topic {ell} norm {norm}");
            let sum: f64 = inst.m.column(ell).iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
        }
    }
}
