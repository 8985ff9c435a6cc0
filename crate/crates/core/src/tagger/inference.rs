use crate::corpus::BioTag;

pub(crate) const K: usize = BioTag::COUNT;

/// Log-potentials of one sentence: per-token emission scores plus the
/// transition, begin and end scores of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Potentials {
    pub emissions: Vec<[f64; K]>,
    pub transition: [[f64; K]; K],
    pub begin: [f64; K],
    pub end: [f64; K],
}

/// Exact posterior marginals of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub log_partition: f64,
    /// `node[i][t]` = P(tag_i = t).
    pub node: Vec<[f64; K]>,
    /// `edge[i][a][b]` = P(tag_i = a, tag_{i+1} = b).
    pub edge: Vec<[[f64; K]; K]>,
}

#[inline]
fn log_sum_exp(xs: &[f64; K]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

impl Potentials {
    pub fn len(&self) -> usize {
        self.emissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.emissions.is_empty()
    }

    /// Score of one tag path, accumulated left to right as
    /// `((begin + e_0) + T) + e_1 ... + end`.
    pub fn path_score(&self, tags: &[usize]) -> f64 {
        assert_eq!(tags.len(), self.len());
        let mut s = self.begin[tags[0]] + self.emissions[0][tags[0]];
        for i in 1..tags.len() {
            s = s + self.transition[tags[i - 1]][tags[i]] + self.emissions[i][tags[i]];
        }
        s + self.end[tags[tags.len() - 1]]
    }

    /// Forward log-scores: `alpha[i][t]` sums over paths ending in `t` at `i`.
    pub fn forward(&self) -> Vec<[f64; K]> {
        let n = self.len();
        let mut alpha = vec![[0.0; K]; n];
        for t in 0..K {
            alpha[0][t] = self.begin[t] + self.emissions[0][t];
        }
        let mut buf = [0.0; K];
        for i in 1..n {
            for t in 0..K {
                for a in 0..K {
                    buf[a] = alpha[i - 1][a] + self.transition[a][t];
                }
                alpha[i][t] = log_sum_exp(&buf) + self.emissions[i][t];
            }
        }
        alpha
    }

    /// Backward log-scores, including the end potential.
    pub fn backward(&self) -> Vec<[f64; K]> {
        let n = self.len();
        let mut beta = vec![[0.0; K]; n];
        beta[n - 1] = self.end;
        let mut buf = [0.0; K];
        for i in (0..n - 1).rev() {
            for a in 0..K {
                for b in 0..K {
                    buf[b] = self.transition[a][b] + self.emissions[i + 1][b] + beta[i + 1][b];
                }
                beta[i][a] = log_sum_exp(&buf);
            }
        }
        beta
    }

    pub fn log_partition(&self) -> f64 {
        let alpha = self.forward();
        let last = alpha.last().expect("non-empty sentence");
        let mut buf = [0.0; K];
        for t in 0..K {
            buf[t] = last[t] + self.end[t];
        }
        log_sum_exp(&buf)
    }

    pub fn marginals(&self) -> Marginals {
        let n = self.len();
        let alpha = self.forward();
        let beta = self.backward();
        let mut buf = [0.0; K];
        for t in 0..K {
            buf[t] = alpha[n - 1][t] + self.end[t];
        }
        let log_z = log_sum_exp(&buf);
        let node = (0..n)
            .map(|i| {
                let mut row = [0.0; K];
                for t in 0..K {
                    row[t] = (alpha[i][t] + beta[i][t] - log_z).exp();
                }
                row
            })
            .collect();
        let edge = (0..n.saturating_sub(1))
            .map(|i| {
                let mut table = [[0.0; K]; K];
                for a in 0..K {
                    for b in 0..K {
                        table[a][b] = (alpha[i][a]
                            + self.transition[a][b]
                            + self.emissions[i + 1][b]
                            + beta[i + 1][b]
                            - log_z)
                            .exp();
                    }
                }
                table
            })
            .collect();
        Marginals {
            log_partition: log_z,
            node,
            edge,
        }
    }

    /// Highest-scoring path and its score. Ties go to the lower tag index,
    /// both at every backpointer and at the final position.
    pub fn viterbi(&self) -> (Vec<usize>, f64) {
        let n = self.len();
        let mut delta = vec![[0.0; K]; n];
        let mut back = vec![[0usize; K]; n];
        for t in 0..K {
            delta[0][t] = self.begin[t] + self.emissions[0][t];
        }
        for i in 1..n {
            for t in 0..K {
                let mut best = 0;
                let mut best_score = delta[i - 1][0] + self.transition[0][t];
                for a in 1..K {
                    let s = delta[i - 1][a] + self.transition[a][t];
                    if s > best_score {
                        best = a;
                        best_score = s;
                    }
                }
                delta[i][t] = best_score + self.emissions[i][t];
                back[i][t] = best;
            }
        }
        let mut last = 0;
        let mut best_score = delta[n - 1][0] + self.end[0];
        for t in 1..K {
            let s = delta[n - 1][t] + self.end[t];
            if s > best_score {
                last = t;
                best_score = s;
            }
        }
        let mut path = vec![0; n];
        path[n - 1] = last;
        for i in (1..n).rev() {
            path[i - 1] = back[i][path[i]];
        }
        (path, best_score)
    }
}
