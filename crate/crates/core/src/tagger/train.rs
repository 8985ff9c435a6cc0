use super::inference::K;
use super::{CrfModel, TaggerError, TRANS, UNARY};
use crate::corpus::LabeledSentence;
use crate::features::{token_features, FeatureConfig};
use crate::optim::{document_frequency, AdaGrad, EpochOrder, TrainConfig};
use crate::symbols::SymbolTable;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainStats {
    /// Objective at the all-zero starting point.
    pub initial_nll: f64,
    /// Regularised objective after the last epoch.
    pub final_nll: f64,
    pub sentences: usize,
    pub features: usize,
}

struct Example {
    feats: Vec<Vec<(usize, f64)>>,
    gold: Vec<usize>,
    active: Vec<usize>,
}

impl Example {
    fn new(feats: Vec<Vec<(usize, f64)>>, gold: Vec<usize>) -> Example {
        let mut active: Vec<usize> = feats.iter().flatten().map(|&(f, _)| f).collect();
        active.sort_unstable();
        active.dedup();
        Example {
            feats,
            gold,
            active,
        }
    }
}

/// Adds the data-term gradient of one sentence into `grad` (model layout)
/// and returns that sentence's negative log-likelihood.
fn accumulate(model: &CrfModel, ex: &Example, grad: &mut [f64]) -> f64 {
    let pot = model.potentials_from_emissions(model.emissions_indexed(&ex.feats));
    let marg = pot.marginals();
    let gold = &ex.gold;
    let n = gold.len();
    for t in 0..K {
        grad[t] += marg.node[0][t];
        grad[K + t] += marg.node[n - 1][t];
    }
    grad[gold[0]] -= 1.0;
    grad[K + gold[n - 1]] -= 1.0;
    for (i, table) in marg.edge.iter().enumerate() {
        for a in 0..K {
            for b in 0..K {
                grad[TRANS + a * K + b] += table[a][b];
            }
        }
        grad[TRANS + gold[i] * K + gold[i + 1]] -= 1.0;
    }
    for (i, tok) in ex.feats.iter().enumerate() {
        let node = &marg.node[i];
        for &(f, v) in tok {
            let row = &mut grad[UNARY + f * K..UNARY + (f + 1) * K];
            for t in 0..K {
                row[t] += v * node[t];
            }
            row[gold[i]] -= v;
        }
    }
    marg.log_partition - pot.path_score(gold)
}

fn index_with(model: &CrfModel, data: &[LabeledSentence], cfg: &FeatureConfig<'_>) -> Vec<Example> {
    data.iter()
        .map(|ls| {
            Example::new(
                model.index_sentence(&ls.sentence, cfg),
                ls.tags().iter().map(|t| t.index()).collect(),
            )
        })
        .collect()
}

fn squared_norm(w: &[f64]) -> f64 {
    w.iter().map(|x| x * x).sum()
}

/// Regularised negative log-likelihood of `batch` and its gradient, laid out
/// like [`CrfModel::weights`]. Empty batches give the penalty alone.
pub fn nll_and_gradient(
    model: &CrfModel,
    batch: &[LabeledSentence],
    cfg: &FeatureConfig<'_>,
    l2: f64,
) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; model.weights.len()];
    let mut nll = 0.0;
    for ex in index_with(model, batch, cfg) {
        nll += accumulate(model, &ex, &mut grad);
    }
    nll += 0.5 * l2 * squared_norm(&model.weights);
    for (g, w) in grad.iter_mut().zip(&model.weights) {
        *g += l2 * w;
    }
    (nll, grad)
}

pub fn train(
    data: &[LabeledSentence],
    cfg: &FeatureConfig<'_>,
    tcfg: &TrainConfig,
) -> Result<CrfModel, TaggerError> {
    train_with_stats(data, cfg, tcfg).map(|(m, _)| m)
}

/// Trains with per-sentence AdaGrad updates in a seeded shuffled order.
///
/// Each update carries the penalty gradient of the weights it touches,
/// scaled so that one epoch applies the full L2 term once: feature rows are
/// divided by the number of sentences containing the feature, the dense
/// begin/end/transition block by the number of sentences.
pub fn train_with_stats(
    data: &[LabeledSentence],
    cfg: &FeatureConfig<'_>,
    tcfg: &TrainConfig,
) -> Result<(CrfModel, TrainStats), TaggerError> {
    if data.is_empty() {
        return Err(TaggerError::EmptyData);
    }
    if !tcfg.is_valid() {
        return Err(TaggerError::InvalidConfig(*tcfg));
    }
    cfg.validate()?;

    let mut symbols = SymbolTable::new();
    for ls in data {
        for i in 0..ls.sentence.len() {
            for (name, _) in token_features(&ls.sentence, i, cfg)?.iter() {
                symbols.intern(name);
            }
        }
    }
    let mut model = CrfModel::zeros(symbols.names(), cfg.spec());
    model.l2 = tcfg.l2;
    let examples = index_with(&model, data, cfg);

    let mut scratch = vec![0.0; model.weights.len()];
    let initial_nll: f64 = examples
        .iter()
        .map(|ex| accumulate(&model, ex, &mut scratch))
        .sum();
    scratch.fill(0.0);

    let df = document_frequency(
        model.num_features(),
        examples.iter().map(|e| e.active.as_slice()),
    );
    let n = examples.len() as f64;
    let mut opt = AdaGrad::new(tcfg.learning_rate, model.weights.len());
    let mut order = EpochOrder::new(tcfg.seed, examples.len());
    for _ in 0..tcfg.epochs {
        for &k in order.next_epoch() {
            let ex = &examples[k];
            accumulate(&model, ex, &mut scratch);
            let w = &mut model.weights;
            for j in 0..UNARY {
                let g = scratch[j] + tcfg.l2 * w[j] / n;
                opt.step(j, &mut w[j], g);
                scratch[j] = 0.0;
            }
            for &f in &ex.active {
                let scale = tcfg.l2 / df[f] as f64;
                for j in UNARY + f * K..UNARY + (f + 1) * K {
                    let g = scratch[j] + scale * w[j];
                    opt.step(j, &mut w[j], g);
                    scratch[j] = 0.0;
                }
            }
        }
    }

    let data_nll: f64 = examples
        .iter()
        .map(|ex| accumulate(&model, ex, &mut scratch))
        .sum();
    let final_nll = data_nll + 0.5 * tcfg.l2 * squared_norm(&model.weights);
    let model = model.pruned();
    let stats = TrainStats {
        initial_nll,
        final_nll,
        sentences: data.len(),
        features: model.num_features(),
    };
    Ok((model, stats))
}
