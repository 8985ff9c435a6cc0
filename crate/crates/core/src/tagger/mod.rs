//! Linear-chain CRF over the five BIO tags.
//!
//! Scores are log-linear: each token contributes the dot product of its
//! sparse features with one weight column per tag, each adjacent tag pair a
//! transition weight, and the first and last tags a begin and end weight.
//! Training minimises L2-regularised negative log-likelihood with AdaGrad;
//! decoding is Viterbi.

mod inference;
mod io;
mod train;

use thiserror::Error;

use crate::corpus::{BioTag, LabeledSentence, Sentence};
use crate::features::{token_features, FeatureConfig, FeatureError, FeatureSpec};
use crate::symbols::SymbolTable;

pub use crate::optim::TrainConfig;
pub use inference::{Marginals, Potentials};
pub use io::{load_model, save_model};
pub use train::{nll_and_gradient, train, train_with_stats, TrainStats};

use inference::K;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TaggerError {
    #[error("training data is empty")]
    EmptyData,
    #[error("invalid training configuration: {0:?}")]
    InvalidConfig(TrainConfig),
    #[error(transparent)]
    Features(#[from] FeatureError),
}

const BEGIN: usize = 0;
const END: usize = K;
const TRANS: usize = 2 * K;
const UNARY: usize = 2 * K + K * K;

/// Trained CRF parameters. Weights live in one flat vector laid out as
/// begin (5), end (5), transition (5x5, row = previous tag), then one
/// 5-wide row per feature in symbol-table order.
#[derive(Debug, Clone, PartialEq)]
pub struct CrfModel {
    symbols: SymbolTable,
    weights: Vec<f64>,
    spec: FeatureSpec,
    l2: f64,
}

impl CrfModel {
    /// All-zero model over the given feature names.
    pub fn zeros<I, S>(features: I, spec: FeatureSpec) -> CrfModel
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let symbols: SymbolTable = features.into_iter().collect();
        let weights = vec![0.0; UNARY + symbols.len() * K];
        CrfModel {
            symbols,
            weights,
            spec,
            l2: 0.0,
        }
    }

    pub fn tags(&self) -> &'static [BioTag; K] {
        &BioTag::ALL
    }

    pub fn spec(&self) -> FeatureSpec {
        self.spec
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    pub fn set_l2(&mut self, l2: f64) {
        self.l2 = l2;
    }

    pub fn num_features(&self) -> usize {
        self.symbols.len()
    }

    pub fn feature_names(&self) -> &[String] {
        self.symbols.names()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.symbols.get(name)
    }

    /// Flat parameter vector (see the struct docs for the layout).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn begin(&self, tag: BioTag) -> f64 {
        self.weights[BEGIN + tag.index()]
    }

    pub fn begin_mut(&mut self, tag: BioTag) -> &mut f64 {
        &mut self.weights[BEGIN + tag.index()]
    }

    pub fn end(&self, tag: BioTag) -> f64 {
        self.weights[END + tag.index()]
    }

    pub fn end_mut(&mut self, tag: BioTag) -> &mut f64 {
        &mut self.weights[END + tag.index()]
    }

    pub fn transition(&self, from: BioTag, to: BioTag) -> f64 {
        self.weights[TRANS + from.index() * K + to.index()]
    }

    pub fn transition_mut(&mut self, from: BioTag, to: BioTag) -> &mut f64 {
        &mut self.weights[TRANS + from.index() * K + to.index()]
    }

    pub fn unary(&self, feature: usize, tag: BioTag) -> f64 {
        self.weights[UNARY + feature * K + tag.index()]
    }

    pub fn unary_mut(&mut self, feature: usize, tag: BioTag) -> &mut f64 {
        &mut self.weights[UNARY + feature * K + tag.index()]
    }

    /// Drops features whose weights are all zero; they never affect scores.
    pub fn pruned(&self) -> CrfModel {
        let mut symbols = SymbolTable::new();
        let mut weights = self.weights[..UNARY].to_vec();
        for (f, name) in self.symbols.names().iter().enumerate() {
            let row = &self.weights[UNARY + f * K..UNARY + (f + 1) * K];
            if row.iter().any(|&w| w != 0.0) {
                symbols.intern(name);
                weights.extend_from_slice(row);
            }
        }
        CrfModel {
            symbols,
            weights,
            spec: self.spec,
            l2: self.l2,
        }
    }

    /// Known-feature indices and values for every token of a sentence.
    pub(crate) fn index_sentence(
        &self,
        sentence: &Sentence,
        cfg: &FeatureConfig<'_>,
    ) -> Vec<Vec<(usize, f64)>> {
        (0..sentence.len())
            .map(|i| {
                token_features(sentence, i, cfg)
                    .expect("index within sentence")
                    .iter()
                    .filter_map(|(name, v)| self.symbols.get(name).map(|f| (f, v)))
                    .collect()
            })
            .collect()
    }

    pub(crate) fn emissions_indexed(&self, feats: &[Vec<(usize, f64)>]) -> Vec<[f64; K]> {
        feats
            .iter()
            .map(|tok| {
                let mut row = [0.0; K];
                for &(f, v) in tok {
                    let w = &self.weights[UNARY + f * K..UNARY + (f + 1) * K];
                    for t in 0..K {
                        row[t] += v * w[t];
                    }
                }
                row
            })
            .collect()
    }

    pub(crate) fn potentials_from_emissions(&self, emissions: Vec<[f64; K]>) -> Potentials {
        let mut transition = [[0.0; K]; K];
        for (a, row) in transition.iter_mut().enumerate() {
            row.copy_from_slice(&self.weights[TRANS + a * K..TRANS + (a + 1) * K]);
        }
        let mut begin = [0.0; K];
        let mut end = [0.0; K];
        begin.copy_from_slice(&self.weights[BEGIN..BEGIN + K]);
        end.copy_from_slice(&self.weights[END..END + K]);
        Potentials {
            emissions,
            transition,
            begin,
            end,
        }
    }

    pub fn potentials(&self, sentence: &Sentence, cfg: &FeatureConfig<'_>) -> Potentials {
        self.potentials_from_emissions(sequence_scores(self, sentence, cfg))
    }
}

/// Emission score matrix: entry `(i, t)` is token `i`'s features dotted with
/// the weight column of tag `t`. Features unknown to the model score 0.
pub fn sequence_scores(
    model: &CrfModel,
    sentence: &Sentence,
    cfg: &FeatureConfig<'_>,
) -> Vec<[f64; K]> {
    model.emissions_indexed(&model.index_sentence(sentence, cfg))
}

pub fn log_partition(model: &CrfModel, sentence: &Sentence, cfg: &FeatureConfig<'_>) -> f64 {
    model.potentials(sentence, cfg).log_partition()
}

pub fn posterior_marginals(
    model: &CrfModel,
    sentence: &Sentence,
    cfg: &FeatureConfig<'_>,
) -> Marginals {
    model.potentials(sentence, cfg).marginals()
}

pub fn viterbi(model: &CrfModel, sentence: &Sentence, cfg: &FeatureConfig<'_>) -> Vec<BioTag> {
    viterbi_with_score(model, sentence, cfg).0
}

pub fn viterbi_with_score(
    model: &CrfModel,
    sentence: &Sentence,
    cfg: &FeatureConfig<'_>,
) -> (Vec<BioTag>, f64) {
    let (path, score) = model.potentials(sentence, cfg).viterbi();
    (path.into_iter().map(|t| BioTag::ALL[t]).collect(), score)
}

/// Score of a given tag path under the model.
pub fn path_score(
    model: &CrfModel,
    sentence: &Sentence,
    cfg: &FeatureConfig<'_>,
    tags: &[BioTag],
) -> f64 {
    let idx: Vec<usize> = tags.iter().map(|t| t.index()).collect();
    model.potentials(sentence, cfg).path_score(&idx)
}

/// Tags every sentence with Viterbi, keeping ids and spots.
pub fn tag_sentences(
    model: &CrfModel,
    sentences: &[Sentence],
    cfg: &FeatureConfig<'_>,
) -> Vec<LabeledSentence> {
    sentences
        .iter()
        .map(|s| {
            LabeledSentence::new(s.clone(), viterbi(model, s, cfg)).expect("one tag per token")
        })
        .collect()
}
