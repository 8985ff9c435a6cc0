//! Eleven-way phrase categorization with multinomial logistic regression
//! over the sparse phrase features.

use std::collections::HashSet;

use thiserror::Error;

use crate::corpus::{Category, CategoryExample, Phrase, Sentence};
use crate::features::{phrase_features, span_features, FeatureError, FeatureVector};
use crate::model_file::{fmt_weight, malformed, parse_weight, write_preamble, Lines, ModelError};
use crate::optim::{document_frequency, AdaGrad, EpochOrder, TrainConfig};
use crate::symbols::SymbolTable;

const C: usize = Category::COUNT;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifierError {
    #[error("training data needs at least two distinct categories, found {0}")]
    DegenerateData(usize),
    #[error("invalid training configuration: {0:?}")]
    InvalidConfig(TrainConfig),
    #[error(transparent)]
    Features(#[from] FeatureError),
}

/// Per-category probabilities in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryScores(pub [f64; C]);

impl CategoryScores {
    pub fn get(&self, c: Category) -> f64 {
        self.0[c.index()]
    }

    /// First category with the maximal probability.
    pub fn argmax(&self) -> Category {
        let mut best = 0;
        for c in 1..C {
            if self.0[c] > self.0[best] {
                best = c;
            }
        }
        Category::ALL[best]
    }
}

/// Softmax of raw class scores, shifted by the maximum for stability.
pub fn softmax(scores: &[f64; C]) -> [f64; C] {
    let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p = [0.0; C];
    let mut z = 0.0;
    for c in 0..C {
        p[c] = (scores[c] - m).exp();
        z += p[c];
    }
    for x in &mut p {
        *x /= z;
    }
    p
}

/// Feature rows (11 weights each) in symbol-table order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    symbols: SymbolTable,
    weights: Vec<f64>,
    l2: f64,
}

impl ClassifierModel {
    pub fn zeros<I, S>(features: I) -> ClassifierModel
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let symbols: SymbolTable = features.into_iter().collect();
        let weights = vec![0.0; symbols.len() * C];
        ClassifierModel {
            symbols,
            weights,
            l2: 0.0,
        }
    }

    pub fn categories(&self) -> &'static [Category; C] {
        &Category::ALL
    }

    pub fn l2(&self) -> f64 {
        self.l2
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

    pub fn weight(&self, feature: usize, c: Category) -> f64 {
        self.weights[feature * C + c.index()]
    }

    pub fn weight_mut(&mut self, feature: usize, c: Category) -> &mut f64 {
        &mut self.weights[feature * C + c.index()]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    fn index(&self, fv: &FeatureVector) -> Vec<(usize, f64)> {
        fv.iter()
            .filter_map(|(name, v)| self.symbols.get(name).map(|f| (f, v)))
            .collect()
    }

    fn scores_indexed(&self, feats: &[(usize, f64)]) -> [f64; C] {
        let mut s = [0.0; C];
        for &(f, v) in feats {
            let row = &self.weights[f * C..(f + 1) * C];
            for c in 0..C {
                s[c] += v * row[c];
            }
        }
        s
    }

    /// Raw class scores for a feature vector; unknown features are ignored.
    pub fn scores(&self, fv: &FeatureVector) -> [f64; C] {
        self.scores_indexed(&self.index(fv))
    }

    pub fn predict_features(&self, fv: &FeatureVector) -> (Category, CategoryScores) {
        let probs = CategoryScores(softmax(&self.scores(fv)));
        (probs.argmax(), probs)
    }

    pub fn predict_example(&self, ex: &CategoryExample) -> (Category, CategoryScores) {
        let fv = span_features(&ex.sentence, ex.start, ex.end)
            .expect("example span within its sentence");
        self.predict_features(&fv)
    }

    fn pruned(&self) -> ClassifierModel {
        let mut symbols = SymbolTable::new();
        let mut weights = Vec::new();
        for (f, name) in self.symbols.names().iter().enumerate() {
            let row = &self.weights[f * C..(f + 1) * C];
            if row.iter().any(|&w| w != 0.0) {
                symbols.intern(name);
                weights.extend_from_slice(row);
            }
        }
        ClassifierModel {
            symbols,
            weights,
            l2: self.l2,
        }
    }
}

pub fn predict_category(
    model: &ClassifierModel,
    phrase: &Phrase,
    sentence: &Sentence,
) -> Result<(Category, CategoryScores), FeatureError> {
    Ok(model.predict_features(&phrase_features(phrase, sentence)?))
}

fn example_features(ex: &CategoryExample) -> Result<FeatureVector, FeatureError> {
    span_features(&ex.sentence, ex.start, ex.end)
}

struct Indexed {
    feats: Vec<(usize, f64)>,
    active: Vec<usize>,
    label: usize,
}

fn accumulate(model: &ClassifierModel, ex: &Indexed, grad: &mut [f64]) -> f64 {
    let scores = model.scores_indexed(&ex.feats);
    let p = softmax(&scores);
    for &(f, v) in &ex.feats {
        let row = &mut grad[f * C..(f + 1) * C];
        for c in 0..C {
            row[c] += v * p[c];
        }
        row[ex.label] -= v;
    }
    let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln();
    lse - scores[ex.label]
}

fn index_examples(
    model: &ClassifierModel,
    data: &[CategoryExample],
) -> Result<Vec<Indexed>, FeatureError> {
    data.iter()
        .map(|ex| {
            let feats = model.index(&example_features(ex)?);
            let mut active: Vec<usize> = feats.iter().map(|&(f, _)| f).collect();
            active.sort_unstable();
            active.dedup();
            Ok(Indexed {
                feats,
                active,
                label: ex.category.index(),
            })
        })
        .collect()
}

/// Multinomial logistic loss summed over `batch`, plus
/// `(l2/2)·‖W‖²`, and its gradient in [`ClassifierModel::weights`] layout.
pub fn loss_and_gradient(
    model: &ClassifierModel,
    batch: &[CategoryExample],
    l2: f64,
) -> Result<(f64, Vec<f64>), FeatureError> {
    let mut grad = vec![0.0; model.weights.len()];
    let mut loss = 0.0;
    for ex in index_examples(model, batch)? {
        loss += accumulate(model, &ex, &mut grad);
    }
    loss += 0.5 * l2 * model.weights.iter().map(|w| w * w).sum::<f64>();
    for (g, w) in grad.iter_mut().zip(&model.weights) {
        *g += l2 * w;
    }
    Ok((loss, grad))
}

/// Per-example AdaGrad in a seeded shuffled order, with the same
/// frequency-spread L2 penalty as the tagger.
pub fn train_classifier(
    data: &[CategoryExample],
    tcfg: &TrainConfig,
) -> Result<ClassifierModel, ClassifierError> {
    let distinct: HashSet<Category> = data.iter().map(|e| e.category).collect();
    if distinct.len() < 2 {
        return Err(ClassifierError::DegenerateData(distinct.len()));
    }
    if !tcfg.is_valid() {
        return Err(ClassifierError::InvalidConfig(*tcfg));
    }
    let mut symbols = SymbolTable::new();
    for ex in data {
        for (name, _) in example_features(ex)?.iter() {
            symbols.intern(name);
        }
    }
    let mut model = ClassifierModel::zeros(symbols.names());
    model.l2 = tcfg.l2;
    let examples = index_examples(&model, data)?;
    let df = document_frequency(
        model.num_features(),
        examples.iter().map(|e| e.active.as_slice()),
    );
    let mut scratch = vec![0.0; model.weights.len()];
    let mut opt = AdaGrad::new(tcfg.learning_rate, model.weights.len());
    let mut order = EpochOrder::new(tcfg.seed, examples.len());
    for _ in 0..tcfg.epochs {
        for &k in order.next_epoch() {
            let ex = &examples[k];
            accumulate(&model, ex, &mut scratch);
            for &f in &ex.active {
                let scale = tcfg.l2 / df[f] as f64;
                for j in f * C..(f + 1) * C {
                    let g = scratch[j] + scale * model.weights[j];
                    opt.step(j, &mut model.weights[j], g);
                    scratch[j] = 0.0;
                }
            }
        }
    }
    Ok(model.pruned())
}

pub fn save_classifier(model: &ClassifierModel) -> String {
    let mut out = String::new();
    write_preamble(&mut out, "clf");
    let classes: Vec<&str> = Category::ALL.iter().map(|c| c.as_str()).collect();
    out.push_str(&format!("#classes {}\n", classes.join(" ")));
    out.push_str(&format!("#l2 {}\n", fmt_weight(model.l2)));
    for (f, name) in model.feature_names().iter().enumerate() {
        for c in Category::ALL {
            let w = model.weight(f, c);
            if w != 0.0 {
                out.push_str(&format!("U {name} {c} {}\n", fmt_weight(w)));
            }
        }
    }
    out.push_str("#end\n");
    out
}

pub fn load_classifier(text: &str) -> Result<ClassifierModel, ModelError> {
    let mut lines = Lines::new(text);
    lines.preamble("clf")?;
    let classes = lines.header("classes")?;
    let expected: Vec<&str> = Category::ALL.iter().map(|c| c.as_str()).collect();
    if classes.split(' ').collect::<Vec<_>>() != expected {
        return Err(malformed(
            lines.line_no(),
            format!("class list {classes:?} does not match the 11 categories"),
        ));
    }
    let l2 = parse_weight(lines.header("l2")?, lines.line_no())?;
    let mut symbols = SymbolTable::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut seen = HashSet::new();
    let mut ended = false;
    while let Some(line) = lines.next_line() {
        let no = lines.line_no();
        if ended {
            return Err(malformed(no, "content after #end"));
        }
        if line == "#end" {
            ended = true;
            continue;
        }
        let rest = line
            .strip_prefix("U ")
            .ok_or_else(|| malformed(no, format!("bad line {line:?}")))?;
        let mut parts = rest.rsplitn(3, ' ');
        let (Some(w), Some(class), Some(name)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(malformed(no, "expected <feature> <class> <weight>"));
        };
        if name.is_empty() {
            return Err(malformed(no, "empty feature name"));
        }
        let c: Category = class
            .parse()
            .map_err(|_| malformed(no, format!("unknown class {class:?}")))?;
        let f = symbols.intern(name);
        if weights.len() < (f + 1) * C {
            weights.resize((f + 1) * C, 0.0);
        }
        weights[f * C + c.index()] = parse_weight(w, no)?;
        if !seen.insert((f, c)) {
            return Err(malformed(no, "duplicate weight"));
        }
    }
    if !ended {
        return Err(malformed(
            lines.line_no() + 1,
            "missing #end (truncated file?)",
        ));
    }
    Ok(ClassifierModel {
        symbols,
        weights,
        l2,
    })
}
