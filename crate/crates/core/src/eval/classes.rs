use super::{ratio, EvalError, SpanPrf};
use crate::corpus::{Category, Polarity};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClassPrf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// Confusion-matrix based metrics over a fixed label set.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub labels: Vec<String>,
    /// `confusion[gold][pred]`.
    pub confusion: Vec<Vec<usize>>,
    pub per_class: Vec<ClassPrf>,
    /// Support-weighted averages of the per-class metrics.
    pub weighted: SpanPrf,
    /// Unweighted mean over labels that occur in gold or prediction.
    pub macro_avg: SpanPrf,
    pub accuracy: f64,
    pub support: usize,
}

impl ClassMetrics {
    /// Builds metrics from parallel label-index slices.
    pub fn from_indices(labels: Vec<String>, gold: &[usize], pred: &[usize]) -> ClassMetrics {
        assert_eq!(gold.len(), pred.len());
        let k = labels.len();
        let mut confusion = vec![vec![0usize; k]; k];
        for (&g, &p) in gold.iter().zip(pred) {
            confusion[g][p] += 1;
        }
        let n = gold.len();
        let mut per_class = Vec::with_capacity(k);
        let (mut wp, mut wr, mut wf) = (0.0, 0.0, 0.0);
        let (mut mp, mut mr, mut mf, mut present) = (0.0, 0.0, 0.0, 0usize);
        let mut correct = 0;
        for c in 0..k {
            let tp = confusion[c][c];
            let support: usize = confusion[c].iter().sum();
            let predicted: usize = confusion.iter().map(|row| row[c]).sum();
            let prf = SpanPrf::new(ratio(tp as f64, predicted), ratio(tp as f64, support));
            correct += tp;
            let s = support as f64;
            wp += s * prf.precision;
            wr += s * prf.recall;
            wf += s * prf.f1;
            if support + predicted > 0 {
                mp += prf.precision;
                mr += prf.recall;
                mf += prf.f1;
                present += 1;
            }
            per_class.push(ClassPrf {
                precision: prf.precision,
                recall: prf.recall,
                f1: prf.f1,
                support,
            });
        }
        ClassMetrics {
            labels,
            confusion,
            per_class,
            weighted: SpanPrf {
                precision: ratio(wp, n),
                recall: ratio(wr, n),
                f1: ratio(wf, n),
            },
            macro_avg: SpanPrf {
                precision: ratio(mp, present),
                recall: ratio(mr, present),
                f1: ratio(mf, present),
            },
            accuracy: ratio(correct as f64, n),
            support: n,
        }
    }

    fn categories(gold: &[Category], pred: &[Category]) -> ClassMetrics {
        let labels = Category::ALL.iter().map(|c| c.to_string()).collect();
        let g: Vec<usize> = gold.iter().map(|c| c.index()).collect();
        let p: Vec<usize> = pred.iter().map(|c| c.index()).collect();
        ClassMetrics::from_indices(labels, &g, &p)
    }

    pub fn class(&self, label: &str) -> Option<&ClassPrf> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| &self.per_class[i])
    }
}

/// Metrics over all instances and over the inclusion-only and
/// exclusion-only subsets (by gold polarity).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub total: ClassMetrics,
    pub inclusion: ClassMetrics,
    pub exclusion: ClassMetrics,
}

fn check(gold: usize, pred: usize) -> Result<(), EvalError> {
    if gold != pred {
        return Err(EvalError::LengthMismatch { gold, pred });
    }
    if gold == 0 {
        return Err(EvalError::EmptyInput);
    }
    Ok(())
}

/// Report without polarity information; both partitions are empty.
pub fn classification_report(
    gold: &[Category],
    pred: &[Category],
) -> Result<ClassReport, EvalError> {
    classification_report_with_polarity(gold, pred, &vec![None; gold.len()])
}

pub fn classification_report_with_polarity(
    gold: &[Category],
    pred: &[Category],
    polarity: &[Option<Polarity>],
) -> Result<ClassReport, EvalError> {
    check(gold.len(), pred.len())?;
    if polarity.len() != gold.len() {
        return Err(EvalError::LengthMismatch {
            gold: gold.len(),
            pred: polarity.len(),
        });
    }
    let subset = |want: Polarity| {
        let (g, p): (Vec<Category>, Vec<Category>) = gold
            .iter()
            .zip(pred)
            .zip(polarity)
            .filter(|(_, pol)| **pol == Some(want))
            .map(|((g, p), _)| (*g, *p))
            .unzip();
        ClassMetrics::categories(&g, &p)
    };
    Ok(ClassReport {
        total: ClassMetrics::categories(gold, pred),
        inclusion: subset(Polarity::Inclusion),
        exclusion: subset(Polarity::Exclusion),
    })
}
