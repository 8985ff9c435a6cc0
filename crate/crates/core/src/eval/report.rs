//! Plain-text tables and `key=value` renderings of the reports.
//!
//! Keys are dot-separated paths, for example `inclusion.binary.f1`,
//! `total.weighted.precision`, `class.price.recall` or `overall.f1`. Values
//! use the shortest decimal that round-trips.

use std::fmt::Write as _;

use super::classes::{ClassMetrics, ClassReport};
use super::e2e::EndToEndReport;
use super::{EvalReport, SpanPrf};
use crate::corpus::Polarity;

fn kv_prf(out: &mut String, prefix: &str, m: &SpanPrf) {
    let _ = writeln!(out, "{prefix}.precision={}", m.precision);
    let _ = writeln!(out, "{prefix}.recall={}", m.recall);
    let _ = writeln!(out, "{prefix}.f1={}", m.f1);
}

fn row(out: &mut String, name: &str, m: &SpanPrf) {
    let _ = writeln!(
        out,
        "{name:<24} {:>9.4} {:>9.4} {:>9.4}",
        m.precision, m.recall, m.f1
    );
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        "{:<24} {:>9} {:>9} {:>9}",
        "", "precision", "recall", "f1"
    );
}

impl EvalReport {
    /// Smallest binary-overlap F1 across the two polarities.
    pub fn min_binary_f1(&self) -> f64 {
        self.inclusion.binary.f1.min(self.exclusion.binary.f1)
    }

    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for p in Polarity::ALL {
            let side = self.polarity(p);
            kv_prf(&mut out, &format!("{p}.binary"), &side.binary);
            kv_prf(&mut out, &format!("{p}.proportional"), &side.proportional);
            let _ = writeln!(out, "{p}.gold_phrases={}", side.gold_phrases);
            let _ = writeln!(out, "{p}.predicted_phrases={}", side.predicted_phrases);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        header(&mut out);
        for p in Polarity::ALL {
            let side = self.polarity(p);
            row(&mut out, &format!("{p} binary"), &side.binary);
            row(&mut out, &format!("{p} proportional"), &side.proportional);
        }
        for p in Polarity::ALL {
            let side = self.polarity(p);
            let _ = writeln!(
                out,
                "{p}: {} gold phrases, {} predicted",
                side.gold_phrases, side.predicted_phrases
            );
        }
        out
    }
}

fn kv_metrics(out: &mut String, prefix: &str, m: &ClassMetrics, per_class: bool) {
    kv_prf(out, &format!("{prefix}.weighted"), &m.weighted);
    kv_prf(out, &format!("{prefix}.macro"), &m.macro_avg);
    let _ = writeln!(out, "{prefix}.accuracy={}", m.accuracy);
    let _ = writeln!(out, "{prefix}.support={}", m.support);
    if per_class {
        for (label, c) in m.labels.iter().zip(&m.per_class) {
            let _ = writeln!(out, "class.{label}.precision={}", c.precision);
            let _ = writeln!(out, "class.{label}.recall={}", c.recall);
            let _ = writeln!(out, "class.{label}.f1={}", c.f1);
            let _ = writeln!(out, "class.{label}.support={}", c.support);
        }
    }
}

fn text_metrics(out: &mut String, m: &ClassMetrics) {
    let _ = writeln!(
        out,
        "{:<24} {:>9} {:>9} {:>9} {:>8}",
        "class", "precision", "recall", "f1", "support"
    );
    for (label, c) in m.labels.iter().zip(&m.per_class) {
        let _ = writeln!(
            out,
            "{label:<24} {:>9.4} {:>9.4} {:>9.4} {:>8}",
            c.precision, c.recall, c.f1, c.support
        );
    }
}

impl ClassReport {
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        kv_metrics(&mut out, "total", &self.total, true);
        kv_metrics(&mut out, "inclusion", &self.inclusion, false);
        kv_metrics(&mut out, "exclusion", &self.exclusion, false);
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        text_metrics(&mut out, &self.total);
        out.push('\n');
        header(&mut out);
        for (name, m) in [
            ("total", &self.total),
            ("inclusion", &self.inclusion),
            ("exclusion", &self.exclusion),
        ] {
            row(&mut out, &format!("{name} weighted"), &m.weighted);
            row(&mut out, &format!("{name} macro"), &m.macro_avg);
        }
        let _ = writeln!(
            out,
            "accuracy {:.4} over {} phrases",
            self.total.accuracy, self.total.support
        );
        out
    }
}

impl EndToEndReport {
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        kv_prf(&mut out, "overall", &self.overall);
        kv_prf(&mut out, "inclusion", &self.inclusion);
        kv_prf(&mut out, "exclusion", &self.exclusion);
        let _ = writeln!(out, "gold_phrases={}", self.gold_phrases);
        let _ = writeln!(out, "predicted_phrases={}", self.predicted_phrases);
        let _ = writeln!(out, "correct_predictions={}", self.correct_predictions());
        let _ = writeln!(out, "sink_predictions={}", self.sink_predictions());
        kv_metrics(&mut out, "labels", &self.classes, true);
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        header(&mut out);
        row(&mut out, "overall", &self.overall);
        row(&mut out, "inclusion", &self.inclusion);
        row(&mut out, "exclusion", &self.exclusion);
        let _ = writeln!(
            out,
            "{} gold phrases, {} predicted, {} correct, {} in sink",
            self.gold_phrases,
            self.predicted_phrases,
            self.correct_predictions(),
            self.sink_predictions()
        );
        out.push('\n');
        text_metrics(&mut out, &self.classes);
        out
    }
}
