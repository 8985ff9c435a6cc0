use std::collections::HashSet;

use super::inference::K;
use super::{CrfModel, UNARY};
use crate::corpus::BioTag;
use crate::features::FeatureSpec;
use crate::model_file::{fmt_weight, malformed, parse_weight, write_preamble, Lines, ModelError};
use crate::symbols::SymbolTable;

/// Serializes a model. Zero weights are omitted, so features whose weights
/// are all zero do not survive a reload; trained models are already pruned.
pub fn save_model(model: &CrfModel) -> String {
    let mut out = String::new();
    write_preamble(&mut out, "crf");
    let tags: Vec<&str> = BioTag::ALL.iter().map(|t| t.as_str()).collect();
    out.push_str(&format!("#tags {}\n", tags.join(" ")));
    let spec = model.spec;
    out.push_str(&format!(
        "#features window={} affixes={} shape={} embeddings={}\n",
        spec.window,
        u8::from(spec.use_affixes),
        u8::from(spec.use_shape),
        spec.embedding_dim.unwrap_or(0)
    ));
    out.push_str(&format!("#l2 {}\n", fmt_weight(model.l2)));
    for t in BioTag::ALL {
        let w = model.begin(t);
        if w != 0.0 {
            out.push_str(&format!("B {t} {}\n", fmt_weight(w)));
        }
    }
    for t in BioTag::ALL {
        let w = model.end(t);
        if w != 0.0 {
            out.push_str(&format!("E {t} {}\n", fmt_weight(w)));
        }
    }
    for a in BioTag::ALL {
        for b in BioTag::ALL {
            let w = model.transition(a, b);
            if w != 0.0 {
                out.push_str(&format!("T {a} {b} {}\n", fmt_weight(w)));
            }
        }
    }
    for (f, name) in model.feature_names().iter().enumerate() {
        debug_assert!(!name.contains(['\t', '\n']));
        for t in BioTag::ALL {
            let w = model.unary(f, t);
            if w != 0.0 {
                out.push_str(&format!("U {name} {t} {}\n", fmt_weight(w)));
            }
        }
    }
    out.push_str("#end\n");
    out
}

fn parse_tag(s: &str, line: usize) -> Result<BioTag, ModelError> {
    s.parse()
        .map_err(|_| malformed(line, format!("unknown tag {s:?}")))
}

fn parse_spec(s: &str, line: usize) -> Result<FeatureSpec, ModelError> {
    let mut spec = FeatureSpec::default();
    let mut seen = 0;
    for kv in s.split(' ') {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| malformed(line, format!("bad feature setting {kv:?}")))?;
        let num: usize = v
            .parse()
            .map_err(|_| malformed(line, format!("bad value in {kv:?}")))?;
        match k {
            "window" => spec.window = num,
            "affixes" => spec.use_affixes = num != 0,
            "shape" => spec.use_shape = num != 0,
            "embeddings" => spec.embedding_dim = (num > 0).then_some(num),
            _ => return Err(malformed(line, format!("unknown feature setting {k:?}"))),
        }
        seen += 1;
    }
    if seen != 4 {
        return Err(malformed(
            line,
            "expected window, affixes, shape and embeddings settings",
        ));
    }
    Ok(spec)
}

pub fn load_model(text: &str) -> Result<CrfModel, ModelError> {
    let mut lines = Lines::new(text);
    lines.preamble("crf")?;
    let tags = lines.header("tags")?;
    let expected: Vec<&str> = BioTag::ALL.iter().map(|t| t.as_str()).collect();
    if tags.split(' ').collect::<Vec<_>>() != expected {
        return Err(malformed(
            lines.line_no(),
            format!("tag set {tags:?} does not match {:?}", expected.join(" ")),
        ));
    }
    let spec = parse_spec(lines.header("features")?, lines.line_no())?;
    let l2 = parse_weight(lines.header("l2")?, lines.line_no())?;

    let mut dense = vec![0.0; UNARY];
    let mut symbols = SymbolTable::new();
    let mut unary: Vec<f64> = Vec::new();
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
        let (kind, rest) = line
            .split_once(' ')
            .ok_or_else(|| malformed(no, format!("bad line {line:?}")))?;
        let slot = match kind {
            "B" | "E" => {
                let (tag, w) = rest
                    .split_once(' ')
                    .ok_or_else(|| malformed(no, "expected <tag> <weight>"))?;
                let t = parse_tag(tag, no)?.index();
                let base = if kind == "B" { 0 } else { K };
                dense[base + t] = parse_weight(w, no)?;
                format!("{kind} {tag}")
            }
            "T" => {
                let parts: Vec<&str> = rest.split(' ').collect();
                let [a, b, w] = parts[..] else {
                    return Err(malformed(no, "expected <from> <to> <weight>"));
                };
                let (ai, bi) = (parse_tag(a, no)?.index(), parse_tag(b, no)?.index());
                dense[2 * K + ai * K + bi] = parse_weight(w, no)?;
                format!("T {a} {b}")
            }
            "U" => {
                let mut parts = rest.rsplitn(3, ' ');
                let (Some(w), Some(tag), Some(name)) = (parts.next(), parts.next(), parts.next())
                else {
                    return Err(malformed(no, "expected <feature> <tag> <weight>"));
                };
                if name.is_empty() {
                    return Err(malformed(no, "empty feature name"));
                }
                let t = parse_tag(tag, no)?.index();
                let f = symbols.intern(name);
                if unary.len() < (f + 1) * K {
                    unary.resize((f + 1) * K, 0.0);
                }
                unary[f * K + t] = parse_weight(w, no)?;
                format!("U {name} {tag}")
            }
            _ => return Err(malformed(no, format!("unknown record type {kind:?}"))),
        };
        if !seen.insert(slot) {
            return Err(malformed(no, "duplicate weight"));
        }
    }
    if !ended {
        return Err(malformed(
            lines.line_no() + 1,
            "missing #end (truncated file?)",
        ));
    }
    dense.extend(unary);
    Ok(CrfModel {
        symbols,
        weights: dense,
        spec,
        l2,
    })
}
