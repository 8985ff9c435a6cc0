//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when an evaluation falls below `--min-f1`,
//! 2 on usage, I/O, parse or model errors. Results go to `--out` when given
//! and to standard output otherwise; progress summaries go to standard error.

mod pipeline;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classifier::{load_classifier, save_classifier, train_classifier, ClassifierModel};
use crate::corpus::{
    category_stats, dataset_stats, filter_sentences, load_lexicon, parse_category_dataset,
    parse_dataset, parse_sentences, raw_sentences, serialize_category_dataset, serialize_dataset,
    train_test_split, BioTag, Category, CategoryExample, LabeledSentence, Phrase, Sentence,
};
use crate::eval::{classification_report_with_polarity, end_to_end, evaluate_tag_file, EvalError};
use crate::features::{load_embeddings, EmbeddingTable, FeatureConfig};
use crate::tagger::{load_model, save_model, tag_sentences, train_with_stats, CrfModel};
use crate::TrainConfig;

pub use pipeline::{
    classify_tagged, run_pipeline, PipelineOutput, PipelineParseError, PipelinePhrase,
    PipelineRecord,
};

#[derive(Debug, Parser)]
#[command(
    name = "incex",
    version,
    about = "Inclusion/exclusion phrase mining for reviews"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print tag and category histograms of a dataset.
    Stats {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = DataKind::Spans)]
        kind: DataKind,
    },
    /// Keep raw sentences (one per line) that mention a lexicon keyword.
    Filter {
        sentences: PathBuf,
        lexicon: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a dataset into seeded train and test parts.
    Split {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = DataKind::Spans)]
        kind: DataKind,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long)]
        train_out: PathBuf,
        #[arg(long)]
        test_out: PathBuf,
    },
    /// Train the CRF phrase tagger on a span dataset.
    TrainTagger {
        train: PathBuf,
        #[command(flatten)]
        opt: TrainArgs,
        /// Context window of the word features.
        #[arg(long, default_value_t = 1)]
        window: usize,
        #[arg(long)]
        no_affixes: bool,
        #[arg(long)]
        no_shape: bool,
        /// Word vectors in `word v1 ... vD` text format.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tag sentences with a trained CRF; output is a span dataset.
    Tag {
        model: PathBuf,
        input: PathBuf,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the phrase category classifier.
    TrainClassifier {
        train: PathBuf,
        #[arg(long, value_enum, default_value_t = DataKind::Categories)]
        input_kind: DataKind,
        #[command(flatten)]
        opt: TrainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assign a category to phrases; output is `category<TAB>phrase` lines.
    Classify {
        model: PathBuf,
        input: PathBuf,
        /// `categories`: one phrase per line, optionally after a category
        /// column. `spans`: a tagged span dataset, phrases keep their context.
        #[arg(long, value_enum, default_value_t = DataKind::Categories)]
        input_kind: DataKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score predictions against gold annotations.
    Eval {
        gold: PathBuf,
        pred: PathBuf,
        #[arg(long, value_enum, default_value_t = EvalMode::Spans)]
        mode: EvalMode,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        /// Exit with status 1 when the headline F1 is below this value.
        #[arg(long)]
        min_f1: Option<f64>,
        /// Seed of the split that produced the gold file, echoed in the report.
        #[arg(long)]
        split_seed: Option<u64>,
        /// Test fraction of that split, echoed in the report.
        #[arg(long)]
        test_fraction: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tokenize (with --raw), tag, decode phrases and categorize them.
    Pipeline {
        tagger: PathBuf,
        classifier: PathBuf,
        input: PathBuf,
        /// Input holds one raw sentence per line instead of a token file.
        #[arg(long)]
        raw: bool,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DataKind {
    /// Token-per-line span dataset.
    Spans,
    /// `category<TAB>phrase` lines.
    Categories,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalMode {
    Spans,
    Classes,
    E2e,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Kv,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    l2: f64,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl TrainArgs {
    fn config(&self) -> TrainConfig {
        TrainConfig {
            l2: self.l2,
            epochs: self.epochs,
            learning_rate: self.lr,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long, default_value_t = 42)]
    split_seed: u64,
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
}

enum Outcome {
    Ok,
    BelowThreshold(String),
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::BelowThreshold(msg)) => {
            let _ = writeln!(err, "{msg}");
            1
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => out
            .write_all(text.as_bytes())
            .context("cannot write output"),
    }
}

fn read_spans(path: &Path) -> Result<Vec<LabeledSentence>> {
    parse_dataset(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn read_categories(path: &Path) -> Result<Vec<CategoryExample>> {
    parse_category_dataset(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn read_embeddings(path: Option<&Path>) -> Result<Option<EmbeddingTable>> {
    path.map(|p| load_embeddings(&read(p)?, None).with_context(|| format!("in {}", p.display())))
        .transpose()
}

fn read_tagger(path: &Path) -> Result<CrfModel> {
    load_model(&read(path)?).with_context(|| format!("in tagger model {}", path.display()))
}

fn read_classifier(path: &Path) -> Result<ClassifierModel> {
    load_classifier(&read(path)?).with_context(|| format!("in classifier model {}", path.display()))
}

fn tagger_config<'a>(
    model: &CrfModel,
    emb: Option<&'a EmbeddingTable>,
) -> Result<FeatureConfig<'a>> {
    FeatureConfig::from_spec(model.spec(), emb).map_err(|_| match model.spec().embedding_dim {
        Some(d) => anyhow!(
            "the tagger was trained with {d}-dimensional embeddings; pass matching --embeddings"
        ),
        None => anyhow!("the tagger was trained without embeddings; drop --embeddings"),
    })
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Stats { path, kind } => {
            let text = match kind {
                DataKind::Spans => span_stats(&read_spans(&path)?),
                DataKind::Categories => {
                    let examples = read_categories(&path)?;
                    if examples.is_empty() {
                        bail!("{}: no examples", path.display());
                    }
                    let mut s = format!("examples={}\n", examples.len());
                    for (c, n) in Category::ALL.iter().zip(category_stats(&examples)) {
                        let _ = writeln!(s, "category.{c}={n}");
                    }
                    s
                }
            };
            emit(out, None, &text)?;
        }
        Command::Filter {
            sentences,
            lexicon,
            out: path,
        } => {
            let lex = load_lexicon(&read(&lexicon)?)
                .with_context(|| format!("in lexicon {}", lexicon.display()))?;
            let raw = raw_sentences(&read(&sentences)?);
            let mut text = String::new();
            for (s, cats) in filter_sentences(&raw, &lex) {
                let cats: Vec<&str> = cats.iter().map(|c| c.as_str()).collect();
                let words: Vec<&str> = s.words().collect();
                let _ = writeln!(text, "{}\t{}\t{}", s.id, cats.join(","), words.join(" "));
            }
            emit(out, path.as_deref(), &text)?;
        }
        Command::Split {
            path,
            kind,
            split,
            train_out,
            test_out,
        } => {
            if !(0.0..=1.0).contains(&split.test_fraction) {
                bail!("--test-fraction must lie in [0, 1]");
            }
            let (n_train, n_test, train, test) = match kind {
                DataKind::Spans => {
                    let data = read_spans(&path)?;
                    let (a, b) = train_test_split(&data, split.test_fraction, split.split_seed);
                    (
                        a.len(),
                        b.len(),
                        serialize_dataset(&a),
                        serialize_dataset(&b),
                    )
                }
                DataKind::Categories => {
                    let data = read_categories(&path)?;
                    let (a, b) = train_test_split(&data, split.test_fraction, split.split_seed);
                    let (ta, tb) = (
                        serialize_category_dataset(&a),
                        serialize_category_dataset(&b),
                    );
                    (a.len(), b.len(), ta, tb)
                }
            };
            emit(out, Some(&train_out), &train)?;
            emit(out, Some(&test_out), &test)?;
            let summary = format!(
                "split.seed={}\nsplit.test_fraction={}\nsplit.train={n_train}\nsplit.test={n_test}\n",
                split.split_seed, split.test_fraction
            );
            emit(out, None, &summary)?;
        }
        Command::TrainTagger {
            train,
            opt,
            window,
            no_affixes,
            no_shape,
            embeddings,
            out: path,
        } => {
            let data = read_spans(&train)?;
            let emb = read_embeddings(embeddings.as_deref())?;
            let cfg = FeatureConfig {
                window,
                use_affixes: !no_affixes,
                use_shape: !no_shape,
                embeddings: emb.as_ref(),
            };
            let (model, stats) = train_with_stats(&data, &cfg, &opt.config())?;
            emit(out, path.as_deref(), &save_model(&model))?;
            let _ = writeln!(
                err,
                "sentences={} features={} initial_nll={} final_nll={}",
                stats.sentences, stats.features, stats.initial_nll, stats.final_nll
            );
        }
        Command::Tag {
            model,
            input,
            embeddings,
            out: path,
        } => {
            let model = read_tagger(&model)?;
            let emb = read_embeddings(embeddings.as_deref())?;
            let cfg = tagger_config(&model, emb.as_ref())?;
            let sentences = parse_sentences(&read(&input)?)
                .with_context(|| format!("in {}", input.display()))?;
            let tagged = tag_sentences(&model, &sentences, &cfg);
            emit(out, path.as_deref(), &serialize_dataset(&tagged))?;
        }
        Command::TrainClassifier {
            train,
            input_kind,
            opt,
            out: path,
        } => {
            let examples = match input_kind {
                DataKind::Categories => read_categories(&train)?,
                DataKind::Spans => read_spans(&train)?
                    .iter()
                    .flat_map(CategoryExample::from_labeled)
                    .collect(),
            };
            let model = train_classifier(&examples, &opt.config())?;
            emit(out, path.as_deref(), &save_classifier(&model))?;
            let _ = writeln!(
                err,
                "examples={} features={}",
                examples.len(),
                model.num_features()
            );
        }
        Command::Classify {
            model,
            input,
            input_kind,
            out: path,
        } => {
            let model = read_classifier(&model)?;
            let mut text = String::new();
            match input_kind {
                DataKind::Categories => {
                    for (k, phrase) in phrase_lines(&read(&input)?)? {
                        let ex = CategoryExample::from_text(
                            format!("c{k}"),
                            &phrase,
                            Category::AgeHeight,
                        )?;
                        let (c, _) = model.predict_example(&ex);
                        let _ = writeln!(text, "{c}\t{}", ex.text());
                    }
                }
                DataKind::Spans => {
                    for ls in read_spans(&input)? {
                        for p in classify_tagged(&model, &ls)?.phrases {
                            let _ = writeln!(text, "{}\t{}", p.category, p.text);
                        }
                    }
                }
            }
            emit(out, path.as_deref(), &text)?;
        }
        Command::Eval {
            gold,
            pred,
            mode,
            format,
            min_f1,
            split_seed,
            test_fraction,
            out: path,
        } => {
            let gold_text = read(&gold)?;
            let pred_text = read(&pred)?;
            let (report, headline, name) = match mode {
                EvalMode::Spans => {
                    let r = evaluate_tag_file(&gold_text, &pred_text)?;
                    let text = render(format, r.to_text(), r.to_kv());
                    (text, r.min_binary_f1(), "minimum binary F1")
                }
                EvalMode::Classes => {
                    let r = eval_classes(&gold_text, &pred_text)?;
                    let text = render(format, r.to_text(), r.to_kv());
                    (text, r.total.weighted.f1, "total weighted F1")
                }
                EvalMode::E2e => {
                    let (g, p) = e2e_phrases(&gold_text, &pred_text)?;
                    let r = end_to_end(&g, &p);
                    let text = render(format, r.to_text(), r.to_kv());
                    (text, r.overall.f1, "end-to-end F1")
                }
            };
            let mut full = String::new();
            if let Some(seed) = split_seed {
                let fraction = test_fraction.unwrap_or(0.2);
                match format {
                    ReportFormat::Kv => {
                        let _ = writeln!(full, "split.seed={seed}\nsplit.test_fraction={fraction}");
                    }
                    ReportFormat::Text => {
                        let _ = writeln!(full, "split: seed {seed}, test fraction {fraction}\n");
                    }
                }
            }
            full.push_str(&report);
            emit(out, path.as_deref(), &full)?;
            if let Some(min) = min_f1 {
                if headline.is_nan() || headline < min {
                    return Ok(Outcome::BelowThreshold(format!(
                        "{name} {headline} is below --min-f1 {min}"
                    )));
                }
            }
        }
        Command::Pipeline {
            tagger,
            classifier,
            input,
            raw,
            embeddings,
            out: path,
        } => {
            let tagger = read_tagger(&tagger)?;
            let classifier = read_classifier(&classifier)?;
            let emb = read_embeddings(embeddings.as_deref())?;
            let cfg = tagger_config(&tagger, emb.as_ref())?;
            let text = read(&input)?;
            let sentences: Vec<Sentence> = if raw {
                raw_sentences(&text)
            } else {
                parse_sentences(&text).with_context(|| format!("in {}", input.display()))?
            };
            let output = run_pipeline(&tagger, &cfg, &classifier, &sentences)?;
            emit(out, path.as_deref(), &output.to_text())?;
        }
    }
    Ok(Outcome::Ok)
}

fn render(format: ReportFormat, text: String, kv: String) -> String {
    match format {
        ReportFormat::Text => text,
        ReportFormat::Kv => kv,
    }
}

fn span_stats(data: &[LabeledSentence]) -> String {
    let st = dataset_stats(data);
    let mut s = format!("sentences={}\ntokens={}\n", st.sentences, st.tokens);
    for t in BioTag::ALL {
        let _ = writeln!(s, "tag.{t}={}", st.tag_count(t));
    }
    let _ = writeln!(s, "phrases.total={}", st.total_phrases());
    let _ = writeln!(s, "phrases.inclusion={}", st.inclusion_phrases);
    let _ = writeln!(s, "phrases.exclusion={}", st.exclusion_phrases);
    for c in Category::ALL {
        let _ = writeln!(s, "category.{c}={}", st.category_count(c));
    }
    let _ = writeln!(s, "category.none={}", st.uncategorized_phrases);
    s
}

/// Phrase lines of a classify input: either the bare phrase or
/// `category<TAB>phrase[<TAB>polarity]`, whose phrase column is used.
fn phrase_lines(text: &str) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let phrase = match cols.len() {
            1 => cols[0],
            2 | 3 => cols[1],
            _ => bail!(
                "line {}: expected a phrase or category<TAB>phrase",
                lineno + 1
            ),
        };
        if phrase.trim().is_empty() {
            bail!("line {}: empty phrase", lineno + 1);
        }
        out.push((out.len() + 1, phrase.to_string()));
    }
    Ok(out)
}

fn eval_classes(gold_text: &str, pred_text: &str) -> Result<crate::eval::ClassReport> {
    let gold = parse_category_dataset(gold_text).context("in gold file")?;
    let pred = parse_category_dataset(pred_text).context("in prediction file")?;
    if gold.len() != pred.len() {
        return Err(EvalError::Misaligned(format!(
            "{} gold phrases vs {} predicted",
            gold.len(),
            pred.len()
        ))
        .into());
    }
    for (k, (g, p)) in gold.iter().zip(&pred).enumerate() {
        if g.text() != p.text() {
            return Err(EvalError::Misaligned(format!(
                "phrase {}: gold {:?} vs predicted {:?}",
                k + 1,
                g.text(),
                p.text()
            ))
            .into());
        }
    }
    let g: Vec<Category> = gold.iter().map(|e| e.category).collect();
    let p: Vec<Category> = pred.iter().map(|e| e.category).collect();
    let pol: Vec<_> = gold.iter().map(|e| e.polarity).collect();
    Ok(classification_report_with_polarity(&g, &p, &pol)?)
}

/// Gold phrases from a categorized span dataset and predicted phrases from
/// either pipeline output or another categorized span dataset. Sentences
/// must line up one to one.
fn e2e_phrases(gold_text: &str, pred_text: &str) -> Result<(Vec<Phrase>, Vec<Phrase>)> {
    let gold = parse_dataset(gold_text).context("in gold file")?;
    let gold_phrases: Vec<Phrase> = gold.iter().flat_map(LabeledSentence::phrases).collect();
    let is_pipeline = pred_text
        .lines()
        .find(|l| !l.trim().is_empty())
        .is_some_and(|l| l.starts_with("sentence\t"));
    let pred_phrases = if is_pipeline {
        let out = PipelineOutput::parse(pred_text).context("in prediction file")?;
        if out.records.len() != gold.len() {
            return Err(EvalError::Misaligned(format!(
                "{} gold sentences vs {} predicted",
                gold.len(),
                out.records.len()
            ))
            .into());
        }
        for (g, r) in gold.iter().zip(&out.records) {
            if g.sentence.id != r.sentence_id {
                return Err(EvalError::Misaligned(format!(
                    "gold sentence {:?} vs predicted {:?}",
                    g.sentence.id, r.sentence_id
                ))
                .into());
            }
            if let Some(p) = r.phrases.iter().find(|p| p.end > g.sentence.len()) {
                return Err(EvalError::Misaligned(format!(
                    "phrase [{}, {}) exceeds sentence {:?} of {} tokens",
                    p.start,
                    p.end,
                    g.sentence.id,
                    g.sentence.len()
                ))
                .into());
            }
        }
        out.phrases()
    } else {
        let pred = parse_dataset(pred_text).context("in prediction file")?;
        if pred.len() != gold.len() {
            return Err(EvalError::Misaligned(format!(
                "{} gold sentences vs {} predicted",
                gold.len(),
                pred.len()
            ))
            .into());
        }
        let mut phrases = Vec::new();
        for (g, p) in gold.iter().zip(&pred) {
            if g.sentence.len() != p.sentence.len() {
                return Err(EvalError::Misaligned(format!(
                    "sentence {:?} has {} gold tokens vs {} predicted",
                    g.sentence.id,
                    g.sentence.len(),
                    p.sentence.len()
                ))
                .into());
            }
            phrases.extend(p.phrases().into_iter().map(|mut ph| {
                ph.sentence_id = g.sentence.id.clone();
                ph
            }));
        }
        phrases
    };
    Ok((gold_phrases, pred_phrases))
}
