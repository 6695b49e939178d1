//! Subcommand implementations behind the `qqoqcp` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qqoqcp_core::baseline::{run_baseline, BaselineExample, HttpChatClient, ResponseCache};
use qqoqcp_core::evaluate::{
    answer_count_stats, pairwise_agreement, resolve_participants, threshold_sweep, AgreementReport, AnnotatedCorpus,
    CountTable, Participant, SweepResult,
};
use qqoqcp_core::select::explain_set;
use qqoqcp_core::{Error, Pipeline, Question, RawArticle, RunConfig};

/// Failure of a whole command; per-article failures are reported in
/// [`Summary`] instead.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(Error),
    #[error("{0}")]
    Run(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Outcome of a command that processes articles one by one.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Summary {
    pub processed: Vec<String>,
    pub failures: Vec<(String, String)>,
    pub written: Vec<PathBuf>,
}

impl Summary {
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.failures.is_empty())
    }

    pub fn render(&self) -> String {
        let mut out = format!("{} processed, {} failed\n", self.processed.len(), self.failures.len());
        for (id, e) in &self.failures {
            let _ = writeln!(out, "  {id}: {e}");
        }
        out
    }
}

/// Loads the config file, or the defaults when none is given. Flag overrides
/// are applied by the caller before [`pipeline`].
pub fn load_config(path: Option<&Path>) -> CliResult<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p).map_err(CliError::Config),
        None => Ok(RunConfig::default()),
    }
}

/// Parses `question=value` threshold overrides into the config.
pub fn apply_threshold_overrides(config: &mut RunConfig, overrides: &[String]) -> CliResult<()> {
    for o in overrides {
        let (q, v) = o
            .split_once('=')
            .ok_or_else(|| CliError::Config(Error::Config(format!("threshold override '{o}' is not question=value"))))?;
        let q: Question = q.parse().map_err(CliError::Config)?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(Error::Config(format!("threshold override '{o}' has no numeric value"))))?;
        config.thresholds.set(q, v);
    }
    config.validate().map_err(CliError::Config)
}

pub fn pipeline(config: &RunConfig) -> CliResult<Pipeline> {
    Pipeline::from_config(config).map_err(CliError::Config)
}

/// Runs `f` on a dedicated pool of `jobs` threads (all cores when 0).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(e) => {
            log::warn!("could not build a pool of {jobs} threads ({e}); using the global pool");
            f()
        }
    }
}

/// Articles of a corpus directory plus the ones that could not be read.
pub fn read_articles(corpus: &Path) -> CliResult<(AnnotatedCorpus, Vec<(String, String)>)> {
    let (corpus, failures) = AnnotatedCorpus::load_partial(corpus)?;
    Ok((corpus, failures.into_iter().map(|(id, e)| (id, e.to_string())).collect()))
}

fn raw_articles(corpus: &AnnotatedCorpus) -> Vec<RawArticle> {
    corpus.articles.iter().map(|a| a.article.clone()).collect()
}

fn write(path: &Path, contents: &str) -> CliResult<PathBuf> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
    }
    std::fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(path.to_path_buf())
}

/// Writes each annotated document as `<out>/<id>.json`.
pub fn cmd_annotate(pipeline: &Pipeline, corpus: &Path, out: &Path) -> CliResult<Summary> {
    let (corpus, mut failures) = read_articles(corpus)?;
    let articles = raw_articles(&corpus);
    let results: BTreeMap<String, _> = {
        use rayon::prelude::*;
        articles
            .par_iter()
            .map(|a| (a.id.clone(), pipeline.annotate(a).map(|(doc, _, _)| doc)))
            .collect::<Vec<_>>()
            .into_iter()
            .collect()
    };
    let mut summary = Summary::default();
    for (id, r) in results {
        match r {
            Ok(doc) => {
                let mut json = doc.to_json();
                json.push('\n');
                summary.written.push(write(&out.join(format!("{id}.json")), &json)?);
                summary.processed.push(id);
            }
            Err(e) => failures.push((id, e.to_string())),
        }
    }
    failures.sort();
    summary.failures = failures;
    Ok(summary)
}

/// Writes one answer report per article as `<out>/<id>.json`.
pub fn cmd_extract(pipeline: &Pipeline, corpus: &Path, out: &Path) -> CliResult<Summary> {
    let (corpus, mut failures) = read_articles(corpus)?;
    let mut summary = Summary::default();
    for (id, r) in pipeline.process_many(&raw_articles(&corpus)) {
        match r {
            Ok(report) => {
                summary.written.push(write(&out.join(format!("{id}.json")), &report.to_json())?);
                summary.processed.push(id);
            }
            Err(e) => failures.push((id, e.to_string())),
        }
    }
    failures.sort();
    summary.failures = failures;
    Ok(summary)
}

/// The system as a participant: its selected answers on every article it
/// processed.
pub fn system_participant(pipeline: &Pipeline, corpus: &AnnotatedCorpus) -> (Participant, Vec<(String, String)>) {
    let mut failures = Vec::new();
    let mut answers = BTreeMap::new();
    for (id, r) in pipeline.process_many(&raw_articles(corpus)) {
        match r {
            Ok(report) => {
                answers.insert(id, report.answers.texts());
            }
            Err(e) => failures.push((id, e.to_string())),
        }
    }
    (Participant::complete("system", answers), failures)
}

pub fn baseline_participant(config: &RunConfig, corpus: &AnnotatedCorpus) -> CliResult<(Participant, Vec<(String, String)>)> {
    let example = match &config.baseline.example {
        Some(p) => BaselineExample::load(p).map_err(CliError::Config)?,
        None => BaselineExample::builtin(),
    };
    let client = config.baseline.chat.clone().map(HttpChatClient::new);
    let cache = ResponseCache::new(&config.baseline.cache_dir);
    let run = run_baseline(
        &raw_articles(corpus),
        client.as_ref().map(|c| c as &dyn qqoqcp_core::baseline::ChatClient),
        &cache,
        &example,
    );
    let failures = run
        .failures()
        .into_iter()
        .map(|(id, e)| (id.to_string(), e.to_string()))
        .collect();
    Ok((Participant::complete("baseline", run.answers()), failures))
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub agreement: AgreementReport,
    pub counts: CountTable,
    pub failures: Vec<(String, String)>,
}

impl Evaluation {
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.failures.is_empty())
    }
}

/// Agreement and answer counts of the listed participants. `system` and
/// `baseline` name the two automatic participants; any other id is an
/// annotator of the corpus.
pub fn cmd_evaluate(
    config: &RunConfig,
    pipeline: &Pipeline,
    corpus: &Path,
    participants: &[String],
) -> CliResult<Evaluation> {
    let (corpus, mut failures) = read_articles(corpus)?;
    if !corpus.has_gold() {
        return Err(CliError::Run(Error::Invalid("the corpus has no gold annotations".into())));
    }
    let mut systems = Vec::new();
    if participants.iter().any(|p| p == "system") {
        let (p, f) = system_participant(pipeline, &corpus);
        systems.push(p);
        failures.extend(f);
    }
    if participants.iter().any(|p| p == "baseline") {
        let (p, f) = baseline_participant(config, &corpus)?;
        systems.push(p);
        failures.extend(f);
    }
    let resolved = resolve_participants(&corpus, participants, &systems)?;
    let agreement = pairwise_agreement(&corpus, &resolved, &config.similarity)?;
    let counts = answer_count_stats(&corpus, &resolved);
    failures.sort();
    Ok(Evaluation {
        agreement,
        counts,
        failures,
    })
}

/// Every participant id of the corpus: the system, then annotators.
pub fn default_participants(corpus: &Path) -> CliResult<Vec<String>> {
    let (corpus, _) = read_articles(corpus)?;
    Ok(std::iter::once("system".to_string())
        .chain(corpus.annotators().into_iter().map(String::from))
        .collect())
}

/// `0, step, 2·step, …` up to and including 1.
pub fn uniform_grid(step: f64) -> CliResult<Vec<f64>> {
    if !step.is_finite() || step <= 0.0 || step > 1.0 {
        return Err(CliError::Config(Error::Config(format!("grid step {step} outside (0, 1]"))));
    }
    let n = (1.0 / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| (i as f64 * step * 1e12).round() / 1e12).collect())
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub result: SweepResult,
    pub failures: Vec<(String, String)>,
}

/// System agreement with the annotators at each threshold of `grid`.
pub fn cmd_sweep(
    config: &RunConfig,
    pipeline: &Pipeline,
    corpus: &Path,
    question: Question,
    grid: &[f64],
) -> CliResult<Sweep> {
    if grid.is_empty() {
        return Err(CliError::Config(Error::Config("threshold grid is empty".into())));
    }
    let (corpus, mut failures) = read_articles(corpus)?;
    if !corpus.has_gold() {
        return Err(CliError::Run(Error::Invalid("the corpus has no gold annotations".into())));
    }
    let mut scored = BTreeMap::new();
    for (id, r) in pipeline.score_many(&raw_articles(&corpus)) {
        match r {
            Ok(s) => {
                scored.insert(id, s.scored);
            }
            Err(e) => failures.push((id, e.to_string())),
        }
    }
    let annotators = corpus
        .annotators()
        .into_iter()
        .map(|id| Participant::annotator(&corpus, id))
        .collect::<Result<Vec<_>, _>>()?;
    let result = threshold_sweep(&scored, &annotators, grid, question, &config.similarity)?;
    failures.sort();
    Ok(Sweep { result, failures })
}

/// CSV rows `tau,agreement`; empty agreement where nothing was comparable.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("tau,agreement\n");
    for p in &result.curve {
        let _ = writeln!(out, "{},{}", p.tau, p.agreement.map(|a| a.to_string()).unwrap_or_default());
    }
    out
}

/// Explanation of one article's answers.
pub fn cmd_explain(pipeline: &Pipeline, corpus: &Path, id: &str, question: Option<Question>) -> CliResult<String> {
    let (corpus, failures) = read_articles(corpus)?;
    let article = match corpus.get(id) {
        Some(a) => a.article.clone(),
        None => {
            let why = failures
                .iter()
                .find(|(f, _)| f == id)
                .map_or_else(|| "not in the manifest".to_string(), |(_, e)| e.clone());
            return Err(CliError::Run(Error::Invalid(format!("article '{id}': {why}"))));
        }
    };
    let mut report = pipeline.process(&article)?;
    if let Some(q) = question {
        for other in Question::ALL.into_iter().filter(|&o| o != q) {
            report.answers.answers.get_mut(other).clear();
        }
        let mut out = format!("article {}\n", report.answers.id);
        let answers = report.answers.answers.get(q);
        if answers.is_empty() {
            let _ = writeln!(out, "{q}: no answer above threshold");
        }
        for a in answers {
            out.push_str(&qqoqcp_core::select::explain(a));
        }
        return Ok(out);
    }
    Ok(explain_set(&report.answers))
}

/// Issues found in the corpus, one line each; unreadable articles included.
pub fn cmd_validate_corpus(corpus: &Path) -> CliResult<Vec<String>> {
    let (corpus, failures) = read_articles(corpus)?;
    let mut issues: Vec<String> = failures.iter().map(|(id, e)| format!("{id}: {e}")).collect();
    issues.extend(corpus.validate().iter().map(ToString::to_string));
    Ok(issues)
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes the evaluation tables as JSON and returns the rendered text.
pub fn write_evaluation(ev: &Evaluation, out: &Path) -> CliResult<String> {
    write(&out.join("agreement.json"), &pretty(&ev.agreement))?;
    write(&out.join("counts.json"), &pretty(&ev.counts))?;
    Ok(format!("{}\n{}", ev.agreement.render(), ev.counts.render()))
}

/// Writes the curve and the suggested config snippet next to each other.
pub fn write_sweep(sweep: &Sweep, out: &Path) -> CliResult<Vec<PathBuf>> {
    let q = sweep.result.question;
    Ok(vec![
        write(&out.join(format!("sweep_{q}.csv")), &sweep_csv(&sweep.result))?,
        write(&out.join(format!("sweep_{q}.toml")), &sweep.result.suggested_config())?,
    ])
}

pub fn write_baseline(config: &RunConfig, corpus: &Path, out: &Path) -> CliResult<Summary> {
    let (corpus, mut failures) = read_articles(corpus)?;
    let (participant, f) = baseline_participant(config, &corpus)?;
    failures.extend(f);
    let mut summary = Summary::default();
    for (id, answers) in &participant.answers {
        let texts = qqoqcp_core::PerQuestion::from_fn(|q| answers.get(q).clone().unwrap_or_default());
        summary.written.push(write(&out.join(format!("{id}.json")), &pretty(&texts))?);
        summary.processed.push(id.clone());
    }
    failures.sort();
    summary.failures = failures;
    Ok(summary)
}
