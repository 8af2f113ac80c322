use std::io::{BufRead, Write};
use std::path::Path;

use translit_core::error::read_file;
use translit_core::learner::Trace;
use translit_core::pipeline::{parse_gold, EvalMode};
use translit_core::{
    data, ingest_name_list, learn, ClassFile, Error, LearnerConfig, LearnerInputs, NameLexicon,
    NgramModel, OriginMode, Profiles, PronunciationDict, Result, ScriptRegistry, TranslitTable,
    TransliterateOptions,
};

use crate::cli::LearnArgs;

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn emit(text: &str) -> Result<()> {
    std::io::stdout()
        .lock()
        .write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

/// The given names, or one per non-empty stdin line.
fn names_or_stdin(names: Vec<String>) -> Result<Vec<String>> {
    if !names.is_empty() {
        return Ok(names);
    }
    let mut out = Vec::new();
    for line in std::io::stdin().lock().lines() {
        let line = line.map_err(|e| Error::io("<stdin>", e))?;
        if !line.trim().is_empty() {
            out.push(line);
        }
    }
    Ok(out)
}

pub fn registry(scripts: Option<&Path>) -> Result<ScriptRegistry> {
    let mut reg = ScriptRegistry::with_builtins();
    if let Some(path) = scripts {
        reg.declare_toml(&read_file(path)?)?;
    }
    Ok(reg)
}

pub fn ingest(reg: &ScriptRegistry, script: &str, input: &Path, out: &Path) -> Result<()> {
    let script = reg.get(script)?;
    let text = read_file(input)?;
    let report = ingest_name_list(text.lines(), script);
    for d in &report.diagnostics {
        log::warn!("{}: line {}: {}", input.display(), d.line, d.message);
    }
    let lexicon = report.lexicon.with_source_tag(input.display().to_string());
    log::info!(
        "{} distinct tokens, {} in all",
        lexicon.len(),
        lexicon.total_count()
    );
    write_file(out, &lexicon.to_tsv())
}

pub fn train_lm(reg: &ScriptRegistry, lex: &Path, order: usize, out: &Path) -> Result<()> {
    let lexicon = NameLexicon::from_tsv(&read_file(lex)?, reg)?;
    let model = NgramModel::train(&lexicon, reg.get(lexicon.script())?, order)?;
    write_file(out, &model.to_tsv())
}

fn load_table(reg: &ScriptRegistry, reference: &str) -> Result<TranslitTable> {
    let text = match reference.strip_prefix("bundled:") {
        Some(name) => data::bundled(name)
            .ok_or_else(|| Error::InvalidArgument(format!("no bundled data named `{name}`")))?
            .to_string(),
        None => read_file(reference)?,
    };
    TranslitTable::parse(&text, reg)
}

pub fn learn_table(reg: &ScriptRegistry, args: &LearnArgs) -> Result<()> {
    let base = load_table(reg, &args.base)?;
    let source = NameLexicon::from_tsv(&read_file(&args.source_lex)?, reg)?;
    let target = NameLexicon::from_tsv(&read_file(&args.target_lex)?, reg)?;
    let model = NgramModel::from_tsv(&read_file(&args.lm)?)?;
    let classes = match &args.classes {
        Some(path) => ClassFile::parse(&read_file(path)?)?,
        None => ClassFile::parse(data::PHONETIC_CLASSES)?,
    }
    .for_script(target.script());
    let config = LearnerConfig {
        epsilon: args.epsilon,
        min_count: args.min_count,
        max_ngram_len: args.max_ngram_len,
        top_k: args.top_k,
        max_iterations: args.max_iterations,
        ..LearnerConfig::default()
    };
    let inputs = LearnerInputs {
        source: &source,
        target: &target,
        model: &model,
        classes: &classes,
    };
    let outcome = learn(&base, inputs, &config)?;
    write_file(&args.out, &outcome.table.to_tsv())?;
    if let Some(path) = &args.trace {
        write_file(path, &outcome.trace.to_tsv())?;
    }
    let accepted = outcome.trace.accepted().count();
    emit(&format!(
        "stopped: {:?}\niterations: {}\naccepted: {accepted}\nrejected: {}\n",
        outcome.stop,
        outcome.trace.records.len(),
        outcome.trace.records.len() - accepted
    ))
}

pub fn classify(dir: &Path, names: Vec<String>) -> Result<()> {
    let profiles = Profiles::load(dir)?;
    let mut out = String::new();
    for name in names_or_stdin(names)? {
        out.push_str(&format!("{name}\t{}\n", profiles.classify(&name)?));
    }
    emit(&out)
}

pub fn transliterate(
    dir: &Path,
    origin: &str,
    k: usize,
    pron_lex: Option<&Path>,
    lookup: bool,
    names: Vec<String>,
) -> Result<()> {
    let mut profiles = Profiles::load(dir)?;
    if let Some(path) = pron_lex {
        let dict = PronunciationDict::parse(&read_file(path)?)?;
        if profiles.attach_pronunciations(&dict)? == 0 {
            log::warn!(
                "no profile has a phoneme table; {} is unused",
                path.display()
            );
        }
    }
    let mode: OriginMode = origin.parse().expect("infallible");
    let opts = TransliterateOptions { k, lookup };
    let mut out = String::new();
    for name in names_or_stdin(names)? {
        out.push_str(&profiles.transliterate(&name, &mode, opts)?.to_tsv());
    }
    emit(&out)
}

pub fn eval(dir: &Path, gold: &Path, k: usize, use_gold_origin: bool, lookup: bool) -> Result<()> {
    let profiles = Profiles::load(dir)?;
    let gold = parse_gold(&read_file(gold)?)?;
    let mode = if use_gold_origin {
        EvalMode::GoldOrigin
    } else {
        EvalMode::Auto
    };
    let report = profiles.evaluate(&gold, mode, TransliterateOptions { k, lookup })?;
    emit(&report.to_tsv())
}

pub fn inspect_trace(path: &Path, all: bool) -> Result<()> {
    let trace = Trace::from_tsv(&read_file(path)?)?;
    let accepted = trace.accepted().count();
    let mut out = format!(
        "# {} iterations, {accepted} accepted, {} rejected\n",
        trace.records.len(),
        trace.records.len() - accepted
    );
    if let (Some(first), Some(last)) = (trace.records.first(), trace.accepted().last()) {
        out.push_str(&format!(
            "# fit {} -> {}\n",
            first.prior_fit, last.posterior_fit
        ));
    }
    out.push_str("iter\ttransition\tfit_change\tdecision\n");
    for r in trace.records.iter().filter(|r| all || r.accepted) {
        out.push_str(&format!(
            "{}\t{}\t{:+.6}\t{}\n",
            r.iteration,
            r.transition,
            r.posterior_fit - r.prior_fit,
            if r.accepted { "accepted" } else { "rejected" }
        ));
    }
    emit(&out)
}
