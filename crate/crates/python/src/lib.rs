//! Python bindings: profile loading, transliteration, evaluation, table
//! generation and learning.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use translit_core::error::read_file;
use translit_core::generate::DEFAULT_CANDIDATE_CAP;
use translit_core::pipeline::{parse_gold, EvalMode};
use translit_core::{
    data, ClassFile, LearnerConfig, LearnerInputs, NameLexicon, NgramModel, OriginMode,
    PronunciationDict, ScriptRegistry, TransliterateOptions,
};

create_exception!(translit, TranslitError, PyValueError);

fn err(e: translit_core::Error) -> PyErr {
    TranslitError::new_err(e.to_string())
}

type TokenCandidates = (String, Vec<(String, f64, bool)>);

/// A directory of origin profiles.
#[pyclass(name = "Profiles")]
struct Profiles {
    inner: translit_core::Profiles,
}

#[pymethods]
impl Profiles {
    #[new]
    fn new(dir: PathBuf) -> PyResult<Self> {
        Ok(Profiles {
            inner: translit_core::Profiles::load(dir).map_err(err)?,
        })
    }

    fn ids(&self) -> Vec<String> {
        self.inner.ids().map(str::to_string).collect()
    }

    fn fallback(&self) -> String {
        self.inner.fallback().to_string()
    }

    fn classify(&self, name: &str) -> PyResult<String> {
        self.inner.classify(name).map_err(err)
    }

    /// Returns `(origin, [(token, [(candidate, score, replaced), ...]), ...])`.
    #[pyo3(signature = (name, origin = "auto", k = 2, lookup = true))]
    fn transliterate(
        &self,
        name: &str,
        origin: &str,
        k: usize,
        lookup: bool,
    ) -> PyResult<(String, Vec<TokenCandidates>)> {
        let mode: OriginMode = origin.parse().expect("infallible");
        let result = self
            .inner
            .transliterate(name, &mode, TransliterateOptions { k, lookup })
            .map_err(err)?;
        let tokens = result
            .tokens
            .into_iter()
            .map(|t| {
                let candidates = t
                    .candidates
                    .into_iter()
                    .map(|c| (c.text, c.score, c.replaced))
                    .collect();
                (t.token.into_string(), candidates)
            })
            .collect();
        Ok((result.origin, tokens))
    }

    /// Attaches a pronunciation dictionary file; returns how many profiles use it.
    fn attach_pronunciations(&mut self, path: PathBuf) -> PyResult<usize> {
        let dict = PronunciationDict::parse(&read_file(path).map_err(err)?).map_err(err)?;
        self.inner.attach_pronunciations(&dict).map_err(err)
    }

    /// Returns `{origin: (n, correct)}` for a gold file.
    #[pyo3(signature = (gold, k = 2, use_gold_origin = false, lookup = true))]
    fn evaluate(
        &self,
        gold: PathBuf,
        k: usize,
        use_gold_origin: bool,
        lookup: bool,
    ) -> PyResult<BTreeMap<String, (usize, usize)>> {
        let gold = parse_gold(&read_file(gold).map_err(err)?).map_err(err)?;
        let mode = if use_gold_origin {
            EvalMode::GoldOrigin
        } else {
            EvalMode::Auto
        };
        let report = self
            .inner
            .evaluate(&gold, mode, TransliterateOptions { k, lookup })
            .map_err(err)?;
        Ok(report
            .by_origin
            .into_iter()
            .map(|(o, s)| (o, (s.n, s.correct)))
            .collect())
    }
}

/// A transliteration table over built-in scripts.
#[pyclass(name = "Table")]
struct Table {
    inner: translit_core::TranslitTable,
}

#[pymethods]
impl Table {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = translit_core::TranslitTable::parse(text, &ScriptRegistry::with_builtins())
            .map_err(err)?;
        Ok(Table { inner })
    }

    /// A packaged table, e.g. `latin_hebrew_backward`.
    #[staticmethod]
    fn bundled(name: &str) -> PyResult<Self> {
        let text = data::bundled(name)
            .ok_or_else(|| TranslitError::new_err(format!("no bundled data named `{name}`")))?;
        Self::parse(text)
    }

    fn to_tsv(&self) -> String {
        self.inner.to_tsv()
    }

    /// `(marked key, output)` pairs; `*` marks a position anchor.
    fn transitions(&self) -> Vec<(String, String)> {
        self.inner
            .transitions()
            .into_iter()
            .map(|t| (t.position.mark(&t.source), t.target))
            .collect()
    }

    /// Every transliteration of `token`, in lexicographic order.
    #[pyo3(signature = (token, cap = DEFAULT_CANDIDATE_CAP))]
    fn generate(&self, token: &str, cap: usize) -> PyResult<Vec<String>> {
        Ok(translit_core::generate(&self.inner, token, cap)
            .map_err(err)?
            .texts)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

fn lexicon(script: &str, counts: BTreeMap<String, u64>) -> PyResult<NameLexicon> {
    let reg = ScriptRegistry::with_builtins();
    let script = reg.get(script).map_err(err)?;
    NameLexicon::from_counts(script, counts.iter().map(|(t, c)| (t.as_str(), *c))).map_err(err)
}

/// Token counts of a name list, one name per item.
#[pyfunction]
fn ingest(lines: Vec<String>, script: &str) -> PyResult<BTreeMap<String, u64>> {
    let reg = ScriptRegistry::with_builtins();
    let report = translit_core::ingest_name_list(&lines, reg.get(script).map_err(err)?);
    Ok(report
        .lexicon
        .iter()
        .map(|(t, c)| (t.as_str().to_string(), c))
        .collect())
}

/// Phonetic edit distance under the bundled classes for `script`.
#[pyfunction]
#[pyo3(signature = (a, b, script = "hebrew"))]
fn distance(a: &str, b: &str, script: &str) -> PyResult<f64> {
    let classes = ClassFile::parse(data::PHONETIC_CLASSES).map_err(err)?;
    Ok(classes.for_script(script).distance(a, b))
}

/// Learns from `base` and two monolingual lexicons of token counts.
/// Returns `(learned table, trace TSV, stop reason)`.
#[pyfunction]
#[pyo3(signature = (base, source, target, source_script = "latin", target_script = "hebrew", order = 4, epsilon = 1.0, min_count = 3))]
#[allow(clippy::too_many_arguments)]
fn learn(
    base: &Table,
    source: BTreeMap<String, u64>,
    target: BTreeMap<String, u64>,
    source_script: &str,
    target_script: &str,
    order: usize,
    epsilon: f64,
    min_count: u64,
) -> PyResult<(Table, String, String)> {
    let source = lexicon(source_script, source)?;
    let target = lexicon(target_script, target)?;
    let reg = ScriptRegistry::with_builtins();
    let model =
        NgramModel::train(&target, reg.get(target_script).map_err(err)?, order).map_err(err)?;
    let classes = ClassFile::parse(data::PHONETIC_CLASSES)
        .map_err(err)?
        .for_script(target_script);
    let config = LearnerConfig {
        epsilon,
        min_count,
        ..LearnerConfig::default()
    };
    let inputs = LearnerInputs {
        source: &source,
        target: &target,
        model: &model,
        classes: &classes,
    };
    let out = translit_core::learn(&base.inner, inputs, &config).map_err(err)?;
    Ok((
        Table { inner: out.table },
        out.trace.to_tsv(),
        format!("{:?}", out.stop),
    ))
}

#[pymodule]
#[pyo3(name = "translit")]
fn translit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TranslitError", m.py().get_type::<TranslitError>())?;
    m.add_class::<Profiles>()?;
    m.add_class::<Table>()?;
    m.add_function(wrap_pyfunction!(ingest, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(learn, m)?)?;
    Ok(())
}
