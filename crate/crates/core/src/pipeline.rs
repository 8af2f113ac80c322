//! The sideways pipeline: classify a name's origin, transliterate each token
//! with that origin's table and model, then snap the best candidate onto the
//! origin's lexicon when a close enough entry exists.
//!
//! Profiles are loaded from a directory holding a `profiles.toml` manifest;
//! the repository README lists its keys.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::data;
use crate::error::{read_file, Error, Result};
use crate::generate::{transliterate_token, Candidate, DEFAULT_CANDIDATE_CAP, DEFAULT_TOP_K};
use crate::lexicon::{ingest_name_list, NameLexicon};
use crate::ngram::{InterpolationWeights, NgramModel, DEFAULT_ORDER};
use crate::origin::{FirstNameList, OriginClassifier, OTHER};
use crate::phonetic::{lookup, ClassFile, PhoneticClassTable, DEFAULT_THRESHOLD};
use crate::pron::{PhonemeTable, PronunciationDict, PronunciationLexicon};
use crate::script::{Script, ScriptDecl, ScriptRegistry, Token};
use crate::table::TranslitTable;

pub const MANIFEST: &str = "profiles.toml";

/// Everything needed to transliterate names of one origin.
#[derive(Debug, Clone)]
pub struct OriginProfile {
    origin: String,
    table: TranslitTable,
    lm: NgramModel,
    lexicon: NameLexicon,
    first_names: FirstNameList,
    weights: InterpolationWeights,
    phonemes: Option<PhonemeTable>,
    pron: Option<PronunciationLexicon>,
}

impl OriginProfile {
    pub fn new(
        origin: impl Into<String>,
        table: TranslitTable,
        lm: NgramModel,
        lexicon: NameLexicon,
        first_names: FirstNameList,
        weights: InterpolationWeights,
    ) -> Result<Self> {
        let origin = origin.into();
        if origin == OTHER {
            return Err(Error::InvalidArgument(format!(
                "`{OTHER}` is reserved and cannot name a profile"
            )));
        }
        for found in [lm.script(), lexicon.script()] {
            if found != table.target_script() {
                return Err(Error::ScriptMismatch {
                    expected: table.target_script().to_string(),
                    found: found.to_string(),
                });
            }
        }
        if weights.len() != lm.max_order() {
            return Err(Error::InvalidArgument(format!(
                "profile `{origin}`: {} weights for an order-{} model",
                weights.len(),
                lm.max_order()
            )));
        }
        Ok(OriginProfile {
            origin,
            table,
            lm,
            lexicon,
            first_names,
            weights,
            phonemes: None,
            pron: None,
        })
    }

    /// Adds a phoneme table; the phoneme path is used once a dictionary is
    /// attached with [`Profiles::attach_pronunciations`].
    pub fn with_phoneme_table(mut self, phonemes: PhonemeTable) -> Result<Self> {
        if phonemes.target_script() != self.table.target_script() {
            return Err(Error::ScriptMismatch {
                expected: self.table.target_script().to_string(),
                found: phonemes.target_script().to_string(),
            });
        }
        self.phonemes = Some(phonemes);
        Ok(self)
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn table(&self) -> &TranslitTable {
        &self.table
    }

    pub fn lm(&self) -> &NgramModel {
        &self.lm
    }

    pub fn lexicon(&self) -> &NameLexicon {
        &self.lexicon
    }

    pub fn first_names(&self) -> &FirstNameList {
        &self.first_names
    }

    pub fn weights(&self) -> &InterpolationWeights {
        &self.weights
    }

    pub fn target_script(&self) -> &str {
        self.table.target_script()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OriginMode {
    Auto,
    Fixed(String),
}

impl std::str::FromStr for OriginMode {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s == "auto" {
            OriginMode::Auto
        } else {
            OriginMode::Fixed(s.to_string())
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransliterateOptions {
    pub k: usize,
    pub lookup: bool,
}

impl Default for TransliterateOptions {
    fn default() -> Self {
        TransliterateOptions {
            k: DEFAULT_TOP_K,
            lookup: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidate {
    pub text: String,
    pub score: f64,
    /// True for the entry that replaced the generated top candidate.
    pub replaced: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TokenResult {
    pub token: Token,
    pub candidates: Vec<RankedCandidate>,
    /// Distance of the lexicon entry that replaced the top candidate.
    pub lookup_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NameResult {
    /// The profile that produced the output.
    pub origin: String,
    pub tokens: Vec<TokenResult>,
}

impl NameResult {
    /// `token origin rank candidate score replaced`, one line per candidate.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for t in &self.tokens {
            for (i, c) in t.candidates.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    t.token,
                    self.origin,
                    i + 1,
                    c.text,
                    c.score,
                    c.replaced
                );
            }
        }
        out
    }
}

/// One gold-standard name with its acceptable target forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldEntry {
    pub name: String,
    /// Each acceptable form, split into tokens.
    pub forms: Vec<Vec<String>>,
    pub origin: String,
}

/// Parses `source_name<TAB>form1|form2<TAB>origin` lines; `#` starts a comment.
pub fn parse_gold(text: &str) -> Result<Vec<GoldEntry>> {
    const WHAT: &str = "gold file";
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let [name, forms, origin] = f[..] else {
            return Err(Error::format(
                WHAT,
                lineno,
                format!("expected 3 fields, got {}", f.len()),
            ));
        };
        if name.trim().is_empty() || origin.trim().is_empty() {
            return Err(Error::format(WHAT, lineno, "empty name or origin"));
        }
        let forms: Vec<Vec<String>> = forms
            .split('|')
            .map(|form| {
                form.split_whitespace()
                    .map(str::to_string)
                    .collect::<Vec<_>>()
            })
            .filter(|form| !form.is_empty())
            .collect();
        if forms.is_empty() {
            return Err(Error::format(WHAT, lineno, "no acceptable forms"));
        }
        out.push(GoldEntry {
            name: name.to_string(),
            forms,
            origin: origin.trim().to_string(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Classify every name.
    Auto,
    /// Use the origin given in the gold file.
    GoldOrigin,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OriginScore {
    pub n: usize,
    pub correct: usize,
}

impl OriginScore {
    pub fn accuracy(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.correct as f64 / self.n as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub by_origin: BTreeMap<String, OriginScore>,
}

impl EvalReport {
    pub fn overall(&self) -> OriginScore {
        self.by_origin
            .values()
            .fold(OriginScore::default(), |acc, s| OriginScore {
                n: acc.n + s.n,
                correct: acc.correct + s.correct,
            })
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("origin\tn\tcorrect\taccuracy\n");
        let rows = self.by_origin.iter().map(|(o, s)| (o.as_str(), *s));
        for (origin, s) in rows.chain(std::iter::once(("overall", self.overall()))) {
            let _ = writeln!(out, "{origin}\t{}\t{}\t{:.4}", s.n, s.correct, s.accuracy());
        }
        out
    }
}

/// A loaded set of origin profiles plus the shared classifier and lookup
/// settings.
#[derive(Debug, Clone)]
pub struct Profiles {
    source: Script,
    profiles: BTreeMap<String, OriginProfile>,
    classifier: OriginClassifier,
    fallback: String,
    classes: BTreeMap<String, PhoneticClassTable>,
    lookup_threshold: f64,
    candidate_cap: usize,
}

impl Profiles {
    /// `fallback` names the profile used for `other` and for origins without
    /// a profile. The classifier's default is `default_origin`, or the
    /// fallback if unset.
    pub fn new(
        source: Script,
        profiles: Vec<OriginProfile>,
        fallback: impl Into<String>,
        priority: Vec<String>,
        default_origin: Option<String>,
        classes: &ClassFile,
    ) -> Result<Self> {
        let fallback = fallback.into();
        let mut map = BTreeMap::new();
        for p in profiles {
            if p.table.source_script() != source.id() {
                return Err(Error::ScriptMismatch {
                    expected: source.id().to_string(),
                    found: p.table.source_script().to_string(),
                });
            }
            if map.contains_key(&p.origin) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate profile `{}`",
                    p.origin
                )));
            }
            map.insert(p.origin.clone(), p);
        }
        if !map.contains_key(&fallback) {
            return Err(Error::UnknownOrigin {
                origin: fallback,
                available: map.keys().cloned().collect(),
            });
        }
        let lists = map.values().map(|p| p.first_names.clone()).collect();
        let classifier = OriginClassifier::new(
            lists,
            priority,
            default_origin.unwrap_or_else(|| fallback.clone()),
        )?;
        let classes = map
            .values()
            .map(|p| {
                (
                    p.target_script().to_string(),
                    classes.for_script(p.target_script()),
                )
            })
            .collect();
        Ok(Profiles {
            source,
            profiles: map,
            classifier,
            fallback,
            classes,
            lookup_threshold: DEFAULT_THRESHOLD,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
        })
    }

    pub fn with_lookup_threshold(mut self, threshold: f64) -> Result<Self> {
        if threshold.is_nan() || threshold < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "lookup threshold must be >= 0, got {threshold}"
            )));
        }
        self.lookup_threshold = threshold;
        Ok(self)
    }

    pub fn with_candidate_cap(mut self, cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(Error::InvalidArgument(
                "candidate cap must be positive".into(),
            ));
        }
        self.candidate_cap = cap;
        Ok(self)
    }

    /// Loads `profiles.toml` from `dir`.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let path = dir.join(MANIFEST);
        let text = read_file(&path)?;
        let manifest: Manifest = toml::from_str(&text).map_err(|e| Error::Format {
            what: "profile manifest",
            line: 0,
            message: e.to_string(),
        })?;
        manifest.build(dir)
    }

    /// Attaches a pronunciation dictionary to every profile with a phoneme
    /// table; those profiles then transliterate through pronunciations.
    pub fn attach_pronunciations(&mut self, dict: &PronunciationDict) -> Result<usize> {
        let mut attached = 0;
        for p in self.profiles.values_mut() {
            if let Some(ph) = &p.phonemes {
                p.pron = Some(PronunciationLexicon::new(dict.clone(), ph.clone())?);
                attached += 1;
            }
        }
        Ok(attached)
    }

    pub fn source_script(&self) -> &Script {
        &self.source
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.profiles.keys().map(String::as_str)
    }

    pub fn get(&self, origin: &str) -> Option<&OriginProfile> {
        self.profiles.get(origin)
    }

    pub fn classifier(&self) -> &OriginClassifier {
        &self.classifier
    }

    pub fn fallback(&self) -> &str {
        &self.fallback
    }

    pub fn tokenize(&self, name: &str) -> Result<Vec<Token>> {
        let tokens = self.source.tokenize(name)?;
        if tokens.is_empty() {
            return Err(Error::EmptyInput("name has no tokens after normalization"));
        }
        Ok(tokens)
    }

    /// The classifier's label for `name`: a profile id, or `other`.
    pub fn classify(&self, name: &str) -> Result<String> {
        let tokens = self.tokenize(name)?;
        let label = self.classifier.classify(&tokens);
        Ok(if self.profiles.contains_key(&label) {
            label
        } else {
            OTHER.to_string()
        })
    }

    /// The profile serving `label`; `other` goes to the fallback.
    fn resolve(&self, label: &str) -> Result<&OriginProfile> {
        if label == OTHER {
            return Ok(&self.profiles[&self.fallback]);
        }
        self.profiles
            .get(label)
            .ok_or_else(|| Error::UnknownOrigin {
                origin: label.to_string(),
                available: self
                    .profiles
                    .keys()
                    .cloned()
                    .chain([OTHER.to_string()])
                    .collect(),
            })
    }

    pub fn transliterate(
        &self,
        name: &str,
        mode: &OriginMode,
        opts: TransliterateOptions,
    ) -> Result<NameResult> {
        if opts.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let tokens = self.tokenize(name)?;
        let profile = match mode {
            OriginMode::Auto => {
                let label = self.classifier.classify(&tokens);
                self.resolve(if self.profiles.contains_key(&label) {
                    &label
                } else {
                    OTHER
                })?
            }
            OriginMode::Fixed(label) => self.resolve(label)?,
        };
        let results = tokens
            .into_iter()
            .map(|t| self.transliterate_token(profile, t, opts))
            .collect::<Result<Vec<_>>>()?;
        Ok(NameResult {
            origin: profile.origin.clone(),
            tokens: results,
        })
    }

    fn generate_ranked(
        &self,
        profile: &OriginProfile,
        token: &str,
        k: usize,
    ) -> Result<Vec<Candidate>> {
        if let Some(pron) = &profile.pron {
            if let Some(c) = pron.transliterate_token(
                token,
                &profile.lm,
                &profile.weights,
                k,
                self.candidate_cap,
            )? {
                return Ok(c);
            }
            log::warn!("no pronunciation for {token:?}; using its spelling");
        }
        transliterate_token(
            &profile.table,
            &profile.lm,
            &profile.weights,
            token,
            k,
            self.candidate_cap,
        )
    }

    fn transliterate_token(
        &self,
        profile: &OriginProfile,
        token: Token,
        opts: TransliterateOptions,
    ) -> Result<TokenResult> {
        let ranked = self.generate_ranked(profile, token.as_str(), opts.k)?;
        let mut candidates: Vec<RankedCandidate> = ranked
            .into_iter()
            .map(|c| RankedCandidate {
                text: c.text,
                score: c.score,
                replaced: false,
            })
            .collect();
        let mut lookup_distance = None;
        if opts.lookup && !profile.lexicon.is_empty() {
            let texts: Vec<&str> = candidates.iter().map(|c| c.text.as_str()).collect();
            let classes = &self.classes[profile.target_script()];
            let found = lookup(&texts, &profile.lexicon, classes, self.lookup_threshold)?;
            if let (true, Some(entry)) = (found.replaced, found.matched) {
                let text = entry.into_string();
                let score = profile.lm.score(&text, &profile.weights)?;
                let rest = candidates.split_off(1.min(candidates.len()));
                candidates = std::iter::once(RankedCandidate {
                    text: text.clone(),
                    score,
                    replaced: true,
                })
                .chain(rest.into_iter().filter(|c| c.text != text))
                .collect();
                lookup_distance = Some(found.distance);
            }
        }
        Ok(TokenResult {
            token,
            candidates,
            lookup_distance,
        })
    }

    /// Top-k accuracy over `gold`, by gold origin. Origins without a profile
    /// are counted under `other`.
    pub fn evaluate(
        &self,
        gold: &[GoldEntry],
        mode: EvalMode,
        opts: TransliterateOptions,
    ) -> Result<EvalReport> {
        if opts.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let mut report = EvalReport::default();
        for entry in gold {
            let bucket = if self.profiles.contains_key(&entry.origin) {
                entry.origin.as_str()
            } else {
                OTHER
            };
            let mode = match mode {
                EvalMode::Auto => OriginMode::Auto,
                EvalMode::GoldOrigin => OriginMode::Fixed(bucket.to_string()),
            };
            let result = self.transliterate(&entry.name, &mode, opts)?;
            let correct = entry.forms.iter().any(|form| {
                form.len() == result.tokens.len()
                    && form
                        .iter()
                        .zip(&result.tokens)
                        .all(|(want, got)| got.candidates.iter().any(|c| c.text == *want))
            });
            let score = report.by_origin.entry(bucket.to_string()).or_default();
            score.n += 1;
            score.correct += usize::from(correct);
        }
        Ok(report)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    source_script: String,
    fallback: String,
    default_origin: Option<String>,
    #[serde(default)]
    priority: Vec<String>,
    classes: Option<String>,
    lookup_threshold: Option<f64>,
    candidate_cap: Option<usize>,
    #[serde(default)]
    script: Vec<ScriptDecl>,
    profile: BTreeMap<String, ProfileEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileEntry {
    table: String,
    lm: Option<String>,
    lm_names: Option<String>,
    lm_order: Option<usize>,
    lexicon: Option<String>,
    lexicon_names: Option<String>,
    first_names: String,
    weights: Option<Vec<f64>>,
    phoneme_table: Option<String>,
}

/// Reads a manifest-referenced file; `bundled:<name>` names packaged data.
fn load_ref(dir: &Path, reference: &str) -> Result<String> {
    if let Some(name) = reference.strip_prefix("bundled:") {
        return data::bundled(name)
            .map(str::to_string)
            .ok_or_else(|| Error::InvalidArgument(format!("no bundled data named `{name}`")));
    }
    let path: PathBuf = dir.join(reference);
    read_file(path)
}

fn ingest_file(dir: &Path, reference: &str, script: &Script) -> Result<NameLexicon> {
    let text = load_ref(dir, reference)?;
    let report = ingest_name_list(text.lines(), script);
    for d in &report.diagnostics {
        log::warn!("{reference}: line {}: {}", d.line, d.message);
    }
    Ok(report.lexicon.with_source_tag(reference))
}

impl Manifest {
    fn build(self, dir: &Path) -> Result<Profiles> {
        let mut scripts = ScriptRegistry::with_builtins();
        for decl in &self.script {
            scripts.declare(decl)?;
        }
        let source = scripts.get(&self.source_script)?.clone();
        let classes = match &self.classes {
            Some(r) => ClassFile::parse(&load_ref(dir, r)?)?,
            None => ClassFile::parse(data::PHONETIC_CLASSES)?,
        };
        let mut profiles = Vec::new();
        for (origin, entry) in self.profile {
            profiles.push(entry.build(&origin, dir, &scripts, &source)?);
        }
        let mut out = Profiles::new(
            source,
            profiles,
            self.fallback,
            self.priority,
            self.default_origin,
            &classes,
        )?;
        if let Some(t) = self.lookup_threshold {
            out = out.with_lookup_threshold(t)?;
        }
        if let Some(c) = self.candidate_cap {
            out = out.with_candidate_cap(c)?;
        }
        Ok(out)
    }
}

impl ProfileEntry {
    fn build(
        self,
        origin: &str,
        dir: &Path,
        scripts: &ScriptRegistry,
        source: &Script,
    ) -> Result<OriginProfile> {
        let bad = |m: String| Error::InvalidArgument(format!("profile `{origin}`: {m}"));
        let table = TranslitTable::parse(&load_ref(dir, &self.table)?, scripts)?;
        let target = scripts.get(table.target_script())?;
        let lm = match (&self.lm, &self.lm_names) {
            (Some(r), None) => {
                if self.lm_order.is_some() {
                    return Err(bad("lm_order only applies to lm_names".into()));
                }
                NgramModel::from_tsv(&load_ref(dir, r)?)?
            }
            (None, Some(r)) => NgramModel::train(
                &ingest_file(dir, r, target)?,
                target,
                self.lm_order.unwrap_or(DEFAULT_ORDER),
            )?,
            _ => return Err(bad("exactly one of `lm` and `lm_names` is required".into())),
        };
        let lexicon = match (&self.lexicon, &self.lexicon_names) {
            (Some(r), None) => NameLexicon::from_tsv(&load_ref(dir, r)?, scripts)?,
            (None, Some(r)) => ingest_file(dir, r, target)?,
            (None, None) => NameLexicon::new(target.id()),
            _ => return Err(bad("`lexicon` and `lexicon_names` are exclusive".into())),
        };
        let first_names =
            FirstNameList::from_lines(origin, load_ref(dir, &self.first_names)?.lines(), source)?;
        let weights = match self.weights {
            Some(w) => InterpolationWeights::new(w)?,
            None => InterpolationWeights::uniform(lm.max_order()),
        };
        let mut profile = OriginProfile::new(origin, table, lm, lexicon, first_names, weights)?;
        if let Some(r) = &self.phoneme_table {
            profile =
                profile.with_phoneme_table(PhonemeTable::parse(&load_ref(dir, r)?, scripts)?)?;
        }
        Ok(profile)
    }
}
