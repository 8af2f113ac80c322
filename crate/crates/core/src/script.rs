//! Scripts as declared symbol inventories, and the normalized [`Token`].
//!
//! A symbol is a single `char`. Algorithms never look inside symbols, so toy
//! alphabets declared at runtime behave exactly like the built-in Latin,
//! Hebrew and Arabic inventories.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Characters reserved by the file formats; no script may declare them.
const RESERVED: &[char] = &['|', '*', '\t', '#'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    id: String,
    cased: bool,
    symbols: BTreeSet<char>,
}

impl Script {
    pub fn new(
        id: impl Into<String>,
        symbols: impl IntoIterator<Item = char>,
        cased: bool,
    ) -> Result<Self> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!("bad script id {id:?}")));
        }
        let symbols: BTreeSet<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "script `{id}` declares no symbols"
            )));
        }
        if let Some(c) = symbols
            .iter()
            .find(|c| c.is_whitespace() || RESERVED.contains(c))
        {
            return Err(Error::InvalidArgument(format!(
                "script `{id}` declares reserved symbol {c:?}"
            )));
        }
        if cased
            && symbols
                .iter()
                .any(|c| c.to_lowercase().ne(std::iter::once(*c)))
        {
            return Err(Error::InvalidArgument(format!(
                "cased script `{id}` must declare lower-case symbols only"
            )));
        }
        Ok(Script { id, cased, symbols })
    }

    /// Lower-case ASCII letters plus the apostrophe used in multigraphs like `a'a`.
    pub fn latin() -> Self {
        Script::new("latin", ('a'..='z').chain(['\'']), true).expect("valid builtin")
    }

    /// The 27 Hebrew letters (final forms included) and the geresh, written as
    /// an ASCII apostrophe (`צ'`, `ג'`).
    pub fn hebrew() -> Self {
        Script::new("hebrew", ('\u{05D0}'..='\u{05EA}').chain(['\'']), false)
            .expect("valid builtin")
    }

    /// Basic Arabic letters, hamza through yeh.
    pub fn arabic() -> Self {
        Script::new("arabic", '\u{0621}'..='\u{064A}', false).expect("valid builtin")
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn is_cased(&self) -> bool {
        self.cased
    }

    pub fn symbols(&self) -> &BTreeSet<char> {
        &self.symbols
    }

    pub fn contains(&self, symbol: char) -> bool {
        self.symbols.contains(&symbol)
    }

    /// Normalizes one whitespace-free chunk of raw text.
    ///
    /// Strips surrounding punctuation that is not itself a script symbol (so a
    /// trailing geresh survives), case-folds for cased scripts, and checks that
    /// every remaining symbol belongs to this script. `Ok(None)` means the chunk
    /// was pure punctuation.
    pub fn normalize(&self, raw: &str) -> Result<Option<Token>> {
        let trimmed = raw.trim_matches(|c: char| !c.is_alphanumeric() && !self.contains(c));
        if trimmed.is_empty() {
            return Ok(None);
        }
        let text: String = if self.cased {
            trimmed.chars().flat_map(char::to_lowercase).collect()
        } else {
            trimmed.to_string()
        };
        if let Some(symbol) = text.chars().find(|c| !self.contains(*c)) {
            return Err(Error::ForeignSymbol {
                symbol,
                script: self.id.clone(),
            });
        }
        Ok(Some(Token(text)))
    }

    /// Verifies that `text` is already a normalized token of this script.
    pub fn token(&self, text: &str) -> Result<Token> {
        if text.is_empty() {
            return Err(Error::EmptyToken);
        }
        if let Some(symbol) = text.chars().find(|c| !self.contains(*c)) {
            return Err(Error::ForeignSymbol {
                symbol,
                script: self.id.clone(),
            });
        }
        Ok(Token(text.to_string()))
    }

    /// Splits a raw name on whitespace and normalizes each piece.
    pub fn tokenize(&self, name: &str) -> Result<Vec<Token>> {
        let mut out = Vec::new();
        for chunk in name.split_whitespace() {
            if let Some(tok) = self.normalize(chunk)? {
                out.push(tok);
            }
        }
        Ok(out)
    }
}

/// A non-empty, whitespace-free, normalized sequence of symbols.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.0.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl Borrow<str> for Token {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Custom script declaration as it appears in profile manifests.
#[derive(Debug, Clone, Deserialize)]
pub struct ScriptDecl {
    pub id: String,
    pub symbols: String,
    #[serde(default)]
    pub cased: bool,
}

/// The set of scripts known to a run: built-ins plus any declared ones.
#[derive(Debug, Clone)]
pub struct ScriptRegistry {
    scripts: BTreeMap<String, Script>,
}

impl Default for ScriptRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl ScriptRegistry {
    pub fn empty() -> Self {
        ScriptRegistry {
            scripts: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        for s in [Script::latin(), Script::hebrew(), Script::arabic()] {
            reg.scripts.insert(s.id.clone(), s);
        }
        reg
    }

    /// Adds or replaces a script.
    pub fn register(&mut self, script: Script) {
        self.scripts.insert(script.id.clone(), script);
    }

    pub fn declare(&mut self, decl: &ScriptDecl) -> Result<()> {
        self.register(Script::new(
            decl.id.clone(),
            decl.symbols.chars(),
            decl.cased,
        )?);
        Ok(())
    }

    /// Declares every `[[script]]` table of a TOML document, in the same
    /// layout profile manifests use. Returns how many were declared.
    pub fn declare_toml(&mut self, text: &str) -> Result<usize> {
        #[derive(Deserialize)]
        struct Decls {
            #[serde(default)]
            script: Vec<ScriptDecl>,
        }
        let decls: Decls = toml::from_str(text).map_err(|e| Error::Format {
            what: "script declarations",
            line: 0,
            message: e.to_string(),
        })?;
        for d in &decls.script {
            self.declare(d)?;
        }
        Ok(decls.script.len())
    }

    pub fn get(&self, id: &str) -> Result<&Script> {
        self.scripts
            .get(id)
            .ok_or_else(|| Error::UnknownScript(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.scripts.keys().map(String::as_str)
    }

    /// Scripts other than `except` that contain `symbol`; used for diagnostics.
    pub fn owners_of(&self, symbol: char, except: &str) -> Vec<&str> {
        self.scripts
            .values()
            .filter(|s| s.id != except && s.contains(symbol))
            .map(|s| s.id.as_str())
            .collect()
    }
}
