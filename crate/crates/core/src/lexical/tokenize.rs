//! Unicode-aware tokenization with per-edition stemmers.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::sync::Arc;

use rust_stemmers::Algorithm;

/// Minimum token length in characters, checked before stemming.
pub const MIN_TOKEN_CHARS: usize = 2;

pub trait Stemmer: Send + Sync {
    fn stem<'a>(&self, word: &'a str) -> Cow<'a, str>;
}

#[derive(Copy, Clone, Debug, Default)]
pub struct IdentityStemmer;

impl Stemmer for IdentityStemmer {
    fn stem<'a>(&self, word: &'a str) -> Cow<'a, str> {
        Cow::Borrowed(word)
    }
}

/// Snowball stemmer for one language.
pub struct SnowballStemmer(rust_stemmers::Stemmer);

impl SnowballStemmer {
    pub fn new(algorithm: Algorithm) -> Self {
        SnowballStemmer(rust_stemmers::Stemmer::create(algorithm))
    }
}

impl Stemmer for SnowballStemmer {
    fn stem<'a>(&self, word: &'a str) -> Cow<'a, str> {
        self.0.stem(word)
    }
}

/// Stemmers keyed by edition code. Editions without an entry fall back to
/// the identity stemmer.
#[derive(Clone)]
pub struct StemmerRegistry {
    stemmers: BTreeMap<String, Arc<dyn Stemmer>>,
}

impl StemmerRegistry {
    pub fn empty() -> Self {
        StemmerRegistry {
            stemmers: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, edition: impl Into<String>, stemmer: Arc<dyn Stemmer>) {
        self.stemmers.insert(edition.into(), stemmer);
    }

    pub fn has(&self, edition: &str) -> bool {
        self.stemmers.contains_key(edition)
    }

    pub fn editions(&self) -> impl Iterator<Item = &str> {
        self.stemmers.keys().map(String::as_str)
    }

    /// A tokenizer for `edition`, warning once if no stemmer is registered.
    pub fn tokenizer(&self, edition: &str) -> Tokenizer {
        let stemmer = match self.stemmers.get(edition) {
            Some(s) => Arc::clone(s),
            None => {
                log::warn!("no stemmer registered for edition {edition:?}; using identity");
                Arc::new(IdentityStemmer)
            }
        };
        Tokenizer { stemmer }
    }
}

impl Default for StemmerRegistry {
    /// Snowball stemmers for en, de, es, fr, it and ru.
    fn default() -> Self {
        let mut r = StemmerRegistry::empty();
        for (ed, alg) in [
            ("en", Algorithm::English),
            ("de", Algorithm::German),
            ("es", Algorithm::Spanish),
            ("fr", Algorithm::French),
            ("it", Algorithm::Italian),
            ("ru", Algorithm::Russian),
        ] {
            r.register(ed, Arc::new(SnowballStemmer::new(alg)));
        }
        r
    }
}

#[derive(Clone)]
pub struct Tokenizer {
    stemmer: Arc<dyn Stemmer>,
}

impl Tokenizer {
    pub fn identity() -> Self {
        Tokenizer {
            stemmer: Arc::new(IdentityStemmer),
        }
    }

    /// Lowercases, splits on non-letter characters, drops tokens shorter than
    /// [`MIN_TOKEN_CHARS`] and stems the rest.
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        text.split(|c: char| !c.is_alphabetic())
            .filter(|w| w.chars().nth(MIN_TOKEN_CHARS - 1).is_some())
            .map(|w| {
                let lower = w.to_lowercase();
                self.stemmer.stem(&lower).into_owned()
            })
            .collect()
    }
}

/// One-off tokenization; prefer [`StemmerRegistry::tokenizer`] in loops.
pub fn tokenize(text: &str, edition: &str, registry: &StemmerRegistry) -> Vec<String> {
    registry.tokenizer(edition).tokenize(text)
}
