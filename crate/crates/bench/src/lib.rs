//! Fixture corpora shared by the benchmarks.

use morphkit::{generate_corpus, Corpus, LanguageKind, LanguageSpec, Preset};

/// A corpus of `kind` over the default preset.
pub fn default_corpus(kind: LanguageKind, seed: u64) -> Corpus {
    generate_corpus(&LanguageSpec::new(kind, Preset::Default.config(), seed))
        .expect("default preset languages build")
}

/// A corpus of `kind` over the inflection preset.
pub fn inflection_corpus(kind: LanguageKind, seed: u64) -> Corpus {
    generate_corpus(&LanguageSpec::new(kind, Preset::Inflection.config(), seed))
        .expect("inflection preset languages build")
}
