//! Pattern-based PII scrubbing for cleaned README text.
//!
//! Email addresses are always replaced with `[EMAIL]`; callers may add their
//! own regex patterns (names, handles) which are replaced with `[NAME]`.
//! Everything else is left byte-identical.

use super::CorpusError;
use regex::Regex;
use std::sync::LazyLock;

/// The built-in email pattern (`local@domain.tld`).
pub const EMAIL_PATTERN: &str = r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}";

static EMAIL_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(EMAIL_PATTERN).unwrap());

#[derive(Debug)]
pub struct PiiScrubber {
    name_patterns: Vec<Regex>,
}

impl PiiScrubber {
    /// Scrubber with the built-in email rule only.
    pub fn new() -> Self {
        PiiScrubber { name_patterns: Vec::new() }
    }

    /// Scrubber with additional user-supplied name patterns. An invalid
    /// pattern is a configuration error naming the offending pattern.
    pub fn with_name_patterns<I, S>(patterns: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut compiled = Vec::new();
        for pattern in patterns {
            let pattern = pattern.as_ref();
            let re = Regex::new(pattern).map_err(|e| CorpusError::InvalidPattern {
                pattern: pattern.to_string(),
                message: e.to_string(),
            })?;
            compiled.push(re);
        }
        Ok(PiiScrubber { name_patterns: compiled })
    }

    pub fn scrub(&self, text: &str) -> String {
        let mut out = EMAIL_RE.replace_all(text, "[EMAIL]").into_owned();
        for re in &self.name_patterns {
            out = re.replace_all(&out, "[NAME]").into_owned();
        }
        out
    }
}

impl Default for PiiScrubber {
    fn default() -> Self {
        Self::new()
    }
}

/// Scrub with the built-in email rule only.
pub fn scrub_pii(text: &str) -> String {
    PiiScrubber::new().scrub(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn replaces_email() {
        assert_eq!(scrub_pii("contact a@b.com now"), "contact [EMAIL] now");
    }

    #[test]
    fn identity_without_pii() {
        assert_eq!(scrub_pii("no pii here"), "no pii here");
    }

    #[test]
    fn replaces_every_email() {
        assert_eq!(scrub_pii("a@b.com, c@d.org"), "[EMAIL], [EMAIL]");
    }

    #[test]
    fn name_patterns_replace_with_name_token() {
        let scrubber = PiiScrubber::with_name_patterns([r"Jane Doe"]).unwrap();
        assert_eq!(
            scrubber.scrub("written by Jane Doe <j@d.io>"),
            "written by [NAME] <[EMAIL]>"
        );
    }

    #[test]
    fn invalid_pattern_is_config_error_naming_it() {
        let err = PiiScrubber::with_name_patterns(["(unclosed"]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(unclosed"), "error should name the pattern: {msg}");
    }

    proptest! {
        #[test]
        fn output_never_matches_email_pattern(input in r"[A-Za-z0-9@._ \n-]{0,200}") {
            let out = scrub_pii(&input);
            prop_assert!(!EMAIL_RE.is_match(&out), "residual email in {out:?}");
        }
    }
}
