//! Markdown-to-plain-text stripping.
//!
//! Rules: headings lose their `#` markers; emphasis/bold/strikethrough
//! markers are removed keeping the inner text; `[text](url)` links become
//! `text`; images are removed entirely; inline HTML tags are removed keeping
//! inner text; fenced code blocks are dropped (kept without fences under
//! [`StripOptions::keep_code`]); inline code keeps its text; list bullets and
//! numbering stay as plain lines.
//!
//! The pass is iterated to a fixpoint, so the output is stable under
//! re-application for arbitrary input. Every rewrite strictly shortens the
//! text, which bounds the iteration.

use regex::Regex;
use std::sync::LazyLock;

#[derive(Debug, Clone, Copy, Default)]
pub struct StripOptions {
    /// Keep the contents of fenced code blocks (the fence lines themselves
    /// are always dropped).
    pub keep_code: bool,
}

static HTML_COMMENT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?s)<!--.*?-->").unwrap());
static SETEXT_OR_RULE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s{0,3}(?:={2,}|-{3,}|\*{3,}|_{3,})\s*$").unwrap());
static HEADING_ONLY: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?m)^ {0,3}#{1,6}[ \t]*$").unwrap());
static HEADING: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?m)^ {0,3}#{1,6}[ \t]+(.*?)(?:[ \t]+#+)?[ \t]*$").unwrap());
static BLOCKQUOTE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?m)^ {0,3}(?:>[ \t]?)+").unwrap());
static IMAGE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"!\[[^\]\n]*\](?:\([^)\n]*\)|\[[^\]\n]*\])").unwrap());
static LINK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[([^\]\n]*)\]\([^)\n]*\)").unwrap());
static REF_LINK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[([^\]\n]*)\]\[[^\]\n]*\]").unwrap());
static AUTOLINK: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"<((?:https?|ftp)://[^>\s]+|mailto:[^>\s]+)>").unwrap());
static HTML_TAG: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"</?[A-Za-z][A-Za-z0-9-]*(?:\s[^<>\n]*)?/?>").unwrap());
static INLINE_CODE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"`([^`\n]*)`").unwrap());
static BOLD_STAR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\*\*([^\s*][^*\n]*?[^\s*]|[^\s*])\*\*").unwrap());
static BOLD_UNDER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"__([^\s_][^_\n]*?[^\s_]|[^\s_])__").unwrap());
static STRIKE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"~~([^~\n]+?)~~").unwrap());
// Single-asterisk emphasis requires non-space content edges so that list
// bullets (`* item`) and stray asterisks survive untouched.
static EMPH_STAR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\*([^\s*][^*\n]*?[^\s*]|[^\s*])\*").unwrap());
// Underscore emphasis only at word boundaries, so snake_case identifiers keep
// their underscores. The regex crate has no lookarounds; boundaries are
// captured and re-emitted.
static EMPH_UNDER: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(^|[^A-Za-z0-9_])_([^\s_][^_\n]*?[^\s_]|[^\s_])_($|[^A-Za-z0-9_])").unwrap()
});

fn is_fence(line: &str) -> bool {
    let t = line.trim_start();
    t.starts_with("```") || t.starts_with("~~~")
}

/// Drop (or unfence) fenced code blocks and remove setext underlines,
/// thematic breaks, heading markers, and blockquote markers line by line.
fn strip_blocks(text: &str, keep_code: bool) -> String {
    let mut out: Vec<&str> = Vec::new();
    let mut in_fence = false;
    for line in text.lines() {
        if in_fence {
            if is_fence(line) {
                in_fence = false;
            } else if keep_code {
                out.push(line);
            }
            continue;
        }
        if is_fence(line) {
            in_fence = true;
            continue;
        }
        if SETEXT_OR_RULE.is_match(line) {
            continue;
        }
        out.push(line);
    }
    let mut joined = out.join("\n");
    if text.ends_with('\n') && !joined.is_empty() {
        joined.push('\n');
    }
    joined
}

fn strip_once(text: &str, keep_code: bool) -> String {
    let text = HTML_COMMENT.replace_all(text, "");
    let text = strip_blocks(&text, keep_code);
    let text = HEADING_ONLY.replace_all(&text, "");
    let text = HEADING.replace_all(&text, "$1");
    let text = BLOCKQUOTE.replace_all(&text, "");
    let text = IMAGE.replace_all(&text, "");
    let text = LINK.replace_all(&text, "$1");
    let text = REF_LINK.replace_all(&text, "$1");
    let text = AUTOLINK.replace_all(&text, "$1");
    let text = HTML_TAG.replace_all(&text, "");
    let text = INLINE_CODE.replace_all(&text, "$1");
    let text = BOLD_STAR.replace_all(&text, "$1");
    let text = BOLD_UNDER.replace_all(&text, "$1");
    let text = STRIKE.replace_all(&text, "$1");
    let text = EMPH_STAR.replace_all(&text, "$1");
    let text = EMPH_UNDER.replace_all(&text, "${1}${2}${3}");
    text.into_owned()
}

/// Strip markdown markup with the given options.
pub fn strip_markdown_with(text: &str, opts: &StripOptions) -> String {
    let mut current = text.replace("\r\n", "\n").replace('\r', "\n");
    loop {
        let next = strip_once(&current, opts.keep_code);
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Strip markdown markup with the default options (code blocks dropped).
pub fn strip_markdown(text: &str) -> String {
    strip_markdown_with(text, &StripOptions::default())
}
