//! Expected-tuple files: one tuple per line, comma-separated integers in
//! dataset class order, `#` comments allowed. Bundled M22 files carry a
//! `# classes:` header and are pinned by SHA-256.

use std::collections::BTreeSet;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::chartab::CharacterTable;
use crate::solver::SolutionSet;

macro_rules! bundled {
    ($($k:literal),*) => {
        &[$(($k, include_str!(concat!("../data/expected/order_", stringify!($k), ".txt")))),*]
    };
}

/// Bundled expected files for M22, keyed by order.
pub const BUNDLED: &[(u64, &str)] = bundled!(2, 3, 4, 5, 6, 7, 8, 10, 11, 12, 14, 15, 21, 22, 33, 35, 55, 77);

pub const BUNDLED_SUMS: &str = include_str!("../data/expected/SHA256SUMS");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpectedError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: tuple has {found} entries, expected {expected}")]
    Width { line: usize, expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpectedFile {
    /// From a `# ... units of order k` header, if present.
    pub order: Option<u64>,
    /// From a `# classes: a,b,...` header, if present.
    pub classes: Option<Vec<String>>,
    pub tuples: BTreeSet<Vec<i64>>,
}

pub fn parse(text: &str) -> Result<ExpectedFile, ExpectedError> {
    let mut out = ExpectedFile::default();
    let mut width = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if let Some(comment) = s.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(list) = comment.strip_prefix("classes:") {
                out.classes = Some(list.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect());
            } else if let Some(rest) = comment.split("units of order ").nth(1) {
                let digits: String = rest.chars().take_while(char::is_ascii_digit).collect();
                out.order = digits.parse().ok();
            }
            continue;
        }
        if s.is_empty() {
            continue;
        }
        let tuple = s
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ExpectedError::Syntax { line, reason: format!("{e} in {s:?}") })?;
        let expected = *width.get_or_insert(tuple.len());
        if tuple.len() != expected {
            return Err(ExpectedError::Width { line, expected, found: tuple.len() });
        }
        out.tuples.insert(tuple);
    }
    Ok(out)
}

/// Renders a solution set in the bundled file layout.
pub fn format(t: &CharacterTable, set: &SolutionSet) -> String {
    let names: Vec<&str> = set.classes.iter().map(|&c| t.class_name(c)).collect();
    let mut s = format!(
        "# {}, units of order {}: {} tuples\n# classes: {}\n",
        t.group_name,
        set.order,
        set.len(),
        names.join(",")
    );
    for tuple in &set.tuples {
        let cells: Vec<String> = tuple.iter().map(i64::to_string).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn bundled(k: u64) -> Option<&'static str> {
    BUNDLED.iter().find(|(o, _)| *o == k).map(|(_, text)| *text)
}

pub fn bundled_orders() -> impl Iterator<Item = u64> {
    BUNDLED.iter().map(|(k, _)| *k)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Files whose digest disagrees with the bundled checksum list, or that are not listed.
pub fn checksum_mismatches() -> Vec<String> {
    let sums: Vec<(&str, &str)> = BUNDLED_SUMS
        .lines()
        .filter_map(|l| l.split_once("  "))
        .map(|(h, f)| (f.trim(), h.trim()))
        .collect();
    BUNDLED
        .iter()
        .filter_map(|(k, text)| {
            let file = format!("order_{k}.txt");
            match sums.iter().find(|(f, _)| *f == file) {
                Some((_, h)) if *h == sha256_hex(text.as_bytes()) => None,
                Some(_) => Some(format!("{file}: checksum mismatch")),
                None => Some(format!("{file}: not listed in SHA256SUMS")),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Diff {
    /// Expected but not computed.
    pub missing: Vec<Vec<i64>>,
    /// Computed but not expected.
    pub extra: Vec<Vec<i64>>,
}

impl Diff {
    pub fn is_clean(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

pub fn diff(expected: &ExpectedFile, computed: &SolutionSet) -> Diff {
    let got: BTreeSet<&Vec<i64>> = computed.tuples.iter().collect();
    Diff {
        missing: expected.tuples.iter().filter(|t| !got.contains(t)).cloned().collect(),
        extra: computed.tuples.iter().filter(|t| !expected.tuples.contains(*t)).cloned().collect(),
    }
}
