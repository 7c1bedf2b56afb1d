//! Annotation-validation statistics: 1–4 quality ratings and unweighted
//! Cohen's kappa between two validators, computed over the repositories they
//! both rated.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use thiserror::Error;

pub const MIN_RATING: u8 = 1;
pub const MAX_RATING: u8 = 4;
const N_CATEGORIES: usize = (MAX_RATING - MIN_RATING + 1) as usize;

#[derive(Debug, Error)]
pub enum AgreeError {
    #[error("rating {rating} for {repo_id} outside {MIN_RATING}..={MAX_RATING}")]
    InvalidRating { repo_id: String, rating: i64 },
    #[error("no common repo_ids between {a} and {b}")]
    NoOverlap { a: String, b: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate rating for ({repo_id}, {annotator_id})")]
    DuplicateRating { line: usize, repo_id: String, annotator_id: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One annotator's ratings, keyed by repo_id.
#[derive(Debug, Clone, Serialize)]
pub struct RatingSheet {
    pub annotator_id: String,
    ratings: BTreeMap<String, u8>,
}

impl RatingSheet {
    pub fn new(annotator_id: impl Into<String>) -> RatingSheet {
        RatingSheet { annotator_id: annotator_id.into(), ratings: BTreeMap::new() }
    }

    pub fn insert(&mut self, repo_id: impl Into<String>, rating: u8) -> Result<(), AgreeError> {
        let repo_id = repo_id.into();
        if !(MIN_RATING..=MAX_RATING).contains(&rating) {
            return Err(AgreeError::InvalidRating { repo_id, rating: rating as i64 });
        }
        self.ratings.insert(repo_id, rating);
        Ok(())
    }

    pub fn ratings(&self) -> &BTreeMap<String, u8> {
        &self.ratings
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }
}

/// Unweighted Cohen's kappa over the repos both sheets rated:
/// κ = (p_o − p_e) / (1 − p_e), with p_o the observed agreement fraction and
/// p_e the chance agreement from the two raters' marginals. Returns 1 when
/// p_e = 1 (both raters constant on the same category implies p_o = 1).
pub fn cohen_kappa(a: &RatingSheet, b: &RatingSheet) -> Result<f64, AgreeError> {
    let mut n = 0usize;
    let mut agree = 0usize;
    let mut marginal_a = [0usize; N_CATEGORIES];
    let mut marginal_b = [0usize; N_CATEGORIES];
    for (repo_id, &ra) in a.ratings() {
        if let Some(&rb) = b.ratings().get(repo_id) {
            n += 1;
            if ra == rb {
                agree += 1;
            }
            marginal_a[(ra - MIN_RATING) as usize] += 1;
            marginal_b[(rb - MIN_RATING) as usize] += 1;
        }
    }
    if n == 0 {
        return Err(AgreeError::NoOverlap {
            a: a.annotator_id.clone(),
            b: b.annotator_id.clone(),
        });
    }
    let n = n as f64;
    let p_o = agree as f64 / n;
    let p_e: f64 = marginal_a
        .iter()
        .zip(&marginal_b)
        .map(|(&ca, &cb)| (ca as f64 / n) * (cb as f64 / n))
        .sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Ok(1.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Counts per rating category 1..=4; index 0 holds rating 1.
pub fn rating_distribution(sheet: &RatingSheet) -> [usize; N_CATEGORIES] {
    let mut counts = [0usize; N_CATEGORIES];
    for &rating in sheet.ratings().values() {
        counts[(rating - MIN_RATING) as usize] += 1;
    }
    counts
}

/// Load rating sheets from a `repo_id,annotator_id,rating` CSV (header line
/// optional). Sheets come back sorted by annotator_id.
pub fn load_ratings_csv<P: AsRef<Path>>(path: P) -> Result<Vec<RatingSheet>, AgreeError> {
    let file = File::open(path.as_ref())?;
    let reader = BufReader::new(file);
    let mut sheets: BTreeMap<String, RatingSheet> = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if line_no == 1 && fields == ["repo_id", "annotator_id", "rating"] {
            continue;
        }
        if fields.len() != 3 {
            return Err(AgreeError::Parse {
                line: line_no,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let (repo_id, annotator_id, rating_str) = (fields[0], fields[1], fields[2]);
        let rating: i64 = rating_str.parse().map_err(|_| AgreeError::Parse {
            line: line_no,
            message: format!("rating `{rating_str}` is not an integer"),
        })?;
        if !(MIN_RATING as i64..=MAX_RATING as i64).contains(&rating) {
            return Err(AgreeError::InvalidRating { repo_id: repo_id.to_string(), rating });
        }
        let sheet = sheets
            .entry(annotator_id.to_string())
            .or_insert_with(|| RatingSheet::new(annotator_id));
        if sheet.ratings.contains_key(repo_id) {
            return Err(AgreeError::DuplicateRating {
                line: line_no,
                repo_id: repo_id.to_string(),
                annotator_id: annotator_id.to_string(),
            });
        }
        sheet.insert(repo_id, rating as u8)?;
    }
    Ok(sheets.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sheet(annotator: &str, ratings: &[u8]) -> RatingSheet {
        let mut s = RatingSheet::new(annotator);
        for (i, &r) in ratings.iter().enumerate() {
            s.insert(format!("repo{i:03}"), r).unwrap();
        }
        s
    }

    #[test]
    fn identical_ratings_give_kappa_one() {
        let a = sheet("a", &[1, 2, 3, 4]);
        let b = sheet("b", &[1, 2, 3, 4]);
        assert_eq!(cohen_kappa(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn chance_level_agreement_gives_zero() {
        // Contingency by hand: p_o = 0.5, p_e = 0.5.
        let a = sheet("a", &[1, 2, 1, 2]);
        let b = sheet("b", &[1, 1, 2, 2]);
        let kappa = cohen_kappa(&a, &b).unwrap();
        assert!(kappa.abs() <= 1e-12, "got {kappa}");
    }

    #[test]
    fn systematic_disagreement_gives_minus_one() {
        // p_o = 0, p_e = 0.5.
        let a = sheet("a", &[1, 1, 2, 2]);
        let b = sheet("b", &[2, 2, 1, 1]);
        let kappa = cohen_kappa(&a, &b).unwrap();
        assert!((kappa + 1.0).abs() <= 1e-12, "got {kappa}");
    }

    #[test]
    fn constant_identical_raters_give_one() {
        let a = sheet("a", &[3, 3, 3]);
        let b = sheet("b", &[3, 3, 3]);
        assert_eq!(cohen_kappa(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn kappa_is_symmetric() {
        let a = sheet("a", &[1, 3, 2, 4, 1, 2]);
        let b = sheet("b", &[1, 2, 2, 4, 3, 2]);
        assert_eq!(cohen_kappa(&a, &b).unwrap(), cohen_kappa(&b, &a).unwrap());
    }

    #[test]
    fn only_overlap_counts() {
        let mut a = RatingSheet::new("a");
        a.insert("shared", 2).unwrap();
        a.insert("only-a", 4).unwrap();
        let mut b = RatingSheet::new("b");
        b.insert("shared", 2).unwrap();
        b.insert("only-b", 1).unwrap();
        assert_eq!(cohen_kappa(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn permuting_items_leaves_kappa_unchanged() {
        let mut a = RatingSheet::new("a");
        let mut b = RatingSheet::new("b");
        let items = [("r1", 1, 2), ("r2", 3, 3), ("r3", 2, 2), ("r4", 4, 1)];
        for (id, ra, rb) in items {
            a.insert(id, ra).unwrap();
            b.insert(id, rb).unwrap();
        }
        let mut a2 = RatingSheet::new("a");
        let mut b2 = RatingSheet::new("b");
        for (id, ra, rb) in items.iter().rev() {
            a2.insert(*id, *ra).unwrap();
            b2.insert(*id, *rb).unwrap();
        }
        assert_eq!(cohen_kappa(&a, &b).unwrap(), cohen_kappa(&a2, &b2).unwrap());
    }

    #[test]
    fn no_overlap_is_error() {
        let mut a = RatingSheet::new("a");
        a.insert("x", 1).unwrap();
        let mut b = RatingSheet::new("b");
        b.insert("y", 1).unwrap();
        assert!(matches!(cohen_kappa(&a, &b), Err(AgreeError::NoOverlap { .. })));
    }

    #[test]
    fn distribution_counts() {
        let s = sheet("a", &[4, 4, 3]);
        assert_eq!(rating_distribution(&s), [0, 0, 1, 2]);
        assert_eq!(rating_distribution(&RatingSheet::new("x")), [0, 0, 0, 0]);
    }

    #[test]
    fn distribution_sums_to_sheet_size() {
        let ratings: Vec<u8> = (0..200).map(|i| (i % 4 + 1) as u8).collect();
        let s = sheet("a", &ratings);
        let counts = rating_distribution(&s);
        assert_eq!(counts.iter().sum::<usize>(), 200);
    }

    #[test]
    fn invalid_rating_rejected() {
        let mut s = RatingSheet::new("a");
        assert!(s.insert("r", 5).is_err());
        assert!(s.insert("r", 0).is_err());
    }

    #[test]
    fn csv_loads_and_groups_by_annotator() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ratings.csv");
        std::fs::write(
            &path,
            "repo_id,annotator_id,rating\no/r1,alice,4\no/r2,alice,3\no/r1,bob,4\n",
        )
        .unwrap();
        let sheets = load_ratings_csv(&path).unwrap();
        assert_eq!(sheets.len(), 2);
        assert_eq!(sheets[0].annotator_id, "alice");
        assert_eq!(sheets[0].len(), 2);
        assert_eq!(sheets[1].annotator_id, "bob");
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ratings.csv");
        std::fs::write(&path, "o/r1,alice,4\no/r2,alice\n").unwrap();
        let err = load_ratings_csv(&path).unwrap_err();
        assert!(err.to_string().starts_with("line 2"), "got: {err}");
    }
}
