//! Loading COMPAS-style scored-outcome CSV exports.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::ranking::{build_ranking, Label, Ranking, RankingError, ScoredRecord, TiePolicy};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("missing column `{0}` in header")]
    MissingColumn(String),
    #[error("row {row}: {reason}")]
    MalformedRow { row: u64, reason: String },
    #[error("no rows left after filtering")]
    EmptyAfterFilter,
    #[error(transparent)]
    Ranking(#[from] RankingError),
}

/// The two risk scales of the assessment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scale {
    GeneralRecidivism,
    ViolentRecidivism,
}

impl Scale {
    pub fn short_name(self) -> &'static str {
        match self {
            Scale::GeneralRecidivism => "GRRS",
            Scale::ViolentRecidivism => "VRRS",
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Header names of the four consumed columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnMap {
    pub id: String,
    pub score: String,
    pub decile: String,
    pub outcome: String,
}

impl ColumnMap {
    /// Column names used by the ProPublica two-year export for each scale.
    pub fn for_scale(scale: Scale) -> ColumnMap {
        let (score, decile, outcome) = match scale {
            Scale::GeneralRecidivism => ("raw_score", "decile_score", "two_year_recid"),
            Scale::ViolentRecidivism => ("v_raw_score", "v_decile_score", "two_year_violent_recid"),
        };
        ColumnMap {
            id: "person_id".into(),
            score: score.into(),
            decile: decile.into(),
            outcome: outcome.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadOptions {
    pub columns: ColumnMap,
    pub delimiter: u8,
    /// Keep only the first row of each id.
    pub dedupe: bool,
    /// Drop rows whose score, decile or outcome cell is blank or `NA`
    /// instead of failing on them.
    pub drop_missing: bool,
    /// Optional `(column, value)` equality filter applied before anything else.
    pub filter: Option<(String, String)>,
}

impl LoadOptions {
    pub fn for_scale(scale: Scale) -> LoadOptions {
        LoadOptions {
            columns: ColumnMap::for_scale(scale),
            delimiter: b',',
            dedupe: true,
            drop_missing: true,
            filter: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompasRow {
    pub person_id: String,
    pub raw_score: f64,
    pub decile: u8,
    pub outcome: bool,
    pub scale: Scale,
}

/// What the filters did; printed alongside every report.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadSummary {
    pub rows_read: u64,
    pub dropped_by_filter: u64,
    pub dropped_missing_score: u64,
    pub dropped_missing_decile: u64,
    pub dropped_missing_outcome: u64,
    pub dropped_duplicate_id: u64,
    pub retained: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub rows: Vec<CompasRow>,
    pub summary: LoadSummary,
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty()
        || c.eq_ignore_ascii_case("na")
        || c.eq_ignore_ascii_case("nan")
        || c.eq_ignore_ascii_case("null")
}

fn parse_outcome(cell: &str) -> Option<bool> {
    match cell.trim().to_ascii_lowercase().as_str() {
        "1" | "1.0" | "true" | "yes" => Some(true),
        "0" | "0.0" | "false" | "no" => Some(false),
        _ => None,
    }
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize, IngestError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
}

enum Missing {
    Score,
    Decile,
    Outcome,
}

pub fn load_csv(path: &Path, options: &LoadOptions, scale: Scale) -> Result<Loaded, IngestError> {
    if !path.exists() {
        return Err(IngestError::FileNotFound(path.to_path_buf()));
    }
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| IngestError::MalformedRow {
            row: 1,
            reason: e.to_string(),
        })?
        .clone();
    let cols = &options.columns;
    let id_idx = column_index(&headers, &cols.id)?;
    let score_idx = column_index(&headers, &cols.score)?;
    let decile_idx = column_index(&headers, &cols.decile)?;
    let outcome_idx = column_index(&headers, &cols.outcome)?;
    let filter_idx = match &options.filter {
        Some((col, value)) => Some((column_index(&headers, col)?, value.as_str())),
        None => None,
    };

    let mut summary = LoadSummary::default();
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // header is line 1
        let row_no = i as u64 + 2;
        let record = record.map_err(|e| IngestError::MalformedRow {
            row: row_no,
            reason: e.to_string(),
        })?;
        summary.rows_read += 1;
        let cell = |idx: usize| record.get(idx).unwrap_or("");

        if let Some((idx, value)) = filter_idx {
            if cell(idx).trim() != value {
                summary.dropped_by_filter += 1;
                continue;
            }
        }

        let id = cell(id_idx).trim();
        if id.is_empty() {
            return Err(IngestError::MalformedRow {
                row: row_no,
                reason: format!("empty `{}`", cols.id),
            });
        }

        let missing = if is_missing(cell(score_idx)) {
            Some(Missing::Score)
        } else if is_missing(cell(decile_idx)) {
            Some(Missing::Decile)
        } else if is_missing(cell(outcome_idx)) {
            Some(Missing::Outcome)
        } else {
            None
        };
        if let Some(what) = missing {
            let (counter, column) = match what {
                Missing::Score => (&mut summary.dropped_missing_score, &cols.score),
                Missing::Decile => (&mut summary.dropped_missing_decile, &cols.decile),
                Missing::Outcome => (&mut summary.dropped_missing_outcome, &cols.outcome),
            };
            if !options.drop_missing {
                return Err(IngestError::MalformedRow {
                    row: row_no,
                    reason: format!("missing `{column}`"),
                });
            }
            *counter += 1;
            continue;
        }

        let raw_score: f64 =
            cell(score_idx)
                .trim()
                .parse()
                .map_err(|_| IngestError::MalformedRow {
                    row: row_no,
                    reason: format!("`{}` = {:?} is not a number", cols.score, cell(score_idx)),
                })?;
        if !raw_score.is_finite() {
            return Err(IngestError::MalformedRow {
                row: row_no,
                reason: format!("`{}` = {raw_score} is not finite", cols.score),
            });
        }
        let decile = cell(decile_idx)
            .trim()
            .parse::<u8>()
            .ok()
            .filter(|d| (1..=10).contains(d))
            .ok_or_else(|| IngestError::MalformedRow {
                row: row_no,
                reason: format!(
                    "`{}` = {:?} is not a decile 1-10",
                    cols.decile,
                    cell(decile_idx)
                ),
            })?;
        let outcome =
            parse_outcome(cell(outcome_idx)).ok_or_else(|| IngestError::MalformedRow {
                row: row_no,
                reason: format!(
                    "`{}` = {:?} is not a binary outcome",
                    cols.outcome,
                    cell(outcome_idx)
                ),
            })?;

        if !seen.insert(id.to_string()) {
            if options.dedupe {
                summary.dropped_duplicate_id += 1;
                continue;
            }
            return Err(IngestError::MalformedRow {
                row: row_no,
                reason: format!("duplicate `{}` {id}", cols.id),
            });
        }
        rows.push(CompasRow {
            person_id: id.to_string(),
            raw_score,
            decile,
            outcome,
            scale,
        });
    }
    if rows.is_empty() {
        return Err(IngestError::EmptyAfterFilter);
    }
    summary.retained = rows.len() as u64;
    Ok(Loaded { rows, summary })
}

/// Ranks rows by raw score, ties by ascending id.
pub fn to_ranking(rows: &[CompasRow]) -> Result<Ranking, IngestError> {
    let records = rows
        .iter()
        .map(|r| {
            let label = if r.outcome {
                Label::Positive
            } else {
                Label::Negative
            };
            ScoredRecord::new(r.person_id.clone(), r.raw_score, label)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(build_ranking(records, TiePolicy::ByIdAscending)?)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DecileCount {
    pub total: u64,
    pub positives: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BucketRate {
    pub total: u64,
    pub positives: u64,
    pub rate: f64,
}

/// Per-decile outcome counts and the low / medium / high bucket rates.
///
/// A bucket with no members has no rate (`None`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecileReport {
    pub per_decile: [DecileCount; 10],
    pub low: Option<BucketRate>,
    pub medium: Option<BucketRate>,
    pub high: Option<BucketRate>,
}

impl DecileReport {
    pub fn n(&self) -> u64 {
        self.per_decile.iter().map(|d| d.total).sum()
    }
}

fn bucket(
    per_decile: &[DecileCount; 10],
    deciles: std::ops::RangeInclusive<usize>,
) -> Option<BucketRate> {
    let (total, positives) = per_decile[deciles.start() - 1..*deciles.end()]
        .iter()
        .fold((0, 0), |(t, p), d| (t + d.total, p + d.positives));
    (total > 0).then(|| BucketRate {
        total,
        positives,
        rate: positives as f64 / total as f64,
    })
}

pub fn decile_report(rows: &[CompasRow]) -> DecileReport {
    let mut per_decile = [DecileCount::default(); 10];
    for r in rows {
        let slot = &mut per_decile[r.decile as usize - 1];
        slot.total += 1;
        slot.positives += r.outcome as u64;
    }
    DecileReport {
        low: bucket(&per_decile, 1..=4),
        medium: bucket(&per_decile, 5..=7),
        high: bucket(&per_decile, 8..=10),
        per_decile,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn general() -> LoadOptions {
        LoadOptions::for_scale(Scale::GeneralRecidivism)
    }

    #[test]
    fn single_row() {
        let f = write_csv("person_id,raw_score,decile_score,two_year_recid\n7,0.25,3,1\n");
        let loaded = load_csv(f.path(), &general(), Scale::GeneralRecidivism).unwrap();
        assert_eq!(
            loaded.rows,
            vec![CompasRow {
                person_id: "7".into(),
                raw_score: 0.25,
                decile: 3,
                outcome: true,
                scale: Scale::GeneralRecidivism,
            }]
        );
        assert_eq!(loaded.summary.retained, 1);
    }

    #[test]
    fn filters_are_counted() {
        let f = write_csv(
            "person_id,name,raw_score,decile_score,two_year_recid\n\
             1,\"Doe, J\",0.5,5,1\n\
             2,x,,4,0\n\
             3,x,NA,4,0\n\
             4,x,-1.5,,1\n\
             5,x,-1.5,2,\n\
             1,x,0.9,9,0\n\
             6,x,-2,1,0\n",
        );
        let loaded = load_csv(f.path(), &general(), Scale::GeneralRecidivism).unwrap();
        let s = &loaded.summary;
        assert_eq!(s.rows_read, 7);
        assert_eq!(s.dropped_missing_score, 2);
        assert_eq!(s.dropped_missing_decile, 1);
        assert_eq!(s.dropped_missing_outcome, 1);
        assert_eq!(s.dropped_duplicate_id, 1);
        assert_eq!(s.retained, 2);
        // first occurrence of id 1 wins
        assert_eq!(loaded.rows[0].raw_score, 0.5);
    }

    #[test]
    fn strict_mode_rejects_missing_and_duplicates() {
        let mut opts = general();
        opts.drop_missing = false;
        let f = write_csv("person_id,raw_score,decile_score,two_year_recid\n1,,3,1\n");
        assert!(matches!(
            load_csv(f.path(), &opts, Scale::GeneralRecidivism),
            Err(IngestError::MalformedRow { row: 2, .. })
        ));
        let mut opts = general();
        opts.dedupe = false;
        let f =
            write_csv("person_id,raw_score,decile_score,two_year_recid\n1,0.1,3,1\n1,0.2,3,0\n");
        assert!(matches!(
            load_csv(f.path(), &opts, Scale::GeneralRecidivism),
            Err(IngestError::MalformedRow { row: 3, .. })
        ));
    }

    #[test]
    fn error_paths() {
        let missing = Path::new("/definitely/not/here.csv");
        assert!(matches!(
            load_csv(missing, &general(), Scale::GeneralRecidivism),
            Err(IngestError::FileNotFound(_))
        ));
        let f = write_csv("person_id,raw_score,two_year_recid\n1,0.1,1\n");
        match load_csv(f.path(), &general(), Scale::GeneralRecidivism) {
            Err(IngestError::MissingColumn(c)) => assert_eq!(c, "decile_score"),
            other => panic!("unexpected {other:?}"),
        }
        let f = write_csv("person_id,raw_score,decile_score,two_year_recid\n1,abc,3,1\n");
        assert!(matches!(
            load_csv(f.path(), &general(), Scale::GeneralRecidivism),
            Err(IngestError::MalformedRow { row: 2, .. })
        ));
        let f = write_csv("person_id,raw_score,decile_score,two_year_recid\n1,0.3,11,1\n");
        assert!(matches!(
            load_csv(f.path(), &general(), Scale::GeneralRecidivism),
            Err(IngestError::MalformedRow { .. })
        ));
        let f = write_csv("person_id,raw_score,decile_score,two_year_recid\n1,0.3,2,maybe\n");
        assert!(matches!(
            load_csv(f.path(), &general(), Scale::GeneralRecidivism),
            Err(IngestError::MalformedRow { .. })
        ));
        let f = write_csv("person_id,raw_score,decile_score,two_year_recid\n1,,2,1\n");
        assert!(matches!(
            load_csv(f.path(), &general(), Scale::GeneralRecidivism),
            Err(IngestError::EmptyAfterFilter)
        ));
    }

    #[test]
    fn delimiter_and_row_filter() {
        let f = write_csv(
            "person_id;type;raw_score;decile_score;two_year_recid\n\
             1;Risk of Violence;0.1;2;0\n\
             2;Risk of Recidivism;0.4;6;1\n",
        );
        let mut opts = general();
        opts.delimiter = b';';
        opts.filter = Some(("type".into(), "Risk of Recidivism".into()));
        let loaded = load_csv(f.path(), &opts, Scale::GeneralRecidivism).unwrap();
        assert_eq!(loaded.rows.len(), 1);
        assert_eq!(loaded.rows[0].person_id, "2");
        assert_eq!(loaded.summary.dropped_by_filter, 1);
    }

    #[test]
    fn tied_scores_rank_by_id() {
        let rows = vec![
            CompasRow {
                person_id: "b".into(),
                raw_score: 1.0,
                decile: 5,
                outcome: false,
                scale: Scale::GeneralRecidivism,
            },
            CompasRow {
                person_id: "a".into(),
                raw_score: 1.0,
                decile: 5,
                outcome: true,
                scale: Scale::GeneralRecidivism,
            },
        ];
        let r = to_ranking(&rows).unwrap();
        assert_eq!(r.items()[0].id(), "a");
        assert_eq!((r.k1(), r.k2()), (1, 1));
        assert!(matches!(
            to_ranking(&[]),
            Err(IngestError::Ranking(RankingError::EmptyInput))
        ));
    }

    #[test]
    fn deciles() {
        let row = |decile, outcome| CompasRow {
            person_id: String::new(),
            raw_score: 0.0,
            decile,
            outcome,
            scale: Scale::ViolentRecidivism,
        };
        let rows = vec![
            row(1, false),
            row(1, false),
            row(5, true),
            row(9, true),
            row(10, false),
        ];
        let rep = decile_report(&rows);
        assert_eq!(rep.n(), 5);
        assert_eq!(
            rep.per_decile[0],
            DecileCount {
                total: 2,
                positives: 0
            }
        );
        assert_eq!(rep.low.unwrap().rate, 0.0);
        assert_eq!(rep.medium.unwrap().rate, 1.0);
        assert_eq!(rep.high.unwrap().rate, 0.5);

        let only_low = decile_report(&[row(1, false), row(1, false)]);
        assert_eq!(only_low.low.unwrap().rate, 0.0);
        assert_eq!(only_low.medium, None);
        assert_eq!(only_low.high, None);
    }
}
