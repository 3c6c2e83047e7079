//! Survey ingestion: loading published-ADC records, validating them, and
//! the filtering/scaling passes applied before fitting or plotting.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Accepted ENOB range; rows outside it are rejected at load time.
pub const ENOB_RANGE: (f64, f64) = (1.0, 16.0);

/// Default slack for [`pareto_filter`].
pub const DEFAULT_PARETO_SLACK: f64 = 1.25;

/// ENOB buckets used when grouping survey points into plotted series.
pub const DEFAULT_ENOB_BUCKETS: [f64; 3] = [4.0, 8.0, 12.0];

/// One published ADC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdcRecord {
    pub id: String,
    pub tech_nm: f64,
    pub enob: f64,
    pub throughput_sps: f64,
    pub energy_pj: f64,
    /// Missing for designs that did not report area; such records are
    /// still usable for energy fitting.
    pub area_um2: Option<f64>,
}

impl AdcRecord {
    /// Checks the record invariants, returning the first offending field
    /// and a reason.
    pub fn check(&self) -> Result<(), (Field, String)> {
        if self.id.is_empty() {
            return Err((Field::Id, "empty".into()));
        }
        let positive = |field, v: f64| {
            if !v.is_finite() {
                Err((field, format!("not finite ({v})")))
            } else if v <= 0.0 {
                Err((field, format!("must be > 0, got {v}")))
            } else {
                Ok(())
            }
        };
        positive(Field::TechNm, self.tech_nm)?;
        positive(Field::Enob, self.enob)?;
        if self.enob < ENOB_RANGE.0 || self.enob > ENOB_RANGE.1 {
            return Err((
                Field::Enob,
                format!(
                    "outside [{}, {}], got {}",
                    ENOB_RANGE.0, ENOB_RANGE.1, self.enob
                ),
            ));
        }
        positive(Field::ThroughputSps, self.throughput_sps)?;
        positive(Field::EnergyPj, self.energy_pj)?;
        if let Some(a) = self.area_um2 {
            positive(Field::AreaUm2, a)?;
        }
        Ok(())
    }
}

/// Canonical record fields, named as they appear in column mappings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Id,
    TechNm,
    Enob,
    ThroughputSps,
    EnergyPj,
    AreaUm2,
}

impl Field {
    pub const ALL: [Field; 6] = [
        Field::Id,
        Field::TechNm,
        Field::Enob,
        Field::ThroughputSps,
        Field::EnergyPj,
        Field::AreaUm2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::Id => "id",
            Field::TechNm => "tech_nm",
            Field::Enob => "enob",
            Field::ThroughputSps => "throughput_sps",
            Field::EnergyPj => "energy_pj",
            Field::AreaUm2 => "area_um2",
        }
    }

    pub fn from_name(name: &str) -> Option<Field> {
        Field::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn required(self) -> bool {
        self != Field::AreaUm2
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Maps canonical fields to the column headers used by a particular survey
/// file. Unmapped fields fall back to their canonical name.
///
/// The text form is one `canonical = source column` pair per line; blank
/// lines and `#` comments are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ColumnMapping {
    columns: BTreeMap<Field, String>,
}

impl ColumnMapping {
    pub fn with(mut self, field: Field, column: impl Into<String>) -> Self {
        self.columns.insert(field, column.into());
        self
    }

    pub fn column(&self, field: Field) -> &str {
        self.columns
            .get(&field)
            .map_or(field.name(), String::as_str)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut mapping = ColumnMapping::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "mapping line {}: expected `key = column`",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let field = Field::from_name(key).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "mapping line {}: unknown field `{key}`",
                    lineno + 1
                ))
            })?;
            let value = value.trim().trim_matches('"');
            if value.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "mapping line {}: empty column name for `{key}`",
                    lineno + 1
                )));
            }
            mapping.columns.insert(field, value.to_string());
        }
        Ok(mapping)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub rows_read: usize,
}

/// A validated, non-empty collection of records with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    records: Vec<AdcRecord>,
    provenance: Provenance,
}

impl Corpus {
    pub fn new(records: Vec<AdcRecord>, provenance: Provenance) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyCorpus(PathBuf::from(&provenance.source)));
        }
        let mut seen = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if let Err((field, reason)) = r.check() {
                return Err(Error::InvalidArgument(format!(
                    "record {i}: {field}: {reason}"
                )));
            }
            if seen.insert(r.id.as_str(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate id `{}`", r.id)));
            }
        }
        Ok(Corpus {
            records,
            provenance,
        })
    }

    pub fn from_records(records: Vec<AdcRecord>) -> Result<Self> {
        let rows_read = records.len();
        Self::new(
            records,
            Provenance {
                source: "<memory>".into(),
                rows_read,
            },
        )
    }

    pub fn records(&self) -> &[AdcRecord] {
        &self.records
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, AdcRecord> {
        self.records.iter()
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a AdcRecord;
    type IntoIter = std::slice::Iter<'a, AdcRecord>;

    fn into_iter(self) -> Self::IntoIter {
        self.records.iter()
    }
}

/// A rejected input row. `row` counts data rows from 1, header excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub row: usize,
    pub field: String,
    pub reason: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "row {}: {}: {}", self.row, self.field, self.reason)
    }
}

#[derive(Debug, Clone)]
pub struct LoadReport {
    pub corpus: Corpus,
    pub diagnostics: Vec<Diagnostic>,
}

/// Loads a delimited-text survey file. Comma, tab and semicolon
/// delimiters are recognised from the header line.
pub fn load_corpus(path: &Path, mapping: &ColumnMapping) -> Result<LoadReport> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus(&text, &path.display().to_string(), mapping)
}

/// Same as [`load_corpus`] over in-memory text; `source` labels provenance.
pub fn parse_corpus(text: &str, source: &str, mapping: &ColumnMapping) -> Result<LoadReport> {
    let header_line = text.lines().next().unwrap_or("");
    let delimiter = b",\t;"
        .iter()
        .copied()
        .max_by_key(|&d| header_line.bytes().filter(|&b| b == d).count())
        .unwrap_or(b',');
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let parse_err = |message: String| Error::Parse {
        path: PathBuf::from(source),
        message,
    };
    let headers = reader
        .headers()
        .map_err(|e| parse_err(e.to_string()))?
        .clone();

    let mut index = BTreeMap::new();
    for field in Field::ALL {
        let column = mapping.column(field);
        match headers.iter().position(|h| h == column) {
            Some(i) => {
                index.insert(field, i);
            }
            None if field.required() || mapping.columns.contains_key(&field) => {
                return Err(Error::UnmappableColumn(format!(
                    "{field} -> `{column}` not found in header of {source}"
                )));
            }
            None => {}
        }
    }

    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut rows_read = 0;
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        rows_read += 1;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                diagnostics.push(Diagnostic {
                    row: row_no,
                    field: "row".into(),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        match parse_row(&row, &index) {
            Ok(record) => {
                if let Some(first) = seen.get(&record.id) {
                    diagnostics.push(Diagnostic {
                        row: row_no,
                        field: Field::Id.to_string(),
                        reason: format!("duplicate of row {first}"),
                    });
                } else {
                    seen.insert(record.id.clone(), row_no);
                    records.push(record);
                }
            }
            Err((field, reason)) => diagnostics.push(Diagnostic {
                row: row_no,
                field: field.to_string(),
                reason,
            }),
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyCorpus(PathBuf::from(source)));
    }
    let corpus = Corpus::new(
        records,
        Provenance {
            source: source.to_string(),
            rows_read,
        },
    )?;
    Ok(LoadReport {
        corpus,
        diagnostics,
    })
}

fn parse_row(
    row: &csv::StringRecord,
    index: &BTreeMap<Field, usize>,
) -> Result<AdcRecord, (Field, String)> {
    let cell = |field: Field| index.get(&field).and_then(|&i| row.get(i)).unwrap_or("");
    let number = |field: Field| -> Result<f64, (Field, String)> {
        let raw = cell(field);
        if raw.is_empty() {
            return Err((field, "missing".into()));
        }
        raw.parse::<f64>()
            .map_err(|_| (field, format!("not a number: `{raw}`")))
    };
    let area_raw = cell(Field::AreaUm2);
    let record = AdcRecord {
        id: cell(Field::Id).to_string(),
        tech_nm: number(Field::TechNm)?,
        enob: number(Field::Enob)?,
        throughput_sps: number(Field::ThroughputSps)?,
        energy_pj: number(Field::EnergyPj)?,
        area_um2: if area_raw.is_empty() {
            None
        } else {
            Some(number(Field::AreaUm2)?)
        },
    };
    record.check()?;
    Ok(record)
}

/// Keeps records that no other record beats by at least `slack`.
///
/// Axes: lower energy, lower area, higher throughput, higher ENOB. Record
/// `j` knocks out `i` when it is no worse on every axis and at least
/// `slack` times better on one of them (with `slack == 1` this is strict
/// domination). Area is compared only when both records report it.
pub fn pareto_filter(corpus: &Corpus, slack: f64) -> Result<Corpus> {
    if !(slack.is_finite() && slack >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "pareto slack must be >= 1, got {slack}"
        )));
    }
    let recs = corpus.records();
    let kept: Vec<AdcRecord> = recs
        .iter()
        .filter(|r| !recs.iter().any(|other| dominates(other, r, slack)))
        .cloned()
        .collect();
    Corpus::new(kept, corpus.provenance.clone())
}

/// Whether `a` knocks `b` off the near-Pareto front at the given slack.
pub fn dominates(a: &AdcRecord, b: &AdcRecord, slack: f64) -> bool {
    // Improvement ratios, >= 1 means `a` is no worse.
    let mut ratios = vec![
        b.energy_pj / a.energy_pj,
        a.throughput_sps / b.throughput_sps,
        a.enob / b.enob,
    ];
    if let (Some(aa), Some(ba)) = (a.area_um2, b.area_um2) {
        ratios.push(ba / aa);
    }
    ratios.iter().all(|&r| r >= 1.0) && ratios.iter().any(|&r| r > 1.0 && r >= slack)
}

/// Exponents applied when moving a record to another technology node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeScaling {
    pub energy_exponent: f64,
    pub area_exponent: f64,
}

impl Default for NodeScaling {
    fn default() -> Self {
        NodeScaling {
            energy_exponent: 1.0,
            area_exponent: 1.0,
        }
    }
}

/// Rescales energy and area by `(target/tech)^p`; throughput and ENOB are
/// carried over unchanged.
pub fn scale_to_node(
    record: &AdcRecord,
    target_nm: f64,
    scaling: NodeScaling,
) -> Result<AdcRecord> {
    ensure_positive("target_nm", target_nm)?;
    if target_nm == record.tech_nm {
        return Ok(record.clone());
    }
    let ratio = target_nm / record.tech_nm;
    Ok(AdcRecord {
        tech_nm: target_nm,
        energy_pj: record.energy_pj * ratio.powf(scaling.energy_exponent),
        area_um2: record
            .area_um2
            .map(|a| a * ratio.powf(scaling.area_exponent)),
        ..record.clone()
    })
}

/// Nearest bucket to `enob`; ties go to the lower bucket.
pub fn enob_bucket(enob: f64, buckets: &[f64]) -> Option<f64> {
    buckets
        .iter()
        .copied()
        .fold(None, |best: Option<f64>, b| match best {
            Some(cur) if (enob - cur).abs() <= (enob - b).abs() => Some(cur),
            _ => Some(b),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CLEAN: &str = "\
id,tech_nm,enob,throughput_sps,energy_pj,area_um2
a,65,8,1e8,4,1000
b,28,10.5,5e8,2.5,
c,180,6,1e6,0.9,20000
";

    fn rec(id: &str, tech: f64, enob: f64, thr: f64, e: f64, area: Option<f64>) -> AdcRecord {
        AdcRecord {
            id: id.into(),
            tech_nm: tech,
            enob,
            throughput_sps: thr,
            energy_pj: e,
            area_um2: area,
        }
    }

    #[test]
    fn clean_file_loads_all_rows() {
        let report = parse_corpus(CLEAN, "clean.csv", &ColumnMapping::default()).unwrap();
        assert_eq!(report.corpus.len(), 3);
        assert!(report.diagnostics.is_empty());
        assert_eq!(report.corpus.records()[1].area_um2, None);
        assert_eq!(report.corpus.records()[2].id, "c");
    }

    #[test]
    fn negative_energy_row_is_diagnosed() {
        let text = CLEAN.replace("a,65,8,1e8,4,1000", "a,65,8,1e8,-1,1000");
        let report = parse_corpus(&text, "x.csv", &ColumnMapping::default()).unwrap();
        assert_eq!(report.corpus.len(), 2);
        assert_eq!(report.diagnostics.len(), 1);
        let d = &report.diagnostics[0];
        assert_eq!(d.row, 1);
        assert_eq!(d.field, "energy_pj");
        assert!(d.to_string().starts_with("row 1: energy_pj: "));
    }

    #[test]
    fn enob_out_of_range_and_duplicates_rejected() {
        let text = format!("{CLEAN}d,65,17,1e8,4,1000\na,65,8,1e8,4,1000\n");
        let report = parse_corpus(&text, "x.csv", &ColumnMapping::default()).unwrap();
        assert_eq!(report.corpus.len(), 3);
        let fields: Vec<_> = report
            .diagnostics
            .iter()
            .map(|d| (d.row, d.field.as_str()))
            .collect();
        assert_eq!(fields, vec![(4, "enob"), (5, "id")]);
    }

    #[test]
    fn mapped_headers_match_canonical() {
        let renamed = CLEAN
            .replace("throughput_sps", "fsnyq")
            .replace("energy_pj", "P/fsnyq [pJ]");
        let mapping = ColumnMapping::parse(
            "# survey columns\nthroughput_sps = fsnyq\nenergy_pj = \"P/fsnyq [pJ]\"\n",
        )
        .unwrap();
        let a = parse_corpus(CLEAN, "x", &ColumnMapping::default()).unwrap();
        let b = parse_corpus(&renamed, "x", &mapping).unwrap();
        assert_eq!(a.corpus.records(), b.corpus.records());
    }

    #[test]
    fn unmappable_column_is_an_error() {
        let mapping = ColumnMapping::default().with(Field::Enob, "ENOB_SNDR");
        let err = parse_corpus(CLEAN, "x", &mapping).unwrap_err();
        assert!(matches!(err, Error::UnmappableColumn(ref m) if m.contains("ENOB_SNDR")));
    }

    #[test]
    fn zero_valid_rows_is_an_error() {
        let text = "id,tech_nm,enob,throughput_sps,energy_pj\na,65,8,1e8,0\n";
        assert!(matches!(
            parse_corpus(text, "x", &ColumnMapping::default()),
            Err(Error::EmptyCorpus(_))
        ));
    }

    #[test]
    fn tab_delimited_is_detected() {
        let text = CLEAN.replace(',', "\t");
        assert_eq!(
            parse_corpus(&text, "x", &ColumnMapping::default())
                .unwrap()
                .corpus
                .len(),
            3
        );
    }

    #[test]
    fn bad_mapping_line() {
        assert!(ColumnMapping::parse("nonsense").is_err());
        assert!(ColumnMapping::parse("voltage = v").is_err());
    }

    #[test]
    fn strict_domination_at_unit_slack() {
        let a = rec("a", 65.0, 8.0, 1e8, 1.0, Some(100.0));
        let b = rec("b", 65.0, 8.0, 1e8, 2.0, Some(100.0));
        let corpus = Corpus::from_records(vec![a.clone(), b]).unwrap();
        let kept = pareto_filter(&corpus, 1.0).unwrap();
        assert_eq!(kept.records(), &[a]);
    }

    #[test]
    fn slack_keeps_near_front_points() {
        let a = rec("a", 65.0, 8.0, 1e8, 1.0, Some(100.0));
        let b = rec("b", 65.0, 8.0, 1e8, 1.2, Some(100.0));
        let corpus = Corpus::from_records(vec![a, b]).unwrap();
        assert_eq!(
            pareto_filter(&corpus, DEFAULT_PARETO_SLACK).unwrap().len(),
            2
        );
        assert_eq!(pareto_filter(&corpus, 1.0).unwrap().len(), 1);
    }

    #[test]
    fn single_record_survives() {
        let corpus = Corpus::from_records(vec![rec("a", 65.0, 8.0, 1e8, 1.0, None)]).unwrap();
        assert_eq!(pareto_filter(&corpus, 1.0).unwrap(), corpus);
    }

    #[test]
    fn scaling_rules() {
        let r = rec("a", 64.0, 8.0, 1e8, 4.0, Some(1000.0));
        assert_eq!(scale_to_node(&r, 64.0, NodeScaling::default()).unwrap(), r);
        let s = scale_to_node(&r, 32.0, NodeScaling::default()).unwrap();
        assert_eq!(s.area_um2, Some(500.0));
        assert_eq!(s.throughput_sps, r.throughput_sps);
        let r65 = rec("b", 65.0, 8.0, 1e8, 4.0, None);
        let half = scale_to_node(&r65, 32.5, NodeScaling::default()).unwrap();
        assert!((half.energy_pj - 2.0).abs() < 1e-12);
        assert!(scale_to_node(&r, 0.0, NodeScaling::default()).is_err());
    }

    #[test]
    fn buckets_round_to_nearest() {
        let b = DEFAULT_ENOB_BUCKETS;
        assert_eq!(enob_bucket(5.9, &b), Some(4.0));
        assert_eq!(enob_bucket(6.1, &b), Some(8.0));
        assert_eq!(enob_bucket(6.0, &b), Some(4.0));
        assert_eq!(enob_bucket(15.0, &b), Some(12.0));
        assert_eq!(enob_bucket(1.0, &[]), None);
    }
}
