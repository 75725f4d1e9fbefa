use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::psychometrics::cronbach_alpha;
use crate::{Error, Result};

pub const SCALE_MIN: f64 = 1.0;
pub const SCALE_MAX: f64 = 8.0;

/// One participant's trait ratings of one group on the 1–8 scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub participant_id: String,
    pub group_id: String,
    pub friendliness: f64,
    pub helpfulness: f64,
    pub violence: f64,
    pub intelligence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeOptions {
    /// Replace violence by `9 − violence` before averaging into warmth.
    pub reverse_code_violence: bool,
}

impl Default for CompositeOptions {
    fn default() -> Self {
        Self {
            reverse_code_violence: true,
        }
    }
}

impl CompositeOptions {
    fn warmth_items(&self, r: &SurveyRow) -> [f64; 3] {
        let v = if self.reverse_code_violence {
            SCALE_MIN + SCALE_MAX - r.violence
        } else {
            r.violence
        };
        [r.friendliness, r.helpfulness, v]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitComposite {
    pub participant_id: String,
    pub group_id: String,
    pub warmth: f64,
    pub competence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowRejection {
    /// Zero-based position in the input rows.
    pub index: usize,
    pub participant_id: String,
    pub group_id: String,
    pub reason: String,
}

fn check_row(r: &SurveyRow) -> std::result::Result<(), String> {
    for (name, v) in [
        ("friendliness", r.friendliness),
        ("helpfulness", r.helpfulness),
        ("violence", r.violence),
        ("intelligence", r.intelligence),
    ] {
        if !(SCALE_MIN..=SCALE_MAX).contains(&v) {
            return Err(format!("{name} = {v} is outside [1, 8]"));
        }
    }
    Ok(())
}

/// Warmth is the mean of friendliness, helpfulness and (reverse-coded)
/// violence; competence is intelligence. Out-of-range rows are rejected.
pub fn explicit_composites(
    rows: &[SurveyRow],
    options: CompositeOptions,
) -> (Vec<ExplicitComposite>, Vec<RowRejection>) {
    let mut out = Vec::with_capacity(rows.len());
    let mut rejected = Vec::new();
    for (index, r) in rows.iter().enumerate() {
        if let Err(reason) = check_row(r) {
            rejected.push(RowRejection {
                index,
                participant_id: r.participant_id.clone(),
                group_id: r.group_id.clone(),
                reason,
            });
            continue;
        }
        let w = options.warmth_items(r);
        out.push(ExplicitComposite {
            participant_id: r.participant_id.clone(),
            group_id: r.group_id.clone(),
            warmth: (w[0] + w[1] + w[2]) / 3.0,
            competence: r.intelligence,
        });
    }
    (out, rejected)
}

/// Cronbach's α of the three warmth items within each group, over valid rows.
/// Groups where α is undefined are omitted.
pub fn warmth_alpha_by_group(
    rows: &[SurveyRow],
    options: CompositeOptions,
) -> IndexMap<String, f64> {
    let mut by_group: IndexMap<&str, Vec<Vec<f64>>> = IndexMap::new();
    for r in rows.iter().filter(|r| check_row(r).is_ok()) {
        by_group
            .entry(&r.group_id)
            .or_default()
            .push(options.warmth_items(r).to_vec());
    }
    by_group
        .into_iter()
        .filter_map(|(g, table)| cronbach_alpha(&table).ok().map(|a| (g.to_owned(), a)))
        .collect()
}

pub fn load_survey(path: impl AsRef<Path>) -> Result<Vec<SurveyRow>> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize::<SurveyRow>().enumerate() {
        rows.push(rec.map_err(|e| Error::parse(path, i as u64 + 2, e.to_string()))?);
    }
    Ok(rows)
}

pub fn survey_to_csv(rows: &[SurveyRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(f: f64, h: f64, v: f64, i: f64) -> SurveyRow {
        SurveyRow {
            participant_id: "p".into(),
            group_id: "g".into(),
            friendliness: f,
            helpfulness: h,
            violence: v,
            intelligence: i,
        }
    }

    fn one(r: SurveyRow) -> ExplicitComposite {
        let (mut c, rej) = explicit_composites(&[r], CompositeOptions::default());
        assert!(rej.is_empty());
        c.pop().unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(one(row(8.0, 8.0, 1.0, 3.0)).warmth, 8.0);
        let c = one(row(4.5, 4.5, 4.5, 4.5));
        assert_eq!((c.warmth, c.competence), (4.5, 4.5));
        assert_eq!(one(row(1.0, 7.0, 2.0, 6.0)).competence, 6.0);
    }

    #[test]
    fn without_reverse_coding() {
        let opts = CompositeOptions {
            reverse_code_violence: false,
        };
        let (c, _) = explicit_composites(&[row(8.0, 8.0, 2.0, 3.0)], opts);
        assert_eq!(c[0].warmth, 6.0);
    }

    #[test]
    fn out_of_range_rejected() {
        let (c, rej) = explicit_composites(
            &[
                row(0.0, 4.0, 4.0, 4.0),
                row(4.0, 4.0, 4.0, 4.0),
                row(4.0, 4.0, 4.0, 9.0),
            ],
            CompositeOptions::default(),
        );
        assert_eq!(c.len(), 1);
        assert_eq!(rej.iter().map(|r| r.index).collect::<Vec<_>>(), vec![0, 2]);
        assert!(rej[0].reason.contains("friendliness"));
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![row(1.0, 2.0, 3.0, 4.0), row(8.0, 7.5, 6.0, 5.0)];
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("survey.csv");
        std::fs::write(&p, survey_to_csv(&rows)).unwrap();
        assert_eq!(load_survey(&p).unwrap(), rows);
    }

    #[test]
    fn alpha_of_consistent_items_is_high() {
        let rows: Vec<SurveyRow> = (1..=8)
            .map(|k| {
                let k = k as f64;
                row(k, k, SCALE_MIN + SCALE_MAX - k, 4.0)
            })
            .collect();
        let a = warmth_alpha_by_group(&rows, CompositeOptions::default());
        assert!((a["g"] - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn warmth_symmetry_and_violence_monotone(
            f in 1.0f64..=8.0, h in 1.0f64..=8.0, v in 1.0f64..7.9, dv in 0.01f64..0.1, i in 1.0f64..=8.0,
        ) {
            let a = one(row(f, h, v, i)).warmth;
            let b = one(row(h, f, v, i)).warmth;
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!(one(row(f, h, v + dv, i)).warmth < a);
            prop_assert!((SCALE_MIN..=SCALE_MAX).contains(&a));
        }
    }
}
