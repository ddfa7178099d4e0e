//! Report records and their table / JSON / CSV renderings.

use std::collections::BTreeMap;

use clap::ValueEnum;
use nradix::bounds::{BoundParams, BoundResult};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// One evaluated bound.
#[derive(Clone, Debug, Serialize)]
pub struct ReportRecord {
    pub id: String,
    pub params: BTreeMap<String, f64>,
    pub value: f64,
    pub w: f64,
    pub slack: f64,
    /// Present only with `--timing`, so default reports are byte-stable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

pub fn param_map(p: &BoundParams) -> BTreeMap<String, f64> {
    [
        ("t", p.t),
        ("alpha", p.alpha),
        ("p", p.p),
        ("r", p.r),
        ("fg_alpha", p.fg_alpha),
    ]
    .into_iter()
    .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
    .collect()
}

impl ReportRecord {
    pub fn from_result(r: &BoundResult, elapsed_ms: Option<f64>) -> Self {
        ReportRecord {
            id: r.id.name(),
            params: param_map(&r.params),
            value: r.value,
            w: r.w_ref,
            slack: r.slack,
            elapsed_ms,
        }
    }

    pub fn params_label(&self) -> String {
        if self.params.is_empty() {
            return "-".to_string();
        }
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    id: &'a str,
    param_t: Option<f64>,
    param_alpha: Option<f64>,
    param_r: Option<f64>,
    value: Option<f64>,
    w: Option<f64>,
    slack: Option<f64>,
}

/// `(id, params, value, w, slack)`
pub type CsvCells<'a> = (
    &'a str,
    &'a BTreeMap<String, f64>,
    Option<f64>,
    Option<f64>,
    Option<f64>,
);

/// CSV with the fixed column set `id,param_t,param_alpha,param_r,value,w,slack`.
/// Missing cells stay empty.
pub fn csv_rows<'a, I>(rows: I) -> String
where
    I: IntoIterator<Item = CsvCells<'a>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut wrote = false;
    for (id, params, value, wv, slack) in rows {
        w.serialize(CsvRow {
            id,
            param_t: params.get("t").copied(),
            param_alpha: params.get("alpha").copied(),
            param_r: params.get("r").copied(),
            value,
            w: wv,
            slack,
        })
        .expect("in-memory CSV write");
        wrote = true;
    }
    if !wrote {
        w.write_record([
            "id",
            "param_t",
            "param_alpha",
            "param_r",
            "value",
            "w",
            "slack",
        ])
        .expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

pub fn records_csv(records: &[ReportRecord]) -> String {
    csv_rows(records.iter().map(|r| {
        (
            r.id.as_str(),
            &r.params,
            Some(r.value),
            Some(r.w),
            Some(r.slack),
        )
    }))
}

/// Plain aligned table: numeric cells right-aligned, text left-aligned.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let numeric: Vec<bool> = (0..headers.len())
        .map(|k| {
            !rows.is_empty()
                && rows
                    .iter()
                    .all(|r| r.get(k).is_some_and(|c| c.parse::<f64>().is_ok()))
        })
        .collect();
    let line = |cells: Vec<&str>| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .zip(&numeric)
            .map(|((c, &w), &right)| {
                if right {
                    format!("{c:>w$}")
                } else {
                    format!("{c:<w$}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(headers.to_vec());
    out.push('\n');
    out.push_str(&line(
        widths
            .iter()
            .map(|&w| "-".repeat(w))
            .collect::<Vec<_>>()
            .iter()
            .map(String::as_str)
            .collect(),
    ));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

pub fn num(x: f64) -> String {
    format!("{x:.12}")
}

pub fn records_table(records: &[ReportRecord]) -> String {
    let timing = records.iter().any(|r| r.elapsed_ms.is_some());
    let mut headers = vec!["id", "params", "value", "w", "slack"];
    if timing {
        headers.push("ms");
    }
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row = vec![
                r.id.clone(),
                r.params_label(),
                num(r.value),
                num(r.w),
                format!("{:.3e}", r.slack),
            ];
            if let Some(ms) = r.elapsed_ms {
                row.push(format!("{ms:.3}"));
            }
            row
        })
        .collect();
    table(&headers, &rows)
}
