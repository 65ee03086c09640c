//! Prediction/gold file scoring and report rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use groundsynth_core::eval::{aggregate_screenspot, ElemType, EvalRecord, Platform, ScreenSpotTable};
use groundsynth_core::geometry::{BBox, Point};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub point: Point,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gold {
    pub id: String,
    pub bbox: BBox,
    pub platform: Platform,
    pub elem_type: ElemType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub table: ScreenSpotTable,
    /// Gold items with no prediction; scored as incorrect.
    pub missing_predictions: Vec<String>,
    /// Predictions whose id is not in the gold file; ignored.
    pub unmatched_predictions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("duplicate {kind} id {id:?}")]
    Duplicate { kind: &'static str, id: String },
}

/// Joins predictions to gold items by id and scores each gold item.
pub fn evaluate(preds: &[Prediction], gold: &[Gold]) -> Result<(EvalReport, Vec<EvalRecord>), EvalError> {
    let mut by_id: BTreeMap<&str, Point> = BTreeMap::new();
    for p in preds {
        if by_id.insert(&p.id, p.point).is_some() {
            return Err(EvalError::Duplicate { kind: "prediction", id: p.id.clone() });
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut missing = Vec::new();
    let mut records = Vec::with_capacity(gold.len());
    for g in gold {
        if !seen.insert(g.id.as_str()) {
            return Err(EvalError::Duplicate { kind: "gold", id: g.id.clone() });
        }
        let rec = match by_id.get(g.id.as_str()) {
            Some(p) => EvalRecord::new(g.id.clone(), *p, g.bbox, g.platform, g.elem_type),
            None => {
                missing.push(g.id.clone());
                // Scored as a miss without inventing a point.
                let mut r = EvalRecord::new(g.id.clone(), Point::new(0, 0), g.bbox, g.platform, g.elem_type);
                r.correct = false;
                r
            }
        };
        records.push(rec);
    }
    let unmatched = by_id.keys().filter(|k| !seen.contains(*k)).count();
    let table = aggregate_screenspot(&records);
    Ok((EvalReport { table, missing_predictions: missing, unmatched_predictions: unmatched }, records))
}

fn fmt_acc(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |a| format!("{a:.1}"))
}

/// Aligned text rendering of the accuracy table.
pub fn render_table(t: &ScreenSpotTable) -> String {
    let mut rows: Vec<[String; 3]> = vec![["Platform".into(), ElemType::Text.to_string(), ElemType::IconWidget.to_string()]];
    for p in Platform::ALL {
        rows.push([
            p.to_string(),
            fmt_acc(t.cell(p, ElemType::Text).accuracy),
            fmt_acc(t.cell(p, ElemType::IconWidget).accuracy),
        ]);
    }
    let widths: Vec<usize> = (0..3).map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for (n, r) in rows.iter().enumerate() {
        let _ = writeln!(out, "{:<w0$}  {:>w1$}  {:>w2$}", r[0], r[1], r[2], w0 = widths[0], w1 = widths[1], w2 = widths[2]);
        if n == 0 {
            let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 4));
        }
    }
    let _ = writeln!(out, "Average (cell mean): {}", fmt_acc(t.average_unweighted));
    let _ = writeln!(out, "Average (weighted):  {}", fmt_acc(t.average_weighted));
    out
}
