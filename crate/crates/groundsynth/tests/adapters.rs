use std::io::Write;

use groundsynth::adapters::{adapt_file, AdaptError, DropReason, SourceName};
use groundsynth::core::geometry::center_point;
use groundsynth::core::sample::ScreenshotRecord;
use groundsynth::jsonl::read_all;
use proptest::prelude::*;
use serde_json::{json, Value};

fn write_lines(path: &std::path::Path, recs: &[Value]) {
    let mut f = std::fs::File::create(path).unwrap();
    for r in recs {
        writeln!(f, "{r}").unwrap();
    }
}

fn guiact_records() -> Vec<Value> {
    vec![
        json!({"uid": "g1", "image": "a.png", "bbox": [10, 10, 50, 30], "instruction": "open settings"}),
        json!({"uid": "g2", "image": "a.png", "bbox": [60, 10, 90, 30], "instruction": "search hotels", "action": "click search"}),
        json!({"uid": "g3", "image": "b.png", "bbox": [5, 5, 6, 6], "instruction": "open menu then pick export"}),
        json!({"uid": "g4", "image": "b.png", "bbox": [5, 5, 6, 6], "instruction": "tap ok", "multi_step": true}),
        json!({"uid": "g5", "image": "b.png", "instruction": "tap ok"}),
        json!({"uid": "g6", "image": "b.png", "bbox": [9, 9, 3, 3], "instruction": "tap ok"}),
        json!({"uid": "g7", "image": "c.png", "bbox": [0, 0, 10, 10]}),
        json!({"image": "c.png", "bbox": [0, 0, 10, 10], "instruction": "x"}),
    ]
}

#[test]
fn guiact_file_conserves_and_batches() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("in.jsonl"), dir.path().join("out.jsonl"));
    write_lines(&input, &guiact_records());
    let c = adapt_file(SourceName::Guiact, &SourceName::Guiact.default_profile(), &input, &output, 0).unwrap();
    assert!(c.is_conserved());
    assert_eq!(c.records_in, 8);
    assert_eq!(c.records_emitted, 2);
    assert_eq!(c.samples, 3);
    assert_eq!(c.dropped[&DropReason::MultiStep], 2);
    assert_eq!(c.dropped[&DropReason::MissingCoordinates], 1);
    assert_eq!(c.dropped[&DropReason::Unmappable], 2);
    assert_eq!(c.dropped[&DropReason::NoExpression], 1);

    let recs: Vec<ScreenshotRecord> = read_all(&output).unwrap();
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].snapshot_id, "guiact:a.png");
    let ids: Vec<_> = recs[0].samples.iter().map(|s| s.element_id.as_str()).collect();
    assert_eq!(ids, ["g1", "g2#0", "g2#1"]);
    assert!(recs[0].samples.iter().all(|s| s.is_closed()));
}

#[test]
fn point_sources_target_the_point() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("in.jsonl"), dir.path().join("out.jsonl"));
    write_lines(
        &input,
        &[
            json!({"step_id": 1, "screenshot": "s.png", "action": {"coordinates": [300, 512]}, "instruction": "open the app drawer"}),
            json!({"step_id": 2, "screenshot": "s.png", "action": {"coordinates": {"x": 7.9, "y": 3}}, "instruction": "go back"}),
            json!({"step_id": 3, "screenshot": "s.png", "action": {"coordinates": [1]}, "instruction": "go back"}),
        ],
    );
    let c = adapt_file(SourceName::Androidcontrol, &SourceName::Androidcontrol.default_profile(), &input, &output, 0).unwrap();
    assert!(c.is_conserved());
    let recs: Vec<ScreenshotRecord> = read_all(&output).unwrap();
    let targets: Vec<_> = recs[0].samples.iter().map(|s| (s.target.x, s.target.y)).collect();
    assert_eq!(targets, [(300, 512), (7, 3)]);
}

#[test]
fn mismatched_inputs_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("in.jsonl"), dir.path().join("out.jsonl"));
    write_lines(&input, &guiact_records());
    let e = adapt_file(SourceName::Aitz, &SourceName::Guiact.default_profile(), &input, &output, 0).unwrap_err();
    assert!(matches!(e, AdaptError::SourceMismatch { .. }));
    let e = adapt_file(SourceName::Aitz, &SourceName::Aitz.default_profile(), &input, &output, 0).unwrap_err();
    assert!(matches!(e, AdaptError::InputMismatch { .. }), "{e}");
}

#[test]
fn web_direct_respects_visibility() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("in.jsonl"), dir.path().join("out.jsonl"));
    write_lines(
        &input,
        &[
            json!({"id": "w1", "screenshot": "p.png", "bbox": {"x": 1, "y": 2, "w": 30, "h": 40}, "description": "blue cart icon", "visible": true}),
            json!({"id": "w2", "screenshot": "p.png", "bbox": [1, 2, 30, 40], "description": "hidden", "visible": false}),
        ],
    );
    let c = adapt_file(SourceName::WebDirect, &SourceName::WebDirect.default_profile(), &input, &output, 0).unwrap();
    assert_eq!((c.records_emitted, c.dropped[&DropReason::NotVisible]), (1, 1));
}

proptest! {
    #[test]
    fn widget_captions_are_conserved_and_closed(
        items in prop::collection::vec(
            (0u32..500, 0u32..500, 1u32..100, 1u32..100, prop::collection::vec("[a-z]{1,8}( [a-z]{1,8})?", 0..5), any::<bool>()),
            1..30,
        ),
        seed in any::<u64>(),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let (input, output) = (dir.path().join("in.jsonl"), dir.path().join("out.jsonl"));
        let recs: Vec<Value> = items
            .iter()
            .enumerate()
            .map(|(i, (x, y, w, h, caps, inverted))| {
                let bbox = if *inverted { json!([x + w, y, x, y + h]) } else { json!([x, y, x + w, y + h]) };
                json!({"id": format!("w{i}"), "screenshot": format!("s{}.png", i / 4), "bbox": bbox, "captions": caps})
            })
            .collect();
        write_lines(&input, &recs);
        let c = adapt_file(SourceName::WidgetCaption, &SourceName::WidgetCaption.default_profile(), &input, &output, seed).unwrap();
        prop_assert!(c.is_conserved());
        let out: Vec<ScreenshotRecord> = read_all(&output).unwrap();
        let n: usize = out.iter().map(|r| r.samples.len()).sum();
        prop_assert_eq!(n as u64, c.samples);
        for (item, r) in items.iter().zip(&recs) {
            let id = r["id"].as_str().unwrap();
            let got: Vec<_> = out.iter().flat_map(|o| &o.samples).filter(|s| s.element_id.split('#').next() == Some(id)).collect();
            let expected = if item.5 || item.4.is_empty() { 0 } else { item.4.len().min(2) };
            prop_assert_eq!(got.len(), expected);
            for s in got {
                prop_assert_eq!(s.target, center_point(&s.bbox));
                prop_assert!(item.4.contains(&s.re_text));
            }
        }
    }
}
