mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{fixture, generate_fixture};
use lyphforge::document::{parse_model, read_model, serialize_generated, serialize_spec};
use lyphforge::editor::{EditLog, EditOp};
use lyphforge::exporter::{resource_map, to_json_ld, JsonLdContext, DEFAULT_BASE_IRI};
use lyphforge::generator::generate;
use lyphforge::layout::{layout, snapshot, LayoutConfig};
use lyphforge::model::sync_relations;
use lyphforge::{Identifier, Model};

fn chain_model(levels: &[u8], layers: u8) -> Model {
    let layer_ids: Vec<String> = (0..layers).map(|i| format!(r#""L{i}""#)).collect();
    let mut lyphs: Vec<String> = (0..layers)
        .map(|i| format!(r#"{{"id": "L{i}", "isTemplate": true}}"#))
        .collect();
    lyphs.push(format!(
        r#"{{"id": "t", "isTemplate": true, "layers": [{}]}}"#,
        layer_ids.join(", ")
    ));
    let chains: Vec<String> = levels
        .iter()
        .enumerate()
        .map(|(i, n)| format!(r#"{{"id": "c{i}", "numLevels": {n}, "lyphTemplate": "t"}}"#))
        .collect();
    parse_model(&format!(
        r#"{{"lyphs": [{}], "chains": [{}]}}"#,
        lyphs.join(", "),
        chains.join(", ")
    ))
    .unwrap()
}

fn edit_op() -> impl Strategy<Value = (u8, usize, u8)> {
    (0u8..4, any::<usize>(), any::<u8>())
}

fn make_op(model: &Model, (kind, pick, tag): (u8, usize, u8)) -> EditOp {
    let ids = model.ids();
    let target = ids[pick % ids.len()].to_string();
    match kind {
        0 => EditOp::Delete { target },
        1 => EditOp::Rename {
            target,
            to: format!("renamed{tag}"),
        },
        2 => EditOp::Annotate {
            target,
            add: vec![format!("UBERON:{tag:07}")],
            remove: Vec::new(),
        },
        _ => {
            let mut set = serde_json::Map::new();
            set.insert("name".into(), serde_json::json!(format!("label {tag}")));
            EditOp::Update {
                target,
                set,
                unset: Vec::new(),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identifiers_round_trip(prefix in proptest::option::of("[a-z][a-z0-9_-]{0,6}"), local in "[A-Za-z_][A-Za-z0-9_]{0,10}") {
        let text = match &prefix {
            Some(p) => format!("{p}:{local}"),
            None => local.clone(),
        };
        let id = Identifier::parse(&text).unwrap();
        prop_assert_eq!(id.to_string(), text);
        prop_assert_eq!(id.prefix(), prefix.as_deref());
    }

    #[test]
    fn generated_models_reload_unchanged(levels in proptest::collection::vec(1u8..6, 1..4), layers in 0u8..3) {
        let g = generate(&chain_model(&levels, layers)).unwrap();
        let text = serialize_generated(&g.model);
        let again = generate(&parse_model(&text).unwrap()).unwrap();
        prop_assert_eq!(serialize_generated(&again.model), text);
    }

    #[test]
    fn sync_is_idempotent_on_generated_models(levels in proptest::collection::vec(1u8..6, 1..4), layers in 0u8..3) {
        let g = generate(&chain_model(&levels, layers)).unwrap();
        let mut m = g.model.model().clone();
        let report = sync_relations(&mut m);
        prop_assert!(report.is_empty());
        prop_assert_eq!(&m, g.model.model());
    }

    #[test]
    fn resource_map_and_json_ld_cover_every_resource(levels in proptest::collection::vec(1u8..6, 1..4), layers in 0u8..3) {
        let g = generate(&chain_model(&levels, layers)).unwrap();
        let keys: BTreeSet<Identifier> = resource_map(&g.model).into_keys().collect();
        let ids: BTreeSet<Identifier> = g.model.model().ids().into_iter().collect();
        prop_assert_eq!(keys, ids);
        let doc = to_json_ld(&g.model, &JsonLdContext::for_model(DEFAULT_BASE_IRI, g.model.model())).unwrap();
        prop_assert_eq!(doc["@graph"].as_array().unwrap().len(), g.model.model().len());
    }

    #[test]
    fn undo_inverts_any_edit_sequence(ops in proptest::collection::vec(edit_op(), 1..8)) {
        let spec = read_model(&fixture("bladder.json")).unwrap();
        let original = serialize_spec(&spec);
        let mut m = spec.clone();
        let mut log = EditLog::new();
        for raw in ops {
            let op = make_op(&m, raw);
            // Rejected operations leave the model alone.
            let before = serialize_spec(&m);
            if log.apply(&mut m, op).is_err() {
                prop_assert_eq!(serialize_spec(&m), before);
            }
        }
        let edited = serialize_spec(&m);
        while log.undo(&mut m).is_some() {}
        prop_assert_eq!(serialize_spec(&m), original);
        while log.redo(&mut m).is_some() {}
        prop_assert_eq!(serialize_spec(&m), edited);
    }

    #[test]
    fn edit_log_survives_serialization(ops in proptest::collection::vec(edit_op(), 1..5)) {
        let spec = read_model(&fixture("ganglion.json")).unwrap();
        let mut m = spec.clone();
        let mut log = EditLog::new();
        for raw in ops {
            let op = make_op(&m, raw);
            let _ = log.apply(&mut m, op);
        }
        let mut restored = EditLog::from_json(&log.to_json()).unwrap();
        prop_assert_eq!(&restored, &log);
        while restored.undo(&mut m).is_some() {}
        prop_assert_eq!(serialize_spec(&m), serialize_spec(&spec));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn layout_depends_only_on_seed(seed in any::<u64>()) {
        let g = generate_fixture(&fixture("layout_rules.json")).unwrap();
        let cfg = LayoutConfig { seed, iterations: 60, ..LayoutConfig::default() };
        let a = layout(g.model.model(), &cfg);
        let b = layout(g.model.model(), &cfg);
        prop_assert_eq!(snapshot(&a.state), snapshot(&b.state));
        for p in a.state.positions.values() {
            prop_assert!(p.iter().all(|x| x.is_finite()));
        }
    }
}
