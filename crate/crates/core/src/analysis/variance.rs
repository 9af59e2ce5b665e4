use std::collections::BTreeSet;

use crate::id::Identifier;
use crate::model::{Model, ResourceClass};
use crate::schema::Issue;

/// Resources to hide for a clade.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Visibility {
    pub hidden: BTreeSet<Identifier>,
}

impl Visibility {
    pub fn is_visible(&self, id: &Identifier) -> bool {
        !self.hidden.contains(id)
    }

    /// Sets `isVisible = false` on every hidden resource.
    pub fn apply(&self, model: &mut Model) {
        model.for_each_mut(|r| {
            if self.hidden.contains(&r.id) {
                r.set("isVisible", false);
            }
        });
    }
}

/// Hides every resource whose presence list excludes `clade`.
///
/// Closure: a hidden node hides the links attached to it, and a hidden link
/// hides the lyph it conveys. A model without variance data is shown
/// unchanged whatever the clade.
pub fn filter_by_clade(model: &Model, clade: &str) -> Result<Visibility, Issue> {
    let Some(variance) = &model.variance else {
        return Ok(Visibility::default());
    };
    if !variance.clades.iter().any(|c| c == clade) {
        return Err(Issue::error(
            "unknown-clade",
            format!(
                "clade {clade:?} is not one of {}",
                variance.clades.join(", ")
            ),
        ));
    }
    let mut hidden: BTreeSet<Identifier> = variance
        .presence
        .iter()
        .filter(|(_, clades)| !clades.contains(clade))
        .filter_map(|(id, _)| model.get(id).map(|r| r.id.clone()))
        .collect();
    let key = |id: &Identifier| model.get(id).map(|r| r.id.clone());
    for l in model.of_class(ResourceClass::Link) {
        let end_hidden = ["source", "target"]
            .iter()
            .filter_map(|e| l.reference(e).and_then(key))
            .any(|n| hidden.contains(&n));
        if end_hidden {
            hidden.insert(l.id.clone());
        }
        if hidden.contains(&l.id) {
            if let Some(lyph) = l.reference("conveyingLyph").and_then(key) {
                hidden.insert(lyph);
            }
        }
    }
    Ok(Visibility { hidden })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Resource, VarianceSpec};

    fn id(s: &str) -> Identifier {
        Identifier::parse(s).unwrap()
    }

    fn model() -> Model {
        let mut m = Model::new();
        m.push(Resource::new(ResourceClass::Node, id("a")));
        m.push(Resource::new(ResourceClass::Node, id("b")));
        m.push(
            Resource::new(ResourceClass::Link, id("l"))
                .with("source", id("a"))
                .with("target", id("b"))
                .with("conveyingLyph", id("L")),
        );
        m.push(Resource::new(ResourceClass::Lyph, id("L")));
        let mut v = VarianceSpec {
            clades: vec!["human".into(), "rat".into()],
            ..Default::default()
        };
        v.presence.insert(id("b"), ["rat".to_string()].into());
        m.variance = Some(v);
        m
    }

    #[test]
    fn rat_only_hidden_for_human_with_closure() {
        let v = filter_by_clade(&model(), "human").unwrap();
        assert_eq!(v.hidden, [id("b"), id("l"), id("L")].into());
        assert!(filter_by_clade(&model(), "rat").unwrap().hidden.is_empty());
    }

    #[test]
    fn no_variance_is_identity() {
        let mut m = model();
        m.variance = None;
        assert!(filter_by_clade(&m, "human").unwrap().hidden.is_empty());
    }

    #[test]
    fn unknown_clade() {
        assert_eq!(
            filter_by_clade(&model(), "fish").unwrap_err().code,
            "unknown-clade"
        );
    }
}
