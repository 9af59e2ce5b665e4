use crate::id::{IdError, Identifier};
use crate::model::{Model, Resource, ResourceClass};

/// Outcome of looking up a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution<'a> {
    Found(&'a Resource),
    /// Dangling reference carrying a prefix of another namespace; only an
    /// import or link can satisfy it.
    UnresolvedForeign,
    /// Dangling reference in the model's own namespace; eligible for stub
    /// generation.
    UnresolvedLocal,
}

impl Resolution<'_> {
    pub fn is_found(&self) -> bool {
        matches!(self, Resolution::Found(_))
    }
}

/// Parses and resolves a raw reference token against `model`.
pub fn resolve<'a>(raw: &str, model: &'a Model) -> Result<Resolution<'a>, IdError> {
    let id = Identifier::parse(raw)?;
    Ok(resolve_as(&id, model, &ResourceClass::ALL))
}

/// Resolves a parsed identifier, accepting only resources of `classes`.
pub fn resolve_as<'a>(
    id: &Identifier,
    model: &'a Model,
    classes: &[ResourceClass],
) -> Resolution<'a> {
    if let Some(r) = model.get_as(id, classes) {
        return Resolution::Found(r);
    }
    let id = model.normalize(id);
    if id.is_foreign() {
        Resolution::UnresolvedForeign
    } else {
        Resolution::UnresolvedLocal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let mut m = Model::with_namespace("demo");
        m.push(Resource::new(
            ResourceClass::Lyph,
            Identifier::local("lt-soma"),
        ));
        match resolve("lt-soma", &m).unwrap() {
            Resolution::Found(r) => assert_eq!(r.id.to_string(), "lt-soma"),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            resolve("wbkg:K_77", &m).unwrap(),
            Resolution::UnresolvedForeign
        );
        assert_eq!(resolve("n-ghost", &m).unwrap(), Resolution::UnresolvedLocal);
        assert_eq!(
            resolve("demo:n-ghost", &m).unwrap(),
            Resolution::UnresolvedLocal
        );
        let e = resolve("bad id", &m).unwrap_err();
        assert_eq!(e.position, 3);
    }
}
