//! Namespaced resource identifiers and ontology CURIEs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Why a token could not be parsed as an [`Identifier`] or [`Curie`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid identifier {input:?} at position {position}: {reason}")]
pub struct IdError {
    pub input: String,
    pub position: usize,
    pub reason: &'static str,
}

fn err(input: &str, position: usize, reason: &'static str) -> IdError {
    IdError {
        input: input.to_string(),
        position,
        reason,
    }
}

/// A namespace name: `[A-Za-z0-9_-]+`.
pub fn is_valid_namespace(ns: &str) -> bool {
    !ns.is_empty()
        && ns
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

/// Resource identifier, optionally qualified with a namespace prefix.
///
/// Rendered as `prefix:local` or just `local`. An absent prefix means the
/// identifier lives in the namespace of the model that declares it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identifier {
    prefix: Option<String>,
    local: String,
}

impl Identifier {
    /// Builds a local identifier. Panics on an invalid token; use `parse` for
    /// untrusted input.
    pub fn local(local: impl Into<String>) -> Self {
        let local = local.into();
        check_local(&local, 0).expect("invalid local identifier");
        Identifier {
            prefix: None,
            local,
        }
    }

    pub fn new(prefix: Option<&str>, local: &str) -> Result<Self, IdError> {
        if let Some(p) = prefix {
            if !is_valid_namespace(p) {
                return Err(err(p, 0, "namespace must match [A-Za-z0-9_-]+"));
            }
        }
        check_local(local, prefix.map_or(0, |p| p.len() + 1))?;
        Ok(Identifier {
            prefix: prefix.map(str::to_string),
            local: local.to_string(),
        })
    }

    pub fn parse(s: &str) -> Result<Self, IdError> {
        if s.is_empty() {
            return Err(err(s, 0, "empty identifier"));
        }
        match s.find(':') {
            None => {
                check_local(s, 0)?;
                Ok(Identifier {
                    prefix: None,
                    local: s.to_string(),
                })
            }
            Some(pos) => {
                let (prefix, rest) = (&s[..pos], &s[pos + 1..]);
                if !is_valid_namespace(prefix) {
                    return Err(err(s, 0, "namespace must match [A-Za-z0-9_-]+"));
                }
                check_local(rest, pos + 1).map_err(|e| IdError {
                    input: s.to_string(),
                    ..e
                })?;
                Ok(Identifier {
                    prefix: Some(prefix.to_string()),
                    local: rest.to_string(),
                })
            }
        }
    }

    pub fn prefix(&self) -> Option<&str> {
        self.prefix.as_deref()
    }

    pub fn local_part(&self) -> &str {
        &self.local
    }

    pub fn is_foreign(&self) -> bool {
        self.prefix.is_some()
    }

    /// Same local part, qualified with `ns` (replacing any prefix).
    pub fn with_prefix(&self, ns: &str) -> Identifier {
        Identifier {
            prefix: Some(ns.to_string()),
            local: self.local.clone(),
        }
    }

    pub fn without_prefix(&self) -> Identifier {
        Identifier {
            prefix: None,
            local: self.local.clone(),
        }
    }

    /// Appends `suffix` to the local part, keeping the prefix.
    pub fn suffixed(&self, suffix: &str) -> Result<Identifier, IdError> {
        Identifier::new(self.prefix(), &format!("{}{}", self.local, suffix))
    }

    /// Local part with the prefix folded in, usable as a fragment of a fresh id.
    pub fn flat(&self) -> String {
        match &self.prefix {
            Some(p) => format!("{p}_{}", self.local),
            None => self.local.clone(),
        }
    }
}

fn check_local(local: &str, offset: usize) -> Result<(), IdError> {
    if local.is_empty() {
        return Err(err(local, offset, "empty local part"));
    }
    for (i, c) in local.char_indices() {
        if c.is_whitespace() {
            return Err(err(local, offset + i, "whitespace in identifier"));
        }
        if c == ':' {
            return Err(err(local, offset + i, "more than one ':' separator"));
        }
    }
    Ok(())
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.prefix {
            Some(p) => write!(f, "{p}:{}", self.local),
            None => f.write_str(&self.local),
        }
    }
}

impl fmt::Debug for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Identifier({self})")
    }
}

impl FromStr for Identifier {
    type Err = IdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Identifier::parse(s)
    }
}

impl Serialize for Identifier {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Identifier {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Identifier::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// An external vocabulary term reference, `source:identifier`
/// (for example `UBERON:0001255`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Curie {
    source: String,
    reference: String,
}

impl Curie {
    pub fn parse(s: &str) -> Result<Self, IdError> {
        let Some(pos) = s.find(':') else {
            return Err(err(s, s.len(), "missing ':' in CURIE"));
        };
        let (source, reference) = (&s[..pos], &s[pos + 1..]);
        let mut chars = source.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return Err(err(s, 0, "CURIE source must start with a letter")),
        }
        if !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')) {
            return Err(err(s, 0, "CURIE source must match [A-Za-z][A-Za-z0-9_.-]*"));
        }
        if reference.is_empty() {
            return Err(err(s, pos + 1, "empty CURIE reference"));
        }
        if let Some(i) = reference.find(char::is_whitespace) {
            return Err(err(s, pos + 1 + i, "whitespace in CURIE"));
        }
        Ok(Curie {
            source: source.to_string(),
            reference: reference.to_string(),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn reference(&self) -> &str {
        &self.reference
    }
}

impl fmt::Display for Curie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.source, self.reference)
    }
}

impl fmt::Debug for Curie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Curie({self})")
    }
}

impl FromStr for Curie {
    type Err = IdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Curie::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn renders_prefixed_and_local() {
        assert_eq!(
            Identifier::parse("wbkg:K_77").unwrap().to_string(),
            "wbkg:K_77"
        );
        let id = Identifier::parse("lt-soma").unwrap();
        assert_eq!(id.prefix(), None);
        assert_eq!(id.to_string(), "lt-soma");
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(Identifier::parse("a b").unwrap_err().position, 1);
        assert_eq!(Identifier::parse("a:b:c").unwrap_err().position, 3);
        assert!(Identifier::parse("a:").is_err());
        assert!(Identifier::parse(":x").is_err());
        assert!(Identifier::parse("bad ns:x").is_err());
        assert!(Identifier::parse("").is_err());
    }

    #[test]
    fn curie_pattern() {
        let c = Curie::parse("UBERON:0001255").unwrap();
        assert_eq!(c.source(), "UBERON");
        assert_eq!(c.reference(), "0001255");
        assert!(Curie::parse("noseparator").is_err());
        assert!(Curie::parse("1abc:x").is_err());
        assert!(Curie::parse("FMA:").is_err());
        assert!(Curie::parse("ILX:has space").is_err());
    }

    proptest! {
        #[test]
        fn identifier_round_trip(prefix in proptest::option::of("[A-Za-z0-9_-]{1,8}"),
                                 local in "[A-Za-z0-9_.#/-][A-Za-z0-9_.#/-]{0,12}") {
            let id = Identifier::new(prefix.as_deref(), &local).unwrap();
            prop_assert_eq!(Identifier::parse(&id.to_string()).unwrap(), id);
        }
    }
}
