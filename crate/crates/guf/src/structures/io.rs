//! JSON serialization for structures.
//!
//! Format: `{"domain": ["a","b"], "relations": {"R": [["a","b"]], "P": [["a"]]}}`.
//! An optional `"arities"` map declares relations whose interpretation is
//! empty (the arity of a nonempty relation is inferred from its tuples).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Elem, Structure, StructureError};
use crate::syntax::Vocabulary;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureFile {
    pub domain: Vec<String>,
    pub relations: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub arities: BTreeMap<String, usize>,
}

impl StructureFile {
    pub fn from_structure(s: &Structure) -> Self {
        let mut relations = BTreeMap::new();
        let mut arities = BTreeMap::new();
        for sym in s.vocabulary().symbols() {
            let tuples: Vec<Vec<String>> = s
                .tuples(&sym.name)
                .map(|t| t.iter().map(|e| e.id().to_string()).collect())
                .collect();
            if tuples.is_empty() {
                arities.insert(sym.name.clone(), sym.arity);
            }
            relations.insert(sym.name, tuples);
        }
        StructureFile {
            domain: s.domain().map(|e| e.id().to_string()).collect(),
            relations,
            arities,
        }
    }

    pub fn into_structure(self) -> Result<Structure, StructureError> {
        let mut vocab = Vocabulary::new();
        for (name, arity) in &self.arities {
            vocab.insert(name, *arity)?;
        }
        for (name, tuples) in &self.relations {
            match tuples.first() {
                Some(t) => vocab.insert(name, t.len())?,
                None => {
                    if !self.arities.contains_key(name) {
                        return Err(StructureError::UnknownArity(name.clone()));
                    }
                }
            }
        }
        let mut s = Structure::new(
            vocab,
            self.domain.iter().map(Elem::new),
        )?;
        for (name, tuples) in &self.relations {
            for t in tuples {
                s.add_tuple(name, t.iter().map(Elem::new).collect())?;
            }
        }
        Ok(s)
    }
}

impl Structure {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&StructureFile::from_structure(self))
            .expect("structure files serialize")
    }

    pub fn from_json(text: &str) -> Result<Structure, String> {
        let file: StructureFile =
            serde_json::from_str(text).map_err(|e| format!("invalid structure file: {e}"))?;
        file.into_structure().map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_json() {
        let text = r#"{"domain": ["a","b"], "relations": {"R": [["a","b"]], "P": [["a"]]}}"#;
        let s = Structure::from_json(text).unwrap();
        assert_eq!(s.size(), 2);
        assert_eq!(s.vocabulary().arity("R"), Some(2));
        let back = Structure::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn arity_mismatch_is_a_load_error() {
        let text = r#"{"domain": ["a"], "relations": {"R": [["a"],["a","a"]]}}"#;
        assert!(Structure::from_json(text).is_err());
    }

    #[test]
    fn unknown_element_is_a_load_error() {
        let text = r#"{"domain": ["a"], "relations": {"R": [["a","b"]]}}"#;
        assert!(Structure::from_json(text).is_err());
    }

    #[test]
    fn empty_relation_needs_declared_arity() {
        let no_arity = r#"{"domain": ["a"], "relations": {"R": []}}"#;
        assert!(Structure::from_json(no_arity).is_err());
        let with_arity =
            r#"{"domain": ["a"], "relations": {"R": []}, "arities": {"R": 2}}"#;
        let s = Structure::from_json(with_arity).unwrap();
        assert_eq!(s.vocabulary().arity("R"), Some(2));
    }
}
