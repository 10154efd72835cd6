use super::{LtsError, Model, PointedModel};
use crate::syntax::ActionAlphabet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// On-disk form of a model.
///
/// ```json
/// {
///   "alphabet": ["a", "b"],
///   "atoms": ["p"],
///   "states": ["s", "t"],
///   "transitions": [{"from": "s", "action": "a", "to": "t"}],
///   "valuation": {"p": ["t"]},
///   "root": "s"
/// }
/// ```
///
/// `atoms` and `root` are optional; atoms named in `valuation` are declared
/// implicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<String>,
    pub states: Vec<String>,
    #[serde(default)]
    pub transitions: Vec<TransitionRecord>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRecord {
    pub from: String,
    pub action: String,
    pub to: String,
}

impl ModelFile {
    pub fn to_model(&self) -> Result<Model, LtsError> {
        let alphabet = ActionAlphabet::new(self.alphabet.iter().cloned())
            .map_err(|e| LtsError::Format(e.to_string()))?;
        let mut m = Model::new(alphabet, self.states.iter().cloned())?;
        for t in &self.transitions {
            m.add_transition(&t.from, &t.action, &t.to)?;
        }
        for atom in &self.atoms {
            m.declare_atom(atom);
        }
        for (atom, states) in &self.valuation {
            m.set_atom(atom, states.iter().map(String::as_str))?;
        }
        Ok(m)
    }

    /// The model pointed at `state`, or at `root` when no state is given.
    pub fn to_pointed(&self, state: Option<&str>) -> Result<PointedModel, LtsError> {
        let point = state
            .or(self.root.as_deref())
            .ok_or_else(|| LtsError::Format("no state selected and no root given".into()))?;
        PointedModel::new(self.to_model()?, point)
    }

    pub fn from_model(m: &Model, root: Option<&str>) -> ModelFile {
        ModelFile {
            alphabet: m.alphabet().actions().to_vec(),
            atoms: m.atoms().map(str::to_string).collect(),
            states: m.states().map(str::to_string).collect(),
            transitions: m
                .transitions()
                .map(|(s, a, t)| TransitionRecord {
                    from: m.state_name(s).to_string(),
                    action: m.alphabet().actions()[a].clone(),
                    to: m.state_name(t).to_string(),
                })
                .collect(),
            valuation: m
                .valuation()
                .iter()
                .map(|(atom, set)| (atom.clone(), set.iter().map(|i| m.state_name(i).to_string()).collect()))
                .collect(),
            root: root.map(str::to_string),
        }
    }
}

impl Model {
    pub fn from_json(text: &str) -> Result<Model, LtsError> {
        parse_file(text)?.to_model()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from_model(self, None)).expect("model serialises")
    }
}

impl PointedModel {
    /// Reads a pointed model; `state` overrides the file's `root`.
    pub fn from_json(text: &str, state: Option<&str>) -> Result<PointedModel, LtsError> {
        parse_file(text)?.to_pointed(state)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile::from_model(&self.model, Some(self.point_name()));
        serde_json::to_string_pretty(&file).expect("model serialises")
    }
}

fn parse_file(text: &str) -> Result<ModelFile, LtsError> {
    serde_json::from_str(text).map_err(|e| LtsError::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "alphabet": ["a", "b"],
        "states": ["s", "t"],
        "transitions": [{"from": "s", "action": "a", "to": "t"}],
        "valuation": {"p": ["t"]},
        "root": "s"
    }"#;

    #[test]
    fn reads_and_writes_back() {
        let pm = PointedModel::from_json(SAMPLE, None).unwrap();
        assert_eq!(pm.point_name(), "s");
        assert_eq!(pm.model.transition_triples().len(), 1);
        let again = PointedModel::from_json(&pm.to_json(), None).unwrap();
        assert_eq!(again, pm);
        let at_t = PointedModel::from_json(SAMPLE, Some("t")).unwrap();
        assert_eq!(at_t.point_name(), "t");
    }

    #[test]
    fn bad_references_are_reported() {
        let bad = SAMPLE.replace(r#""to": "t""#, r#""to": "x""#);
        assert_eq!(
            Model::from_json(&bad).unwrap_err(),
            LtsError::UnknownState("x".into())
        );
        assert!(matches!(
            Model::from_json("{\"alphabet\": []}"),
            Err(LtsError::Format(_))
        ));
    }
}
