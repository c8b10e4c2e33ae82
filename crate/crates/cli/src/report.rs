// SPDX-License-Identifier: Apache-2.0
use serde::Serialize;
use serde_json::{json, Value};
use teamlogic::deciders::{DecideStats, Verdict, Witness};
use teamlogic::parser::{kripke_to_json, render, team_to_json};

/// Machine-readable outcome of one command.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fragment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub counters: Counters,
    pub millis: u128,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Counters {
    pub tuples: u64,
    pub teams: u64,
    pub tableau_calls: u64,
    pub max_depth: usize,
}

impl From<DecideStats> for Counters {
    fn from(s: DecideStats) -> Self {
        Counters {
            tuples: s.tuples,
            teams: s.teams,
            tableau_calls: s.tableau_calls,
            max_depth: s.max_depth,
        }
    }
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport {
            command,
            fragment: None,
            verdict: None,
            exact: None,
            witness: None,
            seed: None,
            counters: Counters::default(),
            millis: 0,
        }
    }

    pub fn with_verdict(mut self, v: &Verdict) -> Self {
        self.verdict = Some(v.answer);
        self.exact = Some(v.exact);
        self.witness = v.witness.as_ref().map(witness_json);
        self.counters = v.stats.into();
        self
    }
}

pub fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::Kripke { model, team } => json!({
            "kind": "kripke",
            "model": kripke_to_json(model),
            "team": team.iter().collect::<Vec<_>>(),
        }),
        Witness::Team(x) => json!({ "kind": "team", "team": team_to_json(x) }),
        Witness::Witnesses(fs) => json!({
            "kind": "witnesses",
            "functions": fs
                .iter()
                .map(|f| json!({ "arity": f.arity(), "table": f.table().iter().map(|&b| b as u8).collect::<Vec<_>>() }))
                .collect::<Vec<_>>(),
        }),
        Witness::Resolution(f) => json!({ "kind": "resolution", "formula": render(f) }),
    }
}

/// One-line description of a witness for text output.
pub fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Kripke { model, team } => format!(
            "model with {} worlds, team {:?}: {}",
            model.worlds(),
            team.iter().collect::<Vec<_>>(),
            serde_json::to_string(&kripke_to_json(model)).expect("serializable")
        ),
        Witness::Team(x) => format!("team {}", serde_json::to_string(&team_to_json(x)).expect("serializable")),
        Witness::Witnesses(fs) => {
            let tables: Vec<String> = fs
                .iter()
                .map(|f| f.table().iter().map(|&b| if b { '1' } else { '0' }).collect())
                .collect();
            format!("witness functions [{}]", tables.join(", "))
        }
        Witness::Resolution(f) => format!("valid resolution {}", render(f)),
    }
}
