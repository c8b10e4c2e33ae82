// SPDX-License-Identifier: Apache-2.0
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_identifier, ParseError};
use crate::models::{KripkeModel, PropTeam, Relation};
use crate::syntax::{RelSymbol, Var};

/// Wire form of a propositional team.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamJson {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<u8>>,
}

/// Wire form of a Kripke model. `val` maps a variable to the worlds where it holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeJson {
    pub worlds: usize,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub val: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub relations: BTreeMap<String, Vec<Vec<u8>>>,
}

fn bit(v: u8) -> Result<bool, ParseError> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(ParseError::json(format!("non-Boolean value {other}"))),
    }
}

impl TeamJson {
    pub fn into_team(self) -> Result<PropTeam, ParseError> {
        let domain = self
            .vars
            .iter()
            .map(|v| check_identifier(v))
            .collect::<Result<Vec<Var>, _>>()?;
        let mut rows = Vec::with_capacity(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.len() != domain.len() {
                return Err(ParseError::json(format!(
                    "row {i} has {} values but there are {} variables",
                    r.len(),
                    domain.len()
                )));
            }
            rows.push(r.iter().map(|&b| bit(b)).collect::<Result<Vec<bool>, _>>()?);
        }
        PropTeam::new(domain, rows).map_err(|e| ParseError::json(e.to_string()))
    }
}

impl KripkeJson {
    pub fn into_model(self) -> Result<KripkeModel, ParseError> {
        let mut m = KripkeModel::new(self.worlds);
        for (a, b) in self.edges {
            m.add_edge(a, b)
                .map_err(|_| ParseError::json(format!("dangling edge endpoint in ({a},{b})")))?;
        }
        for (name, worlds) in self.val {
            let v = check_identifier(&name)?;
            m.set_true_at(v, worlds)
                .map_err(|e| ParseError::json(format!("valuation of `{name}`: {e}")))?;
        }
        for (name, tuples) in self.relations {
            let sym: RelSymbol = name
                .parse()
                .map_err(|_| ParseError::json(format!("bad relation symbol `{name}`")))?;
            let mut arity = None;
            let mut set = Vec::new();
            for t in tuples {
                if *arity.get_or_insert(t.len()) != t.len() {
                    return Err(ParseError::json(format!("relation {name} mixes arities")));
                }
                set.push(t.iter().map(|&b| bit(b)).collect::<Result<Vec<bool>, _>>()?);
            }
            m.set_relation(sym, Relation::new(arity.unwrap_or(0), set));
        }
        Ok(m)
    }
}

/// Parses team JSON `{"vars":[...],"rows":[[0,1],...]}`.
///
/// ```
/// let t = teamlogic::parser::parse_team(r#"{"vars":["p"],"rows":[[1],[1]]}"#).unwrap();
/// assert_eq!(t.len(), 1);
/// ```
pub fn parse_team(text: &str) -> Result<PropTeam, ParseError> {
    let raw: TeamJson = serde_json::from_str(text).map_err(|e| ParseError::json(e.to_string()))?;
    raw.into_team()
}

/// Parses Kripke JSON `{"worlds":N,"edges":[[i,j]],"val":{"p":[worlds]}}`.
pub fn parse_kripke(text: &str) -> Result<KripkeModel, ParseError> {
    let raw: KripkeJson = serde_json::from_str(text).map_err(|e| ParseError::json(e.to_string()))?;
    raw.into_model()
}

pub fn team_to_json(t: &PropTeam) -> TeamJson {
    TeamJson {
        vars: t.domain().iter().map(|v| v.name().to_string()).collect(),
        rows: t.rows().map(|r| r.iter().map(|&b| b as u8).collect()).collect(),
    }
}

pub fn kripke_to_json(m: &KripkeModel) -> KripkeJson {
    let val = m
        .vars()
        .map(|v| {
            let bits = m.valuation(v).expect("declared");
            let ws = (0..m.worlds()).filter(|&w| bits[w]).collect();
            (v.name().to_string(), ws)
        })
        .collect();
    let relations = m
        .relations()
        .iter()
        .map(|(s, r)| {
            let ts = r.tuples.iter().map(|t| t.iter().map(|&b| b as u8).collect()).collect();
            (s.to_string(), ts)
        })
        .collect();
    KripkeJson {
        worlds: m.worlds(),
        edges: m.edges().collect(),
        val,
        relations,
    }
}
