//! JSON problem files.
//!
//! ```json
//! {"type": "qubo", "Q": [[0, 1], [1, 0]], "c": [0, 0], "offset": 0,
//!  "labels": ["a", "b"], "penalties": [{"kind": "AT_MOST_ONE_PAIR", "indices": [0, 1], "p1": 2}]}
//! {"type": "pubo", "n": 3, "terms": [{"idx": [0, 1, 2], "coef": 1.5}], "offset": 0}
//! {"type": "maxcut", "vertices": 4, "edges": [[0, 1], [1, 2], [2, 3], [3, 0]]}
//! {"type": "knapsack", "values": [4, 4], "weights": [4, 3], "capacity": 5, "p1": 1, "p2": 1}
//! ```
//!
//! Penalties are applied in file order; slack variables are appended after
//! the problem variables. For `UNBALANCED_INEQUALITY`, omitted `p1`/`p2` take
//! the defaults in [`super::penalty::DEFAULT_UNBALANCED_P1`] and
//! [`super::penalty::DEFAULT_UNBALANCED_P2`]; every other kind requires `p1`.

use serde::{Deserialize, Serialize};

use super::penalty::{DEFAULT_UNBALANCED_P1, DEFAULT_UNBALANCED_P2};
use super::{build_knapsack, build_maxcut, ConstraintKind, ConstraintSpec, Penalized, Problem, PuboProblem, QuboProblem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyEntry {
    pub kind: ConstraintKind,
    pub indices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<f64>,
    #[serde(default)]
    pub bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p2: Option<f64>,
}

impl PenaltyEntry {
    pub fn to_spec(&self) -> Result<ConstraintSpec> {
        let unbalanced = self.kind == ConstraintKind::UnbalancedInequality;
        let p1 = match (self.p1, unbalanced) {
            (Some(p), _) => p,
            (None, true) => DEFAULT_UNBALANCED_P1,
            (None, false) => {
                return Err(Error::Parse(format!("penalty {:?} is missing p1", self.kind)));
            }
        };
        let p2 = match (self.p2, unbalanced) {
            (Some(p), _) => p,
            (None, true) => DEFAULT_UNBALANCED_P2,
            (None, false) => 0.0,
        };
        Ok(ConstraintSpec {
            kind: self.kind,
            indices: self.indices.clone(),
            weights: self.weights.clone(),
            bound: self.bound,
            p1,
            p2,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PuboTermEntry {
    pub idx: Vec<usize>,
    pub coef: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ProblemFile {
    Qubo {
        #[serde(rename = "Q")]
        q: Vec<Vec<f64>>,
        c: Vec<f64>,
        #[serde(default)]
        offset: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        penalties: Vec<PenaltyEntry>,
    },
    Pubo {
        n: usize,
        terms: Vec<PuboTermEntry>,
        #[serde(default)]
        offset: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        penalties: Vec<PenaltyEntry>,
    },
    Maxcut {
        vertices: usize,
        edges: Vec<[usize; 2]>,
    },
    Knapsack {
        values: Vec<f64>,
        weights: Vec<f64>,
        capacity: f64,
        p1: f64,
        p2: f64,
    },
}

impl ProblemFile {
    /// Parses JSON, reporting line and column on syntax or schema errors.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem file serializes")
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ProblemFile::Qubo { .. } => "qubo",
            ProblemFile::Pubo { .. } => "pubo",
            ProblemFile::Maxcut { .. } => "maxcut",
            ProblemFile::Knapsack { .. } => "knapsack",
        }
    }

    /// Replaces the weights of every unbalanced penalty (including the
    /// knapsack capacity penalty) where a value is given.
    pub fn override_unbalanced(&mut self, p1: Option<f64>, p2: Option<f64>) {
        match self {
            ProblemFile::Qubo { penalties, .. } | ProblemFile::Pubo { penalties, .. } => {
                for e in penalties
                    .iter_mut()
                    .filter(|e| e.kind == ConstraintKind::UnbalancedInequality)
                {
                    e.p1 = p1.or(e.p1);
                    e.p2 = p2.or(e.p2);
                }
            }
            ProblemFile::Knapsack { p1: a, p2: b, .. } => {
                *a = p1.unwrap_or(*a);
                *b = p2.unwrap_or(*b);
            }
            ProblemFile::Maxcut { .. } => {}
        }
    }

    pub fn build(&self) -> Result<Problem> {
        self.build_penalized().map(|p| p.problem)
    }

    /// Builds the problem and applies all penalties. `exact` is false when
    /// any penalty (or the knapsack capacity term) is inexact.
    pub fn build_penalized(&self) -> Result<Penalized<Problem>> {
        let (base, penalties, base_exact) = match self {
            ProblemFile::Qubo {
                q,
                c,
                offset,
                labels,
                penalties,
            } => {
                let mut p = QuboProblem::new(q, c)?.with_offset(*offset)?;
                if let Some(l) = labels {
                    p = p.with_labels(l.clone())?;
                }
                (Problem::Qubo(p), penalties.as_slice(), true)
            }
            ProblemFile::Pubo {
                n,
                terms,
                offset,
                penalties,
            } => {
                let p = PuboProblem::new(*n, terms.iter().map(|t| (t.idx.clone(), t.coef)))?
                    .with_offset(*offset)?;
                (Problem::Pubo(p), penalties.as_slice(), true)
            }
            ProblemFile::Maxcut { vertices, edges } => {
                let edges: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                (Problem::Qubo(build_maxcut(*vertices, &edges)?), &[][..], true)
            }
            ProblemFile::Knapsack {
                values,
                weights,
                capacity,
                p1,
                p2,
            } => (
                Problem::Qubo(build_knapsack(values, weights, *capacity, *p1, *p2)?),
                &[][..],
                false,
            ),
        };
        let start = base.num_vars();
        let mut out = Penalized {
            problem: base,
            exact: base_exact,
            slack_vars: start..start,
        };
        for entry in penalties {
            let applied = out.problem.apply_penalty(&entry.to_spec()?)?;
            out = Penalized {
                problem: applied.problem,
                exact: out.exact && applied.exact,
                slack_vars: start..applied.slack_vars.end,
            };
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BinaryObjective;

    #[test]
    fn parses_each_kind() {
        let maxcut = ProblemFile::from_json(r#"{"type":"maxcut","vertices":2,"edges":[[0,1]]}"#).unwrap();
        assert_eq!(maxcut.build().unwrap().cost_of_index(0b01), -1.0);

        let knap = ProblemFile::from_json(
            r#"{"type":"knapsack","values":[4],"weights":[4],"capacity":5,"p1":1,"p2":1}"#,
        )
        .unwrap();
        let built = knap.build_penalized().unwrap();
        assert!(!built.exact);
        assert_eq!(built.problem.cost_of_index(1), 16.0 - 40.0);

        let pubo = ProblemFile::from_json(
            r#"{"type":"pubo","n":3,"terms":[{"idx":[2,0,1],"coef":1.5}],"offset":1}"#,
        )
        .unwrap();
        assert_eq!(pubo.build().unwrap().cost_of_index(0b111), 2.5);
    }

    #[test]
    fn qubo_with_slack_penalty() {
        let f = ProblemFile::from_json(
            r#"{"type":"qubo","Q":[[0,0],[0,0]],"c":[-1,-1],
                "penalties":[{"kind":"SLACK_INEQUALITY","indices":[0,1],"weights":[1,1],"bound":1,"p1":3}]}"#,
        )
        .unwrap();
        let built = f.build_penalized().unwrap();
        assert!(built.exact);
        assert_eq!(built.slack_vars, 2..3);
        assert_eq!(built.problem.num_vars(), 3);
    }

    #[test]
    fn missing_p1_is_an_error() {
        let f = ProblemFile::from_json(
            r#"{"type":"qubo","Q":[[0,0],[0,0]],"c":[0,0],
                "penalties":[{"kind":"AT_MOST_ONE_PAIR","indices":[0,1]}]}"#,
        )
        .unwrap();
        assert!(matches!(f.build(), Err(Error::Parse(_))));
    }

    #[test]
    fn parse_error_has_position() {
        let err = ProblemFile::from_json("{\n  \"type\": \"maxcut\",\n  oops").unwrap_err();
        match err {
            Error::Parse(msg) => assert!(msg.starts_with("line 3, column"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let f = ProblemFile::Knapsack {
            values: vec![1.0],
            weights: vec![2.0],
            capacity: 3.0,
            p1: 1.0,
            p2: 0.5,
        };
        assert_eq!(ProblemFile::from_json(&f.to_json()).unwrap(), f);
    }
}
