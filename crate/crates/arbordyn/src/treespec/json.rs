//! JSON wire formats for tree specs and eventually periodic sets.

use super::epseq::{EventuallyPeriodic, EventuallyPeriodicSet};
use super::spec::{AutomatonTree, ExplicitTree, ProfileTree, TreeSpec};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileJson {
    pub preperiod: Vec<u8>,
    pub period: Vec<u8>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub states: usize,
    pub root: usize,
    pub transitions: Vec<Vec<Option<usize>>>,
}

/// Top-level tree-spec document. Field order is fixed so canonical specs
/// serialize byte-stably.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeSpecJson {
    pub q: u8,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automaton: Option<AutomatonJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words: Option<Vec<String>>,
}

fn word_to_string(w: &[u8]) -> String {
    w.iter().map(|a| char::from(b'0' + a)).collect()
}

fn word_from_string(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as u8)
                .ok_or_else(|| Error::InvalidWord(format!("non-digit {c:?}")))
        })
        .collect()
}

impl TreeSpecJson {
    pub fn from_spec(spec: &TreeSpec) -> Self {
        match spec {
            TreeSpec::Profile(t) => Self {
                q: t.q(),
                kind: "profile".into(),
                profile: Some(ProfileJson {
                    preperiod: t.splitting().preperiod().to_vec(),
                    period: t.splitting().period().to_vec(),
                }),
                automaton: None,
                depth: None,
                words: None,
            },
            TreeSpec::Automaton(t) => Self {
                q: t.q(),
                kind: "automaton".into(),
                profile: None,
                automaton: Some(AutomatonJson {
                    states: t.num_states(),
                    root: t.root(),
                    transitions: (0..t.num_states())
                        .map(|s| (0..t.q()).map(|a| t.delta(s, a)).collect())
                        .collect(),
                }),
                depth: None,
                words: None,
            },
            TreeSpec::Explicit(t) => Self {
                q: t.q(),
                kind: "explicit".into(),
                profile: None,
                automaton: None,
                depth: Some(t.depth()),
                words: Some(t.words().map(word_to_string).collect()),
            },
        }
    }

    pub fn to_spec(&self) -> Result<TreeSpec> {
        match self.kind.as_str() {
            "profile" => {
                let p = self
                    .profile
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSpec("kind=profile without profile".into()))?;
                Ok(TreeSpec::Profile(ProfileTree::new(
                    self.q,
                    EventuallyPeriodic::new(p.preperiod.clone(), p.period.clone())?,
                )?))
            }
            "automaton" => {
                let a = self
                    .automaton
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSpec("kind=automaton without automaton".into()))?;
                Ok(TreeSpec::Automaton(AutomatonTree::new(
                    self.q,
                    a.states,
                    a.root,
                    a.transitions.clone(),
                )?))
            }
            "explicit" => {
                let depth = self
                    .depth
                    .ok_or_else(|| Error::InvalidSpec("kind=explicit without depth".into()))?;
                let words = self
                    .words
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSpec("kind=explicit without words".into()))?
                    .iter()
                    .map(|s| word_from_string(s))
                    .collect::<Result<Vec<_>>>()?;
                Ok(TreeSpec::Explicit(ExplicitTree::new(self.q, depth, words)?))
            }
            other => Err(Error::InvalidSpec(format!("unknown kind {other:?}"))),
        }
    }

    pub fn to_string_canonical(&self) -> String {
        serde_json::to_string(self).expect("tree-spec json serializes")
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Wire format for eventually periodic subsets of the naturals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetJson {
    pub preperiod: Vec<bool>,
    pub period: Vec<bool>,
}

impl SetJson {
    pub fn from_set(e: &EventuallyPeriodicSet) -> Self {
        Self {
            preperiod: e.inner().preperiod().to_vec(),
            period: e.inner().period().to_vec(),
        }
    }

    pub fn to_set(&self) -> Result<EventuallyPeriodicSet> {
        EventuallyPeriodicSet::new(self.preperiod.clone(), self.period.clone())
    }
}

/// Parses the CLI set shorthand: "N" (all naturals), "kN" (multiples of k),
/// or "kN\mN" (multiples of k that are not multiples of m).
pub fn parse_set_shorthand(s: &str) -> Result<EventuallyPeriodicSet> {
    fn parse_multiples(part: &str) -> Result<usize> {
        let part = part.trim();
        let Some(head) = part.strip_suffix('N') else {
            return Err(Error::InvalidParameter(format!(
                "expected a term like \"kN\", got {part:?}"
            )));
        };
        if head.is_empty() {
            return Ok(1);
        }
        head.parse::<usize>()
            .map_err(|_| Error::InvalidParameter(format!("bad multiplier in {part:?}")))
    }

    let s = s.trim();
    match s.split_once('\\') {
        None => EventuallyPeriodicSet::multiples(parse_multiples(s)?),
        Some((a, b)) => {
            EventuallyPeriodicSet::multiples_minus(parse_multiples(a)?, parse_multiples(b)?)
        }
    }
}
