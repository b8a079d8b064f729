//! Choice logs, model files and the sushi-survey converter.
//!
//! A choice log is UTF-8 JSON lines. The first line is a header
//! `{"format":"rmj-choice-log","version":1,"n":N}`; every following line is
//! one record `{"display":[..],"response":[..]}` with 0-based item ids.
//! A model file is a single JSON document holding the universe size and a
//! list of `{weight, center, q}` components, centres in position→item order.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::choice::{ChoiceObservation, ChoiceRecord};
use crate::error::{Error, Result};
use crate::mixture::{Component, MixtureModel};
use crate::model::RmjModel;
use crate::ranking::{DisplaySet, Ranking, TopKList};

pub const CHOICE_LOG_FORMAT: &str = "rmj-choice-log";
pub const MODEL_FORMAT: &str = "rmj-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceLogHeader {
    pub format: String,
    pub version: u32,
    pub n: usize,
}

impl ChoiceLogHeader {
    pub fn new(n: usize) -> Self {
        Self {
            format: CHOICE_LOG_FORMAT.to_string(),
            version: FORMAT_VERSION,
            n,
        }
    }
}

/// A parsed choice log.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceLog {
    pub n: usize,
    pub observations: Vec<ChoiceObservation>,
}

fn format_err(line: usize, detail: impl std::fmt::Display) -> Error {
    Error::Format {
        line,
        detail: detail.to_string(),
    }
}

pub fn write_choice_log<W: Write>(mut out: W, n: usize, data: &[ChoiceObservation]) -> Result<()> {
    let header = serde_json::to_string(&ChoiceLogHeader::new(n)).expect("header serializes");
    writeln!(out, "{header}")?;
    for obs in data {
        if obs.n() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                actual: obs.n(),
            });
        }
        let line = serde_json::to_string(&ChoiceRecord::from(obs)).expect("record serializes");
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a choice log. Blank lines are skipped; errors carry 1-based line numbers.
pub fn read_choice_log<R: BufRead>(input: R) -> Result<ChoiceLog> {
    let mut header: Option<ChoiceLogHeader> = None;
    let mut observations = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match &header {
            None => {
                let h: ChoiceLogHeader =
                    serde_json::from_str(&line).map_err(|e| format_err(line_no, format!("bad header: {e}")))?;
                if h.format != CHOICE_LOG_FORMAT {
                    return Err(format_err(line_no, format!("unexpected format {:?}", h.format)));
                }
                if h.version != FORMAT_VERSION {
                    return Err(format_err(line_no, format!("unsupported version {}", h.version)));
                }
                header = Some(h);
            }
            Some(h) => {
                let record: ChoiceRecord =
                    serde_json::from_str(&line).map_err(|e| format_err(line_no, e))?;
                let obs = record.to_observation(h.n).map_err(|e| format_err(line_no, e))?;
                observations.push(obs);
            }
        }
    }
    let header = header.ok_or_else(|| format_err(1, "missing header"))?;
    Ok(ChoiceLog {
        n: header.n,
        observations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelComponent {
    pub weight: f64,
    pub center: Vec<usize>,
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub components: Vec<ModelComponent>,
}

impl ModelFile {
    pub fn from_mixture(mix: &MixtureModel) -> Self {
        Self {
            format: MODEL_FORMAT.to_string(),
            version: FORMAT_VERSION,
            n: mix.n(),
            components: mix
                .components()
                .iter()
                .map(|c| ModelComponent {
                    weight: c.weight,
                    center: c.model.center().order().to_vec(),
                    q: c.model.q(),
                })
                .collect(),
        }
    }

    pub fn from_model(model: &RmjModel) -> Self {
        Self::from_mixture(&MixtureModel::single(model.clone()))
    }

    /// Validates and converts to a mixture (a single component is a plain model).
    pub fn to_mixture(&self) -> Result<MixtureModel> {
        if self.format != MODEL_FORMAT {
            return Err(Error::InvalidMixture(format!("unexpected format {:?}", self.format)));
        }
        if self.version != FORMAT_VERSION {
            return Err(Error::InvalidMixture(format!("unsupported version {}", self.version)));
        }
        let components = self
            .components
            .iter()
            .map(|c| {
                let center = Ranking::new(c.center.clone())?;
                if center.n() != self.n {
                    return Err(Error::SizeMismatch {
                        expected: self.n,
                        actual: center.n(),
                    });
                }
                Ok(Component::new(c.weight, RmjModel::new(center, c.q)?))
            })
            .collect::<Result<Vec<_>>>()?;
        MixtureModel::new(components)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| format_err(e.line(), e))
    }
}

/// Converts sushi-survey ranking rows into choice observations.
///
/// The first non-blank line is `N 1` (universe size, one block). Each row is
/// `0 L i1 .. iL`: the listed items form the display set and the first `k`
/// of them the response.
pub fn convert_sushi<R: BufRead>(input: R, k: usize) -> Result<ChoiceLog> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let mut n: Option<usize> = None;
    let mut observations = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let fields: Vec<usize> = line
            .split_whitespace()
            .map(|f| f.parse::<usize>().map_err(|e| format_err(line_no, format!("{f:?}: {e}"))))
            .collect::<Result<_>>()?;
        if fields.is_empty() {
            continue;
        }
        let Some(n) = n else {
            n = Some(fields[0]);
            continue;
        };
        if fields.len() < 2 || fields.len() != fields[1] + 2 {
            return Err(format_err(line_no, "row length does not match its declared count"));
        }
        let items = &fields[2..];
        if k > items.len() {
            return Err(format_err(line_no, format!("k = {k} exceeds the {} ranked items", items.len())));
        }
        let display = DisplaySet::new(items.to_vec(), n).map_err(|e| format_err(line_no, e))?;
        let response = TopKList::new(items[..k].to_vec(), n).map_err(|e| format_err(line_no, e))?;
        observations.push(ChoiceObservation::new(display, response).map_err(|e| format_err(line_no, e))?);
    }
    let n = n.ok_or_else(|| format_err(1, "missing header"))?;
    Ok(ChoiceLog { n, observations })
}
