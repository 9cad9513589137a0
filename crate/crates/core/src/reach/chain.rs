use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::document::{self, vector_to_doc, ZonotopeDoc, F17};
use crate::error::Result;
use crate::setcalc::Zonotope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Initial,
    Anchor,
    Interpolated,
    Predicted,
    Fine,
    ModelBased,
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetKind::Initial => "initial",
            SetKind::Anchor => "anchor",
            SetKind::Interpolated => "interpolated",
            SetKind::Predicted => "predicted",
            SetKind::Fine => "fine",
            SetKind::ModelBased => "model_based",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainEntry {
    pub time: f64,
    pub kind: SetKind,
    pub set: Zonotope,
}

/// Time-ordered reachable sets with the number of matrix-zonotope
/// multiplications spent producing them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReachChain {
    pub entries: Vec<ChainEntry>,
    pub mult_count: usize,
}

impl ReachChain {
    pub fn new(initial: Zonotope) -> Self {
        Self {
            entries: vec![ChainEntry {
                time: 0.0,
                kind: SetKind::Initial,
                set: initial,
            }],
            mult_count: 0,
        }
    }

    pub fn push(&mut self, time: f64, kind: SetKind, set: Zonotope) {
        self.entries.push(ChainEntry { time, kind, set });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sets(&self) -> impl Iterator<Item = &Zonotope> {
        self.entries.iter().map(|e| &e.set)
    }

    pub fn times(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.time).collect()
    }

    pub fn set(&self, index: usize) -> &Zonotope {
        &self.entries[index].set
    }

    pub fn last(&self) -> &Zonotope {
        &self.entries.last().expect("chain is never empty").set
    }

    /// Mean interval-hull width over every dimension and every entry but the first.
    pub fn mean_width(&self) -> f64 {
        let rest = &self.entries[1.min(self.entries.len())..];
        if rest.is_empty() {
            return 0.0;
        }
        rest.iter().map(|e| e.set.interval_hull().mean_width()).sum::<f64>() / rest.len() as f64
    }

    pub fn to_document(&self) -> Result<String> {
        let records: Vec<EntryDoc> = self
            .entries
            .iter()
            .map(|e| {
                let hull = e.set.interval_hull();
                EntryDoc {
                    t: F17(e.time),
                    kind: e.kind,
                    set: ZonotopeDoc::from(&e.set),
                    hull_lower: vector_to_doc(hull.lower()),
                    hull_upper: vector_to_doc(hull.upper()),
                }
            })
            .collect();
        document::to_string(&ChainDoc {
            mult_count: self.mult_count,
            entries: records,
        })
    }

    pub fn from_document(text: &str) -> Result<ReachChain> {
        let doc: ChainDoc = document::from_str(text)?;
        let entries = doc
            .entries
            .iter()
            .map(|e| {
                Ok(ChainEntry {
                    time: e.t.0,
                    kind: e.kind,
                    set: Zonotope::try_from(&e.set)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ReachChain {
            entries,
            mult_count: doc.mult_count,
        })
    }

    /// Flat `t,dim,lower,upper` rows for plotting.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,dim,lower,upper")?;
        for e in &self.entries {
            let hull = e.set.interval_hull();
            for d in 0..hull.dim() {
                writeln!(
                    out,
                    "{:.6},{},{:.16e},{:.16e}",
                    e.time,
                    d,
                    hull.lower()[d],
                    hull.upper()[d]
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    t: F17,
    kind: SetKind,
    #[serde(flatten)]
    set: ZonotopeDoc,
    hull_lower: Vec<F17>,
    hull_upper: Vec<F17>,
}

#[derive(Serialize, Deserialize)]
struct ChainDoc {
    mult_count: usize,
    entries: Vec<EntryDoc>,
}
