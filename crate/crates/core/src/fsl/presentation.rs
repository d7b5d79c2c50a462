//! Presentation files: blocks of six slots over a set of link components.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The shipped single-block test presentation.
pub const TETRA1: &str = include_str!("../../presentations/tetra1.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentFile {
    id: usize,
    p: i64,
    iota: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CopFile {
    #[serde(rename = "I")]
    i: Vec<usize>,
    #[serde(default)]
    q: BTreeMap<String, i64>,
    #[serde(default)]
    sigma: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresentationFile {
    name: String,
    c: usize,
    blocks: Vec<[usize; 6]>,
    components: Vec<ComponentFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cop: Option<CopFile>,
}

/// A fundamental shadow link: `c` blocks, each listing the (1-based)
/// component carried by its six edges, plus framings and mutation sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FslPresentation {
    pub name: String,
    pub blocks: Vec<[usize; 6]>,
    pub p: Vec<i64>,
    pub iota: Vec<i64>,
}

/// The change-of-pair data: the components in `I` (0-based, sorted), their
/// framings `q`, and the signature term σ.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChangeOfPairSpec {
    pub i_set: Vec<usize>,
    pub q: Vec<i64>,
    pub sigma: i64,
}

impl FslPresentation {
    pub fn new(name: &str, blocks: Vec<[usize; 6]>, p: Vec<i64>, iota: Vec<i64>) -> Result<Self> {
        let pres = FslPresentation { name: name.to_string(), blocks, p, iota };
        pres.validate()?;
        Ok(pres)
    }

    /// The built-in test presentation: one block with slots (1,2,3,1,2,3).
    pub fn tetra1() -> Self {
        Self::from_json(TETRA1).expect("bundled presentation parses").0
    }

    pub fn c(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::Presentation("no components".into()));
        }
        if self.blocks.is_empty() {
            return Err(Error::Presentation("no blocks".into()));
        }
        if self.iota.len() != n {
            return Err(Error::Presentation("framing and mutation lists differ in length".into()));
        }
        let mut seen = vec![false; n];
        for (s, b) in self.blocks.iter().enumerate() {
            for &id in b {
                if id == 0 || id > n {
                    return Err(Error::Presentation(format!("block {} names unknown component {id}", s + 1)));
                }
                seen[id - 1] = true;
            }
        }
        if let Some(i) = seen.iter().position(|x| !x) {
            return Err(Error::Presentation(format!("component {} appears in no slot", i + 1)));
        }
        Ok(())
    }

    /// Number of slots carrying component `k` (0-based).
    pub fn slot_count(&self, k: usize) -> usize {
        self.blocks.iter().flatten().filter(|&&id| id == k + 1).count()
    }

    /// Slots `(block, position)` carrying component `k` (0-based).
    pub fn slots_of(&self, k: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (s, b) in self.blocks.iter().enumerate() {
            for (j, &id) in b.iter().enumerate() {
                if id == k + 1 {
                    out.push((s, j));
                }
            }
        }
        out
    }

    /// Components whose slot count is odd; such slot patterns cannot come
    /// from doubling a gluing and are likely mistyped.
    pub fn lint(&self) -> Vec<String> {
        (0..self.n())
            .filter(|&k| self.slot_count(k) % 2 == 1)
            .map(|k| format!("component {} occupies an odd number of slots ({})", k + 1, self.slot_count(k)))
            .collect()
    }

    /// Parse a presentation file, returning any embedded change-of-pair data.
    pub fn from_json(text: &str) -> Result<(FslPresentation, Option<ChangeOfPairSpec>)> {
        let f: PresentationFile =
            serde_json::from_str(text).map_err(|e| Error::Presentation(e.to_string()))?;
        if f.c != f.blocks.len() {
            return Err(Error::Presentation(format!("c = {} but {} blocks listed", f.c, f.blocks.len())));
        }
        let n = f.components.len();
        let mut p = vec![0; n];
        let mut iota = vec![0; n];
        let mut seen = vec![false; n];
        for comp in &f.components {
            if comp.id == 0 || comp.id > n || seen[comp.id - 1] {
                return Err(Error::Presentation(format!("component ids must be 1..={n}, each once")));
            }
            seen[comp.id - 1] = true;
            p[comp.id - 1] = comp.p;
            iota[comp.id - 1] = comp.iota;
        }
        let pres = FslPresentation::new(&f.name, f.blocks, p, iota)?;
        let cop = match f.cop {
            None => None,
            Some(c) => {
                let mut q = BTreeMap::new();
                for (k, v) in c.q {
                    let id: usize = k
                        .parse()
                        .map_err(|_| Error::Presentation(format!("framing key {k:?} is not an id")))?;
                    q.insert(id, v);
                }
                Some(ChangeOfPairSpec::from_ids(&pres, &c.i, &q, c.sigma)?)
            }
        };
        Ok((pres, cop))
    }

    pub fn to_json(&self, cop: Option<&ChangeOfPairSpec>) -> String {
        let f = PresentationFile {
            name: self.name.clone(),
            c: self.c(),
            blocks: self.blocks.clone(),
            components: (0..self.n())
                .map(|k| ComponentFile { id: k + 1, p: self.p[k], iota: self.iota[k] })
                .collect(),
            cop: cop.map(|c| CopFile {
                i: c.i_set.iter().map(|k| k + 1).collect(),
                q: c.i_set.iter().zip(&c.q).map(|(k, q)| ((k + 1).to_string(), *q)).collect(),
                sigma: c.sigma,
            }),
        };
        serde_json::to_string_pretty(&f).expect("serializable")
    }
}

impl ChangeOfPairSpec {
    /// Build from 1-based ids; framings missing from `q` default to 0.
    pub fn from_ids(
        pres: &FslPresentation,
        ids: &[usize],
        q: &BTreeMap<usize, i64>,
        sigma: i64,
    ) -> Result<ChangeOfPairSpec> {
        let set: BTreeSet<usize> = ids.iter().copied().collect();
        if set.len() != ids.len() {
            return Err(Error::Presentation("repeated id in I".into()));
        }
        for &id in &set {
            if id == 0 || id > pres.n() {
                return Err(Error::Presentation(format!("I names unknown component {id}")));
            }
        }
        for id in q.keys() {
            if !set.contains(id) {
                return Err(Error::Presentation(format!("framing given for component {id} outside I")));
            }
        }
        Ok(ChangeOfPairSpec {
            i_set: set.iter().map(|id| id - 1).collect(),
            q: set.iter().map(|id| q.get(id).copied().unwrap_or(0)).collect(),
            sigma,
        })
    }

    /// Plain change of pair on `ids` with zero framings and σ = 0.
    pub fn plain(pres: &FslPresentation, ids: &[usize]) -> Result<ChangeOfPairSpec> {
        Self::from_ids(pres, ids, &BTreeMap::new(), 0)
    }

    /// Components outside I, sorted.
    pub fn j_set(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|k| !self.i_set.contains(k)).collect()
    }
}
