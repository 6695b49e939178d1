use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::fold;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundingBox {
    pub min_lat: f64,
    pub max_lat: f64,
    pub min_lon: f64,
    pub max_lon: f64,
}

impl BoundingBox {
    pub fn within(&self, outer: &BoundingBox) -> bool {
        outer.min_lat <= self.min_lat
            && self.max_lat <= outer.max_lat
            && outer.min_lon <= self.min_lon
            && self.max_lon <= outer.max_lon
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GazetteerEntry {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_m2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<BoundingBox>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
}

/// Offline place table with areas and a containment hierarchy.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
    by_id: HashMap<String, usize>,
    // folded name -> (is_alias, position) sorted so canonical names win
    by_name: HashMap<String, Vec<(bool, usize)>>,
}

impl Gazetteer {
    pub fn new(entries: Vec<GazetteerEntry>) -> Result<Self> {
        let mut by_id = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if by_id.insert(e.id.clone(), i).is_some() {
                return Err(Error::Gazetteer(format!("duplicate id '{}'", e.id)));
            }
            if let Some(area) = e.area_m2 {
                if !(area > 0.0) {
                    return Err(Error::Gazetteer(format!("'{}': area must be > 0", e.id)));
                }
            }
            if let Some(b) = e.bbox {
                if !(b.min_lat < b.max_lat && b.min_lon < b.max_lon) {
                    return Err(Error::Gazetteer(format!(
                        "'{}': bbox minimum must be below maximum on both axes",
                        e.id
                    )));
                }
            }
        }
        for e in &entries {
            if let Some(parent) = &e.parent_id {
                if !by_id.contains_key(parent) {
                    return Err(Error::Gazetteer(format!(
                        "'{}': unknown parent '{parent}'",
                        e.id
                    )));
                }
            }
        }
        let mut by_name: HashMap<String, Vec<(bool, usize)>> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            by_name.entry(fold(&e.name)).or_default().push((false, i));
            for alias in &e.aliases {
                by_name.entry(fold(alias)).or_default().push((true, i));
            }
        }
        for v in by_name.values_mut() {
            v.sort();
            v.dedup_by_key(|(_, i)| *i);
        }
        let gaz = Gazetteer {
            entries,
            by_id,
            by_name,
        };
        for e in &gaz.entries {
            // walking the chain detects cycles
            let mut seen = HashSet::new();
            let mut cur = Some(e);
            while let Some(node) = cur {
                if !seen.insert(node.id.as_str()) {
                    return Err(Error::Gazetteer(format!(
                        "parent chain of '{}' is cyclic",
                        e.id
                    )));
                }
                cur = node.parent_id.as_deref().and_then(|p| gaz.get(p));
            }
        }
        Ok(gaz)
    }

    pub fn parse(src: &str) -> Result<Self> {
        let entries: Vec<GazetteerEntry> =
            serde_json::from_str(src).map_err(|e| Error::from_json(&e))?;
        Self::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&src)
    }

    /// The gazetteer shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(include_str!("../../data/gazetteer.json"))
            .expect("shipped gazetteer is valid")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Option<&GazetteerEntry> {
        self.by_id.get(id).map(|&i| &self.entries[i])
    }

    /// Case- and diacritic-insensitive lookup on canonical names, then aliases.
    pub fn lookup(&self, name: &str) -> Option<&GazetteerEntry> {
        self.by_name
            .get(&fold(name))
            .and_then(|hits| hits.first())
            .map(|&(_, i)| &self.entries[i])
    }

    /// Strict ancestors of an entry, nearest first.
    pub fn ancestors<'a>(&'a self, entry: &'a GazetteerEntry) -> impl Iterator<Item = &'a GazetteerEntry> + 'a {
        let mut cur = entry.parent_id.as_deref().and_then(|p| self.get(p));
        std::iter::from_fn(move || {
            let node = cur?;
            cur = node.parent_id.as_deref().and_then(|p| self.get(p));
            Some(node)
        })
    }

    /// True iff `outer` strictly encloses `inner`: via the parent chain, or
    /// by strict bounding-box inclusion when both boxes are known.
    pub fn contains(&self, outer: &GazetteerEntry, inner: &GazetteerEntry) -> bool {
        if outer.id == inner.id {
            return false;
        }
        if self.ancestors(inner).any(|a| a.id == outer.id) {
            return true;
        }
        match (outer.bbox, inner.bbox) {
            (Some(o), Some(i)) => i.within(&o) && i != o,
            _ => false,
        }
    }
}
