use std::collections::BTreeMap;

use super::intra::IntraMode;
use crate::blocks::{make_scan, ScanKind, ScanOrder};
use crate::error::{Error, Result};
use crate::tvcore::CoeffMask;

const DEFAULT_TABLE: &str = include_str!("../../data/mode_masks.toml");

#[derive(serde::Serialize, serde::Deserialize)]
struct TableFile {
    entry: Vec<EntryFile>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct EntryFile {
    size: usize,
    mode: IntraMode,
    positions: String,
    scan: ScanKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeEntry {
    pub mask: CoeffMask,
    pub scan: ScanOrder,
}

/// Predicted-coefficient set, prediction order and scan for every
/// (block size, intra mode). Must be identical at encoder and decoder.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeMaskTable {
    entries: BTreeMap<(usize, IntraMode), ModeEntry>,
}

impl Default for ModeMaskTable {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_TABLE).expect("built-in mask table parses")
    }
}

impl ModeMaskTable {
    pub fn default_toml() -> &'static str {
        DEFAULT_TABLE
    }

    /// Parses a table; every (size, mode) pair for sizes 4 and 8 must appear once.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let file: TableFile = toml::from_str(s).map_err(|e| Error::invalid(format!("mask table: {e}")))?;
        let mut entries = BTreeMap::new();
        for e in file.entry {
            let mask = CoeffMask::parse(e.size, &e.positions)?;
            let scan = make_scan(e.scan, e.size)?;
            if entries.insert((e.size, e.mode), ModeEntry { mask, scan }).is_some() {
                return Err(Error::invalid(format!("mask table lists ({}, {:?}) twice", e.size, e.mode)));
            }
        }
        let table = Self { entries };
        for n in [4, 8] {
            for m in IntraMode::ALL {
                if !table.entries.contains_key(&(n, m)) {
                    return Err(Error::invalid(format!("mask table misses ({n}, {m:?})")));
                }
            }
        }
        Ok(table)
    }

    pub fn to_toml_string(&self) -> String {
        let file = TableFile {
            entry: self
                .entries
                .iter()
                .map(|(&(size, mode), e)| EntryFile { size, mode, positions: e.mask.to_list_string(), scan: e.scan.kind })
                .collect(),
        };
        toml::to_string(&file).expect("mask table serializes")
    }

    pub fn get(&self, n: usize, mode: IntraMode) -> &ModeEntry {
        &self.entries[&(n, mode)]
    }

    pub fn set(&mut self, n: usize, mode: IntraMode, mask: CoeffMask, scan: ScanKind) -> Result<()> {
        if mask.size() != n {
            return Err(Error::invalid("mask size does not match the table slot"));
        }
        self.entries.insert((n, mode), ModeEntry { mask, scan: make_scan(scan, n)? });
        Ok(())
    }
}
