//! Key-export files: the credentials handed to a contact, one section per
//! entitled tier. Text header plus base64-packed label sets.

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;

use crate::crypto::KEY_LEN;
use crate::sd::{LabelEntry, UserKeyMaterial};
use crate::BcastError;

pub const FORMAT_HEADER: &str = "sani-keys v1";

/// A contact's exported credentials: key material per entitled tier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyExport {
    pub contact: String,
    pub levels: Vec<(usize, UserKeyMaterial)>,
}

const ENTRY_LEN: usize = 4 + 4 + KEY_LEN;

fn pack_entries(entries: &[LabelEntry]) -> Vec<u8> {
    let mut out = Vec::with_capacity(entries.len() * ENTRY_LEN);
    for e in entries {
        out.extend_from_slice(&e.subtree_root.to_le_bytes());
        out.extend_from_slice(&e.hang_node.to_le_bytes());
        out.extend_from_slice(&e.label);
    }
    out
}

fn unpack_entries(bytes: &[u8]) -> Result<Vec<LabelEntry>, BcastError> {
    if !bytes.len().is_multiple_of(ENTRY_LEN) {
        return Err(BcastError::KeyFile("label block has a partial entry".into()));
    }
    Ok(bytes
        .chunks_exact(ENTRY_LEN)
        .map(|c| LabelEntry {
            subtree_root: u32::from_le_bytes(c[0..4].try_into().unwrap()),
            hang_node: u32::from_le_bytes(c[4..8].try_into().unwrap()),
            label: c[8..].try_into().unwrap(),
        })
        .collect())
}

impl KeyExport {
    pub fn to_text(&self) -> String {
        let mut out = format!("{FORMAT_HEADER}\ncontact = {}\n", self.contact);
        for (level, material) in &self.levels {
            out.push_str(&format!(
                "\n[level {level}]\nheight = {}\nleaf = {}\nlabels = {}\nall = {}\n",
                material.height,
                material.leaf,
                BASE64.encode(pack_entries(&material.entries)),
                BASE64.encode(material.all_label),
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, BcastError> {
        let bad = |msg: &str| BcastError::KeyFile(msg.to_string());
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some(FORMAT_HEADER) {
            return Err(bad("not a key export file"));
        }
        let mut contact = String::new();
        let mut levels: Vec<(usize, UserKeyMaterial)> = Vec::new();
        let mut current: Option<usize> = None;
        let mut height: Option<u8> = None;
        let mut leaf: Option<u32> = None;
        let mut entries: Option<Vec<LabelEntry>> = None;
        let mut all_label: Option<[u8; KEY_LEN]> = None;

        let finish = |current: &mut Option<usize>,
                          height: &mut Option<u8>,
                          leaf: &mut Option<u32>,
                          entries: &mut Option<Vec<LabelEntry>>,
                          all_label: &mut Option<[u8; KEY_LEN]>,
                          levels: &mut Vec<(usize, UserKeyMaterial)>|
         -> Result<(), BcastError> {
            if let Some(level) = current.take() {
                levels.push((
                    level,
                    UserKeyMaterial {
                        height: height.take().ok_or_else(|| bad("missing height"))?,
                        leaf: leaf.take().ok_or_else(|| bad("missing leaf"))?,
                        entries: entries.take().ok_or_else(|| bad("missing labels"))?,
                        all_label: all_label.take().ok_or_else(|| bad("missing all label"))?,
                    },
                ));
            }
            Ok(())
        };

        for line in lines {
            if let Some(rest) = line.strip_prefix("[level ") {
                finish(&mut current, &mut height, &mut leaf, &mut entries, &mut all_label, &mut levels)?;
                let level: usize = rest
                    .trim_end_matches(']')
                    .parse()
                    .map_err(|_| bad("invalid level section"))?;
                current = Some(level);
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "contact" => contact = value.to_string(),
                "height" => height = Some(value.parse().map_err(|_| bad("bad height"))?),
                "leaf" => leaf = Some(value.parse().map_err(|_| bad("bad leaf"))?),
                "labels" => {
                    let bytes = BASE64.decode(value).map_err(|_| bad("bad labels base64"))?;
                    entries = Some(unpack_entries(&bytes)?);
                }
                "all" => {
                    let bytes = BASE64.decode(value).map_err(|_| bad("bad all-label base64"))?;
                    all_label = Some(
                        bytes
                            .as_slice()
                            .try_into()
                            .map_err(|_| bad("all label must be 16 bytes"))?,
                    );
                }
                other => return Err(bad(&format!("unknown key {other:?}"))),
            }
        }
        finish(&mut current, &mut height, &mut leaf, &mut entries, &mut all_label, &mut levels)?;
        if contact.is_empty() {
            return Err(bad("missing contact name"));
        }
        Ok(Self { contact, levels })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sd::SdSystem;

    #[test]
    fn export_round_trip() {
        let sys1 = SdSystem::new(4, [1u8; 16]).unwrap();
        let sys2 = SdSystem::new(4, [2u8; 16]).unwrap();
        let export = KeyExport {
            contact: "alice".into(),
            levels: vec![(1, sys1.key_material(5)), (2, sys2.key_material(5))],
        };
        let text = export.to_text();
        assert!(text.starts_with(FORMAT_HEADER));
        let parsed = KeyExport::from_text(&text).unwrap();
        assert_eq!(parsed, export);
    }

    #[test]
    fn rejects_garbage() {
        assert!(KeyExport::from_text("nope").is_err());
        assert!(KeyExport::from_text("sani-keys v1\n[level 1]\nheight = 4\n").is_err());
    }
}
