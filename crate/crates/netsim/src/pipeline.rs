//! The publish/read pipeline: sanitize, seal per tier, pick a cover, embed;
//! and the reader's inverse, plus the owner's report and the operator's
//! view.

use std::path::Path;

use rand::RngCore;

use sani_bcast::{BcastError, KeyExport, LevelSeal, ProtectedPayload};
use sani_core::sanitizer::{decode_level_set, OffsetEntry, PadMode};
use sani_core::{encode_level_set, fixtures, reconstruct, sanitize, LevelSet, SanitizationPlan};
use sani_stego::{EmbedConfig, RgbImage};

use crate::account::Account;
use crate::store::Store;
use crate::{io_err, NetsimError};

#[derive(Debug, Clone)]
pub struct Post {
    pub id: String,
    /// The published (public tier) message.
    pub text: String,
    pub image: RgbImage,
    /// Publication time, seconds since the epoch.
    pub timestamp: u64,
}

/// A reader's result: the most detailed message their credentials allow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadOutcome {
    pub text: String,
    pub level: usize,
}

/// Per-tier row of the owner's report.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub level: usize,
    pub name: String,
    pub text: Option<String>,
    pub preservation: f64,
    pub cover_size: Option<usize>,
    pub mkb_bytes: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub post_id: String,
    pub rows: Vec<ReportRow>,
    pub payload_bytes: usize,
}

/// Tier body carried inside each sealed record: the offset table followed
/// by the encoded slot set.
fn encode_level_body(offsets: &[OffsetEntry], set: &LevelSet) -> Result<Vec<u8>, NetsimError> {
    let mut out = Vec::new();
    out.extend_from_slice(&(offsets.len() as u16).to_le_bytes());
    for entry in offsets {
        out.extend_from_slice(&(entry.start as u32).to_le_bytes());
        out.extend_from_slice(&(entry.end as u32).to_le_bytes());
        out.push(match entry.pad {
            PadMode::None => 0,
            PadMode::SpaceBefore => 1,
            PadMode::SpaceAfter => 2,
        });
    }
    out.extend_from_slice(&encode_level_set(set).map_err(NetsimError::Sanitizer)?);
    Ok(out)
}

fn decode_level_body(
    bytes: &[u8],
    level_index: usize,
) -> Result<(Vec<OffsetEntry>, LevelSet), NetsimError> {
    let corrupt = |msg: &str| NetsimError::Corrupt(format!("level body: {msg}"));
    if bytes.len() < 2 {
        return Err(corrupt("too short"));
    }
    let count = u16::from_le_bytes(bytes[..2].try_into().unwrap()) as usize;
    let table_len = 2 + count * 9;
    if bytes.len() < table_len {
        return Err(corrupt("offset table truncated"));
    }
    let mut offsets = Vec::with_capacity(count);
    for k in 0..count {
        let base = 2 + k * 9;
        let start = u32::from_le_bytes(bytes[base..base + 4].try_into().unwrap()) as usize;
        let end = u32::from_le_bytes(bytes[base + 4..base + 8].try_into().unwrap()) as usize;
        let pad = match bytes[base + 8] {
            0 => PadMode::None,
            1 => PadMode::SpaceBefore,
            2 => PadMode::SpaceAfter,
            _ => return Err(corrupt("bad pad mode")),
        };
        if end < start {
            return Err(corrupt("inverted span"));
        }
        offsets.push(OffsetEntry { start, end, pad });
    }
    let set = decode_level_set(&bytes[table_len..], level_index, count)
        .map_err(NetsimError::Sanitizer)?;
    Ok((offsets, set))
}

fn embed_config(account: &Account) -> Result<EmbedConfig, NetsimError> {
    Ok(EmbedConfig {
        cell_size: account.settings.cell_size,
        tolerance: account.settings.tolerance,
        lsb_bits: 1,
    }
    .validated()?)
}

/// Seal a plan into payload bytes with fresh per-tier session keys.
pub fn seal_plan(
    account: &Account,
    plan: &SanitizationPlan,
    rng: &mut dyn RngCore,
) -> Result<Vec<u8>, NetsimError> {
    let n = account.n_levels();
    let mut bodies = Vec::with_capacity(n - 1);
    for set in &plan.level_sets {
        bodies.push(encode_level_body(&plan.placeholder_offsets, set)?);
    }
    let systems: Vec<_> = (1..n)
        .map(|level| account.system_for_level(level))
        .collect::<Result<_, _>>()?;
    let revoked: Vec<_> = (1..n).map(|level| account.revoked_leaves(level)).collect();
    let mut seals = Vec::with_capacity(n - 1);
    for idx in 0..n - 1 {
        let mut session_key = [0u8; 16];
        rng.fill_bytes(&mut session_key);
        let mut nonce = [0u8; 16];
        rng.fill_bytes(&mut nonce);
        seals.push(LevelSeal {
            system: &systems[idx],
            revoked: &revoked[idx],
            session_key,
            nonce,
            plaintext: &bodies[idx],
        });
    }
    Ok(sani_bcast::seal_payload(&seals)?.to_bytes())
}

/// Publish a message: sanitize, seal, pick a cover, embed, store.
pub fn publish(
    store: &Store,
    account: &Account,
    message: &str,
    cover_hint: Option<&Path>,
    rng: &mut dyn RngCore,
) -> Result<Post, NetsimError> {
    let corpus = fixtures::corpus();
    let tax = fixtures::taxonomy();
    let plan = sanitize(message, &account.requirements, &corpus, &tax);
    let payload = seal_plan(account, &plan, rng)?;
    let cfg = embed_config(account)?;

    let cover = match cover_hint {
        Some(path) => sani_stego::io::load_png(path)?,
        None => {
            let library = store.cover_library(&account.settings)?;
            let path = sani_stego::choose_cover(payload.len(), &library)?;
            sani_stego::io::load_png(path)?
        }
    };
    let image = sani_stego::embed(&cover, &payload, &cfg)?;
    let post = Post {
        id: store.next_post_id()?,
        text: plan.published_message.clone(),
        image,
        timestamp: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    store.save_post(&post)?;
    Ok(post)
}

/// Reconstruct the most detailed message the credentials allow. Without
/// credentials (or with fully revoked ones) the published text comes back
/// as tier 0.
pub fn read_post(
    post: &Post,
    credentials: Option<&KeyExport>,
    cfg: &EmbedConfig,
) -> Result<ReadOutcome, NetsimError> {
    let Some(export) = credentials else {
        return Ok(ReadOutcome {
            text: post.text.clone(),
            level: 0,
        });
    };
    let payload_bytes = sani_stego::extract(&post.image, cfg)?;
    let payload = ProtectedPayload::from_bytes(&payload_bytes)?;
    match payload.open(&export.levels) {
        Ok((level, body)) => {
            let (offsets, set) = decode_level_body(&body, level)?;
            let text = reconstruct(&post.text, &offsets, &set)?;
            Ok(ReadOutcome { text, level })
        }
        Err(BcastError::NoAccess) => Ok(ReadOutcome {
            text: post.text.clone(),
            level: 0,
        }),
        Err(e) => Err(e.into()),
    }
}

/// Exactly what the operator stores: the published text and the raw image.
/// No payload-presence signal exists on this surface.
pub fn operator_view(post: &Post) -> (&str, &RgbImage) {
    (post.text.as_str(), &post.image)
}

/// The owner's view of a post: per-tier reconstruction, information
/// preservation and size accounting. Requires the account's key-tree
/// secrets; a tier whose block has no authorized readers is reported
/// inaccessible.
pub fn report(account: &Account, post: &Post) -> Result<Report, NetsimError> {
    let cfg = embed_config(account)?;
    let payload_bytes = sani_stego::extract(&post.image, &cfg)?;
    let payload = ProtectedPayload::from_bytes(&payload_bytes)?;
    let n = account.n_levels();
    if payload.n_levels() != n - 1 {
        return Err(NetsimError::Corrupt(format!(
            "payload has {} tiers, account expects {}",
            payload.n_levels(),
            n - 1
        )));
    }

    // recover per-tier texts as the authority
    let mut texts: Vec<Option<String>> = vec![Some(post.text.clone())];
    for level in 1..n {
        let sys = account.system_for_level(level)?;
        match payload.open_as_authority(level, &sys) {
            Ok(body) => {
                let (offsets, set) = decode_level_body(&body, level)?;
                texts.push(Some(reconstruct(&post.text, &offsets, &set)?));
            }
            Err(BcastError::Revoked) => texts.push(None),
            Err(e) => return Err(e.into()),
        }
    }

    // preservation percentages from re-sanitizing the recovered original
    let preservation: Vec<f64> = match texts.last().cloned().flatten() {
        Some(original) => {
            let corpus = fixtures::corpus();
            let tax = fixtures::taxonomy();
            let plan = sanitize(&original, &account.requirements, &corpus, &tax);
            (0..n).map(|level| plan.preservation(level)).collect()
        }
        None => vec![f64::NAN; n],
    };

    let mut rows = Vec::with_capacity(n);
    for level in 0..n {
        let (cover_size, mkb_bytes) = if level == 0 {
            (None, None)
        } else {
            let record = &payload.records[level - 1];
            let cover = record.mkb.cover_size();
            (Some(cover), Some(cover * 22))
        };
        rows.push(ReportRow {
            level,
            name: account.requirements.level_name(level).to_string(),
            text: texts[level].clone(),
            preservation: preservation[level],
            cover_size,
            mkb_bytes,
        });
    }
    Ok(Report {
        post_id: post.id.clone(),
        rows,
        payload_bytes: payload_bytes.len(),
    })
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = format!(
            "post {} (payload {} bytes)\n",
            self.post_id, self.payload_bytes
        );
        for row in &self.rows {
            let text = row.text.as_deref().unwrap_or("(no authorized readers)");
            let sizes = match (row.cover_size, row.mkb_bytes) {
                (Some(c), Some(b)) => format!(" cover={c} mkb={b}B"),
                _ => String::new(),
            };
            let preservation = if row.preservation.is_nan() {
                "n/a".to_string()
            } else {
                format!("{:.1}%", row.preservation)
            };
            out.push_str(&format!(
                "L{} {:<16} info={preservation}{sizes}\n    {text}\n",
                row.level, row.name
            ));
        }
        out
    }
}

pub fn read_keys_file(path: &Path) -> Result<KeyExport, NetsimError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(KeyExport::from_text(&text)?)
}
