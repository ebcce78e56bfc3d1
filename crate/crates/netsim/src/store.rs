//! The local directory store standing in for the social network operator.
//!
//! ```text
//! store/
//!   account/
//!     requirements   saved privacy requirements
//!     contacts       contact directory (id, relationship, status, leaves)
//!     secrets        per-tier key-tree root secrets (owner-only)
//!     config         scenario name and stego settings
//!   covers/          cover image library (PNG)
//!   posts/<id>/
//!     text.txt       the published message
//!     image.png      the published image
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use sani_core::PrivacyRequirements;
use sani_stego::RgbImage;

use crate::account::{Account, AccountSettings, Contact};
use crate::pipeline::Post;
use crate::{io_err, NetsimError};

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn account_dir(&self) -> PathBuf {
        self.root.join("account")
    }

    pub fn covers_dir(&self) -> PathBuf {
        self.root.join("covers")
    }

    fn posts_dir(&self) -> PathBuf {
        self.root.join("posts")
    }

    pub fn is_initialized(&self) -> bool {
        self.account_dir().join("requirements").exists()
    }

    pub fn save_account(&self, account: &Account) -> Result<(), NetsimError> {
        let dir = self.account_dir();
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        fs::create_dir_all(self.covers_dir()).map_err(|e| io_err(&self.covers_dir(), e))?;

        let write = |name: &str, contents: String| -> Result<(), NetsimError> {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| io_err(&path, e))
        };

        write(
            "requirements",
            account.requirements.to_text(&account.scenario),
        )?;

        let mut contacts = String::from("# id\trelationship\tstatus\tleaves (level:slot,...)\n");
        for c in &account.contacts {
            let leaves: Vec<String> = c
                .leaves
                .iter()
                .map(|(level, leaf)| format!("{level}:{leaf}"))
                .collect();
            contacts.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                c.id,
                c.relationship,
                if c.revoked { "revoked" } else { "active" },
                leaves.join(",")
            ));
        }
        write("contacts", contacts)?;

        let mut secrets = String::from("# per-tier key tree root secrets\n");
        for (i, secret) in account.level_secrets.iter().enumerate() {
            secrets.push_str(&format!("level-secret.{} = {}\n", i + 1, hex::encode(secret)));
        }
        write("secrets", secrets)?;

        write(
            "config",
            format!(
                "scenario = {}\ncell-size = {}\ntolerance = {}\ntree-height = {}\n",
                account.scenario,
                account.settings.cell_size,
                account.settings.tolerance,
                account.settings.tree_height
            ),
        )
    }

    pub fn load_account(&self) -> Result<Account, NetsimError> {
        let dir = self.account_dir();
        if !self.is_initialized() {
            return Err(NetsimError::NotInitialized);
        }
        let read = |name: &str| -> Result<String, NetsimError> {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|e| io_err(&path, e))
        };

        let (requirements, scenario) = PrivacyRequirements::from_text(&read("requirements")?)?;

        let mut settings = AccountSettings {
            cell_size: 2,
            tolerance: 8,
            tree_height: 8,
        };
        let mut config_scenario = scenario.clone();
        for line in read("config")?.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                let (key, value) = (key.trim(), value.trim());
                match key {
                    "scenario" => config_scenario = value.to_string(),
                    "cell-size" => settings.cell_size = parse_setting(value, "cell-size")?,
                    "tolerance" => settings.tolerance = parse_setting(value, "tolerance")?,
                    "tree-height" => settings.tree_height = parse_setting(value, "tree-height")?,
                    _ => {}
                }
            }
        }

        let mut level_secrets = Vec::new();
        for line in read("secrets")?.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| NetsimError::Corrupt("secrets: expected key = value".into()))?;
            let index: usize = key
                .trim()
                .strip_prefix("level-secret.")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| NetsimError::Corrupt(format!("secrets: bad key {key:?}")))?;
            let bytes = hex::decode(value.trim())
                .map_err(|_| NetsimError::Corrupt("secrets: bad hex".into()))?;
            let secret: [u8; 16] = bytes
                .try_into()
                .map_err(|_| NetsimError::Corrupt("secrets: wrong length".into()))?;
            if index != level_secrets.len() + 1 {
                return Err(NetsimError::Corrupt("secrets: out of order".into()));
            }
            level_secrets.push(secret);
        }
        if level_secrets.len() + 1 != requirements.n_levels() {
            return Err(NetsimError::Corrupt(
                "secrets do not match the requirement levels".into(),
            ));
        }

        let mut contacts = Vec::new();
        for line in read("contacts")?.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(NetsimError::Corrupt("contacts: expected 4 fields".into()));
            }
            let tier = requirements
                .level_of_name(fields[1])
                .ok_or_else(|| NetsimError::Corrupt("contacts: unknown relationship".into()))?;
            let mut leaves = Vec::new();
            if !fields[3].is_empty() {
                for pair in fields[3].split(',') {
                    let (level, leaf) = pair
                        .split_once(':')
                        .ok_or_else(|| NetsimError::Corrupt("contacts: bad leaf pair".into()))?;
                    leaves.push((
                        level
                            .parse()
                            .map_err(|_| NetsimError::Corrupt("contacts: bad level".into()))?,
                        leaf.parse()
                            .map_err(|_| NetsimError::Corrupt("contacts: bad leaf".into()))?,
                    ));
                }
            }
            contacts.push(Contact {
                id: fields[0].to_string(),
                relationship: fields[1].to_string(),
                tier,
                leaves,
                revoked: fields[2] == "revoked",
            });
        }

        Ok(Account {
            scenario: config_scenario,
            requirements,
            settings,
            level_secrets,
            contacts,
        })
    }

    pub fn next_post_id(&self) -> Result<String, NetsimError> {
        let count = self.list_posts()?.len();
        Ok(format!("p{:04}", count + 1))
    }

    pub fn list_posts(&self) -> Result<Vec<String>, NetsimError> {
        let dir = self.posts_dir();
        if !dir.exists() {
            return Ok(Vec::new());
        }
        let mut posts = Vec::new();
        for entry in fs::read_dir(&dir).map_err(|e| io_err(&dir, e))? {
            let entry = entry.map_err(|e| io_err(&dir, e))?;
            if entry.path().is_dir() {
                posts.push(entry.file_name().to_string_lossy().into_owned());
            }
        }
        posts.sort();
        Ok(posts)
    }

    pub fn save_post(&self, post: &Post) -> Result<(), NetsimError> {
        let dir = self.posts_dir().join(&post.id);
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let text_path = dir.join("text.txt");
        fs::write(&text_path, &post.text).map_err(|e| io_err(&text_path, e))?;
        sani_stego::io::save_png(&post.image, &dir.join("image.png"))?;
        Ok(())
    }

    pub fn load_post(&self, id: &str) -> Result<Post, NetsimError> {
        let dir = self.posts_dir().join(id);
        if !dir.is_dir() {
            return Err(NetsimError::UnknownPost(id.to_string()));
        }
        let text_path = dir.join("text.txt");
        let text = fs::read_to_string(&text_path).map_err(|e| io_err(&text_path, e))?;
        let timestamp = fs::metadata(&text_path)
            .and_then(|m| m.modified())
            .ok()
            .and_then(|t| t.duration_since(std::time::UNIX_EPOCH).ok())
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let image = sani_stego::io::load_png(&dir.join("image.png"))?;
        Ok(Post {
            id: id.to_string(),
            text,
            image,
            timestamp,
        })
    }

    /// Cover library entries with capacities precomputed at the account's
    /// cell size.
    pub fn cover_library(
        &self,
        settings: &AccountSettings,
    ) -> Result<Vec<(PathBuf, usize)>, NetsimError> {
        let dir = self.covers_dir();
        let cfg = sani_stego::EmbedConfig {
            cell_size: settings.cell_size,
            tolerance: settings.tolerance,
            lsb_bits: 1,
        }
        .validated()?;
        let mut library = Vec::new();
        if dir.exists() {
            let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(|e| io_err(&dir, e))?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|e| e == "png"))
                .collect();
            paths.sort();
            for path in paths {
                let img = sani_stego::io::load_png(&path)?;
                let capacity = sani_stego::capacity_bytes(&img, &cfg);
                library.push((path, capacity));
            }
        }
        Ok(library)
    }

    /// Seed the cover library with a generated smooth 1024x1024 cover.
    pub fn seed_default_cover(&self) -> Result<(), NetsimError> {
        let dir = self.covers_dir();
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let img = default_cover();
        sani_stego::io::save_png(&img, &dir.join("cover-1024.png"))?;
        Ok(())
    }
}

fn parse_setting(value: &str, name: &str) -> Result<u8, NetsimError> {
    value
        .parse()
        .map_err(|_| NetsimError::Corrupt(format!("config: bad {name}")))
}

/// A smooth two-axis gradient: visually plain, fully homogeneous at every
/// supported cell size.
pub fn default_cover() -> RgbImage {
    let mut img = RgbImage::new(1024, 1024);
    for (x, y, p) in img.enumerate_pixels_mut() {
        let r = (40 + x / 8) as u8;
        let g = (60 + y / 8) as u8;
        let b = (90 + (x + y) / 16) as u8;
        p.0 = [r, g, b];
    }
    img
}
