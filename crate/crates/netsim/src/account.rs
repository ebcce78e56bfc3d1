//! Account state: privacy requirements, per-tier key trees and the contact
//! directory.

use std::collections::BTreeSet;

use rand::RngCore;

use sani_bcast::{Key, KeyExport, SdSystem};
use sani_core::requirements::build_requirements;
use sani_core::{fixtures, PrivacyRequirements, Questionnaire};

use crate::NetsimError;

/// Per-account stego and key-tree configuration, carried by the scenario
/// pack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccountSettings {
    pub cell_size: u8,
    pub tolerance: u8,
    pub tree_height: u8,
}

impl AccountSettings {
    pub fn from_questionnaire(q: &Questionnaire) -> Self {
        let get = |key: &str, default: u8| {
            q.settings
                .get(key)
                .and_then(|v| v.parse().ok())
                .unwrap_or(default)
        };
        Self {
            cell_size: get("cell-size", 2),
            tolerance: get("tolerance", 8),
            tree_height: get("tree-height", 8),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contact {
    pub id: String,
    pub relationship: String,
    /// Highest tier this contact may read.
    pub tier: usize,
    /// Leaf slot per tier 1..=tier, in tier order.
    pub leaves: Vec<(usize, u32)>,
    pub revoked: bool,
}

#[derive(Debug, Clone)]
pub struct Account {
    pub scenario: String,
    pub requirements: PrivacyRequirements,
    pub settings: AccountSettings,
    /// Root secret per protected tier; index 0 is tier 1.
    pub level_secrets: Vec<Key>,
    pub contacts: Vec<Contact>,
}

impl Account {
    /// Step-0: build requirements from a scenario pack plus answers (option
    /// key per topic per level) and roll fresh key trees.
    pub fn init(
        scenario: &str,
        answers: &[Vec<String>],
        rng: &mut dyn RngCore,
    ) -> Result<Self, NetsimError> {
        let pack = fixtures::scenario(scenario)
            .ok_or_else(|| NetsimError::UnknownScenario(scenario.to_string()))?;
        let q = Questionnaire::parse(pack)?;
        let corpus = fixtures::corpus();
        let tax = fixtures::taxonomy();
        tax.validate_against(&corpus)?;
        let requirements = build_requirements(&q, answers, &corpus, &tax)?;
        let settings = AccountSettings::from_questionnaire(&q);
        let mut level_secrets = Vec::new();
        for _ in 1..requirements.n_levels() {
            let mut secret = [0u8; 16];
            rng.fill_bytes(&mut secret);
            level_secrets.push(secret);
        }
        Ok(Self {
            scenario: scenario.to_string(),
            requirements,
            settings,
            level_secrets,
            contacts: Vec::new(),
        })
    }

    /// Init with the scenario pack's preselected answers.
    pub fn init_with_defaults(scenario: &str, rng: &mut dyn RngCore) -> Result<Self, NetsimError> {
        let pack = fixtures::scenario(scenario)
            .ok_or_else(|| NetsimError::UnknownScenario(scenario.to_string()))?;
        let q = Questionnaire::parse(pack)?;
        let answers = q.default_answers()?;
        Self::init(scenario, &answers, rng)
    }

    pub fn n_levels(&self) -> usize {
        self.requirements.n_levels()
    }

    pub fn leaf_capacity(&self) -> u32 {
        1 << self.settings.tree_height
    }

    pub fn system_for_level(&self, level: usize) -> Result<SdSystem, NetsimError> {
        let secret = self
            .level_secrets
            .get(level.wrapping_sub(1))
            .ok_or_else(|| NetsimError::Corrupt(format!("no key tree for level {level}")))?;
        Ok(SdSystem::new(self.settings.tree_height, *secret)?)
    }

    pub fn contact(&self, id: &str) -> Option<&Contact> {
        self.contacts.iter().find(|c| c.id == id)
    }

    fn next_leaf(&self, level: usize) -> u32 {
        self.contacts
            .iter()
            .filter(|c| c.tier >= level)
            .count() as u32
    }

    /// Register a contact under a relationship tier and hand back their
    /// export: key material for every tier up to their own.
    pub fn add_contact(&mut self, id: &str, relationship: &str) -> Result<KeyExport, NetsimError> {
        if self.contact(id).is_some() {
            return Err(NetsimError::DuplicateContact(id.to_string()));
        }
        let tier = self
            .requirements
            .level_of_name(relationship)
            .ok_or_else(|| NetsimError::UnknownRelationship(relationship.to_string()))?;
        if tier == 0 {
            return Err(NetsimError::PublicTierContact(relationship.to_string()));
        }
        let mut leaves = Vec::with_capacity(tier);
        for level in 1..=tier {
            let leaf = self.next_leaf(level);
            if leaf >= self.leaf_capacity() {
                return Err(NetsimError::CapacityFull {
                    level,
                    capacity: self.leaf_capacity(),
                });
            }
            leaves.push((level, leaf));
        }
        let mut levels = Vec::with_capacity(tier);
        for &(level, leaf) in &leaves {
            let sys = self.system_for_level(level)?;
            levels.push((level, sys.key_material(leaf)));
        }
        self.contacts.push(Contact {
            id: id.to_string(),
            relationship: relationship.to_string(),
            tier,
            leaves,
            revoked: false,
        });
        Ok(KeyExport {
            contact: id.to_string(),
            levels,
        })
    }

    /// Mark a contact revoked at every tier; future posts exclude them.
    pub fn revoke_contact(&mut self, id: &str) -> Result<(), NetsimError> {
        let contact = self
            .contacts
            .iter_mut()
            .find(|c| c.id == id)
            .ok_or_else(|| NetsimError::UnknownContact(id.to_string()))?;
        contact.revoked = true;
        Ok(())
    }

    /// Revoked leaf set for a tier's next media key block: explicitly
    /// revoked contacts plus every never-assigned slot.
    pub fn revoked_leaves(&self, level: usize) -> BTreeSet<u32> {
        let active: BTreeSet<u32> = self
            .contacts
            .iter()
            .filter(|c| !c.revoked && c.tier >= level)
            .filter_map(|c| {
                c.leaves
                    .iter()
                    .find(|(l, _)| *l == level)
                    .map(|(_, leaf)| *leaf)
            })
            .collect();
        (0..self.leaf_capacity())
            .filter(|leaf| !active.contains(leaf))
            .collect()
    }
}
