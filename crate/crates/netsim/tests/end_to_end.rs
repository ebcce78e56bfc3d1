//! Full-pipeline invariants over the bundled scenarios: per-tier privacy,
//! top-tier fidelity, operator blindness and credential isolation.

use rand::rngs::StdRng;
use rand::SeedableRng;

use sani_core::requirements::Classification;
use sani_core::{fixtures, sanitize};
use sani_netsim::{operator_view, publish, read_post, report, Account, NetsimError, Store};
use sani_stego::EmbedConfig;

const HEALTHCARE_INPUT: &str = "I've got HIV in 2008. In June 2008 I've got a pharyngitis \
that stayed for 10 days. After that, I had several ulcers in the mouth. Suspecting an \
infection, I went to the hospital and the physician asked for an HIV testing that was \
positive. My immune system was very weak, I got pneumonia 3 times.";

const MICROBLOG_INPUT: &str = "I will be visiting Barcelona on June 16th to assist to the \
Accenture Digital Conference with Accenture Spain and key stakeholders.";

struct Sim {
    _dir: tempfile::TempDir,
    store: Store,
    account: Account,
    rng: StdRng,
}

fn sim(scenario: &str, contacts: &[(&str, &str)]) -> Sim {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path());
    let mut rng = StdRng::seed_from_u64(0xE2E);
    let mut account = Account::init_with_defaults(scenario, &mut rng).unwrap();
    for (id, relationship) in contacts {
        account.add_contact(id, relationship).unwrap();
    }
    store.save_account(&account).unwrap();
    store.seed_default_cover().unwrap();
    Sim {
        _dir: dir,
        store,
        account,
        rng,
    }
}

#[test]
fn per_tier_reads_respect_thresholds() {
    let mut sim = sim(
        "healthcare",
        &[
            ("ruth", "registered-user"),
            ("fay", "follower"),
            ("cleo", "clinician"),
        ],
    );
    let exports: Vec<_> = ["ruth", "fay", "cleo"]
        .iter()
        .map(|id| {
            // re-derive each export from the stored account
            let contact = sim.account.contact(id).unwrap().clone();
            let levels = contact
                .leaves
                .iter()
                .map(|&(level, leaf)| {
                    let sys = sim.account.system_for_level(level).unwrap();
                    (level, sys.key_material(leaf))
                })
                .collect();
            sani_bcast::KeyExport {
                contact: id.to_string(),
                levels,
            }
        })
        .collect();

    let post = publish(&sim.store, &sim.account, HEALTHCARE_INPUT, None, &mut sim.rng).unwrap();
    let cfg = EmbedConfig::new(sim.account.settings.cell_size).unwrap();
    let corpus = fixtures::corpus();
    let tax = fixtures::taxonomy();

    for (export, expected_level) in exports.iter().zip([1usize, 2, 3]) {
        let outcome = read_post(&post, Some(export), &cfg).unwrap();
        assert_eq!(outcome.level, expected_level);
        // everything a tier sees classifies at or below that tier
        let replay = sanitize(&outcome.text, &sim.account.requirements, &corpus, &tax);
        for term in &replay.terms {
            match term.classification {
                Classification::Level(l) => assert!(
                    l <= expected_level,
                    "tier {expected_level} reconstruction leaks {:?} (tier {l})",
                    term.surface
                ),
                Classification::AboveTop => {
                    panic!("tier {expected_level} leaks unknown term {:?}", term.surface)
                }
            }
        }
    }
}

#[test]
fn top_tier_reader_recovers_the_exact_original() {
    for (scenario, contacts, message, top) in [
        (
            "healthcare",
            vec![("cleo", "clinician")],
            HEALTHCARE_INPUT,
            3usize,
        ),
        (
            "microblog",
            vec![("fay", "follower")],
            MICROBLOG_INPUT,
            2usize,
        ),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        let mut rng = StdRng::seed_from_u64(1);
        let mut account = Account::init_with_defaults(scenario, &mut rng).unwrap();
        let mut export = None;
        for (id, rel) in &contacts {
            export = Some(account.add_contact(id, rel).unwrap());
        }
        store.save_account(&account).unwrap();
        store.seed_default_cover().unwrap();
        let post = publish(&store, &account, message, None, &mut rng).unwrap();
        let cfg = EmbedConfig::new(account.settings.cell_size).unwrap();
        let outcome = read_post(&post, export.as_ref(), &cfg).unwrap();
        assert_eq!(outcome.level, top);
        assert_eq!(outcome.text, message);
    }
}

#[test]
fn operator_surface_carries_no_payload_signal() {
    let mut sim = sim("healthcare", &[("cleo", "clinician")]);
    let sensitive = publish(
        &sim.store,
        &sim.account,
        HEALTHCARE_INPUT,
        None,
        &mut sim.rng,
    )
    .unwrap();
    // a message with nothing to protect still publishes the same shape
    let plain = publish(
        &sim.store,
        &sim.account,
        "I went to the hospital",
        None,
        &mut sim.rng,
    )
    .unwrap();

    for post in [&sensitive, &plain] {
        let (text, image) = operator_view(post);
        assert_eq!(image.dimensions(), (1024, 1024));
        assert!(!text.to_lowercase().contains("hiv"));
        let dir = sim.store.root().join("posts").join(&post.id);
        let mut files: Vec<String> = std::fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        files.sort();
        assert_eq!(files, ["image.png", "text.txt"]);
    }
    // the published text never contains any protected literal
    let (text, _) = operator_view(&sensitive);
    for leak in ["HIV", "pharyngitis", "pneumonia", "physician", "June 2008"] {
        assert!(
            !text.to_lowercase().contains(&leak.to_lowercase()),
            "operator text leaks {leak}"
        );
    }
}

#[test]
fn lower_tier_credentials_cannot_open_higher_records() {
    let mut sim = sim("basic", &[("carol", "close-friend"), ("frank", "friend")]);
    let frank_export = {
        let contact = sim.account.contact("frank").unwrap().clone();
        let levels = contact
            .leaves
            .iter()
            .map(|&(level, leaf)| {
                let sys = sim.account.system_for_level(level).unwrap();
                (level, sys.key_material(leaf))
            })
            .collect();
        sani_bcast::KeyExport {
            contact: "frank".into(),
            levels,
        }
    };
    let post = publish(
        &sim.store,
        &sim.account,
        "I have a lung cancer",
        None,
        &mut sim.rng,
    )
    .unwrap();
    let cfg = EmbedConfig::new(sim.account.settings.cell_size).unwrap();

    // forge the credential's claimed tier: tier-1 material presented as tier 2
    let mut forged = frank_export.clone();
    forged.levels = forged
        .levels
        .iter()
        .map(|(_, m)| (2usize, m.clone()))
        .collect();
    match read_post(&post, Some(&forged), &cfg) {
        // wrong tree labels decrypt to garbage and fail authentication
        Err(NetsimError::Bcast(sani_bcast::BcastError::Integrity)) => {}
        Ok(outcome) => assert_ne!(
            outcome.text, "I have a lung cancer",
            "tier-1 material opened the tier-2 record"
        ),
        Err(other) => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn report_matches_scenario_reference_values() {
    let mut sim = sim(
        "healthcare",
        &[("ruth", "registered-user"), ("fay", "follower"), ("cleo", "clinician")],
    );
    let post = publish(&sim.store, &sim.account, HEALTHCARE_INPUT, None, &mut sim.rng).unwrap();
    let owner = report(&sim.account, &post).unwrap();
    let expect = [64.1, 72.2, 77.9, 100.0];
    for (row, want) in owner.rows.iter().zip(expect) {
        assert!(
            (row.preservation - want).abs() <= 0.5,
            "level {}: {} vs {want}",
            row.level,
            row.preservation
        );
    }
    // mean measured cover size is exposed per tier
    assert!(owner.rows.iter().skip(1).all(|r| r.cover_size.unwrap() >= 1));

    let mut micro = self::sim(
        "microblog",
        &[("ruth", "registered-user"), ("fay", "follower")],
    );
    let post = publish(&micro.store, &micro.account, MICROBLOG_INPUT, None, &mut micro.rng).unwrap();
    let owner = report(&micro.account, &post).unwrap();
    for (row, want) in owner.rows.iter().zip([27.5, 34.1, 100.0]) {
        assert!(
            (row.preservation - want).abs() <= 0.5,
            "microblog level {}: {} vs {want}",
            row.level,
            row.preservation
        );
    }
}
