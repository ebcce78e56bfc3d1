//! Golden tests: the bundled fixtures must reproduce the two case-study
//! sanitizations cell by cell — published text, every per-tier
//! reconstruction, the slot columns and their encoded byte sizes, and the
//! information-preservation percentages.

use sani_core::requirements::build_requirements;
use sani_core::{encode_level_set, fixtures, sanitize, PrivacyRequirements, Questionnaire, Slot};

const HEALTHCARE_INPUT: &str = "I've got HIV in 2008. In June 2008 I've got a pharyngitis \
that stayed for 10 days. After that, I had several ulcers in the mouth. Suspecting an \
infection, I went to the hospital and the physician asked for an HIV testing that was \
positive. My immune system was very weak, I got pneumonia 3 times.";

const HEALTHCARE_L2: &str = "I've got HIV in 2008. In JUNE I've got a DISEASE that stayed \
for 10 days. After that, I had PATHOLOGY in the mouth. Suspecting an infection, I went to \
the hospital and the physician asked for an TESTING that was positive. My SYSTEM was very \
weak, I got DISEASE 3 times.";

const HEALTHCARE_L1: &str = "I've got INFECTION in 2008. In JUNE I've got a DISEASE that \
stayed for DAYS. After that, I had PATHOLOGY in the mouth. Suspecting an infection, I went \
to the hospital and the DOCTOR asked for an TESTING that was positive. My SYSTEM was very \
weak, I got DISEASE TIMES.";

const HEALTHCARE_L0: &str = "I've got CONDITION in 2008. In JUNE I've got a DISEASE that \
stayed for DAYS. After that, I had CONDITION in the STRUCTURE. Suspecting an CONDITION, I \
went to the hospital and the DOCTOR asked for an TESTING that was positive. My SYSTEM was \
very weak, I got DISEASE TIMES.";

const MICROBLOG_INPUT: &str = "I will be visiting Barcelona on June 16th to assist to the \
Accenture Digital Conference with Accenture Spain and key stakeholders.";

const MICROBLOG_L1: &str = "I will be visiting Barcelona on JUNE to assist to the \
CONFERENCE with SPAIN and PERSON.";

const MICROBLOG_L0: &str = "I will be visiting CITY on JUNE to assist to the GROUP with \
SPAIN and PERSON.";

fn requirements(pack: &str) -> PrivacyRequirements {
    let q = Questionnaire::parse(pack).unwrap();
    let answers = q.default_answers().unwrap();
    build_requirements(&q, &answers, &fixtures::corpus(), &fixtures::taxonomy()).unwrap()
}

fn assert_same_up_to_case(got: &str, want: &str) {
    assert_eq!(
        got.to_lowercase(),
        want.to_lowercase(),
        "\n got: {got}\nwant: {want}"
    );
}

fn slot_text(slot: &Slot) -> Option<String> {
    match slot {
        Slot::SameAsPublished => None,
        Slot::Literal(s) => Some(s.to_lowercase()),
    }
}

fn assert_slots(slots: &[Slot], expected: &[Option<&str>]) {
    assert_eq!(slots.len(), expected.len());
    for (i, (slot, want)) in slots.iter().zip(expected).enumerate() {
        assert_eq!(
            slot_text(slot).as_deref(),
            want.map(str::to_lowercase).as_deref(),
            "slot {i}"
        );
    }
}

#[test]
fn healthcare_rows_match() {
    let req = requirements(fixtures::SCENARIO_HEALTHCARE);
    let corpus = fixtures::corpus();
    let tax = fixtures::taxonomy();
    let plan = sanitize(HEALTHCARE_INPUT, &req, &corpus, &tax);

    assert_same_up_to_case(&plan.published_message, HEALTHCARE_L0);
    assert_same_up_to_case(&plan.reconstruct_level(1).unwrap(), HEALTHCARE_L1);
    assert_same_up_to_case(&plan.reconstruct_level(2).unwrap(), HEALTHCARE_L2);
    // the top tier reproduces the input exactly, not just up to case
    assert_eq!(plan.reconstruct_level(3).unwrap(), HEALTHCARE_INPUT);
}

#[test]
fn healthcare_slot_columns_match() {
    let req = requirements(fixtures::SCENARIO_HEALTHCARE);
    let corpus = fixtures::corpus();
    let tax = fixtures::taxonomy();
    let plan = sanitize(HEALTHCARE_INPUT, &req, &corpus, &tax);

    assert_eq!(plan.level_sets.len(), 3);
    assert_slots(
        &plan.level_sets[0].slots,
        &[
            Some("infection"),
            None,
            None,
            None,
            Some("pathology"),
            Some("mouth"),
            Some("infection"),
            None,
            None,
            None,
            None,
            None,
            None,
        ],
    );
    assert_slots(
        &plan.level_sets[1].slots,
        &[
            Some("hiv"),
            None,
            None,
            Some("10 days"),
            Some("pathology"),
            Some("mouth"),
            Some("infection"),
            None,
            Some("physician"),
            None,
            None,
            None,
            Some("3 times"),
        ],
    );
    assert_slots(
        &plan.level_sets[2].slots,
        &[
            Some("hiv"),
            Some("june 2008"),
            Some("pharyngitis"),
            Some("10 days"),
            Some("several ulcers"),
            Some("mouth"),
            Some("infection"),
            None,
            Some("physician"),
            Some("hiv testing"),
            Some("immune system"),
            Some("pneumonia"),
            Some("3 times"),
        ],
    );
}

#[test]
fn healthcare_set_sizes_are_byte_exact() {
    let req = requirements(fixtures::SCENARIO_HEALTHCARE);
    let corpus = fixtures::corpus();
    let tax = fixtures::taxonomy();
    let plan = sanitize(HEALTHCARE_INPUT, &req, &corpus, &tax);
    let sizes: Vec<usize> = plan
        .level_sets
        .iter()
        .map(|s| encode_level_set(s).unwrap().len())
        .collect();
    assert_eq!(sizes, [45, 62, 120]);
}

#[test]
fn healthcare_preservation_percentages() {
    let req = requirements(fixtures::SCENARIO_HEALTHCARE);
    let corpus = fixtures::corpus();
    let tax = fixtures::taxonomy();
    let plan = sanitize(HEALTHCARE_INPUT, &req, &corpus, &tax);
    assert_eq!(plan.preservation(3), 100.0);
    assert!((plan.preservation(2) - 77.9).abs() <= 0.5, "{}", plan.preservation(2));
    assert!((plan.preservation(1) - 72.2).abs() <= 0.5, "{}", plan.preservation(1));
    assert!((plan.preservation(0) - 64.1).abs() <= 0.5, "{}", plan.preservation(0));
}

#[test]
fn microblog_rows_match() {
    let req = requirements(fixtures::SCENARIO_MICROBLOG);
    let corpus = fixtures::corpus();
    let tax = fixtures::taxonomy();
    let plan = sanitize(MICROBLOG_INPUT, &req, &corpus, &tax);

    assert_same_up_to_case(&plan.published_message, MICROBLOG_L0);
    assert_same_up_to_case(&plan.reconstruct_level(1).unwrap(), MICROBLOG_L1);
    assert_eq!(plan.reconstruct_level(2).unwrap(), MICROBLOG_INPUT);
}

#[test]
fn microblog_slot_columns_match() {
    let req = requirements(fixtures::SCENARIO_MICROBLOG);
    let corpus = fixtures::corpus();
    let tax = fixtures::taxonomy();
    let plan = sanitize(MICROBLOG_INPUT, &req, &corpus, &tax);

    assert_eq!(plan.level_sets.len(), 2);
    assert_slots(
        &plan.level_sets[0].slots,
        &[Some("barcelona"), None, Some("conference"), None, None],
    );
    assert_slots(
        &plan.level_sets[1].slots,
        &[
            Some("barcelona"),
            Some("june 16th"),
            Some("accenture digital conference"),
            Some("accenture spain"),
            Some("key stakeholders"),
        ],
    );
}

#[test]
fn microblog_set_sizes_are_byte_exact() {
    let req = requirements(fixtures::SCENARIO_MICROBLOG);
    let corpus = fixtures::corpus();
    let tax = fixtures::taxonomy();
    let plan = sanitize(MICROBLOG_INPUT, &req, &corpus, &tax);
    let sizes: Vec<usize> = plan
        .level_sets
        .iter()
        .map(|s| encode_level_set(s).unwrap().len())
        .collect();
    assert_eq!(sizes, [24, 82]);
}

#[test]
fn microblog_preservation_percentages() {
    let req = requirements(fixtures::SCENARIO_MICROBLOG);
    let corpus = fixtures::corpus();
    let tax = fixtures::taxonomy();
    let plan = sanitize(MICROBLOG_INPUT, &req, &corpus, &tax);
    assert_eq!(plan.preservation(2), 100.0);
    assert!((plan.preservation(1) - 34.1).abs() <= 0.5, "{}", plan.preservation(1));
    assert!((plan.preservation(0) - 27.5).abs() <= 0.5, "{}", plan.preservation(0));
}

#[test]
fn preservation_is_monotone_in_level() {
    let corpus = fixtures::corpus();
    let tax = fixtures::taxonomy();
    for (pack, input) in [
        (fixtures::SCENARIO_HEALTHCARE, HEALTHCARE_INPUT),
        (fixtures::SCENARIO_MICROBLOG, MICROBLOG_INPUT),
    ] {
        let req = requirements(pack);
        let plan = sanitize(input, &req, &corpus, &tax);
        let mut prev = -1.0;
        for level in 0..req.n_levels() {
            let p = plan.preservation(level);
            assert!(p >= prev, "level {level}: {p} < {prev}");
            prev = p;
        }
    }
}

#[test]
fn debug_dump_lists_every_term() {
    let req = requirements(fixtures::SCENARIO_HEALTHCARE);
    let corpus = fixtures::corpus();
    let tax = fixtures::taxonomy();
    let plan = sanitize(HEALTHCARE_INPUT, &req, &corpus, &tax);
    let dump = plan.debug_dump();
    assert_eq!(dump.lines().count(), 13);
    assert!(dump.contains("\"HIV\""));
    assert!(dump.contains("S1=INFECTION"));
    assert!(dump.contains("S3=pharyngitis"));
}
