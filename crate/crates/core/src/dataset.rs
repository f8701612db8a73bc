//! Seeded period-tracking dataset.
//!
//! `User` 1:1 `Profile`, `User` 1:n `Cycle`, `Cycle` n:m `Symptom`. Every
//! record count grows linearly with the number of users, and the same
//! `(n_users, seed)` always yields the same store.

use datamin_reduce::{ScalarValue, Timestamp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::store::{DataSource, Record};

/// SDL matching the generated store.
pub const PERIOD_SCHEMA: &str = include_str!("../assets/period.graphql");
/// Example role policy for [`PERIOD_SCHEMA`].
pub const PERIOD_POLICY: &str = include_str!("../assets/period.policy");
/// One root field per benchmark variant, all over the `Symptom` table.
pub const BENCH_SCHEMA: &str = include_str!("../assets/bench.graphql");
/// Policy granting the `bench` role every reduction in [`BENCH_SCHEMA`].
pub const BENCH_POLICY: &str = include_str!("../assets/bench.policy");

/// Root fields of [`BENCH_SCHEMA`], in variant order.
pub const BENCH_ROOTS: [&str; 5] = ["baseline", "noop", "generalize", "noise", "hash"];

const FIRST_NAMES: &[&str] = &[
    "Johanna", "Amira", "Lena", "Sofia", "Maya", "Elif", "Hannah", "Noor", "Clara", "Yuki", "Ines", "Zoe",
    "Marta", "Aylin", "Frieda", "Leonie",
];
const LAST_NAMES: &[&str] = &[
    "Weber", "Okafor", "Schmidt", "Nguyen", "Kowalski", "Yilmaz", "Rossi", "Fischer", "Haddad", "Larsen",
    "Moreau", "Tanaka",
];
const CITIES: &[&str] = &[
    "Berlin", "Hamburg", "Leipzig", "Cologne", "Munich", "Dresden", "Bremen",
];
const MOODS: &[&str] = &[
    "calm",
    "irritable",
    "tired",
    "energetic",
    "anxious",
    "content",
    "low",
];

const DAY: i64 = 86_400;
// 2024-01-01T00:00:00Z
const REFERENCE: i64 = 1_704_067_200;

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &[&'a str]) -> &'a str {
    xs[rng.random_range(0..xs.len())]
}

fn date(secs: i64) -> ScalarValue {
    ScalarValue::Date(Timestamp::from_unix(secs).expect("generated dates are in range"))
}

fn record(pairs: Vec<(&str, ScalarValue)>) -> Record {
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

/// Builds the period-tracking store with root bindings for both
/// [`PERIOD_SCHEMA`] and [`BENCH_SCHEMA`].
///
/// # Panics
///
/// If `n_users` is zero.
pub fn generate_dataset(n_users: usize, seed: u64) -> DataSource {
    assert!(n_users >= 1, "dataset needs at least one user");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ds = DataSource::new();
    for t in ["User", "Profile", "Cycle", "Symptom"] {
        ds.add_table(t);
    }
    for (from, field, to) in [
        ("User", "profile", "Profile"),
        ("User", "cycles", "Cycle"),
        ("Profile", "user", "User"),
        ("Cycle", "user", "User"),
        ("Cycle", "symptoms", "Symptom"),
        ("Symptom", "cycles", "Cycle"),
    ] {
        ds.add_relation(from, field, to).expect("tables exist");
    }

    let (mut n_cycles, mut n_symptoms) = (0usize, 0usize);
    for u in 0..n_users {
        let first = pick(&mut rng, FIRST_NAMES);
        let last = pick(&mut rng, LAST_NAMES);
        let birth = REFERENCE - rng.random_range(18 * 365..50 * 365) * DAY - rng.random_range(0..DAY);
        let age = (REFERENCE - birth) / (365 * DAY + DAY / 4);
        let user = ds
            .insert(
                "User",
                record(vec![
                    ("id", format!("u{u}").into()),
                    ("name", format!("{first} {last}").into()),
                    (
                        "email",
                        format!("{}.{}{u}@example.org", first.to_lowercase(), last.to_lowercase()).into(),
                    ),
                    ("birthDate", date(birth)),
                ]),
            )
            .expect("table exists");
        let profile = ds
            .insert(
                "Profile",
                record(vec![
                    ("id", format!("p{u}").into()),
                    ("age", ScalarValue::Int(age)),
                    ("city", pick(&mut rng, CITIES).into()),
                    (
                        "heightCm",
                        ScalarValue::Float((rng.random_range(1500..1850) as f64) / 10.0),
                    ),
                ]),
            )
            .expect("table exists");
        ds.link("User", "profile", user, profile).expect("valid link");
        ds.link("Profile", "user", profile, user).expect("valid link");

        let mut start = REFERENCE - rng.random_range(200..700) * DAY;
        let mut previous_tail: Option<usize> = None;
        for _ in 0..rng.random_range(1..=6) {
            let length = rng.random_range(21..=35i64);
            let cycle = ds
                .insert(
                    "Cycle",
                    record(vec![
                        ("id", format!("c{n_cycles}").into()),
                        ("startDate", date(start)),
                        ("lengthDays", ScalarValue::Int(length)),
                    ]),
                )
                .expect("table exists");
            n_cycles += 1;
            ds.link("User", "cycles", user, cycle).expect("valid link");
            ds.link("Cycle", "user", cycle, user).expect("valid link");

            // A symptom logged at the end of one cycle also counts towards
            // the next one, which makes Cycle <-> Symptom n:m.
            if let Some(s) = previous_tail.take() {
                ds.link("Cycle", "symptoms", cycle, s).expect("valid link");
                ds.link("Symptom", "cycles", s, cycle).expect("valid link");
            }
            let count = rng.random_range(0..=4);
            for k in 0..count {
                let at = start + rng.random_range(0..length * DAY);
                let pain = (rng.random_range(0.0..=10.0f64) * 10.0).round() / 10.0;
                let symptom = ds
                    .insert(
                        "Symptom",
                        record(vec![
                            ("id", format!("s{n_symptoms}").into()),
                            ("pain", ScalarValue::Float(pain)),
                            ("mood", pick(&mut rng, MOODS).into()),
                            ("recordedAt", date(at)),
                        ]),
                    )
                    .expect("table exists");
                n_symptoms += 1;
                ds.link("Cycle", "symptoms", cycle, symptom).expect("valid link");
                ds.link("Symptom", "cycles", symptom, cycle).expect("valid link");
                if k + 1 == count && rng.random_bool(0.3) {
                    previous_tail = Some(symptom);
                }
            }
            start += length * DAY;
        }
    }

    for (field, table) in [
        ("users", "User"),
        ("profiles", "Profile"),
        ("cycles", "Cycle"),
        ("symptoms", "Symptom"),
    ] {
        ds.bind_root(field, table).expect("table exists");
    }
    for field in BENCH_ROOTS {
        ds.bind_root(field, "Symptom").expect("table exists");
    }
    ds
}
