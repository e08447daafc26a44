//! Seeded synthetic `teachers` table.
//!
//! Columns are `Teacher_Id, State, School_Type, Name`. Ids run from 1. For
//! each row the generator draws, in order, a state, a school type, a first
//! name and a surname, each as `next_u64() % len` from xoshiro256** seeded
//! with `seed_from_u64(seed)`. The file uses LF line endings.

use std::io::Write;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use genmr_sql::{Row, Schema, TableData};

pub const COLUMNS: [&str; 4] = ["Teacher_Id", "State", "School_Type", "Name"];

pub const STATES: [&str; 10] = [
    "Andhra Pradesh",
    "Kerala",
    "Tamil Nadu",
    "Karnataka",
    "Maharashtra",
    "Gujarat",
    "Rajasthan",
    "Punjab",
    "Bihar",
    "Odisha",
];

pub const SCHOOL_TYPES: [&str; 2] = ["Secondary School", "Primary School"];

const FIRST_NAMES: [&str; 12] = [
    "Anil", "Bhavna", "Chitra", "Deepak", "Farah", "Gopal", "Indira", "Kiran", "Lakshmi", "Mohan",
    "Nisha", "Ravi",
];

const SURNAMES: [&str; 8] = [
    "Rao", "Nair", "Iyer", "Patil", "Shah", "Singh", "Das", "Reddy",
];

fn pick<'a>(rng: &mut Xoshiro256StarStar, items: &[&'a str]) -> &'a str {
    items[(rng.next_u64() % items.len() as u64) as usize]
}

pub fn rows(seed: u64, count: usize) -> Vec<Row> {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    (1..=count)
        .map(|id| {
            let state = pick(&mut rng, &STATES);
            let kind = pick(&mut rng, &SCHOOL_TYPES);
            let name = format!(
                "{} {}",
                pick(&mut rng, &FIRST_NAMES),
                pick(&mut rng, &SURNAMES)
            );
            vec![id.to_string(), state.to_string(), kind.to_string(), name]
        })
        .collect()
}

/// The fixture as an in-memory table named `teachers`.
pub fn table(seed: u64, count: usize) -> TableData {
    let schema = Schema::new("teachers", COLUMNS.map(String::from).to_vec())
        .expect("fixed columns are unique");
    TableData::new(schema, rows(seed, count)).expect("rows match the schema")
}

pub fn write_csv<W: Write>(out: W, seed: u64, count: usize) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows(seed, count) {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(seed: u64, count: usize) -> String {
        let mut buf = Vec::new();
        write_csv(&mut buf, seed, count).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn line_counts() {
        assert_eq!(render(42, 325).lines().count(), 326);
        assert_eq!(render(42, 0), "Teacher_Id,State,School_Type,Name\n");
    }

    #[test]
    fn same_seed_same_bytes() {
        assert_eq!(render(42, 50), render(42, 50));
        assert_ne!(render(42, 50), render(43, 50));
    }

    #[test]
    fn values_come_from_the_lists() {
        let t = table(42, 325);
        assert!(t.rows().iter().all(|r| STATES.contains(&r[1].as_str())));
        assert!(t
            .rows()
            .iter()
            .all(|r| SCHOOL_TYPES.contains(&r[2].as_str())));
        assert!(t.rows().iter().any(|r| r[1] == "Andhra Pradesh"));
        assert_eq!(t.rows()[324][0], "325");
    }

    #[test]
    fn csv_round_trips() {
        let text = render(7, 30);
        let t = genmr_sql::read_csv(text.as_bytes(), "teachers").unwrap();
        assert_eq!(t, table(7, 30));
    }
}
