//! Ground-truth CSVs emitted by the simulator and consumed by evaluate:
//! `user_id,ability,activity` per user and `item_id,fitness,created_at` per
//! item.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserTruthRow {
    pub user_id: String,
    pub ability: f64,
    pub activity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemTruthRow {
    pub item_id: String,
    pub fitness: f64,
    pub created_at: u64,
}

fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), CliError> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    writer.write_record(header)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer
        .flush()
        .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))?;
    Ok(())
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    let mut reader = csv::Reader::from_reader(std::io::BufReader::new(file));
    reader
        .deserialize()
        .map(|row| row.map_err(CliError::from))
        .collect()
}

pub fn write_user_truth(path: &Path, rows: &[UserTruthRow]) -> Result<(), CliError> {
    write_csv(path, &["user_id", "ability", "activity"], rows)
}

pub fn read_user_truth(path: &Path) -> Result<Vec<UserTruthRow>, CliError> {
    read_csv(path)
}

pub fn write_item_truth(path: &Path, rows: &[ItemTruthRow]) -> Result<(), CliError> {
    write_csv(path, &["item_id", "fitness", "created_at"], rows)
}

pub fn read_item_truth(path: &Path) -> Result<Vec<ItemTruthRow>, CliError> {
    read_csv(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_files_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let users_path = dir.path().join("users.csv");
        let items_path = dir.path().join("items.csv");

        let users = vec![UserTruthRow {
            user_id: "0".into(),
            ability: 0.4,
            activity: 0.9,
        }];
        let items = vec![ItemTruthRow {
            item_id: "0".into(),
            fitness: 0.7,
            created_at: 12,
        }];
        write_user_truth(&users_path, &users).unwrap();
        write_item_truth(&items_path, &items).unwrap();

        assert!(std::fs::read_to_string(&users_path)
            .unwrap()
            .starts_with("user_id,ability,activity\n"));
        assert!(std::fs::read_to_string(&items_path)
            .unwrap()
            .starts_with("item_id,fitness,created_at\n"));
        assert_eq!(read_user_truth(&users_path).unwrap(), users);
        assert_eq!(read_item_truth(&items_path).unwrap(), items);
    }
}
