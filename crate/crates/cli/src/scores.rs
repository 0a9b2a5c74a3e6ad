//! The scores file: one row per node, `class,id,score,rank`, grouped by
//! class with each class block sorted by rank.

use std::path::Path;

use serde::{Deserialize, Serialize};

use qrc_core::evaluation::top_k;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    /// Node class: "user", "item", or "author".
    pub class: String,
    pub id: String,
    pub score: f64,
    /// 1-based position within the class, best score first.
    pub rank: usize,
}

/// Rows for one class in rank order (descending score, ties by node index).
pub fn class_rows(
    class: &str,
    values: &[f64],
    label_of: impl Fn(usize) -> String,
) -> Vec<ScoreRow> {
    top_k(values, values.len())
        .ids
        .iter()
        .enumerate()
        .map(|(position, &node)| ScoreRow {
            class: class.to_string(),
            id: label_of(node),
            score: values[node],
            rank: position + 1,
        })
        .collect()
}

pub fn write_scores(path: &Path, rows: &[ScoreRow]) -> Result<(), CliError> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    writer.write_record(["class", "id", "score", "rank"])?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer
        .flush()
        .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))?;
    Ok(())
}

pub fn read_scores(path: &Path) -> Result<Vec<ScoreRow>, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    let mut reader = csv::Reader::from_reader(std::io::BufReader::new(file));
    reader
        .deserialize()
        .map(|row| row.map_err(CliError::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_ranked_and_roundtrip() {
        let labels = ["a", "b", "c"];
        let rows = class_rows("item", &[0.2, 0.9, 0.2], |i| labels[i].to_string());
        assert_eq!(rows[0].id, "b");
        assert_eq!(rows[0].rank, 1);
        assert_eq!(rows[1].id, "a"); // tie broken by node index
        assert_eq!(rows[2].id, "c");

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        write_scores(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("class,id,score,rank\n"));
        assert_eq!(read_scores(&path).unwrap(), rows);
    }

    #[test]
    fn empty_scores_still_have_a_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        write_scores(&path, &[]).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "class,id,score,rank\n"
        );
        assert!(read_scores(&path).unwrap().is_empty());
    }
}
