//! Run manifests: a line-oriented key=value sidecar recording exactly how an
//! output was produced — tool version, full argument vector, seed, and a
//! digest of every input file. Deliberately free of timestamps and output
//! digests so that re-running the recorded command writes byte-identical
//! files, manifest included.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    pub tool: String,
    pub command: String,
    /// Argument vector after the binary name; `args[0]` is the subcommand.
    pub args: Vec<String>,
    pub seed: Option<u64>,
    /// (role, sha256 hex) per input file, sorted by role.
    pub inputs: Vec<(String, String)>,
}

/// Hex SHA-256 of a file's contents.
pub fn file_digest(path: &Path) -> Result<String, CliError> {
    let bytes =
        std::fs::read(path).map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        write!(hex, "{byte:02x}").expect("writing to a String cannot fail");
    }
    Ok(hex)
}

/// Write the manifest for one invocation. `inputs` pairs a short role name
/// ("events", "papers", ...) with the file that was read under that role.
pub fn write_manifest(
    path: &Path,
    command: &str,
    args: &[String],
    seed: Option<u64>,
    inputs: &[(&str, &Path)],
) -> Result<(), CliError> {
    let mut text = String::new();
    let _ = writeln!(text, "tool=qrc {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(text, "command={command}");
    for (index, arg) in args.iter().enumerate() {
        let _ = writeln!(text, "arg.{index}={arg}");
    }
    if let Some(seed) = seed {
        let _ = writeln!(text, "seed={seed}");
    }
    let mut digests: Vec<(&str, String)> = inputs
        .iter()
        .map(|(role, input)| file_digest(input).map(|d| (*role, d)))
        .collect::<Result<_, _>>()?;
    digests.sort_by_key(|(role, _)| *role);
    for (role, digest) in digests {
        let _ = writeln!(text, "input.{role}.sha256={digest}");
    }
    std::fs::write(path, text).map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}

/// Parse a manifest back, mainly so a run can be replayed from it.
pub fn read_manifest(path: &Path) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
    let mut manifest = Manifest::default();
    let mut indexed_args: Vec<(usize, String)> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Data(format!(
                "{}:{}: not a key=value line",
                path.display(),
                line_no + 1
            ))
        })?;
        match key {
            "tool" => manifest.tool = value.to_string(),
            "command" => manifest.command = value.to_string(),
            "seed" => {
                let seed = value.parse().map_err(|_| {
                    CliError::Data(format!("{}: bad seed {value:?}", path.display()))
                })?;
                manifest.seed = Some(seed);
            }
            _ => {
                if let Some(index) = key.strip_prefix("arg.") {
                    let index: usize = index.parse().map_err(|_| {
                        CliError::Data(format!("{}: bad argument key {key:?}", path.display()))
                    })?;
                    indexed_args.push((index, value.to_string()));
                } else if let Some(role) = key.strip_prefix("input.") {
                    let role = role.strip_suffix(".sha256").unwrap_or(role);
                    manifest.inputs.push((role.to_string(), value.to_string()));
                } else {
                    return Err(CliError::Data(format!(
                        "{}: unknown manifest key {key:?}",
                        path.display()
                    )));
                }
            }
        }
    }
    indexed_args.sort_by_key(|(index, _)| *index);
    manifest.args = indexed_args.into_iter().map(|(_, arg)| arg).collect();
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.csv");
        std::fs::write(&input, "a,b\n1,2\n").unwrap();
        let path = dir.path().join("manifest.txt");

        let args: Vec<String> = ["rank", "--algo", "qr", "--events", "in.csv"]
            .map(String::from)
            .into();
        write_manifest(
            &path,
            "rank",
            &args,
            Some(7),
            &[("events", input.as_path())],
        )
        .unwrap();

        let parsed = read_manifest(&path).unwrap();
        assert_eq!(parsed.command, "rank");
        assert_eq!(parsed.args, args);
        assert_eq!(parsed.seed, Some(7));
        assert_eq!(parsed.inputs.len(), 1);
        assert_eq!(parsed.inputs[0].0, "events");
        assert_eq!(parsed.inputs[0].1.len(), 64);

        // Same invocation, same bytes.
        let first = std::fs::read(&path).unwrap();
        write_manifest(
            &path,
            "rank",
            &args,
            Some(7),
            &[("events", input.as_path())],
        )
        .unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), first);
    }

    #[test]
    fn values_containing_equals_survive() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        let args: Vec<String> = ["sweep", "--vary", "lambda=0,0.5,1"]
            .map(String::from)
            .into();
        write_manifest(&path, "sweep", &args, None, &[]).unwrap();
        assert_eq!(read_manifest(&path).unwrap().args, args);
    }
}
