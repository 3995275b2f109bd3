//! `key = value` config files spliced into the argument list.
//!
//! Every key names a long flag of the chosen subcommand. Config values are inserted right after
//! the subcommand name, so flags typed on the command line come later and win.

use std::ffi::OsString;
use std::fs;

use anyhow::{bail, Context, Result};

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!(
                "config line {}: expected `key = value`, found `{raw}`",
                k + 1
            );
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value
            .trim()
            .trim_matches('"')
            .split(',')
            .map(str::trim)
            .collect::<Vec<_>>()
            .join(",");
        if key.is_empty() {
            bail!("config line {}: empty key", k + 1);
        }
        out.push((key, value));
    }
    Ok(out)
}

/// Removes `--config PATH` from `args` and splices the file's flags in after the subcommand.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().context("--config needs a file path")?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = fs::read_to_string(&path)
        .with_context(|| format!("cannot read config file {}", path.to_string_lossy()))?;
    let mut injected = Vec::new();
    for (key, value) in parse(&text)? {
        match value.as_str() {
            "true" => injected.push(OsString::from(format!("--{key}"))),
            "false" => {}
            _ => {
                injected.push(OsString::from(format!("--{key}")));
                injected.push(OsString::from(value));
            }
        }
    }
    // the subcommand is the first argument after the program name that is not a flag
    let at = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 2)
        .unwrap_or(rest.len());
    rest.splice(at..at, injected);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_pairs_and_comments() {
        let pairs =
            parse("# plan\ndirections = 8\nscales=1.5, 2 # two\n\nrecord_timing = true\n").unwrap();
        assert_eq!(
            pairs,
            vec![
                ("directions".into(), "8".into()),
                ("scales".into(), "1.5,2".into()),
                ("record-timing".into(), "true".into()),
            ]
        );
        assert!(parse("oops").is_err());
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = std::env::temp_dir().join(format!("niph-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("run.conf");
        std::fs::write(&file, "dim = 1\ntiming = true\nquiet = false\n").unwrap();
        let args = os(&[
            "niph",
            "niph",
            "--config",
            file.to_str().unwrap(),
            "in.csv",
            "--dim",
            "0",
        ]);
        let out = expand(args).unwrap();
        assert_eq!(
            out,
            os(&["niph", "niph", "--dim", "1", "--timing", "in.csv", "--dim", "0"])
        );
        assert_eq!(
            expand(os(&["niph", "pca", "x.csv"])).unwrap(),
            os(&["niph", "pca", "x.csv"])
        );
    }
}
