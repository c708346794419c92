//! Rewrites per-edition flags into a form clap can parse.
//!
//! `--edges-en a.tsv` becomes `--edges en=a.tsv`, and likewise for
//! `--corpus-<edition>` and the `--flag=value` spelling.

const PER_EDITION: [&str; 2] = ["edges", "corpus"];

pub fn expand(args: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.into_iter().peekable();
    while let Some(arg) = it.next() {
        let Some(rest) = arg.strip_prefix("--") else {
            out.push(arg);
            continue;
        };
        let hit = PER_EDITION.iter().find_map(|flag| {
            let tail = rest.strip_prefix(flag)?.strip_prefix('-')?;
            Some((*flag, tail))
        });
        let Some((flag, tail)) = hit else {
            out.push(arg);
            continue;
        };
        let (edition, value) = match tail.split_once('=') {
            Some((ed, v)) => (ed.to_string(), Some(v.to_string())),
            None => (tail.to_string(), None),
        };
        let value = value.or_else(|| it.next());
        out.push(format!("--{flag}"));
        out.push(format!("{edition}={}", value.unwrap_or_default()));
    }
    out
}

/// Parses `edition=path`.
pub fn edition_path(s: &str) -> Result<(String, std::path::PathBuf), String> {
    match s.split_once('=') {
        Some((ed, p)) if !ed.is_empty() && !p.is_empty() => Ok((ed.to_string(), p.into())),
        _ => Err(format!("expected EDITION=PATH, got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Vec<String> {
        expand(args.iter().map(|s| s.to_string()))
    }

    #[test]
    fn rewrites_per_edition_flags() {
        assert_eq!(
            run(&["analyze", "--edges-en", "e.tsv", "--corpus-de=c.jsonl", "--seed", "3"]),
            ["analyze", "--edges", "en=e.tsv", "--corpus", "de=c.jsonl", "--seed", "3"]
        );
    }

    #[test]
    fn leaves_other_flags_alone() {
        assert_eq!(run(&["--edges", "en=x", "--editions", "en,de"]), ["--edges", "en=x", "--editions", "en,de"]);
    }

    #[test]
    fn edition_path_parsing() {
        assert_eq!(edition_path("en=a/b.tsv").unwrap(), ("en".to_string(), "a/b.tsv".into()));
        assert!(edition_path("en=").is_err());
        assert!(edition_path("x").is_err());
    }
}
