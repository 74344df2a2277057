//! Equation files: `rank N` on the first line, then one constant per line.
//! Blank lines and `#` comments are ignored; a line reading `1` is the
//! identity.

use anyhow::{anyhow, bail, Context, Result};
use metabel_core::{GroupWord, SphericalEquation};

pub fn parse(text: &str) -> Result<SphericalEquation> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (_, header) = lines.next().ok_or_else(|| anyhow!("empty equation file"))?;
    let rank = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["rank", n] => n.parse::<usize>().with_context(|| format!("bad rank `{n}`"))?,
        _ => bail!("expected `rank N` on the first line, found `{header}`"),
    };
    let mut constants = Vec::new();
    for (no, line) in lines {
        constants.push(parse_word(line, rank).with_context(|| format!("line {no}"))?);
    }
    Ok(SphericalEquation::new(rank, constants)?)
}

/// A word argument; `1` and the empty string both denote the identity.
pub fn parse_word(text: &str, rank: usize) -> Result<GroupWord> {
    let text = text.trim();
    if text == "1" {
        return Ok(GroupWord::identity(rank));
    }
    Ok(GroupWord::parse(text, rank)?)
}

pub fn format(eq: &SphericalEquation) -> String {
    let mut out = format!("rank {}\n", eq.rank());
    for c in eq.constants() {
        if c.is_empty() {
            out.push_str("1\n");
        } else {
            out.push_str(&format!("{c}\n"));
        }
    }
    out
}
