//! Text formats for dialogues, strategies and interaction transcripts.
//!
//! One move per line:
//!
//! ```text
//! j: (a) branch=i imports=[T1;...;Tk] [by=WHO]
//! ```
//!
//! `j` is the 1-based position, `a` the back-reference and `WHO` an optional
//! tag naming the emitter (transcripts only). Blank lines and `---` separate
//! dialogues in a strategy file; `#` starts a comment.

use std::collections::BTreeSet;

use crate::dialogue::{Dialogue, Move};
use crate::error::{Error, Result};
use crate::transition::Label;
use crate::types::TypeExpr;

pub fn write_move(j: usize, m: &Move, by: Option<&str>) -> String {
    let imports: Vec<String> = m.label.imports.iter().map(|t| t.to_string()).collect();
    let mut line = format!(
        "{j}: ({}) branch={} imports=[{}]",
        m.back_ref,
        m.label.branch,
        imports.join(";")
    );
    if let Some(by) = by {
        line.push_str(" by=");
        line.push_str(by);
    }
    line
}

/// Serialize a dialogue, optionally tagging each move with its emitter.
pub fn write_dialogue(d: &Dialogue, by: Option<&[&str]>) -> String {
    let mut out = String::new();
    for (k, m) in d.moves.iter().enumerate() {
        out.push_str(&write_move(k + 1, m, by.map(|b| b[k])));
        out.push('\n');
    }
    out
}

fn format_error(line_no: usize, msg: impl std::fmt::Display) -> Error {
    Error::Format(format!("line {line_no}: {msg}"))
}

/// Parse one move line into its position, move and optional emitter tag.
pub fn parse_move(line: &str, line_no: usize) -> Result<(usize, Move, Option<String>)> {
    let (pos, rest) = line.split_once(':').ok_or_else(|| format_error(line_no, "missing `:`"))?;
    let pos: usize = pos.trim().parse().map_err(|_| format_error(line_no, "bad position"))?;
    let rest = rest.trim_start();
    let rest = rest.strip_prefix('(').ok_or_else(|| format_error(line_no, "expected `(`"))?;
    let (back, rest) = rest.split_once(')').ok_or_else(|| format_error(line_no, "expected `)`"))?;
    let back_ref: usize = back.trim().parse().map_err(|_| format_error(line_no, "bad back-reference"))?;
    let rest = rest.trim_start();
    let rest = rest.strip_prefix("branch=").ok_or_else(|| format_error(line_no, "expected `branch=`"))?;
    let (branch, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    let branch: usize = branch.parse().map_err(|_| format_error(line_no, "bad branch"))?;
    if branch == 0 {
        return Err(format_error(line_no, "branch must be positive"));
    }
    let rest = rest.trim_start();
    let (imports, rest) = match rest.strip_prefix("imports=[") {
        Some(r) => {
            let (inner, tail) = r.split_once(']').ok_or_else(|| format_error(line_no, "expected `]`"))?;
            let imports = inner
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| TypeExpr::parse(s).map_err(|e| format_error(line_no, e)))
                .collect::<Result<Vec<_>>>()?;
            (imports, tail)
        }
        None => (Vec::new(), rest),
    };
    let rest = rest.trim();
    let by = if rest.is_empty() {
        None
    } else {
        let tag = rest.strip_prefix("by=").ok_or_else(|| format_error(line_no, "unexpected trailing text"))?;
        Some(tag.to_string())
    };
    Ok((pos, Move::new(back_ref, Label::new(branch, imports)), by))
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parse a list of dialogues separated by blank lines or `---`.
pub fn parse_dialogues(text: &str) -> Result<Vec<(Dialogue, Vec<Option<String>>)>> {
    let mut out = Vec::new();
    let mut current = Dialogue::default();
    let mut tags = Vec::new();
    let mut flush = |d: &mut Dialogue, tags: &mut Vec<Option<String>>| {
        if !d.is_empty() {
            out.push((std::mem::take(d), std::mem::take(tags)));
        }
    };
    for (k, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() || line == "---" {
            flush(&mut current, &mut tags);
            continue;
        }
        let (pos, m, by) = parse_move(line, k + 1)?;
        if pos != current.len() + 1 {
            return Err(format_error(k + 1, format!("expected position {}", current.len() + 1)));
        }
        current.moves.push(m);
        tags.push(by);
    }
    flush(&mut current, &mut tags);
    Ok(out)
}

/// Parse a single dialogue; an empty file is the empty dialogue.
pub fn parse_dialogue(text: &str) -> Result<Dialogue> {
    let mut all = parse_dialogues(text)?;
    match all.len() {
        0 => Ok(Dialogue::default()),
        1 => Ok(all.remove(0).0),
        n => Err(Error::Format(format!("expected one dialogue, found {n}"))),
    }
}

/// Parse a strategy file and rebuild the prefix closure of its plays.
pub fn parse_strategy_plays(text: &str) -> Result<BTreeSet<Dialogue>> {
    let mut plays = BTreeSet::new();
    plays.insert(Dialogue::default());
    for (d, _) in parse_dialogues(text)? {
        for n in 1..=d.len() {
            plays.insert(d.prefix(n));
        }
    }
    Ok(plays)
}

/// Serialize maximal plays separated by `---`.
pub fn write_plays<'a>(plays: impl IntoIterator<Item = &'a Dialogue>) -> String {
    plays
        .into_iter()
        .map(|d| write_dialogue(d, None))
        .collect::<Vec<_>>()
        .join("---\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn move_lines_round_trip() {
        let m = Move::new(
            1,
            Label::new(2, vec![TypeExpr::parse("forall Y. Y").unwrap(), TypeExpr::parse("Z -> Z").unwrap()]),
        );
        let line = write_move(2, &m, Some("sigma"));
        assert_eq!(line, "2: (1) branch=2 imports=[forall Y. Y;Z -> Z] by=sigma");
        let (pos, back, by) = parse_move(&line, 1).unwrap();
        assert_eq!((pos, back, by.as_deref()), (2, m, Some("sigma")));
    }

    #[test]
    fn strategy_files_rebuild_prefixes() {
        let text = "# tau_1\n1: (0) branch=1 imports=[]\n2: (1) branch=2 imports=[]\n---\n\
                    1: (0) branch=1 imports=[]\n2: (1) branch=2 imports=[]\n3: (2) branch=1 imports=[]\n4: (1) branch=1 imports=[]\n";
        let plays = parse_strategy_plays(text).unwrap();
        assert_eq!(plays.len(), 5);
        assert!(parse_dialogue("1: (0) branch=0 imports=[]").is_err());
        assert!(parse_dialogue("2: (0) branch=1 imports=[]").is_err());
        assert_eq!(parse_dialogue("").unwrap(), Dialogue::default());
    }
}
