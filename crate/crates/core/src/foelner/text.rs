//! Line-oriented text form of sequences.
//!
//! ```text
//! # group: Z
//! 0..3
//! -2..2 5 9..12
//! ```
//!
//! One set per line. Subsets of ℤ are written as sorted runs `a..b` or
//! singletons `a`; other groups list elements as `(x,y,...)` tokens.

use super::sequence::{FoelnerSequence, Provenance};
use crate::error::{Error, Result};
use crate::group::{FiniteSubset, GroupElement, GroupKind, RunList};

pub fn format_subset(s: &FiniteSubset) -> String {
    match s.to_runlist() {
        Some(r) => r
            .runs()
            .iter()
            .map(|&(a, b)| if a == b { a.to_string() } else { format!("{a}..{b}") })
            .collect::<Vec<_>>()
            .join(" "),
        None => s.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" "),
    }
}

pub fn parse_subset(group: GroupKind, line: &str) -> std::result::Result<FiniteSubset, String> {
    let tokens = line.split_whitespace();
    if group == GroupKind::Integers {
        let mut runs = Vec::new();
        for t in tokens {
            let run = match t.split_once("..") {
                Some((a, b)) => (int(a)?, int(b)?),
                None => {
                    let x = int(t)?;
                    (x, x)
                }
            };
            if run.0 > run.1 {
                return Err(format!("decreasing run {t:?}"));
            }
            runs.push(run);
        }
        return Ok(FiniteSubset::from_runs(RunList::from_runs(runs)));
    }
    let elements = tokens
        .map(|t| GroupElement::parse(group, t).map_err(|e| e.to_string()))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    FiniteSubset::from_elements(group, elements).map_err(|e| e.to_string())
}

fn int(s: &str) -> std::result::Result<i64, String> {
    s.parse::<i64>().map_err(|_| format!("bad integer {s:?}"))
}

pub fn write_sequence(seq: &FoelnerSequence) -> String {
    let mut out = format!("# group: {}\n", seq.group());
    for s in seq.sets() {
        out.push_str(&format_subset(s));
        out.push('\n');
    }
    out
}

pub fn parse_sequence(text: &str) -> Result<FoelnerSequence> {
    let mut group = None;
    let mut sets = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(g) = rest.trim().strip_prefix("group:") {
                group = Some(g.trim().parse::<GroupKind>().map_err(|e| err(e.to_string()))?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let g = group.ok_or_else(|| err("missing '# group:' header".into()))?;
        sets.push(parse_subset(g, line).map_err(err)?);
    }
    let g = group.ok_or(Error::Parse { line: 0, msg: "missing '# group:' header".into() })?;
    FoelnerSequence::new(g, sets, Provenance::Explicit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foelner::sequence::BuiltinKind;

    #[test]
    fn integer_round_trip() {
        let text = "# group: Z\n0..3\n-2..2 5 9..12\n";
        let seq = parse_sequence(text).unwrap();
        assert_eq!(seq.get(2).unwrap().len(), 10);
        assert_eq!(write_sequence(&seq), text);
    }

    #[test]
    fn heisenberg_round_trip() {
        let seq = FoelnerSequence::builtin(BuiltinKind::HeisenbergBalls, 2).unwrap();
        let back = parse_sequence(&write_sequence(&seq)).unwrap();
        assert_eq!(back.sets(), seq.sets());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_sequence("# group: Z\n0..3\n4..x\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(parse_sequence("0..3\n").is_err());
        assert!(parse_sequence("# group: Z\n5..2\n").is_err());
    }
}
