//! Line-oriented text form of scale assignments and selections.
//!
//! ```text
//! # group: Z
//! # q: 2
//! 0 : 1 3
//! 5 : 2 4
//! ```
//!
//! A selection lists `center scale : witness` per line under `# group:`,
//! `# eps:` and `# outcome:` headers.

use std::collections::BTreeMap;

use super::vitali::{CoveringOutcome, CoveringSelection, ScaleAssignment};
use crate::error::{Error, Result};
use crate::foelner::{format_subset, parse_subset};
use crate::group::{GroupElement, GroupKind};
use crate::rational::{format_exact, parse_rational, Rational};

pub fn write_assignment(group: GroupKind, a: &ScaleAssignment) -> String {
    let mut out = format!("# group: {group}\n# q: {}\n", a.q());
    for (c, scales) in a.iter() {
        let s: Vec<String> = scales.iter().map(usize::to_string).collect();
        out.push_str(&format!("{c} : {}\n", s.join(" ")));
    }
    out
}

pub fn parse_assignment(text: &str, horizon: usize) -> Result<(GroupKind, ScaleAssignment)> {
    let mut headers = Headers::default();
    let mut map = BTreeMap::new();
    for (i, line) in body_lines(text, &mut headers)? {
        let err = |msg: String| Error::Parse { line: i, msg };
        let group = headers.group.ok_or_else(|| err("missing '# group:' header".into()))?;
        let (c, rest) = line.split_once(':').ok_or_else(|| err("expected 'center : scales'".into()))?;
        let c = GroupElement::parse(group, c.trim()).map_err(|e| err(e.to_string()))?;
        let scales = rest
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| err(format!("bad scale {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        map.insert(c, scales);
    }
    let group = headers.group.ok_or(Error::Parse { line: 0, msg: "missing '# group:' header".into() })?;
    let q = headers.q.ok_or(Error::Parse { line: 0, msg: "missing '# q:' header".into() })?;
    Ok((group, ScaleAssignment::new(map, q, horizon)?))
}

pub fn write_selection(sel: &CoveringSelection) -> String {
    let mut out = format!("# group: {}\n# eps: {}\n# outcome: {}\n", sel.group, format_exact(&sel.eps), sel.outcome);
    for (i, (d, n)) in sel.pairs.iter().enumerate() {
        let w = sel.witnesses.get(i).map(format_subset).unwrap_or_default();
        out.push_str(&format!("{d} {n} : {w}\n"));
    }
    out
}

pub fn parse_selection(text: &str) -> Result<CoveringSelection> {
    let mut headers = Headers::default();
    let lines = body_lines(text, &mut headers)?;
    let group = headers.group.ok_or(Error::Parse { line: 0, msg: "missing '# group:' header".into() })?;
    let eps = headers.eps.ok_or(Error::Parse { line: 0, msg: "missing '# eps:' header".into() })?;
    let mut sel = CoveringSelection::empty(group, eps);
    sel.outcome = headers.outcome.unwrap_or(CoveringOutcome::Covering);
    for (i, line) in lines {
        let err = |msg: String| Error::Parse { line: i, msg };
        let (head, w) = line.split_once(':').ok_or_else(|| err("expected 'center scale : witness'".into()))?;
        let mut parts = head.split_whitespace();
        let (Some(d), Some(n), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err("expected 'center scale'".into()));
        };
        let d = GroupElement::parse(group, d).map_err(|e| err(e.to_string()))?;
        let n = n.parse::<usize>().map_err(|_| err(format!("bad scale {n:?}")))?;
        sel.pairs.push((d, n));
        sel.witnesses.push(parse_subset(group, w).map_err(err)?);
    }
    Ok(sel)
}

#[derive(Default)]
struct Headers {
    group: Option<GroupKind>,
    q: Option<usize>,
    eps: Option<Rational>,
    outcome: Option<CoveringOutcome>,
}

fn body_lines<'a>(text: &'a str, h: &mut Headers) -> Result<Vec<(usize, &'a str)>> {
    let mut body = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        if let Some(rest) = line.strip_prefix('#') {
            let Some((key, value)) = rest.split_once(':') else { continue };
            let value = value.trim();
            match key.trim() {
                "group" => h.group = Some(value.parse().map_err(|e: Error| err(e.to_string()))?),
                "q" => h.q = Some(value.parse().map_err(|_| err(format!("bad q {value:?}")))?),
                "eps" => h.eps = Some(parse_rational(value).map_err(|e| err(e.to_string()))?),
                "outcome" => {
                    h.outcome = Some(match value {
                        "expansive" => CoveringOutcome::Expansive,
                        "covering" => CoveringOutcome::Covering,
                        "postcondition-failed" => CoveringOutcome::PostconditionFailed,
                        other => return Err(err(format!("unknown outcome {other:?}"))),
                    })
                }
                _ => {}
            }
            continue;
        }
        if !line.is_empty() {
            body.push((i + 1, line));
        }
    }
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteSubset;

    #[test]
    fn assignment_round_trip() {
        let text = "# group: Z\n# q: 2\n-3 : 1 3\n5 : 2 4\n";
        let (g, a) = parse_assignment(text, 4).unwrap();
        assert_eq!(write_assignment(g, &a), text);
        assert!(parse_assignment("# group: Z\n# q: 2\n0 : 1\n", 4).is_err());
    }

    #[test]
    fn selection_round_trip() {
        let mut sel = CoveringSelection::empty(GroupKind::Heisenberg, Rational::new(1, 4));
        sel.pairs.push((GroupElement::heis(1, 0, 0), 2));
        sel.witnesses.push(FiniteSubset::singleton(GroupElement::heis(1, 0, 0)));
        let text = write_selection(&sel);
        let back = parse_selection(&text).unwrap();
        assert_eq!(back.pairs, sel.pairs);
        assert_eq!(back.witnesses, sel.witnesses);
        assert_eq!(write_selection(&back), text);
    }
}
