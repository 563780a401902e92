//! Constraint family files.
//!
//! ```text
//! cut <pair-id> <node> <node> ...   # x(delta(S)) + z_pair >= 1
//! xzero <edge-id>
//! zzero <pair-id>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::CutConstraint;
use crate::error::{Error, Result};
use crate::instances::io::{content_lines, read_text, write_text};
use crate::instances::PcsfInstance;

pub fn parse_family(text: &str, inst: &PcsfInstance) -> Result<Vec<CutConstraint>> {
    let mut family = Vec::new();
    for (line, tokens) in content_lines(text) {
        let bad = |msg: String| Error::Parse(format!("line {line}: {msg}"));
        let index = |tok: &str| tok.parse::<usize>().map_err(|_| bad(format!("bad index {tok:?}")));
        let c = match (tokens[0], tokens.len()) {
            ("cut", n) if n >= 3 => {
                let pair = index(tokens[1])?;
                let side = tokens[2..]
                    .iter()
                    .map(|name| inst.node_index(name).ok_or_else(|| bad(format!("unknown node {name:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                CutConstraint::cut(inst, pair, side).map_err(|e| bad(e.to_string()))?
            }
            ("xzero", 2) => CutConstraint::NonnegX(index(tokens[1])?),
            ("zzero", 2) => CutConstraint::NonnegZ(index(tokens[1])?),
            _ => return Err(bad(format!("malformed line {:?}", tokens.join(" ")))),
        };
        c.validate(inst).map_err(|e| bad(e.to_string()))?;
        family.push(c);
    }
    Ok(family)
}

pub fn format_family(family: &[CutConstraint], inst: &PcsfInstance) -> String {
    let mut out = String::new();
    for c in family {
        match c {
            CutConstraint::Cut { pair, side } => {
                let names: Vec<&str> = side.iter().map(|&v| inst.node_names[v].as_str()).collect();
                writeln!(out, "cut {pair} {}", names.join(" ")).unwrap();
            }
            CutConstraint::NonnegX(e) => writeln!(out, "xzero {e}").unwrap(),
            CutConstraint::NonnegZ(i) => writeln!(out, "zzero {i}").unwrap(),
        }
    }
    out
}

pub fn read_family(path: &Path, inst: &PcsfInstance) -> Result<Vec<CutConstraint>> {
    parse_family(&read_text(path)?, inst)
}

pub fn write_family(family: &[CutConstraint], inst: &PcsfInstance, path: &Path) -> Result<()> {
    write_text(path, &format_family(family, inst))
}
