//! Line-oriented circuit text format.
//!
//! ```text
//! qubits 8
//! phase 0.250000000000
//! h q5
//! cnot q3 q7
//! rz q0 0.500000000000
//! matrix q0 q1 q4 cost 5
//! 1 0 0 0 ...
//! end
//! slot 0 2
//! ```
//!
//! `phase` is optional. A `matrix` block holds one matrix row per line as
//! `re im` pairs and is closed by `end`. `slot p g` binds parameter `p` to
//! the `g`-th gate. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

use super::{Circuit, Gate, GateKind};

/// Fixed 12-decimal form when it parses back to the same value, otherwise
/// the shortest exact representation.
fn fmt_real(x: f64) -> String {
    let fixed = format!("{x:.12}");
    if fixed.parse::<f64>().ok() == Some(x) {
        fixed
    } else {
        format!("{x:?}")
    }
}

pub fn export_text(c: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "qubits {}", c.n_qubits).unwrap();
    if c.global_phase != 0.0 {
        writeln!(out, "phase {}", fmt_real(c.global_phase)).unwrap();
    }
    for g in &c.gates {
        out.push_str(g.kind.name());
        for q in &g.targets {
            write!(out, " q{q}").unwrap();
        }
        for &p in &g.params {
            write!(out, " {}", fmt_real(p)).unwrap();
        }
        if let Some(m) = &g.matrix {
            if let Some(k) = g.decomposition_cost {
                write!(out, " cost {k}").unwrap();
            }
            out.push('\n');
            for r in 0..m.nrows() {
                let row: Vec<String> =
                    (0..m.ncols()).map(|col| format!("{:?} {:?}", m[(r, col)].re, m[(r, col)].im)).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
            out.push_str("end");
        }
        out.push('\n');
    }
    for &(p, g) in &c.slots {
        writeln!(out, "slot {p} {g}").unwrap();
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("bad number '{tok}'")))
}

pub fn parse_text(text: &str) -> Result<Circuit> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let n_qubits = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["qubits", n] => parse_num::<usize>(n, ln)?,
        _ => return Err(parse_err(ln, "expected 'qubits <n>'")),
    };
    let mut c = Circuit::new(n_qubits);

    while let Some((ln, line)) = lines.next() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "phase" if toks.len() == 2 => c.global_phase = parse_num(toks[1], ln)?,
            "slot" if toks.len() == 3 => c.slots.push((parse_num(toks[1], ln)?, parse_num(toks[2], ln)?)),
            name => {
                let kind = GateKind::from_name(name).ok_or_else(|| parse_err(ln, format!("unknown gate '{name}'")))?;
                let mut targets = Vec::new();
                let mut rest = &toks[1..];
                while let Some(q) = rest.first().and_then(|t| t.strip_prefix('q')) {
                    targets.push(parse_num::<usize>(q, ln)?);
                    rest = &rest[1..];
                }
                if kind == GateKind::MATRIX {
                    let cost = match rest {
                        [] => None,
                        ["cost", k] => Some(parse_num::<u32>(k, ln)?),
                        _ => return Err(parse_err(ln, "expected 'cost <k>' after matrix targets")),
                    };
                    let dim = 1usize << targets.len();
                    let mut m = CMatrix::zeros(dim, dim);
                    for r in 0..dim {
                        let (rl, row) = lines.next().ok_or_else(|| parse_err(ln, "unterminated matrix block"))?;
                        let vals: Vec<f64> = row.split_whitespace().map(|t| parse_num(t, rl)).collect::<Result<_>>()?;
                        if vals.len() != 2 * dim {
                            return Err(parse_err(rl, format!("expected {} numbers in matrix row", 2 * dim)));
                        }
                        for col in 0..dim {
                            m[(r, col)] = Complex64::new(vals[2 * col], vals[2 * col + 1]);
                        }
                    }
                    match lines.next() {
                        Some((_, "end")) => {}
                        Some((l, _)) => return Err(parse_err(l, "expected 'end'")),
                        None => return Err(parse_err(ln, "unterminated matrix block")),
                    }
                    c.push(Gate::matrix_gate(m, &targets, cost).map_err(|e| parse_err(ln, e.to_string()))?);
                } else {
                    if Some(targets.len()) != kind.arity() || rest.len() != kind.n_params() {
                        return Err(parse_err(ln, format!("wrong operand count for {name}")));
                    }
                    let params: Vec<f64> = rest.iter().map(|t| parse_num(t, ln)).collect::<Result<_>>()?;
                    c.push(Gate::new(kind, &targets, &params));
                }
            }
        }
    }
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{ansatz_agate, trotter_step, vacuum_circuit};
    use crate::lattice::LatticeSpec;

    #[test]
    fn line_formats() {
        let mut c = Circuit::new(8);
        c.push(Gate::cnot(3, 7));
        c.push(Gate::rz(0, 0.5));
        c.push(Gate::rx(1, 0.1 + 0.2));
        let text = export_text(&c);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "qubits 8");
        assert_eq!(lines[1], "cnot q3 q7");
        assert_eq!(lines[2], "rz q0 0.500000000000");
        assert_eq!(lines[3], "rx q1 0.30000000000000004");
    }

    #[test]
    fn round_trip_gate_for_gate() {
        let s = LatticeSpec::new(2, 2).unwrap();
        let mut c = vacuum_circuit(&s);
        c.extend(trotter_step(&s, 1.0, 2.0, 0.137));
        c.extend(ansatz_agate(&s, 1, &(0..16).map(|k| 0.1 * k as f64 - 0.7).collect::<Vec<_>>()).unwrap());
        c.global_phase = 0.25;
        let back = parse_text(&export_text(&c)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_text("").is_err());
        assert!(parse_text("qubits 2\nfoo q0").is_err());
        assert!(parse_text("qubits 2\ncnot q0").is_err());
        assert!(parse_text("qubits 2\ncnot q0 q5").is_err());
        assert!(parse_text("qubits 1\nmatrix q0\n1 0 0 0\n").is_err());
        assert!(matches!(parse_text("qubits 2\nrz q0 abc"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let c = parse_text("# header\nqubits 2\n\nh q0\n# mid\ncnot q0 q1\n").unwrap();
        assert_eq!(c.len(), 2);
    }
}
