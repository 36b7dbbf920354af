//! Plain-text inference bases.
//!
//! ```text
//! # two coin models, observed x2
//!      x1   *x2   x3
//! θ1   1/2  1/4   1/4
//! θ2   1/3  1/3   1/3
//! ---
//! ```
//!
//! The header lists sample labels; exactly one carries a `*` prefix marking
//! the observed point. Each following line is a parameter label and one
//! probability per sample point (`p/q`, integer or decimal). `#` starts a
//! comment, and a line of `---` separates bases.

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, Scalar};

use super::InferenceBase;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

struct Pending {
    header_line: usize,
    samples: Vec<String>,
    observed: usize,
    thetas: Vec<String>,
    rows: Vec<Vec<Rational>>,
}

impl Pending {
    fn finish(self) -> Result<InferenceBase> {
        if self.rows.is_empty() {
            return Err(parse_err(self.header_line, "base has no parameter rows"));
        }
        InferenceBase::new(self.samples, self.thetas, self.rows, self.observed)
            .map_err(|e| parse_err(self.header_line, e.to_string()))
    }
}

pub fn parse_bases(text: &str) -> Result<Vec<InferenceBase>> {
    let mut out = Vec::new();
    let mut cur: Option<Pending> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "---" {
            if let Some(p) = cur.take() {
                out.push(p.finish()?);
            }
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match cur.as_mut() {
            None => {
                let starred: Vec<usize> = (0..tokens.len()).filter(|&k| tokens[k].starts_with('*')).collect();
                if starred.len() != 1 {
                    return Err(parse_err(line_no, "header must mark exactly one observed label with '*'"));
                }
                let samples: Vec<String> = tokens.iter().map(|t| t.trim_start_matches('*').to_string()).collect();
                if samples.iter().any(String::is_empty) {
                    return Err(parse_err(line_no, "empty sample label"));
                }
                cur = Some(Pending {
                    header_line: line_no,
                    samples,
                    observed: starred[0],
                    thetas: Vec::new(),
                    rows: Vec::new(),
                });
            }
            Some(p) => {
                if tokens.len() != p.samples.len() + 1 {
                    return Err(parse_err(
                        line_no,
                        format!(
                            "expected a label and {} probabilities, found {} fields",
                            p.samples.len(),
                            tokens.len()
                        ),
                    ));
                }
                let row = tokens[1..]
                    .iter()
                    .map(|t| parse_rational(t).ok_or_else(|| parse_err(line_no, format!("not a probability: {t}"))))
                    .collect::<Result<Vec<_>>>()?;
                p.thetas.push(tokens[0].to_string());
                p.rows.push(row);
            }
        }
    }
    if let Some(p) = cur {
        out.push(p.finish()?);
    }
    Ok(out)
}

pub fn format_base<S: Scalar>(base: &InferenceBase<S>) -> String {
    let lead = base.theta_labels().iter().map(|t| t.chars().count()).max().unwrap_or(0);
    let header: Vec<String> = base
        .sample_labels()
        .iter()
        .enumerate()
        .map(|(x, l)| if x == base.observed() { format!("*{l}") } else { l.clone() })
        .collect();
    let cells: Vec<Vec<String>> = base.probs().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|x| cells.iter().map(|r| r[x].chars().count()).chain([header[x].chars().count()]).max().unwrap_or(0))
        .collect();
    let mut s = format!("{:lead$}", "");
    for (h, w) in header.iter().zip(&widths) {
        s.push_str(&format!("  {h:>w$}"));
    }
    s.push('\n');
    for (t, row) in base.theta_labels().iter().zip(&cells) {
        s.push_str(&format!("{t:<lead$}"));
        for (c, w) in row.iter().zip(&widths) {
            s.push_str(&format!("  {c:>w$}"));
        }
        s.push('\n');
    }
    s
}

pub fn format_bases<S: Scalar>(bases: &[InferenceBase<S>]) -> String {
    bases.iter().map(format_base).collect::<Vec<_>>().join("---\n")
}
