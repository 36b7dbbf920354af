//! `rbel principles enumerate|check`.

use std::path::Path;

use rbel::principles::{
    enumerate_universe, format_bases, parse_bases, related_c_with, related_l, related_s, verify_birnbaum, UnionFind,
    UniverseCaps,
};

use crate::error::{numeric, CliError, CliResult};
use crate::output::csv_string;
use crate::paradox::birnbaum_table;

pub const PAIRS_HEADER: [&str; 6] = ["i", "j", "S", "C", "L", "closure"];

/// Every inference base within the caps, in the text format.
pub fn enumerate(caps: UniverseCaps) -> CliResult<String> {
    let universe = enumerate_universe(caps).map_err(|e| CliError::config("--max-samples", e))?;
    Ok(format_bases(&universe))
}

/// Pairwise relations between the bases in `input`, or the universe report
/// when no input is given.
pub fn check(input: Option<&Path>, relabel: bool, caps: UniverseCaps) -> CliResult<String> {
    let Some(path) = input else {
        let report = verify_birnbaum(caps).map_err(|e| CliError::config("--max-samples", e))?;
        return birnbaum_table(&report).render();
    };
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::config("--input", format!("{}: {e}", path.display())))?;
    let bases = parse_bases(&text).map_err(|e| CliError::config("--input", e))?;
    let mut rows = Vec::new();
    let mut uf = UnionFind::new(bases.len());
    for i in 0..bases.len() {
        for j in 0..bases.len() {
            if i == j {
                continue;
            }
            let (a, b) = (&bases[i], &bases[j]);
            let s = related_s(a, b).map_err(numeric("related_s"))?.is_some();
            let c = related_c_with(a, b, relabel).map_err(numeric("related_c"))?.is_some();
            let l = related_l(a, b).map_err(numeric("related_l"))?.is_some();
            if s || c {
                uf.union(i, j);
            }
            rows.push((i, j, s, c, l));
        }
    }
    let rows: Vec<Vec<String>> = rows
        .into_iter()
        .map(|(i, j, s, c, l)| {
            [
                i.to_string(),
                j.to_string(),
                s.to_string(),
                c.to_string(),
                l.to_string(),
                (uf.find(i) == uf.find(j)).to_string(),
            ]
            .to_vec()
        })
        .collect();
    Ok(csv_string(&PAIRS_HEADER, &rows)?)
}
