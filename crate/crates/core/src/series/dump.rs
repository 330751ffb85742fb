//! Stable text dump of Laurent series for golden files and the CLI.
//!
//! One term per line: `z^j u^(a-vector) t^(m-vector) phi_k : num/den`,
//! with the u/t exponent tuples printed densely over sectors 0..d-1 and
//! omitted entirely when zero. Lines are sorted by (z-power, u-vector,
//! t-vector, sector).

use super::graded::StateVec;
use super::zseries::ZSeries;
use crate::rat::format_rat;

pub fn dump_zseries(zs: &ZSeries<StateVec>, d: u16) -> String {
    let mut rows: Vec<(i32, Vec<u32>, Vec<u32>, u16, String)> = Vec::new();
    for (j, g) in zs.iter() {
        for (idx, v) in g.terms() {
            for (k, c) in v.support() {
                rows.push((
                    *j,
                    idx.u.dense(d),
                    idx.t.dense(d),
                    *k,
                    format_rat(c),
                ));
            }
        }
    }
    rows.sort();
    let mut out = String::new();
    for (j, u, t, k, c) in rows {
        out.push_str(&format!("z^{j}"));
        if u.iter().any(|&e| e > 0) {
            out.push_str(&format!(
                " u^({})",
                u.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
            ));
        }
        if t.iter().any(|&e| e > 0) {
            out.push_str(&format!(
                " t^({})",
                t.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
            ));
        }
        out.push_str(&format!(" phi_{k} : {c}\n"));
    }
    out
}
