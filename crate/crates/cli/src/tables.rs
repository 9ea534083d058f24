//! The two degree tables, regenerated from the enumeration alone.

use fano::problem::{enumerate_fano_problems, FanoProblem, FanoType};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

/// Degree cap of the large table.
pub const LARGE_CAP: u64 = 75_000;
/// Largest degree in the small table.
pub const SMALL_MAX: u64 = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tables {
    /// Every problem of degree at most [`SMALL_MAX`].
    pub small: Vec<FanoProblem>,
    /// Non-enriched problems below [`LARGE_CAP`], minus lines on
    /// hypersurfaces of degree `2n − 3` (whose groups were already known).
    pub large: Vec<FanoProblem>,
}

/// `(1, n, (2n−3))`: lines on a hypersurface.
pub fn is_lines_on_hypersurface(t: &FanoType) -> bool {
    t.r() == 1 && t.degrees() == [2 * t.n() - 3]
}

pub fn tables() -> Tables {
    let all = enumerate_fano_problems(LARGE_CAP);
    let small_max = BigUint::from(SMALL_MAX);
    Tables {
        small: all.iter().filter(|p| p.degree <= small_max).cloned().collect(),
        large: all
            .iter()
            .filter(|p| !p.is_enriched() && !is_lines_on_hypersurface(&p.fano_type))
            .cloned()
            .collect(),
    }
}

pub fn format_row(p: &FanoProblem) -> String {
    let t = &p.fano_type;
    let ds: Vec<String> = t.degrees().iter().map(u32::to_string).collect();
    format!("{:>3} {:>4}  {:<14} {:>8}", t.r(), t.n(), format!("({})", ds.join(",")), p.degree)
}

pub fn format_tables(t: &Tables) -> String {
    let mut out = String::new();
    for (title, rows) in [("Fano problems of small degree", &t.small), ("Large Fano problems", &t.large)] {
        out.push_str(&format!("{title}\n  r    n  d               degree\n"));
        for p in rows {
            out.push_str(&format_row(p));
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
