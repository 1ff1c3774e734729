//! The fixed list of potentials the verification suites run over.

use gsek::{parse, Potential, Result};

/// Bumped whenever the list below changes, so reports stay comparable.
pub const FAMILY_VERSION: &str = "standard-family/1";

const COMMON: [&str; 6] = ["ball:1,1", "const:1", "ball:1,0.5", "ball:1,2", "dilate:0.25(ball:1,1)", "dilate:4(ball:1,1)"];
const ONLY_3D: [&str; 2] = ["cyl3:1", "cyl3:10"];

/// A family member: its DSL source and the parsed potential.
#[derive(Debug, Clone)]
pub struct Member {
    pub dsl: &'static str,
    pub potential: Potential,
}

/// Members of the standard family in dimension `dim`.
pub fn standard_family(dim: usize) -> Result<Vec<Member>> {
    let extra: &[&'static str] = if dim == 3 { &ONLY_3D } else { &[] };
    COMMON.iter().chain(extra).map(|&dsl| Ok(Member { dsl, potential: parse(dsl, dim)? })).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(standard_family(1).unwrap().len(), 6);
        assert_eq!(standard_family(3).unwrap().len(), 8);
    }
}
