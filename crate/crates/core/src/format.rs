//! Line-oriented text format for subspaces.
//!
//! One subspace per line: `k` rows separated by `;`, each row `n` characters
//! from `0123456789abcdef` giving the scalar encodings. Rows must already be
//! in RREF. Lines starting with `#` are comments and blank lines are ignored.
//! The line for span{e1, e2} in GF(2)^4 is `1000;0100`.

use crate::error::{Error, Result};
use crate::projective::{AmbientSpace, Subspace};
use crate::qfield::Scalar;

const DIGITS: &[u8; 16] = b"0123456789abcdef";

pub fn format_subspace(s: &Subspace) -> String {
    s.raw_rows()
        .take(s.dim())
        .map(|row| row.iter().map(|&x| DIGITS[x as usize] as char).collect::<String>())
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_with_line(ambient: &AmbientSpace, text: &str, line: usize) -> Result<Subspace> {
    let err = |message: String| Error::Parse { line, message };
    let rows = text
        .trim()
        .split(';')
        .map(|row| {
            let row = row.trim();
            if row.chars().count() != ambient.n() {
                return Err(err(format!(
                    "row {row:?} has {} characters, expected {}",
                    row.chars().count(),
                    ambient.n()
                )));
            }
            row.chars()
                .map(|c| {
                    let v = c
                        .to_digit(16)
                        .filter(|_| !c.is_ascii_uppercase())
                        .ok_or_else(|| err(format!("invalid digit {c:?}")))?;
                    Scalar::new(ambient.field(), v).map_err(|e| err(e.to_string()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Subspace::from_rref(ambient, &rows).map_err(|e| err(e.to_string()))
}

pub fn parse_subspace(ambient: &AmbientSpace, text: &str) -> Result<Subspace> {
    parse_with_line(ambient, text, 1)
}

pub fn parse_family(ambient: &AmbientSpace, text: &str) -> Result<Vec<Subspace>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| parse_with_line(ambient, l, i + 1))
        .collect()
}

pub fn format_family(members: &[Subspace]) -> String {
    let mut out = String::new();
    for m in members {
        out.push_str(&format_subspace(m));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::enumerate_subspaces;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn known_line() {
        let amb = AmbientSpace::over(2, 4).unwrap();
        let s = parse_subspace(&amb, "1000;0100").unwrap();
        assert_eq!(s, Subspace::coordinate(&amb, &[0, 1]).unwrap());
        assert_eq!(format_subspace(&s), "1000;0100");
    }

    #[test]
    fn comments_and_blank_lines() {
        let amb = AmbientSpace::over(3, 3).unwrap();
        let text = "# header\n\n100;012\n  \n# x\n010;001\n";
        let fam = parse_family(&amb, text).unwrap();
        assert_eq!(fam.len(), 2);
    }

    #[test]
    fn rejects_non_rref_and_bad_digits() {
        let amb = AmbientSpace::over(2, 4).unwrap();
        assert!(matches!(
            parse_family(&amb, "1100;0100\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_subspace(&amb, "1020").is_err());
        assert!(parse_subspace(&amb, "100").is_err());
        let amb16 = AmbientSpace::over(16, 2).unwrap();
        assert!(parse_subspace(&amb16, "1f").is_ok());
        assert!(parse_subspace(&amb16, "1F").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn round_trip(seed in any::<u64>(), qi in 0usize..4) {
            let q = [2u32, 5, 9, 16][qi];
            let amb = AmbientSpace::over(q, 4).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = rand::Rng::gen_range(&mut rng, 1..=4);
            let s = crate::projective::random_subspace(&amb, k, &mut rng).unwrap();
            prop_assert_eq!(parse_subspace(&amb, &format_subspace(&s)).unwrap(), s);
        }
    }

    #[test]
    fn family_round_trip() {
        let amb = AmbientSpace::over(2, 4).unwrap();
        let all: Vec<Subspace> = enumerate_subspaces(&amb, 2).unwrap().collect();
        assert_eq!(parse_family(&amb, &format_family(&all)).unwrap(), all);
    }
}
