//! Finite permutation groups with explicit element lists.
//!
//! Groups here are small (hundreds of elements), so everything is stored
//! explicitly: closure is a breadth-first search, orbits and stabilizers are
//! direct scans, and the subgroup lattice is enumerated exhaustively with its
//! Möbius function.

mod group;
mod lattice;
mod perm;

pub use group::{PermGroup, DEFAULT_CLOSURE_CAP};
pub use lattice::{subgroups, subgroups_with_cap, SubgroupLattice, DEFAULT_LATTICE_CAP};
pub use perm::Permutation;

use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("permutation of degree {found} where degree {expected} was expected")]
    DomainMismatch { expected: usize, found: usize },
    #[error("group too large: more than {cap} elements")]
    TooLarge { cap: usize },
    #[error("image array is not a bijection")]
    NotABijection,
    #[error("label {label} exceeds degree {degree}")]
    LabelOutOfRange { label: usize, degree: usize },
    #[error("cannot parse group or permutation `{0}`")]
    Parse(String),
    #[error("element list is not closed under composition")]
    NotAGroup,
    #[error("subgroup {sub} is not contained in subgroup {sup}")]
    NotContained { sub: usize, sup: usize },
    #[error("fixed-point counts are not divisible by the group order")]
    NonIntegralOrbitCount,
}

/// Builds a group from a textual spec.
///
/// Accepted forms: `trivial:n`, `cyclic:n`, `symmetric:n`, `klein4`,
/// `icosahedral-regular`, or an explicit generator list in 1-based cycle
/// notation separated by `;` or top-level commas, optionally prefixed by the
/// degree as `n:` (e.g. `6:(1 2 3)(4 5 6);(1 4)`).
pub fn named_group(spec: &str) -> Result<PermGroup, GroupError> {
    let spec = spec.trim();
    let bad = || GroupError::Parse(String::from(spec));
    let sized = |prefix: &str| -> Option<Result<usize, GroupError>> {
        spec.strip_prefix(prefix)
            .map(|n| n.trim().parse::<usize>().map_err(|_| bad()))
    };

    if let Some(n) = sized("trivial:") {
        return Ok(PermGroup::trivial(n?));
    }
    if let Some(n) = sized("cyclic:") {
        let n = n?;
        if n == 0 {
            return Err(bad());
        }
        let cycle: Vec<usize> = (0..n).collect();
        let g = Permutation::from_cycles(n, &[cycle])?;
        return PermGroup::closure(&[g], n);
    }
    if let Some(n) = sized("symmetric:") {
        let n = n?;
        if n == 0 {
            return Err(bad());
        }
        if n <= 2 {
            let gens = if n == 2 {
                alloc::vec![Permutation::from_cycles(2, &[alloc::vec![0, 1]])?]
            } else {
                Vec::new()
            };
            return PermGroup::closure(&gens, n);
        }
        let long: Vec<usize> = (0..n).collect();
        let gens = [
            Permutation::from_cycles(n, &[long])?,
            Permutation::from_cycles(n, &[alloc::vec![0, 1]])?,
        ];
        return PermGroup::closure(&gens, n);
    }
    match spec {
        "klein4" => {
            let gens = [
                Permutation::parse_cycles("(1 2)(3 4)", Some(4))?,
                Permutation::parse_cycles("(1 3)(2 4)", Some(4))?,
            ];
            return PermGroup::closure(&gens, 4);
        }
        "icosahedral-regular" => return Ok(icosahedral_rotations().regular_action(1)),
        _ => {}
    }
    if spec.contains('(') {
        return parse_generator_list(spec);
    }
    Err(bad())
}

/// Icosahedral rotations as A₅ on 5 points.
fn icosahedral_rotations() -> PermGroup {
    let gens = [
        Permutation::parse_cycles("(1 2 3 4 5)", Some(5)).expect("literal"),
        Permutation::parse_cycles("(1 2 3)", Some(5)).expect("literal"),
    ];
    PermGroup::closure(&gens, 5).expect("A5")
}

fn parse_generator_list(spec: &str) -> Result<PermGroup, GroupError> {
    let bad = || GroupError::Parse(String::from(spec));
    let (degree, body) = match spec.split_once(':') {
        Some((d, rest)) if !d.contains('(') => (Some(d.trim().parse::<usize>().map_err(|_| bad())?), rest),
        _ => (None, spec),
    };
    let mut pieces = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1).ok_or_else(bad)?,
            ',' | ';' if depth == 0 => {
                pieces.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    pieces.push(&body[start..]);
    let pieces: Vec<&str> = pieces.into_iter().map(str::trim).filter(|s| !s.is_empty()).collect();
    let parsed: Vec<Permutation> = pieces
        .iter()
        .map(|s| Permutation::parse_cycles(s, None))
        .collect::<Result<_, _>>()?;
    let max_degree = parsed.iter().map(Permutation::degree).max().unwrap_or(0);
    let degree = match degree {
        Some(d) if d < max_degree => {
            return Err(GroupError::LabelOutOfRange {
                label: max_degree,
                degree: d,
            })
        }
        Some(d) => d,
        None => max_degree,
    };
    let gens: Vec<Permutation> = parsed.iter().map(|g| g.extend(degree)).collect();
    PermGroup::closure(&gens, degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_groups() {
        let k = named_group("klein4").unwrap();
        assert_eq!((k.order(), k.degree()), (4, 4));
        let ico = named_group("icosahedral-regular").unwrap();
        assert_eq!((ico.order(), ico.degree()), (60, 60));
        assert!(ico.acts_freely());
        let s6 = named_group("symmetric:6").unwrap();
        assert_eq!((s6.order(), s6.degree()), (720, 6));
        assert_eq!(named_group("cyclic:5").unwrap().order(), 5);
        assert_eq!(named_group("trivial:4").unwrap().order(), 1);
        assert_eq!(named_group("symmetric:1").unwrap().order(), 1);
        assert_eq!(named_group("symmetric:2").unwrap().order(), 2);
    }

    #[test]
    fn explicit_generator_lists() {
        let g = named_group("(1 2)(3 4), (1 3)(2 4)").unwrap();
        assert_eq!(g, named_group("klein4").unwrap());
        let h = named_group("6:(1 2 3);(4 5)").unwrap();
        assert_eq!((h.order(), h.degree()), (6, 6));
        assert!(named_group("nonsense").is_err());
        assert!(named_group("cyclic:x").is_err());
        assert!(named_group("2:(1 2 3)").is_err());
    }
}
