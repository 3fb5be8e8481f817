use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::GroupError;

/// A bijection of `{0, …, n-1}` stored by its images.
///
/// Ordering is lexicographic on the image array, which is the element order
/// used throughout the crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    map: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            map: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from its image array, rejecting non-bijections.
    pub fn from_images(images: Vec<usize>) -> Result<Self, GroupError> {
        let n = images.len();
        let mut seen = alloc::vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(GroupError::NotABijection);
            }
            seen[x] = true;
        }
        Ok(Permutation {
            map: images.into_iter().map(|x| x as u32).collect(),
        })
    }

    /// Builds a permutation from disjoint 0-based cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, GroupError> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = alloc::vec![false; degree];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x >= degree {
                    return Err(GroupError::LabelOutOfRange { label: x + 1, degree });
                }
                if touched[x] {
                    return Err(GroupError::NotABijection);
                }
                touched[x] = true;
                images[x] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::from_images(images)
    }

    /// Parses 1-based cycle notation such as `(1 2)(3 4)`; `()` is the identity.
    ///
    /// Labels inside a cycle may be separated by spaces or commas. When
    /// `degree` is `None` the largest label mentioned fixes the degree.
    pub fn parse_cycles(text: &str, degree: Option<usize>) -> Result<Self, GroupError> {
        let cycles = parse_cycle_list(text)?;
        let max_label = cycles.iter().flatten().copied().max().unwrap_or(0);
        let degree = match degree {
            Some(d) if d < max_label => {
                return Err(GroupError::LabelOutOfRange {
                    label: max_label,
                    degree: d,
                })
            }
            Some(d) => d,
            None => max_label,
        };
        let zero_based: Vec<Vec<usize>> = cycles
            .into_iter()
            .map(|c| c.into_iter().map(|x| x - 1).collect())
            .collect();
        Self::from_cycles(degree, &zero_based)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.iter().map(|&x| x as usize)
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            map: other.map.iter().map(|&x| self.map[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = alloc::vec![0u32; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { map: inv }
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.map
            .iter()
            .enumerate()
            .filter(|(i, &x)| *i as u32 == x)
            .map(|(i, _)| i)
    }

    /// Disjoint cycles of length ≥ 2, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.map.len();
        let mut seen = alloc::vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.map[x] as usize;
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    pub fn order(&self) -> usize {
        self.cycles()
            .iter()
            .map(|c| c.len())
            .fold(1, num_integer::lcm)
    }

    /// Extends to a larger domain, fixing the new points.
    pub fn extend(&self, degree: usize) -> Permutation {
        let mut map = self.map.clone();
        map.extend(self.map.len() as u32..degree as u32);
        Permutation { map }
    }
}

impl fmt::Display for Permutation {
    /// 1-based cycle notation; the identity renders as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (k, x) in cycle.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{}", self)
    }
}

fn parse_cycle_list(text: &str) -> Result<Vec<Vec<usize>>, GroupError> {
    let err = || GroupError::Parse(String::from(text));
    let mut cycles = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body_start = rest.strip_prefix('(').ok_or_else(err)?;
        let close = body_start.find(')').ok_or_else(err)?;
        let body = &body_start[..close];
        let mut cycle = Vec::new();
        for token in body.split(|c: char| c == ',' || c.is_whitespace()) {
            if token.is_empty() {
                continue;
            }
            let label: usize = token.parse().map_err(|_| err())?;
            if label == 0 {
                return Err(err());
            }
            cycle.push(label);
        }
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = body_start[close + 1..].trim_start();
    }
    Ok(cycles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn parse_and_render_round_trip() {
        let p = Permutation::parse_cycles("(1 2)(3 4)", None).unwrap();
        assert_eq!(p.degree(), 4);
        assert_eq!(p.to_string(), "(1 2)(3 4)");
        assert_eq!(Permutation::parse_cycles("()", Some(3)).unwrap(), Permutation::identity(3));
        assert_eq!(
            Permutation::parse_cycles("(1,3, 2)", None).unwrap().to_string(),
            "(1 3 2)"
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::parse_cycles("(1 2", None).is_err());
        assert!(Permutation::parse_cycles("(0 1)", None).is_err());
        assert!(Permutation::parse_cycles("(1 2)(2 3)", None).is_err());
        assert!(Permutation::parse_cycles("(1 5)", Some(4)).is_err());
    }

    #[test]
    fn compose_applies_right_operand_first() {
        let a = Permutation::parse_cycles("(1 2)", Some(3)).unwrap();
        let b = Permutation::parse_cycles("(2 3)", Some(3)).unwrap();
        // b sends 1 -> 1, then a sends 1 -> 2
        assert_eq!(a.compose(&b).apply(0), 1);
        assert_eq!(a.compose(&b).to_string(), "(1 2 3)");
        assert!(a.compose(&a.inverse()).is_identity());
        assert_eq!(a.compose(&b).order(), 3);
    }
}
