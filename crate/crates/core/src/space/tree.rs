//! Regular trees with vertices named by reduced edge-label words from the root.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{domain, Error, Result};

pub const MAX_VALENCE: u8 = 26;

/// Backtrack-free word over the labels `a, b, …`; the empty word is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeAddress(Vec<u8>);

impl TreeAddress {
    pub fn root() -> Self {
        TreeAddress(Vec::new())
    }

    /// Builds an address from raw labels, checking it against `valence`.
    pub fn from_labels(labels: Vec<u8>, valence: u8) -> Result<Self> {
        let addr = TreeAddress(labels);
        addr.validate(valence)?;
        Ok(addr)
    }

    pub fn labels(&self) -> &[u8] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn validate(&self, valence: u8) -> Result<()> {
        if let Some(&bad) = self.0.iter().find(|&&l| l >= valence) {
            return Err(domain(format!(
                "label {} out of range for valence {valence}",
                (b'a' + bad) as char
            )));
        }
        if self.0.windows(2).any(|w| w[0] == w[1]) {
            return Err(domain(format!("address {self} backtracks")));
        }
        Ok(())
    }

    fn common_prefix(&self, other: &TreeAddress) -> usize {
        self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count()
    }

    pub fn distance(&self, other: &TreeAddress) -> usize {
        let l = self.common_prefix(other);
        self.0.len() + other.0.len() - 2 * l
    }

    fn parent(&self) -> Option<TreeAddress> {
        if self.0.is_empty() {
            None
        } else {
            Some(TreeAddress(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    fn child(&self, label: u8) -> TreeAddress {
        let mut v = self.0.clone();
        v.push(label);
        TreeAddress(v)
    }

    /// All neighbours, parent first.
    pub fn neighbours(&self, valence: u8) -> Vec<TreeAddress> {
        let last = self.0.last().copied();
        self.parent()
            .into_iter()
            .chain((0..valence).filter(|&c| Some(c) != last).map(|c| self.child(c)))
            .collect()
    }

    /// Vertex at integer distance `t` along the ray from `self` through `to`.
    /// Past `to` the ray continues along the first non-backtracking neighbour.
    pub fn ray_point(&self, to: &TreeAddress, t: usize, valence: u8) -> TreeAddress {
        let l = self.common_prefix(to);
        let up = self.0.len() - l;
        let total = up + to.0.len() - l;
        if t <= up {
            return TreeAddress(self.0[..self.0.len() - t].to_vec());
        }
        if t <= total {
            return TreeAddress(to.0[..l + (t - up)].to_vec());
        }
        let mut prev = if total == 0 {
            None
        } else {
            Some(self.ray_point(to, total - 1, valence))
        };
        let mut cur = to.clone();
        for _ in total..t {
            let next = cur
                .neighbours(valence)
                .into_iter()
                .find(|n| Some(n) != prev.as_ref())
                .expect("regular tree vertex has at least two neighbours");
            prev = Some(std::mem::replace(&mut cur, next));
        }
        cur
    }

    /// Endpoint of a uniformly random non-backtracking walk of length `r`;
    /// this is uniform on the sphere of radius `r` about `self`.
    pub fn random_sphere_point<R: Rng + ?Sized>(&self, r: usize, valence: u8, rng: &mut R) -> TreeAddress {
        let mut prev: Option<TreeAddress> = None;
        let mut cur = self.clone();
        for _ in 0..r {
            let options: Vec<TreeAddress> = cur
                .neighbours(valence)
                .into_iter()
                .filter(|n| Some(n) != prev.as_ref())
                .collect();
            let next = options[rng.random_range(0..options.len())].clone();
            prev = Some(std::mem::replace(&mut cur, next));
        }
        cur
    }
}

/// Number of vertices at distance `r` from any vertex.
pub fn sphere_cardinality(valence: u8, r: usize) -> u128 {
    if r == 0 {
        1
    } else {
        valence as u128 * (valence as u128 - 1).pow(r as u32 - 1)
    }
}

impl fmt::Display for TreeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        for &l in &self.0 {
            write!(f, "{}", (b'a' + l) as char)?;
        }
        Ok(())
    }
}

impl FromStr for TreeAddress {
    type Err = Error;

    /// Parses lower-case labels; the root may be written as the empty string.
    /// Valence is not known here, so call [`TreeAddress::validate`] afterwards.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "∅" {
            return Ok(TreeAddress::root());
        }
        s.bytes()
            .map(|b| {
                if b.is_ascii_lowercase() {
                    Ok(b - b'a')
                } else {
                    Err(domain(format!("malformed tree address {s:?}")))
                }
            })
            .collect::<Result<Vec<u8>>>()
            .map(TreeAddress)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> TreeAddress {
        s.parse().unwrap()
    }

    #[test]
    fn distance_after_shared_prefix() {
        assert_eq!(a("ab").distance(&a("ac")), 2);
        assert_eq!(a("ab").distance(&a("ab")), 0);
        assert_eq!(a("").distance(&a("abc")), 3);
    }

    #[test]
    fn rejects_backtracking_and_bad_labels() {
        assert!(a("aa").validate(3).is_err());
        assert!(a("ad").validate(3).is_err());
        assert!(a("abca").validate(3).is_ok());
        assert!("aB".parse::<TreeAddress>().is_err());
    }

    #[test]
    fn neighbour_counts_are_regular() {
        assert_eq!(a("").neighbours(3).len(), 3);
        assert_eq!(a("ab").neighbours(3).len(), 3);
        assert_eq!(a("ab").neighbours(4).len(), 4);
    }

    #[test]
    fn ray_point_walks_through_target_and_beyond() {
        let (u, v) = (a("ab"), a("ca"));
        assert_eq!(u.ray_point(&v, 0, 3), u);
        assert_eq!(u.ray_point(&v, 2, 3), a(""));
        assert_eq!(u.ray_point(&v, 4, 3), v);
        for t in 0..10 {
            assert_eq!(u.distance(&u.ray_point(&v, t, 3)), t);
        }
        // Ray from a vertex up through the root continues down another branch.
        let (u, v) = (a("ab"), a("a"));
        for t in 0..8 {
            assert_eq!(u.distance(&u.ray_point(&v, t, 3)), t);
        }
    }

    #[test]
    fn cardinality_formula() {
        assert_eq!(sphere_cardinality(3, 0), 1);
        assert_eq!(sphere_cardinality(3, 2), 6);
        assert_eq!(sphere_cardinality(4, 3), 36);
    }
}
