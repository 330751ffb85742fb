//! Sparse exponent vectors and truncation orders.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A sparse monomial exponent vector: sorted `(sector, exponent)` pairs with
/// all exponents positive. The empty vector is the unit monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Mono(Vec<(u16, u32)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(sector: u16) -> Self {
        Mono(vec![(sector, 1)])
    }

    pub fn from_pairs(pairs: &[(u16, u32)]) -> Self {
        let mut v: Vec<(u16, u32)> = pairs.iter().copied().filter(|&(_, e)| e > 0).collect();
        v.sort_unstable();
        let mut out: Vec<(u16, u32)> = Vec::with_capacity(v.len());
        for (s, e) in v {
            match out.last_mut() {
                Some((ls, le)) if *ls == s => *le += e,
                _ => out.push((s, e)),
            }
        }
        Mono(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(u16, u32)] {
        &self.0
    }

    pub fn exponent(&self, sector: u16) -> u32 {
        self.0
            .binary_search_by_key(&sector, |&(s, _)| s)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    /// Total exponent count `|a| = Σ a_k`.
    pub fn count(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    /// Weighted degree `Σ k·a_k` (sector index is the weight).
    pub fn weighted_degree(&self) -> u32 {
        self.0.iter().map(|&(s, e)| s as u32 * e).sum()
    }

    /// Truncation degree: like the weighted degree but the weight-zero
    /// sector counts 1 per power, so the grading is Noetherian along the
    /// string direction.
    pub fn trunc_degree(&self) -> u32 {
        self.0
            .iter()
            .map(|&(s, e)| (s as u32).max(1) * e)
            .sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (sa, ea) = self.0[i];
            let (sb, eb) = other.0[j];
            match sa.cmp(&sb) {
                std::cmp::Ordering::Less => {
                    out.push((sa, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((sb, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((sa, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Mono(out)
    }

    pub fn mul_var(&self, sector: u16, e: u32) -> Mono {
        if e == 0 {
            return self.clone();
        }
        self.mul(&Mono(vec![(sector, e)]))
    }

    /// Componentwise division; `None` unless `other` divides `self`.
    pub fn try_div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(s, e) in &self.0 {
            let mut rem = e;
            if j < other.0.len() && other.0[j].0 == s {
                if other.0[j].1 > e {
                    return None;
                }
                rem = e - other.0[j].1;
                j += 1;
            }
            if rem > 0 {
                out.push((s, rem));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Mono(out))
    }

    /// True when `other` divides `self` componentwise.
    pub fn divides_into(&self, other: &Mono) -> bool {
        other.try_div(self).is_some()
    }

    /// All divisor pairs `(d, self/d)`, in deterministic order.
    pub fn divisor_pairs(&self) -> Vec<(Mono, Mono)> {
        let mut out = vec![(Mono::one(), self.clone())];
        for &(s, e) in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for (lo, hi) in &out {
                for k in 0..=e {
                    let lo2 = lo.mul_var(s, k);
                    let hi2 = hi.try_div(&Mono(vec![(s, k)].into_iter().filter(|&(_, x)| x > 0).collect()))
                        .expect("divisor split");
                    next.push((lo2, hi2));
                }
            }
            out = next;
        }
        out
    }

    /// Smallest sector in the support.
    pub fn min_sector(&self) -> Option<u16> {
        self.0.first().map(|&(s, _)| s)
    }

    /// Dense exponent tuple over sectors `0..d`.
    pub fn dense(&self, d: u16) -> Vec<u32> {
        let mut v = vec![0u32; d as usize];
        for &(s, e) in &self.0 {
            if (s as usize) < v.len() {
                v[s as usize] = e;
            }
        }
        v
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|(s, e)| format!("{s}^{e}")).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// A term index of a graded series: u-exponents (weighted grading) and
/// t-exponents (total-degree grading), both supported on sector indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug, Serialize, Deserialize)]
pub struct MultiIndex {
    pub u: Mono,
    pub t: Mono,
}

impl MultiIndex {
    pub fn one() -> Self {
        MultiIndex {
            u: Mono::one(),
            t: Mono::one(),
        }
    }

    pub fn u_var(sector: u16) -> Self {
        MultiIndex {
            u: Mono::var(sector),
            t: Mono::one(),
        }
    }

    pub fn t_var(sector: u16) -> Self {
        MultiIndex {
            u: Mono::one(),
            t: Mono::var(sector),
        }
    }

    pub fn mul(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex {
            u: self.u.mul(&other.u),
            t: self.t.mul(&other.t),
        }
    }

    pub fn is_one(&self) -> bool {
        self.u.is_one() && self.t.is_one()
    }
}

/// Truncation orders for graded series: maximum weighted u-degree (with the
/// weight-zero sector graded 1 per power so the string direction stays
/// finite) and maximum total t-degree.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Trunc {
    pub u_deg: u32,
    pub t_deg: u32,
}

impl Trunc {
    pub fn new(u_deg: u32, t_deg: u32) -> Self {
        Trunc { u_deg, t_deg }
    }

    /// u-only truncation with no t variables.
    pub fn u_only(u_deg: u32) -> Self {
        Trunc::new(u_deg, 0)
    }

    pub fn admits(&self, idx: &MultiIndex) -> bool {
        idx.u.trunc_degree() <= self.u_deg && idx.t.count() <= self.t_deg
    }

    /// Componentwise minimum: the truncation on which two series agree.
    pub fn meet(&self, other: &Trunc) -> Trunc {
        Trunc {
            u_deg: self.u_deg.min(other.u_deg),
            t_deg: self.t_deg.min(other.t_deg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mono_mul_div() {
        let a = Mono::from_pairs(&[(1, 2), (3, 1)]);
        let b = Mono::from_pairs(&[(1, 1)]);
        let c = a.mul(&b);
        assert_eq!(c.exponent(1), 3);
        assert_eq!(c.try_div(&a).unwrap(), b);
        assert_eq!(b.try_div(&a), None);
        assert_eq!(a.count(), 3);
        assert_eq!(a.weighted_degree(), 5);
    }

    #[test]
    fn divisor_pairs_complete() {
        let a = Mono::from_pairs(&[(0, 1), (2, 2)]);
        let pairs = a.divisor_pairs();
        assert_eq!(pairs.len(), 6);
        for (lo, hi) in &pairs {
            assert_eq!(lo.mul(hi), a);
        }
    }

    #[test]
    fn trunc_admits() {
        let t = Trunc::new(4, 2);
        assert!(t.admits(&MultiIndex {
            u: Mono::from_pairs(&[(2, 2)]),
            t: Mono::from_pairs(&[(1, 2)]),
        }));
        // the string direction counts one per power
        assert!(t.admits(&MultiIndex {
            u: Mono::from_pairs(&[(0, 4)]),
            t: Mono::one(),
        }));
        assert!(!t.admits(&MultiIndex {
            u: Mono::from_pairs(&[(0, 5)]),
            t: Mono::one(),
        }));
        assert_eq!(Mono::from_pairs(&[(0, 2), (3, 1)]).trunc_degree(), 5);
        assert_eq!(Mono::from_pairs(&[(0, 2), (3, 1)]).weighted_degree(), 3);
    }
}
