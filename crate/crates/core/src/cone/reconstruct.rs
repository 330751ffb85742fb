//! Reconstruction of a cone point from its regular part and primary slice.
//!
//! Unknown negative-part coefficients are solved from the residue-pairing
//! regularity relations by induction on (light count, primary degree,
//! z-depth). Each component is pinned to a unique z-depth by the selection
//! rules, so the recursion only ever touches the sparse candidate set; a
//! slot whose relation reaches outside the primary slice's completeness box
//! is reported as incomplete rather than guessed.

use super::sigma::{pinned_depth, BigJ};
use super::ConeError;
use crate::model::FermatModel;
use crate::rat::Rat;
use crate::series::{Coeff, Mono, StateVec, ZSeries};

use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Slot coordinates of a negative-part coefficient: primary exponent,
/// light exponent, z-depth (the coefficient of z^{-depth}).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SlotKey {
    pub t: Mono,
    pub u: Mono,
    pub depth: u32,
}

/// Requested output box for a reconstruction.
#[derive(Clone, Copy, Debug)]
pub struct RequestBox {
    pub u_deg: u32,
    pub t_deg: u32,
    pub z_neg: u32,
}

/// A reconstructed point: the regular shift, the solved negative part and
/// the slots that could not be completed from the available slice data.
pub struct ConePoint {
    pub f_reg: ZSeries<StateVec>,
    pub slots: BTreeMap<SlotKey, StateVec>,
    pub poisoned: BTreeSet<SlotKey>,
    pub request: RequestBox,
}

impl ConePoint {
    pub fn slot_value(&self, key: &SlotKey) -> StateVec {
        self.slots.get(key).cloned().unwrap_or_default()
    }

    pub fn is_complete(&self, key: &SlotKey) -> bool {
        !self.poisoned.contains(key)
    }
}

#[derive(Clone)]
enum Status {
    Val(Rat),
    Poison,
    InProgress,
}

struct Solver<'a> {
    model: &'a FermatModel,
    f_terms: std::sync::Arc<Vec<(Mono, u32, StateVec)>>,
    base: &'a BigJ,
    memo: HashMap<(Mono, Mono, u16), Status>,
    narrow: std::sync::Arc<Vec<u16>>,
}

fn sign(j: u32) -> i64 {
    if j % 2 == 0 {
        1
    } else {
        -1
    }
}

impl<'a> Solver<'a> {
    /// Value of component `c` of the slot (m, n) at the depth the selection
    /// rules force; zero when the slot is off its pinned depth.
    fn resolve(&mut self, m: &Mono, n: &Mono, c: u16, depth: u32) -> Option<Rat> {
        match pinned_depth(self.model, m, n, c) {
            Some(j) if j == depth => self.solve(m, n, c),
            _ => Some(Rat::zero()),
        }
    }

    /// Value of component `c` of the slot (m, n) at its pinned depth.
    /// `None` marks an incomplete slot.
    fn solve(&mut self, m: &Mono, n: &Mono, c: u16) -> Option<Rat> {
        let j = pinned_depth(self.model, m, n, c).expect("solve called on a candidate");
        if n.is_one() {
            return self
                .base
                .lookup(m, j)
                .map(|v| v.component(c));
        }
        let key = (m.clone(), n.clone(), c);
        match self.memo.get(&key) {
            Some(Status::Val(v)) => return Some(v.clone()),
            Some(Status::Poison) => return None,
            Some(Status::InProgress) => {
                panic!("reconstruction recursion cycle at {:?}", key)
            }
            None => {}
        }
        self.memo.insert(key.clone(), Status::InProgress);
        let out = self.relation_value(m, n, c, j);
        self.memo.insert(
            key,
            match &out {
                Some(v) => Status::Val(v.clone()),
                None => Status::Poison,
            },
        );
        out
    }

    /// Solve the regularity relation at [t^m u^{n - e_r} z^{-j}] for the
    /// initial term of component c.
    fn relation_value(&mut self, m: &Mono, n: &Mono, c: u16, j: u32) -> Option<Rat> {
        let r = n.min_sector().expect("nonconstant light exponent");
        let n_rel = n
            .try_div(&Mono::var(r))
            .expect("min sector divides");
        let s = self.model.dual(c);
        let e_s = Mono::var(s);
        let mut acc = Rat::zero();
        // pairing of the regular shift against the primary derivative of
        // the negative part
        let f_terms = std::sync::Arc::clone(&self.f_terms);
        for (a, p, vf) in f_terms.iter() {
            let ar = a.exponent(r);
            if ar == 0 {
                continue;
            }
            let a_red = a.try_div(&Mono::var(r)).unwrap();
            let Some(n2) = n_rel.try_div(&a_red) else {
                continue;
            };
            let j2 = j + p;
            let m2 = m.mul(&e_s);
            let mult = Rat::from_integer(
                (ar as i64 * (m.exponent(s) as i64 + 1) * sign(j2)).into(),
            );
            for (&cf, coef) in vf.support() {
                let cw = self.model.dual(cf);
                let w = self.resolve(&m2, &n2, cw, j2)?;
                if !w.is_zero() {
                    acc += &mult * coef * w;
                }
            }
        }
        // pairing of the two negative parts against each other
        let m_splits = m.divisor_pairs();
        let n_splits = n_rel.divisor_pairs();
        let narrow = std::sync::Arc::clone(&self.narrow);
        for (m1, m2) in &m_splits {
            let m2s = m2.mul(&e_s);
            for (n1, n2) in &n_splits {
                let nn1 = n1.mul(&Mono::var(r));
                for &c1 in narrow.iter() {
                    let Some(j1) = pinned_depth(self.model, m1, &nn1, c1) else {
                        continue;
                    };
                    if j1 == 0 || j1 >= j {
                        continue;
                    }
                    let c2 = self.model.dual(c1);
                    let j2 = j - j1;
                    if pinned_depth(self.model, &m2s, n2, c2) != Some(j2) {
                        continue;
                    }
                    let v1 = self.solve(m1, &nn1, c1)?;
                    if v1.is_zero() {
                        continue;
                    }
                    let v2 = self.solve(&m2s, n2, c2)?;
                    if v2.is_zero() {
                        continue;
                    }
                    let mult = (n1.exponent(r) as i64 + 1)
                        * (m2.exponent(s) as i64 + 1)
                        * sign(j2);
                    acc += Rat::from_integer(mult.into()) * v1 * v2;
                }
            }
        }
        acc /= -Rat::from_integer((n.exponent(r) as i64).into());
        Some(acc)
    }
}

/// Enumerate exponent vectors over `sectors` with the given truncation
/// degree and count bounds.
pub fn enumerate_monos(sectors: &[u16], max_deg: u32, max_count: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Mono)> = vec![(0, Mono::one())];
    while let Some((i, m)) = stack.pop() {
        if i == sectors.len() {
            out.push(m);
            continue;
        }
        let s = sectors[i];
        let mut e = 0u32;
        loop {
            let m2 = m.mul_var(s, e);
            if m2.trunc_degree() > max_deg || m2.count() > max_count {
                break;
            }
            stack.push((i + 1, m2));
            e += 1;
        }
    }
    out.sort();
    out
}

/// Validate and flatten the regular shift into term form.
fn f_terms_of(
    model: &FermatModel,
    f_reg: &ZSeries<StateVec>,
) -> Result<Vec<(Mono, u32, StateVec)>, ConeError> {
    if let Some(min) = f_reg.min_power() {
        if min < 0 {
            return Err(ConeError::BadConeInput(
                "regular shift has negative z-powers".into(),
            ));
        }
    }
    let mut out = Vec::new();
    for (p, g) in f_reg.iter() {
        if !Coeff::is_zero(&g.constant_term()) {
            return Err(ConeError::BadConeInput(
                "regular shift must vanish at u = 0".into(),
            ));
        }
        for (idx, v) in g.terms() {
            if !idx.t.is_one() {
                return Err(ConeError::BadConeInput(
                    "regular shift must depend on u only".into(),
                ));
            }
            for (&k, _) in v.support() {
                if !model.is_narrow(k) {
                    return Err(ConeError::BroadContent(k));
                }
            }
            out.push((idx.u.clone(), *p as u32, v.clone()));
        }
    }
    Ok(out)
}

/// Reconstruct the unique point with regular part z phi_0 + t + f and the
/// given primary slice, on the requested box.
pub fn reconstruct(
    model: &FermatModel,
    f_reg: &ZSeries<StateVec>,
    base: &BigJ,
    request: &RequestBox,
) -> Result<ConePoint, ConeError> {
    let f_terms = f_terms_of(model, f_reg)?;
    let narrow: Vec<u16> = model.narrow().iter().copied().collect();
    let mut solver = Solver {
        model,
        f_terms: std::sync::Arc::new(f_terms),
        base,
        memo: HashMap::new(),
        narrow: std::sync::Arc::new(narrow.clone()),
    };
    let t_monos = enumerate_monos(&narrow, u32::MAX, request.t_deg);
    let u_monos = enumerate_monos(&narrow, request.u_deg, u32::MAX);
    let mut slots: BTreeMap<SlotKey, StateVec> = BTreeMap::new();
    let mut poisoned = BTreeSet::new();
    for m in &t_monos {
        for n in &u_monos {
            for &c in &narrow {
                let Some(j) = pinned_depth(model, m, n, c) else {
                    continue;
                };
                if j == 0 || j > request.z_neg {
                    continue;
                }
                let key = SlotKey {
                    t: m.clone(),
                    u: n.clone(),
                    depth: j,
                };
                let val = if n.is_one() {
                    base.lookup(m, j).map(|v| v.component(c))
                } else {
                    solver.solve(m, n, c)
                };
                match val {
                    Some(v) if v.is_zero() => {}
                    Some(v) => {
                        slots.entry(key).or_default().insert_add(c, v);
                    }
                    None => {
                        poisoned.insert(key);
                    }
                }
            }
        }
    }
    Ok(ConePoint {
        f_reg: f_reg.clone(),
        slots,
        poisoned,
        request: *request,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::sigma::big_j;
    use crate::ifun::SeriesOrders;
    use crate::rat::rat_int;
    use crate::series::{Trunc, Window};

    fn three_spin() -> FermatModel {
        FermatModel::build(&[1], 3).unwrap()
    }

    #[test]
    fn i_series_round_trip_three_spin() {
        // feeding the regular part of the I-series back through the
        // recursion must regenerate its hypergeometric negative part
        let m = three_spin();
        let base = big_j(&m, &SeriesOrders::new(8, 6)).unwrap();
        let orders = SeriesOrders::new(6, 3);
        let (mut bi, _) = crate::ifun::big_i(&m, &orders);
        bi.retain_sectors(|s| m.is_narrow(s));
        let mut lead = ZSeries::zero(bi.trunc, bi.window);
        lead.add_term(
            1,
            crate::series::GradedSeries::basis_term(
                crate::series::MultiIndex::one(),
                0,
                rat_int(1),
                bi.trunc,
            ),
        );
        let f_reg = bi.sub(&lead).positive_part();
        let req = RequestBox {
            u_deg: 6,
            t_deg: 0,
            z_neg: 3,
        };
        let point = reconstruct(&m, &f_reg, &base, &req).unwrap();
        assert!(point.poisoned.is_empty(), "poisoned: {:?}", point.poisoned);
        // every reconstructed t = 0 slot equals the I-series coefficient
        let mut checked = 0;
        for (key, v) in &point.slots {
            assert!(key.t.is_one());
            let idx = crate::series::MultiIndex {
                u: key.u.clone(),
                t: Mono::one(),
            };
            let expect = bi.coefficient(-(key.depth as i32)).coefficient(&idx);
            assert_eq!(v, &expect, "slot {:?}", key);
            checked += 1;
        }
        assert!(checked >= 8, "only {checked} slots compared");
        // and conversely every I-series negative term was reconstructed
        for (j, g) in bi.iter() {
            if *j >= 0 {
                continue;
            }
            let depth = (-*j) as u32;
            if depth > req.z_neg {
                continue;
            }
            for (idx, v) in g.terms() {
                let key = SlotKey {
                    t: Mono::one(),
                    u: idx.u.clone(),
                    depth,
                };
                assert_eq!(&point.slot_value(&key), v, "missing slot {:?}", key);
            }
        }
    }

    #[test]
    fn zero_shift_extends_base_constantly() {
        let m = three_spin();
        let base = big_j(&m, &SeriesOrders::new(6, 5)).unwrap();
        let trunc = Trunc::u_only(4);
        let f = ZSeries::zero(trunc, Window::new(0, 1));
        let req = RequestBox {
            u_deg: 4,
            t_deg: 2,
            z_neg: 3,
        };
        let point = reconstruct(&m, &f, &base, &req).unwrap();
        assert!(point.poisoned.is_empty());
        for (key, v) in &point.slots {
            if !key.u.is_one() {
                panic!("unexpected light dependence at {:?} = {:?}", key, v);
            }
            assert_eq!(
                base.lookup(&key.t, key.depth).unwrap(),
                v.clone(),
                "base slot mismatch"
            );
        }
        // and the base slots are present
        let probe = SlotKey {
            t: Mono::from_pairs(&[(0, 1), (1, 1)]),
            u: Mono::one(),
            depth: 1,
        };
        assert_eq!(point.slot_value(&probe).component(1), rat_int(1));
    }
}
