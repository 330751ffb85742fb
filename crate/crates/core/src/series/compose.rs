//! Formal substitution and series reversion.

use super::graded::{Coeff, GradedSeries, SeriesError};
use super::mono::{MultiIndex, Trunc};
use crate::rat::Rat;
use num_traits::One;
use std::collections::BTreeMap;

/// Which variable family a substitution targets.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum VarKind {
    U,
    T,
}

/// Substitution map: variable -> scalar series image. Variables not present
/// are left alone.
pub type Substitution = BTreeMap<(VarKind, u16), GradedSeries<Rat>>;

/// Formal substitution, truncated to `trunc`. Every substituted series must
/// have zero constant term so the expansion is finite order by order.
pub fn compose<C: Coeff>(
    f: &GradedSeries<C>,
    subst: &Substitution,
    trunc: Trunc,
) -> Result<GradedSeries<C>, SeriesError> {
    for ((kind, sector), image) in subst {
        if !Coeff::is_zero(&image.constant_term()) {
            return Err(SeriesError::SubstitutionConstantTerm(format!(
                "{:?}^{}",
                kind, sector
            )));
        }
    }
    let mut powers: BTreeMap<(VarKind, u16, u32), GradedSeries<Rat>> = BTreeMap::new();
    let mut out = GradedSeries::zero(trunc);
    for (idx, c) in f.terms() {
        let mut factor = GradedSeries::<Rat>::one(trunc);
        let mut vars: Vec<(VarKind, u16, u32)> = Vec::new();
        for &(s, e) in idx.u.pairs() {
            vars.push((VarKind::U, s, e));
        }
        for &(s, e) in idx.t.pairs() {
            vars.push((VarKind::T, s, e));
        }
        let mut dead = false;
        for (kind, s, e) in vars {
            let p = var_power(&mut powers, subst, kind, s, e, trunc);
            factor = factor.mul(&p);
            if factor.is_zero() {
                dead = true;
                break;
            }
        }
        if dead {
            continue;
        }
        for (fidx, fc) in factor.terms() {
            let mut c2 = c.clone();
            c2.scale(fc);
            out.add_term(fidx.clone(), c2);
        }
    }
    Ok(out)
}

fn var_power(
    cache: &mut BTreeMap<(VarKind, u16, u32), GradedSeries<Rat>>,
    subst: &Substitution,
    kind: VarKind,
    sector: u16,
    exp: u32,
    trunc: Trunc,
) -> GradedSeries<Rat> {
    if let Some(p) = cache.get(&(kind, sector, exp)) {
        return p.clone();
    }
    let base = match subst.get(&(kind, sector)) {
        Some(s) => s.truncated(trunc),
        None => {
            let idx = match kind {
                VarKind::U => MultiIndex::u_var(sector),
                VarKind::T => MultiIndex::t_var(sector),
            };
            let mut s = GradedSeries::zero(trunc);
            s.add_term(idx, Rat::one());
            s
        }
    };
    let mut p = base.clone();
    for _ in 1..exp {
        p = p.mul(&base);
        if p.is_zero() {
            break;
        }
    }
    if exp == 0 {
        p = GradedSeries::one(trunc);
    }
    cache.insert((kind, sector, exp), p.clone());
    p
}

/// Reversion of a map `u_i -> u_i + h_i` whose linear part is the identity
/// on the participating u-variables. Returns the substitution realizing the
/// inverse, computed order by order on the count filtration and verified by
/// composition.
pub fn reversion(
    components: &BTreeMap<u16, GradedSeries<Rat>>,
    trunc: Trunc,
) -> Result<BTreeMap<u16, GradedSeries<Rat>>, SeriesError> {
    // precondition: count-1 part of component i is exactly u^i
    for (&i, comp) in components {
        for (idx, c) in comp.terms() {
            if idx.u.count() + idx.t.count() == 1 {
                let expected = idx == &MultiIndex::u_var(i);
                if expected && c != &Rat::one() {
                    return Err(SeriesError::NonIdentityLinearPart(format!("u^{i}")));
                }
                if !expected && !Coeff::is_zero(c) {
                    return Err(SeriesError::NonIdentityLinearPart(format!("u^{i}")));
                }
            }
        }
        if comp.coefficient(&MultiIndex::u_var(i)) != Rat::one() {
            return Err(SeriesError::NonIdentityLinearPart(format!("u^{i}")));
        }
        if !Coeff::is_zero(&comp.constant_term()) {
            return Err(SeriesError::NonIdentityLinearPart(format!("u^{i}")));
        }
    }
    // h_i := comp_i - u^i, then iterate v_i <- u^i - h_i(v)
    let mut h: BTreeMap<u16, GradedSeries<Rat>> = BTreeMap::new();
    for (&i, comp) in components {
        let mut hi = comp.clone();
        hi.add_term(MultiIndex::u_var(i), -Rat::one());
        h.insert(i, hi);
    }
    let ident: BTreeMap<u16, GradedSeries<Rat>> = components
        .keys()
        .map(|&i| {
            let mut s = GradedSeries::zero(trunc);
            s.add_term(MultiIndex::u_var(i), Rat::one());
            (i, s)
        })
        .collect();
    let mut v = ident.clone();
    let rounds = trunc.u_deg + 2;
    for _ in 0..rounds {
        let subst: Substitution = v
            .iter()
            .map(|(&i, s)| ((VarKind::U, i), s.clone()))
            .collect();
        let mut next = BTreeMap::new();
        for (&i, hi) in &h {
            let im = compose(hi, &subst, trunc)?;
            let mut vi = ident.get(&i).unwrap().clone();
            vi = vi.sub(&im);
            next.insert(i, vi);
        }
        if next == v {
            break;
        }
        v = next;
    }
    // verify the round trip exactly up to truncation
    let subst: Substitution = v
        .iter()
        .map(|(&i, s)| ((VarKind::U, i), s.clone()))
        .collect();
    for (&i, comp) in components {
        let round = compose(comp, &subst, trunc)?;
        if round != ident[&i] {
            return Err(SeriesError::NonIdentityLinearPart(format!(
                "reversion of u^{i} did not stabilize"
            )));
        }
    }
    Ok(v)
}
