//! The residue pairing on the symplectic loop space.

use super::ConeError;
use crate::model::FermatModel;
use crate::rat::Rat;
use crate::series::{product_window, GradedSeries, StateVec, ZSeries};
use num_traits::Zero;

/// State-space pairing (v, w) = sum over i+j = d-2 of v_i w_j. Both vectors
/// must be narrow-supported.
pub fn pair_states(model: &FermatModel, v: &StateVec, w: &StateVec) -> Rat {
    let mut acc = Rat::zero();
    for (&i, a) in v.support() {
        let j = model.dual(i);
        let b = w.component(j);
        if !b.is_zero() {
            acc += a * b;
        }
    }
    acc
}

fn assert_narrow(model: &FermatModel, f: &ZSeries<StateVec>) -> Result<(), ConeError> {
    for (_, g) in f.iter() {
        for (_, v) in g.terms() {
            for (&k, _) in v.support() {
                if !model.is_narrow(k) {
                    return Err(ConeError::BroadContent(k));
                }
            }
        }
    }
    Ok(())
}

/// Pairing applied coefficient-wise to two graded state-valued series.
pub fn pair_graded(
    model: &FermatModel,
    a: &GradedSeries<StateVec>,
    b: &GradedSeries<StateVec>,
) -> GradedSeries<Rat> {
    let trunc = a.trunc.meet(&b.trunc);
    let mut out = GradedSeries::zero(trunc);
    for (ia, va) in a.terms() {
        for (ib, vb) in b.terms() {
            let idx = ia.mul(ib);
            if !trunc.admits(&idx) {
                continue;
            }
            let c = pair_states(model, va, vb);
            out.add_term(idx, c);
        }
    }
    out
}

/// The symplectic integrand: the pairing series of f(z) against g(-z).
/// Its z^{-1} coefficient is Omega(f, g).
pub fn omega_product(
    model: &FermatModel,
    f: &ZSeries<StateVec>,
    g: &ZSeries<StateVec>,
) -> Result<ZSeries<Rat>, ConeError> {
    assert_narrow(model, f)?;
    assert_narrow(model, g)?;
    let g_neg = g.negate_z();
    let window = product_window(&f.window, &g_neg.window);
    let trunc = f.trunc.meet(&g.trunc);
    let mut out = ZSeries::zero(trunc, window);
    for (p, ga) in f.iter() {
        for (q, gb) in g_neg.iter() {
            out.add_term(p + q, pair_graded(model, ga, gb));
        }
    }
    Ok(out)
}

/// Omega(f, g) = Res_{z=0} (f(z), g(-z))_W.
pub fn omega_pairing(
    model: &FermatModel,
    f: &ZSeries<StateVec>,
    g: &ZSeries<StateVec>,
) -> Result<GradedSeries<Rat>, ConeError> {
    Ok(omega_product(model, f, g)?.residue())
}

/// Dilaton shift q(z) = t(z) - phi_0 z identifying the potential's domain
/// with the positive polarization half.
pub fn dilaton_shift(t: &ZSeries<StateVec>) -> ZSeries<StateVec> {
    let mut lead = ZSeries::zero(t.trunc, t.window);
    lead.add_term(
        1,
        GradedSeries::basis_term(
            crate::series::MultiIndex::one(),
            0,
            Rat::from_integer(1.into()),
            t.trunc,
        ),
    );
    t.sub(&lead)
}

/// Inverse of the dilaton shift: t(z) = q(z) + phi_0 z.
pub fn dilaton_unshift(q: &ZSeries<StateVec>) -> ZSeries<StateVec> {
    let mut lead = ZSeries::zero(q.trunc, q.window);
    lead.add_term(
        1,
        GradedSeries::basis_term(
            crate::series::MultiIndex::one(),
            0,
            Rat::from_integer(1.into()),
            q.trunc,
        ),
    );
    q.add(&lead)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;
    use crate::series::{MultiIndex, Trunc, Window};
    use num_traits::One;

    fn quintic() -> FermatModel {
        FermatModel::build(&[1, 1, 1, 1, 1], 5).unwrap()
    }

    fn tr() -> Trunc {
        Trunc::new(3, 2)
    }

    #[test]
    fn residue_pairing_basis() {
        // f = phi_0 z^{-1}, g = phi_{d-2}: Omega = 1
        let m = quintic();
        let mut f = ZSeries::zero(tr(), Window::new(-2, 1));
        f.add_term(
            -1,
            GradedSeries::basis_term(MultiIndex::one(), 0, Rat::one(), tr()),
        );
        let mut g = ZSeries::zero(tr(), Window::new(-2, 1));
        g.add_term(
            0,
            GradedSeries::basis_term(MultiIndex::one(), 3, Rat::one(), tr()),
        );
        let om = omega_pairing(&m, &f, &g).unwrap();
        assert_eq!(om.constant_term(), rat_int(1));
    }

    #[test]
    fn positive_parts_isotropic() {
        // polynomial-in-z series pair to zero residue
        let m = quintic();
        let mut f = ZSeries::zero(tr(), Window::new(-3, 3));
        let mut g = ZSeries::zero(tr(), Window::new(-3, 3));
        for j in 0..=2 {
            f.add_term(
                j,
                GradedSeries::basis_term(MultiIndex::u_var(1), 1, rat_int(j as i64 + 1), tr()),
            );
            g.add_term(
                j,
                GradedSeries::basis_term(MultiIndex::one(), 2, rat_int(2 * j as i64 + 1), tr()),
            );
        }
        let om = omega_pairing(&m, &f, &g).unwrap();
        assert!(om.is_zero());
    }

    #[test]
    fn broad_content_rejected() {
        let m = quintic();
        let mut f = ZSeries::zero(tr(), Window::new(-1, 1));
        f.add_term(
            0,
            GradedSeries::basis_term(MultiIndex::one(), 4, Rat::one(), tr()),
        );
        let err = omega_pairing(&m, &f, &f);
        assert!(matches!(err, Err(ConeError::BroadContent(4))));
    }
}
