//! Finite-window Laurent objects in z with graded-series coefficients.

use super::graded::{Coeff, GradedSeries, StateVec};
use super::mono::Trunc;
use crate::rat::Rat;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// The z-power range on which a series is completely known. Coefficients
/// outside the window are unknown (truncated away), absent coefficients
/// inside the window are zero.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Window {
    pub min: i32,
    pub max: i32,
}

impl Window {
    pub fn new(min: i32, max: i32) -> Self {
        assert!(min <= max, "empty z-window");
        Window { min, max }
    }

    pub fn contains(&self, j: i32) -> bool {
        self.min <= j && j <= self.max
    }

    pub fn intersect(&self, other: &Window) -> Window {
        Window {
            min: self.min.max(other.min),
            max: self.max.min(other.max),
        }
    }
}

/// Laurent series in z over a graded coefficient ring, on an explicit window.
#[derive(Clone, PartialEq, Debug)]
pub struct ZSeries<C: Coeff> {
    coeffs: BTreeMap<i32, GradedSeries<C>>,
    pub window: Window,
    pub trunc: Trunc,
}

impl<C: Coeff> ZSeries<C> {
    pub fn zero(trunc: Trunc, window: Window) -> Self {
        ZSeries {
            coeffs: BTreeMap::new(),
            window,
            trunc,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i32, &GradedSeries<C>)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, j: i32) -> GradedSeries<C> {
        self.coeffs
            .get(&j)
            .cloned()
            .unwrap_or_else(|| GradedSeries::zero(self.trunc))
    }

    pub fn coefficient_ref(&self, j: i32) -> Option<&GradedSeries<C>> {
        self.coeffs.get(&j)
    }

    /// Add into the coefficient of z^j; silently drops powers outside the
    /// window (they are not part of the represented object).
    pub fn add_term(&mut self, j: i32, g: GradedSeries<C>) {
        if !self.window.contains(j) || g.is_zero() {
            return;
        }
        match self.coeffs.entry(j) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(g.truncated(self.trunc));
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&g);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let window = self.window.intersect(&other.window);
        let trunc = self.trunc.meet(&other.trunc);
        let mut out = ZSeries::zero(trunc, window);
        for (j, g) in &self.coeffs {
            out.add_term(*j, g.clone());
        }
        for (j, g) in &other.coeffs {
            out.add_term(*j, g.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut neg = other.clone();
        neg.negate();
        self.add(&neg)
    }

    pub fn negate(&mut self) {
        for g in self.coeffs.values_mut() {
            g.negate();
        }
    }

    pub fn scale(&mut self, k: &Rat) {
        let keys: Vec<i32> = self.coeffs.keys().copied().collect();
        for j in keys {
            let g = self.coeffs.get_mut(&j).unwrap();
            g.scale(k);
            if g.is_zero() {
                self.coeffs.remove(&j);
            }
        }
    }

    /// `f(z) -> f(-z)`: multiply the z^j coefficient by (-1)^j. Involution.
    pub fn negate_z(&self) -> Self {
        let mut out = ZSeries::zero(self.trunc, self.window);
        for (j, g) in &self.coeffs {
            if j.rem_euclid(2) == 1 {
                let mut g2 = g.clone();
                g2.negate();
                out.add_term(*j, g2);
            } else {
                out.add_term(*j, g.clone());
            }
        }
        out
    }

    /// Coefficient of z^{-1} (the residue).
    pub fn residue(&self) -> GradedSeries<C> {
        self.coefficient(-1)
    }

    /// Polarization split: powers >= 0.
    pub fn positive_part(&self) -> Self {
        let mut out = ZSeries::zero(self.trunc, Window::new(0, self.window.max.max(0)));
        for (j, g) in &self.coeffs {
            if *j >= 0 {
                out.add_term(*j, g.clone());
            }
        }
        out
    }

    /// Polarization split: powers < 0.
    pub fn negative_part(&self) -> Self {
        let mut out = ZSeries::zero(self.trunc, Window::new(self.window.min.min(-1), -1));
        for (j, g) in &self.coeffs {
            if *j < 0 {
                out.add_term(*j, g.clone());
            }
        }
        out
    }

    /// Multiply each coefficient by a z-free scalar series.
    pub fn mul_scalar_series(&self, scalar: &GradedSeries<Rat>) -> Self {
        let mut out = ZSeries::zero(self.trunc.meet(&scalar.trunc), self.window);
        for (j, g) in &self.coeffs {
            out.add_term(*j, g.mul_scalar_series(scalar));
        }
        out
    }

    /// Shift by z^k. The window shifts along.
    pub fn shift_z(&self, k: i32) -> Self {
        let mut out = ZSeries::zero(
            self.trunc,
            Window::new(self.window.min + k, self.window.max + k),
        );
        for (j, g) in &self.coeffs {
            out.add_term(*j + k, g.clone());
        }
        out
    }

    /// Apply a graded-series map to every coefficient.
    pub fn map_coeffs<D: Coeff>(
        &self,
        trunc: Trunc,
        mut f: impl FnMut(&GradedSeries<C>) -> GradedSeries<D>,
    ) -> ZSeries<D> {
        let mut out = ZSeries::zero(trunc, self.window);
        for (j, g) in &self.coeffs {
            out.add_term(*j, f(g));
        }
        out
    }

    /// Largest z-power with a nonzero coefficient, if any.
    pub fn max_power(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_power(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    /// Restrict the window (coefficients outside are dropped).
    pub fn windowed(&self, window: Window) -> Self {
        let mut out = ZSeries::zero(self.trunc, window);
        for (j, g) in &self.coeffs {
            out.add_term(*j, g.clone());
        }
        out
    }

    /// Re-truncate every coefficient.
    pub fn truncated(&self, trunc: Trunc) -> Self {
        let mut out = ZSeries::zero(trunc, self.window);
        for (j, g) in &self.coeffs {
            out.add_term(*j, g.truncated(trunc));
        }
        out
    }
}

impl ZSeries<StateVec> {
    /// Keep only components on sectors satisfying the predicate.
    pub fn retain_sectors(&mut self, keep: impl Fn(u16) -> bool + Copy) {
        let keys: Vec<i32> = self.coeffs.keys().copied().collect();
        for j in keys {
            let g = self.coeffs.get_mut(&j).unwrap();
            g.retain_sectors(keep);
            if g.is_zero() {
                self.coeffs.remove(&j);
            }
        }
    }

    pub fn deriv_u(&self, sector: u16) -> Self {
        let mut out = ZSeries::zero(self.trunc, self.window);
        for (j, g) in &self.coeffs {
            out.add_term(*j, g.deriv_u(sector));
        }
        out
    }

    pub fn deriv_t(&self, sector: u16) -> Self {
        let mut out = ZSeries::zero(self.trunc, self.window);
        for (j, g) in &self.coeffs {
            out.add_term(*j, g.deriv_t(sector));
        }
        out
    }

    /// Drop every term containing the u-variable `sector` from all
    /// coefficients (e.g. the u^0 = 0 specialization).
    pub fn restrict_u_zero(&self, sector: u16) -> Self {
        let mut out = ZSeries::zero(self.trunc, self.window);
        for (j, g) in &self.coeffs {
            out.add_term(*j, g.restrict_u_zero(sector));
        }
        out
    }
}

/// Window of a product series: the range on which the convolution of two
/// completely-known factors is itself completely known.
pub fn product_window(a: &Window, b: &Window) -> Window {
    let max = a.max.saturating_add(b.max);
    let min = (a.min.saturating_add(b.max)).max(b.min.saturating_add(a.max));
    Window {
        min: min.min(max),
        max,
    }
}
