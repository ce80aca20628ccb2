//! Sparse single-excitation state vectors.

use super::mode::{Mode, Polarization, RailId, TerminalId};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// A sparse state vector over [`Mode`]s.
///
/// The map only stores nonzero amplitudes (exact zeros are pruned on
/// insertion), and iteration order is the total `Mode` order, so every
/// derived quantity is deterministic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhotonState {
    amps: BTreeMap<Mode, Complex64>,
}

impl PhotonState {
    /// The empty (vacuum) state: no amplitude anywhere.
    pub fn vacuum() -> Self {
        PhotonState::default()
    }

    /// A normalized single-mode state on a live rail.
    pub fn single(rail: impl Into<String>, pol: Option<Polarization>) -> Self {
        let mut s = PhotonState::vacuum();
        s.set(Mode::live(rail, pol), Complex64::new(1.0, 0.0));
        s
    }

    pub fn is_vacuum(&self) -> bool {
        self.amps.is_empty()
    }

    /// Amplitude at a mode (zero when absent).
    pub fn amplitude(&self, mode: &Mode) -> Complex64 {
        self.amps.get(mode).copied().unwrap_or(Complex64::ZERO)
    }

    /// Set an amplitude, pruning exact zeros.
    pub fn set(&mut self, mode: Mode, amp: Complex64) {
        if amp == Complex64::ZERO {
            self.amps.remove(&mode);
        } else {
            self.amps.insert(mode, amp);
        }
    }

    /// Remove and return the amplitude at a mode (zero when absent).
    pub fn take(&mut self, mode: &Mode) -> Complex64 {
        self.amps.remove(mode).unwrap_or(Complex64::ZERO)
    }

    /// Add `scale * other` into `self` (used by linearity checks).
    pub fn add_scaled(&mut self, other: &PhotonState, scale: Complex64) {
        for (mode, amp) in &other.amps {
            let v = self.amplitude(mode) + scale * amp;
            self.set(mode.clone(), v);
        }
    }

    pub fn scale(&mut self, factor: Complex64) {
        for amp in self.amps.values_mut() {
            *amp *= factor;
        }
        self.amps.retain(|_, a| *a != Complex64::ZERO);
    }

    /// Total squared norm: Σ|amplitude|² over all (live and absorbed) modes.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Squared norm restricted to live (on-rail) modes.
    pub fn live_norm_sqr(&self) -> f64 {
        self.amps
            .iter()
            .filter(|(m, _)| matches!(m, Mode::Live { .. }))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Inner product ⟨self|other⟩ (conjugate-linear in `self`).
    pub fn inner(&self, other: &PhotonState) -> Complex64 {
        // Iterate the smaller map for speed; symmetry is preserved exactly
        // because multiplication is commutative.
        let (small, large, conj_small) = if self.amps.len() <= other.amps.len() {
            (&self.amps, &other.amps, true)
        } else {
            (&other.amps, &self.amps, false)
        };
        let mut acc = Complex64::ZERO;
        for (mode, amp) in small {
            if let Some(b) = large.get(mode) {
                acc += if conj_small {
                    amp.conj() * b
                } else {
                    b.conj() * amp
                };
            }
        }
        acc
    }

    /// Iterate all (mode, amplitude) pairs in mode order.
    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &Complex64)> {
        self.amps.iter()
    }

    /// Number of stored (nonzero) modes.
    pub fn mode_count(&self) -> usize {
        self.amps.len()
    }

    /// Probability mass accumulated in each terminal, in terminal order.
    pub fn terminal_mass(&self) -> BTreeMap<TerminalId, f64> {
        let mut out: BTreeMap<TerminalId, f64> = BTreeMap::new();
        for (mode, amp) in &self.amps {
            if let Mode::Absorbed { terminal, .. } = mode {
                *out.entry(terminal.clone()).or_insert(0.0) += amp.norm_sqr();
            }
        }
        out
    }

    /// Live probability mass per rail, in rail order.
    pub fn rail_mass(&self) -> BTreeMap<RailId, f64> {
        let mut out: BTreeMap<RailId, f64> = BTreeMap::new();
        for (mode, amp) in &self.amps {
            if let Mode::Live { rail, .. } = mode {
                *out.entry(rail.clone()).or_insert(0.0) += amp.norm_sqr();
            }
        }
        out
    }

    /// Keep only modes satisfying the predicate (a projection).
    pub fn project(&self, keep: impl Fn(&Mode) -> bool) -> PhotonState {
        PhotonState {
            amps: self
                .amps
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, a)| (m.clone(), *a))
                .collect(),
        }
    }

    /// Projection onto the event modes of one terminal.
    pub fn project_terminal(&self, terminal: &TerminalId) -> PhotonState {
        self.project(|m| m.terminal() == Some(terminal))
    }

    /// Normalize to unit norm; returns the pre-normalization squared norm.
    pub fn normalize(&mut self) -> f64 {
        let n2 = self.norm_sqr();
        if n2 > 0.0 {
            let inv = 1.0 / n2.sqrt();
            self.scale(Complex64::new(inv, 0.0));
        }
        n2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::mode::Polarization::{Horizontal, Vertical};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_mode_state_is_normalized() {
        let s = PhotonState::single("a", None);
        assert_eq!(s.norm_sqr(), 1.0);
        assert_eq!(s.mode_count(), 1);
    }

    #[test]
    fn set_zero_prunes_the_mode() {
        let mut s = PhotonState::single("a", Some(Horizontal));
        s.set(Mode::live("a", Some(Horizontal)), Complex64::ZERO);
        assert!(s.is_vacuum());
    }

    #[test]
    fn inner_product_is_conjugate_symmetric() {
        let mut x = PhotonState::vacuum();
        x.set(Mode::live("a", None), c(0.6, 0.3));
        x.set(Mode::live("b", None), c(-0.2, 0.7));
        let mut y = PhotonState::vacuum();
        y.set(Mode::live("b", None), c(0.1, -0.4));
        y.set(Mode::live("c", None), c(0.9, 0.0));
        let xy = x.inner(&y);
        let yx = y.inner(&x);
        assert!((xy - yx.conj()).norm() < 1e-15);
    }

    #[test]
    fn terminal_mass_groups_by_label() {
        let mut s = PhotonState::vacuum();
        s.set(
            Mode::Absorbed {
                terminal: TerminalId::new("B"),
                event: 3,
                pol: Some(Vertical),
            },
            c(0.5, 0.0),
        );
        s.set(
            Mode::Absorbed {
                terminal: TerminalId::new("B"),
                event: 9,
                pol: Some(Vertical),
            },
            c(0.0, 0.5),
        );
        let mass = s.terminal_mass();
        assert_eq!(mass.len(), 1);
        assert!((mass[&TerminalId::new("B")] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn add_scaled_superposes() {
        let a = PhotonState::single("a", None);
        let b = PhotonState::single("b", None);
        let mut s = a.clone();
        s.scale(c(0.6, 0.0));
        s.add_scaled(&b, c(0.8, 0.0));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(s.amplitude(&Mode::live("a", None)), c(0.6, 0.0));
    }

    #[test]
    fn normalize_rescales_to_unit_norm() {
        let mut s = PhotonState::vacuum();
        s.set(Mode::live("a", None), c(3.0, 0.0));
        s.set(Mode::live("b", None), c(0.0, 4.0));
        let before = s.normalize();
        assert!((before - 25.0).abs() < 1e-12);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }
}
