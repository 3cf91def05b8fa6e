use crate::matcore::{ComplexMatrix, DensityOperator, C64};

/// The anti-unitary time-reversal operator, realised as complex conjugation
/// in the computational basis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TimeReversal;

/// Objects on which `Theta` acts.
///
/// For vectors `Theta v = v*`. For operators the action is the similarity
/// `Theta A Theta^dagger`, which is also entrywise conjugation.
pub trait TimeReversible {
    fn time_reversed(&self) -> Self;
}

impl TimeReversible for Vec<C64> {
    fn time_reversed(&self) -> Self {
        self.iter().map(|z| z.conj()).collect()
    }
}

impl TimeReversible for ComplexMatrix {
    fn time_reversed(&self) -> Self {
        self.conj()
    }
}

impl TimeReversible for DensityOperator {
    fn time_reversed(&self) -> Self {
        self.conj()
    }
}

impl TimeReversal {
    pub fn apply<T: TimeReversible>(&self, x: &T) -> T {
        x.time_reversed()
    }

    /// `Theta^dagger` acts identically since `Theta` is an involution.
    pub fn apply_inverse<T: TimeReversible>(&self, x: &T) -> T {
        x.time_reversed()
    }
}

/// Convenience form of [`TimeReversal::apply`].
pub fn apply_time_reversal<T: TimeReversible>(x: &T) -> T {
    x.time_reversed()
}
