use crate::scalar::Scalar;

/// Half-open interval `[start, end)` with `start < end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval<T> {
    pub start: T,
    pub end: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(start: T, end: T) -> Option<Self> {
        (start < end).then_some(Interval { start, end })
    }

    pub fn contains(&self, other: &Interval<T>) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn intersects(&self, other: &Interval<T>) -> bool {
        self.start < other.end && other.start < self.end
    }
}
