//! Work accounting shared by the producers and the enumerator's clock.

pub trait Meter {
    fn tick(&mut self, units: u64);
}

/// Discards every tick.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoMeter;

impl Meter for NoMeter {
    fn tick(&mut self, _units: u64) {}
}

/// Sums ticks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counter(pub u64);

impl Meter for Counter {
    fn tick(&mut self, units: u64) {
        self.0 += units;
    }
}
