use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowPolicy {
    /// Consecutive blocks of `m` levels.
    FixedLevelCount(usize),
    /// Energy intervals of equal width.
    FixedWidth(f64),
}

/// `max(50, dim / 40)` levels per window.
pub fn default_level_count(dim: usize) -> usize {
    (dim / 40).max(50)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    /// Indices into the ascending energy list.
    pub states: Range<usize>,
    /// Fewer levels than the policy asks for (only the last fixed-count window).
    pub short: bool,
}

impl Window {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Mean energy of the member levels.
    pub fn mean_energy(&self, energies: &[f64]) -> f64 {
        energies[self.states.clone()].iter().sum::<f64>() / self.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyWindowing {
    pub policy: WindowPolicy,
    pub windows: Vec<Window>,
}

impl EnergyWindowing {
    /// Windows over ascending `energies`; every window holds at least two levels.
    ///
    /// A fixed-count remainder of a single level joins the previous window.
    /// Fixed-width intervals holding fewer than two levels are skipped.
    pub fn new(energies: &[f64], policy: WindowPolicy) -> Result<Self> {
        if energies.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "{} levels cannot form a window",
                energies.len()
            )));
        }
        if energies.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter("energies must be ascending".into()));
        }
        let range = |states: Range<usize>, short| Window {
            lo: energies[states.start],
            hi: energies[states.end - 1],
            states,
            short,
        };
        let mut windows = Vec::new();
        match policy {
            WindowPolicy::FixedLevelCount(m) => {
                if m < 2 {
                    return Err(Error::InvalidParameter(format!("window of {m} levels")));
                }
                let mut start = 0;
                while start < energies.len() {
                    let mut end = (start + m).min(energies.len());
                    if energies.len() - end == 1 {
                        end = energies.len();
                    }
                    windows.push(range(start..end, end - start < m));
                    start = end;
                }
            }
            WindowPolicy::FixedWidth(width) => {
                if !(width > 0.0) {
                    return Err(Error::InvalidParameter(format!("window width {width}")));
                }
                let origin = energies[0];
                let mut start = 0;
                while start < energies.len() {
                    let cell = ((energies[start] - origin) / width).floor();
                    let upper = origin + (cell + 1.0) * width;
                    let end = start + energies[start..].iter().take_while(|&&e| e < upper).count().max(1);
                    if end - start >= 2 {
                        let mut w = range(start..end, false);
                        w.lo = origin + cell * width;
                        w.hi = upper;
                        windows.push(w);
                    }
                    start = end;
                }
            }
        }
        Ok(Self { policy, windows })
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levels(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 * 0.5).collect()
    }

    #[test]
    fn fixed_count() {
        let w = EnergyWindowing::new(&levels(23), WindowPolicy::FixedLevelCount(5)).unwrap();
        let sizes: Vec<_> = w.windows.iter().map(Window::len).collect();
        assert_eq!(sizes, [5, 5, 5, 5, 3]);
        assert!(w.windows[4].short && !w.windows[0].short);
        let merged = EnergyWindowing::new(&levels(21), WindowPolicy::FixedLevelCount(5)).unwrap();
        let sizes: Vec<_> = merged.windows.iter().map(Window::len).collect();
        assert_eq!(sizes, [5, 5, 5, 6]);
        assert_eq!(default_level_count(1182), 50);
        assert_eq!(default_level_count(7712), 192);
    }

    #[test]
    fn fixed_width() {
        let energies = [0.0, 0.1, 0.2, 1.5, 2.1, 2.2, 2.3, 2.9];
        let w = EnergyWindowing::new(&energies, WindowPolicy::FixedWidth(1.0)).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w.windows[0].states, 0..3);
        assert_eq!(w.windows[1].states, 4..8);
        assert_eq!((w.windows[1].lo, w.windows[1].hi), (2.0, 3.0));
        for window in &w.windows {
            assert!(window.len() >= 2);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(EnergyWindowing::new(&[1.0], WindowPolicy::FixedLevelCount(5)).is_err());
        assert!(EnergyWindowing::new(&[2.0, 1.0], WindowPolicy::FixedLevelCount(5)).is_err());
        assert!(EnergyWindowing::new(&levels(9), WindowPolicy::FixedLevelCount(1)).is_err());
    }
}
