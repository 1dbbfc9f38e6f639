//! Bounded iteration traces.
//!
//! Long solves would otherwise accumulate unbounded diagnostics, so a trace
//! keeps at most `cap` entries: when full, every other retained entry is
//! dropped and the sampling stride doubles. The thinning is deterministic
//! (no sampling randomness) and always retains the most recent entry pushed
//! at the current stride.

/// Capacity-bounded trace with stride-doubling thinning.
#[derive(Debug, Clone)]
pub struct ThinnedTrace<T> {
    entries: Vec<(usize, T)>,
    cap: usize,
    stride: usize,
}

impl<T> ThinnedTrace<T> {
    /// Creates a trace holding at most `cap` entries (`cap >= 2`).
    pub fn new(cap: usize) -> Self {
        ThinnedTrace {
            entries: Vec::new(),
            cap: cap.max(2),
            stride: 1,
        }
    }

    /// Records `value` for iteration `index`. Entries not aligned to the
    /// current stride are discarded.
    pub fn push(&mut self, index: usize, value: T) {
        if index % self.stride != 0 {
            return;
        }
        if self.entries.len() == self.cap {
            let mut keep = 0;
            self.entries.retain(|_| {
                keep += 1;
                (keep - 1) % 2 == 0
            });
            self.stride *= 2;
            if index % self.stride != 0 {
                return;
            }
        }
        self.entries.push((index, value));
    }

    /// Retained `(iteration, value)` pairs in push order.
    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    /// Current sampling stride (1 until the first thinning).
    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stores_everything_under_cap() {
        let mut t = ThinnedTrace::new(10);
        for i in 0..5 {
            t.push(i, i * i);
        }
        assert_eq!(t.len(), 5);
        assert_eq!(t.stride(), 1);
        assert_eq!(t.entries()[3], (3, 9));
    }

    #[test]
    fn never_exceeds_cap_and_doubles_stride() {
        let mut t = ThinnedTrace::new(8);
        for i in 0..1000 {
            t.push(i, i);
        }
        assert!(t.len() <= 8);
        assert!(t.stride() >= 64);
        // Every retained index is aligned to some power-of-two stride and
        // they stay in increasing order.
        let idx: Vec<usize> = t.entries().iter().map(|e| e.0).collect();
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn thinning_keeps_every_other_entry() {
        let mut t = ThinnedTrace::new(4);
        for i in 0..4 {
            t.push(i, i);
        }
        // Next aligned push triggers one thinning: 0,1,2,3 -> 0,2 with stride 2.
        t.push(4, 4);
        let idx: Vec<usize> = t.entries().iter().map(|e| e.0).collect();
        assert_eq!(idx, vec![0, 2, 4]);
        assert_eq!(t.stride(), 2);
    }
}
