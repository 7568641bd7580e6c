//! Fixed two-dimensional binning and total-variation distance.

/// A uniform `bins x bins` grid over a square, with one extra overflow cell
/// collecting everything outside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareGrid {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl SquareGrid {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(hi > lo && bins > 0);
        Self { lo, hi, bins }
    }

    pub fn cells(&self) -> usize {
        self.bins * self.bins + 1
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    fn axis_index(&self, v: f64) -> Option<usize> {
        if !(v >= self.lo && v < self.hi) {
            return None;
        }
        let i = ((v - self.lo) / self.width()) as usize;
        Some(i.min(self.bins - 1))
    }

    /// Cell index; the last index is the overflow cell.
    pub fn index(&self, a: f64, b: f64) -> usize {
        match (self.axis_index(a), self.axis_index(b)) {
            (Some(i), Some(j)) => i * self.bins + j,
            _ => self.bins * self.bins,
        }
    }

    /// Bounds `((a_lo, a_hi), (b_lo, b_hi))` of a regular cell.
    pub fn bounds(&self, cell: usize) -> ((f64, f64), (f64, f64)) {
        let (i, j) = (cell / self.bins, cell % self.bins);
        let w = self.width();
        let a = self.lo + i as f64 * w;
        let b = self.lo + j as f64 * w;
        ((a, a + w), (b, b + w))
    }

    /// Empirical cell frequencies of `points`.
    pub fn frequencies<I: IntoIterator<Item = (f64, f64)>>(&self, points: I) -> Vec<f64> {
        let mut counts = vec![0u64; self.cells()];
        let mut n = 0u64;
        for (a, b) in points {
            counts[self.index(a, b)] += 1;
            n += 1;
        }
        let n = n.max(1) as f64;
        counts.into_iter().map(|c| c as f64 / n).collect()
    }
}

/// `0.5 * sum |p_i - q_i|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_and_overflow() {
        let g = SquareGrid::new(-1.0, 1.0, 4);
        assert_eq!(g.cells(), 17);
        assert_eq!(g.index(-1.0, -1.0), 0);
        assert_eq!(g.index(0.99, 0.99), 15);
        assert_eq!(g.index(1.0, 0.0), 16);
        assert_eq!(g.index(f64::NAN, 0.0), 16);
        let ((a0, a1), (b0, b1)) = g.bounds(6);
        assert_eq!((a0, a1, b0, b1), (-0.5, 0.0, 0.0, 0.5));
    }

    #[test]
    fn tv_of_identical_and_disjoint() {
        let p = [0.25, 0.25, 0.5];
        assert_eq!(total_variation(&p, &p), 0.0);
        assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
    }

    #[test]
    fn frequencies_sum_to_one() {
        let g = SquareGrid::new(0.0, 1.0, 3);
        let f = g.frequencies([(0.1, 0.1), (0.5, 0.9), (2.0, 0.0), (0.2, 0.2)]);
        assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(f[0], 0.5);
        assert_eq!(f[9], 0.25);
    }
}
