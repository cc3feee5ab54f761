//! Summation and enumeration primitives shared by the expectation routines.
//!
//! The inclusion-exclusion sums evaluated here alternate in sign and cancel
//! heavily for small probabilities, so every running quantity is kept in
//! either a Neumaier-compensated accumulator or an error-free two-float pair.

/// Knuth's TwoSum: returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Neumaier-compensated accumulator for alternating series.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, value: f64) {
        let (s, e) = two_sum(self.sum, value);
        self.sum = s;
        self.comp += e;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Unevaluated two-float sum `hi + lo`, exact under repeated add/subtract of
/// f64 values. Used for running subset sums so the value handed to each
/// reciprocal is the correctly rounded exact sum, independent of the
/// enumeration path.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct TwoFloat {
    hi: f64,
    lo: f64,
}

impl TwoFloat {
    #[inline]
    pub fn new(value: f64) -> Self {
        Self { hi: value, lo: 0.0 }
    }

    /// Exact sum of two f64 values.
    #[inline]
    pub fn sum2(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Self { hi, lo }
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let (s, e) = two_sum(self.hi, value);
        let lo = self.lo + e;
        // renormalize; |lo| <= ulp(s) holds afterwards
        let (hi, lo) = two_sum(s, lo);
        self.hi = hi;
        self.lo = lo;
    }

    #[inline]
    pub fn sub(&mut self, value: f64) {
        self.add(-value);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// Drives a binary-reflected Gray code over `n` elements: one membership flip
/// per step, visiting every non-empty subset exactly once.
///
/// `visit(index, added, members)` receives the flipped element, whether it was
/// added or removed, and the subset size after the flip.
#[inline]
pub(crate) fn for_each_gray_flip<F>(n: usize, mut visit: F)
where
    F: FnMut(usize, bool, u32),
{
    debug_assert!(n < 63);
    let mut in_set = [false; 64];
    let mut members = 0u32;
    for i in 1u64..(1u64 << n) {
        let bit = i.trailing_zeros() as usize;
        let added = !in_set[bit];
        in_set[bit] = added;
        if added {
            members += 1;
        } else {
            members -= 1;
        }
        visit(bit, added, members);
    }
}

/// Visits every non-empty subset `S` of `values`, calling
/// `visit(|S|, base + sum of S)`. The running sum is error-free.
#[inline]
pub(crate) fn for_each_subset_sum<F>(values: &[f64], base: TwoFloat, mut visit: F)
where
    F: FnMut(u32, f64),
{
    let mut sum = base;
    for_each_gray_flip(values.len(), |bit, added, members| {
        if added {
            sum.add(values[bit]);
        } else {
            sum.sub(values[bit]);
        }
        visit(members, sum.value());
    });
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess for the i-th positive root.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let step = p0 / dp;
            z -= step;
            if step.abs() <= 1e-15 {
                // one final polish keeps the residual at machine level
                let mut q0 = 1.0;
                let mut q1 = 0.0;
                for j in 0..n {
                    let q2 = q1;
                    q1 = q0;
                    q0 = ((2 * j + 1) as f64 * z * q1 - j as f64 * q2) / (j + 1) as f64;
                }
                dp = n as f64 * (z * q0 - q1) / (z * z - 1.0);
                z -= q0 / dp;
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_is_exact() {
        let (s, e) = two_sum(1e16, 1.0);
        assert_eq!(s, 1e16);
        assert_eq!(e, 1.0);
    }

    #[test]
    fn compensated_sum_survives_cancellation() {
        let mut acc = CompensatedSum::default();
        for v in [1.0, 1e100, 1.0, -1e100] {
            acc.add(v);
        }
        assert_eq!(acc.total(), 2.0);
    }

    #[test]
    fn two_float_add_sub_round_trip() {
        let mut s = TwoFloat::new(0.1);
        s.add(0.2);
        s.add(0.3);
        s.sub(0.2);
        s.sub(0.3);
        assert_eq!(s.value(), 0.1);
    }

    #[test]
    fn gray_flip_visits_every_subset_once() {
        let n = 5;
        let mut seen = std::collections::HashSet::new();
        let mut mask = 0u64;
        for_each_gray_flip(n, |bit, added, members| {
            if added {
                mask |= 1 << bit;
            } else {
                mask &= !(1 << bit);
            }
            assert_eq!(mask.count_ones(), members);
            assert!(seen.insert(mask));
        });
        assert_eq!(seen.len(), (1 << n) - 1);
        assert!(!seen.contains(&0));
    }

    #[test]
    fn subset_sums_match_direct_recomputation() {
        let values = [0.3, 0.7, 0.11, 0.23];
        let mut mask = 0u64;
        let mut visited = 0usize;
        let mut iter = Vec::new();
        for_each_gray_flip(values.len(), |bit, added, _| {
            if added {
                mask |= 1 << bit;
            } else {
                mask &= !(1 << bit);
            }
            iter.push(mask);
        });
        for_each_subset_sum(&values, TwoFloat::default(), |members, sum| {
            let mask = iter[visited];
            visited += 1;
            assert_eq!(mask.count_ones(), members);
            let direct: f64 = (0..values.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| values[i])
                .sum();
            assert!((sum - direct).abs() <= 1e-15);
        });
        assert_eq!(visited, 15);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(15);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // degree 28 monomial: exact value 2/29
        let v: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(28)).sum();
        assert!((v - 2.0 / 29.0).abs() < 1e-15, "got {v}");
        // odd powers vanish by symmetry
        let v: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(13)).sum();
        assert!(v.abs() < 1e-16);
    }
}
