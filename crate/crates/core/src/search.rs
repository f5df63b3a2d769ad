//! One-dimensional maximization for unimodal (quasiconcave) objectives.

/// `(sqrt(5) - 1) / 2`
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization of `f` over `[lo, hi]` until the bracket is
/// narrower than `tol`. Returns the best point seen, endpoints included.
pub fn golden_section_max<F>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut best = (lo, f(lo));
    let f_hi = f(hi);
    if f_hi > best.1 {
        best = (hi, f_hi);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    let mid = 0.5 * (a + b);
    let f_mid = f(mid);
    if f_mid > best.1 {
        best = (mid, f_mid);
    }
    best
}

/// Result of sampling an objective on a uniform grid.
#[derive(Debug, Clone)]
pub struct Scan {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub argmax: usize,
}

impl Scan {
    pub fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> Self {
        let n = points.max(2);
        let xs: Vec<f64> = (0..n)
            .map(|i| {
                if i + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect();
        let values: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let argmax = values
            .iter()
            .enumerate()
            .fold(0, |best, (i, &v)| if v > values[best] { i } else { best });
        Self { xs, values, argmax }
    }

    /// True when the samples rise to the maximum and then fall, allowing
    /// reversals no larger than `tol`.
    pub fn is_unimodal(&self, tol: f64) -> bool {
        let rising = self.values[..=self.argmax].windows(2).all(|w| w[1] >= w[0] - tol);
        let falling = self.values[self.argmax..].windows(2).all(|w| w[1] <= w[0] + tol);
        rising && falling
    }
}

/// Whether every super-level set `{i : v[i] >= level}` of the samples is a
/// contiguous index range, checked at every sampled level.
pub fn super_level_sets_contiguous(values: &[f64]) -> bool {
    // Equivalent to: no index lies strictly below both a left and a right neighbour set.
    let n = values.len();
    if n < 3 {
        return true;
    }
    let mut prefix_max = vec![f64::NEG_INFINITY; n];
    let mut suffix_max = vec![f64::NEG_INFINITY; n];
    for i in 1..n {
        prefix_max[i] = prefix_max[i - 1].max(values[i - 1]);
    }
    for i in (0..n - 1).rev() {
        suffix_max[i] = suffix_max[i + 1].max(values[i + 1]);
    }
    (0..n).all(|i| values[i] >= prefix_max[i].min(suffix_max[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-9);
        assert!(fx <= 0.0 && fx > -1e-18);
    }

    #[test]
    fn golden_respects_boundary_maximum() {
        let (x, _) = golden_section_max(|x| -x, 0.2, 0.9, 1e-10);
        assert_eq!(x, 0.2);
        let (x, _) = golden_section_max(|x| x, 0.2, 0.9, 1e-10);
        assert_eq!(x, 0.9);
    }

    #[test]
    fn scan_detects_bimodal() {
        let s = Scan::new(|x| (6.0 * x).sin().abs(), 0.0, 1.0, 101);
        assert!(!s.is_unimodal(1e-12));
        let s = Scan::new(|x| x * (1.0 - x), 0.0, 1.0, 101);
        assert!(s.is_unimodal(1e-12));
        assert_eq!(s.argmax, 50);
    }

    #[test]
    fn contiguity() {
        assert!(super_level_sets_contiguous(&[0.0, 1.0, 3.0, 3.0, 2.0, 0.5]));
        assert!(super_level_sets_contiguous(&[1.0, 1.0, 1.0]));
        assert!(!super_level_sets_contiguous(&[0.0, 2.0, 1.0, 2.5, 0.0]));
    }
}
