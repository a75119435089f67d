//! Small dense-vector kernels over complex amplitudes.

use num_complex::Complex64;

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    norm_sqr(a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: Complex64, x: &mut [Complex64]) {
    for xi in x {
        *xi *= alpha;
    }
}

pub fn scaled(alpha: Complex64, x: &[Complex64]) -> Vec<Complex64> {
    x.iter().map(|xi| alpha * xi).collect()
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn is_finite(a: &[Complex64]) -> bool {
    a.iter().all(|x| x.re.is_finite() && x.im.is_finite())
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Neumaier-compensated summation; result is independent of grouping to
/// well below the working tolerance of the kernels.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// In-place unnormalized Walsh–Hadamard transform: `out[z] = Σ_k (−1)^{popcount(k & z)} in[k]`.
pub(crate) fn walsh_hadamard(data: &mut [Complex64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in data.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn walsh_hadamard_matches_definition() {
        let input: Vec<Complex64> = (0..8).map(|k| Complex64::new(k as f64, -(k as f64) * 0.5)).collect();
        let mut fast = input.clone();
        walsh_hadamard(&mut fast);
        for z in 0..8usize {
            let direct: Complex64 = (0..8usize)
                .map(|k| {
                    let sign = if (k & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    input[k] * sign
                })
                .sum();
            assert!((direct - fast[z]).norm() < 1e-12);
        }
    }

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let acc: CompensatedSum = [1e16, 1.0, -1e16].into_iter().collect();
        assert_eq!(acc.value(), 1.0);
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        let a = [Complex64::new(0.0, 1.0)];
        let b = [c(1.0)];
        assert_eq!(inner(&a, &b), Complex64::new(0.0, -1.0));
    }
}
