//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol·|I|)`. Integrable endpoint
//! singularities of the `1/sqrt(t(T-t))` type are handled by the
//! `t = T·sin²θ` substitution in [`integrate_sin2`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0, max_intervals: 4000 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * h;
    let error = ((kron - gauss) * h).abs();
    (value, error)
}

/// Integrates `f` over `[a, b]`, splitting first at the interior `breaks`.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> QuadResult {
    let mut points: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&p| p > a && p < b))
        .chain(std::iter::once(b))
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        let (value, error) = kronrod(&mut f, w[0], w[1]);
        evaluations += 15;
        heap.push(Segment { a: w[0], b: w[1], value, error });
    }

    let totals = |heap: &BinaryHeap<Segment>| {
        heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
    };
    loop {
        let (value, error) = totals(&heap);
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            return QuadResult { value, abs_error: error, evaluations, converged: true };
        }
        if heap.len() >= tol.max_intervals {
            return QuadResult { value, abs_error: error, evaluations, converged: false };
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot split further in double precision
            heap.push(Segment { error: 0.0, ..worst });
            continue;
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = kronrod(&mut f, lo, hi);
            evaluations += 15;
            heap.push(Segment { a: lo, b: hi, value, error });
        }
    }
}

pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> QuadResult {
    integrate_with_breaks(f, a, b, &[], tol)
}

/// `∫_0^T f(t) dt` through `t = T·sin²θ`, `dt = T·sin 2θ dθ`.
///
/// Integrands bounded by `K/sqrt(t(T-t))` become bounded in `θ`. `f` is never
/// evaluated at the endpoints.
pub fn integrate_sin2<F: FnMut(f64) -> f64>(mut f: F, horizon: f64, tol: Tolerance) -> QuadResult {
    integrate(
        |theta: f64| {
            let s = theta.sin();
            let t = horizon * s * s;
            if t <= 0.0 || t >= horizon {
                return 0.0;
            }
            f(t) * horizon * (2.0 * theta).sin()
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, Tolerance::absolute(1e-13));
        // ∫ x^5 - 3x^2 = [x^6/6 - x^3] from -1 to 2 = (64/6 - 8) - (1/6 + 1) = 1.5
        assert!((r.value - 1.5).abs() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn gaussian_with_breaks() {
        let r = integrate_with_breaks(
            |x| (-0.5 * x * x).exp(),
            -12.0,
            12.0,
            &[-1.0, 0.0, 1.0, 50.0],
            Tolerance::absolute(1e-12),
        );
        assert!((r.value - (2.0 * PI).sqrt()).abs() < 1e-11);
    }

    #[test]
    fn sin2_substitution_removes_endpoint_singularities() {
        // ∫_0^T K / sqrt(t(T-t)) dt = πK for every T
        for &(k, horizon) in &[(1.0, 1.0), (0.37, 2.5), (3.0, 0.1)] {
            let r = integrate_sin2(|t| k / (t * (horizon - t)).sqrt(), horizon, Tolerance::absolute(1e-9));
            assert!((r.value - PI * k).abs() < 1e-6, "K={k} T={horizon}: {}", r.value);
        }
    }
}
