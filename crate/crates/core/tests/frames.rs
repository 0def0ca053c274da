use std::f64::consts::PI;

use gmra::fixtures::journe_wavelet;
use gmra::wavelet::{
    frame_coefficient, frame_sum, frame_sum_grid, haar, scaling_function, shannon_wavelet,
    wavelet_family, FrameRanges, FrequencyGrid, IndicatorWavelet, StepFunction,
};
use gmra::{rat, Complex64, Rational};
use num_traits::ToPrimitive;

fn indicator(a: Rational, b: Rational) -> StepFunction {
    StepFunction::new(vec![(a, b, Complex64::new(1.0, 0.0))]).unwrap()
}

/// `|[a, b) ∩ 2^j W|` for an interval `[a, b)` and a wavelet set `W`.
fn dilated_overlap(a: &Rational, b: &Rational, w: &IndicatorWavelet, j: i32) -> Rational {
    let s = if j >= 0 {
        Rational::from_integer((1i64 << j).into())
    } else {
        rat(1, 1i64 << -j)
    };
    w.intervals()
        .iter()
        .map(|(p, q)| {
            let lo = std::cmp::max(a.clone(), p * &s);
            let hi = std::cmp::min(b.clone(), q * &s);
            if lo < hi {
                hi - lo
            } else {
                Rational::from_integer(0.into())
            }
        })
        .sum()
}

#[test]
fn journe_level_sums_approach_the_overlap_measure() {
    // for each j the full v-sum is |f ∩ 2^j W| when the translates do not overlap
    let w = journe_wavelet();
    let (a, b) = (rat(2, 7), rat(1, 2));
    let f = indicator(a.clone(), b.clone());
    let psi = w.to_step();
    let mut total = Rational::from_integer(0.into());
    for j in -2..=3 {
        let exact = dilated_overlap(&a, &b, &w, j);
        total += &exact;
        let ranges = FrameRanges {
            j_min: j,
            j_max: j,
            v_min: -2048,
            v_max: 2048,
        };
        let got = frame_sum(&f, std::slice::from_ref(&psi), 2, ranges).unwrap().sum;
        let expected = exact.to_f64().unwrap();
        assert!(got <= expected + 1e-12, "j = {j}");
        assert!(expected - got < 2e-3, "j = {j}: {got} vs {expected}");
    }
    assert_eq!(total, rat(3, 14));
}

#[test]
fn frame_sums_grow_with_the_ranges() {
    let f = indicator(rat(2, 7), rat(1, 2));
    let psi = journe_wavelet().to_step();
    let mut last = 0.0;
    for (jmax, vmax) in [(0, 0), (1, 4), (2, 16), (4, 32), (6, 64)] {
        let s = frame_sum(&f, std::slice::from_ref(&psi), 2, FrameRanges::symmetric(jmax, vmax)).unwrap().sum;
        assert!(s >= last, "{s} < {last}");
        last = s;
    }
}

#[test]
fn closed_form_and_grid_paths_agree_on_sampled_indicators() {
    let psi = shannon_wavelet();
    let grid = FrequencyGrid::symmetric(&rat(2, 1), &rat(1, 1 << 12)).unwrap();
    let sampled = psi.sample(&grid);
    let ranges = FrameRanges::symmetric(2, 8);
    let closed = frame_sum(&psi.to_step(), &[psi.to_step()], 2, ranges).unwrap();
    let grid_path = frame_sum_grid(&sampled, std::slice::from_ref(&sampled), 2, ranges).unwrap();
    assert!((closed.sum - grid_path.sum).abs() <= 1e-8);

    // 7-adic endpoints sit on a grid of step 1/(7·2^11)
    let j = journe_wavelet();
    let grid = FrequencyGrid::symmetric(&rat(16, 7), &rat(1, 7 << 11)).unwrap();
    let sampled = j.sample(&grid);
    let f = indicator(rat(2, 7), rat(1, 2));
    let f_grid = gmra::wavelet::FrequencyGridFn {
        grid: grid.clone(),
        values: grid
            .points()
            .map(|x| Complex64::new(if x >= rat(2, 7) && x < rat(1, 2) { 1.0 } else { 0.0 }, 0.0))
            .collect(),
    };
    let ranges = FrameRanges::symmetric(3, 16);
    let closed = frame_sum(&f, &[j.to_step()], 2, ranges).unwrap();
    let grid_path = frame_sum_grid(&f_grid, &[sampled], 2, ranges).unwrap();
    assert!((closed.sum - grid_path.sum).abs() <= 1e-8, "{} vs {}", closed.sum, grid_path.sum);
}

#[test]
fn coefficients_match_direct_quadrature() {
    let f = indicator(rat(1, 3), rat(5, 4));
    let psi = shannon_wavelet().to_step();
    for (j, v) in [(0, 0), (0, 3), (1, -2), (-1, 5)] {
        let got = frame_coefficient(&f, &psi, 2, j, v);
        // midpoint rule on a fine grid
        let scale = 2f64.powi(j);
        let steps = 200_000;
        let (lo, hi) = (1.0 / 3.0, 1.25);
        let h = (hi - lo) / steps as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..steps {
            let x = lo + (k as f64 + 0.5) * h;
            let y = x / scale;
            let inside = (0.5..1.0).contains(&y.abs()) && !(y == -0.5);
            if inside || (-1.0..-0.5).contains(&y) {
                acc += Complex64::from_polar(1.0, 2.0 * PI * v as f64 * x / scale) * h;
            }
        }
        let expected = acc * scale.powf(-0.5);
        assert!((got - expected).norm() < 1e-4, "j={j} v={v}: {got} vs {expected}");
    }
}

#[test]
fn wavelet_norm_matches_filtered_scaling_function() {
    // D̂ is unitary, so ‖Ψ_1‖² = ‖N^{-1/2} m_1 Φ‖² on the dilated grid
    let sys = haar();
    let m0 = |x: &Rational| sys.filters()[0].eval_c64(x);
    let m1 = |x: &Rational| sys.filters()[1].eval_c64(x);
    let grid = FrequencyGrid::symmetric(&rat(32, 1), &rat(1, 256)).unwrap();
    let phi = scaling_function(m0, 2, 16, &grid).unwrap();
    let psi = wavelet_family(&[m1], 2, &phi).remove(0);
    let product = gmra::wavelet::FrequencyGridFn {
        grid: grid.clone(),
        values: grid.points().zip(&phi.values).map(|(x, p)| m1(&x) * p).collect(),
    };
    let lhs = psi.norm_sqr();
    let rhs = product.norm_sqr();
    assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0), "{lhs} vs {rhs}");
}

#[test]
fn haar_scaling_function_matches_sinc() {
    let sys = haar();
    let m0 = |x: &Rational| sys.filters()[0].eval_c64(x);
    let grid = FrequencyGrid::symmetric(&rat(8, 1), &rat(1, 64)).unwrap();
    let phi = scaling_function(m0, 2, 20, &grid).unwrap();
    for (x, v) in grid.points().zip(&phi.values) {
        let t = x.to_f64().unwrap();
        let sinc = if t == 0.0 { 1.0 } else { (PI * t).sin() / (PI * t) };
        assert!((v.norm() - sinc.abs()).abs() < 1e-5, "x = {t}");
    }
}
