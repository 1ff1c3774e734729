//! Embedded rule pairs: Gauss-Kronrod 7-15 on intervals and Genz-Malik 7/5
//! on hyperrectangles.

/// Kronrod abscissae on `[-1, 1]`, descending; the last one is the centre.
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
/// Gauss weights for `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One GK15 panel. `f` returns a value and its own error. Returns
/// `(integral, error)`; the error adds the QUADPACK rule error to the
/// Kronrod-weighted integrand errors.
pub(crate) fn gk15<F: FnMut(f64) -> (f64, f64)>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (fc, ec) = f(c);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut inner = WGK[7] * ec;
    let mut fv = [(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, e1) = f(c - dx);
        let (f2, e2) = f(c + dx);
        fv[j] = (f1, f2);
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        inner += WGK[j] * (e1 + e2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j].0 - mean).abs() + (fv[j].1 - mean).abs());
    }
    let ah = h.abs();
    let result = resk * h;
    resabs *= ah;
    resasc *= ah;
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err + ah * inner)
}

pub(crate) const GK15_EVALS: u64 = 15;

const L2: f64 = 0.358_568_582_800_318_1; // sqrt(9/70)
const L3: f64 = 0.948_683_298_050_513_8; // sqrt(9/10)
const L5: f64 = 0.688_247_201_611_685_3; // sqrt(9/19)

/// Result of one Genz-Malik application.
pub(crate) struct GmResult {
    pub value: f64,
    pub err: f64,
    pub split_axis: usize,
}

pub(crate) fn gm_evals(n: usize) -> u64 {
    (1 + 4 * n + 2 * n * (n - 1)) as u64 + (1u64 << n)
}

/// Degree-7 Genz-Malik rule with embedded degree-5 error estimate on the box
/// `center +- half`. Requires `n >= 2`.
pub(crate) fn genz_malik<F: FnMut(&[f64]) -> (f64, f64)>(
    f: &mut F,
    center: &[f64],
    half: &[f64],
    scratch: &mut Vec<f64>,
) -> GmResult {
    let n = center.len();
    debug_assert!(n >= 2);
    let nf = n as f64;
    let w1 = (12824.0 - 9120.0 * nf + 400.0 * nf * nf) / 19683.0;
    let w2 = 980.0 / 6561.0;
    let w3 = (1820.0 - 400.0 * nf) / 19683.0;
    let w4 = 200.0 / 19683.0;
    let w5 = 6859.0 / 19683.0 / (1u64 << n) as f64;
    let v1 = (729.0 - 950.0 * nf + 50.0 * nf * nf) / 729.0;
    let v2 = 245.0 / 486.0;
    let v3 = (265.0 - 100.0 * nf) / 1458.0;
    let v4 = 25.0 / 729.0;

    scratch.clear();
    scratch.extend_from_slice(center);
    let (f0, e0) = f(scratch);
    let mut inner = w1.abs() * e0;

    let mut s2 = 0.0;
    let mut s3 = 0.0;
    let mut best_axis = 0;
    let mut best_diff = -1.0;
    let mut widest = 0;
    for i in 0..n {
        if half[i] > half[widest] {
            widest = i;
        }
        let mut eval_at = |off: f64, scratch: &mut Vec<f64>| {
            scratch[i] = center[i] + off * half[i];
            let r = f(scratch);
            scratch[i] = center[i];
            r
        };
        let (a, ea) = eval_at(L2, scratch);
        let (b, eb) = eval_at(-L2, scratch);
        let (c, ec) = eval_at(L3, scratch);
        let (d, ed) = eval_at(-L3, scratch);
        s2 += a + b;
        s3 += c + d;
        inner += w2 * (ea + eb) + w3.abs() * (ec + ed);
        let diff = ((a + b - 2.0 * f0) - (c + d - 2.0 * f0) / 7.0).abs();
        if diff > best_diff * (1.0 + 1e-10) {
            best_diff = diff;
            best_axis = i;
        }
    }
    if best_diff <= 1e-14 * f0.abs() {
        best_axis = widest;
    }

    let mut s4 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                scratch[i] = center[i] + si * L3 * half[i];
                scratch[j] = center[j] + sj * L3 * half[j];
                let (v, e) = f(scratch);
                s4 += v;
                inner += w4 * e;
            }
            scratch[i] = center[i];
            scratch[j] = center[j];
        }
    }

    let mut s5 = 0.0;
    for mask in 0..(1u64 << n) {
        for k in 0..n {
            let sign = if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
            scratch[k] = center[k] + sign * L5 * half[k];
        }
        let (v, e) = f(scratch);
        s5 += v;
        inner += w5 * e;
    }

    let vol: f64 = half.iter().map(|h| 2.0 * h).product();
    let i7 = vol * (w1 * f0 + w2 * s2 + w3 * s3 + w4 * s4 + w5 * s5);
    let i5 = vol * (v1 * f0 + v2 * s2 + v3 * s3 + v4 * s4);
    GmResult { value: i7, err: (i7 - i5).abs() + vol * inner, split_axis: best_axis }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk15_polynomial_exact() {
        // Kronrod 15 is exact through degree 22
        let (v, e) = gk15(&mut |x: f64| (x.powi(10) - 3.0 * x.powi(3), 0.0), -1.0, 2.0);
        let exact = (2f64.powi(11) + 1.0) / 11.0 - 0.75 * (16.0 - 1.0);
        assert!((v - exact).abs() < 1e-12 * exact.abs());
        assert!(e < 1e-10);
    }

    #[test]
    fn gm_polynomial_exact() {
        // degree 7 in 3 variables over [0,1] x [-1,1] x [0,2]
        let mut s = Vec::new();
        let mut f = |x: &[f64]| (x[0].powi(3) * x[1].powi(2) * x[2].powi(2) + x[0] * x[1], 0.0);
        let r = genz_malik(&mut f, &[0.5, 0.0, 1.0], &[0.5, 1.0, 1.0], &mut s);
        let exact = 0.25 * (2.0 / 3.0) * (8.0 / 3.0);
        assert!((r.value - exact).abs() < 1e-13, "{}", r.value);
        assert_eq!(gm_evals(2), 17);
        assert_eq!(gm_evals(3), 33);
    }
}
