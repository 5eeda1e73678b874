//! Gauss-Legendre quadrature, fixed-order and adaptive.

use crate::scalar::Scalar;

// 10-point rule on [-1, 1]; nodes are symmetric, listed for the positive half.
const GL10_NODES: [f64; 5] = [
    0.148_874_338_981_631_22,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL10_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_87,
    0.269_266_719_309_996_35,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_14,
];

/// Ten-point Gauss-Legendre estimate of `∫_a^b f`.
pub fn gauss_legendre<S: Scalar, E>(
    a: S,
    b: S,
    mut f: impl FnMut(S) -> Result<S, E>,
) -> Result<S, E> {
    let mid = (a + b) * S::half();
    let half = (b - a) * S::half();
    let mut acc = S::zero();
    for (x, w) in GL10_NODES.iter().zip(GL10_WEIGHTS) {
        let dx = half * S::lit(*x);
        acc = acc + S::lit(w) * (f(mid - dx)? + f(mid + dx)?);
    }
    Ok(acc * half)
}

/// The nodes the 10-point rule samples on `[a, b]`, in increasing order.
pub fn gauss_legendre_nodes<S: Scalar>(a: S, b: S) -> [S; 10] {
    let mid = (a + b) * S::half();
    let half = (b - a) * S::half();
    let mut out = [S::zero(); 10];
    for (i, x) in GL10_NODES.iter().enumerate() {
        out[4 - i] = mid - half * S::lit(*x);
        out[5 + i] = mid + half * S::lit(*x);
    }
    out
}

/// Adaptive bisection on the 10-point rule until two-level agreement within
/// `tol` (absolute), or `max_depth` halvings.
pub fn adaptive<S: Scalar, E>(
    a: S,
    b: S,
    tol: S,
    max_depth: u32,
    f: &mut impl FnMut(S) -> Result<S, E>,
) -> Result<S, E> {
    let whole = gauss_legendre(a, b, &mut *f)?;
    adaptive_rec(a, b, whole, tol, max_depth, f)
}

fn adaptive_rec<S: Scalar, E>(
    a: S,
    b: S,
    whole: S,
    tol: S,
    depth: u32,
    f: &mut impl FnMut(S) -> Result<S, E>,
) -> Result<S, E> {
    let m = (a + b) * S::half();
    let left = gauss_legendre(a, m, &mut *f)?;
    let right = gauss_legendre(m, b, &mut *f)?;
    let both = left + right;
    if depth == 0 || (both - whole).abs() <= tol {
        return Ok(both);
    }
    let half_tol = tol * S::half();
    Ok(adaptive_rec(a, m, left, half_tol, depth - 1, f)?
        + adaptive_rec(m, b, right, half_tol, depth - 1, f)?)
}
