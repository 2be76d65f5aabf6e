//! Dense matrix exponential via Pade order-13 scaling and squaring.
//!
//! Fixed order-13 diagonal Pade approximant with the standard squaring
//! threshold theta_13; accuracy near machine precision for the modest
//! matrix sizes used here (Liouvillians up to 64 x 64). No balancing and
//! no lower-order short-cuts: predictable, order-independent arithmetic.

use ndarray::Array2;
use ndarray_linalg::Inverse;
use num_complex::Complex64 as C64;

use crate::error::{numerical_err, Result};

/// Squaring threshold for the order-13 approximant.
const THETA_13: f64 = 5.371_920_351_148_152;

/// Pade-13 numerator coefficients b_0..b_13.
const B: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

pub(crate) fn one_norm(a: &Array2<C64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        let col: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        worst = worst.max(col);
    }
    worst
}

/// `exp(A)` for a square complex matrix.
pub(crate) fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return numerical_err(format!("expm needs a square matrix, got {:?}", a.shape()));
    }
    let norm = one_norm(a);
    if !norm.is_finite() {
        return numerical_err("expm input has non-finite entries".to_string());
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.mapv(|z| z / 2f64.powi(s as i32));

    let eye: Array2<C64> = Array2::eye(n);
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    // U = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let u_inner = a6.mapv(|z| z * B[13]) + a4.mapv(|z| z * B[11]) + a2.mapv(|z| z * B[9]);
    let u_poly = a6.dot(&u_inner)
        + a6.mapv(|z| z * B[7])
        + a4.mapv(|z| z * B[5])
        + a2.mapv(|z| z * B[3])
        + eye.mapv(|z| z * B[1]);
    let u = scaled.dot(&u_poly);

    // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let v_inner = a6.mapv(|z| z * B[12]) + a4.mapv(|z| z * B[10]) + a2.mapv(|z| z * B[8]);
    let v = a6.dot(&v_inner)
        + a6.mapv(|z| z * B[6])
        + a4.mapv(|z| z * B[4])
        + a2.mapv(|z| z * B[2])
        + eye.mapv(|z| z * B[0]);

    let denom = &v - &u;
    let numer = &v + &u;
    let inv = denom
        .inv()
        .map_err(|e| crate::error::Error::Numerical(format!("expm Pade solve failed: {e}")))?;
    let mut result = inv.dot(&numer);
    for _ in 0..s {
        result = result.dot(&result);
    }
    Ok(result)
}
