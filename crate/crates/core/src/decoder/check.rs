//! Check-node update rules.
//!
//! The single-target functions take the extrinsic input set directly (the
//! messages from every neighbour except the target). The `*_all` kernels
//! update every edge of one check node at once and are what the decoder
//! runs; they must agree with the single-target versions.

use crate::error::{Error, Result};

/// Magnitudes are clipped here before `tanh`, and SPA outputs never exceed it.
pub const MAG_MAX: f64 = 30.0;

/// Largest tanh product fed to `atanh`.
const TANH_GUARD: f64 = 1.0 - f64::EPSILON;

#[inline]
fn is_negative(x: f64) -> bool {
    x < 0.0
}

fn nonempty(extrinsic: &[f64]) -> Result<()> {
    if extrinsic.is_empty() {
        Err(Error::Degenerate("check node update with an empty extrinsic set".into()))
    } else {
        Ok(())
    }
}

/// Product of input signs, with zero counted as positive.
pub fn sign_product(extrinsic: &[f64]) -> f64 {
    if extrinsic.iter().filter(|&&x| is_negative(x)).count() % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

pub fn min_magnitude(extrinsic: &[f64]) -> f64 {
    extrinsic.iter().fold(f64::INFINITY, |m, &x| m.min(x.abs()))
}

#[inline]
fn half_tanh(x: f64) -> f64 {
    (x.abs().min(MAG_MAX) * 0.5).tanh()
}

#[inline]
fn spa_magnitude(product: f64) -> f64 {
    (2.0 * product.min(TANH_GUARD).atanh()).min(MAG_MAX)
}

pub fn spa_cn_update(extrinsic: &[f64]) -> Result<f64> {
    nonempty(extrinsic)?;
    if let [x] = extrinsic {
        return Ok(sign_product(extrinsic) * x.abs().min(MAG_MAX));
    }
    let product: f64 = extrinsic.iter().map(|&x| half_tanh(x)).product();
    Ok(sign_product(extrinsic) * spa_magnitude(product))
}

pub fn ms_cn_update(extrinsic: &[f64]) -> Result<f64> {
    nonempty(extrinsic)?;
    Ok(sign_product(extrinsic) * min_magnitude(extrinsic))
}

pub fn oms_cn_update(extrinsic: &[f64], offset: f64) -> Result<f64> {
    nonempty(extrinsic)?;
    Ok(sign_product(extrinsic) * (min_magnitude(extrinsic) - offset).max(0.0))
}

pub fn nms_cn_update(extrinsic: &[f64], lambda: f64) -> Result<f64> {
    nonempty(extrinsic)?;
    Ok(sign_product(extrinsic) * lambda * min_magnitude(extrinsic))
}

/// Sum-product update of every edge of one check node. `scratch` is
/// resized as needed.
pub fn spa_all(input: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) {
    let d = input.len();
    if d == 2 {
        // A degree-2 check passes each message through unchanged.
        out[0] = sign_product(&input[1..]) * input[1].abs().min(MAG_MAX);
        out[1] = sign_product(&input[..1]) * input[0].abs().min(MAG_MAX);
        return;
    }
    scratch.clear();
    scratch.resize(d + 1, 1.0);
    // scratch[k] = product of t[0..k]
    for k in 0..d {
        scratch[k + 1] = scratch[k] * half_tanh(input[k]);
    }
    let negatives = input.iter().filter(|&&x| is_negative(x)).count();
    let mut suffix = 1.0;
    for k in (0..d).rev() {
        let product = scratch[k] * suffix;
        let odd = (negatives - usize::from(is_negative(input[k]))) % 2 == 1;
        let mag = spa_magnitude(product);
        out[k] = if odd { -mag } else { mag };
        suffix *= half_tanh(input[k]);
    }
}

/// Per-edge extrinsic minimum magnitude and sign, handed to `shape` which
/// maps the minimum to the output magnitude.
#[inline]
pub fn min_sum_all(input: &[f64], out: &mut [f64], mut shape: impl FnMut(usize, f64) -> f64) {
    let (mut min1, mut min2, mut pos1) = (f64::INFINITY, f64::INFINITY, usize::MAX);
    let mut negatives = 0usize;
    for (k, &x) in input.iter().enumerate() {
        let a = x.abs();
        if a < min1 {
            min2 = min1;
            min1 = a;
            pos1 = k;
        } else if a < min2 {
            min2 = a;
        }
        negatives += usize::from(is_negative(x));
    }
    for (k, &x) in input.iter().enumerate() {
        let m = if k == pos1 { min2 } else { min1 };
        let odd = (negatives - usize::from(is_negative(x))) % 2 == 1;
        let mag = shape(k, m);
        out[k] = if odd { -mag } else { mag };
    }
}
