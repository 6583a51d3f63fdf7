//! Minimal iterative radix-2 FFT on complex f64 buffers.
//!
//! Only power-of-two lengths are supported; this is enough for the uniform
//! grid evaluation of band-limited amplitude sums.

use num_complex::Complex64;

/// In-place transform. With `inverse = true` the kernel is `e^{+2 pi i jk/n}`
/// and no 1/n normalization is applied (callers scale as needed).
pub(crate) fn fft_inplace(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    if n <= 1 {
        return;
    }

    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2usize;
    while len <= n {
        let ang = sign * 2.0 * std::f64::consts::PI / len as f64;
        let wlen = Complex64::new(ang.cos(), ang.sin());
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for i in 0..len / 2 {
                let u = buf[start + i];
                let v = buf[start + i + len / 2] * w;
                buf[start + i] = u + v;
                buf[start + i + len / 2] = u - v;
                w *= wlen;
            }
        }
        len <<= 1;
    }
}
