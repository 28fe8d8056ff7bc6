//! Walsh-Hadamard transform and XOR deconvolution.

use super::DecError;

/// Default spectral threshold, relative to the zero-frequency bin of the column.
pub const DEFAULT_EPS: f64 = 1e-12;

fn check_len(len: usize) -> Result<(), DecError> {
    if len == 0 || !len.is_power_of_two() {
        return Err(DecError::NotPowerOfTwo(len));
    }
    Ok(())
}

/// In-place unnormalized transform `W[u] = Σ_v (-1)^{popcount(u & v)} f[v]`.
pub fn fwht_in_place(v: &mut [f64]) -> Result<(), DecError> {
    check_len(v.len())?;
    let len = v.len();
    let mut half = 1;
    while half < len {
        for block in v.chunks_exact_mut(half << 1) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
    Ok(())
}

/// Inverse of [`fwht_in_place`]: the same butterflies scaled by `1 / len`.
pub fn ifwht_in_place(v: &mut [f64]) -> Result<(), DecError> {
    fwht_in_place(v)?;
    let scale = 1.0 / v.len() as f64;
    for x in v.iter_mut() {
        *x *= scale;
    }
    Ok(())
}

pub fn fwht(v: &[f64]) -> Result<Vec<f64>, DecError> {
    let mut out = v.to_vec();
    fwht_in_place(&mut out)?;
    Ok(out)
}

pub fn ifwht(v: &[f64]) -> Result<Vec<f64>, DecError> {
    let mut out = v.to_vec();
    ifwht_in_place(&mut out)?;
    Ok(out)
}

/// Result of [`deconvolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Deconvolution {
    /// Solution of `a ⊛ x = z`; may contain negative entries.
    pub x: Vec<f64>,
    /// Spectral bins whose quotient was set to zero.
    pub zeroed_bins: usize,
}

/// Solve `a ⊛ x = z` (XOR convolution) by dividing spectra.
///
/// Bins with `|FWHT(a)[u]| <= eps * |FWHT(a)[0]|` get a zero quotient, which
/// is the pseudo-inverse on the singular part of the spectrum.
pub fn deconvolve(z: &[f64], a: &[f64], eps: f64) -> Result<Deconvolution, DecError> {
    if z.len() != a.len() {
        return Err(DecError::LengthMismatch(z.len(), a.len()));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(DecError::InvalidEps(eps));
    }
    let mut zs = fwht(z)?;
    let a_spec = fwht(a)?;
    let threshold = eps * a_spec[0].abs();
    let mut zeroed_bins = 0;
    for (zv, &av) in zs.iter_mut().zip(&a_spec) {
        if av.abs() <= threshold || av == 0.0 {
            *zv = 0.0;
            zeroed_bins += 1;
        } else {
            *zv /= av;
        }
    }
    ifwht_in_place(&mut zs)?;
    Ok(Deconvolution { x: zs, zeroed_bins })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn delta_maps_to_ones() {
        let mut v = vec![0.0; 8];
        v[0] = 1.0;
        assert_eq!(fwht(&v).unwrap(), vec![1.0; 8]);
    }

    #[test]
    fn uniform_maps_to_delta() {
        let v = vec![0.125; 8];
        let mut expect = vec![0.0; 8];
        expect[0] = 1.0;
        assert_eq!(fwht(&v).unwrap(), expect);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert_eq!(fwht(&[1.0; 6]), Err(DecError::NotPowerOfTwo(6)));
        assert_eq!(fwht(&[]), Err(DecError::NotPowerOfTwo(0)));
        assert!(deconvolve(&[1.0, 0.0], &[1.0], 0.0).is_err());
        assert!(deconvolve(&[1.0], &[1.0], f64::NAN).is_err());
    }

    #[test]
    fn identity_column_returns_input() {
        let z = [0.4, 0.3, 0.2, 0.1];
        let a = [1.0, 0.0, 0.0, 0.0];
        let d = deconvolve(&z, &a, DEFAULT_EPS).unwrap();
        for (x, z) in d.x.iter().zip(z) {
            assert!((x - z).abs() < 1e-15);
        }
        assert_eq!(d.zeroed_bins, 0);
    }

    #[test]
    fn single_bit_flip_inverse() {
        // spectra (1, 0.8) and (1, 0.8): quotient (1, 1), inverse -> (1, 0)
        let d = deconvolve(&[0.9, 0.1], &[0.9, 0.1], DEFAULT_EPS).unwrap();
        assert!((d.x[0] - 1.0).abs() < 1e-15);
        assert!(d.x[1].abs() < 1e-15);
    }

    #[test]
    fn singular_bins_are_zeroed() {
        // a = (0.5, 0.5) has spectrum (1, 0)
        let d = deconvolve(&[0.7, 0.3], &[0.5, 0.5], DEFAULT_EPS).unwrap();
        assert_eq!(d.zeroed_bins, 1);
        assert_eq!(d.x, vec![0.5, 0.5]);
    }

    proptest! {
        #[test]
        fn round_trip(t in 0usize..12, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<f64> = (0..1usize << t).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let back = ifwht(&fwht(&v).unwrap()).unwrap();
            for (a, b) in v.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
