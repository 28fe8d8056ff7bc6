//! Euclidean projection onto the probability simplex.

use super::DecError;
use crate::distribution::SparseDistribution;

/// Nearest point (in ℓ2) of `{x : x_i >= 0, Σ x_i = 1}` to `v`.
///
/// Sort descending, find the longest prefix whose values stay positive after
/// subtracting the common shift, clamp the rest to zero.
pub fn project_to_simplex(v: &[f64]) -> Result<Vec<f64>, DecError> {
    if v.is_empty() {
        return Err(DecError::Empty);
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(DecError::NonFinite);
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    let mut shift = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        prefix += u;
        let candidate = (prefix - 1.0) / (i + 1) as f64;
        if u - candidate > 0.0 {
            shift = candidate;
        } else {
            break;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&x| (x - shift).max(0.0)).collect();
    let total: f64 = out.iter().sum();
    for x in &mut out {
        *x /= total;
    }
    Ok(out)
}

/// Project a sparse quasi distribution; entries outside its support stay zero.
pub fn project_distribution(d: &SparseDistribution) -> Result<SparseDistribution, DecError> {
    let keys: Vec<u64> = d.entries().keys().copied().collect();
    let values: Vec<f64> = d.entries().values().copied().collect();
    let projected = project_to_simplex(&values)?;
    Ok(SparseDistribution::strict(
        d.n(),
        keys.into_iter().zip(projected).filter(|(_, p)| *p > 0.0),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn distribution_is_fixed_point() {
        let v = [0.2, 0.3, 0.5];
        assert!(close(&project_to_simplex(&v).unwrap(), &v));
    }

    #[test]
    fn overshoot_clamps() {
        assert!(close(
            &project_to_simplex(&[1.2, -0.2]).unwrap(),
            &[1.0, 0.0]
        ));
    }

    #[test]
    fn symmetric_shift() {
        assert!(close(
            &project_to_simplex(&[0.6, 0.6]).unwrap(),
            &[0.5, 0.5]
        ));
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert_eq!(
            project_to_simplex(&[f64::NAN, 1.0]),
            Err(DecError::NonFinite)
        );
        assert_eq!(
            project_to_simplex(&[f64::INFINITY]),
            Err(DecError::NonFinite)
        );
        assert_eq!(project_to_simplex(&[]), Err(DecError::Empty));
    }

    #[test]
    fn sparse_projection_drops_clamped_entries() {
        let q = SparseDistribution::quasi(2, [(0, 1.1), (3, -0.05), (1, -0.05)]).unwrap();
        let p = project_distribution(&q).unwrap();
        assert!(p.is_strict());
        assert_eq!(p.len(), 1);
        assert_eq!(p.get(0), 1.0);
    }

    proptest! {
        #[test]
        fn output_is_strict_and_idempotent(v in prop::collection::vec(-5.0f64..5.0, 1..40)) {
            let p = project_to_simplex(&v).unwrap();
            prop_assert!(p.iter().all(|&x| x >= 0.0));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let again = project_to_simplex(&p).unwrap();
            prop_assert!(close(&p, &again));
        }
    }
}
