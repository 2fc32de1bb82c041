//! Exact and least-squares solvers for `A * X = D` built on the
//! Moore-Penrose inverse.

use crate::error::{mismatch, Result};
use crate::fourier::{from_faces, to_faces, CMat};
use crate::inverse::pinv_faces;
use crate::tensor::Tensor3;

/// Relative residual below which `A * A^+ * D = D` counts as consistent.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// `A^+ * D + (I - A^+ * A) * free`; the minimal-norm solution when `free`
    /// is zero.
    pub solution: Tensor3,
    /// `A^+ * D`.
    pub particular: Tensor3,
    pub consistent: bool,
    /// `||A * A^+ * D - D||_F / ||D||_F` (zero when `D = 0`).
    pub consistency_residual: f64,
    /// `I - A^+ * A`, projector onto the null space of `A`.
    pub homogeneous_projector: Tensor3,
}

fn check_rhs(a: &Tensor3, d: &Tensor3, op: &'static str) -> Result<()> {
    if a.n1() != d.n1() || a.n3() != d.n3() {
        return Err(mismatch(op, format!("{}x*x{}", a.n1(), a.n3()), d.dims()));
    }
    Ok(())
}

/// Solves `A * X = D`. The system has a solution iff `A * A^+ * D = D`; every
/// solution is `A^+ * D + (I - A^+ * A) * Y` for some `Y` of shape
/// `n2 x n4 x n3`, passed here as `free` (zero when `None`).
///
/// Inconsistency is reported in the result rather than as an error.
pub fn solve_exact(a: &Tensor3, d: &Tensor3, free: Option<&Tensor3>) -> Result<SolveResult> {
    check_rhs(a, d, "solve_exact")?;
    let n2 = a.n2();
    if let Some(y) = free {
        if y.n1() != n2 || y.n2() != d.n2() || y.n3() != d.n3() {
            return Err(mismatch("solve_exact free tensor", format!("{}x{}x{}", n2, d.n2(), d.n3()), y.dims()));
        }
    }
    let fa = to_faces(a);
    let fp = pinv_faces(&fa, None);
    let fd = to_faces(d);
    let fx = fp.mul(&fd)?;
    let particular = from_faces(&fx)?;
    let projected = from_faces(&fa.mul(&fx)?)?;

    let dn = d.frobenius_norm();
    let consistency_residual = if dn == 0.0 { 0.0 } else { projected.sub(d)?.frobenius_norm() / dn };
    let consistent = consistency_residual <= CONSISTENCY_TOL;

    let fh = fp.mul(&fa)?.map(|_, f| CMat::identity(n2, n2) - f);
    let homogeneous_projector = from_faces(&fh)?;
    let solution = match free {
        Some(y) => particular.add(&from_faces(&fh.mul(&to_faces(y))?)?)?,
        None => particular.clone(),
    };
    Ok(SolveResult { solution, particular, consistent, consistency_residual, homogeneous_projector })
}

/// Minimal-Frobenius-norm least-squares solution `A^+ * B` of
/// `min ||A * X - B||_F`.
pub fn lstsq_min_norm(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    check_rhs(a, b, "lstsq_min_norm")?;
    let fp = pinv_faces(&to_faces(a), None);
    from_faces(&fp.mul(&to_faces(b))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gaussian, rng_from_seed, well_conditioned, with_multirank};
    use crate::inverse::inv;
    use crate::product::tprod;

    #[test]
    fn invertible_systems_are_consistent() {
        let mut rng = rng_from_seed(3);
        let a = well_conditioned(4, 3, &mut rng);
        let d = gaussian((4, 2, 3), &mut rng);
        let s = solve_exact(&a, &d, None).unwrap();
        assert!(s.consistent);
        let direct = tprod(&inv(&a).unwrap(), &d).unwrap();
        assert!(s.solution.sub(&direct).unwrap().frobenius_norm() < 1e-10 * direct.frobenius_norm());
    }

    #[test]
    fn zero_rhs_gives_homogeneous_solutions() {
        let mut rng = rng_from_seed(4);
        let a = with_multirank(4, 4, &[2, 1, 1], &mut rng).unwrap();
        let d = Tensor3::zeros((4, 2, 3));
        let free = gaussian((4, 2, 3), &mut rng);
        let s = solve_exact(&a, &d, Some(&free)).unwrap();
        assert!(s.consistent);
        assert!(s.particular.is_zero());
        assert!(tprod(&a, &s.solution).unwrap().frobenius_norm() < 1e-10);
        assert!(s.solution.frobenius_norm() > 0.1);
    }

    #[test]
    fn consistency_follows_construction() {
        let mut rng = rng_from_seed(5);
        let a = with_multirank(4, 3, &[2, 2, 2, 2], &mut rng).unwrap();
        let w = gaussian((3, 2, 4), &mut rng);
        let inside = tprod(&a, &w).unwrap();
        assert!(solve_exact(&a, &inside, None).unwrap().consistent);
        let outside = inside.add(&gaussian((4, 2, 4), &mut rng)).unwrap();
        let s = solve_exact(&a, &outside, None).unwrap();
        assert!(!s.consistent);
        assert!(s.consistency_residual > 1e-3);
    }

    #[test]
    fn free_tensor_shape_checked() {
        let a = Tensor3::identity(3, 2);
        let d = Tensor3::zeros((3, 2, 2));
        assert!(solve_exact(&a, &d, Some(&Tensor3::zeros((3, 3, 2)))).is_err());
        assert!(solve_exact(&a, &Tensor3::zeros((2, 2, 2)), None).is_err());
    }

    #[test]
    fn lstsq_of_zero_is_zero() {
        let mut rng = rng_from_seed(6);
        let b = gaussian((3, 2, 2), &mut rng);
        let x = lstsq_min_norm(&Tensor3::zeros((3, 4, 2)), &b).unwrap();
        assert_eq!(x.dims(), (4, 2, 2).into());
        assert!(x.is_zero());
    }

    #[test]
    fn lstsq_agrees_with_exact_on_consistent_systems() {
        let mut rng = rng_from_seed(7);
        let a = with_multirank(5, 3, &[3, 2, 2], &mut rng).unwrap();
        let d = tprod(&a, &gaussian((3, 1, 3), &mut rng)).unwrap();
        let x = lstsq_min_norm(&a, &d).unwrap();
        let s = solve_exact(&a, &d, None).unwrap();
        assert!(x.sub(&s.solution).unwrap().frobenius_norm() < 1e-12 * x.frobenius_norm());
        assert!(tprod(&a, &x).unwrap().sub(&d).unwrap().frobenius_norm() < 1e-10 * d.frobenius_norm());
    }
}
