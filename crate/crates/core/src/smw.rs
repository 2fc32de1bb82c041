//! Sherman-Morrison-Woodbury formulas under the t-product.
//!
//! [`smw_inverse`] handles `(A + U*B*V)^{-1}` for invertible `A`, `B`.
//! [`smw_pinv`] gives the Moore-Penrose inverse of `M = A + U*B*V` when the
//! update splits against the ranges of `A` and `A^T` and six algebraic
//! conditions hold; [`check_smw_conditions`] evaluates those conditions and
//! [`construct_conditioned_instance`] produces bundles that satisfy them.

use rand::Rng;
use serde::Serialize;

use crate::error::{mismatch, Result, TensorError};
use crate::fourier::{from_faces, to_faces, CMat, FourierFaces};
use crate::generate::{random_face, random_unitary, rng_from_seed, tensor_from_half_faces, with_multirank, random_rank_profile};
use crate::inverse::{inv_faces, pinv, pinv_faces, split_against_range};
use crate::linalg;
use crate::product::tprod_chain;
use crate::tensor::Tensor3;

/// Residual threshold separating satisfied from violated conditions.
pub const CONDITION_TOL: f64 = 1e-8;

/// Orthogonal parts whose faces fall below this fraction of the face norm of
/// the operand are projection round-off and are dropped.
const SPLIT_NOISE_TOL: f64 = 1e-11;

/// `(A + U*B*V)^{-1} = A^{-1} - A^{-1}*U*(B^{-1} + V*A^{-1}*U)^{-1}*V*A^{-1}`.
///
/// Shapes: `A` is `n x n x n3`, `U` is `n x k x n3`, `B` is `k x k x n3`,
/// `V` is `k x n x n3`. Fails with `SingularTensor` naming `A`, `B` or the
/// capacitance tensor `B^-1 + V*A^-1*U`, whichever is singular first.
pub fn smw_inverse(a: &Tensor3, u: &Tensor3, b: &Tensor3, v: &Tensor3) -> Result<Tensor3> {
    let (n, k, n3) = (a.n1(), b.n1(), a.n3());
    let expect = |t: &Tensor3, d: (usize, usize, usize), what: &'static str| -> Result<()> {
        if t.dims().as_tuple() != d {
            return Err(mismatch(what, format!("{}x{}x{}", d.0, d.1, d.2), t.dims()));
        }
        Ok(())
    };
    expect(a, (n, n, n3), "smw_inverse A")?;
    expect(u, (n, k, n3), "smw_inverse U")?;
    expect(b, (k, k, n3), "smw_inverse B")?;
    expect(v, (k, n, n3), "smw_inverse V")?;

    let ai = inv_faces(&to_faces(a), "A")?;
    let bi = inv_faces(&to_faces(b), "B")?;
    let fu = to_faces(u);
    let fv = to_faces(v);
    let ai_u = ai.mul(&fu)?;
    let v_ai = fv.mul(&ai)?;
    let cap = bi.zip_map(&fv.mul(&ai_u)?, |x, y| x + y)?;
    let cap_inv = inv_faces(&cap, "B^-1 + V*A^-1*U")?;
    let correction = ai_u.mul(&cap_inv)?.mul(&v_ai)?;
    from_faces(&ai.zip_map(&correction, |x, y| x - y)?)
}

/// Structured update `U*B*V` with `U` split against `R(A)` and `V^T` split
/// against `R(A^T)`.
///
/// `x2`, `y2`, `e2` are `n2 x l x n3`: they describe `V^T`, so
/// `V = (X2 + Y2)^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmwFactors {
    pub u: Tensor3,
    pub b: Tensor3,
    pub v: Tensor3,
    pub x1: Tensor3,
    pub y1: Tensor3,
    pub x2: Tensor3,
    pub y2: Tensor3,
    /// `Y1 * (Y1^T * Y1)^+`
    pub e1: Tensor3,
    /// `Y2 * (Y2^T * Y2)^+`
    pub e2: Tensor3,
}

impl SmwFactors {
    /// The update `U * B * V`.
    pub fn update(&self) -> Result<Tensor3> {
        tprod_chain(&[&self.u, &self.b, &self.v])
    }
}

/// `Y * (Y^T * Y)^+`.
fn aux_from_orthogonal(y: &Tensor3) -> Result<Tensor3> {
    let fy = to_faces(y);
    let gram = fy.map(|_, f| f.adjoint() * f);
    from_faces(&fy.mul(&pinv_faces(&gram, None))?)
}

/// Splits `t` against `R(range_of)` and drops faces of the orthogonal part that
/// are round-off relative to the matching face of `t`.
fn clean_split(range_of: &Tensor3, t: &Tensor3) -> Result<(Tensor3, Tensor3)> {
    let split = split_against_range(range_of, t)?;
    let ft = to_faces(t);
    let fy = to_faces(&split.orthogonal);
    let fx = to_faces(&split.in_range);
    let negligible = |f: &CMat, i: usize| linalg::spectral_norm(f) <= SPLIT_NOISE_TOL * linalg::spectral_norm(ft.face(i));
    let n3 = t.n3();
    if (0..n3).all(|i| negligible(fx.face(i), i)) {
        return Ok((Tensor3::zeros(t.dims()), t.clone()));
    }
    let cleaned = fy.map(|i, f| if negligible(f, i) { CMat::zeros(f.nrows(), f.ncols()) } else { f.clone() });
    let y = from_faces(&cleaned)?;
    let x = t.sub(&y)?;
    Ok((x, y))
}

/// Splits `U` against `R(A)` and `V^T` against `R(A^T)` and forms `E1`, `E2`.
///
/// Shapes: `A` is `n1 x n2`, `U` is `n1 x k`, `B` is `k x l`, `V` is `l x n2`
/// (all with the same `n3`).
pub fn build_smw_factors(a: &Tensor3, u: &Tensor3, b: &Tensor3, v: &Tensor3) -> Result<SmwFactors> {
    let n3 = a.n3();
    if u.n1() != a.n1() || u.n3() != n3 {
        return Err(mismatch("smw U", format!("{}xkx{}", a.n1(), n3), u.dims()));
    }
    if b.n1() != u.n2() || b.n3() != n3 {
        return Err(mismatch("smw B", format!("{}xlx{}", u.n2(), n3), b.dims()));
    }
    if v.n1() != b.n2() || v.n2() != a.n2() || v.n3() != n3 {
        return Err(mismatch("smw V", format!("{}x{}x{}", b.n2(), a.n2(), n3), v.dims()));
    }
    let (x1, y1) = clean_split(a, u)?;
    let (x2, y2) = clean_split(&a.transpose(), &v.transpose())?;
    let e1 = aux_from_orthogonal(&y1)?;
    let e2 = aux_from_orthogonal(&y2)?;
    Ok(SmwFactors { u: u.clone(), b: b.clone(), v: v.clone(), x1, y1, x2, y2, e1, e2 })
}

/// One of the six algebraic conditions with its relative residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResidual {
    pub name: &'static str,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub residuals: Vec<ConditionResidual>,
    pub satisfied: bool,
}

impl ConditionReport {
    pub fn worst(&self) -> f64 {
        self.residuals.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// `||lhs - rhs||_F / max(||rhs||_F, bound)`, where `bound` is the
/// submultiplicative bound on `||lhs||_F` from the factor norms. Both sides
/// exactly zero gives zero.
fn relative_residual(factors: &[&Tensor3], rhs: &Tensor3) -> Result<f64> {
    let lhs = tprod_chain(factors)?;
    if lhs.dims() != rhs.dims() {
        return Err(mismatch("smw condition", rhs.dims(), lhs.dims()));
    }
    let (last, init) = factors.split_last().expect("non-empty chain");
    let bound = init.iter().map(|f| f.spectral_norm()).product::<f64>() * last.frobenius_norm();
    let denom = rhs.frobenius_norm().max(bound);
    let diff = lhs.sub(rhs)?.frobenius_norm();
    Ok(if diff == 0.0 { 0.0 } else { diff / denom })
}

/// Evaluates the six conditions under which the SMW formula gives `M^+`:
///
/// 1. `E2 * B^+ * E1^T * Y1 * B = E2`
/// 2. `X1 * E1^T * Y1 * B = X1 * B`
/// 3. `Y1 * E1^T * Y1 = Y1`
/// 4. `B * Y2^T * E2 * B^+ * E1^T = E1^T`
/// 5. `B * Y2^T * E2 * X2^T = B * X2^T`
/// 6. `E2 * Y2^T * E2 = E2`
///
/// A bundle with inconsistent shapes is a dimension-mismatch error.
pub fn check_smw_conditions(f: &SmwFactors) -> Result<ConditionReport> {
    let bp = pinv(&f.b);
    let e1t = f.e1.transpose();
    let y2t = f.y2.transpose();
    let x2t = f.x2.transpose();
    let x1b = tprod_chain(&[&f.x1, &f.b])?;
    let bx2t = tprod_chain(&[&f.b, &x2t])?;
    let residuals = vec![
        ConditionResidual {
            name: "E2*B^+*E1^T*Y1*B = E2",
            residual: relative_residual(&[&f.e2, &bp, &e1t, &f.y1, &f.b], &f.e2)?,
        },
        ConditionResidual {
            name: "X1*E1^T*Y1*B = X1*B",
            residual: relative_residual(&[&f.x1, &e1t, &f.y1, &f.b], &x1b)?,
        },
        ConditionResidual {
            name: "Y1*E1^T*Y1 = Y1",
            residual: relative_residual(&[&f.y1, &e1t, &f.y1], &f.y1)?,
        },
        ConditionResidual {
            name: "B*Y2^T*E2*B^+*E1^T = E1^T",
            residual: relative_residual(&[&f.b, &y2t, &f.e2, &bp, &e1t], &e1t)?,
        },
        ConditionResidual {
            name: "B*Y2^T*E2*X2^T = B*X2^T",
            residual: relative_residual(&[&f.b, &y2t, &f.e2, &x2t], &bx2t)?,
        },
        ConditionResidual {
            name: "E2*Y2^T*E2 = E2",
            residual: relative_residual(&[&f.e2, &y2t, &f.e2], &f.e2)?,
        },
    ];
    let satisfied = residuals.iter().all(|r| r.residual <= CONDITION_TOL);
    Ok(ConditionReport { residuals, satisfied })
}

/// `M^+ = A^+ - E2*X2^T*A^+ - A^+*X1*E1^T + E2*(B^+ + X2^T*A^+*X1)*E1^T`
/// for `M = A + U*B*V`.
///
/// Refuses with `ConditionsNotSatisfied` unless every condition of
/// [`check_smw_conditions`] holds.
pub fn smw_pinv(a: &Tensor3, f: &SmwFactors) -> Result<Tensor3> {
    if f.x1.n1() != a.n1() || f.x2.n1() != a.n2() || f.x1.n3() != a.n3() {
        return Err(mismatch("smw_pinv", format!("factors for {}", a.dims()), f.u.dims()));
    }
    let report = check_smw_conditions(f)?;
    if !report.satisfied {
        return Err(TensorError::ConditionsNotSatisfied(Box::new(report)));
    }
    let fa = to_faces(a);
    let ap = pinv_faces(&fa, None);
    let x1 = to_faces(&f.x1);
    let e1t = adjoint_faces(&to_faces(&f.e1));
    let x2t = adjoint_faces(&to_faces(&f.x2));
    let e2 = to_faces(&f.e2);
    let bp = pinv_faces(&to_faces(&f.b), None);

    let t1 = e2.mul(&x2t)?.mul(&ap)?;
    let t2 = ap.mul(&x1)?.mul(&e1t)?;
    let inner = bp.zip_map(&x2t.mul(&ap)?.mul(&x1)?, |p, q| p + q)?;
    let t3 = e2.mul(&inner)?.mul(&e1t)?;
    let out = ap
        .zip_map(&t1, |p, q| p - q)?
        .zip_map(&t2, |p, q| p - q)?
        .zip_map(&t3, |p, q| p + q)?;
    from_faces(&out)
}

/// Face-wise conjugate transpose: the Fourier image of the tensor transpose.
fn adjoint_faces(f: &FourierFaces) -> FourierFaces {
    f.map(|_, m| m.adjoint())
}

/// Shape of a conditioned instance: `A` is `n1 x n2 x n3`, the update width is `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmwDims {
    pub n1: usize,
    pub n2: usize,
    pub k: usize,
    pub n3: usize,
}

impl SmwDims {
    pub fn square(n1: usize, k: usize, n3: usize) -> Self {
        Self { n1, n2: n1, k, n3 }
    }
}

impl From<(usize, usize, usize)> for SmwDims {
    fn from((n1, k, n3): (usize, usize, usize)) -> Self {
        Self::square(n1, k, n3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InstanceFamily {
    /// `Y1 = Y2 = 0` with `X1*B = 0` and `B*X2^T = 0`.
    Trivial,
    /// Face-wise matrix instances with orthonormal `Y1`, `Y2` (so `Ei = Yi`)
    /// and invertible `B` faces, lifted with conjugate-symmetric faces.
    MatrixLifted,
}

/// Builds `(A, factors)` satisfying every SMW condition.
///
/// `MatrixLifted` needs `min(n1, n2) >= k + 1`; `Trivial` needs `k >= 2`.
pub fn construct_conditioned_instance(
    dims: impl Into<SmwDims>,
    family: InstanceFamily,
    seed: u64,
) -> Result<(Tensor3, SmwFactors)> {
    let d = dims.into();
    let mut rng = rng_from_seed(seed);
    let (a, u, b, v) = match family {
        InstanceFamily::MatrixLifted => lifted_instance(d, &mut rng)?,
        InstanceFamily::Trivial => trivial_instance(d, &mut rng)?,
    };
    let f = build_smw_factors(&a, &u, &b, &v)?;
    Ok((a, f))
}

fn lifted_instance(d: SmwDims, rng: &mut impl Rng) -> Result<(Tensor3, Tensor3, Tensor3, Tensor3)> {
    let SmwDims { n1, n2, k, n3 } = d;
    if k == 0 || n1.min(n2) < k + 1 {
        return Err(TensorError::InfeasibleDims(format!(
            "need min(n1, n2) >= k + 1 for a nontrivial orthogonal part, got {n1}x{n2} with k = {k}"
        )));
    }
    let max_rank = n1.min(n2) - k;
    let mut a_faces = Vec::new();
    let mut u_faces = Vec::new();
    let mut vt_faces = Vec::new();
    let mut b_faces = Vec::new();
    for i in 0..=n3 / 2 {
        let real = crate::fourier::is_self_conjugate(i, n3);
        let r = rng.random_range(1..=max_rank);
        let ql = random_unitary(n1, real, rng);
        let qr = random_unitary(n2, real, rng);
        let mut a = CMat::zeros(n1, n2);
        for j in 0..r {
            let s = rng.random_range(0.5..2.0);
            a += (ql.column(j) * qr.column(j).adjoint()).scale(s);
        }
        let y1 = ql.columns(r, k).into_owned();
        let y2 = qr.columns(r, k).into_owned();
        let x1 = ql.columns(0, r) * random_face(r, k, real, rng);
        let x2 = qr.columns(0, r) * random_face(r, k, real, rng);
        let w = random_unitary(k, real, rng);
        let z = random_unitary(k, real, rng);
        let mut b = CMat::zeros(k, k);
        for j in 0..k {
            let s = rng.random_range(0.5..2.0);
            b += (w.column(j) * z.column(j).adjoint()).scale(s);
        }
        a_faces.push(a);
        u_faces.push(x1 + y1);
        vt_faces.push(x2 + y2);
        b_faces.push(b);
    }
    let a = tensor_from_half_faces(n3, |i, _| a_faces[i].clone())?;
    let u = tensor_from_half_faces(n3, |i, _| u_faces[i].clone())?;
    let vt = tensor_from_half_faces(n3, |i, _| vt_faces[i].clone())?;
    let b = tensor_from_half_faces(n3, |i, _| b_faces[i].clone())?;
    Ok((a, u, b, vt.transpose()))
}

fn trivial_instance(d: SmwDims, rng: &mut impl Rng) -> Result<(Tensor3, Tensor3, Tensor3, Tensor3)> {
    let SmwDims { n1, n2, k, n3 } = d;
    if k < 2 {
        return Err(TensorError::InfeasibleDims(format!("trivial family needs k >= 2, got k = {k}")));
    }
    let ranks = random_rank_profile(n1, n2, n3, 1, rng);
    let a = with_multirank(n1, n2, &ranks, rng)?;
    // B is zero except its (0, 0) tube; X1 and X2 have a zero first column,
    // so X1*B = 0 and B*X2^T = 0 exactly.
    let b = Tensor3::from_fn((k, k, n3), |i, j, _| if i == 0 && j == 0 { crate::generate::normal(rng) } else { 0.0 })?;
    let w1 = crate::generate::gaussian((n2, k, n3), rng);
    let w2 = crate::generate::gaussian((n1, k, n3), rng);
    let x1 = zero_first_column(&crate::product::tprod(&a, &w1)?);
    let x2 = zero_first_column(&crate::product::tprod(&a.transpose(), &w2)?);
    Ok((a, x1, b, x2.transpose()))
}

fn zero_first_column(t: &Tensor3) -> Tensor3 {
    Tensor3::from_fn(t.dims(), |i, j, k| if j == 0 { 0.0 } else { t.get(i, j, k) }).expect("finite")
}
