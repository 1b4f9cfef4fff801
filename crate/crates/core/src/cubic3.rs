//! Harmonic cubic forms on `R^3`: canonicalization, exhaustive case
//! classification, the degree-six polynomial `rho`, Sturm-based real counting
//! and eigenline reconstruction.
//!
//! A harmonic cubic `q` is reduced to four parameters: a minimizer `c1` of
//! `q` on the sphere is an eigenline representative of the gradient map `Q`;
//! diagonalizing `L(c1) = DQ(c1)/2` on its complement gives an orthonormal
//! basis in which `Q` takes the form
//!
//! ```text
//! Q(x) = ( -(a2+a3) x1^2 + a2 x2^2 + a3 x3^2,
//!          2 a2 x1 x2 + b2 x2^2 + 2 b3 x2 x3 - b2 x3^2,
//!          2 a3 x1 x3 + b3 x2^2 - 2 b2 x2 x3 - b3 x3^2 )
//! ```
//!
//! Vanishing patterns of `(b2, b3, a2 - a3)` split the classification into
//! explicitly solvable special cases; in the generic case the eigenlines off
//! `R c1` biject with the real roots of a degree-six polynomial `rho(t)`,
//! counted exactly by Sturm sequences. The `rho` coefficients are not
//! transcribed from a table: they are recomputed by symbolic elimination from
//! the canonical map itself, and the transcribed table is kept only as a
//! cross-check.

use crate::eigen::{
    self, normalize_eigenvalue, verify_eigenline, EigenLine, ExtremumMode, PhReport,
    SphereIndex, StationaryType,
};
use crate::error::{Error, Result};
use crate::scalar::{f64_to_rat, rat_int, rat_sign, rat_to_f64};
use crate::tensor::{Form, HomogeneousMap, MultiIndex};
use crate::upoly::{self, RootReport, UnivarPoly};
use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Default zero tolerance (relative) for classification decisions on
/// floating-point input; the warning band extends to `NEAR_DEGENERATE_TOL`.
pub const ZERO_TOL: f64 = 1e-10;
pub const NEAR_DEGENERATE_TOL: f64 = 1e-6;

/// The reduced parametrization `(a2, a3, b2, b3)` of a harmonic cubic,
/// together with the orthonormal basis and the positive scale that reach the
/// normalization.
#[derive(Debug, Clone)]
pub struct CubicCanonicalForm {
    pub alpha2: BigRational,
    pub alpha3: BigRational,
    pub beta2: BigRational,
    pub beta3: BigRational,
    /// Columns `c1, c2, c3` in the original coordinates.
    pub basis: [[f64; 3]; 3],
    /// Positive factor applied to all four parameters (reaching
    /// `2(a2 - a3) = 1` when `a2 != a3`).
    pub scale: BigRational,
    /// True when the parameters were supplied exactly rather than recovered
    /// through floating point.
    pub exact: bool,
}

impl CubicCanonicalForm {
    /// Exact construction from given parameters; basis is the standard one.
    pub fn from_params(
        alpha2: BigRational,
        alpha3: BigRational,
        beta2: BigRational,
        beta3: BigRational,
    ) -> Result<Self> {
        let e2 = &alpha2 * rat_int(3) + &alpha3;
        let e3 = &alpha2 + &alpha3 * rat_int(3);
        if alpha2 < alpha3 {
            return Err(Error::InvalidParameter("ordering a2 >= a3 violated".into()));
        }
        if e2.is_negative() || e3.is_negative() {
            return Err(Error::InvalidParameter(
                "minimum condition 3a2+a3 >= 0, a2+3a3 >= 0 violated".into(),
            ));
        }
        if e2.is_zero() && e3.is_zero() {
            if beta2.is_zero() && beta3.is_zero() {
                return Err(Error::InvalidParameter("zero map".into()));
            }
            return Err(Error::MinimumDegenerate);
        }
        Ok(CubicCanonicalForm {
            alpha2,
            alpha3,
            beta2,
            beta3,
            basis: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            scale: BigRational::one(),
            exact: true,
        })
    }

    pub fn params(&self) -> [&BigRational; 4] {
        [&self.alpha2, &self.alpha3, &self.beta2, &self.beta3]
    }

    pub fn params_f64(&self) -> [f64; 4] {
        [
            rat_to_f64(&self.alpha2),
            rat_to_f64(&self.alpha3),
            rat_to_f64(&self.beta2),
            rat_to_f64(&self.beta3),
        ]
    }

    fn param_scale(&self) -> f64 {
        self.params_f64().iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0)
    }

    /// Map a point in canonical coordinates to the original ones.
    pub fn to_original(&self, u: &[f64; 3]) -> [f64; 3] {
        let b = &self.basis;
        [
            b[0][0] * u[0] + b[0][1] * u[1] + b[0][2] * u[2],
            b[1][0] * u[0] + b[1][1] * u[1] + b[1][2] * u[2],
            b[2][0] * u[0] + b[2][1] * u[1] + b[2][2] * u[2],
        ]
    }
}

/// The canonical quadratic map of the four-parameter family, exactly.
pub fn build_map(form: &CubicCanonicalForm) -> Result<HomogeneousMap<BigRational>> {
    let a2 = &form.alpha2;
    let a3 = &form.alpha3;
    let b2 = &form.beta2;
    let b3 = &form.beta3;
    let two = rat_int(2);
    let entries: Vec<(usize, Vec<u32>, BigRational)> = vec![
        (0, vec![2, 0, 0], -(a2 + a3)),
        (0, vec![0, 2, 0], a2.clone()),
        (0, vec![0, 0, 2], a3.clone()),
        (1, vec![1, 1, 0], &two * a2),
        (1, vec![0, 2, 0], b2.clone()),
        (1, vec![0, 1, 1], &two * b3),
        (1, vec![0, 0, 2], -b2),
        (2, vec![1, 0, 1], &two * a3),
        (2, vec![0, 2, 0], b3.clone()),
        (2, vec![0, 1, 1], -(&two * b2)),
        (2, vec![0, 0, 2], -b3),
    ];
    HomogeneousMap::from_entries(3, 2, entries)
}

/// Subcases of the single-vanishing-beta branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiAxialKind {
    /// `a2 = a3`: seven lines.
    EqualAlphas,
    /// Boundary `3 a2 + a3 = 0` (in the orientation with the vanishing beta
    /// in slot 2) with `4 a2^2 != b3^2`: five lines, the minimizer line
    /// degenerate.
    ThreeAlphaDegenerate,
    /// Same boundary with `4 a2^2 = b3^2`: an infinite family on a quadric.
    ThreeAlphaQuadric,
    /// Otherwise: a quartic with at least two real roots.
    General,
}

/// Case tag of the classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicClass {
    /// `b2 = b3 = 0`, `a2 != a3`: at most five lines.
    Axial,
    /// `b2 = b3 = 0`, `a2 = a3`: infinite family on `-4x1^2+x2^2+x3^2 = 0`.
    AxialQuadric,
    /// Exactly one beta vanishes. `swapped` records that the vanishing one
    /// is `b3`, i.e. the analysis runs with labels 2 and 3 interchanged.
    SemiAxial { kind: SemiAxialKind, swapped: bool },
    /// `b2 b3 != 0`, `a2 = a3`: seven lines through a cubic in `x3/x2`.
    GenericEqualAlphas,
    /// `b2 b3 != 0`, `a2 != a3`: the degree-six pipeline.
    Generic,
    /// `gcd(rho, rho')` nonconstant: a transition in the number of real
    /// zeros (assigned during analysis).
    Degenerate,
}

/// Classification outcome with near-boundary warnings.
#[derive(Debug, Clone)]
pub struct Classification {
    pub class: CubicClass,
    /// Quantities that fell inside the warning band
    /// `(ZERO_TOL, NEAR_DEGENERATE_TOL] * scale`.
    pub near_degenerate: Vec<String>,
}

struct ZeroTest {
    exact: bool,
    tol: f64,
    scale: f64,
    warnings: Vec<String>,
}

impl ZeroTest {
    fn is_zero(&mut self, v: &BigRational, label: &str) -> bool {
        if self.exact {
            return v.is_zero();
        }
        let x = rat_to_f64(v).abs();
        if x <= self.tol * self.scale {
            true
        } else {
            if x <= NEAR_DEGENERATE_TOL * self.scale {
                self.warnings.push(format!("{} = {:.3e} near the case boundary", label, x));
            }
            false
        }
    }
}

/// Assign the case tag by exact zero tests for exact parameters, or by
/// `|.| < zero_tol * scale` with a near-degenerate warning band otherwise.
pub fn classify(form: &CubicCanonicalForm, zero_tol: f64) -> Classification {
    let mut zt = ZeroTest {
        exact: form.exact,
        tol: zero_tol,
        scale: form.param_scale(),
        warnings: vec![],
    };
    let a2 = &form.alpha2;
    let a3 = &form.alpha3;
    let b2z = zt.is_zero(&form.beta2, "beta2");
    let b3z = zt.is_zero(&form.beta3, "beta3");
    let aeq = zt.is_zero(&(a2 - a3), "a2 - a3");

    let class = if b2z && b3z {
        if aeq {
            CubicClass::AxialQuadric
        } else {
            CubicClass::Axial
        }
    } else if b2z || b3z {
        let swapped = b3z;
        // paper orientation: the vanishing beta sits in slot 2
        let (pa2, pa3, pb3) = if swapped {
            (a3.clone(), a2.clone(), form.beta2.clone())
        } else {
            (a2.clone(), a3.clone(), form.beta3.clone())
        };
        let kind = if aeq {
            SemiAxialKind::EqualAlphas
        } else if zt.is_zero(&(&pa2 * rat_int(3) + &pa3), "3a2+a3") {
            let gap = &pa2 * &pa2 * rat_int(4) - &pb3 * &pb3;
            if zt.is_zero(&gap, "4a2^2-b3^2") {
                SemiAxialKind::ThreeAlphaQuadric
            } else {
                SemiAxialKind::ThreeAlphaDegenerate
            }
        } else {
            SemiAxialKind::General
        };
        CubicClass::SemiAxial { kind, swapped }
    } else if aeq {
        CubicClass::GenericEqualAlphas
    } else {
        CubicClass::Generic
    };
    Classification { class, near_degenerate: zt.warnings }
}

// ---------------------------------------------------------------------------
// rho: transcription and independent elimination
// ---------------------------------------------------------------------------

fn require_generic_scaled(form: &CubicCanonicalForm) -> Result<()> {
    let d = &form.alpha2 - &form.alpha3;
    if d * rat_int(2) != BigRational::one() {
        return Err(Error::InvalidParameter("scaling 2(a2-a3) = 1 not in force".into()));
    }
    if form.beta2.is_zero() || form.beta3.is_zero() {
        return Err(Error::InvalidParameter("generic case needs b2, b3 nonzero".into()));
    }
    Ok(())
}

/// The transcribed coefficient table for `rho` (cross-check only; the
/// production route is [`rho_by_elimination`]).
pub fn rho_from_table(form: &CubicCanonicalForm) -> Result<UnivarPoly> {
    require_generic_scaled(form)?;
    let a2 = &form.alpha2;
    let b2 = &form.beta2;
    let b3 = &form.beta3;
    let c = rat_int;
    let g6 = b2 * b2 * (a2 * c(8) - c(3));
    let g5 = b2 * b3 * c(16) * (a2 * c(-3) + c(1));
    let g4 = a2 * b2 * b2 * c(-48) + a2 * b3 * b3 * c(72) + b2 * b2 * c(14)
        - b3 * b3 * c(21)
        - a2 * c(2)
        + c(1);
    let g3 = b2 * b3 * c(40) * (a2 * c(4) - c(1));
    let g2 =
        a2 * b2 * b2 * c(72) - a2 * b3 * b3 * c(48) - b2 * b2 * c(15) + b3 * b3 * c(10) - a2 * c(2);
    let g1 = b2 * b3 * c(8) * (a2 * c(-6) + c(1));
    let g0 = b3 * b3 * (a2 * c(8) - c(1));
    Ok(UnivarPoly::new(vec![g0, g1, g2, g3, g4, g5, g6]))
}

/// Express a trivariate form at `x2 = 1`, `x3 = t` as polynomials in `t`
/// graded by the power of `x1`.
fn form_to_x1_polys(f: &Form<BigRational>) -> Vec<UnivarPoly> {
    let max_x1 = f.terms().map(|(mi, _)| mi.0[0]).max().unwrap_or(0) as usize;
    let mut slots: Vec<Vec<BigRational>> = vec![vec![]; max_x1 + 1];
    for (mi, c) in f.terms() {
        let (a, cc) = (mi.0[0] as usize, mi.0[2] as usize);
        if slots[a].len() <= cc {
            slots[a].resize(cc + 1, BigRational::zero());
        }
        slots[a][cc] += c;
    }
    slots.into_iter().map(UnivarPoly::new).collect()
}

/// Derive `rho` by symbolic elimination from the canonical map itself: build
/// the minor of rows 2,3 of `(Q(x) | x)` and the symmetrized combination of
/// the other two minors, substitute `x2 = 1`, `x3 = t`, solve the first for
/// `x1` and eliminate. Never reads the transcribed table.
pub fn rho_by_elimination(form: &CubicCanonicalForm) -> Result<UnivarPoly> {
    require_generic_scaled(form)?;
    let q = build_map(form)?;
    let (m23, sym) = minor_forms(&q);

    // rows 2,3 minor at x2 = 1, x3 = t is linear in x1
    let m23_slots = form_to_x1_polys(&m23);
    if m23_slots.len() != 2 {
        return Err(Error::InvalidParameter("unexpected minor structure".into()));
    }
    // m23 = lin(t) x1 + con(t), with lin(t) = 2(a2-a3) t = t
    let lin = &m23_slots[1];
    let con = &m23_slots[0];

    // symmetrized minor is quadratic in x1: s2 x1^2 + s1 x1 + s0;
    // substitute x1 = -con/lin and clear lin^2
    let sym_slots = form_to_x1_polys(&sym);
    let get =
        |k: usize| -> UnivarPoly { sym_slots.get(k).cloned().unwrap_or_else(UnivarPoly::zero) };
    let (s0, s1, s2) = (get(0), get(1), get(2));
    let rho = s2.mul(con).mul(con).sub(&s1.mul(con).mul(lin)).add(&s0.mul(lin).mul(lin));

    // under the scaling convention lin(t) = t, so a factor t^2 clears out;
    // what remains has degree six and no root at t = 0
    let (quot, rem) = rho.divrem(&UnivarPoly::from_ints(&[0, 0, 1]));
    if !rem.is_zero() {
        return Err(Error::InvalidParameter("elimination did not clear t^2".into()));
    }
    Ok(quot)
}

/// Minor of rows 2,3 of `(Q(x)|x)` and the symmetrized combination
/// `x2^2 x3 * minor(1,3) - x2 x3^2 * minor(1,2)`, as exact trivariate forms.
fn minor_forms(q: &HomogeneousMap<BigRational>) -> (Form<BigRational>, Form<BigRational>) {
    let q1 = q.component(0);
    let q2 = q.component(1);
    let q3 = q.component(2);
    let m23 = q2.mul_var(2).sub(&q3.mul_var(1)); // Q2 x3 - Q3 x2
    let m12 = q1.mul_var(1).sub(&q2.mul_var(0)); // Q1 x2 - Q2 x1
    let m13 = q3.mul_var(0).sub(&q1.mul_var(2)); // Q3 x1 - Q1 x3
    let sym = m13.mul_var(1).mul_var(1).mul_var(2).sub(&m12.mul_var(1).mul_var(2).mul_var(2));
    (m23, sym)
}

/// Production route for `rho`: the elimination derivation. The degree and the
/// nonvanishing of the extreme coefficients are verified.
pub fn rho_polynomial(form: &CubicCanonicalForm) -> Result<UnivarPoly> {
    let rho = rho_by_elimination(form)?;
    if rho.deg() != Some(6) {
        return Err(Error::InvalidParameter(format!("rho degree {:?}, expected 6", rho.deg())));
    }
    if rho.coeff(0).is_zero() {
        return Err(Error::InvalidParameter("rho constant term vanishes".into()));
    }
    Ok(rho)
}

// ---------------------------------------------------------------------------
// canonicalization
// ---------------------------------------------------------------------------

/// Remove the non-harmonic part of a cubic exactly:
/// `q_h = q - |x|^2 (laplacian q) / 10`.
pub fn harmonic_projection(q: &Form<BigRational>) -> Form<BigRational> {
    let lap = q.laplacian();
    if lap.is_zero() {
        return q.clone();
    }
    let mut r2 = Form::zero(3, 2);
    for i in 0..3 {
        let mut exp = vec![0u32; 3];
        exp[i] = 2;
        r2.add_term(MultiIndex(exp), BigRational::one());
    }
    q.sub(&r2.mul(&lap).map_coeffs(|c| c / rat_int(10)))
}

/// Recover the canonical parametrization of a harmonic cubic: minimizer,
/// diagonalized `L(c1)`, the two cubic coefficients, sign canonicalization
/// (both betas nonnegative) and the exact positive rescaling to
/// `2(a2 - a3) = 1`.
pub fn canonicalize(q: &Form<f64>, seed: u64) -> Result<CubicCanonicalForm> {
    if q.n() != 3 || q.degree() != 3 {
        return Err(Error::NotCubicR3 { n: q.n(), degree: q.degree() });
    }
    let scale = q.coeff_scale().max(1.0);
    let lap = q.laplacian();
    if lap.coeff_scale() > 1e-9 * scale {
        return Err(Error::NotHarmonic);
    }
    let gm = q.gradient_map()?;

    let ext = eigen::extremum_on_sphere(q, ExtremumMode::Min, seed)?;
    let c1 = DVector::from_column_slice(&ext.point);

    // L(c1) = DQ(c1)/2 restricted to the complement of c1
    let jac = gm.jacobian_at(ext.point.as_slice())?;
    let dq = DMatrix::from_fn(3, 3, |i, j| jac[i][j]);
    let l1 = &dq * 0.5;
    let comp = eigen::orthonormal_complement(ext.point.as_slice());
    let restricted = comp.transpose() * &l1 * &comp;
    let s2 =
        Matrix2::new(restricted[(0, 0)], restricted[(0, 1)], restricted[(1, 0)], restricted[(1, 1)]);
    let sym = (s2 + s2.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    // order a2 >= a3
    let (i2, i3) = if eig.eigenvalues[0] >= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let mut alpha2 = eig.eigenvalues[i2];
    let mut alpha3 = eig.eigenvalues[i3];
    let v2 = eig.eigenvectors.column(i2);
    let v3 = eig.eigenvectors.column(i3);
    let mut c2 = &comp * DVector::from_column_slice(&[v2[0], v2[1]]);
    let mut c3 = &comp * DVector::from_column_slice(&[v3[0], v3[1]]);

    // minimum conditions: the sphere-field eigenvalues at c1
    let e2 = 3.0 * alpha2 + alpha3;
    let e3 = alpha2 + 3.0 * alpha3;
    if e2.abs() <= ZERO_TOL * scale && e3.abs() <= ZERO_TOL * scale {
        return Err(Error::MinimumDegenerate);
    }
    if e2 < -1e-7 * scale || e3 < -1e-7 * scale {
        // the located extremum is not a minimum: a failed search upstream
        return Err(Error::MinimumDegenerate);
    }

    let beta_at = |c2: &DVector<f64>, c3: &DVector<f64>| -> (f64, f64) {
        let qc2 = gm.evaluate(c2.as_slice()).unwrap();
        let b2: f64 = qc2.iter().zip(c2.iter()).map(|(a, b)| a * b).sum();
        let b3: f64 = qc2.iter().zip(c3.iter()).map(|(a, b)| a * b).sum();
        (b2, b3)
    };
    let (mut beta2, mut beta3) = beta_at(&c2, &c3);
    // sign canonicalization: flip c2 to make b2 >= 0, then c3 for b3
    if beta2 < 0.0 {
        c2 = -c2;
        beta2 = -beta2;
    }
    if beta3 < 0.0 {
        c3 = -c3;
        beta3 = -beta3;
    }

    // snap decided zeros and equalities so downstream tests are exact
    let pscale = [alpha2, alpha3, beta2, beta3].iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if beta2.abs() <= ZERO_TOL * pscale {
        beta2 = 0.0;
    }
    if beta3.abs() <= ZERO_TOL * pscale {
        beta3 = 0.0;
    }
    if (alpha2 - alpha3).abs() <= ZERO_TOL * pscale {
        let avg = (alpha2 + alpha3) / 2.0;
        alpha2 = avg;
        alpha3 = avg;
    }

    let mut form = CubicCanonicalForm {
        alpha2: f64_to_rat(alpha2),
        alpha3: f64_to_rat(alpha3),
        beta2: f64_to_rat(beta2),
        beta3: f64_to_rat(beta3),
        basis: [[c1[0], c2[0], c3[0]], [c1[1], c2[1], c3[1]], [c1[2], c2[2], c3[2]]],
        scale: BigRational::one(),
        exact: false,
    };

    // exact positive rescaling to 2(a2 - a3) = 1
    let d = &form.alpha2 - &form.alpha3;
    if !d.is_zero() {
        let s = (rat_int(2) * &d).recip();
        form.alpha2 *= &s;
        form.alpha3 *= &s;
        form.beta2 *= &s;
        form.beta3 *= &s;
        form.scale = s;
    }
    Ok(form)
}

/// Coefficientwise self-check: the canonical map equals the conjugated,
/// rescaled original gradient map. Returns the largest coefficient gap.
pub fn canonical_selfcheck(form: &CubicCanonicalForm, gm: &HomogeneousMap<f64>) -> Result<f64> {
    let b = &form.basis;
    let cols: Vec<Vec<f64>> = (0..3).map(|j| (0..3).map(|i| b[i][j]).collect()).collect();
    // x = C u: row i of the substitution lists the coefficients of x_i
    let subs: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| b[i][j]).collect()).collect();
    let s = rat_to_f64(&form.scale);
    let mut conj_comps = Vec::with_capacity(3);
    for col in cols.iter() {
        // (C^T Q(Cu))_i = sum_k C[k][i] Q_k(Cu)
        let mut acc = Form::zero(3, 2);
        for (k, w) in col.iter().enumerate() {
            let composed = gm.component(k).substitute_linear(&subs);
            acc = acc.add(&composed.scale(w));
        }
        conj_comps.push(acc.scale(&s));
    }
    let conj = HomogeneousMap::from_components(conj_comps)?;
    let canon = build_map(form)?.to_f64();
    let mut gap = 0.0f64;
    for j in 0..3 {
        let diff = canon.component(j).sub(conj.component(j));
        gap = gap.max(diff.coeff_scale());
    }
    Ok(gap)
}

// ---------------------------------------------------------------------------
// eigenline reconstruction
// ---------------------------------------------------------------------------

/// Polish a candidate representative against the original map by the
/// bordered eigenvector Newton, then package it with residual and
/// multiplicity flags.
fn polish_and_verify(
    original: &HomogeneousMap<f64>,
    point: [f64; 3],
    max_residual: f64,
) -> Result<EigenLine> {
    let n = 3;
    let jac_forms = original.jacobian_forms();
    let scale = original.coeff_scale().max(1.0);
    let mut x: Vec<f64> = point.to_vec();
    let nrm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in x.iter_mut() {
        *v /= nrm;
    }
    let mut lam: f64 = {
        let qx = original.evaluate(&x)?;
        qx.iter().zip(&x).map(|(a, b)| a * b).sum()
    };
    for _ in 0..60 {
        let qx = original.evaluate(&x)?;
        let mut f = DVector::<f64>::zeros(n + 1);
        for i in 0..n {
            f[i] = qx[i] - lam * x[i];
        }
        f[n] = (x.iter().map(|v| v * v).sum::<f64>() - 1.0) / 2.0;
        if f.norm() < 1e-14 * scale {
            break;
        }
        let mut jm = DMatrix::<f64>::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                jm[(i, j)] = jac_forms[i][j].eval(&x)? - if i == j { lam } else { 0.0 };
            }
            jm[(i, n)] = -x[i];
            jm[(n, i)] = x[i];
        }
        f.neg_mut();
        let Some(step) = jm.lu().solve(&f) else { break };
        for (xi, si) in x.iter_mut().zip(step.iter().take(n)) {
            *xi += si;
        }
        lam += step[n];
    }
    let u: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut line =
        normalize_eigenvalue(&u, Complex64::new(lam, 0.0), 2, true, original.coeff_scale())?;
    let rec = verify_eigenline(original, &line).map_err(|e| match e {
        Error::NotAnEigenline { residual, .. } => Error::ResidualTooLarge { residual },
        other => other,
    })?;
    if rec.residual > max_residual * scale {
        return Err(Error::ResidualTooLarge { residual: rec.residual });
    }
    line.residual = rec.residual;
    line.simple = rec.simple;
    Ok(line)
}

fn dedup_push(lines: &mut Vec<EigenLine>, line: EigenLine) {
    for known in lines.iter() {
        if eigen::line_distance(&line.rep, &known.rep) < 1e-7 {
            return;
        }
    }
    lines.push(line);
}

/// Rebuild the eigenlines of the generic case from the real roots of `rho`:
/// `x2 = 1`, `x3 = t`, `x1 = v(t)/t`, mapped back through the basis and
/// verified against the original (pre-scaling, pre-rotation) map.
pub fn reconstruct_eigenlines(
    form: &CubicCanonicalForm,
    roots: &RootReport,
    original: &HomogeneousMap<f64>,
    rho: &UnivarPoly,
) -> Result<Vec<EigenLine>> {
    let [_, _, b2, b3] = form.params_f64();
    let rho_f: Vec<f64> = rho.to_f64_coeffs();
    let drho: Vec<f64> =
        rho_f.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
    let eval = |c: &[f64], t: f64| -> f64 {
        let mut acc = 0.0;
        for v in c.iter().rev() {
            acc = acc * t + v;
        }
        acc
    };
    let mut lines: Vec<EigenLine> = Vec::new();
    // the minimizer line R c1 always belongs to the list
    lines.push(polish_and_verify(
        original,
        [form.basis[0][0], form.basis[1][0], form.basis[2][0]],
        1e-9,
    )?);
    for root in &roots.roots {
        let mut t = rat_to_f64(&root.approx);
        // Newton polish on rho (simple roots unless flagged degenerate)
        for _ in 0..40 {
            let f = eval(&rho_f, t);
            let d = eval(&drho, t);
            if d.abs() < 1e-300 {
                break;
            }
            let step = f / d;
            t -= step;
            if step.abs() < 1e-16 * (1.0 + t.abs()) {
                break;
            }
        }
        let v = b2 * t * t * t - 3.0 * b3 * t * t - 3.0 * b2 * t + b3;
        let u = [v / t, 1.0, t];
        let pt = form.to_original(&u);
        let line = polish_and_verify(original, pt, 1e-9)?;
        dedup_push(&mut lines, line);
    }
    Ok(lines)
}

// ---------------------------------------------------------------------------
// special cases
// ---------------------------------------------------------------------------

/// Projective real roots of the binary quadratic `A u^2 + B uv + C v^2`,
/// with exact multiplicity from the discriminant sign.
fn binary_quadratic_roots(
    a: &BigRational,
    b: &BigRational,
    c: &BigRational,
) -> Vec<((f64, f64), u32)> {
    let (af, bf, cf) = (rat_to_f64(a), rat_to_f64(b), rat_to_f64(c));
    if a.is_zero() && b.is_zero() && c.is_zero() {
        return vec![];
    }
    if a.is_zero() {
        if b.is_zero() {
            // C v^2 = 0: the double root (1 : 0)
            return vec![((1.0, 0.0), 2)];
        }
        // v (B u + C v) = 0
        return vec![((1.0, 0.0), 1), ((-cf / bf, 1.0), 1)];
    }
    let disc = b * b - rat_int(4) * a * c;
    match rat_sign(&disc) {
        1 => {
            let s = rat_to_f64(&disc).sqrt();
            vec![(((-bf + s) / (2.0 * af), 1.0), 1), (((-bf - s) / (2.0 * af), 1.0), 1)]
        }
        0 => vec![((-bf / (2.0 * af), 1.0), 2)],
        _ => vec![],
    }
}

/// Everything a special case yields: verified lines in the original
/// coordinates, the exact quadric carrying an infinite family when one
/// exists, and the structurally exact real-line count.
#[derive(Debug, Clone)]
pub struct SpecialSolution {
    pub lines: Vec<EigenLine>,
    /// Exact quadric in canonical coordinates whose points (united with
    /// `R c1`) are all eigenlines; present only for the infinite families.
    pub quadric: Option<Form<BigRational>>,
    /// Exact count of distinct real lines; `None` when infinite.
    pub real_count: Option<usize>,
}

/// Solve a non-generic case by its explicit reduction. All finite outputs
/// are verified against the original map.
pub fn solve_special_case(
    form: &CubicCanonicalForm,
    class: &CubicClass,
    original: &HomogeneousMap<f64>,
) -> Result<SpecialSolution> {
    let a2 = form.alpha2.clone();
    let a3 = form.alpha3.clone();
    let mut lines: Vec<EigenLine> = Vec::new();
    let mut quadric: Option<Form<BigRational>> = None;

    let c1_pt = [form.basis[0][0], form.basis[1][0], form.basis[2][0]];
    lines.push(polish_and_verify(original, c1_pt, 1e-9)?);

    let push_pt = |lines: &mut Vec<EigenLine>, u: [f64; 3]| -> Result<()> {
        let pt = form.to_original(&u);
        let line = polish_and_verify(original, pt, 1e-9)?;
        dedup_push(lines, line);
        Ok(())
    };

    match class {
        CubicClass::Axial => {
            // x1 = 0 plane: a2 x2^2 + a3 x3^2 = 0
            for ((u, v), _) in binary_quadratic_roots(&a2, &BigRational::zero(), &a3) {
                push_pt(&mut lines, [0.0, u, v])?;
            }
            // x2 = 0: (a2 + 3 a3) x1^2 - a3 x3^2 = 0
            let c_a = &a2 + rat_int(3) * &a3;
            for ((u, v), _) in binary_quadratic_roots(&c_a, &BigRational::zero(), &-&a3) {
                push_pt(&mut lines, [u, 0.0, v])?;
            }
            // x3 = 0: -(3 a2 + a3) x1^2 + a2 x2^2 = 0
            let c_b = -(rat_int(3) * &a2 + &a3);
            for ((u, v), _) in binary_quadratic_roots(&c_b, &BigRational::zero(), &a2) {
                push_pt(&mut lines, [u, v, 0.0])?;
            }
        }
        CubicClass::AxialQuadric => {
            // all of -4 x1^2 + x2^2 + x3^2 = 0, united with R c1
            let mut f = Form::zero(3, 2);
            f.add_term(MultiIndex(vec![2, 0, 0]), rat_int(-4));
            f.add_term(MultiIndex(vec![0, 2, 0]), rat_int(1));
            f.add_term(MultiIndex(vec![0, 0, 2]), rat_int(1));
            quadric = Some(f);
        }
        CubicClass::SemiAxial { kind, swapped } => {
            // paper orientation: the vanishing beta in slot 2. Conjugating by
            // the 2<->3 coordinate swap sends (a2, a3, b2, b3) to
            // (a3, a2, -b3, -b2), so the surviving beta changes sign.
            let (pa2, pa3, pb3) = if *swapped {
                (a3.clone(), a2.clone(), -form.beta2.clone())
            } else {
                (a2.clone(), a3.clone(), form.beta3.clone())
            };
            let back = |u: [f64; 3]| -> [f64; 3] {
                if *swapped {
                    [u[0], u[2], u[1]]
                } else {
                    u
                }
            };
            // in-plane (x2 = 0): (a2 + 3 a3) x1^2 - b3 x1 x3 - a3 x3^2 = 0
            let ca = &pa2 + rat_int(3) * &pa3;
            for ((u, v), _) in binary_quadratic_roots(&ca, &-&pb3, &-&pa3) {
                push_pt(&mut lines, back([u, 0.0, v]))?;
            }
            match kind {
                SemiAxialKind::EqualAlphas => {
                    // x2^2 = 3 x3^2; then 2 a x1^2 + b3 x1 - 2 a = 0 at x3 = 1
                    let two_a = rat_int(2) * &pa2; // pa2 = pa3 here
                    for sgn in [1.0f64, -1.0] {
                        for ((u, v), _) in binary_quadratic_roots(&two_a, &pb3, &-&two_a) {
                            push_pt(&mut lines, back([u / v, sgn * 3f64.sqrt(), 1.0]))?;
                        }
                    }
                }
                SemiAxialKind::ThreeAlphaDegenerate => {
                    for sgn in [1.0f64, -1.0] {
                        push_pt(&mut lines, back([0.0, sgn * 3f64.sqrt(), 1.0]))?;
                    }
                }
                SemiAxialKind::ThreeAlphaQuadric => {
                    // 8 a2 x1 x3 - b3 x2^2 + 3 b3 x3^2 = 0; divided by b3:
                    // +-4 x1 x3 - x2^2 + 3 x3^2 = 0 in paper coordinates
                    let ratio = rat_int(8) * &pa2 / &pb3; // exactly +-4
                    let mut f = Form::zero(3, 2);
                    let (i2, i3) = if *swapped { (2, 1) } else { (1, 2) };
                    let mut e13 = vec![0u32; 3];
                    e13[0] = 1;
                    e13[i3] += 1;
                    f.add_term(MultiIndex(e13), ratio);
                    let mut e22 = vec![0u32; 3];
                    e22[i2] = 2;
                    f.add_term(MultiIndex(e22), rat_int(-1));
                    let mut e33 = vec![0u32; 3];
                    e33[i3] = 2;
                    f.add_term(MultiIndex(e33), rat_int(3));
                    quadric = Some(f);
                }
                SemiAxialKind::General => {
                    // quartic in t = x2 at x3 = 1, through s = t^2 - 3:
                    // A s^2 + B s + C with A < 0 < C
                    let d = &pa2 - &pa3;
                    let e = rat_int(3) * &pa2 + &pa3;
                    let qa = -(&e * &pb3 * &pb3);
                    let qb = rat_int(-4) * &d * (&pb3 * &pb3 - &pa2 * &d);
                    let qc = rat_int(4) * &d * &d * &e;
                    let s_poly = UnivarPoly::new(vec![qc, qb, qa]);
                    let shift = UnivarPoly::from_ints(&[-3, 0, 1]); // t^2 - 3
                    let quartic = compose(&s_poly, &shift);
                    let width = BigRational::new(1.into(), (1i64 << 30).into());
                    let report = upoly::real_roots(&quartic, None, &width)?;
                    let d_f = rat_to_f64(&d);
                    let b3_f = rat_to_f64(&pb3);
                    for root in &report.roots {
                        let t = rat_to_f64(&root.approx);
                        let x1 = b3_f * (t * t - 3.0) / (2.0 * d_f);
                        push_pt(&mut lines, back([x1, t, 1.0]))?;
                    }
                }
            }
        }
        CubicClass::GenericEqualAlphas => {
            // cubic -b2 t^3 + 3 b3 t^2 + 3 b2 t - b3 in t = x3/x2 has three
            // real roots; each yields two real values of v = x1 x2 x3
            let b2 = form.beta2.clone();
            let b3 = form.beta3.clone();
            let cubic = UnivarPoly::new(vec![-&b3, rat_int(3) * &b2, rat_int(3) * &b3, -&b2]);
            let width = BigRational::new(1.into(), (1i64 << 30).into());
            let report = upoly::real_roots(&cubic, None, &width)?;
            let (b2f, b3f, alf) = (rat_to_f64(&b2), rat_to_f64(&b3), rat_to_f64(&a2));
            for root in &report.roots {
                let t = rat_to_f64(&root.approx);
                // 8 a v^2 + w(t) v - 2 a (t^2 + t^4) = 0, discriminant > 0
                let w = b3f - b2f * t + b3f * t * t - b2f * t * t * t;
                let aa = 8.0 * alf;
                let cc = -2.0 * alf * (t * t + t * t * t * t);
                let disc = (w * w - 4.0 * aa * cc).sqrt();
                for v in [(-w + disc) / (2.0 * aa), (-w - disc) / (2.0 * aa)] {
                    push_pt(&mut lines, [v / t, 1.0, t])?;
                }
            }
        }
        CubicClass::Generic | CubicClass::Degenerate => {
            return Err(Error::InvalidParameter(
                "generic case runs through the rho pipeline".into(),
            ));
        }
    }

    let real_count = if quadric.is_some() { None } else { Some(lines.len()) };
    Ok(SpecialSolution { lines, quadric, real_count })
}

/// Polynomial composition `p(s(t))`.
fn compose(p: &UnivarPoly, s: &UnivarPoly) -> UnivarPoly {
    let mut acc = UnivarPoly::zero();
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(s).add(&UnivarPoly::constant(c.clone()));
    }
    acc
}

// ---------------------------------------------------------------------------
// the full pipeline
// ---------------------------------------------------------------------------

/// Number of real eigenlines; the infinite families report a quadric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineCount {
    Finite(usize),
    Infinite,
}

/// Stationary data of one antipodal point.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub point: Vec<f64>,
    pub stationary_type: StationaryType,
    pub index: Option<i32>,
}

/// Full analysis of a harmonic cubic.
#[derive(Debug, Clone)]
pub struct CubicReport {
    pub canonical: CubicCanonicalForm,
    pub classification: Classification,
    pub rho: Option<UnivarPoly>,
    pub rho_roots: Option<RootReport>,
    pub real_line_count: LineCount,
    pub eigenlines: Vec<EigenLine>,
    pub quadric: Option<Form<BigRational>>,
    /// Both antipodal points of every real line.
    pub critical_profile: Vec<CriticalPoint>,
    pub maxima_count: usize,
    pub minima_count: usize,
    pub saddle_count: usize,
    /// Antipodal index sum versus the Euler characteristic; absent when the
    /// family is infinite or a stationary point is degenerate.
    pub ph_check: Option<PhReport>,
    pub warnings: Vec<String>,
}

/// Run the complete pipeline on a harmonic cubic given exactly; the
/// harmonicity test is exact.
pub fn analyze_rational(q: &Form<BigRational>, seed: u64, tol: f64) -> Result<CubicReport> {
    if q.n() != 3 || q.degree() != 3 {
        return Err(Error::NotCubicR3 { n: q.n(), degree: q.degree() });
    }
    if !q.laplacian().is_zero() {
        return Err(Error::NotHarmonic);
    }
    analyze_inner(&q.to_f64(), seed, tol)
}

/// Run the complete pipeline on a floating-point harmonic cubic. Laplacian
/// defects below tolerance are projected away exactly; larger ones error.
pub fn analyze(q: &Form<f64>, seed: u64, tol: f64) -> Result<CubicReport> {
    if q.n() != 3 || q.degree() != 3 {
        return Err(Error::NotCubicR3 { n: q.n(), degree: q.degree() });
    }
    let scale = q.coeff_scale().max(1.0);
    let q_rat = q.to_rational();
    let lap = q_rat.laplacian();
    if lap.coeff_scale() > 1e-9 * scale {
        return Err(Error::NotHarmonic);
    }
    let q_h = harmonic_projection(&q_rat);
    analyze_inner(&q_h.to_f64(), seed, tol)
}

fn analyze_inner(q: &Form<f64>, seed: u64, tol: f64) -> Result<CubicReport> {
    let mut warnings: Vec<String> = Vec::new();
    let gm = q.gradient_map()?;
    let form = canonicalize(q, seed)?;
    let selfcheck = canonical_selfcheck(&form, &gm)?;
    if selfcheck > 1e-7 * q.coeff_scale().max(1.0) {
        warnings.push(format!("canonical map self-check gap {:.3e}", selfcheck));
    }
    let mut classification = classify(&form, tol.max(ZERO_TOL));
    warnings.extend(classification.near_degenerate.iter().cloned());

    let mut rho = None;
    let mut rho_roots = None;
    let mut quadric = None;
    let eigenlines: Vec<EigenLine>;
    let real_line_count: LineCount;

    match classification.class {
        CubicClass::Generic => {
            let r = rho_polynomial(&form)?;
            let width = BigRational::new(1.into(), (1i64 << 30).into());
            let report = upoly::real_roots(&r, None, &width)?;
            if report.degenerate {
                classification.class = CubicClass::Degenerate;
                warnings.push(
                    "gcd(rho, rho') nonconstant: transition in the number of real zeros".into(),
                );
            }
            eigenlines = reconstruct_eigenlines(&form, &report, &gm, &r)?;
            real_line_count = LineCount::Finite(1 + report.count);
            rho = Some(r);
            rho_roots = Some(report);
        }
        _ => {
            let sol = solve_special_case(&form, &classification.class, &gm)?;
            real_line_count = match sol.real_count {
                Some(_) => LineCount::Finite(sol.lines.len()),
                None => LineCount::Infinite,
            };
            quadric = sol.quadric;
            eigenlines = sol.lines;
        }
    }

    // critical profile over both antipodal points of every line
    let mut critical_profile = Vec::new();
    let mut per_line_indices: Vec<SphereIndex> = Vec::new();
    let mut degenerate_point = false;
    if real_line_count != LineCount::Infinite {
        for line in &eigenlines {
            let c = line.real_rep().ok_or(Error::ZeroVector)?;
            let si = eigen::sphere_field_index(&gm, &c, tol)?;
            let anti: Vec<f64> = c.iter().map(|v| -v).collect();
            let si_anti = eigen::sphere_field_index(&gm, &anti, tol)?;
            degenerate_point |= si.index.is_none() || si_anti.index.is_none();
            critical_profile.push(CriticalPoint {
                point: si.point.clone(),
                stationary_type: si.stationary_type,
                index: si.index,
            });
            critical_profile.push(CriticalPoint {
                point: si_anti.point.clone(),
                stationary_type: si_anti.stationary_type,
                index: si_anti.index,
            });
            per_line_indices.push(si);
        }
    }
    let count_type = |t: StationaryType| {
        critical_profile.iter().filter(|p| p.stationary_type == t).count()
    };
    let maxima_count = count_type(StationaryType::Maximum);
    let minima_count = count_type(StationaryType::Minimum);
    let saddle_count = count_type(StationaryType::Saddle);
    let ph_check = if real_line_count == LineCount::Infinite || degenerate_point {
        if degenerate_point {
            warnings.push("degenerate stationary point: index sum not defined".into());
        }
        None
    } else {
        Some(eigen::poincare_hopf_check(&per_line_indices, 3, 2)?)
    };

    Ok(CubicReport {
        canonical: form,
        classification,
        rho,
        rho_roots,
        real_line_count,
        eigenlines,
        quadric,
        critical_profile,
        maxima_count,
        minima_count,
        saddle_count,
        ph_check,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use approx::assert_relative_eq;

    fn xyz() -> Form<BigRational> {
        Form::monomial(3, vec![1, 1, 1], rat_int(1)).unwrap()
    }

    #[test]
    fn build_map_axial_example() {
        // (1, 1, 0, 0): Q(x) = (-2x1^2 + x2^2 + x3^2, 2x1x2, 2x1x3)
        let f =
            CubicCanonicalForm::from_params(rat_int(1), rat_int(1), rat_int(0), rat_int(0))
                .unwrap();
        let q = build_map(&f).unwrap();
        let v = q.evaluate(&[rat_int(1), rat_int(2), rat_int(3)]).unwrap();
        assert_eq!(v, vec![rat_int(-2 + 4 + 9), rat_int(4), rat_int(6)]);
        let d = q.gradient_diagnostics();
        assert!(d.is_gradient && d.is_traceless);
    }

    #[test]
    fn build_map_always_harmonic_gradient() {
        let f = CubicCanonicalForm::from_params(rat(7, 5), rat(9, 10), rat(-3, 4), rat(2, 7))
            .unwrap();
        let d = build_map(&f).unwrap().gradient_diagnostics();
        assert!(d.is_gradient && d.is_traceless);
    }

    #[test]
    fn from_params_rejects_bad_input() {
        assert!(CubicCanonicalForm::from_params(rat_int(0), rat_int(1), rat_int(0), rat_int(0))
            .is_err()); // ordering
        assert!(CubicCanonicalForm::from_params(rat_int(1), rat_int(-4), rat_int(1), rat_int(1))
            .is_err()); // minimum condition
        assert!(CubicCanonicalForm::from_params(rat_int(0), rat_int(0), rat_int(0), rat_int(0))
            .is_err()); // zero map
    }

    #[test]
    fn classify_cases() {
        let t = 1e-10;
        let mk = |a2: BigRational, a3, b2, b3| CubicCanonicalForm {
            alpha2: a2,
            alpha3: a3,
            beta2: b2,
            beta3: b3,
            basis: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            scale: BigRational::one(),
            exact: true,
        };
        let c = classify(&mk(rat_int(1), rat(1, 2), rat_int(0), rat_int(0)), t);
        assert_eq!(c.class, CubicClass::Axial);
        let c = classify(&mk(rat_int(1), rat_int(1), rat_int(0), rat_int(0)), t);
        assert_eq!(c.class, CubicClass::AxialQuadric);
        let c = classify(&mk(rat_int(1), rat_int(1), rat_int(0), rat_int(1)), t);
        assert_eq!(
            c.class,
            CubicClass::SemiAxial { kind: SemiAxialKind::EqualAlphas, swapped: false }
        );
        // swapped ThreeAlphaQuadric: our labels (3, -1, 2, 0) are the paper's
        // (-1, 3, 0, 2) with 3a2+a3 = 0 and 4a2^2 = b3^2
        let c = classify(&mk(rat_int(3), rat_int(-1), rat_int(2), rat_int(0)), t);
        assert_eq!(
            c.class,
            CubicClass::SemiAxial { kind: SemiAxialKind::ThreeAlphaQuadric, swapped: true }
        );
        let c = classify(&mk(rat_int(3), rat_int(-1), rat_int(1), rat_int(0)), t);
        assert_eq!(
            c.class,
            CubicClass::SemiAxial { kind: SemiAxialKind::ThreeAlphaDegenerate, swapped: true }
        );
        let c = classify(&mk(rat_int(1), rat_int(1), rat_int(1), rat_int(1)), t);
        assert_eq!(c.class, CubicClass::GenericEqualAlphas);
        let c = classify(&mk(rat(1, 2), rat_int(0), rat_int(1), rat_int(1)), t);
        assert_eq!(c.class, CubicClass::Generic);
    }

    #[test]
    fn rho_table_matches_elimination() {
        // gamma_6 = b2^2 (8 a2 - 3) = 1 and gamma_0 = b3^2 (8 a2 - 1) = 3
        // at (a2, b2, b3) = (1/2, 1, 1)
        let f = CubicCanonicalForm::from_params(rat(1, 2), rat_int(0), rat_int(1), rat_int(1))
            .unwrap();
        let table = rho_from_table(&f).unwrap();
        assert_eq!(table.coeff(6), rat_int(1));
        assert_eq!(table.coeff(0), rat_int(3));
        let derived = rho_by_elimination(&f).unwrap();
        assert_eq!(table, derived);
    }

    #[test]
    fn rho_elimination_more_rational_params() {
        // broader randomized sweep lives in the acceptance suite
        for (p, q, r, s) in [(1i64, 2i64, 1i64, 1i64), (7, 9, -2, 3), (5, 8, 1, -4)] {
            let a2 = rat(4 + p.abs(), 8) + rat(q.abs(), 16); // > 3/8
            let a3 = &a2 - rat(1, 2);
            let f = CubicCanonicalForm::from_params(a2, a3, rat(r, 2), rat(s, 3)).unwrap();
            assert_eq!(rho_from_table(&f).unwrap(), rho_by_elimination(&f).unwrap());
        }
    }

    #[test]
    fn canonicalize_xyz_gives_equal_alphas() {
        let q = xyz().to_f64();
        let form = canonicalize(&q, 0).unwrap();
        assert_eq!(form.alpha2, form.alpha3);
        assert!(rat_to_f64(&form.alpha2) > 0.0);
        // basis orthonormality
        let b = &form.basis;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| b[k][i] * b[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(dot, expect, epsilon = 1e-10);
            }
        }
        let gm = q.gradient_map().unwrap();
        assert!(canonical_selfcheck(&form, &gm).unwrap() < 1e-10);
    }

    #[test]
    fn canonicalize_rejects_non_harmonic() {
        // (x1^2+x2^2+x3^2)(x1+x2+x3) has Laplacian 10(x1+x2+x3)
        let r2 = Form::from_terms(
            3,
            2,
            vec![(vec![2, 0, 0], 1.0), (vec![0, 2, 0], 1.0), (vec![0, 0, 2], 1.0)],
        )
        .unwrap();
        let lin = Form::from_terms(
            3,
            1,
            vec![(vec![1, 0, 0], 1.0), (vec![0, 1, 0], 1.0), (vec![0, 0, 1], 1.0)],
        )
        .unwrap();
        let q = r2.mul(&lin);
        assert!(matches!(canonicalize(&q, 0), Err(Error::NotHarmonic)));
    }

    #[test]
    fn canonicalize_roundtrip_from_params() {
        // build a map from chosen parameters, take its potential, and check
        // the recovery is equivalent up to the allowed basis freedom
        let f0 = CubicCanonicalForm::from_params(rat_int(1), rat(1, 2), rat_int(1), rat_int(1))
            .unwrap();
        let q = build_map(&f0).unwrap().potential().unwrap().to_f64();
        let form = canonicalize(&q, 0).unwrap();
        // the scaling convention holds after canonicalization
        let d = (&form.alpha2 - &form.alpha3) * rat_int(2);
        assert_eq!(d, BigRational::one());
        // and the canonical map reproduces the conjugated original
        let gm = q.gradient_map().unwrap();
        assert!(canonical_selfcheck(&form, &gm).unwrap() < 1e-8);
    }

    #[test]
    fn analyze_xyz_benchmark() {
        let report = analyze_rational(&xyz(), 0, 1e-9).unwrap();
        assert_eq!(report.real_line_count, LineCount::Finite(7));
        assert_eq!(report.eigenlines.len(), 7);
        assert_eq!(report.maxima_count, 4);
        assert_eq!(report.minima_count, 4);
        assert_eq!(report.saddle_count, 6);
        let ph = report.ph_check.unwrap();
        assert_eq!(ph.index_sum_over_points, 2);
        assert!(ph.pass);
    }

    #[test]
    fn analyze_axial_five_lines() {
        let f = CubicCanonicalForm::from_params(rat_int(1), rat(1, 2), rat_int(0), rat_int(0))
            .unwrap();
        let q = build_map(&f).unwrap().potential().unwrap().to_f64();
        let report = analyze(&q, 0, 1e-9).unwrap();
        assert_eq!(report.real_line_count, LineCount::Finite(5));
    }

    #[test]
    fn special_case_axial_counts() {
        let f = CubicCanonicalForm::from_params(rat_int(1), rat(1, 2), rat_int(0), rat_int(0))
            .unwrap();
        let gm = build_map(&f).unwrap().to_f64();
        let sol = solve_special_case(&f, &CubicClass::Axial, &gm).unwrap();
        assert_eq!(sol.real_count, Some(5));
        assert!(sol.quadric.is_none());
    }

    #[test]
    fn special_case_axial_quadric() {
        let f =
            CubicCanonicalForm::from_params(rat_int(1), rat_int(1), rat_int(0), rat_int(0))
                .unwrap();
        let gm = build_map(&f).unwrap().to_f64();
        let sol = solve_special_case(&f, &CubicClass::AxialQuadric, &gm).unwrap();
        let quad = sol.quadric.unwrap();
        assert_eq!(quad.coeff(&MultiIndex(vec![2, 0, 0])), rat_int(-4));
        assert_eq!(quad.coeff(&MultiIndex(vec![0, 2, 0])), rat_int(1));
        assert_eq!(quad.coeff(&MultiIndex(vec![0, 0, 2])), rat_int(1));
        // points of the quadric really are eigenline representatives
        let t = 0.7f64;
        let x2 = 2.0 * t.cos();
        let x3 = 2.0 * t.sin();
        let x1 = ((x2 * x2 + x3 * x3) / 4.0).sqrt();
        let pt = [x1, x2, x3];
        let qv = gm.evaluate(&pt).unwrap();
        let lam: f64 = qv.iter().zip(&pt).map(|(a, b)| a * b).sum::<f64>()
            / pt.iter().map(|v| v * v).sum::<f64>();
        let res: f64 =
            qv.iter().zip(&pt).map(|(a, b)| (a - lam * b) * (a - lam * b)).sum::<f64>().sqrt();
        assert!(res < 1e-12, "quadric point residual {}", res);
    }

    #[test]
    fn special_case_semiaxial_equal_alphas_seven() {
        let f =
            CubicCanonicalForm::from_params(rat_int(1), rat_int(1), rat_int(0), rat_int(1))
                .unwrap();
        let gm = build_map(&f).unwrap().to_f64();
        let class = classify(&f, 1e-10).class;
        let sol = solve_special_case(&f, &class, &gm).unwrap();
        assert_eq!(sol.real_count, Some(7));
    }

    #[test]
    fn special_case_three_alpha_degenerate_five() {
        let f =
            CubicCanonicalForm::from_params(rat_int(3), rat_int(-1), rat_int(1), rat_int(0))
                .unwrap();
        let gm = build_map(&f).unwrap().to_f64();
        let class = classify(&f, 1e-10).class;
        assert_eq!(
            class,
            CubicClass::SemiAxial { kind: SemiAxialKind::ThreeAlphaDegenerate, swapped: true }
        );
        let sol = solve_special_case(&f, &class, &gm).unwrap();
        assert_eq!(sol.real_count, Some(5));
    }

    #[test]
    fn special_case_three_alpha_quadric() {
        let f =
            CubicCanonicalForm::from_params(rat_int(3), rat_int(-1), rat_int(2), rat_int(0))
                .unwrap();
        let gm = build_map(&f).unwrap().to_f64();
        let class = classify(&f, 1e-10).class;
        let sol = solve_special_case(&f, &class, &gm).unwrap();
        let quad = sol.quadric.unwrap();
        let qf = quad.to_f64();
        // every quadric point is an eigenline representative of the map
        for t in [0.3f64, 1.1, -0.8] {
            let c_lin: f64 = qf.coeff(&MultiIndex(vec![1, 1, 0]));
            let rest = qf.eval(&[0.0, t, 1.0]).unwrap();
            if c_lin.abs() < 1e-12 {
                continue;
            }
            let x1 = -rest / (c_lin * t);
            let pt = [x1, t, 1.0];
            let qv = gm.evaluate(&pt).unwrap();
            let lam: f64 = qv.iter().zip(&pt).map(|(a, b)| a * b).sum::<f64>()
                / pt.iter().map(|v| v * v).sum::<f64>();
            let res: f64 = qv
                .iter()
                .zip(&pt)
                .map(|(a, b)| (a - lam * b) * (a - lam * b))
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-10, "residual {} at t={}", res, t);
        }
    }

    #[test]
    fn special_case_semiaxial_general_at_least_two_quartic_roots() {
        let f = CubicCanonicalForm::from_params(rat_int(1), rat(1, 2), rat_int(0), rat_int(1))
            .unwrap();
        let gm = build_map(&f).unwrap().to_f64();
        let class = classify(&f, 1e-10).class;
        assert_eq!(class, CubicClass::SemiAxial { kind: SemiAxialKind::General, swapped: false });
        let sol = solve_special_case(&f, &class, &gm).unwrap();
        // 1 + in-plane + off-plane; at least two off-plane guaranteed
        assert!(sol.real_count.unwrap() >= 3);
        assert_eq!(sol.real_count, Some(7)); // this instance: 2 in-plane, 4 quartic roots
    }

    #[test]
    fn generic_pipeline_full_count() {
        let f = CubicCanonicalForm::from_params(rat(1, 2), rat_int(0), rat_int(1), rat_int(1))
            .unwrap();
        let q = build_map(&f).unwrap().potential().unwrap().to_f64();
        let report = analyze(&q, 0, 1e-9).unwrap();
        // verified numerically: rho has six real roots here
        assert_eq!(report.real_line_count, LineCount::Finite(7));
        for l in &report.eigenlines {
            assert!(l.residual < 1e-9);
        }
        let ph = report.ph_check.unwrap();
        assert!(ph.pass);
    }

    #[test]
    fn mu_cubic_always_three_roots() {
        for (p, q) in [(1i64, 1i64), (3, 2), (-5, 4), (0, 1), (17, 3)] {
            let gamma = rat(p, q);
            // mu scaled by b2: -t^3 + 3 gamma t^2 + 3 t - gamma
            let mu =
                UnivarPoly::new(vec![-&gamma, rat_int(3), rat_int(3) * &gamma, rat_int(-1)]);
            let width = BigRational::new(1.into(), (1i64 << 20).into());
            let rep = upoly::real_roots(&mu, None, &width).unwrap();
            assert_eq!(rep.count, 3, "gamma = {}", gamma);
        }
    }
}
