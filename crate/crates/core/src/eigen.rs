//! Eigenline enumeration, degree theory and sphere-field indices.
//!
//! The solver works projectively: eigenlines of a degree-`m` map `Q` are the
//! zeros of `F(x0, x) = Q(x) - x0^{m-1} x` in `P^n`, found by seeded
//! multistart Newton on a random affine chart. Completeness is certified by
//! matching the Bezout count `(m^n - 1)/(m - 1)`, not by the search itself:
//! once that many distinct simple lines are found, the enumeration is
//! provably complete. Everything is deterministic for a fixed seed, and
//! multistart batches merge by canonical sort so results are independent of
//! completion order.

use crate::error::{Error, Result};
use crate::scalar::f64_to_rat;
use crate::tensor::{Form, HomogeneousMap, PolyMap};
use crate::upoly::{self, UnivarPoly};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of eigenlines of a degree-`m` map on `K^n` when finite, counted
/// with multiplicity over the complexes: `(m^n - 1)/(m - 1) = sum m^k`.
pub fn bezout_count(n: usize, m: u32) -> Result<u64> {
    if m < 2 {
        return Err(Error::DegreeTooSmall { min: 2, got: m });
    }
    if n < 1 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let mut acc: u64 = 0;
    let mut pw: u64 = 1;
    for _ in 0..n {
        acc = acc.checked_add(pw).ok_or_else(|| Error::InvalidParameter("count overflow".into()))?;
        pw = pw.saturating_mul(m as u64);
    }
    Ok(acc)
}

/// Eigenvalue class after scaling normalization: `{0, +1, -1}`.
/// Only real maps of odd degree can carry class `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LambdaClass {
    Zero,
    Plus,
    Minus,
}

impl LambdaClass {
    pub fn as_i32(self) -> i32 {
        match self {
            LambdaClass::Zero => 0,
            LambdaClass::Plus => 1,
            LambdaClass::Minus => -1,
        }
    }
}

/// A one dimensional invariant subspace with a canonical representative.
#[derive(Debug, Clone)]
pub struct EigenLine {
    /// Unit representative; phase/sign canonicalized.
    pub rep: Vec<Complex64>,
    /// Eigenvalue of the unit representative: `Q(rep) = lambda * rep`.
    pub lambda: Complex64,
    pub lambda_class: LambdaClass,
    /// Multiplicity-one flag (invertibility of the dehomogenized Jacobian).
    pub simple: bool,
    /// `|Q(rep) - lambda * rep|` for the stored representative.
    pub residual: f64,
    /// Whether the line admits a real representative.
    pub real: bool,
}

impl EigenLine {
    /// The representative as a real vector, when the line is real.
    pub fn real_rep(&self) -> Option<Vec<f64>> {
        if !self.real {
            return None;
        }
        Some(self.rep.iter().map(|z| z.re).collect())
    }
}

const NIL_TOL: f64 = 1e-9;
const DEDUP_TOL: f64 = 1e-8;
const DEDUP_TOL_MULTIPLE: f64 = 1e-5;
const FIRST_COORD_TOL: f64 = 1e-9;

/// Angular separation of two unit projective representatives (the sine of the
/// principal angle, accurate near zero).
pub fn line_distance(u: &[Complex64], v: &[Complex64]) -> f64 {
    let inner: Complex64 = v.iter().zip(u).map(|(a, b)| a.conj() * b).sum();
    let mut s = 0.0;
    for (ui, vi) in u.iter().zip(v) {
        s += (ui - vi * inner).norm_sqr();
    }
    s.sqrt()
}

/// Rescale an eigenpair so the eigenvalue lands in its canonical class and
/// the unit representative is phase/sign canonical. `real_field` marks maps
/// with real structure coefficients; `scale` is the coefficient norm used by
/// the nilpotency threshold.
pub fn normalize_eigenvalue(
    v: &[Complex64],
    lambda: Complex64,
    m: u32,
    real_field: bool,
    scale: f64,
) -> Result<EigenLine> {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let u: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
    // eigenvalue transported to the unit representative:
    // Q(v/s) = s^{1-m} lambda (v/s)
    let lam = lambda * norm.powi(1 - m as i32);

    let nilpotent = lam.norm() < NIL_TOL * scale.max(1.0);

    let is_real_line = {
        let probe = phase_canonical(&u);
        probe.iter().map(|z| z.im.abs()).fold(0.0, f64::max) < 1e-8
    };
    let real_line = real_field && is_real_line;

    let (rep, lam, class) = if nilpotent {
        let mut rep = phase_canonical(&u);
        if real_line {
            realify(&mut rep);
        }
        (rep, Complex64::zero(), LambdaClass::Zero)
    } else if real_line {
        let mut rep = phase_canonical(&u);
        realify(&mut rep);
        // transport the eigenvalue through the canonicalization: rep = w u
        // with |w| = 1, so Q(rep) = w^{m-1} lambda rep
        let w: Complex64 = u.iter().zip(&rep).map(|(a, b)| a.conj() * b).sum();
        let w = w / w.norm();
        let mut lam_r = (w.powu(m - 1) * lam).re;
        let class = if m.is_multiple_of(2) {
            if lam_r < 0.0 {
                for z in rep.iter_mut() {
                    *z = -*z;
                }
                lam_r = -lam_r;
            }
            LambdaClass::Plus
        } else if lam_r > 0.0 {
            LambdaClass::Plus
        } else {
            LambdaClass::Minus
        };
        (rep, Complex64::new(lam_r, 0.0), class)
    } else {
        // complex normalization: rotate the representative so lambda > 0,
        // then pick the canonical one of the m-1 admissible phases
        let k = (m - 1) as f64;
        let theta0 = -lam.arg() / k;
        let mut best: Option<Vec<Complex64>> = None;
        for j in 0..(m - 1) {
            let theta = theta0 + 2.0 * std::f64::consts::PI * j as f64 / k;
            let cand: Vec<Complex64> =
                u.iter().map(|z| z * Complex64::from_polar(1.0, theta)).collect();
            if best.as_ref().is_none_or(|b| lex_less(&cand, b)) {
                best = Some(cand);
            }
        }
        (best.unwrap(), Complex64::new(lam.norm(), 0.0), LambdaClass::Plus)
    };

    Ok(EigenLine {
        rep,
        lambda: lam,
        lambda_class: class,
        simple: false,
        residual: 0.0,
        real: real_line,
    })
}

fn lex_less(a: &[Complex64], b: &[Complex64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        for (p, q) in [(x.re, y.re), (x.im, y.im)] {
            if (p - q).abs() > 1e-12 {
                return p < q;
            }
        }
    }
    false
}

/// Divide by the phase of the first significant coordinate.
fn phase_canonical(u: &[Complex64]) -> Vec<Complex64> {
    let pivot = u
        .iter()
        .find(|z| z.norm() > FIRST_COORD_TOL)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot / pivot.norm();
    u.iter().map(|z| z / phase).collect()
}

fn realify(rep: &mut [Complex64]) {
    let mut nrm = 0.0;
    for z in rep.iter_mut() {
        *z = Complex64::new(z.re, 0.0);
        nrm += z.re * z.re;
    }
    let nrm = nrm.sqrt();
    for z in rep.iter_mut() {
        *z /= nrm;
    }
}

/// Options for the projective multistart solver.
#[derive(Debug, Clone)]
pub struct SolveOpts {
    pub seed: u64,
    /// Restart budget; default `20 * bezout_count(n, m)`.
    pub restarts: Option<usize>,
    /// Residual acceptance tolerance, relative to `max(1, coeff scale)`.
    pub tol: f64,
    pub max_newton_iters: usize,
}

impl Default for SolveOpts {
    fn default() -> Self {
        SolveOpts { seed: 0, restarts: None, tol: 1e-10, max_newton_iters: 80 }
    }
}

impl SolveOpts {
    pub fn seeded(seed: u64) -> Self {
        SolveOpts { seed, ..Default::default() }
    }
}

/// Outcome of the enumeration relative to the Bezout count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    /// As many distinct lines as the Bezout count: provably all of them.
    Complete,
    /// Budget exhausted below the count; the map may be degenerate.
    Shortfall,
    /// New distinct lines kept appearing well past the count; the eigenline
    /// set is likely infinite.
    PossiblyInfinite,
}

/// Full enumeration report.
#[derive(Debug, Clone)]
pub struct EigenReport {
    pub lines: Vec<EigenLine>,
    pub bezout: u64,
    pub completeness: Completeness,
    pub restarts_used: usize,
}

impl EigenReport {
    pub fn real_lines(&self) -> Vec<&EigenLine> {
        self.lines.iter().filter(|l| l.real).collect()
    }

    /// Lines, or `NonConvergence` when the enumeration fell short of the
    /// Bezout count.
    pub fn into_result(self) -> Result<Vec<EigenLine>> {
        match self.completeness {
            Completeness::Shortfall => Err(Error::NonConvergence {
                found: self.lines.len(),
                expected: self.bezout as usize,
                restarts: self.restarts_used,
                possibly_degenerate: true,
            }),
            _ => Ok(self.lines),
        }
    }
}

/// Enumerate the eigenlines of a real map. Solves over the complexes and
/// marks lines carrying a real representative; when the complex enumeration
/// is certified complete the real sublist is provably exhaustive, otherwise a
/// seeded real-start pass supplements it.
pub fn enumerate_eigenlines(q: &HomogeneousMap<f64>, opts: &SolveOpts) -> Result<EigenReport> {
    let mut report = enumerate_inner(&q.to_c64(), true, opts)?;
    if report.completeness != Completeness::Complete {
        supplement_real_lines(q, opts, &mut report);
    }
    Ok(report)
}

/// Enumerate the eigenlines of a complex map.
pub fn enumerate_eigenlines_complex(
    q: &HomogeneousMap<Complex64>,
    opts: &SolveOpts,
) -> Result<EigenReport> {
    enumerate_inner(q, false, opts)
}

/// Spec-level entry point: errors with `NonConvergence` on a shortfall.
pub fn find_eigenlines(q: &HomogeneousMap<f64>, opts: &SolveOpts) -> Result<Vec<EigenLine>> {
    enumerate_eigenlines(q, opts)?.into_result()
}

struct MapEval {
    comps: Vec<Form<Complex64>>,
    jac: Vec<Vec<Form<Complex64>>>,
    n: usize,
    m: u32,
    scale: f64,
}

impl MapEval {
    fn new(q: &HomogeneousMap<Complex64>) -> Self {
        MapEval {
            comps: q.components().to_vec(),
            jac: q.jacobian_forms(),
            n: q.n(),
            m: q.degree(),
            scale: q.coeff_scale(),
        }
    }

    fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.comps.iter().map(|f| f.eval(x).unwrap()).collect()
    }

    fn jac_at(&self, x: &[Complex64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.jac[i][j].eval(x).unwrap())
    }
}

fn enumerate_inner(
    q: &HomogeneousMap<Complex64>,
    real_field: bool,
    opts: &SolveOpts,
) -> Result<EigenReport> {
    let n = q.n();
    let m = q.degree();
    let bez = bezout_count(n, m)?;
    let me = MapEval::new(q);
    let scale = me.scale.max(1.0);
    let accept_tol = opts.tol * scale;
    let budget = opts.restarts.unwrap_or(20 * bez as usize).max(8);
    let chart_period = (budget / 4).max(1);

    let mut lines: Vec<EigenLine> = Vec::new();
    let mut used = 0usize;
    let mut completeness = Completeness::Shortfall;

    for r in 0..budget {
        used = r + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(
            opts.seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let mut chart_rng = ChaCha8Rng::seed_from_u64(
            opts.seed.wrapping_add(0xABCD_EF01).wrapping_add((r / chart_period) as u64),
        );
        let a: Vec<Complex64> = (0..n).map(|_| random_c64(&mut chart_rng)).collect();
        let x0: Vec<Complex64> = (0..n).map(|_| random_c64(&mut rng)).collect();

        if let Some(x) = newton_chart(&me, &a, &x0, opts.max_newton_iters, scale) {
            let xn: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if xn < 1e-9 {
                continue;
            }
            let u: Vec<Complex64> = x.iter().map(|z| z / xn).collect();
            let qu = me.eval(&u);
            let lam: Complex64 = qu.iter().zip(&u).map(|(a, b)| a * b.conj()).sum();
            let residual: f64 =
                qu.iter().zip(&u).map(|(a, b)| (a - lam * b).norm_sqr()).sum::<f64>().sqrt();
            if residual > accept_tol {
                continue;
            }
            let mut line = normalize_eigenvalue(&u, lam, m, real_field, me.scale)?;
            line.residual = line_residual(&me, &line);
            line.simple = is_simple(&me, &line);
            insert_line(&mut lines, line);
        }

        let distinct = lines.len() as u64;
        if distinct == bez && lines.iter().all(|l| l.simple) {
            completeness = Completeness::Complete;
            break;
        }
        if distinct > 3 * bez {
            completeness = Completeness::PossiblyInfinite;
            break;
        }
    }

    if completeness == Completeness::Shortfall && lines.len() as u64 == bez {
        // all lines found but some flagged non-simple: the count still
        // certifies completeness
        completeness = Completeness::Complete;
    }

    sort_lines(&mut lines);
    Ok(EigenReport { lines, bezout: bez, completeness, restarts_used: used })
}

fn random_c64(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Newton on the projectivized eigen system in the affine chart
/// `<a, x> = 1`, with the eigenvalue as an explicit unknown:
/// `[Q(x) - lambda x ; <a, x> - 1] = 0` over the complexes. The chart
/// excludes the non-eigenvector zero `(1:0:...:0)` of the homogenized
/// system, and every eigenline meets it in exactly one point.
fn newton_chart(
    me: &MapEval,
    a: &[Complex64],
    x0: &[Complex64],
    max_iters: usize,
    scale: f64,
) -> Option<Vec<Complex64>> {
    let n = me.n;
    let dot = |u: &[Complex64], v: &[Complex64]| -> Complex64 {
        u.iter().zip(v).map(|(p, q)| p * q).sum()
    };
    let mut x: Vec<Complex64> = x0.to_vec();
    let c0 = dot(a, &x);
    if c0.norm() < 1e-12 {
        return None;
    }
    for z in x.iter_mut() {
        *z /= c0;
    }
    let mut lam = {
        let qx = me.eval(&x);
        let num: Complex64 = qx.iter().zip(&x).map(|(q, xi)| q * xi.conj()).sum();
        let den: f64 = x.iter().map(|xi| xi.norm_sqr()).sum();
        num / den
    };

    for _ in 0..max_iters {
        let qx = me.eval(&x);
        let mut f = DVector::from_fn(n + 1, |i, _| {
            if i < n {
                qx[i] - lam * x[i]
            } else {
                dot(a, &x) - Complex64::new(1.0, 0.0)
            }
        });
        if f.norm() < 1e-13 * scale {
            return Some(x);
        }
        let dq = me.jac_at(&x);
        let mut jac = DMatrix::<Complex64>::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                jac[(i, j)] = dq[(i, j)] - if i == j { lam } else { Complex64::zero() };
            }
            jac[(i, n)] = -x[i];
        }
        for j in 0..n {
            jac[(n, j)] = a[j];
        }
        f.neg_mut();
        let step = jac.lu().solve(&f)?;
        let mut sn = 0.0;
        for (xi, si) in x.iter_mut().zip(step.iter().take(n)) {
            *xi += si;
            sn += si.norm_sqr();
        }
        lam += step[n];
        if sn.sqrt() < 1e-15 {
            break;
        }
    }
    let qx = me.eval(&x);
    let fr: f64 = qx.iter().zip(&x).map(|(q, xi)| (q - lam * xi).norm_sqr()).sum::<f64>().sqrt();
    if fr < 1e-11 * scale {
        Some(x)
    } else {
        None
    }
}

fn line_residual(me: &MapEval, line: &EigenLine) -> f64 {
    let qx = me.eval(&line.rep);
    qx.iter()
        .zip(&line.rep)
        .map(|(a, b)| (a - line.lambda * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Multiplicity-one test per the Jacobian criterion. For a nonzero class the
/// dehomogenized Jacobian is `DQ(c) - lambda I`; a nilpotent line of a
/// quadratic map is tested through the bordered projective Jacobian, and a
/// nilpotent of degree >= 3 always has multiplicity at least `m - 1`.
fn is_simple(me: &MapEval, line: &EigenLine) -> bool {
    let n = me.n;
    let scale = me.scale.max(1.0);
    let dq = me.jac_at(&line.rep);
    if line.lambda_class != LambdaClass::Zero {
        let a = &dq - DMatrix::<Complex64>::identity(n, n) * line.lambda;
        let sv = a.svd(false, false).singular_values;
        let smax = sv.iter().fold(0.0f64, |mx, &s| mx.max(s)).max(scale);
        sv.iter().fold(f64::INFINITY, |mn, &s| mn.min(s)) > 1e-8 * smax
    } else if me.m == 2 {
        let mut b = DMatrix::<Complex64>::zeros(n, n + 1);
        b.view_mut((0, 0), (n, n)).copy_from(&dq);
        for i in 0..n {
            b[(i, n)] = -line.rep[i];
        }
        let sv = b.svd(false, false).singular_values;
        let smax = sv.iter().fold(0.0f64, |mx, &s| mx.max(s)).max(scale);
        sv.iter().fold(f64::INFINITY, |mn, &s| mn.min(s)) > 1e-8 * smax
    } else {
        false
    }
}

fn insert_line(lines: &mut Vec<EigenLine>, line: EigenLine) {
    for known in lines.iter_mut() {
        let tol = if line.simple && known.simple { DEDUP_TOL } else { DEDUP_TOL_MULTIPLE };
        if line_distance(&line.rep, &known.rep) < tol {
            if line.residual < known.residual {
                *known = line;
            }
            return;
        }
    }
    lines.push(line);
}

fn sort_lines(lines: &mut [EigenLine]) {
    lines.sort_by(|a, b| {
        let ka = (!a.real as u8, class_rank(a.lambda_class));
        let kb = (!b.real as u8, class_rank(b.lambda_class));
        ka.cmp(&kb).then_with(|| {
            for (x, y) in a.rep.iter().zip(&b.rep) {
                match x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap()) {
                    std::cmp::Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            std::cmp::Ordering::Equal
        })
    });
}

fn class_rank(c: LambdaClass) -> u8 {
    match c {
        LambdaClass::Plus => 0,
        LambdaClass::Minus => 1,
        LambdaClass::Zero => 2,
    }
}

/// Seeded real-sphere Newton pass on `[Q(x) - lambda x ; (<x,x> - 1)/2]`,
/// merging any real lines the complex enumeration missed.
fn supplement_real_lines(q: &HomogeneousMap<f64>, opts: &SolveOpts, report: &mut EigenReport) {
    let n = q.n();
    let m = q.degree();
    let me = MapEval::new(&q.to_c64());
    let scale = me.scale.max(1.0);
    let jac_forms = q.jacobian_forms();
    let budget = 60 * n;
    for r in 0..budget {
        let mut rng =
            ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5EED ^ (r as u64).wrapping_mul(0x2545_F491));
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nrm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm < 1e-9 {
            continue;
        }
        for v in x.iter_mut() {
            *v /= nrm;
        }
        let mut lam: f64 = {
            let qx = q.evaluate(&x).unwrap();
            qx.iter().zip(&x).map(|(a, b)| a * b).sum()
        };
        let mut ok = false;
        for _ in 0..opts.max_newton_iters {
            let qx = q.evaluate(&x).unwrap();
            let mut f = DVector::<f64>::zeros(n + 1);
            for i in 0..n {
                f[i] = qx[i] - lam * x[i];
            }
            f[n] = (x.iter().map(|v| v * v).sum::<f64>() - 1.0) / 2.0;
            if f.norm() < 1e-13 * scale {
                ok = true;
                break;
            }
            let mut jac = DMatrix::<f64>::zeros(n + 1, n + 1);
            for i in 0..n {
                for j in 0..n {
                    jac[(i, j)] =
                        jac_forms[i][j].eval(&x).unwrap() - if i == j { lam } else { 0.0 };
                }
                jac[(i, n)] = -x[i];
                jac[(n, i)] = x[i];
            }
            f.neg_mut();
            let Some(step) = jac.lu().solve(&f) else { break };
            for (xi, si) in x.iter_mut().zip(step.iter().take(n)) {
                *xi += si;
            }
            lam += step[n];
        }
        if !ok {
            continue;
        }
        let u: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut line = match normalize_eigenvalue(&u, Complex64::new(lam, 0.0), m, true, me.scale)
        {
            Ok(l) => l,
            Err(_) => continue,
        };
        line.residual = line_residual(&me, &line);
        if line.residual > opts.tol * scale {
            continue;
        }
        line.simple = is_simple(&me, &line);
        insert_line(&mut report.lines, line);
    }
    sort_lines(&mut report.lines);
}

/// Recheck of a claimed eigenline against the map.
#[derive(Debug, Clone, Copy)]
pub struct VerifyRecord {
    pub residual: f64,
    pub simple: bool,
}

/// Recompute the residual and the multiplicity-one flag; errors with
/// `NotAnEigenline` when the residual exceeds tolerance.
pub fn verify_eigenline(q: &HomogeneousMap<f64>, line: &EigenLine) -> Result<VerifyRecord> {
    verify_eigenline_c(&q.to_c64(), line)
}

pub fn verify_eigenline_c(
    q: &HomogeneousMap<Complex64>,
    line: &EigenLine,
) -> Result<VerifyRecord> {
    let me = MapEval::new(q);
    let residual = line_residual(&me, line);
    let tol = 1e-8 * me.scale.max(1.0);
    if residual > tol {
        return Err(Error::NotAnEigenline { residual, tol });
    }
    Ok(VerifyRecord { residual, simple: is_simple(&me, line) })
}

// ---------------------------------------------------------------------------
// sphere field and Poincare-Hopf bookkeeping
// ---------------------------------------------------------------------------

/// Stationary type of an eigenline representative on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryType {
    Maximum,
    Minimum,
    Saddle,
    Degenerate,
}

/// Linearization data of the sphere field `Q*` at a stationary point.
#[derive(Debug, Clone)]
pub struct SphereIndex {
    pub point: Vec<f64>,
    pub alpha: f64,
    /// Eigenvalues of `DQ(c)` restricted to the complement of `c` (the
    /// `m alpha` copy in the `c` direction removed).
    pub betas: Vec<f64>,
    /// `beta_k - alpha`: the spectrum of the sphere-field linearization.
    pub shifted: Vec<f64>,
    /// Sign of the product of the shifted spectrum; absent when degenerate.
    pub index: Option<i32>,
    pub stationary_type: StationaryType,
}

/// Orthonormal basis of the complement of a unit vector, by the Householder
/// reflection carrying `e1` to `c`.
pub fn orthonormal_complement(c: &[f64]) -> DMatrix<f64> {
    let n = c.len();
    let mut v = DVector::from_column_slice(c);
    let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += sign;
    let vn2 = v.norm_squared();
    let mut h = DMatrix::<f64>::identity(n, n);
    if vn2 > 0.0 {
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] -= 2.0 * v[i] * v[j] / vn2;
            }
        }
    }
    // column 0 of h is -sign * c; the remaining columns span the complement
    h.columns(1, n - 1).into_owned()
}

/// Shifted spectrum, index and extremal type of the sphere field at a
/// verified eigenline representative of a gradient map.
pub fn sphere_field_index(q: &HomogeneousMap<f64>, c: &[f64], tol: f64) -> Result<SphereIndex> {
    if !q.gradient_diagnostics().is_gradient {
        return Err(Error::NotAGradient);
    }
    let n = q.n();
    if c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: c.len() });
    }
    let nrm: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nrm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let c: Vec<f64> = c.iter().map(|v| v / nrm).collect();
    let scale = q.coeff_scale().max(1.0);
    let qc = q.evaluate(&c)?;
    let alpha: f64 = qc.iter().zip(&c).map(|(a, b)| a * b).sum();
    let residual: f64 =
        qc.iter().zip(&c).map(|(a, b)| (a - alpha * b) * (a - alpha * b)).sum::<f64>().sqrt();
    let rtol = 1e-8 * scale;
    if residual > rtol {
        return Err(Error::NotAnEigenline { residual, tol: rtol });
    }

    let jac = q.jacobian_at(&c)?;
    let dq = DMatrix::from_fn(n, n, |i, j| jac[i][j]);
    let basis = orthonormal_complement(&c);
    let restricted = basis.transpose() * &dq * &basis;
    let sym = (&restricted + restricted.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut betas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    betas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let shifted: Vec<f64> = betas.iter().map(|b| b - alpha).collect();

    let dtol = tol.max(1e-12) * scale;
    let degenerate = shifted.iter().any(|s| s.abs() < dtol);
    let (index, stationary_type) = if degenerate {
        (None, StationaryType::Degenerate)
    } else {
        let neg = shifted.iter().filter(|s| **s < 0.0).count();
        let idx = if neg % 2 == 0 { 1 } else { -1 };
        let ty = if neg == 0 {
            StationaryType::Minimum
        } else if neg == shifted.len() {
            StationaryType::Maximum
        } else {
            StationaryType::Saddle
        };
        (Some(idx), ty)
    };
    Ok(SphereIndex { point: c, alpha, betas, shifted, index, stationary_type })
}

/// Result of the antipodal index sum against the Euler characteristic.
#[derive(Debug, Clone, Copy)]
pub struct PhReport {
    pub index_sum_over_points: i64,
    pub expected: i64,
    pub pass: bool,
}

/// Expand each real eigenline to its antipodal point pair (indices equal
/// unless both the degree and the dimension are even, in which case the pair
/// cancels) and compare the sum with the Euler characteristic of the sphere.
pub fn poincare_hopf_check(entries: &[SphereIndex], n: usize, m: u32) -> Result<PhReport> {
    let mut sum: i64 = 0;
    for e in entries {
        let idx = e.index.ok_or(Error::DegenerateStationaryPoint)? as i64;
        if !(m.is_multiple_of(2) && n.is_multiple_of(2)) {
            sum += 2 * idx;
        }
    }
    let expected = if n % 2 == 1 { 2 } else { 0 };
    Ok(PhReport { index_sum_over_points: sum, expected, pass: sum == expected })
}

// ---------------------------------------------------------------------------
// extrema on the sphere
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumMode {
    Min,
    Max,
}

/// A located extremum of a form on the unit sphere.
#[derive(Debug, Clone)]
pub struct Extremum {
    /// The extremal point itself (no sign canonicalization: for odd-degree
    /// forms the two antipodes carry opposite values).
    pub point: Vec<f64>,
    pub value: f64,
    /// The corresponding eigenline of the gradient map.
    pub line: EigenLine,
}

/// Seeded multistart projected gradient descent/ascent with a bordered
/// Lagrange-Newton polish. The best value over 64 starts wins; ties within
/// 1e-12 break by lexicographic order of the representatives.
pub fn extremum_on_sphere(q: &Form<f64>, mode: ExtremumMode, seed: u64) -> Result<Extremum> {
    let n = q.n();
    if n == 0 {
        return Err(Error::InvalidParameter("empty form".into()));
    }
    let grad = q.gradient();
    let scale = q.coeff_scale().max(1.0);
    let sgn = match mode {
        ExtremumMode::Min => 1.0,
        ExtremumMode::Max => -1.0,
    };
    let hess: Vec<Vec<Form<f64>>> = grad.iter().map(|g| g.gradient()).collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in 0..64u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ s.wrapping_mul(0x9E37_79B9));
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nrm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm < 1e-9 {
            continue;
        }
        for v in x.iter_mut() {
            *v /= nrm;
        }

        // projected gradient phase
        let mut fx = q.eval(&x).unwrap();
        let mut eta = 0.5 / scale;
        for _ in 0..400 {
            let g: Vec<f64> = grad.iter().map(|gi| gi.eval(&x).unwrap()).collect();
            let gx: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
            let tang: Vec<f64> = g.iter().zip(&x).map(|(a, b)| a - gx * b).collect();
            let tn: f64 = tang.iter().map(|v| v * v).sum::<f64>().sqrt();
            if tn < 1e-13 * scale {
                break;
            }
            let mut step = eta;
            let mut accepted = false;
            for _ in 0..40 {
                let cand: Vec<f64> =
                    x.iter().zip(&tang).map(|(xi, ti)| xi - sgn * step * ti).collect();
                let cn: f64 = cand.iter().map(|v| v * v).sum::<f64>().sqrt();
                let cand: Vec<f64> = cand.iter().map(|v| v / cn).collect();
                let fc = q.eval(&cand).unwrap();
                if sgn * (fc - fx) < -1e-18 * scale {
                    x = cand;
                    fx = fc;
                    eta = (step * 2.0).min(1.0 / scale);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }

        // bordered Lagrange-Newton polish on [grad q(x) - mu x ; (<x,x>-1)/2]
        let mut mu: f64 = grad.iter().zip(&x).map(|(g, xi)| g.eval(&x).unwrap() * xi).sum();
        for _ in 0..40 {
            let g: Vec<f64> = grad.iter().map(|gi| gi.eval(&x).unwrap()).collect();
            let mut f = DVector::<f64>::zeros(n + 1);
            for i in 0..n {
                f[i] = g[i] - mu * x[i];
            }
            f[n] = (x.iter().map(|v| v * v).sum::<f64>() - 1.0) / 2.0;
            if f.norm() < 1e-14 * scale {
                break;
            }
            let mut jac = DMatrix::<f64>::zeros(n + 1, n + 1);
            for i in 0..n {
                for j in 0..n {
                    jac[(i, j)] = hess[i][j].eval(&x).unwrap() - if i == j { mu } else { 0.0 };
                }
                jac[(i, n)] = -x[i];
                jac[(n, i)] = x[i];
            }
            f.neg_mut();
            let Some(step) = jac.lu().solve(&f) else { break };
            for (xi, si) in x.iter_mut().zip(step.iter().take(n)) {
                *xi += si;
            }
            mu += step[n];
            let nrm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in x.iter_mut() {
                *v /= nrm;
            }
        }

        let fx = q.eval(&x).unwrap();
        let better = match &best {
            None => true,
            Some((bv, bx)) => {
                if (fx - bv).abs() <= 1e-12 * scale {
                    lex_less_f64(&x, bx)
                } else {
                    sgn * (fx - bv) < 0.0
                }
            }
        };
        if better {
            best = Some((fx, x));
        }
    }

    let (value, point) = best.ok_or(Error::ZeroVector)?;
    let gm = q.gradient_map()?;
    let u: Vec<Complex64> = point.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let qp = gm.evaluate(&point)?;
    let lam: f64 = qp.iter().zip(&point).map(|(a, b)| a * b).sum();
    let mut line =
        normalize_eigenvalue(&u, Complex64::new(lam, 0.0), gm.degree(), true, gm.coeff_scale())?;
    let rec = verify_eigenline(&gm, &line)?;
    line.residual = rec.residual;
    line.simple = rec.simple;
    Ok(Extremum { point, value, line })
}

fn lex_less_f64(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-14 {
            return x < y;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Brouwer degree
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct DegreeOpts {
    pub seed: u64,
    pub restarts: Option<usize>,
    pub tol: f64,
}

impl Default for DegreeOpts {
    fn default() -> Self {
        DegreeOpts { seed: 0, restarts: None, tol: 1e-9 }
    }
}

impl DegreeOpts {
    pub fn seeded(seed: u64) -> Self {
        DegreeOpts { seed, ..Default::default() }
    }
}

/// Topological degree report.
#[derive(Debug, Clone)]
pub struct DegreeReport {
    pub degree: i64,
    /// Number of target points used.
    pub samples: usize,
    pub solutions_per_sample: Vec<usize>,
    /// Whether every sample matched the full complex solution count, which
    /// certifies that no real solution was missed.
    pub certified: bool,
}

/// Minimum of the leading-form norm over a seeded sphere sample; the growth
/// bound `|P_m(z)| >= rho |z|^m` holds with this `rho` when it is positive.
fn leading_form_floor(pm: &HomogeneousMap<f64>, seed: u64) -> f64 {
    let n = pm.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0F10_0F10);
    let mut rho = f64::INFINITY;
    for _ in 0..10_000 {
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nrm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm < 1e-12 {
            continue;
        }
        for v in x.iter_mut() {
            *v /= nrm;
        }
        let val: f64 = pm.evaluate(&x).unwrap().iter().map(|v| v * v).sum::<f64>().sqrt();
        rho = rho.min(val);
    }
    rho
}

/// Brouwer degree of `P` with respect to the target `y`: the sign sum of
/// `det DP` over the real preimage. The preimage is found by complexified
/// multistart Newton inside the growth-bound ball; finding all `m^n` complex
/// solutions certifies the real sublist. Dimension one runs exactly through
/// Sturm isolation instead.
pub fn brouwer_degree(p: &PolyMap<f64>, y: &[f64], opts: &DegreeOpts) -> Result<DegreeReport> {
    let n = p.n();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    let pm = p.leading();
    let m = p.degree();
    if m < 1 {
        return Err(Error::DegreeTooSmall { min: 1, got: m });
    }
    let scale = pm.coeff_scale().max(1.0);
    let rho = leading_form_floor(pm, opts.seed);
    if rho < 1e-9 * scale {
        return Err(Error::LeadingFormVanishes { min_norm: rho });
    }

    if n == 1 {
        return degree_univariate(p, y[0], opts).map(|(deg, sols)| DegreeReport {
            degree: deg,
            samples: 1,
            solutions_per_sample: vec![sols],
            certified: true,
        });
    }

    let (signsum, real_sols, certified) = degree_at_target(p, y, rho, opts)?;
    Ok(DegreeReport { degree: signsum, samples: 1, solutions_per_sample: vec![real_sols], certified })
}

/// Global degree `d(P) = d(P_m)`: the target degree over several seeded
/// generic targets, which must agree.
pub fn global_degree(p: &PolyMap<f64>, opts: &DegreeOpts) -> Result<DegreeReport> {
    let n = p.n();
    let pm = p.leading();
    let scale = pm.coeff_scale().max(1.0);
    let rho = leading_form_floor(pm, opts.seed);
    if rho < 1e-9 * scale {
        return Err(Error::LeadingFormVanishes { min_norm: rho });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x007A_9E11);
    let mut degrees: Vec<i64> = Vec::new();
    let mut sols = Vec::new();
    let mut attempts = 0;
    while degrees.len() < 3 && attempts < 9 {
        attempts += 1;
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0) * scale).collect();
        let r = if n == 1 {
            degree_univariate(p, y[0], opts)
        } else {
            match degree_at_target(p, &y, rho, opts) {
                Ok((d, s, true)) => Ok((d, s)),
                Ok((_, _, false)) => continue, // uncertified sample: redraw
                Err(e) => Err(e),
            }
        };
        match r {
            Ok((d, s)) => {
                degrees.push(d);
                sols.push(s);
            }
            Err(Error::CriticalTarget { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    if degrees.len() < 3 {
        return Err(Error::NonConvergence {
            found: degrees.len(),
            expected: 3,
            restarts: attempts,
            possibly_degenerate: false,
        });
    }
    if degrees.iter().any(|d| *d != degrees[0]) {
        return Err(Error::CriticalTarget { det: 0.0 });
    }
    Ok(DegreeReport { degree: degrees[0], samples: degrees.len(), solutions_per_sample: sols, certified: true })
}

/// Exact univariate route: isolate the real roots of `P(t) - y` with Sturm
/// sequences (`f64` coefficients are dyadic rationals, so this is exact) and
/// read the derivative sign at each.
fn degree_univariate(p: &PolyMap<f64>, y: f64, opts: &DegreeOpts) -> Result<(i64, usize)> {
    let mut coeffs: Vec<BigRational> = vec![BigRational::zero()];
    for (deg, part) in p.parts() {
        let c = part.component(0).eval(&[1.0]).unwrap();
        let d = *deg as usize;
        if coeffs.len() <= d {
            coeffs.resize(d + 1, BigRational::zero());
        }
        coeffs[d] += f64_to_rat(c);
    }
    coeffs[0] -= f64_to_rat(y);
    let poly = UnivarPoly::new(coeffs);
    let width = BigRational::new(1.into(), (1i64 << 40).into());
    let report = upoly::real_roots(&poly, None, &width)?;
    let dpoly = poly.derivative();
    let mut sum: i64 = 0;
    for root in &report.roots {
        let dval = dpoly.eval(&root.approx);
        let s = crate::scalar::rat_sign(&dval);
        if s == 0 || report.degenerate {
            return Err(Error::CriticalTarget { det: opts.tol });
        }
        sum += s as i64;
    }
    Ok((sum, report.count))
}

/// Sign sum at one target; returns `(degree, real solutions, certified)`.
fn degree_at_target(
    p: &PolyMap<f64>,
    y: &[f64],
    rho: f64,
    opts: &DegreeOpts,
) -> Result<(i64, usize, bool)> {
    let n = p.n();
    let m = p.degree();
    let expected: u64 = (m as u64).pow(n as u32);
    let pc = p.map_coeffs(|c| Complex64::new(*c, 0.0));
    let yc: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let yn: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut radius = (2.0 * yn.max(1.0) / rho).powf(1.0 / m as f64).max(1.0);

    for _expand in 0..4 {
        let sols = solve_targets_complex(&pc, &yc, radius, expected, opts)?;
        let boundary = sols
            .iter()
            .any(|z| z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt() > 0.9 * radius);
        if boundary {
            radius *= 2.0;
            continue;
        }
        let certified = sols.len() as u64 == expected;
        let scale = p.leading().coeff_scale().max(1.0);
        let mut sum = 0i64;
        let mut real_count = 0usize;
        for z in &sols {
            let zr: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let is_real = z.iter().map(|c| c.im.abs()).fold(0.0, f64::max) < 1e-8 * (1.0 + zr);
            if !is_real {
                continue;
            }
            real_count += 1;
            let x: Vec<f64> = z.iter().map(|c| c.re).collect();
            let jac = p.jacobian_at(&x)?;
            let dm = DMatrix::from_fn(n, n, |i, j| jac[i][j]);
            let det = dm.determinant();
            if det.abs() < opts.tol * scale.powi(n as i32) {
                return Err(Error::CriticalTarget { det });
            }
            sum += det.signum() as i64;
        }
        return Ok((sum, real_count, certified));
    }
    Err(Error::NonConvergence {
        found: 0,
        expected: expected as usize,
        restarts: 0,
        possibly_degenerate: false,
    })
}

/// Multistart complex Newton for `P(x) = y`; stops once `expected` distinct
/// solutions are found.
fn solve_targets_complex(
    p: &PolyMap<Complex64>,
    y: &[Complex64],
    radius: f64,
    expected: u64,
    opts: &DegreeOpts,
) -> Result<Vec<Vec<Complex64>>> {
    let n = p.n();
    let scale = p.leading().coeff_scale().max(1.0);
    let budget = opts.restarts.unwrap_or(80 * expected as usize).max(40);
    let mut sols: Vec<Vec<Complex64>> = Vec::new();
    for r in 0..budget {
        let mut rng =
            ChaCha8Rng::seed_from_u64(opts.seed ^ (r as u64).wrapping_mul(0x6C62_272E_07BB_0142));
        let mut x: Vec<Complex64> = (0..n).map(|_| random_c64(&mut rng) * (radius * 0.9)).collect();
        let mut converged = false;
        let ftol = 1e-12 * scale * radius.powi(p.degree() as i32).max(1.0);
        for _ in 0..80 {
            let px = p.evaluate(&x)?;
            let mut f = DVector::from_fn(n, |i, _| px[i] - y[i]);
            if f.norm() < ftol {
                converged = true;
                break;
            }
            let jac = p.jacobian_at(&x)?;
            let jm = DMatrix::from_fn(n, n, |i, j| jac[i][j]);
            f.neg_mut();
            let Some(step) = jm.lu().solve(&f) else { break };
            for (xi, si) in x.iter_mut().zip(step.iter()) {
                *xi += si;
            }
        }
        if !converged {
            continue;
        }
        let xr: f64 = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if xr > 2.0 * radius {
            continue;
        }
        let fresh = sols.iter().all(|s| {
            let d: f64 = s.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            d > 1e-7 * (1.0 + xr)
        });
        if fresh {
            sols.push(x);
            if sols.len() as u64 == expected {
                break;
            }
        }
    }
    Ok(sols)
}

/// Degree of the real representation of a complex polynomial map: every
/// complex solution of `S(w) = y` is a simple real solution of the doubled
/// system with positive Jacobian determinant, so the degree equals the
/// solution count `m^n`.
pub fn brouwer_degree_complex(
    s: &PolyMap<Complex64>,
    y: &[Complex64],
    opts: &DegreeOpts,
) -> Result<DegreeReport> {
    let n = s.n();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    let m = s.degree();
    let expected: u64 = (m as u64).pow(n as u32);
    let pm = s.leading();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x0F10_0F10);
    let mut rho = f64::INFINITY;
    for _ in 0..10_000 {
        let mut x: Vec<Complex64> = (0..n).map(|_| random_c64(&mut rng)).collect();
        let nrm: f64 = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if nrm < 1e-9 {
            continue;
        }
        for v in x.iter_mut() {
            *v /= nrm;
        }
        let val: f64 = pm.evaluate(&x)?.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        rho = rho.min(val);
    }
    let scale = pm.coeff_scale().max(1.0);
    if rho < 1e-9 * scale {
        return Err(Error::LeadingFormVanishes { min_norm: rho });
    }
    let yn: f64 = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let radius = (2.0 * yn.max(1.0) / rho).powf(1.0 / m as f64).max(1.0);
    let sols = solve_targets_complex(s, y, radius, expected, opts)?;
    let certified = sols.len() as u64 == expected;
    Ok(DegreeReport {
        degree: sols.len() as i64,
        samples: 1,
        solutions_per_sample: vec![sols.len()],
        certified,
    })
}

/// The real `2n x 2n` block matrix `[[A, -B], [B, A]]` representing the
/// complex linear map `A + iB`; its determinant is never negative.
pub fn real_rep(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.nrows() });
    }
    let n = a.nrows();
    let c = a.ncols();
    let mut out = DMatrix::<f64>::zeros(2 * n, 2 * c);
    out.view_mut((0, 0), (n, c)).copy_from(a);
    out.view_mut((n, c), (n, c)).copy_from(a);
    out.view_mut((0, c), (n, c)).copy_from(&(-b));
    out.view_mut((n, 0), (n, c)).copy_from(b);
    Ok(out)
}
