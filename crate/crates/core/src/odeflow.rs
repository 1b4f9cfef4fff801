//! Closed-form ray solutions of `x' = Q(x)` along eigenlines, unbounded
//! solution certificates, and the spectrum at stationary points at infinity.
//!
//! Along an eigenline `Q(c) = alpha c` the ansatz `x(t) = phi(t) c` separates
//! into `phi' = alpha phi^m`, solved by elementary functions; the solution
//! blows up in finite time exactly when `alpha phi(0)^{m-1} > 0`. Antipodal
//! pairs of equator equilibria of the compactified flow correspond to real
//! eigenlines of the leading form, with linearized spectrum
//! `{-alpha} u {beta_k - alpha}`.

use crate::eigen::{verify_eigenline, EigenLine, SolveOpts};
use crate::error::{Error, Result};
use crate::scalar::rat_to_f64;
use crate::tensor::{HomogeneousMap, PolyMap};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Closed-form scalar dynamics along one eigenline.
#[derive(Debug, Clone)]
pub struct RaySolution {
    /// Eigenline representative (unit).
    pub c: Vec<f64>,
    /// `Q(c) = alpha c` for the stored representative.
    pub alpha: f64,
    pub m: u32,
    /// Initial amplitude: the trajectory starts at `y0 * c`.
    pub y0: f64,
    /// Finite blow-up time `1 / (alpha (m-1) y0^{m-1})` when
    /// `alpha y0^{m-1} > 0`.
    pub blow_up_time: Option<f64>,
    /// Exact blow-up time when `alpha` and `y0` are rational.
    pub blow_up_exact: Option<BigRational>,
}

impl RaySolution {
    /// `phi(t) = y0 (1 - alpha (m-1) y0^{m-1} t)^{-1/(m-1)}`, the solution of
    /// `phi' = alpha phi^m` with `phi(0) = y0`; constant when `alpha = 0`.
    pub fn phi(&self, t: f64) -> f64 {
        if self.alpha == 0.0 {
            return self.y0;
        }
        let k = (self.m - 1) as f64;
        let base = 1.0 - self.alpha * k * self.y0.powi(self.m as i32 - 1) * t;
        self.y0 * base.powf(-1.0 / k)
    }

    /// `phi'(t) - alpha phi(t)^m`, for residual checks.
    pub fn ode_residual(&self, t: f64) -> f64 {
        let h = 1e-6 * (1.0 + t.abs());
        let d = (self.phi(t + h) - self.phi(t - h)) / (2.0 * h);
        d - self.alpha * self.phi(t).powi(self.m as i32)
    }

    /// The trajectory point `phi(t) c`.
    pub fn at(&self, t: f64) -> Vec<f64> {
        let p = self.phi(t);
        self.c.iter().map(|v| v * p).collect()
    }
}

/// Closed-form ray solution through `y0 * c` for a verified eigenline.
pub fn ray_solution(q: &HomogeneousMap<f64>, line: &EigenLine, y0: f64) -> Result<RaySolution> {
    if q.degree() < 2 {
        return Err(Error::DegreeTooSmall { min: 2, got: q.degree() });
    }
    verify_eigenline(q, line)?;
    let c = line.real_rep().ok_or(Error::ZeroVector)?;
    let alpha = line.lambda.re;
    ray_solution_from_parts(c, alpha, q.degree(), y0, None, None)
}

/// Ray solution from exact eigendata; the blow-up time is produced as an
/// exact rational.
pub fn ray_solution_exact(
    c: Vec<f64>,
    alpha: &BigRational,
    m: u32,
    y0: &BigRational,
) -> Result<RaySolution> {
    ray_solution_from_parts(c, rat_to_f64(alpha), m, rat_to_f64(y0), Some(alpha), Some(y0))
}

fn ray_solution_from_parts(
    c: Vec<f64>,
    alpha: f64,
    m: u32,
    y0: f64,
    alpha_exact: Option<&BigRational>,
    y0_exact: Option<&BigRational>,
) -> Result<RaySolution> {
    if m < 2 {
        return Err(Error::DegreeTooSmall { min: 2, got: m });
    }
    let k = m as i32 - 1;
    let blow_up_time = if alpha * y0.powi(k) > 0.0 {
        Some(1.0 / (alpha * k as f64 * y0.powi(k)))
    } else {
        None
    };
    let blow_up_exact = match (alpha_exact, y0_exact) {
        (Some(a), Some(y)) if !a.is_zero() => {
            let mut yk = BigRational::one();
            for _ in 0..k {
                yk *= y;
            }
            let prod = a * &yk;
            if prod.is_positive() {
                Some((prod * BigRational::from_integer(k.into())).recip())
            } else {
                None
            }
        }
        _ => None,
    };
    Ok(RaySolution { c, alpha, m, y0, blow_up_time, blow_up_exact })
}

/// Witness for an unbounded solution: a real eigenline of the leading form
/// with a representative of strictly positive eigenvalue.
#[derive(Debug, Clone)]
pub struct UnboundedCertificate {
    pub c: Vec<f64>,
    pub alpha: f64,
}

/// Outcome of the unbounded-solution search.
#[derive(Debug, Clone)]
pub struct UnboundedReport {
    pub certificate: Option<UnboundedCertificate>,
    /// For even degree: whether every real eigenline found was nilpotent
    /// (the other horn of the dichotomy).
    pub all_real_lines_nilpotent: bool,
    pub real_lines_found: usize,
}

/// Search the eigenlines of the leading form for a certificate `P_m(c) =
/// alpha c` with `alpha > 0`. Absence of a certificate is a valid outcome.
pub fn unbounded_certificate(p: &PolyMap<f64>, seed: u64) -> Result<UnboundedReport> {
    let pm = p.leading();
    if pm.degree() < 2 {
        return Err(Error::DegreeTooSmall { min: 2, got: pm.degree() });
    }
    let report = crate::eigen::enumerate_eigenlines(pm, &SolveOpts::seeded(seed))?;
    let scale = pm.coeff_scale().max(1.0);
    let mut all_nil = true;
    let mut cert: Option<UnboundedCertificate> = None;
    let mut real_count = 0;
    for line in report.real_lines() {
        real_count += 1;
        let lam = line.lambda.re;
        if lam.abs() > 1e-9 * scale {
            all_nil = false;
        }
        if cert.is_none() {
            if lam > 1e-9 * scale {
                cert = Some(UnboundedCertificate {
                    c: line.real_rep().unwrap(),
                    alpha: lam,
                });
            } else if lam < -1e-9 * scale && pm.degree().is_multiple_of(2) {
                // even degree: the antipodal representative has alpha > 0
                let c: Vec<f64> = line.real_rep().unwrap().iter().map(|v| -v).collect();
                cert = Some(UnboundedCertificate { c, alpha: -lam });
            }
        }
    }
    Ok(UnboundedReport {
        certificate: cert,
        all_real_lines_nilpotent: all_nil,
        real_lines_found: real_count,
    })
}

/// Linearization data at an equator equilibrium of the compactified flow.
#[derive(Debug, Clone)]
pub struct InfinityPoint {
    /// Direction of the eigenline (unit).
    pub direction: Vec<f64>,
    pub alpha: f64,
    /// `{-alpha} u {beta_k - alpha}`: the `-alpha` entry is transversal to
    /// the equator, the rest spans its tangent space.
    pub spectrum: Vec<Complex64>,
}

/// Spectrum of the linearized sphere flow at the stationary point at
/// infinity attached to a real eigenline of the leading form.
pub fn infinity_spectrum(p: &PolyMap<f64>, line: &EigenLine) -> Result<InfinityPoint> {
    let pm = p.leading();
    verify_eigenline(pm, line)?;
    let c = line.real_rep().ok_or(Error::ZeroVector)?;
    let alpha = line.lambda.re;
    let m = pm.degree() as f64;
    let n = pm.n();

    let jac = pm.jacobian_at(&c)?;
    let dm = DMatrix::from_fn(n, n, |i, j| jac[i][j]);
    let eigs = dm.complex_eigenvalues();
    // remove one copy of the eigenvalue m*alpha carried by the c direction
    let mut evs: Vec<Complex64> = eigs.iter().copied().collect();
    let target = Complex64::new(m * alpha, 0.0);
    let (drop_idx, _) = evs
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - target).norm().partial_cmp(&(*b - target).norm()).unwrap()
        })
        .ok_or(Error::ZeroVector)?;
    evs.remove(drop_idx);

    let mut spectrum = vec![Complex64::new(-alpha, 0.0)];
    spectrum.extend(evs.iter().map(|b| b - Complex64::new(alpha, 0.0)));
    spectrum.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    Ok(InfinityPoint { direction: c, alpha, spectrum })
}

/// Adaptive Runge-Kutta (Dormand-Prince 5(4)) integrator for `x' = P(x)`,
/// used to cross-check the closed-form rays against direct integration.
pub fn integrate_adaptive(
    p: &PolyMap<f64>,
    x0: &[f64],
    t_end: f64,
    rel_tol: f64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] =
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let n = p.n();
    let mut t = 0.0;
    let mut x = x0.to_vec();
    let mut h = (t_end / 100.0).abs().max(1e-8) * t_end.signum();
    let mut out = vec![(t, x.clone())];
    let mut steps = 0usize;
    while (t_end - t) * t_end.signum() > 1e-14 {
        steps += 1;
        if steps > 2_000_000 {
            return Err(Error::NonConvergence {
                found: out.len(),
                expected: 0,
                restarts: steps,
                possibly_degenerate: false,
            });
        }
        if (t + h - t_end) * t_end.signum() > 0.0 {
            h = t_end - t;
        }
        let mut k = vec![vec![0.0f64; n]; 7];
        k[0] = p.evaluate(&x)?;
        for s in 1..=5 {
            let mut xs = x.clone();
            for (j, kj) in k.iter().take(s).enumerate() {
                for i in 0..n {
                    xs[i] += h * A[s - 1][j] * kj[i];
                }
            }
            k[s] = p.evaluate(&xs)?;
        }
        let mut x5 = x.clone();
        for (j, kj) in k.iter().take(6).enumerate() {
            for i in 0..n {
                x5[i] += h * A[5][j] * kj[i];
            }
        }
        k[6] = p.evaluate(&x5)?;
        let mut err = 0.0f64;
        let mut xn = x.clone();
        for i in 0..n {
            let mut v5 = 0.0;
            let mut v4 = 0.0;
            for j in 0..7 {
                v5 += B5[j] * k[j][i];
                v4 += B4[j] * k[j][i];
            }
            xn[i] = x[i] + h * v5;
            let sc = rel_tol * (1.0 + x[i].abs().max(xn[i].abs()));
            err = err.max((h * (v5 - v4)).abs() / sc);
        }
        if err <= 1.0 {
            t += h;
            x = xn;
            out.push((t, x.clone()));
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{enumerate_eigenlines, LambdaClass};
    use crate::scalar::{rat, rat_int};
    use crate::tensor::Form;
    use approx::assert_relative_eq;

    fn squares() -> HomogeneousMap<f64> {
        HomogeneousMap::from_entries(2, 2, vec![(0, vec![2, 0], 1.0), (1, vec![0, 2], 1.0)])
            .unwrap()
    }

    fn e1_line() -> EigenLine {
        EigenLine {
            rep: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            lambda: Complex64::new(1.0, 0.0),
            lambda_class: LambdaClass::Plus,
            simple: true,
            residual: 0.0,
            real: true,
        }
    }

    #[test]
    fn ray_blow_up_alpha_one_m_two() {
        // alpha = 1, m = 2, y0 = 1: phi(t) = 1/(1-t), blow-up at t = 1
        let sol = ray_solution(&squares(), &e1_line(), 1.0).unwrap();
        assert_eq!(sol.blow_up_time, Some(1.0));
        assert_relative_eq!(sol.phi(0.5), 2.0, epsilon = 1e-12);
        for t in [0.0, 0.3, 0.6, 0.9] {
            assert!(sol.ode_residual(t).abs() < 1e-4 * (1.0 + sol.phi(t).powi(2)));
        }
    }

    #[test]
    fn ray_no_forward_blow_up() {
        // alpha = -1, m = 3, y0 = 1: phi(t) = (1+2t)^{-1/2}
        let sol = ray_solution_from_parts(vec![1.0], -1.0, 3, 1.0, None, None).unwrap();
        assert_eq!(sol.blow_up_time, None);
        assert_relative_eq!(sol.phi(4.0), 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn ray_stationary_when_nilpotent() {
        let sol = ray_solution_from_parts(vec![0.0, 1.0], 0.0, 2, 5.0, None, None).unwrap();
        assert_eq!(sol.phi(123.0), 5.0);
        assert_eq!(sol.blow_up_time, None);
    }

    #[test]
    fn exact_blow_up_time() {
        // alpha = 1/3, y0 = 2, m = 2: T = 1/((1/3) * 1 * 2) = 3/2
        let sol = ray_solution_exact(vec![1.0], &rat(1, 3), 2, &rat_int(2)).unwrap();
        assert_eq!(sol.blow_up_exact, Some(rat(3, 2)));
        assert_relative_eq!(sol.blow_up_time.unwrap(), 1.5);
    }

    #[test]
    fn certificate_for_squares() {
        let p = PolyMap::homogeneous(squares());
        let rep = unbounded_certificate(&p, 0).unwrap();
        let cert = rep.certificate.unwrap();
        assert!(cert.alpha > 0.0);
        assert!(!rep.all_real_lines_nilpotent);
    }

    #[test]
    fn certificate_for_xyz_gradient() {
        let q = Form::monomial(3, vec![1, 1, 1], 1.0).unwrap().gradient_map().unwrap();
        let p = PolyMap::homogeneous(q);
        let rep = unbounded_certificate(&p, 0).unwrap();
        let cert = rep.certificate.unwrap();
        // alpha = 1/(3 sqrt 3) on the diagonal
        assert_relative_eq!(cert.alpha, 1.0 / (3.0 * 3f64.sqrt()), epsilon = 1e-10);
    }

    #[test]
    fn infinity_spectrum_squares_at_e1() {
        // DP(e1) = diag(2, 0), alpha = 1: spectrum {-1, -1}
        let p = PolyMap::homogeneous(squares());
        let pt = infinity_spectrum(&p, &e1_line()).unwrap();
        assert_eq!(pt.spectrum.len(), 2);
        for s in &pt.spectrum {
            assert_relative_eq!(s.re, -1.0, epsilon = 1e-12);
            assert_relative_eq!(s.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn infinity_spectrum_xyz_diagonal() {
        // spectrum {-a, -2a, -2a} with a = 1/(3 sqrt 3)
        let q = Form::monomial(3, vec![1, 1, 1], 1.0).unwrap().gradient_map().unwrap();
        let report = enumerate_eigenlines(&q, &SolveOpts::seeded(1)).unwrap();
        let line = report
            .lines
            .iter()
            .find(|l| l.lambda_class == LambdaClass::Plus)
            .unwrap();
        let p = PolyMap::homogeneous(q.clone());
        let pt = infinity_spectrum(&p, line).unwrap();
        let a = line.lambda.re;
        let mut res: Vec<f64> = pt.spectrum.iter().map(|s| s.re).collect();
        res.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_relative_eq!(res[0], -2.0 * a, epsilon = 1e-9);
        assert_relative_eq!(res[1], -2.0 * a, epsilon = 1e-9);
        assert_relative_eq!(res[2], -a, epsilon = 1e-9);
    }

    #[test]
    fn integrator_tracks_ray() {
        // x' = Q(x) started on the e1 ray of the squares map
        let p = PolyMap::homogeneous(squares());
        let sol = ray_solution(&squares(), &e1_line(), 1.0).unwrap();
        let t_end = 0.9 * sol.blow_up_time.unwrap();
        let traj = integrate_adaptive(&p, &[1.0, 0.0], t_end, 1e-10).unwrap();
        let (tf, xf) = traj.last().unwrap();
        assert_relative_eq!(*tf, t_end, epsilon = 1e-12);
        assert_relative_eq!(xf[0], sol.phi(t_end), max_relative = 1e-7);
        assert!(xf[1].abs() < 1e-9);
    }
}
