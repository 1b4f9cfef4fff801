#![allow(dead_code)] // each test binary uses its own slice of these helpers

//! Shared generators and independent oracles for the integration tests.
//!
//! The oracles here must stay independent of the implementation paths they
//! check: the root counter works by derivative recursion and bisection, never
//! by Sturm sequences; the determinant is exact rational Gaussian
//! elimination, not the floating path under test.

use eigenline::scalar::{rat_int, rat_sign};
use eigenline::tensor::{Form, HomogeneousMap};
use eigenline::upoly::UnivarPoly;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rational(r: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> BigRational {
    let num = r.gen_range(-max_num..=max_num);
    let den = r.gen_range(1..=max_den);
    BigRational::new(num.into(), den.into())
}

pub fn random_nonzero_rational(r: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> BigRational {
    loop {
        let v = random_rational(r, max_num, max_den);
        if !v.is_zero() {
            return v;
        }
    }
}

/// All exponent tuples of length `n` summing to `m`, lexicographic.
pub fn exponents(n: usize, m: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, m: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            let mut v = acc.clone();
            v.push(m);
            out.push(v);
            return;
        }
        for k in (0..=m).rev() {
            acc.push(k);
            rec(n - 1, m - k, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, m, &mut Vec::new(), &mut out);
    out
}

/// Dense random real map with coefficients in [-1, 1].
pub fn random_real_map(n: usize, m: u32, seed: u64) -> HomogeneousMap<f64> {
    let mut r = rng(seed);
    let mut entries = Vec::new();
    for j in 0..n {
        for e in exponents(n, m) {
            entries.push((j, e, r.gen_range(-1.0..1.0)));
        }
    }
    HomogeneousMap::from_entries(n, m, entries).unwrap()
}

/// Random complex map with Gaussian-rational structure coefficients; returns
/// the float map for the solver and the exact table for certification.
#[allow(clippy::type_complexity)]
pub fn random_complex_map_exact(
    n: usize,
    m: u32,
    seed: u64,
) -> (HomogeneousMap<Complex64>, Vec<(usize, Vec<u32>, (BigRational, BigRational))>) {
    let mut r = rng(seed);
    let mut entries = Vec::new();
    let mut table = Vec::new();
    for j in 0..n {
        for e in exponents(n, m) {
            let re = random_rational(&mut r, 8, 4);
            let im = random_rational(&mut r, 8, 4);
            table.push((j, e.clone(), (re.clone(), im.clone())));
            entries.push((
                j,
                e,
                Complex64::new(
                    eigenline::scalar::rat_to_f64(&re),
                    eigenline::scalar::rat_to_f64(&im),
                ),
            ));
        }
    }
    (HomogeneousMap::from_entries(n, m, entries).unwrap(), table)
}

/// Random harmonic cubic on R^3, exactly harmonic by construction.
pub fn random_harmonic_cubic(seed: u64) -> Form<BigRational> {
    let mut r = rng(seed);
    let mut terms = Vec::new();
    for e in exponents(3, 3) {
        terms.push((e, random_rational(&mut r, 10, 6)));
    }
    let q = Form::from_terms(3, 3, terms).unwrap();
    eigenline::cubic3::harmonic_projection(&q)
}

/// Random univariate polynomial of the given degree with small rational
/// coefficients and nonzero leading term.
pub fn random_poly(r: &mut ChaCha8Rng, degree: usize) -> UnivarPoly {
    let mut coeffs: Vec<BigRational> =
        (0..degree).map(|_| random_rational(r, 9, 5)).collect();
    coeffs.push(random_nonzero_rational(r, 9, 5));
    UnivarPoly::new(coeffs)
}

// ---------------------------------------------------------------------------
// derivative-recursion root-counting oracle (grid of critical points plus
// bisection; no Sturm machinery anywhere)
// ---------------------------------------------------------------------------

fn eval(p: &UnivarPoly, x: &BigRational) -> BigRational {
    p.eval(x)
}

/// Bound on `|p'|` over `[lo, hi]`: the sum of coefficient magnitudes of the
/// derivative at the larger endpoint radius.
fn deriv_bound(dp: &UnivarPoly, lo: &BigRational, hi: &BigRational) -> BigRational {
    let r = lo.abs().max(hi.abs()).max(BigRational::one());
    let mut bound = BigRational::zero();
    let mut pw = BigRational::one();
    for c in dp.coeffs() {
        bound += c.abs() * &pw;
        pw *= &r;
    }
    bound
}

/// Exact real-root count by recursion on the derivative: between consecutive
/// critical points the polynomial is monotone and a sign comparison decides;
/// inside an interval holding one critical point, either the signs differ
/// (one crossing), a mean-value bound certifies the interval root-free, or
/// the interval splits and recursion continues. Returns `None` on the
/// measure-zero corner cases the oracle refuses to decide (an exact root at
/// a generated breakpoint, recursion too deep).
pub fn oracle_root_count(p: &UnivarPoly) -> Option<usize> {
    match p.deg() {
        None | Some(0) => return Some(0),
        Some(1) => return Some(1),
        _ => {}
    }
    let dp = p.derivative();
    let crit = oracle_isolate(&dp)?;

    let mut bound = p.cauchy_bound();
    for c in &crit {
        let (lo, hi) = match c {
            OracleRoot::Exact(x) => (x, x),
            OracleRoot::Interval(lo, hi) => (lo, hi),
        };
        if -lo.clone() > bound {
            bound = -lo.clone();
        }
        if hi > &bound {
            bound = hi.clone();
        }
    }
    bound += rat_int(1);

    let mut count = 0usize;
    let mut prev = -&bound;
    if eval(p, &prev).is_zero() {
        return None;
    }
    for c in &crit {
        match c {
            OracleRoot::Exact(x) => {
                if eval(p, x).is_zero() {
                    count += 1; // multiple root of p; callers pass squarefree
                } else {
                    // monotone from prev to x
                    count += count_monotone(p, &prev, x)?;
                }
                prev = x.clone();
            }
            OracleRoot::Interval(lo, hi) => {
                count += count_monotone(p, &prev, lo)?;
                count += count_crit_window(p, &dp, lo, hi, 0)?;
                prev = hi.clone();
            }
        }
    }
    count += count_monotone(p, &prev, &bound)?;
    Some(count)
}

/// Roots of a monotone stretch `(a, b)` with `p(a) != 0 != p(b)`: one when
/// the signs differ, none otherwise.
fn count_monotone(p: &UnivarPoly, a: &BigRational, b: &BigRational) -> Option<usize> {
    if a == b {
        return Some(0);
    }
    let sa = rat_sign(&eval(p, a));
    let sb = rat_sign(&eval(p, b));
    if sa == 0 || sb == 0 {
        return None; // breakpoint hit a root exactly: refuse to decide
    }
    Some(usize::from(sa != sb))
}

/// Roots inside an interval containing exactly one critical point, with
/// `p` and `dp` nonzero at both endpoints.
fn count_crit_window(
    p: &UnivarPoly,
    dp: &UnivarPoly,
    lo: &BigRational,
    hi: &BigRational,
    depth: usize,
) -> Option<usize> {
    if depth > 300 {
        return None;
    }
    let sl = rat_sign(&eval(p, lo));
    let sh = rat_sign(&eval(p, hi));
    if sl == 0 || sh == 0 {
        return None;
    }
    if sl != sh {
        // exactly one crossing: the two monotone halves can carry at most
        // one crossing each, and equal crossings would restore the sign
        return Some(1);
    }
    // same sign: either no root, or a pair straddling the critical point
    let width = hi - lo;
    let b = deriv_bound(dp, lo, hi);
    let margin = eval(p, lo).abs().min(eval(p, hi).abs());
    if margin > &width * &b {
        return Some(0); // mean value theorem: p cannot reach zero inside
    }
    // split at a point clear of roots of p
    let mid = nonroot_midpoint(p, lo, hi)?;
    let sdl = rat_sign(&eval(dp, lo));
    let sdm = rat_sign(&eval(dp, &mid));
    if sdm == 0 {
        // landed exactly on the critical point: both halves are monotone
        return Some(count_monotone(p, lo, &mid)? + count_monotone(p, &mid, hi)?);
    }
    if sdm != sdl {
        // critical point in the left half
        Some(count_crit_window(p, dp, lo, &mid, depth + 1)? + count_monotone(p, &mid, hi)?)
    } else {
        Some(count_monotone(p, lo, &mid)? + count_crit_window(p, dp, &mid, hi, depth + 1)?)
    }
}

fn nonroot_midpoint(p: &UnivarPoly, lo: &BigRational, hi: &BigRational) -> Option<BigRational> {
    let half = BigRational::new(1.into(), 2.into());
    for k in 0..64u32 {
        let frac = if k == 0 {
            half.clone()
        } else {
            &half + BigRational::new(1.into(), num_bigint::BigInt::from(2).pow(k + 1))
        };
        let cand = lo + (hi - lo) * &frac;
        if !eval(p, &cand).is_zero() {
            return Some(cand);
        }
    }
    None
}

enum OracleRoot {
    Exact(BigRational),
    Interval(BigRational, BigRational),
}

/// Isolating data for all real roots of `p`, ordered; intervals carry
/// nonzero values of `p` at both endpoints and exactly one root inside.
fn oracle_isolate(p: &UnivarPoly) -> Option<Vec<OracleRoot>> {
    match p.deg() {
        None | Some(0) => return Some(vec![]),
        Some(1) => {
            return Some(vec![OracleRoot::Exact(-p.coeff(0) / p.coeff(1))]);
        }
        _ => {}
    }
    let dp = p.derivative();
    let crit = oracle_isolate(&dp)?;

    let mut bound = p.cauchy_bound();
    for c in &crit {
        let (lo, hi) = match c {
            OracleRoot::Exact(x) => (x, x),
            OracleRoot::Interval(lo, hi) => (lo, hi),
        };
        if -lo.clone() > bound {
            bound = -lo.clone();
        }
        if hi > &bound {
            bound = hi.clone();
        }
    }
    bound += rat_int(1);

    let mut out: Vec<OracleRoot> = Vec::new();
    let mut prev = -&bound;
    if eval(p, &prev).is_zero() {
        return None;
    }
    for c in &crit {
        match c {
            OracleRoot::Exact(x) => {
                if eval(p, x).is_zero() {
                    out.push(OracleRoot::Exact(x.clone()));
                } else {
                    isolate_monotone(p, &prev, x, &mut out)?;
                }
                prev = x.clone();
            }
            OracleRoot::Interval(lo, hi) => {
                isolate_monotone(p, &prev, lo, &mut out)?;
                isolate_crit_window(p, &dp, lo, hi, 0, &mut out)?;
                prev = hi.clone();
            }
        }
    }
    isolate_monotone(p, &prev, &bound, &mut out)?;
    Some(out)
}

fn isolate_monotone(
    p: &UnivarPoly,
    a: &BigRational,
    b: &BigRational,
    out: &mut Vec<OracleRoot>,
) -> Option<()> {
    match count_monotone(p, a, b)? {
        0 => {}
        _ => out.push(OracleRoot::Interval(a.clone(), b.clone())),
    }
    Some(())
}

fn isolate_crit_window(
    p: &UnivarPoly,
    dp: &UnivarPoly,
    lo: &BigRational,
    hi: &BigRational,
    depth: usize,
    out: &mut Vec<OracleRoot>,
) -> Option<()> {
    if depth > 300 {
        return None;
    }
    let sl = rat_sign(&eval(p, lo));
    let sh = rat_sign(&eval(p, hi));
    if sl == 0 || sh == 0 {
        return None;
    }
    if sl != sh {
        out.push(OracleRoot::Interval(lo.clone(), hi.clone()));
        return Some(());
    }
    let width = hi - lo;
    let b = deriv_bound(dp, lo, hi);
    let margin = eval(p, lo).abs().min(eval(p, hi).abs());
    if margin > &width * &b {
        return Some(());
    }
    let mid = nonroot_midpoint(p, lo, hi)?;
    let sdl = rat_sign(&eval(dp, lo));
    let sdm = rat_sign(&eval(dp, &mid));
    if sdm == 0 {
        isolate_monotone(p, lo, &mid, out)?;
        isolate_monotone(p, &mid, hi, out)?;
        return Some(());
    }
    if sdm != sdl {
        isolate_crit_window(p, dp, lo, &mid, depth + 1, out)?;
        isolate_monotone(p, &mid, hi, out)?;
    } else {
        isolate_monotone(p, lo, &mid, out)?;
        isolate_crit_window(p, dp, &mid, hi, depth + 1, out)?;
    }
    Some(())
}

// ---------------------------------------------------------------------------
// exact determinant oracle
// ---------------------------------------------------------------------------

/// Determinant by exact rational Gaussian elimination with partial pivoting.
pub fn exact_det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::from_integer(1.into());
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(pr) = pivot else {
            return BigRational::zero();
        };
        if pr != col {
            m.swap(pr, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in (col + 1)..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pv;
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    det
}
