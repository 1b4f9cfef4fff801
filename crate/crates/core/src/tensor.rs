//! Homogeneous polynomial maps, symmetric tensors and scalar forms.
//!
//! A degree-`m` homogeneous polynomial map `Q: K^n -> K^n` is stored through
//! its structure coefficients: a sparse table keyed by `(component, multi
//! index)`. The table uniquely determines `Q` and vice versa; the coefficient
//! space has dimension `n * C(n+m-1, n-1)`. The symmetric-tensor view is
//! recovered on demand by polarization, and scalar forms of degree `m+1`
//! correspond to maps with symmetric derivative via the gradient identity
//! `Dq(x)y = (m+1) <Q(x), y>`.
//!
//! Iteration order over the table is graded lexicographic, which makes every
//! derived quantity reproducible.

use crate::error::{Error, Result};
use crate::scalar::Coeff;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent tuple of a monomial; entries sum to the degree of the owner.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Monomial evaluation `x_1^{i_1} ... x_n^{i_n}`.
    pub fn eval<T: Coeff>(&self, x: &[T]) -> T {
        let mut acc = T::one();
        for (xi, &e) in x.iter().zip(&self.0) {
            for _ in 0..e {
                acc = acc * xi.clone();
            }
        }
        acc
    }

    fn lowered(&self, var: usize) -> Option<MultiIndex> {
        if self.0[var] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[var] -= 1;
        Some(MultiIndex(v))
    }

    fn raised(&self, var: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[var] += 1;
        MultiIndex(v)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Dimension of the space of degree-`m` homogeneous maps on `K^n`:
/// `n * C(n+m-1, n-1)`.
pub fn coefficient_space_dim(n: usize, m: u32) -> u64 {
    n as u64 * binomial(n as u64 + m as u64 - 1, n as u64 - 1)
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Scalar homogeneous polynomial, stored as a sparse exponent table.
#[derive(Clone, PartialEq)]
pub struct Form<T: Coeff> {
    n: usize,
    degree: u32,
    terms: BTreeMap<MultiIndex, T>,
}

impl<T: Coeff> Form<T> {
    /// The zero polynomial, tagged with an ambient dimension and degree.
    pub fn zero(n: usize, degree: u32) -> Self {
        Form { n, degree, terms: BTreeMap::new() }
    }

    pub fn from_terms(n: usize, degree: u32, terms: Vec<(Vec<u32>, T)>) -> Result<Self> {
        let mut form = Form::zero(n, degree);
        for (exp, c) in terms {
            if exp.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: exp.len() });
            }
            let mi = MultiIndex::new(exp);
            if mi.degree() != degree {
                return Err(Error::Parse(format!(
                    "exponents {:?} sum to {}, expected degree {}",
                    mi.0,
                    mi.degree(),
                    degree
                )));
            }
            form.add_term(mi, c);
        }
        Ok(form)
    }

    pub fn monomial(n: usize, exponents: Vec<u32>, coeff: T) -> Result<Self> {
        let degree = exponents.iter().sum();
        Form::from_terms(n, degree, vec![(exponents, coeff)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mi: &MultiIndex) -> T {
        self.terms.get(mi).cloned().unwrap_or_else(T::zero)
    }

    /// Add `c` to the coefficient of the given monomial; zero entries are
    /// dropped so coefficient comparison stays canonical.
    pub fn add_term(&mut self, mi: MultiIndex, c: T) {
        debug_assert_eq!(mi.degree(), self.degree);
        let entry = self.terms.remove(&mi);
        let new = match entry {
            Some(old) => old + c,
            None => c,
        };
        if !new.is_zero() {
            self.terms.insert(mi, new);
        }
    }

    pub fn eval(&self, x: &[T]) -> Result<T> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        let mut acc = T::zero();
        for (mi, c) in &self.terms {
            acc = acc + c.clone() * mi.eval(x);
        }
        Ok(acc)
    }

    /// Partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Form<T> {
        let mut out = Form::zero(self.n, self.degree.saturating_sub(1));
        for (mi, c) in &self.terms {
            if let Some(lower) = mi.lowered(var) {
                out.add_term(lower, c.clone() * T::from_int(mi.0[var] as i64));
            }
        }
        out
    }

    pub fn gradient(&self) -> Vec<Form<T>> {
        (0..self.n).map(|i| self.partial(i)).collect()
    }

    pub fn laplacian(&self) -> Form<T> {
        let mut out = Form::zero(self.n, self.degree.saturating_sub(2));
        for i in 0..self.n {
            out = out.add(&self.partial(i).partial(i));
        }
        out
    }

    pub fn add(&self, other: &Form<T>) -> Form<T> {
        debug_assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (mi, c) in &other.terms {
            out.add_term(mi.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Form<T>) -> Form<T> {
        self.add(&other.scale(&(-T::one())))
    }

    pub fn scale(&self, k: &T) -> Form<T> {
        let mut out = Form::zero(self.n, self.degree);
        if k.is_zero() {
            return out;
        }
        for (mi, c) in &self.terms {
            out.add_term(mi.clone(), c.clone() * k.clone());
        }
        out
    }

    pub fn mul(&self, other: &Form<T>) -> Form<T> {
        let mut out = Form::zero(self.n, self.degree + other.degree);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut exp = a.0.clone();
                for (e, &eb) in exp.iter_mut().zip(&b.0) {
                    *e += eb;
                }
                out.add_term(MultiIndex(exp), ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Multiply by the variable `x_var`.
    pub fn mul_var(&self, var: usize) -> Form<T> {
        let mut out = Form::zero(self.n, self.degree + 1);
        for (mi, c) in &self.terms {
            out.add_term(mi.raised(var), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Form<T> {
        self.scale(&(-T::one()))
    }

    pub fn map_coeffs<U: Coeff, F: Fn(&T) -> U>(&self, f: F) -> Form<U> {
        let mut out = Form::zero(self.n, self.degree);
        for (mi, c) in &self.terms {
            out.add_term(mi.clone(), f(c));
        }
        out
    }

    /// Linear change of variables `x_i = sum_j a[i][j] y_j`, expanded
    /// monomial by monomial.
    pub fn substitute_linear(&self, a: &[Vec<T>]) -> Form<T> {
        let mut out = Form::zero(self.n, self.degree);
        let linear: Vec<Form<T>> = (0..self.n)
            .map(|i| {
                let mut l = Form::zero(self.n, 1);
                for (j, c) in a[i].iter().enumerate() {
                    let mut exp = vec![0u32; self.n];
                    exp[j] = 1;
                    l.add_term(MultiIndex(exp), c.clone());
                }
                l
            })
            .collect();
        for (mi, c) in &self.terms {
            let mut term = Form::monomial(self.n, vec![0; self.n], c.clone()).unwrap();
            for (i, &e) in mi.0.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&linear[i]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Largest coefficient magnitude; scale reference for tolerances.
    pub fn coeff_scale(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    fn is_negligible(&self, scale: f64) -> bool {
        if T::EXACT {
            self.is_zero()
        } else {
            self.terms.values().all(|c| c.magnitude() <= 1e-12 * scale.max(1.0))
        }
    }

    /// The gradient map `Q` with `Dq(x)y = d <Q(x), y>` where `d = deg q`,
    /// i.e. `Q_j = (dq/dx_j) / d`. Requires degree at least 2.
    pub fn gradient_map(&self) -> Result<HomogeneousMap<T>> {
        if self.degree < 2 {
            return Err(Error::DegreeTooSmall { min: 2, got: self.degree });
        }
        let d = self.degree as i64;
        let comps = self
            .gradient()
            .into_iter()
            .map(|g| g.map_coeffs(|c| c.div_int(d)))
            .collect();
        HomogeneousMap::from_components(comps)
    }
}

impl<T: Coeff> fmt::Debug for Form<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(mi, c)| format!("{} x^{:?}", c, mi.0))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Result of the symbolic gradient/trace diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GradientDiagnostics {
    /// `DQ(x) = DQ(x)^T` as a polynomial identity.
    pub is_gradient: bool,
    /// `trace DQ(x)` is the zero polynomial.
    pub is_traceless: bool,
}

/// Homogeneous polynomial map `K^n -> K^n` of degree `m`, one sparse form per
/// component.
#[derive(Clone, PartialEq)]
pub struct HomogeneousMap<T: Coeff> {
    n: usize,
    m: u32,
    comps: Vec<Form<T>>,
}

impl<T: Coeff> HomogeneousMap<T> {
    pub fn from_components(comps: Vec<Form<T>>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::InvalidParameter("map needs at least one component".into()));
        }
        let n = comps.len();
        let m = comps.iter().map(|f| f.degree()).max().unwrap();
        for f in &comps {
            if f.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: f.n() });
            }
            if !f.is_zero() && f.degree() != m {
                return Err(Error::Parse(format!(
                    "component degree {} differs from map degree {}",
                    f.degree(),
                    m
                )));
            }
        }
        if comps.iter().all(|f| f.is_zero()) {
            return Err(Error::InvalidParameter("all structure coefficients vanish".into()));
        }
        // normalize padded degrees on zero components
        let comps = comps
            .into_iter()
            .map(|f| if f.is_zero() { Form::zero(n, m) } else { f })
            .collect();
        Ok(HomogeneousMap { n, m, comps })
    }

    /// Build from `(component, exponents, value)` entries; `component` is
    /// zero-based here ([`crate::io`] handles the one-based wire format).
    pub fn from_entries(n: usize, m: u32, entries: Vec<(usize, Vec<u32>, T)>) -> Result<Self> {
        let mut comps: Vec<Form<T>> = (0..n).map(|_| Form::zero(n, m)).collect();
        for (j, exp, c) in entries {
            if j >= n {
                return Err(Error::Parse(format!("component index {} out of range 1..={}", j + 1, n)));
            }
            if exp.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: exp.len() });
            }
            let mi = MultiIndex::new(exp);
            if mi.degree() != m {
                return Err(Error::Parse(format!(
                    "exponents {:?} sum to {}, expected degree {}",
                    mi.0,
                    mi.degree(),
                    m
                )));
            }
            comps[j].add_term(mi, c);
        }
        HomogeneousMap::from_components(comps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn component(&self, j: usize) -> &Form<T> {
        &self.comps[j]
    }

    pub fn components(&self) -> &[Form<T>] {
        &self.comps
    }

    pub fn coeff_scale(&self) -> f64 {
        self.comps.iter().map(|f| f.coeff_scale()).fold(0.0, f64::max)
    }

    pub fn evaluate(&self, x: &[T]) -> Result<Vec<T>> {
        self.comps.iter().map(|f| f.eval(x)).collect()
    }

    /// Jacobian matrix `DQ(x)`, row `i` column `j` holding `dQ_i/dx_j`.
    pub fn jacobian_at(&self, x: &[T]) -> Result<Vec<Vec<T>>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        self.comps
            .iter()
            .map(|f| (0..self.n).map(|j| f.partial(j).eval(x)).collect())
            .collect()
    }

    /// Jacobian as a matrix of forms, for symbolic identities.
    pub fn jacobian_forms(&self) -> Vec<Vec<Form<T>>> {
        self.comps
            .iter()
            .map(|f| (0..self.n).map(|j| f.partial(j)).collect())
            .collect()
    }

    /// Apply the symmetric tensor associated with this map to `m` argument
    /// vectors. Computed by the polarization identity
    /// `m! T(v_1,..,v_m) = sum_{S nonempty} (-1)^{m-|S|} Q(sum_{i in S} v_i)`,
    /// which is exact over every supported coefficient type.
    pub fn polarize_apply(&self, args: &[Vec<T>]) -> Result<Vec<T>> {
        if args.len() != self.m as usize {
            return Err(Error::DimensionMismatch { expected: self.m as usize, got: args.len() });
        }
        for a in args {
            if a.len() != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, got: a.len() });
            }
        }
        let m = self.m as usize;
        let mut acc = vec![T::zero(); self.n];
        for mask in 1u32..(1 << m) {
            let mut arg = vec![T::zero(); self.n];
            for (i, a) in args.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    for (s, v) in arg.iter_mut().zip(a) {
                        *s = s.clone() + v.clone();
                    }
                }
            }
            let val = self.evaluate(&arg)?;
            let sign = if (m - mask.count_ones() as usize).is_multiple_of(2) { T::one() } else { -T::one() };
            for (s, v) in acc.iter_mut().zip(val) {
                *s = s.clone() + sign.clone() * v;
            }
        }
        let mfact: i64 = (1..=m as i64).product();
        Ok(acc.into_iter().map(|c| c.div_int(mfact)).collect())
    }

    /// Symbolic symmetry and trace diagnostics of `DQ(x)`, decided by
    /// coefficient comparison after expansion, never by sampling.
    pub fn gradient_diagnostics(&self) -> GradientDiagnostics {
        let jac = self.jacobian_forms();
        let scale = self.coeff_scale();
        let mut is_gradient = true;
        'outer: for i in 0..self.n {
            for j in (i + 1)..self.n {
                if !jac[i][j].sub(&jac[j][i]).is_negligible(scale) {
                    is_gradient = false;
                    break 'outer;
                }
            }
        }
        let mut trace = Form::zero(self.n, self.m.saturating_sub(1));
        for (i, row) in jac.iter().enumerate() {
            trace = trace.add(&row[i]);
        }
        GradientDiagnostics { is_gradient, is_traceless: trace.is_negligible(scale) }
    }

    /// The potential form `q(x) = <Q(x), x>`, defined when `DQ` is symmetric;
    /// satisfies `gradient_map(potential(Q)) = Q` coefficientwise.
    pub fn potential(&self) -> Result<Form<T>> {
        if !self.gradient_diagnostics().is_gradient {
            return Err(Error::NotAGradient);
        }
        let mut q = Form::zero(self.n, self.m + 1);
        for (j, f) in self.comps.iter().enumerate() {
            q = q.add(&f.mul_var(j));
        }
        Ok(q)
    }

    pub fn map_coeffs<U: Coeff, F: Fn(&T) -> U>(&self, f: F) -> HomogeneousMap<U> {
        HomogeneousMap {
            n: self.n,
            m: self.m,
            comps: self.comps.iter().map(|c| c.map_coeffs(&f)).collect(),
        }
    }
}

impl HomogeneousMap<f64> {
    pub fn to_c64(&self) -> HomogeneousMap<Complex64> {
        self.map_coeffs(|c| Complex64::new(*c, 0.0))
    }
}

impl HomogeneousMap<num_rational::BigRational> {
    pub fn to_f64(&self) -> HomogeneousMap<f64> {
        self.map_coeffs(crate::scalar::rat_to_f64)
    }
}

impl Form<num_rational::BigRational> {
    pub fn to_f64(&self) -> Form<f64> {
        self.map_coeffs(crate::scalar::rat_to_f64)
    }
}

impl Form<f64> {
    /// Exact promotion: every finite `f64` coefficient is a dyadic rational.
    pub fn to_rational(&self) -> Form<num_rational::BigRational> {
        self.map_coeffs(|c| crate::scalar::f64_to_rat(*c))
    }
}

impl<T: Coeff> fmt::Debug for HomogeneousMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "HomogeneousMap n={} m={}", self.n, self.m)?;
        for (j, c) in self.comps.iter().enumerate() {
            writeln!(f, "  Q_{} = {:?}", j + 1, c)?;
        }
        Ok(())
    }
}

/// View of a homogeneous map as the symmetric order-`m` tensor it
/// determines: `apply` evaluates the polarized multilinear form, which is
/// symmetric in its arguments and reproduces the map on the diagonal.
pub struct SymmetricTensorView<'a, T: Coeff> {
    map: &'a HomogeneousMap<T>,
}

impl<'a, T: Coeff> SymmetricTensorView<'a, T> {
    pub fn new(map: &'a HomogeneousMap<T>) -> Self {
        SymmetricTensorView { map }
    }

    pub fn order(&self) -> u32 {
        self.map.degree()
    }

    pub fn apply(&self, args: &[Vec<T>]) -> Result<Vec<T>> {
        self.map.polarize_apply(args)
    }
}

/// Polynomial map `P = P_0 + ... + P_m` with homogeneous parts, `P_m != 0`.
#[derive(Clone, Debug)]
pub struct PolyMap<T: Coeff> {
    n: usize,
    parts: BTreeMap<u32, HomogeneousMap<T>>,
}

impl<T: Coeff> PolyMap<T> {
    pub fn from_parts(parts: Vec<HomogeneousMap<T>>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut n = None;
        for p in parts {
            let pn = p.n();
            if *n.get_or_insert(pn) != pn {
                return Err(Error::DimensionMismatch { expected: n.unwrap(), got: pn });
            }
            if map.insert(p.degree(), p).is_some() {
                return Err(Error::InvalidParameter("duplicate part degree".into()));
            }
        }
        let n = n.ok_or_else(|| Error::InvalidParameter("empty polynomial map".into()))?;
        Ok(PolyMap { n, parts: map })
    }

    pub fn homogeneous(part: HomogeneousMap<T>) -> Self {
        let n = part.n();
        let mut parts = BTreeMap::new();
        parts.insert(part.degree(), part);
        PolyMap { n, parts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Degree of the leading part.
    pub fn degree(&self) -> u32 {
        *self.parts.keys().next_back().unwrap()
    }

    pub fn leading(&self) -> &HomogeneousMap<T> {
        self.parts.values().next_back().unwrap()
    }

    pub fn parts(&self) -> impl Iterator<Item = (&u32, &HomogeneousMap<T>)> {
        self.parts.iter()
    }

    pub fn evaluate(&self, x: &[T]) -> Result<Vec<T>> {
        let mut acc = vec![T::zero(); self.n];
        for p in self.parts.values() {
            for (s, v) in acc.iter_mut().zip(p.evaluate(x)?) {
                *s = s.clone() + v;
            }
        }
        Ok(acc)
    }

    pub fn jacobian_at(&self, x: &[T]) -> Result<Vec<Vec<T>>> {
        let mut acc = vec![vec![T::zero(); self.n]; self.n];
        for p in self.parts.values() {
            let j = p.jacobian_at(x)?;
            for (ar, jr) in acc.iter_mut().zip(j) {
                for (a, v) in ar.iter_mut().zip(jr) {
                    *a = a.clone() + v;
                }
            }
        }
        Ok(acc)
    }

    pub fn map_coeffs<U: Coeff, F: Fn(&T) -> U + Copy>(&self, f: F) -> PolyMap<U> {
        PolyMap {
            n: self.n,
            parts: self.parts.iter().map(|(d, p)| (*d, p.map_coeffs(f))).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};
    use num_rational::BigRational;

    fn diag_squares() -> HomogeneousMap<BigRational> {
        // Q(x) = (x1^2, x2^2)
        HomogeneousMap::from_entries(
            2,
            2,
            vec![(0, vec![2, 0], rat_int(1)), (1, vec![0, 2], rat_int(1))],
        )
        .unwrap()
    }

    fn xyz_form() -> Form<BigRational> {
        Form::monomial(3, vec![1, 1, 1], rat_int(1)).unwrap()
    }

    #[test]
    fn evaluate_monomials() {
        let q = diag_squares();
        let v = q.evaluate(&[rat_int(1), rat_int(2)]).unwrap();
        assert_eq!(v, vec![rat_int(1), rat_int(4)]);
        let z = q.evaluate(&[rat_int(0), rat_int(0)]).unwrap();
        assert_eq!(z, vec![rat_int(0), rat_int(0)]);
    }

    #[test]
    fn evaluate_gradient_of_xyz() {
        // gradient map of x1 x2 x3 has coefficients 1/3
        let q = xyz_form().gradient_map().unwrap();
        let v = q.evaluate(&[rat_int(1), rat_int(1), rat_int(1)]).unwrap();
        assert_eq!(v, vec![rat(1, 3), rat(1, 3), rat(1, 3)]);
    }

    #[test]
    fn evaluate_dimension_mismatch() {
        let q = diag_squares();
        assert!(matches!(
            q.evaluate(&[rat_int(1)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn polarize_equal_args_is_evaluate() {
        let q = diag_squares();
        let x = vec![rat_int(3), rat(-2, 7)];
        // Euler identity for the polarized tensor at equal arguments
        let t = q.polarize_apply(&[x.clone(), x.clone()]).unwrap();
        assert_eq!(t, q.evaluate(&x).unwrap());
    }

    #[test]
    fn polarize_mixed_args() {
        let q = diag_squares();
        let t = q
            .polarize_apply(&[vec![rat_int(1), rat_int(0)], vec![rat_int(0), rat_int(1)]])
            .unwrap();
        assert_eq!(t, vec![rat_int(0), rat_int(0)]);

        // oracle: T(u,v) = (Q(u+v) - Q(u) - Q(v)) / 2 for m = 2
        let g = xyz_form().gradient_map().unwrap();
        let u = vec![rat_int(0), rat_int(1), rat_int(0)];
        let v = vec![rat_int(0), rat_int(0), rat_int(1)];
        let sum: Vec<BigRational> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let oracle: Vec<BigRational> = g
            .evaluate(&sum)
            .unwrap()
            .into_iter()
            .zip(g.evaluate(&u).unwrap())
            .zip(g.evaluate(&v).unwrap())
            .map(|((s, a), b)| (s - a - b) / rat_int(2))
            .collect();
        let t = g.polarize_apply(&[u, v]).unwrap();
        assert_eq!(t, oracle);
        // polarization of (x2 x3, x1 x3, x1 x2)/3 at (e2, e3) is e1/6
        assert_eq!(t, vec![rat(1, 6), rat_int(0), rat_int(0)]);
    }

    #[test]
    fn polarize_permutation_invariance() {
        let g = xyz_form().gradient_map().unwrap();
        let u = vec![rat_int(1), rat_int(2), rat_int(-1)];
        let v = vec![rat_int(4), rat_int(0), rat_int(3)];
        assert_eq!(
            g.polarize_apply(&[u.clone(), v.clone()]).unwrap(),
            g.polarize_apply(&[v, u]).unwrap()
        );
    }

    #[test]
    fn jacobian_euler_identity() {
        let q = diag_squares();
        let x = vec![rat_int(1), rat_int(2)];
        let jac = q.jacobian_at(&x).unwrap();
        assert_eq!(jac[0], vec![rat_int(2), rat_int(0)]);
        assert_eq!(jac[1], vec![rat_int(0), rat_int(4)]);
        // DQ(x) x = m Q(x)
        let qx = q.evaluate(&x).unwrap();
        for i in 0..2 {
            let dot: BigRational = jac[i].iter().zip(&x).map(|(a, b)| a * b).sum();
            assert_eq!(dot, rat_int(2) * &qx[i]);
        }
    }

    #[test]
    fn gradient_map_examples() {
        // q = x1^3 on K^2 -> Q = (x1^2, 0)
        let q = Form::monomial(2, vec![3, 0], rat_int(1)).unwrap();
        let g = q.gradient_map().unwrap();
        let v = g.evaluate(&[rat_int(2), rat_int(5)]).unwrap();
        assert_eq!(v, vec![rat_int(4), rat_int(0)]);
    }

    #[test]
    fn potential_round_trip() {
        let q = xyz_form();
        let g = q.gradient_map().unwrap();
        let p = g.potential().unwrap();
        assert_eq!(p, q);
        // and the reverse composition
        let g2 = p.gradient_map().unwrap();
        assert_eq!(g2, g);
    }

    #[test]
    fn potential_rejects_non_gradient() {
        // Q = (x2^2, x1^2): DQ = [[0, 2x2], [2x1, 0]] is not symmetric
        let q = HomogeneousMap::from_entries(
            2,
            2,
            vec![(0, vec![0, 2], rat_int(1)), (1, vec![2, 0], rat_int(1))],
        )
        .unwrap();
        assert!(matches!(q.potential(), Err(Error::NotAGradient)));
        let d = q.gradient_diagnostics();
        assert!(!d.is_gradient);
        assert!(d.is_traceless); // diagonal of DQ is identically zero
    }

    #[test]
    fn diagnostics_harmonic_and_not() {
        let g = xyz_form().gradient_map().unwrap();
        let d = g.gradient_diagnostics();
        assert!(d.is_gradient && d.is_traceless);

        // q = (x1^2+x2^2+x3^2)(x1+x2+x3): gradient but Laplacian = 10(x1+x2+x3)
        let r2 = Form::from_terms(
            3,
            2,
            vec![
                (vec![2, 0, 0], rat_int(1)),
                (vec![0, 2, 0], rat_int(1)),
                (vec![0, 0, 2], rat_int(1)),
            ],
        )
        .unwrap();
        let lin = Form::from_terms(
            3,
            1,
            vec![
                (vec![1, 0, 0], rat_int(1)),
                (vec![0, 1, 0], rat_int(1)),
                (vec![0, 0, 1], rat_int(1)),
            ],
        )
        .unwrap();
        let q = r2.mul(&lin);
        let lap = q.laplacian();
        assert_eq!(lap, lin.scale(&rat_int(10)));
        let d = q.gradient_map().unwrap().gradient_diagnostics();
        assert!(d.is_gradient);
        assert!(!d.is_traceless);
    }

    #[test]
    fn coefficient_space_dimension() {
        // n=3, m=2: 3 * C(4,2) = 18
        assert_eq!(coefficient_space_dim(3, 2), 18);
        assert_eq!(coefficient_space_dim(2, 3), 8);
    }

    #[test]
    fn homogeneity_scaling() {
        let g = xyz_form().gradient_map().unwrap();
        let x = vec![rat_int(2), rat_int(-3), rat_int(5)];
        let a = rat(7, 2);
        let ax: Vec<BigRational> = x.iter().map(|v| v * &a).collect();
        let lhs = g.evaluate(&ax).unwrap();
        let rhs: Vec<BigRational> =
            g.evaluate(&x).unwrap().into_iter().map(|v| v * &a * &a).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn symmetric_tensor_view_diagonal_and_symmetry() {
        let g = xyz_form().gradient_map().unwrap();
        let view = SymmetricTensorView::new(&g);
        assert_eq!(view.order(), 2);
        let x = vec![rat_int(2), rat_int(-1), rat_int(3)];
        assert_eq!(view.apply(&[x.clone(), x.clone()]).unwrap(), g.evaluate(&x).unwrap());
        let y = vec![rat_int(0), rat_int(5), rat_int(1)];
        assert_eq!(
            view.apply(&[x.clone(), y.clone()]).unwrap(),
            view.apply(&[y, x]).unwrap()
        );
    }

    #[test]
    fn polymap_leading_and_eval() {
        let lead = diag_squares();
        let id = HomogeneousMap::from_entries(
            2,
            1,
            vec![(0, vec![1, 0], rat_int(1)), (1, vec![0, 1], rat_int(1))],
        )
        .unwrap();
        let p = PolyMap::from_parts(vec![id, lead]).unwrap();
        assert_eq!(p.degree(), 2);
        let v = p.evaluate(&[rat_int(2), rat_int(3)]).unwrap();
        assert_eq!(v, vec![rat_int(6), rat_int(12)]);
    }
}
