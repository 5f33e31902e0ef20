//! k-terms over `(f,g)` pairs, their probabilities under the uniform and
//! forrelated distributions, and the Gaussian affine-subspace machinery
//! that controls how far the forrelated measure can bend any k-term away
//! from its uniform value.
//!
//! The continuous picture: fixing `K` values of the field and `L` values
//! of its transform pins an affine subspace. Under independent Gaussians
//! its density is governed by the squared distance to the origin of the
//! raw constraints; under the forrelated coupling, by the same distance
//! after a covariance correction. The density ratio is
//! `exp((delta_s - delta_t)/2)`, computed here exactly from the linear
//! system rather than through the asymptotic bound.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::RngStream;
use crate::{check_qubits, parity_sign, Error};

/// Which side of the pair a literal constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// A value of `f` (the field itself).
    F,
    /// A value of `g` (the transform side).
    G,
}

/// One sign constraint: `side(point) == sign`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Literal {
    pub side: Side,
    pub point: usize,
    pub sign: i8,
}

/// Largest supported term order; matches the direct-solver cap.
pub const MAX_TERM_ORDER: usize = 64;

/// A conjunction of up to [`MAX_TERM_ORDER`] literals on distinct
/// `(side, point)` slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KTerm {
    literals: Vec<Literal>,
}

impl KTerm {
    pub fn new(literals: Vec<Literal>) -> Result<Self, Error> {
        if literals.is_empty() || literals.len() > MAX_TERM_ORDER {
            return Err(Error::InvalidArgument("term order must lie in 1..=64"));
        }
        if literals.iter().any(|l| l.sign != 1 && l.sign != -1) {
            return Err(Error::InvalidArgument("literal signs must be +/-1"));
        }
        for (i, a) in literals.iter().enumerate() {
            for b in &literals[..i] {
                if a.side == b.side && a.point == b.point {
                    return Err(Error::InvalidArgument("duplicate (side, point) literal"));
                }
            }
        }
        Ok(Self { literals })
    }

    pub fn order(&self) -> usize {
        self.literals.len()
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    fn max_point(&self) -> usize {
        self.literals.iter().map(|l| l.point).max().unwrap_or(0)
    }
}

/// `Pr_uniform[term] = 2^{-k}`, exactly.
pub fn term_prob_uniform(term: &KTerm) -> f64 {
    libm::exp2(-(term.order() as f64))
}

/// Monte Carlo ratio estimate `Pr_forrelated[term] / 2^{-k}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub se: f64,
    pub trials: u64,
}

/// Estimates the term probability under the forrelated distribution by
/// sampling fields and evaluating the constrained entries directly; the
/// `G`-side needs one length-N character dot product per literal.
/// Returns the ratio to the uniform value with its binomial standard
/// error propagated.
pub fn term_prob_forrelated_mc<R: Rng + ?Sized>(
    term: &KTerm,
    n: u32,
    trials: u64,
    rng: &mut R,
) -> Result<RatioEstimate, Error> {
    check_qubits(n)?;
    let len = 1usize << n;
    if term.max_point() >= len {
        return Err(Error::InvalidArgument("literal point outside the domain"));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial"));
    }
    // Character rows for the G-side literals, built once.
    let g_rows: Vec<(usize, Vec<f64>)> = term
        .literals
        .iter()
        .enumerate()
        .filter(|(_, l)| l.side == Side::G)
        .map(|(slot, l)| (slot, (0..len).map(|x| parity_sign(x & l.point)).collect()))
        .collect();
    let mut field = vec![0.0f64; len];
    let mut satisfied = 0u64;
    for _ in 0..trials {
        for v in field.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let mut ok = true;
        for (slot, literal) in term.literals.iter().enumerate() {
            let value = match literal.side {
                Side::F => field[literal.point],
                Side::G => {
                    let row = &g_rows
                        .iter()
                        .find(|(s, _)| *s == slot)
                        .expect("row built for every G literal")
                        .1;
                    field.iter().zip(row).map(|(v, c)| v * c).sum::<f64>()
                }
            };
            let sign = if value >= 0.0 { 1 } else { -1 };
            if sign != literal.sign {
                ok = false;
                break;
            }
        }
        if ok {
            satisfied += 1;
        }
    }
    let freq = satisfied as f64 / trials as f64;
    let uniform = term_prob_uniform(term);
    let se_freq = libm::sqrt(freq * (1.0 - freq) / trials as f64);
    Ok(RatioEstimate { ratio: freq / uniform, se: se_freq / uniform, trials })
}

/// Closed-form term probability under the forrelated measure for orders
/// one and two.
///
/// Order one is `1/2`; two same-side literals are independent, `1/4`.
/// A mixed pair at points `(x, y)` sees a bivariate normal with
/// correlation `(-1)^{x.y}/sqrt(N)`, so the orthant probability is
/// `1/4 + sign_f * sign_g * asin(rho) / (2 pi)`.
pub fn term_prob_forrelated_analytic(term: &KTerm, n: u32) -> Result<f64, Error> {
    check_qubits(n)?;
    let len = 1usize << n;
    if term.max_point() >= len {
        return Err(Error::InvalidArgument("literal point outside the domain"));
    }
    match term.literals() {
        [_] => Ok(0.5),
        [a, b] if a.side == b.side => Ok(0.25),
        [a, b] => {
            let (fl, gl) = if a.side == Side::F { (a, b) } else { (b, a) };
            let rho = parity_sign(fl.point & gl.point) / libm::sqrt(len as f64);
            let tilt = f64::from(fl.sign) * f64::from(gl.sign);
            Ok(0.25 + tilt * libm::asin(rho) / (2.0 * core::f64::consts::PI))
        }
        other => Err(Error::UnsupportedOrder(other.len())),
    }
}

/// The covariance system pinning an affine subspace: `matrix * u = rhs`
/// with unit diagonal, zero same-side off-diagonals, and cross entries
/// `(-1)^{x_i . y_j} / sqrt(N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSystem {
    dim: usize,
    field_constraints: usize,
    matrix: Vec<f64>, // row-major dim x dim
    rhs: Vec<f64>,
}

impl CovarianceSystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of field-side (`F`) constraints; the rest are transform-side.
    pub fn field_constraints(&self) -> usize {
        self.field_constraints
    }

    pub fn matrix_entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.dim + col]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Squared distance of the raw constraint vector to the origin.
    pub fn delta_s(&self) -> f64 {
        self.rhs.iter().map(|w| w * w).sum()
    }
}

/// Assembles the covariance system for constraints `F(x_i) = a_i`,
/// `G(y_j) = b_j`. Points must be distinct per side and the total
/// constraint count may not exceed `sqrt(N)/2` (the conditioning guard
/// under which the matrix is strictly diagonally dominant).
pub fn build_covariance_system(
    n: u32,
    xs: &[usize],
    ys: &[usize],
    a: &[f64],
    b: &[f64],
) -> Result<CovarianceSystem, Error> {
    check_qubits(n)?;
    let len = 1usize << n;
    if xs.len() != a.len() || ys.len() != b.len() {
        return Err(Error::InvalidArgument("one constraint value per point"));
    }
    let dim = xs.len() + ys.len();
    if dim == 0 {
        return Err(Error::InvalidArgument("need at least one constraint"));
    }
    if xs.iter().chain(ys).any(|&p| p >= len) {
        return Err(Error::InvalidArgument("constraint point outside the domain"));
    }
    for (i, x) in xs.iter().enumerate() {
        if xs[..i].contains(x) {
            return Err(Error::InvalidArgument("field points must be distinct"));
        }
    }
    for (j, y) in ys.iter().enumerate() {
        if ys[..j].contains(y) {
            return Err(Error::InvalidArgument("transform points must be distinct"));
        }
    }
    let sqrt_n = libm::sqrt(len as f64);
    // Conditioning guard. A two-constraint system is always well posed
    // (its cross entry is at most 1/2 in magnitude), so the sqrt(N)/2 cap
    // only bites from three constraints up.
    if dim as f64 > (sqrt_n / 2.0).max(2.0) {
        return Err(Error::IllConditioned("constraint count exceeds sqrt(N)/2"));
    }
    let k = xs.len();
    let mut matrix = vec![0.0; dim * dim];
    for i in 0..dim {
        matrix[i * dim + i] = 1.0;
    }
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let cov = parity_sign(x & y) / sqrt_n;
            matrix[i * dim + (k + j)] = cov;
            matrix[(k + j) * dim + i] = cov;
        }
    }
    let rhs = a.iter().chain(b).copied().collect();
    Ok(CovarianceSystem { dim, field_constraints: k, matrix, rhs })
}

/// Cholesky factorization of a symmetric positive definite matrix,
/// then forward/back substitution. Returns `None` if a pivot degenerates.
fn cholesky_solve(dim: usize, matrix: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let mut lower = matrix.to_vec();
    for j in 0..dim {
        let mut pivot = lower[j * dim + j];
        for t in 0..j {
            pivot -= lower[j * dim + t] * lower[j * dim + t];
        }
        if pivot <= 0.0 || !pivot.is_finite() {
            return None;
        }
        let pivot = libm::sqrt(pivot);
        lower[j * dim + j] = pivot;
        for i in j + 1..dim {
            let mut value = lower[i * dim + j];
            for t in 0..j {
                value -= lower[i * dim + t] * lower[j * dim + t];
            }
            lower[i * dim + j] = value / pivot;
        }
    }
    let mut u = rhs.to_vec();
    for i in 0..dim {
        for t in 0..i {
            u[i] = u[i] - lower[i * dim + t] * u[t];
        }
        u[i] /= lower[i * dim + i];
    }
    for i in (0..dim).rev() {
        for t in i + 1..dim {
            u[i] = u[i] - lower[t * dim + i] * u[t];
        }
        u[i] /= lower[i * dim + i];
    }
    Some(u)
}

/// The exact density ratio of the forrelated Gaussian measure to the
/// independent one on the constrained subspace:
/// solve `A u = w`, set `delta_t = w . u` and `delta_s = w . w`, and
/// return `exp((delta_s - delta_t)/2)`.
pub fn gaussian_subspace_ratio(system: &CovarianceSystem) -> Result<f64, Error> {
    let u = cholesky_solve(system.dim, &system.matrix, &system.rhs)
        .ok_or(Error::IllConditioned("covariance matrix is not positive definite"))?;
    let delta_t: f64 = system.rhs.iter().zip(&u).map(|(w, u)| w * u).sum();
    let delta_s = system.delta_s();
    Ok(libm::exp((delta_s - delta_t) / 2.0))
}

/// Worst observed deviation of the exact ratio from 1 over randomly drawn
/// constraint systems, and the worst constant relative to the scaling
/// term `(K+L) * delta_s / sqrt(N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub samples: u64,
    pub max_abs_deviation: f64,
    /// `max_i |ratio_i - 1| / ((K+L) delta_s_i / sqrt(N))`.
    pub fitted_constant: f64,
}

/// Samples random point sets of total order `k` with standard normal
/// constraint values (redrawn until `delta_s <= k`), and reports how far
/// the exact density ratio strays from 1 against the scaling term.
/// Sample `i` draws from `stream.offset(i)`.
pub fn ratio_bound_check(
    n: u32,
    k: usize,
    samples: u64,
    stream: RngStream,
) -> Result<BoundCheck, Error> {
    check_qubits(n)?;
    let len = 1usize << n;
    let sqrt_n = libm::sqrt(len as f64);
    if k == 0 || k as f64 > sqrt_n / 4.0 || k > MAX_TERM_ORDER {
        return Err(Error::InvalidArgument("order must lie in 1..=sqrt(N)/4"));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample"));
    }
    let mut max_abs_deviation = 0.0f64;
    let mut fitted_constant = 0.0f64;
    for i in 0..samples {
        let mut rng = stream.offset(i).rng();
        let field_count = rng.random_range(0..=k);
        let xs = index::sample(&mut rng, len, field_count).into_vec();
        let ys = index::sample(&mut rng, len, k - field_count).into_vec();
        let (a, b) = loop {
            let a: Vec<f64> = (0..xs.len()).map(|_| rng.sample(StandardNormal)).collect();
            let b: Vec<f64> = (0..ys.len()).map(|_| rng.sample(StandardNormal)).collect();
            let delta_s: f64 = a.iter().chain(&b).map(|v| v * v).sum();
            if delta_s <= k as f64 {
                break (a, b);
            }
        };
        let system = build_covariance_system(n, &xs, &ys, &a, &b)?;
        let ratio = gaussian_subspace_ratio(&system)?;
        let deviation = libm::fabs(ratio - 1.0);
        max_abs_deviation = max_abs_deviation.max(deviation);
        let scale = k as f64 * system.delta_s() / sqrt_n;
        if scale > 0.0 {
            fitted_constant = fitted_constant.max(deviation / scale);
        }
    }
    Ok(BoundCheck { samples, max_abs_deviation, fitted_constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RngStream;

    fn literal(side: Side, point: usize, sign: i8) -> Literal {
        Literal { side, point, sign }
    }

    #[test]
    fn kterm_validation() {
        assert!(KTerm::new(vec![]).is_err());
        assert!(KTerm::new(vec![literal(Side::F, 0, 2)]).is_err());
        assert!(KTerm::new(vec![
            literal(Side::F, 3, 1),
            literal(Side::F, 3, -1),
        ])
        .is_err());
        // Same point on opposite sides is two distinct slots.
        assert!(KTerm::new(vec![
            literal(Side::F, 3, 1),
            literal(Side::G, 3, -1),
        ])
        .is_ok());
    }

    #[test]
    fn uniform_probability_is_dyadic() {
        let term = KTerm::new(vec![literal(Side::F, 0, 1)]).unwrap();
        assert_eq!(term_prob_uniform(&term), 0.5);
        let term = KTerm::new(vec![
            literal(Side::F, 0, 1),
            literal(Side::F, 1, -1),
            literal(Side::G, 0, 1),
            literal(Side::G, 5, -1),
        ])
        .unwrap();
        assert_eq!(term_prob_uniform(&term), 0.0625);
    }

    #[test]
    fn analytic_examples() {
        // Mixed pair at n=2 with x.y even: rho = 1/2 and the orthant
        // probability is exactly 1/4 + asin(1/2)/(2 pi) = 1/3.
        let term = KTerm::new(vec![literal(Side::F, 3, 1), literal(Side::G, 0, 1)]).unwrap();
        let p = term_prob_forrelated_analytic(&term, 2).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-12);

        // Opposite required signs flip the correction.
        let term = KTerm::new(vec![literal(Side::F, 3, 1), literal(Side::G, 0, -1)]).unwrap();
        let p = term_prob_forrelated_analytic(&term, 2).unwrap();
        assert!((p - (0.25 - libm::asin(0.5) / (2.0 * core::f64::consts::PI))).abs() < 1e-12);

        // Same side: exactly 1/4. Single literal: 1/2.
        let term = KTerm::new(vec![literal(Side::G, 1, 1), literal(Side::G, 2, 1)]).unwrap();
        assert_eq!(term_prob_forrelated_analytic(&term, 2).unwrap(), 0.25);
        let term = KTerm::new(vec![literal(Side::F, 1, -1)]).unwrap();
        assert_eq!(term_prob_forrelated_analytic(&term, 2).unwrap(), 0.5);

        // Order three has no closed form here.
        let term = KTerm::new(vec![
            literal(Side::F, 0, 1),
            literal(Side::F, 1, 1),
            literal(Side::G, 0, 1),
        ])
        .unwrap();
        assert!(matches!(
            term_prob_forrelated_analytic(&term, 2),
            Err(Error::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn mc_agrees_with_analytic_across_sizes() {
        // Both sign patterns and both parities of x.y, at n in {2, 6, 10}.
        for n in [2u32, 6, 10] {
            let len = 1usize << n;
            let trials = 40_000u64;
            let cases = [
                (literal(Side::F, 3 % len, 1), literal(Side::G, 3 % len, 1)),
                (literal(Side::F, 3 % len, 1), literal(Side::G, 1 % len, -1)),
                (literal(Side::F, 1 % len, -1), literal(Side::G, 1 % len, -1)),
            ];
            for (slot, (fl, gl)) in cases.into_iter().enumerate() {
                let term = KTerm::new(vec![fl, gl]).unwrap();
                let expected = term_prob_forrelated_analytic(&term, n).unwrap();
                let mut rng = RngStream::new(41, (n as u64) << 8 | slot as u64).rng();
                let est = term_prob_forrelated_mc(&term, n, trials, &mut rng).unwrap();
                let uniform = term_prob_uniform(&term);
                let z = (est.ratio - expected / uniform) / est.se;
                assert!(z.abs() <= 3.0, "n={n} case={slot}: z={z}");
            }
        }
    }

    #[test]
    fn same_side_terms_stay_uniform() {
        let term = KTerm::new(vec![
            literal(Side::F, 1, 1),
            literal(Side::F, 9, -1),
            literal(Side::F, 17, 1),
        ])
        .unwrap();
        let mut rng = RngStream::new(42, 0).rng();
        let est = term_prob_forrelated_mc(&term, 6, 40_000, &mut rng).unwrap();
        assert!((est.ratio - 1.0).abs() <= 3.0 * est.se, "ratio {}", est.ratio);
    }

    #[test]
    fn covariance_system_examples() {
        // L = 0: identity.
        let sys = build_covariance_system(6, &[0, 1, 2], &[], &[1.0, 2.0, 3.0], &[]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(sys.matrix_entry(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
        // K = L = 1 at n=2 with x.y even: cross entry 1/2.
        let sys = build_covariance_system(2, &[3], &[0], &[1.0], &[1.0]).unwrap();
        assert_eq!(sys.matrix_entry(0, 1), 0.5);
        assert_eq!(sys.matrix_entry(1, 0), 0.5);
        // Symmetry on a random system.
        let sys = build_covariance_system(
            6,
            &[1, 2, 3],
            &[4, 5],
            &[0.3, -0.1, 0.7],
            &[1.1, -0.2],
        )
        .unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(sys.matrix_entry(i, j), sys.matrix_entry(j, i));
            }
        }
    }

    #[test]
    fn covariance_system_guards() {
        // n=4: sqrt(N)/2 = 2, so three constraints trip the guard.
        assert!(matches!(
            build_covariance_system(4, &[0, 1], &[2], &[1.0, 1.0], &[1.0]),
            Err(Error::IllConditioned(_))
        ));
        assert!(build_covariance_system(6, &[1, 1], &[], &[1.0, 1.0], &[]).is_err());
        assert!(build_covariance_system(6, &[1], &[], &[1.0, 2.0], &[]).is_err());
        assert!(build_covariance_system(6, &[64], &[], &[1.0], &[]).is_err());
    }

    #[test]
    fn subspace_ratio_trivial_cases() {
        // w = 0 and L = 0 both give ratio exactly 1.
        let sys = build_covariance_system(6, &[0, 1], &[2], &[0.0, 0.0], &[0.0]).unwrap();
        assert_eq!(gaussian_subspace_ratio(&sys).unwrap(), 1.0);
        let sys = build_covariance_system(6, &[0, 1, 2], &[], &[1.0, -2.0, 0.5], &[]).unwrap();
        let ratio = gaussian_subspace_ratio(&sys).unwrap();
        assert!((ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subspace_ratio_hand_inverted_case() {
        // K = L = 1, n = 2, x.y even so the cross entry is 1/2, w = (1,1):
        // delta_s = 2, delta_t = (2 - 2*(1/2)) / (1 - 1/4) = 4/3,
        // ratio = exp(1/3).
        let sys = build_covariance_system(2, &[3], &[0], &[1.0], &[1.0]).unwrap();
        assert_eq!(sys.matrix_entry(0, 1), 0.5);
        let ratio = gaussian_subspace_ratio(&sys).unwrap();
        assert!((ratio - libm::exp(1.0 / 3.0)).abs() < 1e-9);
        assert!((ratio - 1.395_612_425_086_089_5).abs() < 1e-9);
    }

    #[test]
    fn eigenvalue_envelope_by_gershgorin() {
        // All eigenvalues of A lie within (K+L)/sqrt(N) of 1: both
        // A - lb*I and ub*I - A must factor as positive definite.
        let mut rng = RngStream::new(43, 0).rng();
        let n = 8u32;
        for _ in 0..20 {
            let k = rng.random_range(1..=4usize);
            let l = rng.random_range(1..=4usize);
            let xs = index::sample(&mut rng, 1 << n, k).into_vec();
            let ys = index::sample(&mut rng, 1 << n, l).into_vec();
            let a: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
            let b: Vec<f64> = (0..l).map(|_| rng.sample(StandardNormal)).collect();
            let sys = build_covariance_system(n, &xs, &ys, &a, &b).unwrap();
            let dim = sys.dim();
            let radius = dim as f64 / 16.0; // (K+L)/sqrt(256)
            let shifted = |shift: f64, negate: bool| -> Vec<f64> {
                (0..dim * dim)
                    .map(|idx| {
                        let (i, j) = (idx / dim, idx % dim);
                        let base = if negate {
                            -sys.matrix_entry(i, j)
                        } else {
                            sys.matrix_entry(i, j)
                        };
                        base + if i == j { shift } else { 0.0 }
                    })
                    .collect()
            };
            let eps = 1e-9;
            let lb = shifted(-(1.0 - radius) + eps, false);
            assert!(cholesky_solve(dim, &lb, &vec![0.0; dim]).is_some());
            let ub = shifted(1.0 + radius + eps, true);
            assert!(cholesky_solve(dim, &ub, &vec![0.0; dim]).is_some());
        }
    }

    #[test]
    fn bound_check_behaves() {
        let check = ratio_bound_check(10, 2, 200, RngStream::new(44, 0)).unwrap();
        assert!(check.fitted_constant <= 4.0, "constant {}", check.fitted_constant);
        assert!(check.max_abs_deviation < 0.3);

        // Scaling: quadrupling N roughly halves the worst deviation.
        let coarse = ratio_bound_check(8, 2, 300, RngStream::new(44, 1)).unwrap();
        let fine = ratio_bound_check(12, 2, 300, RngStream::new(44, 2)).unwrap();
        assert!(
            fine.max_abs_deviation < coarse.max_abs_deviation,
            "{} vs {}",
            fine.max_abs_deviation,
            coarse.max_abs_deviation
        );
        assert!(ratio_bound_check(10, 0, 10, RngStream::new(44, 3)).is_err());
        assert!(ratio_bound_check(4, 3, 10, RngStream::new(44, 4)).is_err());
    }
}
