//! Finite-level Verma-module linear algebra: partition bases, the Virasoro
//! action via [L_m, L_n] = (m−n)L_{m+n} + (c/12)·m(m²−1)·δ_{m+n,0}, Gram
//! matrices, and the level-2 null-vector check (−2L₋₂ + (κ/2)L₋₁²)|h₁,₂⟩ = 0.
//!
//! Everything is generic over a scalar so the same pairing engine runs in
//! f64 and in exact rational arithmetic (Gram determinants are polynomial
//! identities, and exactness is cheap at level ≤ 4).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::cft;
use crate::error::{Error, Result};
use crate::math;

pub type BigRational = Ratio<BigInt>;

/// Scalar field for the Verma-module computations.
pub trait Scalar:
    Clone
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// Approximate magnitude, for tolerance reporting only.
    fn abs_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs_f64(&self) -> f64 {
        math::abs(*self)
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        <BigRational as num_traits::Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as num_traits::One>::one()
    }
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }
    fn is_zero(&self) -> bool {
        <BigRational as num_traits::Zero>::is_zero(self)
    }
    fn abs_f64(&self) -> f64 {
        self.to_f64().map(math::abs).unwrap_or(f64::INFINITY)
    }
}

/// A basis monomial L_{−λ₁}L_{−λ₂}…|h⟩, stored as the partition
/// λ₁ ≥ λ₂ ≥ … (empty = |h⟩ itself).
pub type Mono = Vec<u32>;

type State<S> = BTreeMap<Mono, S>;

/// Maximum Verma level handled (desk scale: p(4) = 5 basis states).
pub const MAX_LEVEL: u32 = 4;

/// Partitions of `level` in reverse-lexicographic order:
/// [n] first, [1,…,1] last. This ordering is fixed so every emitted matrix
/// is reproducible; the level-2 basis reads {L₋₂|h⟩, L₋₁²|h⟩}.
pub fn partitions(level: u32) -> Vec<Mono> {
    fn rec(n: u32, max: u32, prefix: &mut Mono, out: &mut Vec<Mono>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        let mut k = n.min(max);
        while k >= 1 {
            prefix.push(k);
            rec(n - k, k, prefix, out);
            prefix.pop();
            k -= 1;
        }
    }
    let mut out = Vec::new();
    rec(level, level.max(1), &mut Vec::new(), &mut out);
    out
}

fn add_term<S: Scalar>(state: &mut State<S>, mono: Mono, coeff: S) {
    if coeff.is_zero() {
        return;
    }
    match state.remove(&mono) {
        Some(old) => {
            let sum = old + coeff;
            if !sum.is_zero() {
                state.insert(mono, sum);
            }
        }
        None => {
            state.insert(mono, coeff);
        }
    }
}

fn mono_level(mono: &[u32]) -> i64 {
    mono.iter().map(|&p| p as i64).sum()
}

/// L_{−mu} applied to a basis monomial, normal-ordered: commute the new
/// lowering operator rightward past smaller parts using
/// [L_{−a}, L_{−b}] = (b−a)·L_{−(a+b)}.
fn lower<S: Scalar>(mu: u32, mono: &[u32], coeff: S, out: &mut State<S>) {
    if mono.is_empty() || mu >= mono[0] {
        let mut m = Vec::with_capacity(mono.len() + 1);
        m.push(mu);
        m.extend_from_slice(mono);
        add_term(out, m, coeff);
        return;
    }
    let head = mono[0];
    let rest = &mono[1..];
    // L_{−mu} L_{−head} = L_{−head} L_{−mu} + (head − mu)·L_{−(head+mu)}
    let mut inner: State<S> = BTreeMap::new();
    lower(mu, rest, coeff.clone(), &mut inner);
    for (m, c) in inner {
        lower(head, &m, c, out);
    }
    let factor = S::from_int(head as i64 - mu as i64);
    let mut merged: State<S> = BTreeMap::new();
    lower(head + mu, rest, coeff * factor, &mut merged);
    for (m, c) in merged {
        add_term(out, m, c);
    }
}

/// L_m (m ≥ 1) applied to a basis monomial:
/// L_m L_{−λ} = L_{−λ} L_m + (m+λ)·L_{m−λ} + (c/12)·m(m²−1)·δ_{m,λ}.
fn raise<S: Scalar>(m: u32, mono: &[u32], coeff: S, c: &S, h: &S, out: &mut State<S>) {
    if mono.is_empty() {
        return; // L_m |h⟩ = 0 for m ≥ 1
    }
    let lam = mono[0];
    let rest = &mono[1..];
    // commutator part: (m+λ)·L_{m−λ} acting on the tail
    let k = m as i64 - lam as i64;
    let factor = S::from_int(m as i64 + lam as i64);
    apply_mode(k, rest, coeff.clone() * factor, c, h, out);
    // central part
    if m == lam {
        let central = c.clone() * S::from_int((m as i64) * ((m as i64) * (m as i64) - 1))
            / S::from_int(12);
        add_term(out, rest.to_vec(), coeff.clone() * central);
    }
    // pass-through part: L_{−λ}·(L_m tail)
    let mut inner: State<S> = BTreeMap::new();
    raise(m, rest, coeff, c, h, &mut inner);
    for (mn, cf) in inner {
        lower(lam, &mn, cf, out);
    }
}

/// Dispatch L_k·monomial for any mode index k (negative = lowering,
/// zero = L₀ eigenvalue h + level, positive = raising).
fn apply_mode<S: Scalar>(k: i64, mono: &[u32], coeff: S, c: &S, h: &S, out: &mut State<S>) {
    use core::cmp::Ordering;
    match k.cmp(&0) {
        Ordering::Less => lower((-k) as u32, mono, coeff, out),
        Ordering::Equal => {
            let eig = h.clone() + S::from_int(mono_level(mono));
            add_term(out, mono.to_vec(), coeff * eig);
        }
        Ordering::Greater => raise(k as u32, mono, coeff, c, h, out),
    }
}

/// ⟨L_{−a}|h⟩, L_{−b}|h⟩⟩: apply the adjoint raisings L_{a₁}, L_{a₂}, … to
/// the right monomial and read off the |h⟩ coefficient.
fn pairing<S: Scalar>(a: &Mono, b: &Mono, c: &S, h: &S) -> S {
    let mut state: State<S> = BTreeMap::new();
    state.insert(b.clone(), S::one());
    for &m in a {
        let mut next: State<S> = BTreeMap::new();
        for (mono, coeff) in &state {
            raise(m, mono, coeff.clone(), c, h, &mut next);
        }
        state = next;
    }
    state.remove(&Vec::new()).unwrap_or_else(S::zero)
}

/// Gram matrix of the partition basis at the given level (≤ 4).
pub fn gram_matrix<S: Scalar>(c: &S, h: &S, level: u32) -> Result<Vec<Vec<S>>> {
    if level > MAX_LEVEL {
        return Err(Error::Domain("gram_matrix: level exceeds the supported bound 4"));
    }
    let basis = partitions(level);
    let n = basis.len();
    let mut g = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = pairing(&basis[i], &basis[j], c, h);
            g[i][j] = v.clone();
            if i != j {
                g[j][i] = v;
            }
        }
    }
    Ok(g)
}

/// Verma-module level data: central charge, highest weight, basis, Gram.
#[derive(Debug, Clone, PartialEq)]
pub struct VermaLevel<S> {
    pub c: S,
    pub h: S,
    pub level: u32,
    pub basis: Vec<Mono>,
    pub gram: Vec<Vec<S>>,
}

pub fn verma_level<S: Scalar>(c: S, h: S, level: u32) -> Result<VermaLevel<S>> {
    let gram = gram_matrix(&c, &h, level)?;
    Ok(VermaLevel { c, h, level, basis: partitions(level), gram })
}

/// Division-free determinant by cofactor expansion (bases here have at most
/// p(4) = 5 elements, so this stays exact for rational scalars).
pub fn determinant<S: Scalar>(m: &[Vec<S>]) -> S {
    let n = m.len();
    if n == 0 {
        return S::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = S::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<S>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter_map(|(k, v)| if k == j { None } else { Some(v.clone()) })
                    .collect()
            })
            .collect();
        let term = m[0][j].clone() * determinant(&minor);
        det = if j % 2 == 0 { det + term } else { det - term };
    }
    det
}

/// Result of the level-2 null-vector verification at (c(κ), h₁,₂(κ)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullVectorCheck {
    /// √(vᵀ G v) for v = (−2, κ/2) in the basis {L₋₂|h⟩, L₋₁²|h⟩}.
    pub residual: f64,
    pub det: f64,
    /// det relative to the Gram's max-entry scale (0 when the Gram itself
    /// vanishes identically, as at κ = 6 where c = h = 0).
    pub det_rel: f64,
    pub gram: [[f64; 2]; 2],
}

/// Level-2 null-vector check in floating point.
pub fn null_vector_residual(kappa: f64) -> Result<NullVectorCheck> {
    let c = cft::central_charge(kappa)?;
    let h = cft::kac_weight(1, 2, kappa)?;
    let g = gram_matrix(&c, &h, 2)?;
    let v = [-2.0, 0.5 * kappa];
    let mut q = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            q += v[i] * g[i][j] * v[j];
        }
    }
    let det = determinant(&g);
    let scale = g
        .iter()
        .flatten()
        .map(|x| math::abs(*x))
        .fold(0.0f64, f64::max);
    let det_rel = if scale > 0.0 { det / (scale * scale) } else { 0.0 };
    Ok(NullVectorCheck {
        residual: math::sqrt(math::abs(q)),
        det,
        det_rel,
        gram: [[g[0][0], g[0][1]], [g[1][0], g[1][1]]],
    })
}

/// Exact-arithmetic shadow of `null_vector_residual` for rational κ:
/// returns (vᵀ G v, det G), both of which must vanish identically.
pub fn null_vector_exact(kappa: &BigRational) -> Result<(BigRational, BigRational)> {
    if !num_traits::Signed::is_positive(kappa) {
        return Err(Error::Domain("null_vector_exact: kappa must be positive"));
    }
    let two = BigRational::from_int(2);
    let six = BigRational::from_int(6);
    let eight = BigRational::from_int(8);
    // c = (6−κ)(3κ−8)/(2κ), h₁,₂ = (6−κ)/(2κ)
    let c = (six.clone() - kappa.clone()) * (BigRational::from_int(3) * kappa.clone() - eight)
        / (two.clone() * kappa.clone());
    let h = (six - kappa.clone()) / (two.clone() * kappa.clone());
    let g = gram_matrix(&c, &h, 2)?;
    let v = [-two.clone(), kappa.clone() / two];
    let mut q = BigRational::zero();
    for i in 0..2 {
        for j in 0..2 {
            q = q + v[i].clone() * g[i][j].clone() * v[j].clone();
        }
    }
    Ok((q, determinant(&g)))
}

/// Kac weights h_{r,s}(κ) tabulated on the grid r ≤ r_max, s ≤ s_max
/// (row-major, 1-based labels; bounds capped at 6).
pub fn weight_table(kappa: f64, r_max: u32, s_max: u32) -> Result<Vec<Vec<f64>>> {
    if r_max == 0 || s_max == 0 || r_max > 6 || s_max > 6 {
        return Err(Error::Domain("weight_table: bounds must lie in 1..=6"));
    }
    let mut table = Vec::with_capacity(r_max as usize);
    for r in 1..=r_max {
        let mut row = Vec::with_capacity(s_max as usize);
        for s in 1..=s_max {
            row.push(cft::kac_weight(r, s, kappa)?);
        }
        table.push(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brat(n: i64, d: i64) -> BigRational {
        Ratio::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn partition_bases_are_reverse_lex() {
        assert_eq!(partitions(0), vec![Mono::new()]);
        assert_eq!(partitions(1), vec![vec![1]]);
        assert_eq!(partitions(2), vec![vec![2], vec![1, 1]]);
        assert_eq!(partitions(3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(
            partitions(4),
            vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]
        );
    }

    #[test]
    fn gram_level0_and_level1() {
        let g0 = gram_matrix(&1.3f64, &0.7, 0).unwrap();
        assert_eq!(g0, vec![vec![1.0]]);
        let g1 = gram_matrix(&1.3f64, &0.7, 1).unwrap();
        assert_eq!(g1, vec![vec![1.4]]); // ⟨L₁L₋₁⟩ = 2h
        let g1x = gram_matrix(&brat(13, 10), &brat(7, 10), 1).unwrap();
        assert_eq!(g1x[0][0], brat(7, 5));
    }

    #[test]
    fn gram_level2_matches_textbook_entries() {
        // [[4h + c/2, 6h], [6h, 8h² + 4h]] in the {L₋₂, L₋₁²} basis.
        let (c, h) = (3.7f64, 1.3f64);
        let g = gram_matrix(&c, &h, 2).unwrap();
        assert!((g[0][0] - (4.0 * h + 0.5 * c)).abs() < 1e-12);
        assert!((g[0][1] - 6.0 * h).abs() < 1e-12);
        assert!((g[1][0] - 6.0 * h).abs() < 1e-12);
        assert!((g[1][1] - (8.0 * h * h + 4.0 * h)).abs() < 1e-12);

        let (cx, hx) = (brat(37, 10), brat(13, 10));
        let gx = gram_matrix(&cx, &hx, 2).unwrap();
        assert_eq!(gx[0][0], brat(4, 1) * hx.clone() + cx / brat(2, 1));
        assert_eq!(gx[0][1], brat(6, 1) * hx.clone());
        assert_eq!(gx[1][1], brat(8, 1) * hx.clone() * hx.clone() + brat(4, 1) * hx);
    }

    #[test]
    fn gram_single_row_diagonal_oracle() {
        // ⟨L₋ₙ|h⟩, L₋ₙ|h⟩⟩ = 2nh + (c/12)·n(n²−1), read off levels 3 and 4.
        let (c, h) = (2.1f64, 0.9f64);
        let g3 = gram_matrix(&c, &h, 3).unwrap();
        assert!((g3[0][0] - (6.0 * h + 2.0 * c)).abs() < 1e-12);
        let g4 = gram_matrix(&c, &h, 4).unwrap();
        assert!((g4[0][0] - (8.0 * h + 5.0 * c)).abs() < 1e-12);
    }

    #[test]
    fn gram_is_symmetric_levels_3_and_4() {
        // The pairing algorithm is not manifestly symmetric, so this is a
        // real check of the commutator engine.
        let (c, h) = (brat(-13, 7), brat(22, 9));
        for level in [3u32, 4] {
            let g = gram_matrix(&c, &h, level).unwrap();
            for i in 0..g.len() {
                for j in 0..g.len() {
                    assert_eq!(g[i][j], g[j][i], "asymmetry at level {level} ({i},{j})");
                }
            }
        }
    }

    /// Kac determinant structure: det_N(h) = K_N(c)·Π_{rs ≤ N}(h − h_{r,s})^{p(N−rs)}
    /// with K_N independent of h. Evaluating the ratio at two different h
    /// values tests the whole pairing engine against the known factorization.
    #[test]
    fn kac_determinant_factorization_levels_3_and_4() {
        let kappa = 6.6;
        let c = cft::central_charge(kappa).unwrap();
        let kac = |r: u32, s: u32| cft::kac_weight(r, s, kappa).unwrap();
        let p = [1.0f64, 1.0, 2.0, 3.0]; // partition counts p(0..=3)
        for (level, pairs) in [
            (3u32, vec![(1u32, 1u32), (1, 2), (2, 1), (1, 3), (3, 1)]),
            (4, vec![(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (1, 4), (4, 1), (2, 2)]),
        ] {
            let prefactor = |h: f64| -> f64 {
                let det = determinant(&gram_matrix(&c, &h, level).unwrap());
                let mut product = 1.0;
                for &(r, s) in &pairs {
                    let mult = p[(level - r * s) as usize];
                    product *= math::powf(h - kac(r, s), mult);
                }
                det / product
            };
            let k1 = prefactor(1.7);
            let k2 = prefactor(2.9);
            assert!(
                (k1 - k2).abs() < 1e-8 * k1.abs(),
                "level {level}: K = {k1} vs {k2}"
            );
            assert!(k1.abs() > 1e-6, "level {level}: degenerate prefactor");
        }
    }

    #[test]
    fn null_vector_vanishes_at_kappa_6_and_4() {
        let r6 = null_vector_residual(6.0).unwrap();
        assert!(r6.residual < 1e-10, "{}", r6.residual);
        assert!(r6.det_rel.abs() < 1e-10);
        // κ=6 sits at c = h = 0: the whole level-2 Gram degenerates.
        assert!(r6.gram.iter().flatten().all(|&x| x.abs() < 1e-12));

        let r4 = null_vector_residual(4.0).unwrap();
        assert!(r4.residual < 1e-10, "{}", r4.residual);
        assert!(r4.det_rel.abs() < 1e-12);
        // nondegenerate Gram at κ=4 (c=1, h=1/4)
        assert!(r4.gram[0][0].abs() > 0.5);
    }

    #[test]
    fn null_vector_residual_is_homogeneous() {
        // Scaling the coefficient pair by λ scales √(vᵀGv) by |λ|.
        let kappa = 4.0;
        let c = cft::central_charge(kappa).unwrap();
        let h = cft::kac_weight(1, 2, kappa).unwrap();
        let g = gram_matrix(&c, &h, 2).unwrap();
        let q = |v: [f64; 2]| -> f64 {
            let mut acc = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    acc += v[i] * g[i][j] * v[j];
                }
            }
            math::sqrt(math::abs(acc))
        };
        let base = [0.7, -1.1];
        let scaled = [3.0 * 0.7, 3.0 * -1.1];
        assert!((q(scaled) - 3.0 * q(base)).abs() < 1e-10 * q(scaled).max(1.0));
    }

    #[test]
    fn generic_weight_keeps_determinant_away_from_zero() {
        // Fixed c(6) = 0, weight off the Kac zeros: det₂ = 2h(16h² − 10h)
        // at c=0; h=0.7 gives 1.176.
        let c = cft::central_charge(6.0).unwrap();
        let g = gram_matrix(&c, &0.7f64, 2).unwrap();
        let det = determinant(&g);
        assert!(det.abs() > 0.5, "det {det}");
    }

    #[test]
    fn exact_null_vector_for_rational_kappas() {
        for (n, d) in [(2i64, 1i64), (8, 3), (3, 1), (4, 1), (6, 1), (8, 1)] {
            let kappa = brat(n, d);
            let (q, det) = null_vector_exact(&kappa).unwrap();
            assert!(q.is_zero(), "residual form not exactly zero at kappa {n}/{d}");
            assert!(det.is_zero(), "det not exactly zero at kappa {n}/{d}");
        }
        assert!(null_vector_exact(&brat(-1, 1)).is_err());
    }

    #[test]
    fn level2_determinant_roots_at_kappa_2() {
        // c(2) = −2; det₂(h) vanishes at h₁,₂ = 1 and h₂,₁ = −1/8.
        let c = cft::central_charge(2.0).unwrap();
        assert!((c + 2.0).abs() < 1e-14);
        let det_at = |h: f64| determinant(&gram_matrix(&c, &h, 2).unwrap());
        let locate = |mut lo: f64, mut hi: f64| -> f64 {
            assert!(det_at(lo) * det_at(hi) < 0.0, "bracket [{lo},{hi}] does not straddle");
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if det_at(lo) * det_at(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let root1 = locate(0.8, 1.3);
        let root2 = locate(-0.3, -0.04);
        assert!((root1 - 1.0).abs() < 1e-8, "{root1}");
        assert!((root2 + 0.125).abs() < 1e-8, "{root2}");
        assert!((root1 - cft::kac_weight(1, 2, 2.0).unwrap()).abs() < 1e-8);
        assert!((root2 - cft::kac_weight(2, 1, 2.0).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn unitary_region_positive_definite() {
        // c > 25 with h > 0: levels ≤ 2 must be positive definite
        // (all leading principal minors positive).
        let (c, h) = (30.0f64, 2.0f64);
        let g1 = gram_matrix(&c, &h, 1).unwrap();
        assert!(g1[0][0] > 0.0);
        let g2 = gram_matrix(&c, &h, 2).unwrap();
        assert!(g2[0][0] > 0.0);
        assert!(determinant(&g2) > 0.0);
    }

    #[test]
    fn weight_table_matches_kac_weights() {
        let t = weight_table(4.0, 2, 2).unwrap();
        assert_eq!(t[0][0], 0.0); // h_{1,1}
        assert!((t[0][1] - 0.25).abs() < 1e-15); // h_{1,2}(4) = 1/4
        for r in 1..=2u32 {
            for s in 1..=2u32 {
                assert_eq!(t[(r - 1) as usize][(s - 1) as usize], cft::kac_weight(r, s, 4.0).unwrap());
            }
        }
        assert!(weight_table(4.0, 7, 2).is_err());
        assert!(weight_table(4.0, 0, 2).is_err());
    }

    #[test]
    fn level_cap_enforced() {
        assert!(gram_matrix(&1.0f64, &1.0, 5).is_err());
        assert!(verma_level(1.0f64, 1.0, 4).is_ok());
    }
}
