//! Finite representations of elements of `K(E ⊗ F)`: sums of Effros products
//! `u ⊙ v` and of rigged diamond products `a·(u ◇ v)·b`, together with the
//! merges that collapse a sum into a single term.

use serde::{Deserialize, Serialize};

use super::pair::{check_riggers, rigged_apply, TensorPair};
use crate::error::{mismatch, Error, Result};
use crate::matrix_core::{
    diamond_rect, diamond_square_factor, make_corner_isometries, CMatrix, DiamondContext,
};
use crate::quantum_space::{corner_embed, transport, AmplifiedElement};

/// Relative tolerance for a representation to count as reconstructing its
/// target.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

/// `u ⊙ v` with `u ∈ K_m(E)`, `v ∈ K_m(F)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffrosTerm {
    pub u: AmplifiedElement,
    pub v: AmplifiedElement,
}

impl EffrosTerm {
    pub fn new(u: AmplifiedElement, v: AmplifiedElement) -> Result<Self> {
        if u.level() != v.level() {
            return Err(mismatch("effros term", u.level(), v.level()));
        }
        Ok(EffrosTerm { u, v })
    }

    pub fn level(&self) -> usize {
        self.u.level()
    }

    /// `‖u‖·‖v‖`.
    pub fn bound(&self) -> f64 {
        self.u.norm() * self.v.norm()
    }

    fn coeffs(&self, pair: &TensorPair) -> Vec<CMatrix> {
        pair.effros_coeffs(self.u.coeffs(), self.v.coeffs())
    }

    fn embed(&self, level: usize) -> Result<Self> {
        Ok(EffrosTerm { u: corner_embed(&self.u, level)?, v: corner_embed(&self.v, level)? })
    }
}

/// `a·(u ◇ v)·b` with `u ∈ K_m(E)`, `v ∈ K_m(F)`, `a: M×m²`, `b: m²×M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiggedTerm {
    pub a: CMatrix,
    pub u: AmplifiedElement,
    pub v: AmplifiedElement,
    pub b: CMatrix,
}

impl RiggedTerm {
    pub fn new(a: CMatrix, u: AmplifiedElement, v: AmplifiedElement, b: CMatrix) -> Result<Self> {
        if u.level() != v.level() {
            return Err(mismatch("rigged term", u.level(), v.level()));
        }
        check_riggers(&a, &b, u.level())?;
        Ok(RiggedTerm { a, u, v, b })
    }

    /// The output level `M`.
    pub fn level(&self) -> usize {
        self.a.rows()
    }

    /// The level `m` of the diamond factors.
    pub fn inner_level(&self) -> usize {
        self.u.level()
    }

    /// `‖a‖·‖u‖·‖v‖·‖b‖`.
    pub fn bound(&self) -> f64 {
        self.a.op_norm() * self.u.norm() * self.v.norm() * self.b.op_norm()
    }

    fn coeffs(&self, pair: &TensorPair) -> Vec<CMatrix> {
        pair.rigged_coeffs(&self.a, self.u.coeffs(), self.v.coeffs(), &self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "terms", rename_all = "snake_case")]
pub enum TensorRepresentation {
    EffrosList(Vec<EffrosTerm>),
    SingleEffros(EffrosTerm),
    RiggedList(Vec<RiggedTerm>),
    SingleRigged(RiggedTerm),
}

impl TensorRepresentation {
    pub fn is_rigged(&self) -> bool {
        matches!(self, Self::RiggedList(_) | Self::SingleRigged(_))
    }

    pub fn effros_terms(&self) -> &[EffrosTerm] {
        match self {
            Self::EffrosList(t) => t,
            Self::SingleEffros(t) => std::slice::from_ref(t),
            _ => &[],
        }
    }

    pub fn rigged_terms(&self) -> &[RiggedTerm] {
        match self {
            Self::RiggedList(t) => t,
            Self::SingleRigged(t) => std::slice::from_ref(t),
            _ => &[],
        }
    }

    pub fn len(&self) -> usize {
        self.effros_terms().len() + self.rigged_terms().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Output level shared by all terms.
    pub fn level(&self) -> Result<usize> {
        let levels: Vec<usize> = self
            .effros_terms()
            .iter()
            .map(EffrosTerm::level)
            .chain(self.rigged_terms().iter().map(RiggedTerm::level))
            .collect();
        let first = *levels.first().ok_or_else(|| Error::NoRepresentation("empty term list".into()))?;
        match levels.iter().find(|&&l| l != first) {
            Some(&l) => Err(mismatch("representation level", first, l)),
            None => Ok(first),
        }
    }

    /// `Σ ‖u_k‖‖v_k‖` or `Σ ‖a_k‖‖u_k‖‖v_k‖‖b_k‖`.
    pub fn bound(&self) -> f64 {
        let e: f64 = self.effros_terms().iter().map(EffrosTerm::bound).sum();
        let r: f64 = self.rigged_terms().iter().map(RiggedTerm::bound).sum();
        e + r
    }

    /// The element of `K_M(E ⊗ F)` this representation sums to.
    pub fn assemble(&self, pair: &TensorPair) -> Result<AmplifiedElement> {
        let level = self.level()?;
        for t in self.effros_terms() {
            check_spaces(pair, &t.u, &t.v)?;
        }
        for t in self.rigged_terms() {
            check_spaces(pair, &t.u, &t.v)?;
        }
        let mut coeffs = vec![CMatrix::zeros(level, level); pair.product().dim()];
        let parts = self
            .effros_terms()
            .iter()
            .map(|t| t.coeffs(pair))
            .chain(self.rigged_terms().iter().map(|t| t.coeffs(pair)));
        for part in parts {
            for (c, p) in coeffs.iter_mut().zip(&part) {
                *c += p;
            }
        }
        AmplifiedElement::new(pair.product().clone(), level, coeffs)
    }

    /// Largest coefficient deviation between the assembly and the target
    /// corner-embedded at the representation's level, relative to the
    /// largest target coefficient.
    pub fn reconstruction_error(&self, pair: &TensorPair, target: &AmplifiedElement) -> Result<f64> {
        let got = self.assemble(pair)?;
        let want = corner_embed(target, got.level())?;
        let scale = target.coeffs().iter().map(CMatrix::max_abs).fold(0.0, f64::max);
        let dev = got.max_abs_diff(&want);
        Ok(if scale > 0.0 { dev / scale } else { dev })
    }

    pub fn reconstructs(&self, pair: &TensorPair, target: &AmplifiedElement) -> bool {
        matches!(self.reconstruction_error(pair, target), Ok(e) if e <= RECONSTRUCTION_TOL)
    }

    /// Representation of `x·U·y` for `x: r×M`, `y: M×r`.
    pub fn transport(&self, x: &CMatrix, y: &CMatrix) -> Result<Self> {
        let level = self.level()?;
        if x.cols() != level || y.rows() != level || x.rows() != y.cols() {
            return Err(mismatch("representation transport", level, x.cols()));
        }
        let eff = |t: &EffrosTerm| -> Result<EffrosTerm> {
            let id = CMatrix::identity(level);
            let r = x.rows();
            // `x·u` and `v·y` as square elements padded to `max(r, M)`.
            let n = r.max(level);
            let px = x.pad_to(n, level)?;
            let py = y.pad_to(level, n)?;
            let pid_l = id.pad_to(level, n)?;
            let pid_r = id.pad_to(n, level)?;
            EffrosTerm::new(transport(&px, &t.u, &pid_l)?, transport(&pid_r, &t.v, &py)?)
        };
        Ok(match self {
            Self::EffrosList(t) => Self::EffrosList(t.iter().map(eff).collect::<Result<_>>()?),
            Self::SingleEffros(t) => Self::SingleEffros(eff(t)?),
            Self::RiggedList(t) => Self::RiggedList(
                t.iter()
                    .map(|t| RiggedTerm::new(x * &t.a, t.u.clone(), t.v.clone(), &t.b * y))
                    .collect::<Result<_>>()?,
            ),
            Self::SingleRigged(t) => {
                Self::SingleRigged(RiggedTerm::new(x * &t.a, t.u.clone(), t.v.clone(), &t.b * y)?)
            }
        })
    }
}

fn check_spaces(pair: &TensorPair, u: &AmplifiedElement, v: &AmplifiedElement) -> Result<()> {
    if **u.space() != **pair.e() || **v.space() != **pair.f() {
        return Err(Error::Precondition("representation factors are not in E and F".into()));
    }
    Ok(())
}

/// Rescales each term so that `‖u_k‖ = ‖v_k‖ = (‖u_k‖‖v_k‖)^{1/2}` and drops
/// terms with a zero factor.
pub fn balance_effros(terms: &[EffrosTerm]) -> Vec<EffrosTerm> {
    terms
        .iter()
        .filter_map(|t| {
            let (nu, nv) = (t.u.norm(), t.v.norm());
            if nu == 0.0 || nv == 0.0 {
                return None;
            }
            let s = (nv / nu).sqrt();
            Some(EffrosTerm { u: t.u.scale_real(s), v: t.v.scale_real(1.0 / s) })
        })
        .collect()
}

/// Collapses `Σ_k u_k ⊙ v_k` (common level `m`, `n` terms) into one product
/// at level `n·m` whose value is the sum corner-embedded.
///
/// After balancing, `u = Σ S_1 u_k S_k*` and `v = Σ S_k v_k S_1*` with the
/// corner isometries `S_k`, so `‖u‖ = ‖Σ u_k u_k*‖^{1/2}`,
/// `‖v‖ = ‖Σ v_k* v_k‖^{1/2}` and `‖u‖‖v‖ ≤ Σ ‖u_k‖‖v_k‖`.
pub fn merge_effros(terms: &[EffrosTerm]) -> Result<EffrosTerm> {
    let first = terms.first().ok_or_else(|| Error::NoRepresentation("no terms to merge".into()))?;
    let m = first.level();
    if let Some(t) = terms.iter().find(|t| t.level() != m) {
        return Err(mismatch("merge_effros", m, t.level()));
    }
    let balanced = balance_effros(terms);
    let n = balanced.len().max(1);
    let s = make_corner_isometries(n, m);
    let mut u = AmplifiedElement::zero(first.u.space().clone(), n * m)?;
    let mut v = AmplifiedElement::zero(first.v.space().clone(), n * m)?;
    for (k, t) in balanced.iter().enumerate() {
        u = u.try_add(&transport(&s[0], &t.u, &s[k].adjoint())?)?;
        v = v.try_add(&transport(&s[k], &t.v, &s[0].adjoint())?)?;
    }
    EffrosTerm::new(u, v)
}

/// Rescales each term to `‖u_k‖ = ‖v_k‖ = 1` and
/// `‖a_k‖ = ‖b_k‖ = (‖a_k‖‖u_k‖‖v_k‖‖b_k‖)^{1/2}`, dropping zero terms.
pub fn normalize_rigged(terms: &[RiggedTerm]) -> Vec<RiggedTerm> {
    terms
        .iter()
        .filter_map(|t| {
            let (na, nu, nv, nb) = (t.a.op_norm(), t.u.norm(), t.v.norm(), t.b.op_norm());
            let total = na * nu * nv * nb;
            if total == 0.0 {
                return None;
            }
            let target = total.sqrt();
            Some(RiggedTerm {
                a: t.a.scale_real(target / na),
                u: t.u.scale_real(1.0 / nu),
                v: t.v.scale_real(1.0 / nv),
                b: t.b.scale_real(target / nb),
            })
        })
        .collect()
}

/// Collapses `Σ_k a_k(u_k ◇ v_k)b_k` (common inner level `m` and output
/// level `M`, `n` terms) into one rigged term with inner level `n·m`.
///
/// After normalizing, `a = Σ a_k(S_k* ◇ S_k*)`, `u = Σ S_k u_k S_k*`,
/// `v = Σ S_k v_k S_k*`, `b = Σ (S_k ◇ S_k)b_k`, so the bound is at most
/// `‖Σ a_k a_k*‖^{1/2}·‖Σ b_k* b_k‖^{1/2} ≤ Σ ‖a_k‖‖u_k‖‖v_k‖‖b_k‖`.
pub fn merge_rigged(terms: &[RiggedTerm]) -> Result<RiggedTerm> {
    let first = terms.first().ok_or_else(|| Error::NoRepresentation("no terms to merge".into()))?;
    let (m, big) = (first.inner_level(), first.level());
    if let Some(t) = terms.iter().find(|t| t.inner_level() != m || t.level() != big) {
        return Err(mismatch(
            "merge_rigged",
            format!("output {big}, inner {m}"),
            format!("output {}, inner {}", t.level(), t.inner_level()),
        ));
    }
    let normal = normalize_rigged(terms);
    let n = normal.len().max(1);
    let nm = n * m;
    let s = make_corner_isometries(n, m);
    let mut a = CMatrix::zeros(big, nm * nm);
    let mut b = CMatrix::zeros(nm * nm, big);
    let mut u = AmplifiedElement::zero(first.u.space().clone(), nm)?;
    let mut v = AmplifiedElement::zero(first.v.space().clone(), nm)?;
    for (k, t) in normal.iter().enumerate() {
        let sk_adj = s[k].adjoint();
        a += &(&t.a * &diamond_rect(&sk_adj, &sk_adj));
        b += &(&diamond_rect(&s[k], &s[k]) * &t.b);
        u = u.try_add(&transport(&s[k], &t.u, &sk_adj)?)?;
        v = v.try_add(&transport(&s[k], &t.v, &sk_adj)?)?;
    }
    RiggedTerm::new(a, u, v, b)
}

/// Effros product equal to `a·(u ◇ v)·b` corner-embedded at level
/// `max(M, m²)`: `(a·(u ◇ I))⊙((I ◇ v)·b)`, with norm product at most the
/// rigged bound.
pub fn rigged_to_effros(t: &RiggedTerm) -> Result<EffrosTerm> {
    let (big, m) = (t.level(), t.inner_level());
    let n = big.max(m * m);
    let id = CMatrix::identity(m);
    let left = t
        .u
        .coeffs()
        .iter()
        .map(|x| (&t.a * &diamond_rect(x, &id)).pad_to(n, n))
        .collect::<Result<Vec<_>>>()?;
    let right = t
        .v
        .coeffs()
        .iter()
        .map(|y| (&diamond_rect(&id, y) * &t.b).pad_to(n, n))
        .collect::<Result<Vec<_>>>()?;
    EffrosTerm::new(
        AmplifiedElement::new(t.u.space().clone(), n, left)?,
        AmplifiedElement::new(t.v.space().clone(), n, right)?,
    )
}

/// `u ⊙ v = Σ_k A_k(u ◇ v)B_k` with `A_k = I ◇ e_kᵀ` and `B_k = e_k ◇ I`.
pub fn effros_to_rigged(t: &EffrosTerm) -> Result<Vec<RiggedTerm>> {
    let m = t.level();
    let id = CMatrix::identity(m);
    (0..m)
        .map(|k| {
            let ek = CMatrix::basis_column(m, k);
            RiggedTerm::new(
                diamond_rect(&id, &ek.transpose()),
                t.u.clone(),
                t.v.clone(),
                diamond_rect(&ek, &id),
            )
        })
        .collect()
}

/// `U = Σ_i (I·x_i) ⊙ (Σ_j C_ij·y_j)`, one term per basis element of `E`.
pub fn elementary_representation(pair: &TensorPair, target: &AmplifiedElement) -> Result<TensorRepresentation> {
    check_target(pair, target)?;
    let m = target.level();
    let nf = pair.f().dim();
    let mut terms = Vec::new();
    for i in 0..pair.e().dim() {
        let row = &target.coeffs()[i * nf..(i + 1) * nf];
        if row.iter().all(CMatrix::is_zero) {
            continue;
        }
        let u = AmplifiedElement::elementary(pair.e().clone(), CMatrix::identity(m), i)?;
        let v = AmplifiedElement::new(pair.f().clone(), m, row.to_vec())?;
        terms.push(EffrosTerm::new(u, v)?);
    }
    if terms.is_empty() {
        let u = AmplifiedElement::zero(pair.e().clone(), m)?;
        let v = AmplifiedElement::zero(pair.f().clone(), m)?;
        terms.push(EffrosTerm::new(u, v)?);
    }
    Ok(TensorRepresentation::EffrosList(terms))
}

/// Rigged terms obtained by factoring every coefficient of `U`.
///
/// Each `C_ij`, padded to `M_{m²}` with `m = ⌈√M⌉`, is written as
/// `b(c ◇ c)b′`, giving the term `(J·b)((c·x_i) ◇ (c·y_j))(b′·J*)` where `J`
/// cuts back to the top-left `M×M` corner.
pub fn factorized_rigged_representation(
    pair: &TensorPair,
    target: &AmplifiedElement,
) -> Result<TensorRepresentation> {
    check_target(pair, target)?;
    let big = target.level();
    let m = (1..).find(|&m| m * m >= big).expect("some square exceeds the level");
    let ctx = DiamondContext::new(m)?;
    let nf = pair.f().dim();
    let mut terms = Vec::new();
    for (idx, c) in target.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let fac = diamond_square_factor(&c.pad_to(m * m, m * m)?, &ctx)?;
        let a = CMatrix::from_fn(big, m * m, |r, s| fac.b[(r, s)]);
        let b = CMatrix::from_fn(m * m, big, |r, s| fac.b_prime[(r, s)]);
        let u = AmplifiedElement::elementary(pair.e().clone(), fac.c.clone(), idx / nf)?;
        let v = AmplifiedElement::elementary(pair.f().clone(), fac.c.clone(), idx % nf)?;
        terms.push(RiggedTerm::new(a, u, v, b)?);
    }
    if terms.is_empty() {
        let u = AmplifiedElement::zero(pair.e().clone(), m)?;
        let v = AmplifiedElement::zero(pair.f().clone(), m)?;
        terms.push(RiggedTerm::new(CMatrix::zeros(big, m * m), u, v, CMatrix::zeros(m * m, big))?);
    }
    Ok(TensorRepresentation::RiggedList(terms))
}

fn check_target(pair: &TensorPair, target: &AmplifiedElement) -> Result<()> {
    if **target.space() != **pair.product() {
        return Err(Error::Precondition("element is not in E ⊗ F".into()));
    }
    Ok(())
}

/// Reduces any representation to Effros terms sharing one level: rigged
/// terms are converted and everything is corner-embedded at the largest
/// level.
pub fn as_effros_terms(rep: &TensorRepresentation) -> Result<Vec<EffrosTerm>> {
    let mut terms: Vec<EffrosTerm> = rep.effros_terms().to_vec();
    for t in rep.rigged_terms() {
        terms.push(rigged_to_effros(t)?);
    }
    let level = terms.iter().map(EffrosTerm::level).max().unwrap_or(0);
    terms.iter().map(|t| t.embed(level)).collect()
}

/// Reduces any representation to rigged terms sharing inner and output
/// levels.
pub fn as_rigged_terms(rep: &TensorRepresentation) -> Result<Vec<RiggedTerm>> {
    let mut terms: Vec<RiggedTerm> = rep.rigged_terms().to_vec();
    for t in rep.effros_terms() {
        terms.extend(effros_to_rigged(t)?);
    }
    let big = terms.iter().map(RiggedTerm::level).max().unwrap_or(0);
    let m = terms.iter().map(RiggedTerm::inner_level).max().unwrap_or(0);
    terms.iter().map(|t| embed_rigged(t, big, m)).collect()
}

/// Same value corner-embedded at output level `big`, with factors moved to
/// inner level `m`.
fn embed_rigged(t: &RiggedTerm, big: usize, m: usize) -> Result<RiggedTerm> {
    let m0 = t.inner_level();
    if big < t.level() || m < m0 {
        return Err(Error::LevelTooSmall { op: "embed_rigged", required: t.level().max(m0), found: big.min(m) });
    }
    if big == t.level() && m == m0 {
        return Ok(t.clone());
    }
    // `J: C^{m0} → C^m` with `J*xJ` recovering the corner; then
    // `x ◇ y = (J* ◇ J*)(JxJ* ◇ JyJ*)(J ◇ J)`.
    let j = CMatrix::identity(m0).pad_to(m, m0)?;
    let jj = diamond_rect(&j, &j);
    let a = (&t.a * &jj.adjoint()).pad_to(big, m * m)?;
    let b = (&jj * &t.b).pad_to(m * m, big)?;
    let u = transport(&j, &t.u, &j.adjoint())?;
    let v = transport(&j, &t.v, &j.adjoint())?;
    RiggedTerm::new(a, u, v, b)
}

/// `a·(u ◇ v)·b` for a single coefficient pair, exposed for identity checks.
pub fn rigged_value(t: &RiggedTerm, i: usize, j: usize) -> CMatrix {
    rigged_apply(&t.a, &t.u.coeffs()[i], &t.v.coeffs()[j], &t.b)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::quantum_space::OperatorSpace;
    use crate::random::{gaussian_matrix, seeded_rng, Rng64};

    fn pair(rng: &mut Rng64) -> TensorPair {
        let e = Arc::new(OperatorSpace::random_generic(rng, 2, 2, 2).unwrap());
        let f = Arc::new(OperatorSpace::random_generic(rng, 3, 1, 3).unwrap());
        TensorPair::new(e, f).unwrap()
    }

    fn effros_terms(rng: &mut Rng64, p: &TensorPair, n: usize, m: usize) -> Vec<EffrosTerm> {
        (0..n)
            .map(|_| {
                EffrosTerm::new(
                    AmplifiedElement::random(rng, p.e().clone(), m).unwrap(),
                    AmplifiedElement::random(rng, p.f().clone(), m).unwrap(),
                )
                .unwrap()
            })
            .collect()
    }

    fn rigged_terms(rng: &mut Rng64, p: &TensorPair, n: usize, big: usize, m: usize) -> Vec<RiggedTerm> {
        (0..n)
            .map(|_| {
                RiggedTerm::new(
                    gaussian_matrix(rng, big, m * m),
                    AmplifiedElement::random(rng, p.e().clone(), m).unwrap(),
                    AmplifiedElement::random(rng, p.f().clone(), m).unwrap(),
                    gaussian_matrix(rng, m * m, big),
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn effros_merge_reconstructs_and_bounds() {
        let mut rng = seeded_rng(1);
        let p = pair(&mut rng);
        let terms = effros_terms(&mut rng, &p, 3, 2);
        let list = TensorRepresentation::EffrosList(terms.clone());
        let target = list.assemble(&p).unwrap();
        let merged = merge_effros(&terms).unwrap();
        assert_eq!(merged.level(), 6);
        let single = TensorRepresentation::SingleEffros(merged.clone());
        assert!(single.reconstruction_error(&p, &target).unwrap() <= 1e-12);
        assert!(merged.bound() <= list.bound() * (1.0 + 1e-12));
        let uu = terms.iter().fold(CMatrix::zeros(4, 4), |acc, t| {
            let a = t.u.assembled();
            &acc + &(&a * &a.adjoint())
        });
        let balanced = balance_effros(&terms);
        let uu_bal = balanced.iter().fold(CMatrix::zeros(4, 4), |acc, t| {
            let a = t.u.assembled();
            &acc + &(&a * &a.adjoint())
        });
        assert!((merged.u.norm() - uu_bal.op_norm().sqrt()).abs() <= 1e-10);
        assert!(uu.op_norm() > 0.0);
    }

    #[test]
    fn rigged_merge_reconstructs_and_bounds() {
        let mut rng = seeded_rng(2);
        let p = pair(&mut rng);
        let terms = rigged_terms(&mut rng, &p, 3, 3, 2);
        let list = TensorRepresentation::RiggedList(terms.clone());
        let target = list.assemble(&p).unwrap();
        let merged = merge_rigged(&terms).unwrap();
        assert_eq!((merged.level(), merged.inner_level()), (3, 6));
        let single = TensorRepresentation::SingleRigged(merged.clone());
        assert!(single.reconstruction_error(&p, &target).unwrap() <= 1e-12);
        assert!(merged.bound() <= list.bound() * (1.0 + 1e-12));
        assert!((merged.u.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn conversions_preserve_value() {
        let mut rng = seeded_rng(3);
        let p = pair(&mut rng);
        let r = rigged_terms(&mut rng, &p, 1, 3, 2).remove(0);
        let target = TensorRepresentation::SingleRigged(r.clone()).assemble(&p).unwrap();
        let e = rigged_to_effros(&r).unwrap();
        assert_eq!(e.level(), 4);
        assert!(e.bound() <= r.bound() * (1.0 + 1e-12));
        let rep = TensorRepresentation::SingleEffros(e.clone());
        assert!(rep.reconstruction_error(&p, &target).unwrap() <= 1e-12);
        let back = TensorRepresentation::RiggedList(effros_to_rigged(&e).unwrap());
        assert!(back.reconstruction_error(&p, &target).unwrap() <= 1e-12);
    }

    #[test]
    fn elementary_and_factorized_representations() {
        let mut rng = seeded_rng(4);
        let p = pair(&mut rng);
        for level in [1, 2, 3] {
            let target = AmplifiedElement::random(&mut rng, p.product().clone(), level).unwrap();
            let el = elementary_representation(&p, &target).unwrap();
            assert!(el.reconstruction_error(&p, &target).unwrap() <= 1e-12);
            let fac = factorized_rigged_representation(&p, &target).unwrap();
            assert!(fac.reconstruction_error(&p, &target).unwrap() <= 1e-10, "level {level}");
            let merged = merge_rigged(fac.rigged_terms()).unwrap();
            assert!(TensorRepresentation::SingleRigged(merged).reconstructs(&p, &target));
        }
    }

    #[test]
    fn mixed_reductions() {
        let mut rng = seeded_rng(5);
        let p = pair(&mut rng);
        let r = rigged_terms(&mut rng, &p, 1, 2, 2).remove(0);
        let e = effros_terms(&mut rng, &p, 1, 2).remove(0);
        let target = TensorRepresentation::SingleRigged(r.clone())
            .assemble(&p)
            .unwrap()
            .try_add(&TensorRepresentation::SingleEffros(e.clone()).assemble(&p).unwrap())
            .unwrap();
        let mixed_e = as_effros_terms(&TensorRepresentation::SingleRigged(r.clone())).unwrap();
        let mut all = mixed_e;
        all.push(e.embed(4).unwrap());
        let rep = TensorRepresentation::EffrosList(all);
        assert!(rep.reconstruction_error(&p, &target).unwrap() <= 1e-12);
        let rigged = as_rigged_terms(&TensorRepresentation::SingleEffros(e)).unwrap();
        let mut all = rigged;
        all.push(r);
        let all: Vec<RiggedTerm> = all.iter().map(|t| embed_rigged(t, 2, 3).unwrap()).collect();
        let rep = TensorRepresentation::RiggedList(all);
        assert!(rep.reconstruction_error(&p, &target).unwrap() <= 1e-12);
    }

    #[test]
    fn transport_moves_the_value() {
        let mut rng = seeded_rng(6);
        let p = pair(&mut rng);
        let x = gaussian_matrix(&mut rng, 3, 2);
        let y = gaussian_matrix(&mut rng, 2, 3);
        for rep in [
            TensorRepresentation::EffrosList(effros_terms(&mut rng, &p, 2, 2)),
            TensorRepresentation::RiggedList(rigged_terms(&mut rng, &p, 2, 2, 2)),
        ] {
            let target = transport(&x, &rep.assemble(&p).unwrap(), &y).unwrap();
            let moved = rep.transport(&x, &y).unwrap();
            assert!(moved.reconstruction_error(&p, &target).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn json_uses_kind_and_terms() {
        let mut rng = seeded_rng(7);
        let p = pair(&mut rng);
        let rep = TensorRepresentation::SingleEffros(effros_terms(&mut rng, &p, 1, 1).remove(0));
        let v = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["kind"], "single_effros");
        assert!(v["terms"].get("u").is_some());
        let back: TensorRepresentation = serde_json::from_value(v).unwrap();
        assert_eq!(back, rep);
    }
}
