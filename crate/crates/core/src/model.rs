//! Lifts and factorizations in the categories of acyclic retractions and of
//! contractions, built on top of the cochain-level constructions.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::complex::{
    is_cofibration, is_fibration, is_quasi_iso, path_map, path_object, path_triple, pullback,
    pushout, sdr_as_path_map, split_path_triple, sum_map, ChainMap, GradedMap, Pullback, Pushout,
};
use crate::error::{Error, Result};
use crate::perturb::{trick2, trick3};
use crate::report::Report;
use crate::retract::{
    base_morphism, check_ar, check_ar_morphism, check_contr_morphism, check_contraction, trick1,
    AcyclicRetraction, ArMorphism, Contraction, ContrMorphism, Diagram, Morphism, Sdr,
};
use crate::semifree::{
    factor_coch_c_fw, factor_coch_cw_f, lift_linear, lift_semifree, lift_trivial_cofibration,
    Deformation, LiftingProblem, SemifreeExtension,
};

/// Which pair of classes a factorization produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Cofibration, then trivial fibration.
    CFw,
    /// Trivial cofibration, then fibration.
    CwF,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::CFw => "c-fw",
            Flavor::CwF => "cw-f",
        })
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c-fw" => Ok(Flavor::CFw),
            "cw-f" => Ok(Flavor::CwF),
            _ => Err(Error::parse("flavor", format!("expected c-fw or cw-f, got `{s}`"))),
        }
    }
}

/// What makes a cofibration liftable without solving a global system.
#[derive(Clone, Debug)]
pub enum CofibrationWitness {
    Cells(SemifreeExtension),
    Deformation(Deformation),
}

impl CofibrationWitness {
    pub fn to_json(&self) -> Value {
        match self {
            CofibrationWitness::Cells(ext) => ext.to_json(),
            CofibrationWitness::Deformation(d) => d.to_json(),
        }
    }

    pub fn map(&self) -> &ChainMap {
        match self {
            CofibrationWitness::Cells(e) => &e.f,
            CofibrationWitness::Deformation(d) => &d.i,
        }
    }

    fn transport(&self, u: &ChainMap, po: &Pushout) -> Result<CofibrationWitness> {
        Ok(match self {
            CofibrationWitness::Cells(e) => CofibrationWitness::Cells(e.transport(po)),
            CofibrationWitness::Deformation(d) => {
                CofibrationWitness::Deformation(d.transport(u, po)?)
            }
        })
    }

    fn then(&self, next: &CofibrationWitness) -> Result<CofibrationWitness> {
        Ok(match (self, next) {
            (CofibrationWitness::Cells(a), CofibrationWitness::Cells(b)) => {
                CofibrationWitness::Cells(a.then(b)?)
            }
            (CofibrationWitness::Deformation(a), CofibrationWitness::Deformation(b)) => {
                CofibrationWitness::Deformation(a.then(b)?)
            }
            _ => return Err(Error::Precondition("witnesses of different kinds".into())),
        })
    }
}

/// Solves a cochain-level lifting problem, trying the identity first when
/// it applies, then the structural algorithm for the witness, then the
/// linear solver.
pub fn lift_coch(prob: &LiftingProblem, witness: Option<&CofibrationWitness>) -> Result<ChainMap> {
    let (b, x) = (prob.i.tgt(), prob.p.src());
    if **b == **x {
        let id = GradedMap::identity(b).retarget(b, x)?;
        if prob.check(&id) {
            return Ok(id);
        }
    }
    match witness {
        Some(w) if *w.map() == prob.i => match w {
            CofibrationWitness::Cells(e) => lift_semifree(prob, e),
            CofibrationWitness::Deformation(d) => lift_trivial_cofibration(prob, d),
        },
        _ => lift_linear(prob)?.ok_or(Error::NoLift),
    }
}

/// A flavored factorization `α = right ∘ left` in cochain complexes.
#[derive(Clone, Debug)]
pub struct CochFactorization {
    pub flavor: Flavor,
    pub left: ChainMap,
    pub right: ChainMap,
    pub witness: CofibrationWitness,
}

pub fn factor_coch(alpha: &ChainMap, flavor: Flavor) -> Result<CochFactorization> {
    Ok(match flavor {
        Flavor::CFw => {
            let fac = factor_coch_c_fw(alpha, None)?;
            CochFactorization {
                flavor,
                left: fac.ext.f.clone(),
                right: fac.g,
                witness: CofibrationWitness::Cells(fac.ext),
            }
        }
        Flavor::CwF => {
            let fac = factor_coch_cw_f(alpha)?;
            CochFactorization {
                flavor,
                left: fac.j.i.clone(),
                right: fac.q,
                witness: CofibrationWitness::Deformation(fac.j),
            }
        }
    })
}

/// Classes of the two legs, judged on the maps between the big complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flags {
    pub left_cofibration: bool,
    pub left_weak_equivalence: bool,
    pub right_fibration: bool,
    pub right_weak_equivalence: bool,
}

impl Flags {
    fn of(left: &ChainMap, right: &ChainMap) -> Self {
        Flags {
            left_cofibration: is_cofibration(left),
            left_weak_equivalence: is_quasi_iso(left),
            right_fibration: is_fibration(right),
            right_weak_equivalence: is_quasi_iso(right),
        }
    }

    pub fn fits(&self, flavor: Flavor) -> bool {
        self.left_cofibration
            && self.right_fibration
            && match flavor {
                Flavor::CFw => self.right_weak_equivalence,
                Flavor::CwF => self.left_weak_equivalence,
            }
    }

    fn to_json(self) -> Value {
        json!({
            "left_cofibration": self.left_cofibration,
            "left_weak_equivalence": self.left_weak_equivalence,
            "right_fibration": self.right_fibration,
            "right_weak_equivalence": self.right_weak_equivalence,
        })
    }
}

/// The pieces of the big diagram, kept for naturality.
#[derive(Clone, Debug)]
struct Parts {
    base: CochFactorization,
    po: Pushout,
    pb: Pullback,
    phi: ChainMap,
    inner: CochFactorization,
}

#[derive(Clone, Debug)]
pub struct ArFactorization {
    pub flavor: Flavor,
    pub f: ArMorphism,
    pub middle: AcyclicRetraction,
    pub left: ArMorphism,
    pub right: ArMorphism,
    pub flags: Flags,
    /// Witness for `left.f` as a cofibration.
    pub witness: CofibrationWitness,
    parts: Parts,
}

impl ArFactorization {
    pub fn check(&self) -> Report {
        let mut r = Report::new(format!("AR factorization ({})", self.flavor));
        r.check("right*left=f", &self.right.f * &self.left.f == self.f.f);
        r.absorb("middle", check_ar(&self.middle, true));
        r.check("left AR morphism", check_ar_morphism(&self.left));
        r.check("right AR morphism", check_ar_morphism(&self.right));
        r.check("left cofibration", self.flags.left_cofibration);
        r.check("right fibration", self.flags.right_fibration);
        match self.flavor {
            Flavor::CFw => r.check("right weak equivalence", self.flags.right_weak_equivalence),
            Flavor::CwF => r.check("left weak equivalence", self.flags.left_weak_equivalence),
        };
        r.check(
            "gamma iota-bar weak equivalence",
            is_quasi_iso(&self.middle.iota),
        );
        r
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "ar-factorization",
            "flavor": self.flavor.to_string(),
            "inner_flavors": {"base": self.parts.base.flavor.to_string(), "mediator": self.parts.inner.flavor.to_string()},
            "middle": self.middle.to_json(),
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "flags": self.flags.to_json(),
        })
    }
}

/// Factors `f: (A, B, ι, π) -> (M, N, i, p)` through the pushout
/// `P ⊔_A B` and the pullback `N ×_M P` of a factorization `f̂ = h g` of
/// the base map, with the same flavor used for `f̂` and for the mediator.
pub fn factor_ar(f: &ArMorphism, flavor: Flavor) -> Result<ArFactorization> {
    if !check_ar_morphism(f) {
        return Err(Error::Precondition("factor_ar needs an AR morphism".into()));
    }
    let (src, tgt) = (&f.src, &f.tgt);
    let fhat = base_morphism(f);
    let base = factor_coch(&fhat, flavor)?;
    let (g, h) = (&base.left, &base.right);

    let po = pushout(g, &src.iota)?;
    let pb = pullback(&tgt.pi, h)?;
    let psi1 = po.mediate(&GradedMap::identity(g.tgt()), &g.try_compose(&src.pi)?)?;
    let psi2 = po.mediate(&tgt.iota.try_compose(h)?, &f.f)?;
    let phi = pb.mediate(&psi2, &psi1)?;

    let inner = factor_coch(&phi, flavor)?;
    let (gamma, delta) = (&inner.left, &inner.right);
    let middle = AcyclicRetraction::new(
        gamma.try_compose(&po.from_p)?,
        pb.to_p.try_compose(delta)?,
    )?;
    let left = Morphism::new(src.clone(), middle.clone(), gamma.try_compose(&po.from_b)?)?;
    let right = Morphism::new(middle.clone(), tgt.clone(), pb.to_n.try_compose(delta)?)?;
    let witness = base.witness.transport(&src.iota, &po)?.then(&inner.witness)?;
    let flags = Flags::of(&left.f, &right.f);
    let out = ArFactorization {
        flavor,
        f: f.clone(),
        middle,
        left,
        right,
        flags,
        witness,
        parts: Parts {
            base,
            po,
            pb,
            phi,
            inner,
        },
    };
    let report = out.check();
    if !report.passed() {
        return Err(Error::Invariant(format!("factor_ar:\n{report}")));
    }
    Ok(out)
}

/// A commutative square `p f = g i` of morphisms of diagrams.
#[derive(Clone, Debug)]
pub struct Square<D> {
    pub i: Morphism<D>,
    pub f: Morphism<D>,
    pub p: Morphism<D>,
    pub g: Morphism<D>,
}

pub type ArSquare = Square<AcyclicRetraction>;
pub type ContrSquare = Square<Contraction>;

impl<D: Diagram> Square<D> {
    pub fn new(i: Morphism<D>, f: Morphism<D>, p: Morphism<D>, g: Morphism<D>) -> Result<Self> {
        let sq = Square { i, f, p, g };
        sq.coch()?;
        Ok(sq)
    }

    /// The underlying square of chain maps.
    pub fn coch(&self) -> Result<LiftingProblem> {
        LiftingProblem::new(
            self.i.f.clone(),
            self.f.f.clone(),
            self.p.f.clone(),
            self.g.f.clone(),
        )
    }

    fn check_classes(&self) -> Result<()> {
        let (i, p) = (&self.i.f, &self.p.f);
        let ok = is_cofibration(i)
            && is_fibration(p)
            && (is_quasi_iso(i) || is_quasi_iso(p));
        if !ok {
            return Err(Error::Precondition(
                "lifting needs a cofibration against a fibration, one of them trivial".into(),
            ));
        }
        Ok(())
    }

    pub fn check(&self, h: &Morphism<D>) -> bool {
        check_ar_morphism(h)
            && self.coch().map_or(false, |p| p.check(&h.f))
    }
}

/// Lifts in AR: the cochain lift normalized by the first trick.
pub fn lift_ar(sq: &ArSquare, witness: Option<&CofibrationWitness>) -> Result<ArMorphism> {
    sq.check_classes()?;
    let h = lift_coch(&sq.coch()?, witness)?;
    let hat = trick1(&h, &sq.i.tgt, &sq.f.tgt)?;
    if !sq.check(&hat) {
        return Err(Error::Invariant("normalized AR lift fails the square".into()));
    }
    Ok(hat)
}

/// Lifts in Contr: the AR lift normalized by the third trick.
pub fn lift_contr(sq: &ContrSquare, witness: Option<&CofibrationWitness>) -> Result<ContrMorphism> {
    sq.check_classes()?;
    let h = lift_coch(&sq.coch()?, witness)?;
    let hat = trick1(&h, &sq.i.tgt.ar, &sq.f.tgt.ar)?;
    let tilde = trick3(&Morphism {
        src: sq.i.tgt.clone(),
        tgt: sq.f.tgt.clone(),
        f: hat.f,
    })?;
    if !sq.check(&tilde) || !check_contr_morphism(&tilde) {
        return Err(Error::Invariant("normalized Contr lift fails the square".into()));
    }
    Ok(tilde)
}

/// Given AR morphisms `α: (A, B) -> (P, Q)` and `β: (P, Q) -> (M, N)`
/// whose composite is a morphism of contractions `(.., k) -> (.., h)`,
/// finds a homotopy on `Q` making the middle a contraction and both legs
/// morphisms of contractions. The homotopy is read off a lift of `α`
/// against `P(Q) -> P(N) ×_(N⊕N) (Q ⊕ Q)`, then normalized.
pub fn lift_contraction_homotopy(
    alpha: &ArMorphism,
    beta: &ArMorphism,
    src: &Contraction,
    tgt: &Contraction,
    witness: Option<&CofibrationWitness>,
) -> Result<Contraction> {
    if src.ar != alpha.src || tgt.ar != beta.tgt || alpha.tgt != beta.src {
        return Err(Error::ComplexMismatch("lift_contraction_homotopy endpoints".into()));
    }
    if !check_ar_morphism(alpha) || !check_ar_morphism(beta) {
        return Err(Error::Precondition("alpha and beta must be AR morphisms".into()));
    }
    let whole = Morphism::new(src.clone(), tgt.clone(), beta.f.try_compose(&alpha.f)?)?;
    if !check_contr_morphism(&whole) {
        return Err(Error::Precondition("beta*alpha is not a morphism of contractions".into()));
    }
    let mid = alpha.tgt.clone();
    let (q, n) = (mid.n.clone(), tgt.ar.n.clone());
    let pq = path_object(&q);
    let pn = path_object(&n);
    let w = pullback(&pn.proj, &sum_map(&beta.f, &beta.f, &pq.sum, &pn.sum)?)?;
    let gamma = w.mediate(&path_map(&beta.f, &pq, &pn)?, &pq.proj)?;

    let top = path_triple(
        &alpha.f.try_compose(&src.ar.projector())?,
        &alpha.f,
        &alpha.f.try_compose(&src.h)?,
        &pq,
    )?;
    let jq = mid.projector();
    let phi1 = sdr_as_path_map(&tgt.ar.iota, &tgt.ar.pi, &tgt.h, &pn)?.try_compose(&beta.f)?;
    let phi2 = pq
        .sum
        .inl
        .try_compose(&jq)?
        .try_add(&pq.sum.inr.try_compose(&GradedMap::identity(&q))?)?;
    let bottom = w.mediate(&phi1, &phi2)?;

    let prob = LiftingProblem::new(alpha.f.clone(), top, gamma, bottom)
        .map_err(|e| Error::Invariant(format!("path square does not commute: {e}")))?;
    let psi = lift_coch(&prob, witness).map_err(|e| match e {
        Error::NoLift => Error::Invariant("path-object square has no lift".into()),
        e => e,
    })?;
    let (a, b, l) = split_path_triple(&psi, &pq)?;
    if a != jq || !b.is_identity() {
        return Err(Error::Invariant("lift does not start with (jq, Id)".into()));
    }
    let sdr = Sdr::new(mid, l)?;
    let conditions = [
        ("C1 for l", crate::retract::check_sdr(&sdr).passed()),
        ("l alpha = alpha k", &sdr.h * &alpha.f == &alpha.f * &src.h),
        ("beta l = h beta", &beta.f * &sdr.h == &tgt.h * &beta.f),
    ];
    if let Some((name, _)) = conditions.iter().find(|(_, ok)| !ok) {
        return Err(Error::Invariant(format!("extracted homotopy fails {name}")));
    }
    let normalized = trick2(&sdr)?;
    let legs_ok = check_contr_morphism(&Morphism::new(src.clone(), normalized.clone(), alpha.f.clone())?)
        && check_contr_morphism(&Morphism::new(normalized.clone(), tgt.clone(), beta.f.clone())?);
    if !legs_ok || !check_contraction(&normalized).passed() {
        return Err(Error::Invariant("normalized homotopy breaks the legs".into()));
    }
    Ok(normalized)
}

#[derive(Clone, Debug)]
pub struct ContrFactorization {
    pub flavor: Flavor,
    pub f: ContrMorphism,
    pub middle: Contraction,
    pub left: ContrMorphism,
    pub right: ContrMorphism,
    pub flags: Flags,
    pub ar: ArFactorization,
}

impl ContrFactorization {
    pub fn check(&self) -> Report {
        let mut r = Report::new(format!("Contr factorization ({})", self.flavor));
        r.check("right*left=f", &self.right.f * &self.left.f == self.f.f);
        r.absorb("middle", check_contraction(&self.middle));
        r.check("left Contr morphism", check_contr_morphism(&self.left));
        r.check("right Contr morphism", check_contr_morphism(&self.right));
        r.check("legs classify", self.flags.fits(self.flavor));
        r
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "contr-factorization",
            "flavor": self.flavor.to_string(),
            "middle": self.middle.to_json(),
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "flags": self.flags.to_json(),
        })
    }
}

pub fn factor_contr(f: &ContrMorphism, flavor: Flavor) -> Result<ContrFactorization> {
    if !check_contr_morphism(f) {
        return Err(Error::Precondition("factor_contr needs a Contr morphism".into()));
    }
    let ar = factor_ar(&f.underlying(), flavor)?;
    let middle = lift_contraction_homotopy(&ar.left, &ar.right, &f.src, &f.tgt, Some(&ar.witness))?;
    let left = Morphism::new(f.src.clone(), middle.clone(), ar.left.f.clone())?;
    let right = Morphism::new(middle.clone(), f.tgt.clone(), ar.right.f.clone())?;
    let out = ContrFactorization {
        flavor,
        f: f.clone(),
        middle,
        left,
        right,
        flags: ar.flags,
        ar,
    };
    let report = out.check();
    if !report.passed() {
        return Err(Error::Invariant(format!("factor_contr:\n{report}")));
    }
    Ok(out)
}

/// Connecting map between the middles of the factorizations of `f1` and
/// `f2`, for a commuting square `f2 φ1 = φ2 f1`. Built from lifts and
/// mediating maps through the big diagram, then normalized by the third
/// trick.
pub fn factorization_naturality(
    phi1: &ContrMorphism,
    phi2: &ContrMorphism,
    fac1: &ContrFactorization,
    fac2: &ContrFactorization,
) -> Result<ContrMorphism> {
    if fac1.flavor != fac2.flavor {
        return Err(Error::Precondition("factorizations of different flavors".into()));
    }
    if phi1.src != fac1.f.src || phi1.tgt != fac2.f.src || phi2.src != fac1.f.tgt || phi2.tgt != fac2.f.tgt
    {
        return Err(Error::ComplexMismatch("naturality square endpoints".into()));
    }
    if &fac2.f.f * &phi1.f != &phi2.f * &fac1.f.f {
        return Err(Error::Precondition("square does not commute".into()));
    }
    let (a1, a2) = (&fac1.ar.parts, &fac2.ar.parts);
    let hat1 = base_morphism(&phi1.underlying());
    let hat2 = base_morphism(&phi2.underlying());

    let theta = lift_coch(
        &LiftingProblem::new(
            a1.base.left.clone(),
            a2.base.left.try_compose(&hat1)?,
            a2.base.right.clone(),
            hat2.try_compose(&a1.base.right)?,
        )?,
        Some(&a1.base.witness),
    )?;
    let theta_bar = a1.po.mediate(
        &a2.po.from_p.try_compose(&theta)?,
        &a2.po.from_b.try_compose(&phi1.f)?,
    )?;
    let nu = a2.pb.mediate(
        &phi2.f.try_compose(&a1.pb.to_n)?,
        &theta.try_compose(&a1.pb.to_p)?,
    )?;
    if a2.phi.try_compose(&theta_bar)? != nu.try_compose(&a1.phi)? {
        return Err(Error::Invariant("induced maps do not commute with the mediators".into()));
    }
    let psi = lift_coch(
        &LiftingProblem::new(
            a1.inner.left.clone(),
            a2.inner.left.try_compose(&theta_bar)?,
            a2.inner.right.clone(),
            nu.try_compose(&a1.inner.right)?,
        )?,
        Some(&a1.inner.witness),
    )?;
    let tilde = trick3(&Morphism::new(fac1.middle.clone(), fac2.middle.clone(), psi)?)?;
    let top = &tilde.f * &fac1.left.f == &fac2.left.f * &phi1.f;
    let bottom = &fac2.right.f * &tilde.f == &phi2.f * &fac1.right.f;
    if !top || !bottom {
        return Err(Error::Invariant("naturality squares do not commute".into()));
    }
    Ok(tilde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::linalg::{Field, Matrix};

    fn disk_plus_sphere(f: Field) -> Contraction {
        // M = S(0), N = S(0) ⊕ D(1), h = -1 from degree 1 to degree 0 of the disk.
        let m = Complex::sphere(f, 0).into_arc();
        let n = Complex::from_fn(
            f,
            0,
            1,
            |i| if i == 0 { 2 } else { 1 },
            |_| Matrix::from_i64(f, 1, 2, &[0, 1]),
        )
        .unwrap()
        .into_arc();
        let iota = GradedMap::from_fn(&m, &n, 0, |i| {
            if i == 0 {
                Matrix::from_i64(f, 2, 1, &[1, 0])
            } else {
                Matrix::zeros(f, n.dim(i), 0)
            }
        })
        .unwrap();
        let pi = GradedMap::from_fn(&n, &m, 0, |i| {
            if i == 0 {
                Matrix::from_i64(f, 1, 2, &[1, 0])
            } else {
                Matrix::zeros(f, 0, n.dim(i))
            }
        })
        .unwrap();
        let h = GradedMap::from_fn(&n, &n, -1, |i| {
            if i == 1 {
                Matrix::from_i64(f, 2, 1, &[0, -1])
            } else {
                Matrix::zeros(f, n.dim(i - 1), n.dim(i))
            }
        })
        .unwrap();
        let c = Sdr::new(AcyclicRetraction::new(iota, pi).unwrap(), h).unwrap();
        assert!(check_contraction(&c).passed());
        c
    }

    #[test]
    fn identity_of_trivial_sphere() {
        let f = Field::prime(5).unwrap();
        let s = Complex::sphere(f, 0).into_arc();
        let id = ArMorphism::identity(&AcyclicRetraction::trivial(&s));
        for flavor in [Flavor::CFw, Flavor::CwF] {
            let fac = factor_ar(&id, flavor).unwrap();
            assert!(fac.check().passed());
        }
    }

    #[test]
    fn zero_diagrams() {
        let f = Field::prime(3).unwrap();
        let z = Complex::zero(f).into_arc();
        let id = ContrMorphism::identity(&Sdr::trivial(&z));
        let fac = factor_contr(&id, Flavor::CFw).unwrap();
        assert!(fac.middle.ar.n.is_zero());
    }

    #[test]
    fn contraction_factorizations() {
        let f = Field::prime(5).unwrap();
        let c = disk_plus_sphere(f);
        let proj = trick3(&Morphism::new(c.clone(), c.clone(), c.ar.projector()).unwrap()).unwrap();
        for flavor in [Flavor::CFw, Flavor::CwF] {
            let fac = factor_contr(&proj, flavor).unwrap();
            assert!(fac.check().passed(), "{}", fac.check());
            let id = ContrMorphism::identity(&c);
            let fac = factor_contr(&id, flavor).unwrap();
            let nat = factorization_naturality(&id, &id, &fac, &fac).unwrap();
            assert!(nat.f.is_identity());
        }
    }

    #[test]
    fn lifts_against_own_legs() {
        let f = Field::prime(3).unwrap();
        let c = disk_plus_sphere(f);
        let proj = trick3(&Morphism::new(c.clone(), c.clone(), c.ar.projector()).unwrap()).unwrap();
        let a = factor_contr(&proj, Flavor::CFw).unwrap();
        let b = factor_contr(&proj, Flavor::CwF).unwrap();
        let sq = Square::new(b.left.clone(), a.left.clone(), a.right.clone(), b.right.clone()).unwrap();
        let h = lift_contr(&sq, Some(&b.ar.witness)).unwrap();
        assert!(sq.check(&h));
        let sq = Square::new(a.left.clone(), a.left.clone(), a.right.clone(), a.right.clone()).unwrap();
        assert!(sq.check(&lift_contr(&sq, Some(&a.ar.witness)).unwrap()));
        let ar = Square::new(
            b.left.underlying(),
            a.left.underlying(),
            a.right.underlying(),
            b.right.underlying(),
        )
        .unwrap();
        assert!(ar.check(&lift_ar(&ar, None).unwrap()));
    }

    #[test]
    fn identity_legs_lift_trivially() {
        let f = Field::prime(5).unwrap();
        let c = disk_plus_sphere(f);
        let id = ContrMorphism::identity(&c);
        let sq = Square::new(id.clone(), id.clone(), id.clone(), id.clone()).unwrap();
        assert!(lift_contr(&sq, None).unwrap().f.is_identity());
    }
}
