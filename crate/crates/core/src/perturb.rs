//! The second and third normalization tricks: turning an SDR into a
//! contraction, and straightening a morphism of acyclic retractions between
//! contractions into a morphism of contractions.

use crate::complex::{comp, GradedMap};
use crate::error::{Error, Result};
use crate::retract::{check_ar_morphism, check_contraction, check_sdr, Contraction, ContrMorphism, Morphism, Sdr};

/// Second trick: replaces `h` by `h̃ = -k d k` with `D = hd + dh` and
/// `k = D h D`. The proof identities are rechecked on the way.
pub fn trick2(x: &Sdr) -> Result<Contraction> {
    let report = check_sdr(x);
    if !report.passed() {
        return Err(Error::Precondition(format!("trick2 needs an SDR:\n{report}")));
    }
    let n = &x.ar.n;
    let d = GradedMap::differential(n);
    let h = &x.h;
    let dh = h.d_commutator()?;
    let k = comp(&[&dh, h, &dh]);
    let tilde = -&comp(&[&k, &d, &k]);

    let dhd = comp(&[&d, h, &d]);
    let kk = &k * &k;
    let checks = [
        ("dD=dhd", &d * &dh == dhd),
        ("Dd=dhd", &dh * &d == dhd),
        ("D^2=-D", &dh * &dh == -&dh),
        ("D*iota=0", (&dh * &x.ar.iota).is_zero()),
        ("pi*D=0", (&x.ar.pi * &dh).is_zero()),
        ("dk+kd=D", k.d_commutator()? == dh),
        ("h~=k+k^2d", tilde == &k + &(&kk * &d)),
        ("h~=k+dk^2", tilde == &k + &(&d * &kk)),
    ];
    if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
        return Err(Error::Invariant(format!("trick2 proof identity {name} failed")));
    }
    Ok(Sdr {
        ar: x.ar.clone(),
        h: tilde,
    })
}

/// For an SDR morphism (`f h = k f`), checks `k̃ f = f h̃`.
pub fn trick2_functoriality_check(f: &Morphism<Sdr>) -> Result<bool> {
    if &f.f * &f.src.h != &f.tgt.h * &f.f {
        return Err(Error::Precondition("not a morphism of SDRs: f h != k f".into()));
    }
    let (hs, ht) = (trick2(&f.src)?, trick2(&f.tgt)?);
    Ok(&ht.h * &f.f == &f.f * &hs.h)
}

/// `f - s·(d k f h d)`; `s = 1` is the third trick.
pub(crate) fn trick3_signed(f: &Morphism<Contraction>, sign: i64) -> GradedMap {
    let d_src = GradedMap::differential(&f.src.ar.n);
    let d_tgt = GradedMap::differential(&f.tgt.ar.n);
    let defect = comp(&[&d_tgt, &f.tgt.h, &f.f, &f.src.h, &d_src]);
    &f.f - &defect.scale_i64(sign)
}

/// Third trick: `f̃ = f - dkfhd`, checked against `f + dkf - fdh`.
pub fn trick3(f: &Morphism<Contraction>) -> Result<ContrMorphism> {
    if !check_ar_morphism(f) {
        return Err(Error::Precondition("trick3 needs a morphism of acyclic retractions".into()));
    }
    for (side, x) in [("source", &f.src), ("target", &f.tgt)] {
        let r = check_contraction(x);
        if !r.passed() {
            return Err(Error::Precondition(format!("trick3 {side} is not a contraction:\n{r}")));
        }
    }
    let tilde = trick3_signed(f, 1);
    let d_src = GradedMap::differential(&f.src.ar.n);
    let d_tgt = GradedMap::differential(&f.tgt.ar.n);
    let other = &(&f.f + &comp(&[&d_tgt, &f.tgt.h, &f.f])) - &comp(&[&f.f, &d_src, &f.src.h]);
    if tilde != other {
        return Err(Error::Invariant("trick3 closed forms disagree".into()));
    }
    Ok(Morphism {
        src: f.src.clone(),
        tgt: f.tgt.clone(),
        f: tilde,
    })
}

/// `s = k f h d`, with `f - f̃ = ds + sd` verified.
pub fn nullhomotopy_witness(f: &Morphism<Contraction>, tilde: &ContrMorphism) -> Result<GradedMap> {
    if tilde.f.try_sub(&f.f).is_err() {
        return Err(Error::ComplexMismatch("witness: f and f~ have different endpoints".into()));
    }
    let d_src = GradedMap::differential(&f.src.ar.n);
    let s = comp(&[&f.tgt.h, &f.f, &f.src.h, &d_src]);
    if s.d_commutator()? != &f.f - &tilde.f {
        return Err(Error::Precondition("f~ is not the third-trick output of f".into()));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::linalg::Field;
    use crate::retract::{check_contr_morphism, ContrMorphism};

    #[test]
    fn trick2_fixes_contractions() {
        let f = Field::prime(5).unwrap();
        let x = Complex::disk(f, 0).into_arc();
        let t = Sdr::trivial(&x);
        assert_eq!(trick2(&t).unwrap(), t);
        let d = Sdr::disk(f, 1);
        assert_eq!(trick2(&d).unwrap(), d);
    }

    #[test]
    fn trick2_rejects_broken_c1() {
        let d = Sdr::disk(Field::Q, 1);
        let bad = d.with_homotopy(d.h.scale_i64(2)).unwrap();
        assert!(matches!(trick2(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn trick3_on_identity_and_projector() {
        let f = Field::prime(3).unwrap();
        let c = Sdr::disk(f, 2);
        let id = ContrMorphism::identity(&c);
        let t = trick3(&id).unwrap();
        assert_eq!(t.f, id.f);
        let s = nullhomotopy_witness(&id, &t).unwrap();
        assert!(s.d_commutator().unwrap().is_zero());

        let proj = Morphism::new(c.clone(), c.clone(), c.ar.projector()).unwrap();
        let t = trick3(&proj).unwrap();
        assert!(check_contr_morphism(&t));
    }

    #[test]
    fn functoriality_on_identity() {
        let c = Sdr::disk(Field::Q, 0);
        assert!(trick2_functoriality_check(&Morphism::identity(&c)).unwrap());
    }
}
