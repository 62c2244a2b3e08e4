//! Acyclic retractions, strong deformation retractions and contractions,
//! their morphisms, and the first normalization trick.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::complex::{comp, is_quasi_iso, ChainMap, Complex, GradedMap};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::report::Report;

/// `M ⇄ N` with `π∘ι = Id_M`. Validity is a query, see [`check_ar`].
#[derive(Clone, Debug, PartialEq)]
pub struct AcyclicRetraction {
    pub m: Arc<Complex>,
    pub n: Arc<Complex>,
    pub iota: ChainMap,
    pub pi: ChainMap,
}

/// An acyclic retraction with a homotopy `h` of degree -1 on `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sdr {
    pub ar: AcyclicRetraction,
    pub h: GradedMap,
}

/// A contraction is an [`Sdr`] that also passes the side conditions.
pub type Contraction = Sdr;

impl AcyclicRetraction {
    pub fn new(iota: ChainMap, pi: ChainMap) -> Result<Self> {
        if !Arc::ptr_eq(iota.src(), pi.tgt()) && **iota.src() != **pi.tgt() {
            return Err(Error::ComplexMismatch("iota source must be pi target".into()));
        }
        if !Arc::ptr_eq(iota.tgt(), pi.src()) && **iota.tgt() != **pi.src() {
            return Err(Error::ComplexMismatch("iota target must be pi source".into()));
        }
        Ok(AcyclicRetraction {
            m: iota.src().clone(),
            n: iota.tgt().clone(),
            iota,
            pi,
        })
    }

    /// `M = N` with both maps the identity.
    pub fn trivial(x: &Arc<Complex>) -> Self {
        let id = GradedMap::identity(x);
        AcyclicRetraction {
            m: x.clone(),
            n: x.clone(),
            iota: id.clone(),
            pi: id,
        }
    }

    pub fn field(&self) -> Field {
        self.n.field()
    }

    /// `ι∘π`.
    pub fn projector(&self) -> ChainMap {
        &self.iota * &self.pi
    }

    pub fn to_json(&self) -> Value {
        json!({
            "M": self.m.to_json(),
            "N": self.n.to_json(),
            "iota": self.iota.to_json(),
            "pi": self.pi.to_json(),
        })
    }

    pub fn from_json(v: &Value, location: &str) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::parse(location, "diagram must be an object"))?;
        let get = |k: &str| {
            obj.get(k)
                .ok_or_else(|| Error::parse(location, format!("missing `{k}`")))
        };
        let m = Complex::from_json(get("M")?, &format!("{location}.M"))?.into_arc();
        let n = Complex::from_json(get("N")?, &format!("{location}.N"))?.into_arc();
        if m.field() != n.field() {
            return Err(Error::parse(location, "M and N live over different fields"));
        }
        let iota = GradedMap::from_json(get("iota")?, &m, &n, &format!("{location}.iota"))?;
        let pi = GradedMap::from_json(get("pi")?, &n, &m, &format!("{location}.pi"))?;
        if iota.degree() != 0 || pi.degree() != 0 {
            return Err(Error::parse(location, "iota and pi must have degree 0"));
        }
        Ok(AcyclicRetraction { m, n, iota, pi })
    }
}

impl Sdr {
    pub fn new(ar: AcyclicRetraction, h: GradedMap) -> Result<Self> {
        if h.degree() != -1 || (!Arc::ptr_eq(h.src(), &ar.n) && **h.src() != *ar.n) {
            return Err(Error::Precondition("h must be a degree -1 map N -> N".into()));
        }
        let h = h.retarget(&ar.n, &ar.n)?;
        Ok(Sdr { ar, h })
    }

    /// Trivial contraction on `x`: identities and `h = 0`.
    pub fn trivial(x: &Arc<Complex>) -> Self {
        Sdr {
            ar: AcyclicRetraction::trivial(x),
            h: GradedMap::zero(x, x, -1),
        }
    }

    /// `0 ⇄ D(n)` with `h = -1` from degree `n` to degree `n - 1`.
    pub fn disk(field: Field, n: i32) -> Self {
        let disk = Complex::disk(field, n).into_arc();
        let zero = Complex::zero(field).into_arc();
        let h = GradedMap::from_fn(&disk, &disk, -1, |i| {
            if i == n {
                Matrix::from_i64(field, 1, 1, &[-1])
            } else {
                Matrix::zeros(field, disk.dim(i - 1), disk.dim(i))
            }
        })
        .unwrap();
        Sdr {
            ar: AcyclicRetraction {
                m: zero.clone(),
                n: disk.clone(),
                iota: GradedMap::zero(&zero, &disk, 0),
                pi: GradedMap::zero(&disk, &zero, 0),
            },
            h,
        }
    }

    pub fn with_homotopy(&self, h: GradedMap) -> Result<Self> {
        Sdr::new(self.ar.clone(), h)
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.ar.to_json();
        v["h"] = self.h.to_json();
        v
    }

    pub fn from_json(v: &Value, location: &str) -> Result<Self> {
        let ar = AcyclicRetraction::from_json(v, location)?;
        let h = v
            .get("h")
            .ok_or_else(|| Error::parse(location, "missing `h`"))?;
        let h = GradedMap::from_json(h, &ar.n, &ar.n, &format!("{location}.h"))?;
        if h.degree() != -1 {
            return Err(Error::parse(format!("{location}.h"), "homotopy must have degree -1"));
        }
        Ok(Sdr { ar, h })
    }
}

/// Access to the underlying acyclic retraction of a diagram.
pub trait Diagram: Clone {
    fn ar(&self) -> &AcyclicRetraction;
}

impl Diagram for AcyclicRetraction {
    fn ar(&self) -> &AcyclicRetraction {
        self
    }
}

impl Diagram for Sdr {
    fn ar(&self) -> &AcyclicRetraction {
        &self.ar
    }
}

/// A chain map `f: N -> B` between the big complexes of two diagrams.
#[derive(Clone, Debug, PartialEq)]
pub struct Morphism<D> {
    pub src: D,
    pub tgt: D,
    pub f: ChainMap,
}

pub type ArMorphism = Morphism<AcyclicRetraction>;
pub type ContrMorphism = Morphism<Contraction>;

impl<D: Diagram> Morphism<D> {
    pub fn new(src: D, tgt: D, f: ChainMap) -> Result<Self> {
        let f = f.retarget(&src.ar().n, &tgt.ar().n)?;
        if f.degree() != 0 {
            return Err(Error::Precondition("morphisms have degree 0".into()));
        }
        Ok(Morphism { src, tgt, f })
    }

    pub fn identity(x: &D) -> Self {
        Morphism {
            src: x.clone(),
            tgt: x.clone(),
            f: GradedMap::identity(&x.ar().n),
        }
    }

    /// `self ∘ g`.
    pub fn after(&self, g: &Morphism<D>) -> Result<Self> {
        Ok(Morphism {
            src: g.src.clone(),
            tgt: self.tgt.clone(),
            f: self.f.try_compose(&g.f)?,
        })
    }
}

impl ArMorphism {
    pub fn to_json(&self) -> Value {
        json!({"kind": "ar-morphism", "src": self.src.to_json(), "tgt": self.tgt.to_json(), "f": self.f.to_json()})
    }

    pub fn from_json(v: &Value, location: &str) -> Result<Self> {
        let (src, tgt, f) = parse_morphism(v, location, AcyclicRetraction::from_json, |d| &d.n)?;
        Ok(Morphism { src, tgt, f })
    }
}

impl ContrMorphism {
    pub fn to_json(&self) -> Value {
        json!({"kind": "contr-morphism", "src": self.src.to_json(), "tgt": self.tgt.to_json(), "f": self.f.to_json()})
    }

    pub fn from_json(v: &Value, location: &str) -> Result<Self> {
        let (src, tgt, f) = parse_morphism(v, location, Sdr::from_json, |d| &d.ar.n)?;
        Ok(Morphism { src, tgt, f })
    }

    pub fn underlying(&self) -> ArMorphism {
        Morphism {
            src: self.src.ar.clone(),
            tgt: self.tgt.ar.clone(),
            f: self.f.clone(),
        }
    }
}

fn parse_morphism<D>(
    v: &Value,
    location: &str,
    parse: impl Fn(&Value, &str) -> Result<D>,
    big: impl Fn(&D) -> &Arc<Complex>,
) -> Result<(D, D, ChainMap)> {
    let obj: &Map<String, Value> = v
        .as_object()
        .ok_or_else(|| Error::parse(location, "morphism must be an object"))?;
    let get = |k: &str| {
        obj.get(k)
            .ok_or_else(|| Error::parse(location, format!("missing `{k}`")))
    };
    let src = parse(get("src")?, &format!("{location}.src"))?;
    let tgt = parse(get("tgt")?, &format!("{location}.tgt"))?;
    let f = GradedMap::from_json(get("f")?, big(&src), big(&tgt), &format!("{location}.f"))?;
    if f.degree() != 0 {
        return Err(Error::parse(format!("{location}.f"), "morphism must have degree 0"));
    }
    Ok((src, tgt, f))
}

fn ar_checks(report: &mut Report, x: &AcyclicRetraction) -> bool {
    let shapes = x.iota.degree() == 0
        && x.pi.degree() == 0
        && x.iota.try_compose(&x.pi).is_ok()
        && x.pi.try_compose(&x.iota).is_ok();
    report.check("shapes", shapes);
    if !shapes {
        return false;
    }
    report.check("iota chain map", x.iota.is_chain_map());
    report.check("pi chain map", x.pi.is_chain_map());
    report.check("pi*iota=Id", (&x.pi * &x.iota).is_identity());
    true
}

/// Checks `π∘ι = Id`, the chain-map conditions and, when `quasi_iso` is
/// set, that both maps are quasi-isomorphisms.
pub fn check_ar(x: &AcyclicRetraction, quasi_iso: bool) -> Report {
    let mut report = Report::new("acyclic retraction");
    if ar_checks(&mut report, x) && quasi_iso {
        report.check("iota quasi-iso", is_quasi_iso(&x.iota));
        report.check("pi quasi-iso", is_quasi_iso(&x.pi));
    }
    report
}

fn c1(x: &Sdr) -> bool {
    match x.h.d_commutator() {
        Ok(dh) => dh == &x.ar.projector() - &GradedMap::identity(&x.ar.n),
        Err(_) => false,
    }
}

fn sdr_checks(report: &mut Report, x: &Sdr) -> bool {
    if !ar_checks(report, &x.ar) {
        return false;
    }
    let shaped = x.h.degree() == -1 && x.h.try_compose(&x.ar.iota).is_ok();
    report.check("h degree -1 on N", shaped);
    if shaped {
        report.check("C1", c1(x));
    }
    shaped
}

pub fn check_sdr(x: &Sdr) -> Report {
    let mut report = Report::new("strong deformation retraction");
    sdr_checks(&mut report, x);
    report
}

pub fn check_contraction(x: &Contraction) -> Report {
    let mut report = Report::new("contraction");
    if sdr_checks(&mut report, x) {
        let h = &x.h;
        report.check("C2 pi*h=0", (&x.ar.pi * h).is_zero());
        report.check("C2 h*iota=0", (h * &x.ar.iota).is_zero());
        report.check("C3 h*h=0", (h * h).is_zero());
        let d = GradedMap::differential(&x.ar.n);
        report.check("hdh=-h", comp(&[h, &d, h]) == -h);
    }
    report
}

/// `f̂ = p∘f∘ι: M -> A`, the map the morphism induces on the small complexes.
pub fn base_morphism(f: &ArMorphism) -> ChainMap {
    comp(&[&f.tgt.pi, &f.f, &f.src.iota])
}

/// `f ι π = i p f`.
pub fn check_ar_morphism<D: Diagram>(f: &Morphism<D>) -> bool {
    let (s, t) = (f.src.ar(), f.tgt.ar());
    f.f.is_chain_map() && comp(&[&f.f, &s.iota, &s.pi]) == comp(&[&t.iota, &t.pi, &f.f])
}

/// AR condition plus `f h = k f`.
pub fn check_contr_morphism(f: &ContrMorphism) -> bool {
    check_ar_morphism(f) && &f.f * &f.src.h == &f.tgt.h * &f.f
}

/// First trick: `f̂ = f - ipf - fιπ + 2ipfιπ`.
pub fn trick1(
    f: &ChainMap,
    src: &AcyclicRetraction,
    tgt: &AcyclicRetraction,
) -> Result<ArMorphism> {
    let f = f.retarget(&src.n, &tgt.n)?;
    let ip_f = comp(&[&tgt.iota, &tgt.pi, &f]);
    let f_ip = comp(&[&f, &src.iota, &src.pi]);
    let both = comp(&[&tgt.iota, &tgt.pi, &f, &src.iota, &src.pi]);
    let hat = &(&(&f - &ip_f) - &f_ip) + &both.scale_i64(2);
    Ok(Morphism {
        src: src.clone(),
        tgt: tgt.clone(),
        f: hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    #[test]
    fn trivial_contraction_passes() {
        let x = Complex::disk(f5(), 2).into_arc();
        let r = check_contraction(&Sdr::trivial(&x));
        assert!(r.passed(), "{r}");
        assert!(check_ar(&AcyclicRetraction::trivial(&x), true).passed());
    }

    #[test]
    fn disk_contraction_passes() {
        let r = check_contraction(&Sdr::disk(f5(), 1));
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn wrong_sign_breaks_c1() {
        let disk = Sdr::disk(f5(), 1);
        let bad = disk.with_homotopy(disk.h.scale_i64(-1)).unwrap();
        let r = check_sdr(&bad);
        assert_eq!(r.status("C1"), Some(false));
        assert_eq!(r.status("pi*iota=Id"), Some(true));
    }

    #[test]
    fn base_morphism_squares() {
        let x = Complex::sphere(Field::Q, 0).into_arc();
        let ar = AcyclicRetraction::trivial(&x);
        let id = ArMorphism::identity(&ar);
        assert!(base_morphism(&id).is_identity());
        let zero = Morphism::new(ar.clone(), ar, GradedMap::zero(&x, &x, 0)).unwrap();
        assert!(base_morphism(&zero).is_zero());
    }

    #[test]
    fn trick1_on_morphisms() {
        let c = Sdr::disk(f5(), 0);
        let id = ContrMorphism::identity(&c);
        assert!(check_contr_morphism(&id) && check_ar_morphism(&id));
        let t = trick1(&id.f, &c.ar, &c.ar).unwrap();
        assert_eq!(t.f, id.f);
        let z = trick1(&GradedMap::zero(&c.ar.n, &c.ar.n, 0), &c.ar, &c.ar).unwrap();
        assert!(z.f.is_zero());
    }

    #[test]
    fn diagram_json_round_trip() {
        let c = Sdr::disk(Field::Q, 1);
        let v = c.to_json();
        assert_eq!(Sdr::from_json(&v, "x").unwrap(), c);
        let m = ContrMorphism::identity(&c);
        assert_eq!(ContrMorphism::from_json(&m.to_json(), "m").unwrap(), m);
    }
}
