//! Semifree extensions with explicit cell data, the cell-by-cell lifting
//! algorithm, the two factorizations in cochain complexes, a generic linear
//! lifting solver, and the retract presentation of cofibrations.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::complex::{
    is_cofibration, is_fibration, is_quasi_iso, window_union, ChainMap, Complex, GradedMap, Pushout,
};
use crate::error::{Error, Result};
use crate::linalg::{Field, LinearSystem, Matrix};
use crate::report::Report;

/// Free summands adjoined at one stage: per degree, basis columns in the
/// coordinates of the target.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Stage {
    pub cells: BTreeMap<i32, Matrix>,
}

impl Stage {
    pub fn count(&self) -> usize {
        self.cells.values().map(Matrix::cols).sum()
    }

    fn count_at(&self, i: i32) -> usize {
        self.cells.get(&i).map_or(0, Matrix::cols)
    }
}

/// A chain map `f: C -> P` with a filtration of `P` by free summands whose
/// differentials land in the previous stage.
#[derive(Clone, Debug, PartialEq)]
pub struct SemifreeExtension {
    pub f: ChainMap,
    pub stages: Vec<Stage>,
}

impl SemifreeExtension {
    /// No cells; `f` must be an isomorphism for this to validate.
    pub fn trivial(f: ChainMap) -> Self {
        SemifreeExtension {
            f,
            stages: Vec::new(),
        }
    }

    pub fn source(&self) -> &Arc<Complex> {
        self.f.src()
    }

    pub fn target(&self) -> &Arc<Complex> {
        self.f.tgt()
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.stages.iter().map(Stage::count).collect()
    }

    /// `[f_i | cells of stage 0 | cells of stage 1 | ...]` in degree `i`.
    pub fn basis(&self, i: i32) -> Matrix {
        let p = self.target();
        let mut parts = vec![self.f.block(i)];
        for s in &self.stages {
            if let Some(c) = s.cells.get(&i) {
                parts.push(c.clone());
            }
        }
        let refs: Vec<&Matrix> = parts.iter().collect();
        Matrix::hstack(p.field(), p.dim(i), &refs)
    }

    fn offset(&self, stage: usize, i: i32) -> usize {
        self.source().dim(i) + self.stages[..stage].iter().map(|s| s.count_at(i)).sum::<usize>()
    }

    /// Filtration invariants: `f` an injective chain map, the stages
    /// completing `im f` to a basis, and `d(A_n) ⊆ P_n`.
    pub fn validate(&self) -> Report {
        let mut report = Report::new("semifree extension");
        let p = self.target().clone();
        report.check("f chain map", self.f.is_chain_map());
        report.check("f injective", is_cofibration(&self.f));
        let (lo, hi) = window_union([self.source().window(), p.window()]).unwrap_or((0, -1));
        let mut spans = true;
        let mut attached = true;
        for i in lo..=hi {
            let b = self.basis(i);
            spans &= b.is_square() && b.rank() == p.dim(i);
            for (n, s) in self.stages.iter().enumerate() {
                if let Some(c) = s.cells.get(&i) {
                    let image = &*p.d(i) * c;
                    let prior = self.basis(i + 1).block(0, 0, p.dim(i + 1), self.offset(n, i + 1));
                    let joined = Matrix::hstack(p.field(), p.dim(i + 1), &[&prior, &image]);
                    attached &= joined.rank() == prior.rank();
                }
            }
        }
        report.check("stages span P", spans);
        report.check("d(A_n) in P_n", attached);
        report
    }

    /// Pushes the extension along `u: C -> X`. `po` must be
    /// `pushout(self.f, u)`; the new extension is `X -> P ⊔_C X` with the
    /// cells carried over by the leg out of `P`.
    pub fn transport(&self, po: &Pushout) -> SemifreeExtension {
        let stages = self
            .stages
            .iter()
            .map(|s| Stage {
                cells: s
                    .cells
                    .iter()
                    .map(|(i, c)| (*i, &po.from_p.block(*i) * c))
                    .collect(),
            })
            .collect();
        SemifreeExtension {
            f: po.from_b.clone(),
            stages,
        }
    }

    /// The composite extension `next.f ∘ self.f`, with the cells of `self`
    /// carried forward first and those of `next` after them.
    pub fn then(&self, next: &SemifreeExtension) -> Result<SemifreeExtension> {
        let f = next.f.try_compose(&self.f)?;
        let mut stages: Vec<Stage> = self
            .stages
            .iter()
            .map(|s| Stage {
                cells: s
                    .cells
                    .iter()
                    .map(|(i, c)| (*i, &next.f.block(*i) * c))
                    .collect(),
            })
            .collect();
        stages.extend(next.stages.iter().cloned());
        Ok(SemifreeExtension { f, stages })
    }

    pub fn to_json(&self) -> Value {
        let p = self.target();
        let stages: Vec<Value> = self
            .stages
            .iter()
            .map(|s| {
                let mut m = serde_json::Map::new();
                for (i, c) in &s.cells {
                    let boundary = &*p.d(*i) * c;
                    m.insert(
                        i.to_string(),
                        json!({"basis": c.to_json(), "boundary": boundary.to_json()}),
                    );
                }
                Value::Object(m)
            })
            .collect();
        json!({
            "kind": "cells",
            "source": self.source().to_json(),
            "target": p.to_json(),
            "f": self.f.to_json(),
            "stages": stages,
        })
    }
}

/// `r i = Id`, `i r - Id = dH + Hd` and `H i = 0` for a cofibration `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Deformation {
    pub i: ChainMap,
    pub r: ChainMap,
    pub h: GradedMap,
}

impl Deformation {
    pub fn validate(&self) -> Report {
        let mut report = Report::new("deformation retraction");
        report.check("i chain map", self.i.is_chain_map());
        report.check("r chain map", self.r.is_chain_map());
        report.check("r*i=Id", (&self.r * &self.i).is_identity());
        let ir = &self.i * &self.r;
        let c1 = self
            .h
            .d_commutator()
            .map(|dh| dh == &ir - &GradedMap::identity(self.i.tgt()))
            .unwrap_or(false);
        report.check("i*r-Id=dH+Hd", c1);
        report.check("H*i=0", (&self.h * &self.i).is_zero());
        report
    }

    /// Deformation data for the pushout of `self.i` along `u`. `po` must be
    /// `pushout(self.i, u)`.
    pub fn transport(&self, u: &ChainMap, po: &Pushout) -> Result<Deformation> {
        let r = po.mediate(&u.try_compose(&self.r)?, &GradedMap::identity(u.tgt()))?;
        let h = po.mediate(
            &po.from_p.try_compose(&self.h)?,
            &GradedMap::zero(u.tgt(), &po.object, -1),
        )?;
        Ok(Deformation {
            i: po.from_b.clone(),
            r,
            h,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "deformation",
            "A": self.i.src().to_json(),
            "P": self.i.tgt().to_json(),
            "i": self.i.to_json(),
            "r": self.r.to_json(),
            "H": self.h.to_json(),
        })
    }

    /// Data for `next.i ∘ self.i`: `r = r₁ r₂`, `H = H₂ + i₂ H₁ r₂`.
    pub fn then(&self, next: &Deformation) -> Result<Deformation> {
        let i = next.i.try_compose(&self.i)?;
        let r = self.r.try_compose(&next.r)?;
        let carried = next.i.try_compose(&self.h.try_compose(&next.r)?)?;
        Ok(Deformation {
            i,
            r,
            h: next.h.try_add(&carried)?,
        })
    }
}

/// `α = g ∘ f` with `f` semifree and `g` a surjective quasi-isomorphism.
#[derive(Clone, Debug)]
pub struct CFwFactorization {
    pub ext: SemifreeExtension,
    pub g: ChainMap,
}

/// `α = q ∘ j` with `j` a trivial cofibration carrying deformation data
/// and `q` degreewise surjective.
#[derive(Clone, Debug)]
pub struct CwFFactorization {
    pub j: Deformation,
    pub q: ChainMap,
}

/// Growing complex `P` with its map `g: P -> D`, kept in coordinates
/// `[C | stage 0 | stage 1 | ...]` per degree.
struct Tower {
    field: Field,
    c: Arc<Complex>,
    d: Arc<Complex>,
    dims: BTreeMap<i32, usize>,
    diff: BTreeMap<i32, Matrix>,
    g: BTreeMap<i32, Matrix>,
    stages: Vec<BTreeMap<i32, (usize, usize)>>,
}

impl Tower {
    fn new(alpha: &ChainMap) -> Self {
        let (c, d) = (alpha.src().clone(), alpha.tgt().clone());
        let mut t = Tower {
            field: c.field(),
            c: c.clone(),
            d: d.clone(),
            dims: BTreeMap::new(),
            diff: BTreeMap::new(),
            g: BTreeMap::new(),
            stages: Vec::new(),
        };
        if let Some((lo, hi)) = c.window() {
            for i in lo..=hi {
                t.dims.insert(i, c.dim(i));
                t.diff.insert(i, c.d(i).into_owned());
                t.g.insert(i, alpha.block(i));
            }
        }
        t
    }

    fn dim(&self, i: i32) -> usize {
        self.dims.get(&i).copied().unwrap_or(0)
    }

    fn d(&self, i: i32) -> Matrix {
        self.diff
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.field, self.dim(i + 1), self.dim(i)))
    }

    fn gm(&self, i: i32) -> Matrix {
        self.g
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.field, self.d.dim(i), self.dim(i)))
    }

    fn window(&self) -> Option<(i32, i32)> {
        let lo = self.dims.iter().find(|(_, &n)| n > 0).map(|(i, _)| *i)?;
        let hi = self.dims.iter().rev().find(|(_, &n)| n > 0).map(|(i, _)| *i)?;
        Some((lo, hi))
    }

    /// Adjoins cells in degree `i` with the given boundaries (in the current
    /// coordinates of degree `i + 1`) and images in `D^i`.
    fn add_cells(&mut self, i: i32, boundary: &Matrix, values: &Matrix) {
        let m = boundary.cols();
        if m == 0 {
            return;
        }
        let f = self.field;
        let old = self.dim(i);
        let out = Matrix::hstack(f, self.dim(i + 1), &[&self.d(i), boundary]);
        let into = Matrix::vstack(
            f,
            self.dim(i - 1),
            &[&self.d(i - 1), &Matrix::zeros(f, m, self.dim(i - 1))],
        );
        let g = Matrix::hstack(f, self.d.dim(i), &[&self.gm(i), values]);
        self.diff.insert(i, out);
        self.diff.insert(i - 1, into);
        self.g.insert(i, g);
        self.dims.insert(i, old + m);
        self.stages
            .last_mut()
            .expect("a stage is open")
            .insert(i, (old, m));
    }

    fn complex(&self) -> Arc<Complex> {
        let (lo, hi) = window_union([self.window(), self.c.window(), self.d.window()])
            .unwrap_or((0, -1));
        Complex::from_fn(self.field, lo, hi, |i| self.dim(i), |i| self.d(i))
            .expect("tower shapes are consistent")
            .into_arc()
    }

    fn map(&self, p: &Arc<Complex>) -> ChainMap {
        GradedMap::from_fn(p, &self.d, 0, |i| self.gm(i)).expect("tower shapes are consistent")
    }

    fn extension(&self, p: &Arc<Complex>) -> SemifreeExtension {
        let f = self.field;
        let inc = GradedMap::from_fn(&self.c, p, 0, |i| {
            Matrix::identity(f, p.dim(i)).block(0, 0, p.dim(i), self.c.dim(i))
        })
        .expect("tower shapes are consistent");
        let stages = self
            .stages
            .iter()
            .map(|s| Stage {
                cells: s
                    .iter()
                    .map(|(i, &(off, m))| {
                        (*i, Matrix::identity(f, p.dim(*i)).block(0, off, p.dim(*i), m))
                    })
                    .collect(),
            })
            .collect();
        SemifreeExtension { f: inc, stages }
    }

    fn to_json(&self) -> Value {
        let p = self.complex();
        json!({
            "cells": self.extension(&p).to_json(),
            "g": self.map(&p).to_json(),
            "stages": self.stages.len(),
        })
    }
}

/// Default stage cap: twice the support span of source and target, plus 6.
pub fn default_max_stages(alpha: &ChainMap) -> usize {
    let span = window_union([alpha.src().support(), alpha.tgt().support()])
        .map_or(0, |(lo, hi)| (hi - lo) as usize);
    2 * span + 6
}

/// Factors `α` as a semifree extension followed by a surjective
/// quasi-isomorphism, one generator per basis vector at every stage.
pub fn factor_coch_c_fw(alpha: &ChainMap, max_stages: Option<usize>) -> Result<CFwFactorization> {
    if !alpha.is_chain_map() {
        return Err(Error::Precondition("factor_coch_c_fw needs a chain map".into()));
    }
    let cap = max_stages.unwrap_or_else(|| default_max_stages(alpha)).max(2);
    let d = alpha.tgt().clone();
    let f = d.field();
    let mut t = Tower::new(alpha);
    let dwin = d.window();

    // Cocycles of D, with zero differential.
    t.stages.push(BTreeMap::new());
    if let Some((lo, hi)) = dwin {
        for i in lo..=hi {
            let z = d.d(i).kernel_basis();
            t.add_cells(i, &Matrix::zeros(f, t.dim(i + 1), z.cols()), &z);
        }
    }

    // A basis of D, attached to cocycles of P_1 lifting its coboundary.
    t.stages.push(BTreeMap::new());
    if let Some((lo, hi)) = dwin {
        let mut pending = Vec::new();
        for i in lo..=hi {
            let zp = t.d(i + 1).kernel_basis();
            let target = d.d(i).into_owned();
            let y = (&t.gm(i + 1) * &zp)
                .solve(&target)?
                .ok_or_else(|| Error::Invariant("Z(P_1) does not cover Z(D)".into()))?;
            pending.push((i, &zp * &y));
        }
        for (i, b) in pending {
            t.add_cells(i, &b, &Matrix::identity(f, d.dim(i)));
        }
    }

    loop {
        let p = t.complex();
        let g = t.map(&p);
        if is_fibration(&g) && is_quasi_iso(&g) {
            let ext = t.extension(&p);
            return Ok(CFwFactorization { ext, g });
        }
        if t.stages.len() >= cap {
            return Err(Error::NonTermination {
                stages: t.stages.len(),
                partial: t.to_json().to_string(),
            });
        }
        // Cocycles sent to coboundaries, modulo coboundaries of P.
        let mut pending = Vec::new();
        for k in p.degrees() {
            let zp = p.d(k).kernel_basis();
            let bd = d.d(k - 1).column_basis();
            let gz = &g.block(k) * &zp;
            let sys = Matrix::hstack(f, d.dim(k), &[&gz, &bd.neg()]);
            let ker = sys.kernel_basis();
            let kspace = (&zp * &ker.block(0, 0, zp.cols(), ker.cols())).column_basis();
            let bp = p.d(k - 1).column_basis();
            let reps = Matrix::complement_basis(&bp, &kspace)?;
            if reps.cols() == 0 {
                continue;
            }
            let c = d
                .d(k - 1)
                .solve(&(&g.block(k) * &reps))?
                .ok_or_else(|| Error::Invariant("g(z) is not a coboundary".into()))?;
            pending.push((k - 1, reps, c));
        }
        if pending.is_empty() {
            return Err(Error::Invariant(
                "g is not a quasi-isomorphism but no cocycle needs killing".into(),
            ));
        }
        t.stages.push(BTreeMap::new());
        for (i, reps, c) in pending {
            t.add_cells(i, &reps, &c);
        }
    }
}

/// The disk factorization `C -> C ⊕ disks -> D`: one disk per basis vector
/// of `D^i`, with its degree-`i` generator sent onto that vector.
pub fn factor_coch_cw_f(alpha: &ChainMap) -> Result<CwFFactorization> {
    if !alpha.is_chain_map() {
        return Err(Error::Precondition("factor_coch_cw_f needs a chain map".into()));
    }
    let (c, d) = (alpha.src().clone(), alpha.tgt().clone());
    let f = c.field();
    let (lo, hi) = match window_union([c.window(), d.window()]) {
        Some((lo, hi)) => (lo, hi + 1),
        None => (0, -1),
    };
    // Degree k: C^k, then generators x (dim D^k), then their boundaries (dim D^(k-1)).
    let dim = |k: i32| c.dim(k) + d.dim(k) + d.dim(k - 1);
    let q_cx = Complex::from_fn(f, lo, hi, dim, |k| {
        let mut m = Matrix::zeros(f, dim(k + 1), dim(k));
        m.set_block(0, 0, &c.d(k));
        m.set_block(c.dim(k + 1) + d.dim(k + 1), c.dim(k), &Matrix::identity(f, d.dim(k)));
        m
    })?
    .into_arc();
    let j = GradedMap::from_fn(&c, &q_cx, 0, |k| {
        Matrix::identity(f, dim(k)).block(0, 0, dim(k), c.dim(k))
    })?;
    let r = GradedMap::from_fn(&q_cx, &c, 0, |k| {
        Matrix::identity(f, dim(k)).block(0, 0, c.dim(k), dim(k))
    })?;
    let h = GradedMap::from_fn(&q_cx, &q_cx, -1, |k| {
        let mut m = Matrix::zeros(f, dim(k - 1), dim(k));
        let n = d.dim(k - 1);
        m.set_block(c.dim(k - 1), c.dim(k) + d.dim(k), &Matrix::identity(f, n).neg());
        m
    })?;
    let q = GradedMap::from_fn(&q_cx, &d, 0, |k| {
        Matrix::hstack(
            f,
            d.dim(k),
            &[&alpha.block(k), &Matrix::identity(f, d.dim(k)), &d.d(k - 1)],
        )
    })?;
    let out = CwFFactorization {
        j: Deformation { i: j, r, h },
        q,
    };
    let report = out.j.validate();
    if !report.passed() || !is_fibration(&out.q) || !out.q.is_chain_map() {
        return Err(Error::Invariant(format!("disk factorization failed:\n{report}")));
    }
    Ok(out)
}

/// A commutative square `p f = g i`; a lift `h: B -> X` has `h i = f`
/// and `p h = g`.
#[derive(Clone, Debug)]
pub struct LiftingProblem {
    pub i: ChainMap,
    pub f: ChainMap,
    pub p: ChainMap,
    pub g: ChainMap,
}

impl LiftingProblem {
    pub fn new(i: ChainMap, f: ChainMap, p: ChainMap, g: ChainMap) -> Result<Self> {
        let prob = LiftingProblem { i, f, p, g };
        if prob.p.try_compose(&prob.f)? != prob.g.try_compose(&prob.i)? {
            return Err(Error::Precondition("lifting square does not commute".into()));
        }
        Ok(prob)
    }

    pub fn check(&self, h: &ChainMap) -> bool {
        h.is_chain_map()
            && h.try_compose(&self.i).map_or(false, |x| x == self.f)
            && self.p.try_compose(h).map_or(false, |x| x == self.g)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "A": self.i.src().to_json(),
            "B": self.i.tgt().to_json(),
            "X": self.p.src().to_json(),
            "Y": self.p.tgt().to_json(),
            "i": self.i.to_json(),
            "f": self.f.to_json(),
            "p": self.p.to_json(),
            "g": self.g.to_json(),
        })
    }

    pub fn from_json(v: &Value, location: &str) -> Result<Self> {
        let get = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::parse(location, format!("missing `{k}`")))
        };
        let cx = |k: &str| -> Result<Arc<Complex>> {
            Ok(Complex::from_json(get(k)?, &format!("{location}.{k}"))?.into_arc())
        };
        let (a, b, x, y) = (cx("A")?, cx("B")?, cx("X")?, cx("Y")?);
        let map = |k: &str, s: &Arc<Complex>, t: &Arc<Complex>| {
            GradedMap::from_json(get(k)?, s, t, &format!("{location}.{k}"))
        };
        let prob = LiftingProblem {
            i: map("i", &a, &b)?,
            f: map("f", &a, &x)?,
            p: map("p", &x, &y)?,
            g: map("g", &b, &y)?,
        };
        if &prob.p * &prob.f != &prob.g * &prob.i {
            return Err(Error::parse(location, "square does not commute"));
        }
        Ok(prob)
    }
}

/// Cell-by-cell lift of a semifree extension against a surjective
/// quasi-isomorphism. Each cell solves `d x = h(da)`, `p x = g(a)` at once.
pub fn lift_semifree(prob: &LiftingProblem, cells: &SemifreeExtension) -> Result<ChainMap> {
    if cells.f != prob.i {
        return Err(Error::Precondition("cell data does not describe i".into()));
    }
    if !is_fibration(&prob.p) || !is_quasi_iso(&prob.p) {
        return Err(Error::Precondition("p must be a surjective quasi-isomorphism".into()));
    }
    let (b, x) = (prob.i.tgt().clone(), prob.p.src().clone());
    let f = b.field();
    let Some((lo, hi)) = b.window() else {
        return GradedMap::from_fn(&b, &x, 0, |_| unreachable!());
    };
    let mut inverse = BTreeMap::new();
    let mut values = BTreeMap::new();
    let mut elim = BTreeMap::new();
    for k in lo..=hi {
        let s = cells.basis(k);
        inverse.insert(
            k,
            s.inverse()
                .ok_or_else(|| Error::Invariant(format!("cells do not form a basis in degree {k}")))?,
        );
        let mut hs = Matrix::zeros(f, x.dim(k), b.dim(k));
        hs.set_block(0, 0, &prob.f.block(k));
        values.insert(k, hs);
        let sys = Matrix::vstack(f, x.dim(k), &[&x.d(k), &prob.p.block(k)]);
        elim.insert(k, sys.eliminate());
    }
    let h_at = |values: &BTreeMap<i32, Matrix>, k: i32, v: &Matrix| -> Matrix {
        match (values.get(&k), inverse.get(&k)) {
            (Some(hs), Some(inv)) => &(hs * inv) * v,
            _ => Matrix::zeros(f, x.dim(k), v.cols()),
        }
    };
    for (n, stage) in cells.stages.iter().enumerate() {
        let mut solved = Vec::new();
        for (&k, a) in &stage.cells {
            let da = &*b.d(k) * a;
            let top = h_at(&values, k + 1, &da);
            let bottom = &prob.g.block(k) * a;
            let rhs = Matrix::vstack(f, a.cols(), &[&top, &bottom]);
            let sol = elim[&k].solve(&rhs).ok_or_else(|| {
                Error::Invariant(format!("no lift for the cells of stage {n} in degree {k}"))
            })?;
            solved.push((k, cells.offset(n, k), sol));
        }
        for (k, off, sol) in solved {
            values.get_mut(&k).unwrap().set_block(0, off, &sol);
        }
    }
    let h = GradedMap::from_fn(&b, &x, 0, |k| &values[&k] * &inverse[&k])?;
    if !prob.check(&h) {
        return Err(Error::Invariant("lift_semifree produced a non-lift".into()));
    }
    Ok(h)
}

/// Closed-form lift of a trivial cofibration with deformation data against
/// a degreewise surjection: `λ = f r - (d s g H + s g H d)` for any
/// degreewise section `s` of `p`.
pub fn lift_trivial_cofibration(prob: &LiftingProblem, def: &Deformation) -> Result<ChainMap> {
    if def.i != prob.i {
        return Err(Error::Precondition("deformation data does not describe i".into()));
    }
    let (x, y) = (prob.p.src().clone(), prob.p.tgt().clone());
    let mut sections = BTreeMap::new();
    for k in y.degrees() {
        let s = prob.p.block(k).right_inverse().ok_or_else(|| {
            Error::Precondition(format!("p is not surjective in degree {k}"))
        })?;
        sections.insert(k, s);
    }
    let s = GradedMap::from_fn(&y, &x, 0, |k| {
        sections
            .get(&k)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(x.field(), x.dim(k), y.dim(k)))
    })?;
    let t = s.try_compose(&prob.g.try_compose(&def.h)?)?;
    let h = prob.f.try_compose(&def.r)?.try_sub(&t.d_commutator()?)?;
    if !prob.check(&h) {
        return Err(Error::Invariant("closed-form lift failed its equations".into()));
    }
    Ok(h)
}

/// Solves `h i = f`, `p h = g`, `d h = h d` as one linear system. `h` is
/// pinned to `f` on `im i` and to a solution of `p U = g` on a complement,
/// so only kernel directions of `p` are left free.
pub fn lift_linear(prob: &LiftingProblem) -> Result<Option<ChainMap>> {
    let (b, x) = (prob.i.tgt().clone(), prob.p.src().clone());
    let f = b.field();
    let Some((lo, hi)) = b.window() else {
        let h = GradedMap::zero(&b, &x, 0);
        return Ok(prob.check(&h).then_some(h));
    };
    struct Slice {
        base: Matrix,
        kernel: Matrix,
        coords: Matrix,
        var: usize,
    }
    let mut sys = LinearSystem::new(f);
    let mut slices = BTreeMap::new();
    for k in lo..=hi {
        let ik = prob.i.block(k);
        let piv = ik.pivot_columns();
        let ib = ik.select_columns(&piv);
        let fb = prob.f.block(k).select_columns(&piv);
        let t = ib.complete_to_basis();
        let s = Matrix::hstack(f, b.dim(k), &[&ib, &t]);
        let inv = s.inverse().expect("image plus completion is a basis");
        let r = inv.block(0, 0, ib.cols(), b.dim(k));
        let e = inv.block(ib.cols(), 0, t.cols(), b.dim(k));
        let Some(u0) = prob.p.block(k).solve(&(&prob.g.block(k) * &t))? else {
            return Ok(None);
        };
        let kernel = prob.p.block(k).kernel_basis();
        let base = &(&fb * &r) + &(&u0 * &e);
        let var = sys.unknown(kernel.cols(), t.cols());
        slices.insert(k, Slice { base, kernel, coords: e, var });
    }
    for k in lo..=hi {
        let dx = x.d(k).into_owned();
        let db = b.d(k).into_owned();
        let cur = &slices[&k];
        let next_base = slices
            .get(&(k + 1))
            .map_or_else(|| Matrix::zeros(f, x.dim(k + 1), b.dim(k + 1)), |s| s.base.clone());
        let rhs = &(&next_base * &db) - &(&dx * &cur.base);
        let eq = sys.equation(x.dim(k + 1), b.dim(k), Some(rhs))?;
        sys.term(eq, &dx * &cur.kernel, cur.var, cur.coords.clone())?;
        if let Some(nx) = slices.get(&(k + 1)) {
            sys.term(eq, nx.kernel.neg(), nx.var, &nx.coords * &db)?;
        }
    }
    let Some(vs) = sys.solve_one() else {
        return Ok(None);
    };
    let h = GradedMap::from_fn(&b, &x, 0, |k| {
        let s = &slices[&k];
        &s.base + &(&(&s.kernel * &vs[s.var]) * &s.coords)
    })?;
    if h.try_compose(&prob.i)? != prob.f {
        return Ok(None);
    }
    if !prob.check(&h) {
        return Err(Error::Invariant("lift_linear solution fails its equations".into()));
    }
    Ok(Some(h))
}

/// `g` as a retract of the semifree extension from its factorization.
#[derive(Clone, Debug)]
pub struct RetractPresentation {
    pub g: ChainMap,
    pub f: SemifreeExtension,
    pub section: ChainMap,
    pub retraction: ChainMap,
}

impl RetractPresentation {
    pub fn validate(&self) -> Report {
        let mut report = Report::new("retract presentation");
        report.check("retraction*section=Id", (&self.retraction * &self.section).is_identity());
        report.check("section*g=f", &self.section * &self.g == self.f.f);
        report.check("retraction*f=g", &self.retraction * &self.f.f == self.g);
        report.check("section chain map", self.section.is_chain_map());
        report.absorb("cells", self.f.validate());
        report
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cells": self.f.to_json(),
            "section": self.section.to_json(),
            "retraction": self.retraction.to_json(),
        })
    }
}

/// Factors the cofibration `g` through a semifree extension and lifts the
/// square `(g, f, q, Id)` to exhibit `g` as a retract of it.
pub fn exhibit_retract(g: &ChainMap) -> Result<RetractPresentation> {
    if !is_cofibration(g) {
        return Err(Error::Precondition("exhibit_retract needs an injective map".into()));
    }
    let fac = factor_coch_c_fw(g, None)?;
    let prob = LiftingProblem::new(
        g.clone(),
        fac.ext.f.clone(),
        fac.g.clone(),
        GradedMap::identity(g.tgt()),
    )?;
    let section = lift_linear(&prob)?
        .ok_or_else(|| Error::Invariant("cofibration does not lift against its factor".into()))?;
    let out = RetractPresentation {
        g: g.clone(),
        f: fac.ext,
        section,
        retraction: fac.g,
    };
    let report = out.validate();
    if !report.passed() {
        return Err(Error::Invariant(format!("retract presentation:\n{report}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::pushout;

    fn f2() -> Field {
        Field::prime(2).unwrap()
    }

    fn check_c_fw(alpha: &ChainMap) -> CFwFactorization {
        let fac = factor_coch_c_fw(alpha, None).unwrap();
        assert!(fac.ext.validate().passed(), "{}", fac.ext.validate());
        assert!(is_fibration(&fac.g) && is_quasi_iso(&fac.g));
        assert_eq!(&fac.g * &fac.ext.f, *alpha);
        fac
    }

    #[test]
    fn zero_map_of_zero() {
        let z = Complex::zero(f2()).into_arc();
        let fac = check_c_fw(&GradedMap::identity(&z));
        assert_eq!(fac.ext.cell_counts().iter().sum::<usize>(), 0);
    }

    #[test]
    fn identity_still_factors() {
        let c = Complex::disk(Field::prime(5).unwrap(), 1).into_arc();
        let fac = check_c_fw(&GradedMap::identity(&c));
        assert!(fac.ext.cell_counts()[1] > 0);
    }

    #[test]
    fn zero_into_sphere_over_f2() {
        // One cocycle cell, one basis cell, then one cell in degree -1
        // killing the difference of the two degree-0 generators.
        let z = Complex::zero(f2()).into_arc();
        let s = Complex::sphere(f2(), 0).into_arc();
        let fac = check_c_fw(&GradedMap::zero(&z, &s, 0));
        assert_eq!(fac.ext.cell_counts(), vec![1, 1, 1]);
        assert_eq!(fac.ext.stages[2].cells.keys().copied().collect::<Vec<_>>(), vec![-1]);
    }

    #[test]
    fn stage_cap_is_reported() {
        let z = Complex::zero(f2()).into_arc();
        let s = Complex::sphere(f2(), 0).into_arc();
        let err = factor_coch_c_fw(&GradedMap::zero(&z, &s, 0), Some(2)).unwrap_err();
        assert!(matches!(err, Error::NonTermination { stages: 2, .. }));
    }

    #[test]
    fn disk_factorization_classifies() {
        let f = Field::prime(3).unwrap();
        let c = Complex::sphere(f, 0).into_arc();
        let d = Complex::disk(f, 1).into_arc();
        let alpha = GradedMap::zero(&c, &d, 0);
        let fac = factor_coch_cw_f(&alpha).unwrap();
        assert!(is_cofibration(&fac.j.i) && is_quasi_iso(&fac.j.i) && is_fibration(&fac.q));
        assert_eq!(&fac.q * &fac.j.i, alpha);
        let to_zero = GradedMap::zero(&c, &Complex::zero(f).into_arc(), 0);
        let fac = factor_coch_cw_f(&to_zero).unwrap();
        assert_eq!(fac.j.i.tgt().total_dim(), c.total_dim());
    }

    #[test]
    fn lift_against_disk_onto_zero() {
        // B = C ⊕ one degree-0 cocycle cell, p: D(1) -> 0.
        let f = Field::Q;
        let c = Complex::zero(f).into_arc();
        let b = Complex::sphere(f, 0).into_arc();
        let x = Complex::disk(f, 1).into_arc();
        let y = Complex::zero(f).into_arc();
        let i = GradedMap::zero(&c, &b, 0);
        let cells = SemifreeExtension {
            f: i.clone(),
            stages: vec![Stage {
                cells: [(0, Matrix::identity(f, 1))].into_iter().collect(),
            }],
        };
        assert!(cells.validate().passed());
        let prob = LiftingProblem::new(i, GradedMap::zero(&c, &x, 0), GradedMap::zero(&x, &y, 0), GradedMap::zero(&b, &y, 0))
            .unwrap();
        let h = lift_semifree(&prob, &cells).unwrap();
        assert!(prob.check(&h));
        assert!(lift_linear(&prob).unwrap().is_some());
    }

    #[test]
    fn semifree_lift_against_factorization() {
        let f = Field::prime(5).unwrap();
        let c = Complex::sphere(f, 0).into_arc();
        let d = Complex::disk(f, 1).into_arc();
        let alpha = GradedMap::zero(&c, &d, 0);
        let fac = factor_coch_c_fw(&alpha, None).unwrap();
        let prob = LiftingProblem::new(
            fac.ext.f.clone(),
            fac.ext.f.clone(),
            fac.g.clone(),
            fac.g.clone(),
        )
        .unwrap();
        let h = lift_semifree(&prob, &fac.ext).unwrap();
        assert!(prob.check(&h));
        assert!(lift_linear(&prob).unwrap().is_some());
    }

    #[test]
    fn trivial_cofibration_lift() {
        let f = Field::prime(7).unwrap();
        let c = Complex::sphere(f, 1).into_arc();
        let d = Complex::disk(f, 1).into_arc();
        let alpha = GradedMap::zero(&c, &d, 0);
        let fac = factor_coch_cw_f(&alpha).unwrap();
        let prob = LiftingProblem::new(fac.j.i.clone(), fac.j.i.clone(), fac.q.clone(), fac.q.clone())
            .unwrap();
        let h = lift_trivial_cofibration(&prob, &fac.j).unwrap();
        assert!(prob.check(&h));
    }

    #[test]
    fn forced_lifts() {
        let f = Field::prime(3).unwrap();
        let a = Complex::disk(f, 0).into_arc();
        let x = Complex::sphere(f, 2).into_arc();
        let y = Complex::zero(f).into_arc();
        let id = GradedMap::identity(&a);
        let fm = GradedMap::zero(&a, &x, 0);
        let prob =
            LiftingProblem::new(id, fm.clone(), GradedMap::zero(&x, &y, 0), GradedMap::zero(&a, &y, 0))
                .unwrap();
        assert_eq!(lift_linear(&prob).unwrap().unwrap(), fm);
    }

    #[test]
    fn transported_cells_stay_attached() {
        let f = Field::prime(5).unwrap();
        let z = Complex::zero(f).into_arc();
        let s = Complex::sphere(f, 0).into_arc();
        let fac = factor_coch_c_fw(&GradedMap::zero(&z, &s, 0), None).unwrap();
        let other = Complex::disk(f, 2).into_arc();
        let po = pushout(&fac.ext.f, &GradedMap::zero(&z, &other, 0)).unwrap();
        let moved = fac.ext.transport(&po);
        assert!(moved.validate().passed());
        assert_eq!(moved.cell_counts(), fac.ext.cell_counts());
    }

    #[test]
    fn retract_of_sphere_inclusion() {
        let f = f2();
        let z = Complex::zero(f).into_arc();
        let s = Complex::sphere(f, 0).into_arc();
        let pres = exhibit_retract(&GradedMap::zero(&z, &s, 0)).unwrap();
        assert!(pres.validate().passed());
        let id = exhibit_retract(&GradedMap::identity(&s)).unwrap();
        assert!(id.validate().passed());
    }
}
