//! Seeded generators for complexes, maps and contraction data, and the
//! fuzz campaigns that check the library's identities on them.
//!
//! Every generated object is a sum of spheres and disks conjugated by
//! random degreewise automorphisms, so validity holds by construction and
//! the canonical structure is available for building further maps.

use std::collections::BTreeMap;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::complex::{
    induced_map, is_cofibration, is_fibration, is_quasi_iso, path_exact_sequence_report, path_map,
    path_object, sum_map, direct_sum, validate_complex, ChainMap, Complex, GradedMap,
};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, Scalar};
use crate::model::{
    factor_ar, factor_contr, factorization_naturality, lift_ar, lift_contr, Flavor, Square,
};
use crate::perturb::{nullhomotopy_witness, trick2, trick2_functoriality_check, trick3, trick3_signed};
use crate::retract::{
    check_ar_morphism, check_contr_morphism, check_contraction, trick1,
    AcyclicRetraction, ArMorphism, Contraction, ContrMorphism, Morphism, Sdr,
};
use crate::semifree::{exhibit_retract, factor_coch_c_fw, lift_linear, lift_semifree, LiftingProblem};

/// Generator parameters. `density` is the probability that a free matrix
/// entry is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub field: Field,
    pub support: (i32, i32),
    pub max_dim: usize,
    pub density: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            field: Field::prime(5).expect("5 is prime"),
            support: (-3, 3),
            max_dim: 6,
            density: 0.5,
        }
    }
}

impl GenConfig {
    pub fn new(field: Field, support: (i32, i32), max_dim: usize) -> Self {
        GenConfig {
            field,
            support,
            max_dim,
            ..GenConfig::default()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        GenConfig {
            seed,
            ..self.clone()
        }
    }

    /// Scale suited to a campaign when nothing else is specified.
    pub fn for_campaign(name: &str) -> Self {
        match name {
            "semifree" => GenConfig::new(Field::prime(5).unwrap(), (-2, 2), 5),
            "mc-ar" | "mc-contr" => GenConfig::new(Field::prime(5).unwrap(), (-1, 2), 3),
            _ => GenConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.support.0 > self.support.1 {
            return Err(Error::Precondition("support needs lo <= hi".into()));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::Precondition("density must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "field": self.field.to_string(),
            "support": [self.support.0, self.support.1],
            "max_dim": self.max_dim,
            "density": self.density,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Summand {
    Sphere(i32),
    /// Generators in degrees `b` and `b + 1`.
    Disk(i32),
}

impl Summand {
    fn has(self, i: i32) -> bool {
        match self {
            Summand::Sphere(n) => i == n,
            Summand::Disk(b) => i == b || i == b + 1,
        }
    }
}

/// A sum of spheres and disks; generators in each degree follow the order
/// of `cells`.
#[derive(Clone, Debug)]
struct Layout {
    lo: i32,
    hi: i32,
    cells: Vec<Summand>,
}

impl Layout {
    fn dim(&self, i: i32) -> usize {
        self.cells.iter().filter(|c| c.has(i)).count()
    }

    fn position(&self, cell: usize, i: i32) -> Option<usize> {
        if !self.cells[cell].has(i) {
            return None;
        }
        Some(self.cells[..cell].iter().filter(|c| c.has(i)).count())
    }

    fn differential(&self, field: Field, i: i32) -> Matrix {
        let mut m = Matrix::zeros(field, self.dim(i + 1), self.dim(i));
        for (k, c) in self.cells.iter().enumerate() {
            if *c == Summand::Disk(i) {
                let (r, s) = (self.position(k, i + 1).unwrap(), self.position(k, i).unwrap());
                m.set(r, s, field.one());
            }
        }
        m
    }

    /// Inclusion of the sub-layout made of the first `count` cells.
    fn prefix_inclusion(&self, field: Field, count: usize, i: i32) -> Matrix {
        let sub = Layout {
            lo: self.lo,
            hi: self.hi,
            cells: self.cells[..count].to_vec(),
        };
        let mut m = Matrix::zeros(field, self.dim(i), sub.dim(i));
        for k in 0..count {
            if let (Some(r), Some(s)) = (self.position(k, i), sub.position(k, i)) {
                m.set(r, s, field.one());
            }
        }
        m
    }
}

/// A generated complex together with its canonical form.
#[derive(Clone, Debug)]
pub struct Structured {
    pub complex: Arc<Complex>,
    layout: Layout,
    phi: BTreeMap<i32, Matrix>,
    phi_inv: BTreeMap<i32, Matrix>,
}

impl Structured {
    fn phi(&self, i: i32) -> Matrix {
        self.phi
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.complex.field(), 0, 0))
    }

    fn phi_inv(&self, i: i32) -> Matrix {
        self.phi_inv
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.complex.field(), 0, 0))
    }

    /// `φ_Y m φ_X⁻¹` for a block `m` written in canonical coordinates.
    fn conjugate(y: &Structured, x: &Structured, i: i32, j: i32, m: &Matrix) -> Matrix {
        &(&y.phi(j) * m) * &x.phi_inv(i)
    }
}

/// Random source bound to a configuration.
pub struct Gen {
    cfg: GenConfig,
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(cfg: &GenConfig) -> Self {
        Gen {
            cfg: cfg.clone(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        }
    }

    pub fn config(&self) -> &GenConfig {
        &self.cfg
    }

    fn field(&self) -> Field {
        self.cfg.field
    }

    fn nonzero(&mut self) -> Scalar {
        let f = self.field();
        match f.characteristic() {
            0 => {
                let v = self.rng.gen_range(1..=3) * if self.rng.gen_bool(0.5) { 1 } else { -1 };
                f.from_i64(v)
            }
            p => f.from_i64(self.rng.gen_range(1..p as i64)),
        }
    }

    fn entry(&mut self) -> Scalar {
        if self.rng.gen_bool(self.cfg.density) {
            self.nonzero()
        } else {
            self.field().zero()
        }
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(self.field(), rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = self.entry();
                m.set(r, c, v);
            }
        }
        m
    }

    /// `L U P` with `L` unit lower, `U` upper with nonzero diagonal and `P`
    /// a permutation; returns the matrix and its inverse. Over Q the
    /// diagonal is ±1, keeping both integral.
    pub fn automorphism(&mut self, n: usize) -> (Matrix, Matrix) {
        let f = self.field();
        let mut l = Matrix::identity(f, n);
        let mut u = Matrix::zeros(f, n, n);
        for r in 0..n {
            for c in 0..n {
                if r > c {
                    let v = self.entry();
                    l.set(r, c, v);
                } else if r == c {
                    let v = if f.characteristic() == 0 {
                        f.from_i64(if self.rng.gen_bool(0.5) { 1 } else { -1 })
                    } else {
                        self.nonzero()
                    };
                    u.set(r, c, v);
                } else {
                    let v = self.entry();
                    u.set(r, c, v);
                }
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in (1..n).rev() {
            let j = self.rng.gen_range(0..=k);
            perm.swap(k, j);
        }
        let p = Matrix::identity(f, n).select_columns(&perm);
        let m = &(&l * &u) * &p;
        let inv = m.inverse().expect("LUP with invertible factors");
        (m, inv)
    }

    fn extend(&mut self, layout: &mut Layout, spheres: bool) {
        let (lo, hi, cap) = (layout.lo, layout.hi, self.cfg.max_dim);
        for i in lo..=hi {
            let room = cap.saturating_sub(layout.dim(i));
            let count = self.rng.gen_range(0..=room);
            for _ in 0..count {
                if layout.dim(i) >= cap {
                    break;
                }
                let disk_ok = i < hi && layout.dim(i + 1) < cap;
                let cell = if disk_ok && (!spheres || self.rng.gen_bool(0.5)) {
                    Summand::Disk(i)
                } else if spheres {
                    Summand::Sphere(i)
                } else {
                    continue;
                };
                layout.cells.push(cell);
            }
        }
    }

    fn empty_layout(&self) -> Layout {
        Layout {
            lo: self.cfg.support.0,
            hi: self.cfg.support.1,
            cells: Vec::new(),
        }
    }

    fn realize(&mut self, layout: Layout) -> Structured {
        let f = self.field();
        let mut phi = BTreeMap::new();
        let mut phi_inv = BTreeMap::new();
        for i in layout.lo..=layout.hi {
            let (m, inv) = self.automorphism(layout.dim(i));
            phi.insert(i, m);
            phi_inv.insert(i, inv);
        }
        let complex = Complex::from_fn(
            f,
            layout.lo,
            layout.hi,
            |i| layout.dim(i),
            |i| &(&phi[&(i + 1)] * &layout.differential(f, i)) * &phi_inv[&i],
        )
        .expect("conjugated canonical complex")
        .into_arc();
        Structured {
            complex,
            layout,
            phi,
            phi_inv,
        }
    }

    pub fn complex(&mut self) -> Structured {
        let mut l = self.empty_layout();
        self.extend(&mut l, true);
        self.realize(l)
    }

    /// `small -> big` where `big` extends the layout of `small`; the map is
    /// the canonical inclusion (or projection, with `onto`) conjugated.
    fn prefix_map(&mut self, small: &Structured, big: &Structured, onto: bool) -> ChainMap {
        let f = self.field();
        let count = small.layout.cells.len();
        if onto {
            GradedMap::from_fn(&big.complex, &small.complex, 0, |i| {
                let canon = big.layout.prefix_inclusion(f, count, i).transpose();
                Structured::conjugate(small, big, i, i, &canon)
            })
            .expect("projection shapes")
        } else {
            GradedMap::from_fn(&small.complex, &big.complex, 0, |i| {
                let canon = big.layout.prefix_inclusion(f, count, i);
                Structured::conjugate(big, small, i, i, &canon)
            })
            .expect("inclusion shapes")
        }
    }

    fn grown(&mut self, small: &Structured, spheres: bool) -> Structured {
        let mut l = small.layout.clone();
        self.extend(&mut l, spheres);
        self.realize(l)
    }

    /// `N = M ⊕ E` with `E` a sum of disks and `h = -1` from the top to the
    /// bottom generator of each disk of `E`, then conjugated.
    pub fn contraction(&mut self) -> (Contraction, Structured) {
        let f = self.field();
        let m = self.complex();
        let n = self.grown(&m, false);
        let iota = self.prefix_map(&m, &n, false);
        let pi = self.prefix_map(&m, &n, true);
        let k = m.layout.cells.len();
        let h = GradedMap::from_fn(&n.complex, &n.complex, -1, |i| {
            let mut canon = Matrix::zeros(f, n.layout.dim(i - 1), n.layout.dim(i));
            for (c, cell) in n.layout.cells.iter().enumerate().skip(k) {
                if *cell == Summand::Disk(i - 1) {
                    let (r, s) = (n.layout.position(c, i - 1).unwrap(), n.layout.position(c, i).unwrap());
                    canon.set(r, s, f.from_i64(-1));
                }
            }
            Structured::conjugate(&n, &n, i, i - 1, &canon)
        })
        .expect("homotopy shapes");
        let ar = AcyclicRetraction::new(iota, pi).expect("matching ends");
        (Sdr::new(ar, h).expect("degree -1 on N"), n)
    }

    /// `h + dξ - ξd` for a random `ξ` of degree -2.
    pub fn perturbed(&mut self, c: &Contraction) -> Sdr {
        let n = c.ar.n.clone();
        let xi = self.graded(&n, &n, -2);
        let d = GradedMap::differential(&n);
        let h = &(&c.h + &(&d * &xi)) - &(&xi * &d);
        c.with_homotopy(h).expect("same complex")
    }

    pub fn sdr(&mut self) -> (Sdr, Structured) {
        let (c, s) = self.contraction();
        (self.perturbed(&c), s)
    }

    /// Random graded map of the given degree, not necessarily a chain map.
    pub fn graded(&mut self, x: &Arc<Complex>, y: &Arc<Complex>, degree: i32) -> GradedMap {
        let blocks: BTreeMap<i32, Matrix> = x
            .degrees()
            .map(|i| (i, self.matrix(y.dim(i + degree), x.dim(i))))
            .collect();
        GradedMap::from_fn(x, y, degree, |i| {
            blocks
                .get(&i)
                .cloned()
                .unwrap_or_else(|| Matrix::zeros(x.field(), y.dim(i + degree), x.dim(i)))
        })
        .expect("random blocks have the right shapes")
    }

    /// A random map on spheres plus a random null-homotopic map; every
    /// chain map has this form up to the choice of homotopy.
    pub fn chain_map(&mut self, x: &Structured, y: &Structured) -> ChainMap {
        let f = self.field();
        let mut sphere_part = BTreeMap::new();
        for i in x.complex.degrees() {
            let mut canon = Matrix::zeros(f, y.layout.dim(i), x.layout.dim(i));
            for (a, ca) in x.layout.cells.iter().enumerate() {
                for (b, cb) in y.layout.cells.iter().enumerate() {
                    if *ca == Summand::Sphere(i) && *cb == Summand::Sphere(i) {
                        let v = self.entry();
                        canon.set(y.layout.position(b, i).unwrap(), x.layout.position(a, i).unwrap(), v);
                    }
                }
            }
            sphere_part.insert(i, Structured::conjugate(y, x, i, i, &canon));
        }
        let spheres = GradedMap::from_fn(&x.complex, &y.complex, 0, |i| {
            sphere_part
                .get(&i)
                .cloned()
                .unwrap_or_else(|| Matrix::zeros(f, y.complex.dim(i), x.complex.dim(i)))
        })
        .expect("sphere blocks");
        let s = self.graded(&x.complex, &y.complex, -1);
        &spheres + &s.d_commutator().expect("degree -1 commutator")
    }

    /// Projection `X = Y ⊕ disks -> Y`.
    pub fn surjective_qis(&mut self) -> (ChainMap, Structured, Structured) {
        let y = self.complex();
        let x = self.grown(&y, false);
        (self.prefix_map(&y, &x, true), x, y)
    }

    /// Projection `X = Y ⊕ Z -> Y` with `Z` arbitrary.
    pub fn surjection(&mut self) -> (ChainMap, Structured, Structured) {
        let y = self.complex();
        let x = self.grown(&y, true);
        (self.prefix_map(&y, &x, true), x, y)
    }

    /// Inclusion `C -> C ⊕ Z`.
    pub fn injection(&mut self) -> (ChainMap, Structured, Structured) {
        let c = self.complex();
        let d = self.grown(&c, true);
        (self.prefix_map(&c, &d, false), c, d)
    }

    /// An SDR isomorphic to `x` by a random degreewise automorphism `ψ`,
    /// returned with `ψ` as a morphism of SDRs.
    pub fn conjugate_sdr(&mut self, x: &Sdr) -> Morphism<Sdr> {
        let n = x.ar.n.clone();
        let mut psi = BTreeMap::new();
        let mut inv = BTreeMap::new();
        for i in n.degrees() {
            let (m, mi) = self.automorphism(n.dim(i));
            psi.insert(i, m);
            inv.insert(i, mi);
        }
        let f = n.field();
        let n2 = Complex::from_fn(f, n.lo(), n.hi(), |i| n.dim(i), |i| {
            &(&psi[&(i + 1)] * &n.d(i)) * &inv[&i]
        })
        .expect("conjugated complex")
        .into_arc();
        let to = GradedMap::from_fn(&n, &n2, 0, |i| psi[&i].clone()).unwrap();
        let back = GradedMap::from_fn(&n2, &n, 0, |i| inv[&i].clone()).unwrap();
        let ar = AcyclicRetraction::new(to.try_compose(&x.ar.iota).unwrap(), x.ar.pi.try_compose(&back).unwrap())
            .unwrap();
        let h = to.try_compose(&x.h.try_compose(&back).unwrap()).unwrap();
        let tgt = Sdr::new(ar, h).unwrap();
        Morphism {
            src: x.clone(),
            tgt,
            f: to,
        }
    }
}

pub fn generate_random_complex(cfg: &GenConfig) -> Complex {
    (*Gen::new(cfg).complex().complex).clone()
}

pub fn generate_random_contraction(cfg: &GenConfig) -> Contraction {
    Gen::new(cfg).contraction().0
}

pub fn generate_random_sdr(cfg: &GenConfig) -> Sdr {
    Gen::new(cfg).sdr().0
}

pub fn generate_surjective_qis(cfg: &GenConfig) -> ChainMap {
    Gen::new(cfg).surjective_qis().0
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub seed: u64,
    pub input: Value,
    pub identity: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzReport {
    pub campaign: String,
    pub trials: usize,
    pub failures: Vec<Failure>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "campaign": self.campaign,
            "trials": self.trials,
            "failures": self.failures.iter().map(|f| json!({
                "seed": f.seed,
                "input": f.input,
                "identity": f.identity,
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} trials, {} failures", self.campaign, self.trials, self.failures.len())?;
        for x in self.failures.iter().take(5) {
            write!(f, "\n  seed {}: {}", x.seed, x.identity)?;
        }
        Ok(())
    }
}

/// A violated identity with the instance that violates it.
#[derive(Debug)]
struct Violation {
    identity: String,
    input: Value,
}

type Trial = std::result::Result<(), Violation>;

fn ensure(ok: bool, identity: &str, input: impl FnOnce() -> Value) -> Trial {
    if ok {
        Ok(())
    } else {
        Err(Violation {
            identity: identity.to_string(),
            input: input(),
        })
    }
}

fn attempt<T>(r: Result<T>, identity: &str, input: impl FnOnce() -> Value) -> std::result::Result<T, Violation> {
    r.map_err(|e| Violation {
        identity: format!("{identity} ({e})"),
        input: input(),
    })
}

fn report(r: &crate::report::Report, prefix: &str, input: impl FnOnce() -> Value) -> Trial {
    match r.failures().next() {
        None => Ok(()),
        Some(c) => Err(Violation {
            identity: format!("{prefix}.{}", c.identity),
            input: input(),
        }),
    }
}

fn map_json(m: &GradedMap) -> Value {
    json!({"src": m.src().to_json(), "tgt": m.tgt().to_json(), "map": m.to_json()})
}

fn trial_tricks(g: &mut Gen) -> Trial {
    let (c1, s1) = g.contraction();
    let (c2, s2) = g.contraction();
    let (c3, s3) = g.contraction();
    for c in [&c1, &c2, &c3] {
        report(&check_contraction(c), "generator", || c.to_json())?;
    }
    let f = g.chain_map(&s1, &s2);
    let k = g.chain_map(&s2, &s3);
    let input = || json!({"src": c1.to_json(), "tgt": c2.to_json(), "f": f.to_json()});

    let fh = attempt(trick1(&f, &c1.ar, &c2.ar), "trick1", input)?;
    ensure(check_ar_morphism(&fh), "trick1.ar-morphism", input)?;
    let (ip, iota_pi) = (c2.ar.projector(), c1.ar.projector());
    let id1 = GradedMap::identity(&c1.ar.n);
    let id2 = GradedMap::identity(&c2.ar.n);
    let defect = &(&(&ip * &f) * &(&id1 - &iota_pi)) + &(&(&id2 - &ip) * &(&f * &iota_pi));
    ensure(&f - &fh.f == defect, "trick1.defect-formula", input)?;
    let trivial = induced_map(&(&f - &fh.f)).values().all(Matrix::is_zero);
    ensure(trivial, "trick1.cohomology-trivial-defect", input)?;
    let again = attempt(trick1(&fh.f, &c1.ar, &c2.ar), "trick1", input)?;
    ensure(again.f == fh.f, "trick1.fixed-point", input)?;
    let kh = attempt(trick1(&k, &c2.ar, &c3.ar), "trick1", input)?;
    let left = attempt(trick1(&(&kh.f * &f), &c1.ar, &c3.ar), "trick1", input)?;
    ensure(left.f == &kh.f * &fh.f, "trick1.functoriality-left", input)?;
    let right = attempt(trick1(&(&k * &fh.f), &c1.ar, &c3.ar), "trick1", input)?;
    ensure(right.f == &kh.f * &fh.f, "trick1.functoriality-right", input)?;

    let sdr = g.perturbed(&c1);
    let sinput = || sdr.to_json();
    let normal = attempt(trick2(&sdr), "trick2", sinput)?;
    report(&check_contraction(&normal), "trick2.contraction", sinput)?;
    let fixed = attempt(trick2(&c1), "trick2", || c1.to_json())?;
    ensure(fixed == c1, "trick2.fixed-point", || c1.to_json())?;
    let conj = g.conjugate_sdr(&sdr);
    let natural = attempt(trick2_functoriality_check(&conj), "trick2", sinput)?;
    ensure(natural, "trick2.functoriality", sinput)?;

    let fm = Morphism {
        src: c1.clone(),
        tgt: c2.clone(),
        f: fh.f.clone(),
    };
    let ft = attempt(trick3(&fm), "trick3", input)?;
    ensure(check_contr_morphism(&ft), "trick3.contr-morphism", input)?;
    let d1 = GradedMap::differential(&c1.ar.n);
    let d2 = GradedMap::differential(&c2.ar.n);
    let other = &(&fm.f + &(&(&d2 * &c2.h) * &fm.f)) - &(&(&fm.f * &d1) * &c1.h);
    ensure(ft.f == other, "trick3.closed-forms", input)?;
    let fixed = attempt(trick3(&ft), "trick3", input)?;
    ensure(fixed.f == ft.f, "trick3.fixed-point", input)?;
    let km = Morphism {
        src: c2.clone(),
        tgt: c3.clone(),
        f: kh.f.clone(),
    };
    let kt = attempt(trick3(&km), "trick3", input)?;
    let both = attempt(trick3(&Morphism { src: c1.clone(), tgt: c3.clone(), f: &kh.f * &fh.f }), "trick3", input)?;
    ensure(both.f == &kt.f * &ft.f, "trick3.composition", input)?;
    attempt(nullhomotopy_witness(&fm, &ft), "trick3.nullhomotopy", input)?;
    Ok(())
}

fn trial_contractions(g: &mut Gen) -> Trial {
    let (c, _) = g.contraction();
    report(&check_contraction(&c), "contraction", || c.to_json())
}

fn trial_mutant_generator(g: &mut Gen) -> Trial {
    let (c, _) = g.sdr();
    report(&check_contraction(&c), "contraction", || c.to_json())
}

fn trial_mutant_trick3(g: &mut Gen) -> Trial {
    let (c1, s1) = g.contraction();
    let (c2, s2) = g.contraction();
    let f = g.chain_map(&s1, &s2);
    let input = || json!({"src": c1.to_json(), "tgt": c2.to_json(), "f": f.to_json()});
    let fh = attempt(trick1(&f, &c1.ar, &c2.ar), "trick1", input)?;
    let flipped = trick3_signed(
        &Morphism {
            src: c1.clone(),
            tgt: c2.clone(),
            f: fh.f,
        },
        -1,
    );
    let m = Morphism {
        src: c1.clone(),
        tgt: c2.clone(),
        f: flipped,
    };
    ensure(check_contr_morphism(&m), "trick3.contr-morphism", input)
}

fn trial_path(g: &mut Gen) -> Trial {
    let b = g.complex();
    let input = || b.complex.to_json();
    let po = path_object(&b.complex);
    report(&validate_complex(&po.object), "path.delta", input)?;
    ensure(po.incl.is_chain_map() && po.proj.is_chain_map(), "path.structure-maps", input)?;
    ensure(is_quasi_iso(&po.incl), "path.incl-quasi-iso", input)?;
    ensure(is_fibration(&po.proj), "path.proj-surjective", input)?;

    let b2 = g.complex();
    let b3 = g.complex();
    let (f, k) = (g.chain_map(&b, &b2), g.chain_map(&b2, &b3));
    let (p2, p3) = (path_object(&b2.complex), path_object(&b3.complex));
    let ninput = || json!({"f": map_json(&f), "g": map_json(&k)});
    let whole = attempt(path_map(&(&k * &f), &po, &p3), "path.naturality", ninput)?;
    let parts = &attempt(path_map(&k, &p2, &p3), "path.naturality", ninput)?
        * &attempt(path_map(&f, &po, &p2), "path.naturality", ninput)?;
    ensure(whole == parts, "path.naturality", ninput)?;
    let id = attempt(path_map(&GradedMap::identity(&b.complex), &po, &po), "path.identity", input)?;
    ensure(id.is_identity(), "path.identity", input)?;

    let (q, _, _) = g.surjection();
    let qinput = || map_json(&q);
    let r = attempt(path_exact_sequence_report(&q), "path.exact", qinput)?;
    report(&r, "path.exact", qinput)
}

fn trial_semifree(g: &mut Gen) -> Trial {
    let x = g.complex();
    let y = g.complex();
    let alpha = g.chain_map(&x, &y);
    let input = || map_json(&alpha);
    let fac = attempt(factor_coch_c_fw(&alpha, None), "semifree.factor", input)?;
    ensure(is_cofibration(&fac.ext.f), "semifree.cofibration", input)?;
    ensure(is_fibration(&fac.g), "semifree.fibration", input)?;
    ensure(is_quasi_iso(&fac.g), "semifree.quasi-iso", input)?;
    ensure(&fac.g * &fac.ext.f == alpha, "semifree.composition", input)?;
    report(&fac.ext.validate(), "semifree.cells", input)?;

    // Square: i = cells, p a surjective qis, top and bottom from a chain map
    // u: P -> X perturbed by a homotopy vanishing on the image of i.
    let (p, xs, _) = g.surjective_qis();
    let big = fac.ext.target().clone();
    let v = g.chain_map(&y, &xs);
    let u = &v * &fac.g;
    let i = fac.ext.f.clone();
    let s = g.graded(&big, &xs.complex, -1);
    let s = &s - &(&s * &(&i * &left_inverse(&i)));
    let u2 = &u + &s.d_commutator().expect("degree -1");
    let prob = LiftingProblem {
        i: i.clone(),
        f: &u * &i,
        p: p.clone(),
        g: &p * &u2,
    };
    let pinput = || prob.to_json();
    ensure(&prob.p * &prob.f == &prob.g * &prob.i, "semifree.square-commutes", pinput)?;
    let h = attempt(lift_semifree(&prob, &fac.ext), "semifree.lift", pinput)?;
    ensure(prob.check(&h), "semifree.lift", pinput)?;
    let lin = attempt(lift_linear(&prob), "semifree.linear", pinput)?;
    ensure(lin.map_or(false, |h| prob.check(&h)), "semifree.linear-agrees", pinput)?;

    let (inj, _, _) = g.injection();
    let rinput = || map_json(&inj);
    let pres = attempt(exhibit_retract(&inj), "semifree.retract", rinput)?;
    report(&pres.validate(), "semifree.retract", rinput)
}

fn left_inverse(i: &ChainMap) -> GradedMap {
    GradedMap::from_fn(i.tgt(), i.src(), 0, |k| {
        i.block(k)
            .left_inverse()
            .expect("degreewise injective")
    })
    .expect("left inverse shapes")
}

fn random_ar_morphism(g: &mut Gen) -> (ArMorphism, Contraction, Contraction, Structured, Structured) {
    let (c1, s1) = g.contraction();
    let (c2, s2) = g.contraction();
    let f = g.chain_map(&s1, &s2);
    let fh = trick1(&f, &c1.ar, &c2.ar).expect("matching complexes");
    (fh, c1, c2, s1, s2)
}

fn random_contr_morphism(g: &mut Gen, c1: &Contraction, s1: &Structured, c2: &Contraction, s2: &Structured) -> ContrMorphism {
    let f = g.chain_map(s1, s2);
    let fh = trick1(&f, &c1.ar, &c2.ar).expect("matching complexes");
    trick3(&Morphism {
        src: c1.clone(),
        tgt: c2.clone(),
        f: fh.f,
    })
    .expect("contractions and an AR morphism")
}

fn trial_mc_ar(g: &mut Gen) -> Trial {
    let (f, _, _, _, _) = random_ar_morphism(g);
    let input = || f.to_json();
    let mut facs = Vec::new();
    for flavor in [Flavor::CFw, Flavor::CwF] {
        let fac = attempt(factor_ar(&f, flavor), &format!("factor_ar.{flavor}"), input)?;
        report(&fac.check(), &format!("factor_ar.{flavor}"), input)?;
        facs.push(fac);
    }
    let (a, b) = (&facs[0], &facs[1]);
    let squares = [
        (&b.left, &a.left, &a.right, &b.right, &b.witness),
        (&a.left, &a.left, &a.right, &a.right, &a.witness),
        (&b.left, &b.left, &b.right, &b.right, &b.witness),
    ];
    for (n, (i, top, p, bottom, w)) in squares.into_iter().enumerate() {
        let sq = attempt(
            Square::new(i.clone(), top.clone(), p.clone(), bottom.clone()),
            "lift_ar.square",
            input,
        )?;
        let h = attempt(lift_ar(&sq, Some(w)), &format!("lift_ar.square{n}"), input)?;
        ensure(sq.check(&h), &format!("lift_ar.square{n}"), input)?;
    }

    // Two out of three, with one leg a surjective quasi-isomorphism.
    let (p, _, ys) = g.surjective_qis();
    let zs = g.complex();
    let v = g.chain_map(&ys, &zs);
    let minput = || json!({"p": map_json(&p), "v": map_json(&v)});
    ensure(is_quasi_iso(&(&v * &p)) == is_quasi_iso(&v), "mc1.two-of-three", minput)?;

    // Retracts: f is a retract of f ⊕ u.
    let xs = g.complex();
    let ws = g.complex();
    let (ms, ns) = (g.complex(), g.complex());
    let fm = g.chain_map(&xs, &ws);
    let u = g.chain_map(&ms, &ns);
    let rinput = || json!({"f": map_json(&fm), "u": map_json(&u)});
    for other in [u.clone(), GradedMap::identity(&ms.complex)] {
        let (src, tgt) = (direct_sum(&xs.complex, other.src()), direct_sum(&ws.complex, other.tgt()));
        let (src, tgt) = (
            attempt(src, "mc2.retract", rinput)?,
            attempt(tgt, "mc2.retract", rinput)?,
        );
        let sum = attempt(sum_map(&fm, &other, &src, &tgt), "mc2.retract", rinput)?;
        let preds: [fn(&ChainMap) -> bool; 3] = [is_cofibration, is_fibration, is_quasi_iso];
        for pred in preds {
            ensure(!pred(&sum) || pred(&fm), "mc2.retract", rinput)?;
        }
    }
    Ok(())
}

fn trial_mc_contr(g: &mut Gen) -> Trial {
    let (c1, s1) = g.contraction();
    let (c2, s2) = g.contraction();
    let (c3, s3) = g.contraction();
    let f1 = random_contr_morphism(g, &c1, &s1, &c2, &s2);
    let b = random_contr_morphism(g, &c2, &s2, &c3, &s3);
    let input = || json!({"f": f1.to_json(), "g": b.to_json()});
    let composite = attempt(b.after(&f1), "compose", input)?;
    for flavor in [Flavor::CFw, Flavor::CwF] {
        let name = format!("factor_contr.{flavor}");
        let fac1 = attempt(factor_contr(&f1, flavor), &name, input)?;
        report(&fac1.check(), &name, input)?;
        let fac_b = attempt(factor_contr(&b, flavor), &name, input)?;
        let fac_c = attempt(factor_contr(&composite, flavor), &name, input)?;

        let sq = attempt(
            Square::new(fac1.left.clone(), fac1.left.clone(), fac1.right.clone(), fac1.right.clone()),
            "lift_contr.square",
            input,
        )?;
        let h = attempt(lift_contr(&sq, Some(&fac1.ar.witness)), "lift_contr", input)?;
        ensure(sq.check(&h) && check_contr_morphism(&h), "lift_contr", input)?;

        let id = ContrMorphism::identity(&c1);
        let nat = format!("naturality.{flavor}");
        let psi = attempt(factorization_naturality(&id, &b, &fac1, &fac_c), &nat, input)?;
        ensure(check_contr_morphism(&psi), &nat, input)?;
        let psi = attempt(factorization_naturality(&f1, &b, &fac1, &fac_b), &nat, input)?;
        ensure(check_contr_morphism(&psi), &nat, input)?;
    }
    let other = attempt(factor_contr(&f1, Flavor::CwF), "factor_contr.cw-f", input)?;
    let first = attempt(factor_contr(&f1, Flavor::CFw), "factor_contr.c-fw", input)?;
    let sq = attempt(
        Square::new(other.left.clone(), first.left.clone(), first.right.clone(), other.right.clone()),
        "lift_contr.square",
        input,
    )?;
    let h = attempt(lift_contr(&sq, Some(&other.ar.witness)), "lift_contr.cross", input)?;
    ensure(sq.check(&h) && check_contr_morphism(&h), "lift_contr.cross", input)?;
    Ok(())
}

type TrialFn = fn(&mut Gen) -> Trial;

pub const CAMPAIGNS: &[&str] = &[
    "tricks",
    "contractions",
    "path",
    "semifree",
    "mc-ar",
    "mc-contr",
    "mutant-trick3",
    "mutant-generator",
];

fn campaign_fn(name: &str) -> Option<TrialFn> {
    Some(match name {
        "tricks" => trial_tricks,
        "contractions" => trial_contractions,
        "path" => trial_path,
        "semifree" => trial_semifree,
        "mc-ar" => trial_mc_ar,
        "mc-contr" => trial_mc_contr,
        "mutant-trick3" => trial_mutant_trick3,
        "mutant-generator" => trial_mutant_generator,
        _ => return None,
    })
}

fn run_trial(run: TrialFn, cfg: &GenConfig) -> Option<Violation> {
    let outcome = catch_unwind(AssertUnwindSafe(|| run(&mut Gen::new(cfg))));
    match outcome {
        Ok(Ok(())) => None,
        Ok(Err(v)) => Some(v),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Some(Violation {
                identity: format!("panic: {msg}"),
                input: cfg.to_json(),
            })
        }
    }
}

/// Halves dimensions and support while the same identity keeps failing.
fn shrink(run: TrialFn, cfg: &GenConfig, first: Violation) -> (GenConfig, Violation) {
    let mut cfg = cfg.clone();
    let mut best = first;
    loop {
        let (lo, hi) = cfg.support;
        let half = (hi - lo) / 2;
        let mut candidates = Vec::new();
        if cfg.max_dim > 1 {
            candidates.push(GenConfig {
                max_dim: cfg.max_dim / 2,
                ..cfg.clone()
            });
        }
        if hi > lo {
            candidates.push(GenConfig {
                support: (lo, lo + half),
                ..cfg.clone()
            });
            candidates.push(GenConfig {
                support: (hi - half, hi),
                ..cfg.clone()
            });
        }
        let next = candidates.into_iter().find_map(|c| match run_trial(run, &c) {
            Some(v) if v.identity == best.identity => Some((c, v)),
            _ => None,
        });
        match next {
            Some((c, v)) => {
                cfg = c;
                best = v;
            }
            None => return (cfg, best),
        }
    }
}

/// Seed of trial `n`, a function of the campaign seed and `n` only.
pub fn trial_seed(seed: u64, n: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n);
    rng.gen()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Trials spread over the rayon pool; sequential when the `parallel`
    /// feature is off.
    Parallel,
}

pub fn run_campaign(name: &str, trials: usize, cfg: &GenConfig) -> Result<FuzzReport> {
    run_campaign_with(name, trials, cfg, Execution::Parallel)
}

pub fn run_campaign_with(
    name: &str,
    trials: usize,
    cfg: &GenConfig,
    exec: Execution,
) -> Result<FuzzReport> {
    cfg.validate()?;
    let run = campaign_fn(name).ok_or_else(|| {
        Error::Precondition(format!("unknown campaign `{name}`; known: {}", CAMPAIGNS.join(", ")))
    })?;
    let one = |n: usize| -> Option<Failure> {
        let trial = cfg.with_seed(trial_seed(cfg.seed, n as u64));
        run_trial(run, &trial).map(|v| {
            let (small, v) = shrink(run, &trial, v);
            Failure {
                seed: trial.seed,
                input: json!({"config": small.to_json(), "instance": v.input}),
                identity: v.identity,
            }
        })
    };
    let mut failures: Vec<Failure> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..trials).into_par_iter().filter_map(one).collect()
        }
        _ => (0..trials).filter_map(one).collect(),
    };
    failures.sort_by(|a, b| a.seed.cmp(&b.seed).then_with(|| a.identity.cmp(&b.identity)));
    Ok(FuzzReport {
        campaign: name.to_string(),
        trials,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retract::check_sdr;

    #[test]
    fn generators_are_valid_and_deterministic() {
        let cfg = GenConfig::default().with_seed(7);
        let a = generate_random_complex(&cfg);
        assert_eq!(a, generate_random_complex(&cfg));
        assert!(validate_complex(&a).passed());
        let c = generate_random_contraction(&cfg);
        assert!(check_contraction(&c).passed());
        assert!(check_sdr(&generate_random_sdr(&cfg)).passed());
        let p = generate_surjective_qis(&cfg);
        assert!(is_fibration(&p) && is_quasi_iso(&p));
    }

    #[test]
    fn zero_dimension_gives_zero() {
        let cfg = GenConfig {
            max_dim: 0,
            ..GenConfig::default()
        };
        assert!(generate_random_complex(&cfg).is_zero());
        let c = generate_random_contraction(&cfg);
        assert!(c.ar.n.is_zero());
    }

    #[test]
    fn random_chain_maps_commute() {
        let mut g = Gen::new(&GenConfig::new(Field::Q, (-2, 2), 4).with_seed(3));
        let (x, y) = (g.complex(), g.complex());
        assert!(g.chain_map(&x, &y).is_chain_map());
    }

    #[test]
    fn empty_and_unknown_campaigns() {
        let r = run_campaign("tricks", 0, &GenConfig::default()).unwrap();
        assert!(r.passed() && r.trials == 0);
        assert!(run_campaign("nope", 1, &GenConfig::default()).is_err());
    }

    #[test]
    fn small_campaigns_pass() {
        let cfg = GenConfig::new(Field::prime(3).unwrap(), (-1, 1), 3);
        for name in ["tricks", "contractions", "path"] {
            let r = run_campaign(name, 5, &cfg).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn sign_flip_is_caught() {
        let r = run_campaign("mutant-trick3", 20, &GenConfig::default()).unwrap();
        assert!(!r.passed());
        assert!(r.failures.iter().all(|f| f.identity == "trick3.contr-morphism"));
    }
}
