//! Constructors for the named states used across the test corpus: maximally
//! entangled and GHZ/W families, isotropic and Werner mixtures, unextendible
//! product bases and their bound entangled complements, plus the specific
//! counterexample states.

use nalgebra::ComplexField;
use std::collections::BTreeMap;

use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::tensor::{Bipartition, DensityOp, DimVec, PureState};
use crate::tolerance::Tolerances;
use crate::{C64, CMat, CVec};

/// A constructor parameter: integer or real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
}

impl ParamValue {
    pub fn as_f64(&self) -> f64 {
        match *self {
            ParamValue::Int(i) => i as f64,
            ParamValue::Float(f) => f,
        }
    }

    pub fn as_usize(&self) -> Option<usize> {
        match *self {
            ParamValue::Int(i) if i >= 0 => Some(i as usize),
            ParamValue::Float(f) if f >= 0.0 && f.fract() == 0.0 => Some(f as usize),
            _ => None,
        }
    }
}

/// Name plus parameter map identifying a state in the registry.
#[derive(Debug, Clone, PartialEq)]
pub struct StateRecipe {
    pub name: String,
    pub params: BTreeMap<String, ParamValue>,
}

impl StateRecipe {
    pub fn new(name: &str) -> Self {
        StateRecipe {
            name: name.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: ParamValue) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn usize_param(&self, key: &str) -> Result<usize> {
        self.params
            .get(key)
            .ok_or_else(|| Error::InvalidParam {
                name: key.into(),
                reason: "missing".into(),
            })?
            .as_usize()
            .ok_or_else(|| Error::InvalidParam {
                name: key.into(),
                reason: "expected a nonnegative integer".into(),
            })
    }

    fn f64_param(&self, key: &str) -> Result<f64> {
        Ok(self
            .params
            .get(key)
            .ok_or_else(|| Error::InvalidParam {
                name: key.into(),
                reason: "missing".into(),
            })?
            .as_f64())
    }

    fn usize_param_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(_) => self.usize_param(key),
        }
    }
}

/// Either kind of state.
#[derive(Debug, Clone)]
pub enum StateValue {
    Pure(PureState),
    Density(DensityOp),
}

impl StateValue {
    pub fn dims(&self) -> &DimVec {
        match self {
            StateValue::Pure(p) => p.dims(),
            StateValue::Density(d) => d.dims(),
        }
    }

    /// Density form of either kind.
    pub fn to_density(&self) -> Result<DensityOp> {
        match self {
            StateValue::Pure(p) => p.to_density(),
            StateValue::Density(d) => Ok(d.clone()),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            StateValue::Pure(p) => Some(p),
            StateValue::Density(_) => None,
        }
    }
}

/// A constructed state, with the UPB members attached when the state is a
/// UPB complement.
#[derive(Debug, Clone)]
pub struct Constructed {
    pub value: StateValue,
    pub upb: Option<Upb>,
}

/// An (alleged) unextendible product basis: per-member local factors.
#[derive(Debug, Clone)]
pub struct Upb {
    /// `factors[j][p]` is the normalized factor of member `j` on party `p`.
    pub factors: Vec<Vec<CVec>>,
    pub dims: DimVec,
}

/// Outcome of the UPB verification.
#[derive(Debug, Clone)]
pub struct UpbReport {
    pub mutually_orthogonal: bool,
    pub max_pairwise_overlap: f64,
    /// No nonzero product vector is orthogonal to every member (exact
    /// case analysis over which party annihilates each member).
    pub unextendible: bool,
}

impl Upb {
    pub fn member(&self, j: usize) -> PureState {
        let mut v = self.factors[j][0].clone();
        for p in 1..self.dims.len() {
            v = v.kronecker(&self.factors[j][p]);
        }
        PureState::new(v, self.dims.clone()).expect("consistent dims")
    }

    pub fn members(&self) -> Vec<PureState> {
        (0..self.factors.len()).map(|j| self.member(j)).collect()
    }

    /// Complement state `(I - sum |u_j><u_j|) / (D - m)`.
    pub fn complement_state(&self) -> Result<DensityOp> {
        let d = self.dims.total();
        let m = self.factors.len();
        if m >= d {
            return Err(Error::input("UPB member count must be below the ambient dimension"));
        }
        let mut mat = CMat::identity(d, d);
        for j in 0..m {
            let u = self.member(j);
            mat -= u.amplitudes() * u.amplitudes().adjoint();
        }
        mat /= C64::from_real((d - m) as f64);
        DensityOp::new(mat, self.dims.clone())
    }

    /// Check orthogonality and unextendibility.
    ///
    /// Unextendibility: a product vector orthogonal to every member must, for
    /// each member, be annihilated on some party. For each assignment of a
    /// killing party to every member, the vectors assigned to party `p` must
    /// then span a proper subspace of that party's space. The basis is
    /// unextendible iff every assignment forces full local span somewhere.
    pub fn verify(&self, tol: &Tolerances) -> UpbReport {
        let m = self.factors.len();
        let n = self.dims.len();
        let members = self.members();
        let mut max_overlap: f64 = 0.0;
        for i in 0..m {
            for j in (i + 1)..m {
                let ov = members[i].inner(&members[j]).expect("same dims").norm();
                max_overlap = max_overlap.max(ov);
            }
        }
        let mutually_orthogonal = max_overlap <= 1e-12;

        let mut assignment = vec![0usize; m];
        let mut extendible = false;
        'outer: loop {
            // party p receives the factors of all members assigned to it
            let mut blocked = false;
            for p in 0..n {
                let cols: Vec<&CVec> = (0..m).filter(|&j| assignment[j] == p).map(|j| &self.factors[j][p]).collect();
                if cols.is_empty() {
                    continue;
                }
                let mut mat = CMat::zeros(self.dims.get(p), cols.len());
                for (c, v) in cols.iter().enumerate() {
                    mat.set_column(c, v);
                }
                if linalg::numerical_rank(&mat, tol.rank) >= self.dims.get(p) {
                    blocked = true;
                    break;
                }
            }
            if !blocked {
                extendible = true;
                break 'outer;
            }
            // next assignment in mixed radix
            let mut carry = 0;
            loop {
                if carry == m {
                    break 'outer;
                }
                assignment[carry] += 1;
                if assignment[carry] < n {
                    break;
                }
                assignment[carry] = 0;
                carry += 1;
            }
        }

        UpbReport {
            mutually_orthogonal,
            max_pairwise_overlap: max_overlap,
            unextendible: !extendible,
        }
    }
}

fn cv(entries: &[f64]) -> CVec {
    CVec::from_iterator(entries.len(), entries.iter().map(|&x| C64::new(x, 0.0)))
}

fn normalized(v: CVec) -> CVec {
    let n = v.norm();
    v / C64::from_real(n)
}

/// The five-vector Tiles basis on 3x3.
pub fn tiles_upb() -> Upb {
    let f = |a: &[f64], b: &[f64]| vec![normalized(cv(a)), normalized(cv(b))];
    Upb {
        factors: vec![
            f(&[1.0, 0.0, 0.0], &[1.0, -1.0, 0.0]),
            f(&[0.0, 0.0, 1.0], &[0.0, 1.0, -1.0]),
            f(&[1.0, -1.0, 0.0], &[0.0, 0.0, 1.0]),
            f(&[0.0, 1.0, -1.0], &[1.0, 0.0, 0.0]),
            f(&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]),
        ],
        dims: DimVec::new(vec![3, 3]).unwrap(),
    }
}

/// The four-vector Shifts basis on three qubits.
pub fn shifts_upb() -> Upb {
    let zero = &[1.0, 0.0][..];
    let one = &[0.0, 1.0][..];
    let plus = &[1.0, 1.0][..];
    let minus = &[1.0, -1.0][..];
    let f = |a: &[f64], b: &[f64], c: &[f64]| vec![normalized(cv(a)), normalized(cv(b)), normalized(cv(c))];
    Upb {
        factors: vec![
            f(zero, zero, zero),
            f(plus, one, minus),
            f(one, minus, plus),
            f(minus, plus, one),
        ],
        dims: DimVec::new(vec![2, 2, 2]).unwrap(),
    }
}

/// `(sum_i |ii>)/sqrt(d)` on `d x d`.
pub fn max_entangled(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::InvalidParam {
            name: "d".into(),
            reason: "need d >= 2".into(),
        });
    }
    let dims = DimVec::new(vec![d, d])?;
    let mut amp = CVec::zeros(d * d);
    for i in 0..d {
        amp[i * d + i] = C64::from_real(1.0 / (d as f64).sqrt());
    }
    PureState::new(amp, dims)
}

/// Unnormalized `sum_i |ii>` on `d x d`.
pub fn max_entangled_unnormalized(d: usize) -> PureState {
    let dims = DimVec::new(vec![d, d]).unwrap();
    let mut amp = CVec::zeros(d * d);
    for i in 0..d {
        amp[i * d + i] = C64::new(1.0, 0.0);
    }
    PureState::new(amp, dims).unwrap()
}

/// GHZ state `(sum_j |j...j>)/sqrt(d)` on `n` parties of dimension `d`.
pub fn ghz(d: usize, n: usize) -> Result<PureState> {
    if d < 2 || n < 2 {
        return Err(Error::InvalidParam {
            name: "d/n".into(),
            reason: "need d >= 2 and n >= 2".into(),
        });
    }
    let dims = DimVec::new(vec![d; n])?;
    if dims.total() > crate::MAX_AMBIENT_DIM {
        return Err(Error::Capacity {
            got: dims.total(),
            max: crate::MAX_AMBIENT_DIM,
        });
    }
    let mut amp = CVec::zeros(dims.total());
    for j in 0..d {
        amp[dims.flat(&vec![j; n])] = C64::from_real(1.0 / (d as f64).sqrt());
    }
    PureState::new(amp, dims)
}

/// W state `(|10...0> + |01...0> + ... + |0...01>)/sqrt(n)`.
pub fn w_state(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::InvalidParam {
            name: "n".into(),
            reason: "need n >= 2".into(),
        });
    }
    let dims = DimVec::new(vec![2; n])?;
    let mut amp = CVec::zeros(dims.total());
    for i in 0..n {
        let mut multi = vec![0usize; n];
        multi[i] = 1;
        amp[dims.flat(&multi)] = C64::from_real(1.0 / (n as f64).sqrt());
    }
    PureState::new(amp, dims)
}

/// Isotropic state `p |Phi_d><Phi_d| + (1-p) I/d^2`.
pub fn isotropic(d: usize, p: f64) -> Result<DensityOp> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParam {
            name: "p".into(),
            reason: format!("mixing parameter {p} outside [0,1]"),
        });
    }
    let phi = max_entangled(d)?;
    let dd = d * d;
    let m = phi.amplitudes() * phi.amplitudes().adjoint() * C64::from_real(p)
        + CMat::identity(dd, dd) * C64::from_real((1.0 - p) / dd as f64);
    DensityOp::new(m, DimVec::new(vec![d, d])?)
}

/// SWAP operator on `d x d`.
pub fn swap_operator(d: usize) -> CMat {
    CMat::from_fn(d * d, d * d, |r, c| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        if i == l && j == k {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Werner-family state `(I + w SWAP) / (d^2 + w d)`, `w` in `[-1, 1]`.
pub fn werner(d: usize, w: f64) -> Result<DensityOp> {
    if !(-1.0..=1.0).contains(&w) {
        return Err(Error::InvalidParam {
            name: "w".into(),
            reason: format!("weight {w} outside [-1,1]"),
        });
    }
    let dd = d * d;
    let m = (CMat::identity(dd, dd) + swap_operator(d) * C64::from_real(w))
        / C64::from_real(dd as f64 + w * d as f64);
    DensityOp::new(m, DimVec::new(vec![d, d])?)
}

/// Projector sum `sum_{j<k} (|jk> - |kj>)(<jk| - <kj|)` on 3x3 (unnormalized
/// antisymmetric two-qutrit state).
pub fn antisym3() -> DensityOp {
    let dims = DimVec::new(vec![3, 3]).unwrap();
    let mut m = CMat::zeros(9, 9);
    for j in 0..3 {
        for k in (j + 1)..3 {
            let mut v = CVec::zeros(9);
            v[j * 3 + k] = C64::new(1.0, 0.0);
            v[k * 3 + j] = C64::new(-1.0, 0.0);
            m += &v * v.adjoint();
        }
    }
    DensityOp::new(m, dims).unwrap()
}

/// `alpha = 2(|00>+|11>)(<00|+<11|) + (|00>-|11>+|22>)(<00|-<11|+<22|)`.
pub fn nonconvex_alpha() -> DensityOp {
    let dims = DimVec::new(vec![3, 3]).unwrap();
    let u = PureState::from_kets(dims.clone(), &[(&[0, 0], C64::new(1.0, 0.0)), (&[1, 1], C64::new(1.0, 0.0))]).unwrap();
    let v = PureState::from_kets(
        dims.clone(),
        &[
            (&[0, 0], C64::new(1.0, 0.0)),
            (&[1, 1], C64::new(-1.0, 0.0)),
            (&[2, 2], C64::new(1.0, 0.0)),
        ],
    )
    .unwrap();
    let m = u.amplitudes() * u.amplitudes().adjoint() * C64::new(2.0, 0.0)
        + v.amplitudes() * v.amplitudes().adjoint();
    DensityOp::new(m, dims).unwrap()
}

/// `beta = (|00>-|11>-|22>)(<00|-<11|-<22|)`.
pub fn nonconvex_beta() -> DensityOp {
    let dims = DimVec::new(vec![3, 3]).unwrap();
    let v = PureState::from_kets(
        dims.clone(),
        &[
            (&[0, 0], C64::new(1.0, 0.0)),
            (&[1, 1], C64::new(-1.0, 0.0)),
            (&[2, 2], C64::new(-1.0, 0.0)),
        ],
    )
    .unwrap();
    v.to_density().unwrap()
}

/// `p |Phi+><Phi+| + (1-p) |Phi-><Phi-|` with normalized two-qubit Bells.
pub fn p_mix_bell(p: f64) -> Result<DensityOp> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParam {
            name: "p".into(),
            reason: format!("mixing parameter {p} outside [0,1]"),
        });
    }
    let dims = DimVec::new(vec![2, 2]).unwrap();
    let s = 1.0 / 2.0f64.sqrt();
    let plus = PureState::from_kets(dims.clone(), &[(&[0, 0], C64::new(s, 0.0)), (&[1, 1], C64::new(s, 0.0))]).unwrap();
    let minus = PureState::from_kets(dims.clone(), &[(&[0, 0], C64::new(s, 0.0)), (&[1, 1], C64::new(-s, 0.0))]).unwrap();
    let m = plus.amplitudes() * plus.amplitudes().adjoint() * C64::from_real(p)
        + minus.amplitudes() * minus.amplitudes().adjoint() * C64::from_real(1.0 - p);
    DensityOp::new(m, dims)
}

/// Rank-3 counterexample state built from `psi = |11>+|22>`,
/// `phi = |33>+|44>+|55>` and `omega = |33>-|44>+|66>`, embedded in 7x7
/// locals so the 1-based labels match (index 0 unused).
pub fn problems_rho() -> DensityOp {
    let dims = DimVec::new(vec![7, 7]).unwrap();
    let one = C64::new(1.0, 0.0);
    let psi = PureState::from_kets(dims.clone(), &[(&[1, 1], one), (&[2, 2], one)]).unwrap();
    let phi = PureState::from_kets(
        dims.clone(),
        &[(&[3, 3], one), (&[4, 4], one), (&[5, 5], one)],
    )
    .unwrap();
    let omega = PureState::from_kets(
        dims.clone(),
        &[(&[3, 3], one), (&[4, 4], -one), (&[6, 6], one)],
    )
    .unwrap();
    let m = psi.amplitudes() * psi.amplitudes().adjoint()
        + phi.amplitudes() * phi.amplitudes().adjoint()
        + omega.amplitudes() * omega.amplitudes().adjoint();
    DensityOp::new(m, dims).unwrap()
}

/// The A-side projector `|1><1| + |3><3| + |4><4|` paired with
/// [`problems_rho`] in the counterexample.
pub fn problems_projector() -> CMat {
    let mut p = CMat::zeros(7, 7);
    for i in [1usize, 3, 4] {
        p[(i, i)] = C64::new(1.0, 0.0);
    }
    p
}

/// `|psi><psi| + |03><03|` with `psi = |00>+|11>+|22>` on 3x4.
pub fn proj_example() -> DensityOp {
    let dims = DimVec::new(vec![3, 4]).unwrap();
    let one = C64::new(1.0, 0.0);
    let psi = PureState::from_kets(
        dims.clone(),
        &[(&[0, 0], one), (&[1, 1], one), (&[2, 2], one)],
    )
    .unwrap();
    let e03 = PureState::from_kets(dims.clone(), &[(&[0, 3], one)]).unwrap();
    let m = psi.amplitudes() * psi.amplitudes().adjoint()
        + e03.amplitudes() * e03.amplitudes().adjoint();
    DensityOp::new(m, dims).unwrap()
}

/// `|Phi2~><Phi2~| (x) sum_{i<2} |ii><ii|` regrouped to `A1A2:B1B2` order
/// (dims `[2,2,2,2]`, cut `{0,1}` vs `{2,3}`).
pub fn expansion_vi() -> DensityOp {
    let bell = max_entangled_unnormalized(2).to_density().unwrap();
    let dims22 = DimVec::new(vec![2, 2]).unwrap();
    let mut cl = CMat::zeros(4, 4);
    cl[(0, 0)] = C64::new(1.0, 0.0);
    cl[(3, 3)] = C64::new(1.0, 0.0);
    let classical = DensityOp::new(cl, dims22).unwrap();
    bell.tensor(&classical)
        .unwrap()
        .permute(&[0, 2, 1, 3])
        .unwrap()
}

/// Tensor product of two bipartite states regrouped to `A1A2:B1B2`
/// (dims `[a1, a2, b1, b2]`, cut `{0,1}` vs `{2,3}`).
pub fn tensor_power_pair(rho1: &DensityOp, rho2: &DensityOp) -> Result<DensityOp> {
    if rho1.dims().len() != 2 || rho2.dims().len() != 2 {
        return Err(Error::input("regrouped pair expects two-party factors"));
    }
    rho1.tensor(rho2)?.permute(&[0, 2, 1, 3])
}

/// `n`-fold tensor power of a bipartite state, regrouped to the
/// `A1..An : B1..Bn` bipartition (dims `[a; n] ++ [b; n]`).
pub fn tensor_power_regrouped(rho: &DensityOp, n: usize) -> Result<DensityOp> {
    if rho.dims().len() != 2 {
        return Err(Error::input("tensor power regrouping expects a two-party state"));
    }
    if n == 0 {
        return Err(Error::InvalidParam {
            name: "n".into(),
            reason: "need n >= 1".into(),
        });
    }
    let mut acc = rho.clone();
    for _ in 1..n {
        acc = acc.tensor(rho)?;
    }
    if n == 1 {
        return Ok(acc);
    }
    // factor order A1 B1 A2 B2 ...; regroup to A1..An B1..Bn
    let mut perm = Vec::with_capacity(2 * n);
    perm.extend((0..n).map(|i| 2 * i));
    perm.extend((0..n).map(|i| 2 * i + 1));
    acc.permute(&perm)
}

/// Canonical bipartition of a regrouped `n`-copy state.
pub fn regrouped_cut(n: usize) -> Bipartition {
    let left: Vec<usize> = (0..n).collect();
    Bipartition::new(&left, 2 * n).expect("valid cut")
}

/// Haar-random pure state on the given subsystem dimensions.
pub fn random_pure(dims: &[usize], rng: &mut ChaCha12Rng) -> PureState {
    let dv = DimVec::new(dims.to_vec()).expect("valid dims");
    PureState::new(linalg::haar_unit_vector(dv.total(), rng), dv).expect("consistent dims")
}

/// Random rank-`r` mixed state (trace 1) on the given dimensions.
pub fn random_mixed(dims: &[usize], r: usize, rng: &mut ChaCha12Rng) -> DensityOp {
    let dv = DimVec::new(dims.to_vec()).expect("valid dims");
    let d = dv.total();
    let r = r.clamp(1, d);
    let g = linalg::gaussian_matrix(d, r, rng);
    let m = &g * g.adjoint();
    let m = &m / C64::from_real(m.trace().re);
    DensityOp::new(m, dv).expect("Wishart matrices are PSD")
}

/// Random mixture of at most `terms` product pure states (separable by
/// construction).
pub fn random_separable(dims_a: usize, dims_b: usize, terms: usize, rng: &mut ChaCha12Rng) -> DensityOp {
    let dv = DimVec::new(vec![dims_a, dims_b]).expect("valid dims");
    let mut m = CMat::zeros(dims_a * dims_b, dims_a * dims_b);
    for _ in 0..terms.max(1) {
        let a = linalg::haar_unit_vector(dims_a, rng);
        let b = linalg::haar_unit_vector(dims_b, rng);
        let v = a.kronecker(&b);
        let w: f64 = rand::Rng::random::<f64>(rng) + 1e-3;
        m += &v * v.adjoint() * C64::from_real(w);
    }
    let m = &m / C64::from_real(m.trace().re);
    DensityOp::new(m, dv).expect("mixture of projectors is PSD")
}

/// Descriptor of a registered constructor.
#[derive(Debug, Clone)]
pub struct ConstructorInfo {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub description: &'static str,
}

/// The documented constructor registry.
pub fn registry() -> Vec<ConstructorInfo> {
    vec![
        ConstructorInfo { name: "max_entangled", params: &["d"], description: "maximally entangled (sum_i |ii>)/sqrt(d)" },
        ConstructorInfo { name: "ghz", params: &["d", "n"], description: "d-level n-party GHZ state" },
        ConstructorInfo { name: "w_state", params: &["n"], description: "n-qubit W state" },
        ConstructorInfo { name: "isotropic", params: &["d", "p"], description: "p |Phi_d><Phi_d| + (1-p) I/d^2" },
        ConstructorInfo { name: "werner", params: &["d", "w"], description: "(I + w SWAP)/(d^2 + w d)" },
        ConstructorInfo { name: "antisym3", params: &[], description: "antisymmetric two-qutrit projector sum" },
        ConstructorInfo { name: "tiles_state", params: &[], description: "Tiles UPB complement on 3x3 (bound entangled)" },
        ConstructorInfo { name: "shifts3_state", params: &[], description: "Shifts UPB complement on three qubits" },
        ConstructorInfo { name: "nonconvex_alpha", params: &[], description: "first component of the non-convexity example" },
        ConstructorInfo { name: "nonconvex_beta", params: &[], description: "second component of the non-convexity example" },
        ConstructorInfo { name: "p_mix_bell", params: &["p"], description: "p Bell+ mixed with (1-p) Bell-" },
        ConstructorInfo { name: "problems_rho", params: &[], description: "rank-3 direct-sum counterexample on 7x7" },
        ConstructorInfo { name: "proj_example", params: &[], description: "|psi><psi| + |03><03| on 3x4" },
        ConstructorInfo { name: "expansion_vi", params: &[], description: "Bell (x) classical two-block state, regrouped" },
        ConstructorInfo { name: "tiles_power", params: &["n"], description: "n-fold Tiles tensor power, regrouped" },
        ConstructorInfo { name: "random_pure", params: &["da", "db", "seed"], description: "Haar-random bipartite pure state" },
        ConstructorInfo { name: "random_mixed", params: &["da", "db", "rank", "seed"], description: "random rank-r bipartite mixed state" },
    ]
}

/// Build a state from a recipe. Deterministic: identical recipes give
/// bit-identical states.
pub fn construct(recipe: &StateRecipe) -> Result<Constructed> {
    let plain = |value: StateValue| Constructed { value, upb: None };
    match recipe.name.as_str() {
        "max_entangled" => Ok(plain(StateValue::Pure(max_entangled(recipe.usize_param("d")?)?))),
        "ghz" => Ok(plain(StateValue::Pure(ghz(
            recipe.usize_param("d")?,
            recipe.usize_param("n")?,
        )?))),
        "w_state" => Ok(plain(StateValue::Pure(w_state(recipe.usize_param("n")?)?))),
        "isotropic" => Ok(plain(StateValue::Density(isotropic(
            recipe.usize_param("d")?,
            recipe.f64_param("p")?,
        )?))),
        "werner" => Ok(plain(StateValue::Density(werner(
            recipe.usize_param("d")?,
            recipe.f64_param("w")?,
        )?))),
        "antisym3" => Ok(plain(StateValue::Density(antisym3()))),
        "tiles_state" => {
            let upb = tiles_upb();
            Ok(Constructed {
                value: StateValue::Density(upb.complement_state()?),
                upb: Some(upb),
            })
        }
        "shifts3_state" => {
            let upb = shifts_upb();
            Ok(Constructed {
                value: StateValue::Density(upb.complement_state()?),
                upb: Some(upb),
            })
        }
        "nonconvex_alpha" => Ok(plain(StateValue::Density(nonconvex_alpha()))),
        "nonconvex_beta" => Ok(plain(StateValue::Density(nonconvex_beta()))),
        "p_mix_bell" => Ok(plain(StateValue::Density(p_mix_bell(recipe.f64_param("p")?)?))),
        "problems_rho" => Ok(plain(StateValue::Density(problems_rho()))),
        "proj_example" => Ok(plain(StateValue::Density(proj_example()))),
        "expansion_vi" => Ok(plain(StateValue::Density(expansion_vi()))),
        "tiles_power" => {
            let n = recipe.usize_param("n")?;
            let tiles = tiles_upb().complement_state()?;
            Ok(plain(StateValue::Density(tensor_power_regrouped(&tiles, n)?)))
        }
        "random_pure" => {
            let da = recipe.usize_param("da")?;
            let db = recipe.usize_param("db")?;
            let seed = recipe.usize_param_or("seed", 0)? as u64;
            let mut rng = linalg::seeded_rng(seed, 0);
            Ok(plain(StateValue::Pure(random_pure(&[da, db], &mut rng))))
        }
        "random_mixed" => {
            let da = recipe.usize_param("da")?;
            let db = recipe.usize_param("db")?;
            let r = recipe.usize_param("rank")?;
            let seed = recipe.usize_param_or("seed", 0)? as u64;
            let mut rng = linalg::seeded_rng(seed, 1);
            Ok(plain(StateValue::Density(random_mixed(&[da, db], r, &mut rng))))
        }
        other => Err(Error::UnknownConstructor(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{overlap, schmidt_rank};
    use approx::assert_relative_eq;

    #[test]
    fn tiles_upb_verifies() {
        let upb = tiles_upb();
        let report = upb.verify(&Tolerances::default());
        assert!(report.mutually_orthogonal, "overlap {}", report.max_pairwise_overlap);
        assert!(report.unextendible);
        let rho = upb.complement_state().unwrap();
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        assert_eq!(rho.rank(1e-9), 4);
    }

    #[test]
    fn shifts_upb_verifies() {
        let upb = shifts_upb();
        let report = upb.verify(&Tolerances::default());
        assert!(report.mutually_orthogonal);
        assert!(report.unextendible);
        let rho = upb.complement_state().unwrap();
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        assert_eq!(rho.rank(1e-9), 4);
    }

    #[test]
    fn dropping_a_tiles_member_breaks_unextendibility() {
        let mut upb = tiles_upb();
        upb.factors.pop();
        let report = upb.verify(&Tolerances::default());
        assert!(!report.unextendible);
    }

    #[test]
    fn isotropic_overlap_analytic() {
        let rho = isotropic(3, 0.9).unwrap();
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        let phi = max_entangled(3).unwrap();
        let ov = overlap(&phi, &rho).unwrap();
        assert_relative_eq!(ov, 0.9 + 0.1 / 9.0, epsilon = 1e-12);
    }

    #[test]
    fn isotropic_rejects_bad_parameter() {
        assert!(matches!(isotropic(3, 1.5), Err(Error::InvalidParam { .. })));
    }

    #[test]
    fn problems_rho_shape() {
        let rho = problems_rho();
        assert_eq!(rho.dims().as_slice(), &[7, 7]);
        assert_eq!(rho.rank(1e-9), 3);
        // local supports span indices 1..=6
        let a = rho.partial_trace(&[0]).unwrap();
        assert_eq!(a.rank(1e-9), 6);
    }

    #[test]
    fn antisym3_swap_invariance() {
        let rho = antisym3();
        let swapped = rho.permute(&[1, 0]).unwrap();
        let diff = swapped.matrix() - rho.matrix();
        assert!(crate::linalg::max_abs_entry(&diff) < 1e-12);
        for (_, v) in rho.range_basis(1e-9) {
            let sv = swap_operator(3) * &v;
            assert!((sv + &v).norm() < 1e-9, "range vector not antisymmetric");
        }
    }

    #[test]
    fn construct_is_deterministic() {
        let recipe = StateRecipe::new("random_mixed")
            .with("da", ParamValue::Int(3))
            .with("db", ParamValue::Int(3))
            .with("rank", ParamValue::Int(2))
            .with("seed", ParamValue::Int(11));
        let a = construct(&recipe).unwrap();
        let b = construct(&recipe).unwrap();
        let (StateValue::Density(da), StateValue::Density(db)) = (&a.value, &b.value) else {
            panic!("expected density outputs");
        };
        assert_eq!(da.matrix(), db.matrix());
    }

    #[test]
    fn construct_unknown_name() {
        assert!(matches!(
            construct(&StateRecipe::new("no_such_state")),
            Err(Error::UnknownConstructor(_))
        ));
    }

    #[test]
    fn bell_power_regrouped_is_rank_four_pure() {
        let bell = max_entangled(2).unwrap().to_density().unwrap();
        let two = tensor_power_regrouped(&bell, 2).unwrap();
        assert_eq!(two.dims().as_slice(), &[2, 2, 2, 2]);
        assert_eq!(two.rank(1e-9), 1);
        let (_, vecs) = two.eigen();
        let psi = PureState::new(CVec::from(vecs.column(0)), two.dims().clone()).unwrap();
        let cut = regrouped_cut(2);
        assert_eq!(schmidt_rank(&psi, &cut, &Tolerances::default()).unwrap(), 4);
    }

    #[test]
    fn tensor_power_n1_unchanged() {
        let tiles = tiles_upb().complement_state().unwrap();
        let one = tensor_power_regrouped(&tiles, 1).unwrap();
        assert_eq!(one.matrix(), tiles.matrix());
    }

    #[test]
    fn registry_names_all_construct() {
        for info in registry() {
            let mut recipe = StateRecipe::new(info.name);
            for &p in info.params {
                let v = match p {
                    "p" => ParamValue::Float(0.5),
                    "w" => ParamValue::Float(-1.0),
                    "d" | "da" | "db" => ParamValue::Int(2),
                    "n" => ParamValue::Int(2),
                    "rank" => ParamValue::Int(1),
                    "seed" => ParamValue::Int(0),
                    _ => unreachable!("unexpected parameter"),
                };
                recipe = recipe.with(p, v);
            }
            construct(&recipe).unwrap_or_else(|e| panic!("{} failed: {e}", info.name));
        }
    }
}
