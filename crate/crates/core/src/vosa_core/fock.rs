//! Fock spaces of free fermions and free bosons, in untwisted and twisted
//! sectors, with the canonical PBW basis.

use crate::error::{CalcError, Result};
use crate::formal_calculus::{Coeff, Exponent, Scalar, Q};
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::fmt;

/// A creation operator `a_gen(r)` with physical mode `r = twice / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mode {
    pub twice: i32,
    pub gen: u8,
}

/// A PBW basis vector `c_1 ⋯ c_k |vac⟩`, creation operators sorted with the
/// most negative mode leftmost. Ordering is by level, then lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FockKey {
    pub level2: i32,
    pub vac: u8,
    pub modes: SmallVec<[Mode; 6]>,
    pub parity: u8,
}

impl FockKey {
    pub fn vacuum(vac: u8) -> FockKey {
        FockKey { level2: 0, vac, modes: SmallVec::new(), parity: vac & 1 }
    }

    pub fn level(&self) -> Exponent {
        Rational64::new(self.level2 as i64, 2)
    }

    pub fn is_vacuum(&self) -> bool {
        self.modes.is_empty()
    }
}

/// A finite linear combination of basis vectors.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedVector {
    pub comps: BTreeMap<FockKey, Scalar>,
}

impl GradedVector {
    pub fn zero() -> GradedVector {
        GradedVector { comps: BTreeMap::new() }
    }

    pub fn basis(k: FockKey) -> GradedVector {
        let mut comps = BTreeMap::new();
        comps.insert(k, Scalar::one());
        GradedVector { comps }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn add_term(&mut self, k: FockKey, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.comps.get_mut(&k) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.comps.remove(&k);
                }
            }
            None => {
                self.comps.insert(k, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &GradedVector, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (k, x) in &other.comps {
            self.add_term(k.clone(), &(x * c));
        }
    }

    pub fn scaled(&self, c: &Scalar) -> GradedVector {
        let mut out = GradedVector::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn get(&self, k: &FockKey) -> Scalar {
        self.comps.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Parity if homogeneous.
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.comps.keys().map(|k| k.parity);
        let p = it.next()?;
        if it.all(|q| q == p) {
            Some(p)
        } else {
            None
        }
    }

    /// Level if homogeneous.
    pub fn level(&self) -> Option<Exponent> {
        let mut it = self.comps.keys().map(|k| k.level2);
        let p = it.next()?;
        if it.all(|q| q == p) {
            Some(Rational64::new(p as i64, 2))
        } else {
            None
        }
    }

    pub fn max_level(&self) -> Exponent {
        self.comps.keys().map(|k| k.level()).max().unwrap_or_else(Rational64::zero)
    }
}

impl Coeff for GradedVector {
    fn zero() -> Self {
        GradedVector::zero()
    }
    fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }
    fn scale(&self, s: &Scalar) -> Self {
        self.scaled(s)
    }
    fn same(&self, other: &Self) -> bool {
        self == other
    }
}

/// A dual vector, paired against basis vectors by orthonormality.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DualVector {
    pub comps: BTreeMap<FockKey, Scalar>,
}

impl DualVector {
    pub fn basis(k: FockKey) -> DualVector {
        let mut comps = BTreeMap::new();
        comps.insert(k, Scalar::one());
        DualVector { comps }
    }

    pub fn pair(&self, v: &GradedVector) -> Scalar {
        let mut acc = Scalar::zero();
        if self.comps.len() < v.comps.len() {
            for (k, c) in &self.comps {
                if let Some(x) = v.comps.get(k) {
                    acc += &(c * x);
                }
            }
        } else {
            for (k, x) in &v.comps {
                if let Some(c) = self.comps.get(k) {
                    acc += &(c * x);
                }
            }
        }
        acc
    }

    pub fn levels(&self) -> Vec<Exponent> {
        let mut l: Vec<Exponent> = self.comps.keys().map(|k| k.level()).collect();
        l.sort();
        l.dedup();
        l
    }

    pub fn max_level(&self) -> Exponent {
        self.comps.keys().map(|k| k.level()).max().unwrap_or_else(Rational64::zero)
    }
}

/// Statistics of a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statistics {
    Boson,
    Fermion,
}

/// A free-field generator: weight 1 bosons or weight 1/2 fermions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub stats: Statistics,
}

impl Generator {
    pub fn weight(&self) -> Exponent {
        match self.stats {
            Statistics::Boson => Rational64::from_integer(1),
            Statistics::Fermion => Rational64::new(1, 2),
        }
    }

    pub fn twice_weight(&self) -> i32 {
        match self.stats {
            Statistics::Boson => 2,
            Statistics::Fermion => 1,
        }
    }

    pub fn parity(&self) -> u8 {
        match self.stats {
            Statistics::Boson => 0,
            Statistics::Fermion => 1,
        }
    }
}

/// Injected structure-sign faults, for mutation testing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fault {
    /// Flip the sign of the (anti)commutator `[a(r), a(-r)]` for `2r = twice`.
    BracketSign { twice: i32 },
    /// Flip the sign of the (anti)commutator between two specific generators.
    GramSign { i: u8, j: u8 },
    /// Drop the Koszul sign when an annihilator passes a fermion.
    PassSign,
    /// Drop the Koszul sign when a creator is sorted into place.
    InsertSign,
    /// Flip the sign of the zero mode on one vacuum component.
    ZeroModeSign { vac: u8 },
    /// Flip the sign of the translation operator on creators of mode `twice/2`.
    TranslationSign { twice: i32 },
}

/// The mode algebra of a free-field Fock space.
#[derive(Clone, Debug)]
pub struct FockSpace {
    pub gens: Vec<Generator>,
    pub gram: Vec<Vec<Q>>,
    /// Physical modes of generator `i` lie in `½·mode_shift[i] + ℤ`.
    pub mode_shift: Vec<i32>,
    /// Two vacua `v+ (even), v- (odd)` with the zero mode swapping them.
    pub ramond: bool,
    pub faults: Vec<Fault>,
}

impl FockSpace {
    pub fn new(gens: Vec<Generator>, gram: Vec<Vec<Q>>, mode_shift: Vec<i32>, ramond: bool) -> Result<FockSpace> {
        let n = gens.len();
        if gram.len() != n || gram.iter().any(|r| r.len() != n) {
            return Err(CalcError::Model("Gram matrix shape does not match generators".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return Err(CalcError::Model("Gram matrix not symmetric".into()));
                }
            }
        }
        if ramond {
            let zero_fermions = (0..n).filter(|&i| gens[i].stats == Statistics::Fermion && mode_shift[i] == 0).count();
            if zero_fermions != 1 || n != 1 {
                return Err(CalcError::Model("Ramond sector supported for a single fermion".into()));
            }
            if gram[0][0] != Q::one() {
                return Err(CalcError::Model("Ramond sector requires ⟨ψ,ψ⟩ = 1".into()));
            }
        } else if (0..n).any(|i| gens[i].stats == Statistics::Fermion && mode_shift[i] == 0) {
            return Err(CalcError::Model("integral fermion modes need a Ramond vacuum pair".into()));
        }
        Ok(FockSpace { gens, gram, mode_shift, ramond, faults: Vec::new() })
    }

    pub fn with_faults(mut self, faults: Vec<Fault>) -> FockSpace {
        self.faults = faults;
        self
    }

    fn has(&self, f: Fault) -> bool {
        self.faults.contains(&f)
    }

    pub fn vacua(&self) -> Vec<FockKey> {
        if self.ramond {
            vec![FockKey::vacuum(0), FockKey::vacuum(1)]
        } else {
            vec![FockKey::vacuum(0)]
        }
    }

    pub fn is_fermion(&self, g: u8) -> bool {
        self.gens[g as usize].stats == Statistics::Fermion
    }

    /// Whether `twice` is a valid doubled mode for generator `g`.
    pub fn mode_allowed(&self, g: u8, twice: i32) -> bool {
        (twice - self.mode_shift[g as usize]).rem_euclid(2) == 0
    }

    fn bracket(&self, g: u8, r2: i32, h: u8, s2: i32) -> Q {
        if r2 + s2 != 0 {
            return Q::zero();
        }
        let mut c = self.gram[g as usize][h as usize].clone();
        if c.is_zero() {
            return c;
        }
        if !self.is_fermion(g) {
            c = &c * &Q::new(r2 as i64, 2);
        }
        if self.has(Fault::BracketSign { twice: r2.abs() }) {
            c = -c;
        }
        if self.has(Fault::GramSign { i: g.min(h), j: g.max(h) }) {
            c = -c;
        }
        c
    }

    /// Applies `a_g(r)`, `2r = r2`, to a basis vector.
    pub fn apply_mode(&self, g: u8, r2: i32, key: &FockKey, out: &mut GradedVector, coeff: &Scalar) {
        if !self.mode_allowed(g, r2) {
            return;
        }
        let ferm = self.is_fermion(g);
        if r2 < 0 {
            let m = Mode { twice: r2, gen: g };
            let pos = key.modes.partition_point(|x| *x < m);
            if ferm && key.modes.get(pos) == Some(&m) {
                return;
            }
            let passed = if ferm { key.modes[..pos].iter().filter(|x| self.is_fermion(x.gen)).count() } else { 0 };
            let mut modes = key.modes.clone();
            modes.insert(pos, m);
            let nk = FockKey { level2: key.level2 - r2, vac: key.vac, modes, parity: key.parity ^ self.gens[g as usize].parity() };
            let neg = passed % 2 == 1 && !self.has(Fault::InsertSign);
            out.add_term(nk, &if neg { -coeff } else { coeff.clone() });
        } else if r2 > 0 {
            let mut passed = 0usize;
            for (i, c) in key.modes.iter().enumerate() {
                let b = self.bracket(g, r2, c.gen, c.twice);
                if !b.is_zero() {
                    let mut modes = key.modes.clone();
                    modes.remove(i);
                    let nk = FockKey {
                        level2: key.level2 + c.twice,
                        vac: key.vac,
                        modes,
                        parity: key.parity ^ self.gens[c.gen as usize].parity(),
                    };
                    let neg = ferm && passed % 2 == 1 && !self.has(Fault::PassSign);
                    let s = coeff.scale(&b);
                    out.add_term(nk, &if neg { -s } else { s });
                }
                if ferm && self.is_fermion(c.gen) {
                    passed += 1;
                }
            }
        } else if ferm && self.ramond {
            // ψ(0) anticommutes with every nonzero fermion mode.
            let passed = key.modes.iter().filter(|x| self.is_fermion(x.gen)).count();
            let mut s = coeff * &Scalar::inv_sqrt2();
            if passed % 2 == 1 && !self.has(Fault::PassSign) {
                s = -s;
            }
            if self.has(Fault::ZeroModeSign { vac: key.vac }) {
                s = -s;
            }
            let nk = FockKey { level2: key.level2, vac: 1 - key.vac, modes: key.modes.clone(), parity: key.parity ^ 1 };
            out.add_term(nk, &s);
        }
    }

    pub fn apply_mode_vec(&self, g: u8, r2: i32, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (k, c) in &v.comps {
            self.apply_mode(g, r2, k, &mut out, c);
        }
        out
    }

    /// The translation operator on an untwisted algebra:
    /// `[L(-1), a_(m)] = -m a_(m-1)`, `L(-1)|0⟩ = 0`.
    pub fn translation(&self, key: &FockKey) -> GradedVector {
        let mut out = GradedVector::zero();
        for i in 0..key.modes.len() {
            let c = key.modes[i];
            let wt2 = self.gens[c.gen as usize].twice_weight();
            // -m = 1 - wt - r
            let mut coeff = Q::new((2 - wt2 - c.twice) as i64, 2);
            if coeff.is_zero() {
                continue;
            }
            if self.has(Fault::TranslationSign { twice: c.twice }) {
                coeff = -coeff;
            }
            let mut ops: Vec<Mode> = key.modes.to_vec();
            ops[i] = Mode { twice: c.twice - 2, gen: c.gen };
            let v = self.create_word(&ops, key.vac);
            out.add_scaled(&v, &Scalar::from_q(coeff));
        }
        out
    }

    pub fn translation_vec(&self, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (k, c) in &v.comps {
            out.add_scaled(&self.translation(k), c);
        }
        out
    }

    /// `c_1 ⋯ c_k |vac⟩` for an arbitrary word of creation operators.
    pub fn create_word(&self, ops: &[Mode], vac: u8) -> GradedVector {
        let mut v = GradedVector::basis(FockKey::vacuum(vac));
        for m in ops.iter().rev() {
            v = self.apply_mode_vec(m.gen, m.twice, &v);
        }
        v
    }

    /// Basis vectors with level ≤ `max_level`, in basis order.
    pub fn basis_up_to(&self, max_level: Exponent) -> Vec<FockKey> {
        let max2 = (max_level * Rational64::from_integer(2)).floor().to_integer() as i32;
        let mut creators: Vec<Mode> = Vec::new();
        for g in 0..self.gens.len() as u8 {
            let mut t = -1;
            while -t <= max2 {
                if self.mode_allowed(g, t) {
                    creators.push(Mode { twice: t, gen: g });
                }
                t -= 1;
            }
        }
        creators.sort();
        let mut out = Vec::new();
        for vac in self.vacua() {
            let mut cur: Vec<Mode> = Vec::new();
            self.enumerate(&creators, 0, max2, &mut cur, vac.vac, &mut out);
        }
        out.sort();
        out
    }

    fn enumerate(&self, creators: &[Mode], start: usize, budget: i32, cur: &mut Vec<Mode>, vac: u8, out: &mut Vec<FockKey>) {
        let parity = (cur.iter().map(|m| self.gens[m.gen as usize].parity()).sum::<u8>() % 2) ^ (vac & 1);
        out.push(FockKey {
            level2: cur.iter().map(|m| -m.twice).sum(),
            vac,
            modes: cur.iter().copied().collect(),
            parity,
        });
        for i in start..creators.len() {
            let m = creators[i];
            if -m.twice > budget {
                continue;
            }
            let next = if self.is_fermion(m.gen) { i + 1 } else { i };
            cur.push(m);
            self.enumerate(creators, next, budget + m.twice, cur, vac, out);
            cur.pop();
        }
    }

    /// Human-readable name of a basis vector.
    pub fn describe(&self, key: &FockKey) -> String {
        let mut s = String::new();
        for m in &key.modes {
            s.push_str(&format!("{}({})", self.gens[m.gen as usize].name, Rational64::new(m.twice as i64, 2)));
        }
        if self.ramond {
            s.push_str(if key.vac == 0 { "|+⟩" } else { "|-⟩" });
        } else {
            s.push_str("|0⟩");
        }
        s
    }

    pub fn describe_vec(&self, v: &GradedVector) -> String {
        if v.is_zero() {
            return "0".into();
        }
        v.comps.iter().map(|(k, c)| format!("({})·{}", c, self.describe(k))).collect::<Vec<_>>().join(" + ")
    }
}

impl fmt::Display for FockKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.modes {
            write!(f, "g{}({})", m.gen, Rational64::new(m.twice as i64, 2))?;
        }
        write!(f, "|{}⟩", self.vac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fermion() -> FockSpace {
        FockSpace::new(vec![Generator { name: "psi".into(), stats: Statistics::Fermion }], vec![vec![Q::one()]], vec![1], false)
            .unwrap()
    }

    fn boson() -> FockSpace {
        FockSpace::new(vec![Generator { name: "h".into(), stats: Statistics::Boson }], vec![vec![Q::one()]], vec![0], false).unwrap()
    }

    #[test]
    fn fermion_basis_dims() {
        let f = fermion();
        let b = f.basis_up_to(Rational64::from_integer(2));
        let dim = |l2: i32| b.iter().filter(|k| k.level2 == l2).count();
        assert_eq!(dim(1), 1);
        assert_eq!(dim(4), 1);
        assert_eq!(dim(3), 1);
    }

    #[test]
    fn boson_partition_counts() {
        let h = boson();
        let b = h.basis_up_to(Rational64::from_integer(5));
        let dims: Vec<usize> = (0..=5).map(|l| b.iter().filter(|k| k.level2 == 2 * l).count()).collect();
        assert_eq!(dims, vec![1, 1, 2, 3, 5, 7]);
    }

    #[test]
    fn clifford_relation() {
        let f = fermion();
        let vac = GradedVector::basis(FockKey::vacuum(0));
        let v = f.apply_mode_vec(0, -1, &vac);
        let back = f.apply_mode_vec(0, 1, &v);
        assert_eq!(back, vac);
        let vv = f.apply_mode_vec(0, -1, &v);
        assert!(vv.is_zero());
    }

    #[test]
    fn heisenberg_relation() {
        let h = boson();
        let vac = GradedVector::basis(FockKey::vacuum(0));
        let v = h.apply_mode_vec(0, -2, &h.apply_mode_vec(0, -2, &vac));
        let back = h.apply_mode_vec(0, 2, &v);
        // h(1) h(-1)^2 |0⟩ = 2 h(-1)|0⟩
        let expect = h.apply_mode_vec(0, -2, &vac).scaled(&Scalar::int(2));
        assert_eq!(back, expect);
    }

    #[test]
    fn ramond_zero_mode_squares_to_half() {
        let r = FockSpace::new(vec![Generator { name: "psi".into(), stats: Statistics::Fermion }], vec![vec![Q::one()]], vec![0], true)
            .unwrap();
        let vac = GradedVector::basis(FockKey::vacuum(0));
        let once = r.apply_mode_vec(0, 0, &vac);
        let twice = r.apply_mode_vec(0, 0, &once);
        assert_eq!(twice, vac.scaled(&Scalar::rational(1, 2)));
    }
}
