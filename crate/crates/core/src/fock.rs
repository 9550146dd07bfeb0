//! Occupation-number representation of Fock space.
//!
//! A [`FockVector`] is a sparse map from [`OccupationState`]s to complex
//! amplitudes. The empty map is the null element; the vacuum is the map with
//! a single unit amplitude on the all-zero occupation. Restricting a vector to
//! a fixed total particle number recovers one summand of the orthogonal
//! decomposition into `n`-particle sectors.
//!
//! Ladder operators act on basis states with the usual factors:
//!
//! * Bose: `A†|n⟩ = √(n+1)|n+1⟩`, `A|n⟩ = √n|n-1⟩`, with creation past
//!   `nmax` dropped (truncation);
//! * Fermi: Jordan–Wigner sign `(-1)^(occupied slots below the target)`,
//!   where slots are ordered by `(species, mode)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{self, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistics {
    Bose,
    Fermi,
}

impl Statistics {
    /// `+1` for bosons, `-1` for fermions: the sign picked up when two
    /// ladder operators are exchanged.
    pub fn exchange_sign(self) -> i64 {
        match self {
            Statistics::Bose => 1,
            Statistics::Fermi => -1,
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Bose => f.write_str("bose"),
            Statistics::Fermi => f.write_str("fermi"),
        }
    }
}

/// Set of single-particle modes, possibly doubled into particle and
/// antiparticle species.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModeSpace {
    num_modes: usize,
    statistics: Statistics,
    nmax: u8,
    species_count: usize,
}

impl ModeSpace {
    pub const DEFAULT_NMAX: u8 = 8;

    pub fn new(num_modes: usize, statistics: Statistics, nmax: u8, species_count: usize) -> Result<Self> {
        if num_modes == 0 {
            return Err(Error::InvalidModeSpace("num_modes must be positive".into()));
        }
        if !(1..=2).contains(&species_count) {
            return Err(Error::InvalidModeSpace(format!("species_count must be 1 or 2, got {species_count}")));
        }
        let nmax = match statistics {
            Statistics::Fermi => 1,
            Statistics::Bose if nmax == 0 => return Err(Error::InvalidModeSpace("nmax must be positive".into())),
            Statistics::Bose => nmax,
        };
        Ok(Self { num_modes, statistics, nmax, species_count })
    }

    pub fn bose(num_modes: usize, nmax: u8) -> Result<Self> {
        Self::new(num_modes, Statistics::Bose, nmax, 1)
    }

    pub fn fermi(num_modes: usize) -> Result<Self> {
        Self::new(num_modes, Statistics::Fermi, 1, 1)
    }

    /// Same space with a distinct antiparticle species added.
    pub fn with_antiparticles(self) -> Self {
        Self { species_count: 2, ..self }
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    /// Largest occupation allowed in a single slot (1 for fermions).
    pub fn nmax(&self) -> u8 {
        self.nmax
    }

    pub fn species_count(&self) -> usize {
        self.species_count
    }

    /// Number of `(species, mode)` slots.
    pub fn num_slots(&self) -> usize {
        self.num_modes * self.species_count
    }

    /// Dimension of the truncated space, `None` on overflow.
    pub fn dimension(&self) -> Option<u128> {
        let per_slot = self.nmax as u128 + 1;
        per_slot.checked_pow(u32::try_from(self.num_slots()).ok()?)
    }

    pub fn slot(&self, mode: usize, species: usize) -> Result<usize> {
        if mode >= self.num_modes {
            return Err(Error::ModeOutOfRange { mode, num_modes: self.num_modes });
        }
        if species >= self.species_count {
            return Err(Error::SpeciesOutOfRange { species, species_count: self.species_count });
        }
        Ok(species * self.num_modes + mode)
    }

    /// Every occupation state with all slot occupations `<= bound`, in
    /// ascending order. Meant for small spaces.
    pub fn occupations_up_to(&self, bound: u8) -> Vec<OccupationState> {
        let bound = bound.min(self.nmax);
        let slots = self.num_slots();
        let mut out = Vec::new();
        let mut current = vec![0u8; slots];
        loop {
            out.push(OccupationState(current.clone().into_boxed_slice()));
            // odometer increment, last slot fastest so output stays sorted
            let mut i = slots;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if current[i] < bound {
                    current[i] += 1;
                    break;
                }
                current[i] = 0;
            }
        }
    }
}

/// Occupation numbers per `(species, mode)` slot, flattened as
/// `species * num_modes + mode`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationState(Box<[u8]>);

impl OccupationState {
    pub fn new(space: &ModeSpace, occupations: Vec<u8>) -> Result<Self> {
        if occupations.len() != space.num_slots() {
            return Err(Error::LengthMismatch { expected: space.num_slots(), got: occupations.len() });
        }
        if let Some(&n) = occupations.iter().find(|&&n| n > space.nmax) {
            return Err(Error::InvalidModeSpace(format!(
                "occupation {n} exceeds bound {} for {} statistics",
                space.nmax, space.statistics
            )));
        }
        Ok(Self(occupations.into_boxed_slice()))
    }

    pub fn empty(space: &ModeSpace) -> Self {
        Self(vec![0; space.num_slots()].into_boxed_slice())
    }

    pub fn occupations(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, slot: usize) -> u8 {
        self.0[slot]
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    pub fn species_total(&self, space: &ModeSpace, species: usize) -> usize {
        let m = space.num_modes;
        self.0[species * m..(species + 1) * m].iter().map(|&n| n as usize).sum()
    }

    fn occupied_below(&self, slot: usize) -> usize {
        self.0[..slot].iter().map(|&n| n as usize).sum()
    }

    fn with(&self, slot: usize, n: u8) -> Self {
        let mut occ = self.0.clone();
        occ[slot] = n;
        Self(occ)
    }
}

impl fmt::Display for OccupationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("⟩")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LadderKind {
    Create,
    Annihilate,
}

/// A single ladder operator acting on one slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LadderOp {
    pub kind: LadderKind,
    pub mode: usize,
    pub species: usize,
}

impl LadderOp {
    pub fn create(mode: usize) -> Self {
        Self { kind: LadderKind::Create, mode, species: 0 }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self { kind: LadderKind::Annihilate, mode, species: 0 }
    }

    pub fn of_species(self, species: usize) -> Self {
        Self { species, ..self }
    }
}

/// Which number operator to take the expectation of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumberOperator {
    /// `A†_α A_α` for one mode of one species.
    Mode { mode: usize, species: usize },
    /// `Σ_α A†_α A_α` over one species.
    Species(usize),
    /// Sum over every slot of every species.
    Total,
    /// `Σ_α (A†_α A_α − Ā†_α Ā_α)`: particles minus antiparticles.
    Net,
}

/// Apply one ladder operator to a basis state; `None` means the image is the
/// null element (Pauli blocking, annihilating an empty slot, or truncation).
fn ladder_on_basis<T: Real>(
    space: &ModeSpace,
    occ: &OccupationState,
    kind: LadderKind,
    slot: usize,
) -> Option<(OccupationState, T)> {
    let n = occ.get(slot);
    let (next, magnitude) = match (space.statistics, kind) {
        (_, LadderKind::Create) if n >= space.nmax => return None,
        (_, LadderKind::Annihilate) if n == 0 => return None,
        (Statistics::Bose, LadderKind::Create) => (n + 1, scalar::from_usize::<T>(n as usize + 1).sqrt()),
        (Statistics::Bose, LadderKind::Annihilate) => (n - 1, scalar::from_usize::<T>(n as usize).sqrt()),
        (Statistics::Fermi, LadderKind::Create) => (1, T::one()),
        (Statistics::Fermi, LadderKind::Annihilate) => (0, T::one()),
    };
    let factor =
        if space.statistics == Statistics::Fermi && occ.occupied_below(slot) % 2 == 1 { -magnitude } else { magnitude };
    Some((occ.with(slot, next), factor))
}

/// Sparse state vector in the occupation-number basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<T: Real> {
    space: ModeSpace,
    amplitudes: BTreeMap<OccupationState, Complex<T>>,
}

impl<T: Real> FockVector<T> {
    /// The null element (zero vector), distinct from the vacuum.
    pub fn null(space: ModeSpace) -> Self {
        Self { space, amplitudes: BTreeMap::new() }
    }

    /// Normalized vacuum: unit amplitude on the all-zero occupation.
    pub fn vacuum(space: ModeSpace) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(OccupationState::empty(&space), Complex::one());
        Self { space, amplitudes }
    }

    pub fn basis(space: ModeSpace, occupations: Vec<u8>) -> Result<Self> {
        let occ = OccupationState::new(&space, occupations)?;
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(occ, Complex::one());
        Ok(Self { space, amplitudes })
    }

    /// Build from `(occupation, amplitude)` pairs; repeated occupations add.
    pub fn from_terms<I>(space: ModeSpace, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u8>, Complex<T>)>,
    {
        let mut v = Self::null(space);
        for (occ, amp) in terms {
            let occ = OccupationState::new(&space, occ)?;
            v.accumulate(occ, amp);
        }
        v.prune();
        Ok(v)
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn is_null(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OccupationState, &Complex<T>)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, occ: &OccupationState) -> Complex<T> {
        self.amplitudes.get(occ).copied().unwrap_or_else(Complex::zero)
    }

    /// Amplitude on the basis state with the given occupations (zero if the
    /// occupations are out of bounds).
    pub fn amplitude_of(&self, occupations: &[u8]) -> Complex<T> {
        self.amplitudes
            .get(&OccupationState(occupations.to_vec().into_boxed_slice()))
            .copied()
            .unwrap_or_else(Complex::zero)
    }

    fn accumulate(&mut self, occ: OccupationState, amp: Complex<T>) {
        let slot = self.amplitudes.entry(occ).or_insert_with(Complex::zero);
        *slot = *slot + amp;
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, a| !a.is_zero());
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        scalar::abs(self.norm() - T::one()) <= scalar::norm_tolerance()
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm: scalar::to_f64(self.norm()) })
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm <= scalar::norm_tolerance() {
            return Err(Error::ZeroNorm("cannot normalize the null element".into()));
        }
        Ok(self.scaled(Complex::new(norm.recip(), T::zero())))
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        let mut out = self.clone();
        out.amplitudes.values_mut().for_each(|a| *a = *a * c);
        out.prune();
        out
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::ModeSpaceMismatch)
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: Complex<T>, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (occ, amp) in &other.amplitudes {
            out.accumulate(occ.clone(), *amp * c);
        }
        out.prune();
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(Complex::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(-Complex::<T>::one(), other)
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_space(other)?;
        let (small, large, conj_small) =
            if self.len() <= other.len() { (self, other, true) } else { (other, self, false) };
        let mut acc = Complex::zero();
        for (occ, a) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(occ) {
                acc = acc + if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// Component in the `n`-particle sector (total over all species).
    pub fn sector(&self, n: usize) -> Self {
        Self {
            space: self.space,
            amplitudes: self
                .amplitudes
                .iter()
                .filter(|(occ, _)| occ.total() == n)
                .map(|(o, a)| (o.clone(), *a))
                .collect(),
        }
    }

    /// Decomposition into particle-number sectors, keyed by `n`.
    pub fn sectors(&self) -> BTreeMap<usize, Self> {
        let mut out: BTreeMap<usize, Self> = BTreeMap::new();
        for (occ, amp) in &self.amplitudes {
            out.entry(occ.total()).or_insert_with(|| Self::null(self.space)).amplitudes.insert(occ.clone(), *amp);
        }
        out
    }

    pub fn apply(&self, op: LadderOp) -> Result<Self> {
        let slot = self.space.slot(op.mode, op.species)?;
        let mut out = Self::null(self.space);
        for (occ, amp) in &self.amplitudes {
            if let Some((next, factor)) = ladder_on_basis::<T>(&self.space, occ, op.kind, slot) {
                out.accumulate(next, *amp * factor);
            }
        }
        Ok(out)
    }

    /// Apply a product of ladder operators written left to right; the
    /// rightmost operator acts first.
    pub fn apply_product(&self, ops: &[LadderOp]) -> Result<Self> {
        ops.iter().rev().try_fold(self.clone(), |v, &op| v.apply(op))
    }

    pub fn create(&self, mode: usize, species: usize) -> Result<Self> {
        self.apply(LadderOp { kind: LadderKind::Create, mode, species })
    }

    pub fn annihilate(&self, mode: usize, species: usize) -> Result<Self> {
        self.apply(LadderOp { kind: LadderKind::Annihilate, mode, species })
    }

    /// `B† v` with `B† = Σ_α c_α A†_α` on the given species.
    pub fn transformed_create(&self, coeffs: &[Complex<T>], species: usize) -> Result<Self> {
        self.transformed(coeffs, species, LadderKind::Create)
    }

    /// `B v` with `B = Σ_α c_α* A_α`, the adjoint of
    /// [`transformed_create`](Self::transformed_create) with the same coefficients.
    pub fn transformed_annihilate(&self, coeffs: &[Complex<T>], species: usize) -> Result<Self> {
        self.transformed(coeffs, species, LadderKind::Annihilate)
    }

    fn transformed(&self, coeffs: &[Complex<T>], species: usize, kind: LadderKind) -> Result<Self> {
        if coeffs.len() != self.space.num_modes {
            return Err(Error::LengthMismatch { expected: self.space.num_modes, got: coeffs.len() });
        }
        let mut out = Self::null(self.space);
        for (mode, &c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = match kind {
                LadderKind::Create => c,
                LadderKind::Annihilate => c.conj(),
            };
            let slot = self.space.slot(mode, species)?;
            for (occ, amp) in &self.amplitudes {
                if let Some((next, factor)) = ladder_on_basis::<T>(&self.space, occ, kind, slot) {
                    out.accumulate(next, *amp * c * factor);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Expectation of a number operator in a normalized state, computed as
    /// `‖A_α v‖²` summed over the selected slots.
    pub fn number_expectation(&self, which: NumberOperator) -> Result<T> {
        self.ensure_normalized()?;
        let m = self.space.num_modes;
        let species_sum = |species: usize| -> Result<T> {
            let mut acc = T::zero();
            for mode in 0..m {
                acc = acc + self.annihilate(mode, species)?.norm_sqr();
            }
            Ok(acc)
        };
        match which {
            NumberOperator::Mode { mode, species } => Ok(self.annihilate(mode, species)?.norm_sqr()),
            NumberOperator::Species(species) => {
                self.space.slot(0, species)?;
                species_sum(species)
            }
            NumberOperator::Total => {
                (0..self.space.species_count).try_fold(T::zero(), |acc, s| Ok(acc + species_sum(s)?))
            }
            NumberOperator::Net => {
                let particles = species_sum(0)?;
                if self.space.species_count == 2 {
                    Ok(particles - species_sum(1)?)
                } else {
                    Ok(particles)
                }
            }
        }
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.norm())
    }
}

/// Result of building `A†(ξ) A†(η) ψ₀`.
#[derive(Clone, Debug, PartialEq)]
pub enum PairState<T: Real> {
    /// Normalized two-particle state.
    State(FockVector<T>),
    /// The product vanished (fermions with `ξ ∥ η`).
    Null,
}

impl<T: Real> PairState<T> {
    pub fn state(&self) -> Option<&FockVector<T>> {
        match self {
            PairState::State(v) => Some(v),
            PairState::Null => None,
        }
    }
}

/// Normalized two-particle state with one particle in `xi` and one in `eta`,
/// (anti)symmetrized by construction: `A†(ξ) A†(η) ψ₀` in occupation form.
pub fn two_particle_symmetrized<T: Real>(
    xi: &[Complex<T>],
    eta: &[Complex<T>],
    space: ModeSpace,
) -> Result<PairState<T>> {
    for coeffs in [xi, eta] {
        if coeffs.len() != space.num_modes() {
            return Err(Error::LengthMismatch { expected: space.num_modes(), got: coeffs.len() });
        }
        let norm: T = coeffs.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        if scalar::abs(norm - T::one()) > scalar::norm_tolerance() {
            return Err(Error::NotNormalized { norm: scalar::to_f64(norm) });
        }
    }
    let v = FockVector::vacuum(space).transformed_create(eta, 0)?.transformed_create(xi, 0)?;
    if v.norm() <= scalar::norm_tolerance() {
        Ok(PairState::Null)
    } else {
        Ok(PairState::State(v.normalized()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    #[test]
    fn vacuum_is_unit_on_empty_occupation() {
        let space = ModeSpace::bose(2, 8).unwrap();
        let v = FockVector::<f64>::vacuum(space);
        assert_eq!(v.len(), 1);
        assert_eq!(v.amplitude_of(&[0, 0]), c(1.0));
        assert_eq!(v.norm(), 1.0);
        assert_eq!(v.number_expectation(NumberOperator::Total).unwrap(), 0.0);
    }

    #[test]
    fn null_is_not_vacuum() {
        let space = ModeSpace::fermi(2).unwrap();
        let null = FockVector::<f64>::null(space);
        assert!(null.is_null());
        assert_ne!(null, FockVector::vacuum(space));
        assert!(FockVector::<f64>::vacuum(space).annihilate(1, 0).unwrap().is_null());
    }

    #[test]
    fn bose_double_creation_gives_sqrt_two() {
        let space = ModeSpace::bose(3, 8).unwrap();
        let v = FockVector::<f64>::vacuum(space).create(1, 0).unwrap().create(1, 0).unwrap();
        assert!((v.amplitude_of(&[0, 2, 0]).re - 2f64.sqrt()).abs() < 1e-15);
        let down = v.annihilate(1, 0).unwrap();
        assert!((down.amplitude_of(&[0, 1, 0]).re - 2.0).abs() < 1e-15);
        let once = FockVector::<f64>::basis(space, vec![0, 2, 0]).unwrap().annihilate(1, 0).unwrap();
        assert!((once.amplitude_of(&[0, 1, 0]).re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn fermi_pauli_blocking_and_sign() {
        let space = ModeSpace::fermi(2).unwrap();
        let one = FockVector::<f64>::vacuum(space).create(0, 0).unwrap();
        assert!(one.create(0, 0).unwrap().is_null());
        let both = one.create(1, 0).unwrap();
        assert_eq!(both.amplitude_of(&[1, 1]), c(-1.0));
        assert_eq!(one.annihilate(0, 0).unwrap(), FockVector::vacuum(space));
    }

    #[test]
    fn bose_truncation_drops_overflow() {
        let space = ModeSpace::bose(1, 2).unwrap();
        let top = FockVector::<f64>::basis(space, vec![2]).unwrap();
        assert!(top.create(0, 0).unwrap().is_null());
    }

    #[test]
    fn invalid_indices_error() {
        let space = ModeSpace::bose(2, 4).unwrap();
        let v = FockVector::<f64>::vacuum(space);
        assert!(matches!(v.create(2, 0), Err(Error::ModeOutOfRange { .. })));
        assert!(matches!(v.annihilate(0, 1), Err(Error::SpeciesOutOfRange { .. })));
        let other = FockVector::<f64>::vacuum(ModeSpace::bose(3, 4).unwrap());
        assert_eq!(v.inner(&other), Err(Error::ModeSpaceMismatch));
    }

    #[test]
    fn transformed_create_is_linear() {
        let space = ModeSpace::bose(2, 4).unwrap();
        let vac = FockVector::<f64>::vacuum(space);
        let unit = vac.transformed_create(&[c(0.0), c(1.0)], 0).unwrap();
        assert_eq!(unit, vac.create(1, 0).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mixed = vac.transformed_create(&[c(h), c(h)], 0).unwrap();
        assert!((mixed.amplitude_of(&[1, 0]).re - h).abs() < 1e-15);
        assert!((mixed.amplitude_of(&[0, 1]).re - h).abs() < 1e-15);
        assert!(vac.transformed_create(&[c(0.0), c(0.0)], 0).unwrap().is_null());
    }

    #[test]
    fn number_expectations() {
        let space = ModeSpace::bose(1, 8).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = FockVector::from_terms(space, [(vec![1], c(h)), (vec![2], c(h))]).unwrap();
        let n = v.number_expectation(NumberOperator::Total).unwrap();
        assert!((n - 1.5).abs() < 1e-14);

        let pair_space = ModeSpace::bose(2, 4).unwrap().with_antiparticles();
        let pair = FockVector::<f64>::vacuum(pair_space).create(0, 0).unwrap().create(0, 1).unwrap();
        assert_eq!(pair.number_expectation(NumberOperator::Net).unwrap(), 0.0);
        assert_eq!(pair.number_expectation(NumberOperator::Total).unwrap(), 2.0);
        assert_eq!(pair.number_expectation(NumberOperator::Mode { mode: 1, species: 0 }).unwrap(), 0.0);

        let unnormalized = v.scaled(c(2.0));
        assert!(matches!(unnormalized.number_expectation(NumberOperator::Total), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn two_particle_cases() {
        let fermi = ModeSpace::fermi(2).unwrap();
        let e0 = [c(1.0), c(0.0)];
        let e1 = [c(0.0), c(1.0)];
        let ab = two_particle_symmetrized(&e0, &e1, fermi).unwrap();
        let ba = two_particle_symmetrized(&e1, &e0, fermi).unwrap();
        assert_eq!(ab.state().unwrap().amplitude_of(&[1, 1]), c(1.0));
        assert_eq!(ba.state().unwrap().amplitude_of(&[1, 1]), c(-1.0));
        assert_eq!(two_particle_symmetrized(&e0, &e0, fermi).unwrap(), PairState::Null);

        let bose = ModeSpace::bose(2, 4).unwrap();
        let aa = two_particle_symmetrized(&e0, &e0, bose).unwrap();
        assert!((aa.state().unwrap().amplitude_of(&[2, 0]).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sectors_partition_the_vector() {
        let space = ModeSpace::bose(2, 3).unwrap();
        let v = FockVector::<f64>::from_terms(
            space,
            [(vec![0, 0], c(0.5)), (vec![1, 0], c(0.5)), (vec![0, 1], c(0.5)), (vec![1, 1], c(0.5))],
        )
        .unwrap();
        let sectors = v.sectors();
        assert_eq!(sectors.keys().copied().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(sectors[&1].len(), 2);
        let rebuilt = sectors.values().try_fold(FockVector::null(space), |acc, s| acc.add(s)).unwrap();
        assert_eq!(rebuilt, v);
    }

    #[test]
    fn occupation_enumeration_is_sorted_and_complete() {
        let space = ModeSpace::bose(2, 3).unwrap();
        let all = space.occupations_up_to(2);
        assert_eq!(all.len(), 9);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(space.dimension(), Some(16));
    }
}
