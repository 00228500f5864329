//! Choi vectorization and Pauli-channel action on the doubled Hilbert space.
//!
//! A density matrix `rho` on `L` qubits becomes the vector with amplitude
//! `rho[i][j]` at index `i + j * 2^L`: the low `L` bits are the upper-layer
//! (row) label, the high `L` bits the lower-layer (column) label, sites
//! little-endian within each layer. Bit value 0 is `Z = +1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Largest chain length for operations on the full `4^L` space.
pub const MAX_FULL_LENGTH: usize = 7;

/// Tolerance for the Kraus weights summing to one.
pub const TRACE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn phases(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    /// Product up to a phase.
    fn mul_projective(self, other: Pauli) -> Pauli {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => p,
            (a, b) if a == b => I,
            (X, Y) | (Y, X) => Z,
            (Y, Z) | (Z, Y) => X,
            _ => Y,
        }
    }

    /// 2x2 matrix in the `Z` basis.
    pub fn matrix(self) -> [[Complex<f64>; 2]; 2] {
        let o = Complex::new(0.0, 0.0);
        let r = |x: f64| Complex::new(x, 0.0);
        let i = |x: f64| Complex::new(0.0, x);
        match self {
            Pauli::I => [[r(1.0), o], [o, r(1.0)]],
            Pauli::X => [[o, r(1.0)], [r(1.0), o]],
            Pauli::Y => [[o, i(-1.0)], [i(1.0), o]],
            Pauli::Z => [[r(1.0), o], [o, r(-1.0)]],
        }
    }
}

/// Tensor product of single-site Paulis; `letters[k]` acts on site `k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidChannel("Pauli string must act on at least one site".into()));
        }
        Ok(Self { letters })
    }

    pub fn identity(length: usize) -> Self {
        Self { letters: vec![Pauli::I; length.max(1)] }
    }

    pub fn uniform(length: usize, p: Pauli) -> Self {
        Self { letters: vec![p; length.max(1)] }
    }

    /// Identity except for the given `(site, letter)` pairs.
    pub fn with_sites(length: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(length);
        for &(k, p) in sites {
            if k >= length {
                return Err(Error::IndexOutOfRange(format!("site {k} on a chain of length {length}")));
            }
            s.letters[k] = p;
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    /// Number of sites where the two strings carry different non-identity
    /// letters; the strings commute iff it is even.
    fn anticommuting_sites(&self, other: &Self) -> usize {
        self.letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.anticommuting_sites(other).is_multiple_of(2)
    }

    /// Product with the overall phase dropped.
    pub fn mul_projective(&self, other: &Self) -> Self {
        Self {
            letters: self
                .letters
                .iter()
                .zip(&other.letters)
                .map(|(&a, &b)| a.mul_projective(b))
                .collect(),
        }
    }

    /// Bit masks (sites flipped, sites phased) of the real doubled-space
    /// operator `conj(P) (x) P` restricted to one layer.
    fn masks(&self) -> (usize, usize) {
        let mut flip = 0;
        let mut phase = 0;
        for (k, p) in self.letters.iter().enumerate() {
            if p.flips() {
                flip |= 1 << k;
            }
            if p.phases() {
                phase |= 1 << k;
            }
        }
        (flip, phase)
    }

    /// Dense `2^L x 2^L` complex matrix, site 0 least significant.
    pub fn to_matrix(&self) -> DMatrix<Complex<f64>> {
        let dim = 1usize << self.len();
        DMatrix::from_fn(dim, dim, |r, c| {
            self.letters.iter().enumerate().fold(Complex::new(1.0, 0.0), |acc, (k, p)| {
                acc * p.matrix()[(r >> k) & 1][(c >> k) & 1]
            })
        })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{p:?}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidChannel(format!("unknown Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }
}

/// `rho -> sum_m w_m P_m rho P_m`, i.e. Kraus operators `sqrt(w_m) P_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    length: usize,
    terms: Vec<(f64, PauliString)>,
}

impl KrausChannel {
    /// Validates weights (positive, summing to one) and string lengths.
    /// Zero-weight terms are dropped.
    pub fn new(terms: Vec<(f64, PauliString)>) -> Result<Self> {
        let Some(length) = terms.first().map(|(_, p)| p.len()) else {
            return Err(Error::InvalidChannel("channel needs at least one Kraus operator".into()));
        };
        if let Some((_, p)) = terms.iter().find(|(_, p)| p.len() != length) {
            return Err(Error::LengthMismatch { expected: length, got: p.len() });
        }
        if let Some((w, _)) = terms.iter().find(|(w, _)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidChannel(format!("Kraus weight {w} is not a nonnegative number")));
        }
        let total: f64 = terms.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidChannel(format!("Kraus weights sum to {total}, not 1")));
        }
        let terms = terms.into_iter().filter(|(w, _)| *w > 0.0).collect();
        Ok(Self { length, terms })
    }

    pub fn identity(length: usize) -> Self {
        Self { length: length.max(1), terms: vec![(1.0, PauliString::identity(length))] }
    }

    /// `(1 - p) rho + p Z_i Z_{i+1} rho Z_i Z_{i+1}`.
    pub fn nn_bond(length: usize, site: usize, p: f64) -> Result<Self> {
        if site + 1 >= length {
            return Err(Error::IndexOutOfRange(format!("bond ({site}, {}) on a chain of length {length}", site + 1)));
        }
        Self::zz_pair(length, site, site + 1, p)
    }

    /// Composition of all nearest-neighbour bond channels of an open chain.
    pub fn nn_chain(length: usize, p: f64) -> Result<Self> {
        check_probability(p)?;
        (0..length.saturating_sub(1)).try_fold(Self::identity(length), |acc, i| {
            Ok(acc.compose(&Self::nn_bond(length, i, p)?))
        })
    }

    /// Pair channel of the all-to-all model, flip weight `(1 - exp(-2 tau / L)) / 2`.
    pub fn ir_pair(length: usize, i: usize, j: usize, tau: f64) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::NegativeTau(tau));
        }
        let q = 0.5 * (1.0 - (-2.0 * tau / length as f64).exp());
        Self::zz_pair(length, i, j, q)
    }

    /// Composition of the pair channels over all `i < j`.
    pub fn ir_all_pairs(length: usize, tau: f64) -> Result<Self> {
        let mut acc = Self::identity(length);
        for i in 0..length {
            for j in i + 1..length {
                acc = acc.compose(&Self::ir_pair(length, i, j, tau)?);
            }
        }
        Ok(acc)
    }

    /// `(1 - p) rho + p Z_k rho Z_k`.
    pub fn single_site_dephasing(length: usize, site: usize, p: f64) -> Result<Self> {
        let z = PauliString::with_sites(length, &[(site, Pauli::Z)])?;
        Self::new(vec![(1.0 - p, PauliString::identity(length)), (p, z)])
    }

    fn zz_pair(length: usize, i: usize, j: usize, p: f64) -> Result<Self> {
        if i == j {
            return Err(Error::IndexOutOfRange(format!("pair ({i}, {j}) must join distinct sites")));
        }
        let zz = PauliString::with_sites(length, &[(i, Pauli::Z), (j, Pauli::Z)])?;
        Self::new(vec![(1.0 - p, PauliString::identity(length)), (p, zz)])
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// Channel `other` applied after `self`, with equal strings merged.
    pub fn compose(&self, other: &Self) -> Self {
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (w1, p1) in &self.terms {
            for (w2, p2) in &other.terms {
                *merged.entry(p2.mul_projective(p1)).or_insert(0.0) += w1 * w2;
            }
        }
        Self {
            length: self.length,
            terms: merged.into_iter().map(|(p, w)| (w, p)).collect(),
        }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..0.5).contains(&p) {
        Ok(())
    } else {
        Err(Error::ProbabilityDomain(p))
    }
}

/// `tau = -ln(1 - 2p) / 2` for `p` in `[0, 1/2)`.
pub fn tau_from_p(p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(-0.5 * (-2.0 * p).ln_1p())
}

/// Inverse of [`tau_from_p`].
pub fn p_from_tau(tau: f64) -> Result<f64> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::NegativeTau(tau));
    }
    Ok(-0.5 * (-2.0 * tau).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// All `4^L` doubled basis states.
    Full4L,
    /// The `2^L`-dimensional sector invariant under every `X_i^u X_i^l`,
    /// basis `|⇑⟩ = (|↑↑⟩ + |↓↓⟩)/√2`, `|⇓⟩ = (|↑↓⟩ + |↓↑⟩)/√2` per site.
    ParityReduced2L,
}

impl Sector {
    fn name(self) -> &'static str {
        match self {
            Sector::Full4L => "Full4L",
            Sector::ParityReduced2L => "ParityReduced2L",
        }
    }

    pub fn dim(self, length: usize) -> usize {
        match self {
            Sector::Full4L => 1 << (2 * length),
            Sector::ParityReduced2L => 1 << length,
        }
    }
}

/// Vectorized density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledState {
    length: usize,
    sector: Sector,
    amplitudes: Vec<f64>,
}

impl DoubledState {
    pub fn new(length: usize, sector: Sector, amplitudes: Vec<f64>) -> Result<Self> {
        let dim = sector.dim(length);
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: amplitudes.len() });
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidChannel("state amplitudes must be finite".into()));
        }
        if amplitudes.iter().all(|&a| a == 0.0) {
            return Err(Error::InvalidChannel("state must have nonzero norm".into()));
        }
        Ok(Self { length, sector, amplitudes })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<f64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// `Tr rho`: sum over indices whose upper and lower labels agree.
    pub fn trace(&self) -> Result<f64> {
        self.expect_full()?;
        let n = 1usize << self.length;
        Ok((0..n).map(|i| self.amplitudes[i + i * n]).sum())
    }

    fn expect_full(&self) -> Result<()> {
        if self.sector == Sector::Full4L {
            Ok(())
        } else {
            Err(Error::SectorMismatch { expected: Sector::Full4L.name(), got: self.sector.name() })
        }
    }

    fn expect_reduced(&self) -> Result<()> {
        if self.sector == Sector::ParityReduced2L {
            Ok(())
        } else {
            Err(Error::SectorMismatch { expected: Sector::ParityReduced2L.name(), got: self.sector.name() })
        }
    }

    /// Maps a parity-reduced state into the full doubled space.
    pub fn embed(&self) -> Result<Self> {
        self.expect_reduced()?;
        guard_full(self.length)?;
        let l = self.length;
        let n = 1usize << l;
        let amp = 0.5f64.powf(l as f64 / 2.0);
        let amplitudes = (0..n * n)
            .map(|idx| {
                let (upper, lower) = (idx & (n - 1), idx >> l);
                self.amplitudes[upper ^ lower] * amp
            })
            .collect();
        Ok(Self { length: l, sector: Sector::Full4L, amplitudes })
    }

    /// Coordinates of a full state in the reduced basis. Exact only for
    /// states inside the positive-parity sector.
    pub fn reduce(&self) -> Result<Self> {
        self.expect_full()?;
        let l = self.length;
        let n = 1usize << l;
        let amp = 0.5f64.powf(l as f64 / 2.0);
        let mut out = vec![0.0; n];
        for (idx, &a) in self.amplitudes.iter().enumerate() {
            let (upper, lower) = (idx & (n - 1), idx >> l);
            out[upper ^ lower] += a * amp;
        }
        Ok(Self { length: l, sector: Sector::ParityReduced2L, amplitudes: out })
    }

    /// Projector onto the positive-parity sector: average over all
    /// products of `g_i = X_i^u X_i^l`.
    pub fn parity_project(&self) -> Result<Self> {
        self.expect_full()?;
        let l = self.length;
        let mut amps = self.amplitudes.clone();
        for site in 0..l {
            let g = (1usize << site) | (1usize << (site + l));
            let prev = amps.clone();
            for (idx, a) in amps.iter_mut().enumerate() {
                *a = 0.5 * (prev[idx] + prev[idx ^ g]);
            }
        }
        Ok(Self { length: l, sector: Sector::Full4L, amplitudes: amps })
    }
}

pub(crate) fn guard_full(length: usize) -> Result<()> {
    if length == 0 {
        return Err(Error::ModelDomain("chain length must be positive".into()));
    }
    if length > MAX_FULL_LENGTH {
        return Err(Error::SizeGuard { what: "full doubled-space length", limit: MAX_FULL_LENGTH, got: length });
    }
    Ok(())
}

/// `|rho⟩` for the product state with every spin along `+X`.
pub fn full_initial_state(length: usize) -> Result<DoubledState> {
    guard_full(length)?;
    let dim = Sector::Full4L.dim(length);
    let amp = 0.5f64.powi(length as i32);
    DoubledState::new(length, Sector::Full4L, vec![amp; dim])
}

/// Column-stacking vectorization of a Hermitian density matrix.
pub fn vectorize(rho: &DMatrix<Complex<f64>>) -> Result<DoubledState> {
    let n = rho.nrows();
    if n != rho.ncols() || n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfFour(rho.len()));
    }
    let length = n.trailing_zeros() as usize;
    guard_full(length)?;
    let mut herm = 0.0f64;
    let mut imag = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            herm = herm.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
            imag = imag.max(rho[(i, j)].im.abs());
        }
    }
    if herm > 1e-12 {
        return Err(Error::NotHermitian(herm));
    }
    if imag > 1e-12 {
        return Err(Error::ComplexEntries(imag));
    }
    // nalgebra storage is column-major, which is exactly the stacking order
    let amplitudes = rho.iter().map(|z| z.re).collect();
    DoubledState::new(length, Sector::Full4L, amplitudes)
}

/// Inverse of [`vectorize`].
pub fn devectorize(state: &DoubledState) -> Result<DMatrix<f64>> {
    state.expect_full()?;
    let n = 1usize << state.length;
    Ok(DMatrix::from_column_slice(n, n, &state.amplitudes))
}

/// `sum_m (B_m^* (x) B_m) |rho⟩` with `B_m = sqrt(w_m) P_m`.
///
/// Conjugation acts as `Y -> -Y` on one layer, so each term is a signed
/// permutation: flip upper and lower bits where the letter is `X` or `Y`,
/// and pick up `(-1)^(u_k + l_k)` where it is `Z` or `Y`.
pub fn apply_channel(channel: &KrausChannel, state: &DoubledState) -> Result<DoubledState> {
    state.expect_full()?;
    if channel.length != state.length {
        return Err(Error::LengthMismatch { expected: state.length, got: channel.length });
    }
    let l = state.length;
    let n = 1usize << l;
    let mut out = vec![0.0; n * n];
    for (w, p) in &channel.terms {
        let (flip, phase) = p.masks();
        let flip2 = flip | (flip << l);
        for (idx, &a) in state.amplitudes.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let (upper, lower) = (idx & (n - 1), idx >> l);
            let odd = ((upper ^ lower) & phase).count_ones() & 1 == 1;
            let s = if odd { -w } else { *w };
            out[idx ^ flip2] += s * a;
        }
    }
    Ok(DoubledState { length: l, sector: Sector::Full4L, amplitudes: out })
}

/// Effective Hamiltonian on the full doubled space.
#[derive(Debug, Clone, PartialEq)]
pub enum DoubledOperator {
    /// Diagonal in the doubled `Z` basis.
    Diagonal(Vec<f64>),
    /// General dense matrix; exponentiated by scaling and squaring.
    Dense(DMatrix<f64>),
}

impl DoubledOperator {
    pub fn dim(&self) -> usize {
        match self {
            DoubledOperator::Diagonal(d) => d.len(),
            DoubledOperator::Dense(m) => m.nrows(),
        }
    }
}

/// Max-abs entry of `channel - prefactor * exp(-tau H)` as superoperators,
/// i.e. over all doubled basis inputs.
pub fn effective_hamiltonian_check(
    channel: &KrausChannel,
    h: &DoubledOperator,
    prefactor: f64,
    tau: f64,
) -> Result<f64> {
    let l = channel.length;
    if l > 6 {
        return Err(Error::SizeGuard { what: "effective Hamiltonian check length", limit: 6, got: l });
    }
    let dim = Sector::Full4L.dim(l);
    if h.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: h.dim() });
    }
    let n = 1usize << l;
    let masks: Vec<(f64, usize, usize)> = channel
        .terms
        .iter()
        .map(|(w, p)| {
            let (flip, phase) = p.masks();
            (*w, flip | (flip << l), phase)
        })
        .collect();

    let expm = match h {
        DoubledOperator::Diagonal(_) => None,
        DoubledOperator::Dense(m) => Some(crate::dense::expm(&(m * (-tau)))?),
    };

    let mut worst = 0.0f64;
    let mut column = vec![0.0; dim];
    for k in 0..dim {
        column.iter_mut().for_each(|c| *c = 0.0);
        let (upper, lower) = (k & (n - 1), k >> l);
        for &(w, flip2, phase) in &masks {
            let odd = ((upper ^ lower) & phase).count_ones() & 1 == 1;
            column[k ^ flip2] += if odd { -w } else { w };
        }
        match (h, &expm) {
            (DoubledOperator::Diagonal(d), _) => {
                column[k] -= prefactor * (-tau * d[k]).exp();
                worst = column.iter().fold(worst, |m, c| m.max(c.abs()));
            }
            (_, Some(e)) => {
                for (r, c) in column.iter().enumerate() {
                    worst = worst.max((c - prefactor * e[(r, k)]).abs());
                }
            }
            _ => unreachable!(),
        }
    }
    Ok(worst)
}

/// Strong and weak symmetry of a Pauli channel under a Pauli generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub strong: bool,
    pub weak: bool,
    pub generator: PauliString,
    /// `K_m U = phases[m] U K_m`, one sign per Kraus term.
    pub phases: Vec<i8>,
}

pub fn classify_symmetry(channel: &KrausChannel, generator: &PauliString) -> Result<SymmetryReport> {
    if generator.len() != channel.length {
        return Err(Error::LengthMismatch { expected: channel.length, got: generator.len() });
    }
    let phases: Vec<i8> = channel
        .terms
        .iter()
        .map(|(_, p)| if p.commutes_with(generator) { 1 } else { -1 })
        .collect();
    Ok(SymmetryReport {
        strong: phases.iter().all(|&s| s == 1),
        // Pauli strings commute with a Pauli generator up to a sign, so
        // U (sum K rho K^dag) U^dag is always preserved.
        weak: true,
        generator: generator.clone(),
        phases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn basis_state_vectorizes_to_unit_vector() {
        let rho = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert_eq!(vectorize(&rho).unwrap().amplitudes(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn column_stacking_order() {
        let rho = DMatrix::from_row_slice(2, 2, &[c(0.7), c(0.2), c(0.2), c(0.3)]);
        let v = vectorize(&rho).unwrap();
        assert_eq!(v.amplitudes(), &[0.7, 0.2, 0.2, 0.3]);
        let asym = DMatrix::from_row_slice(2, 2, &[c(0.7), c(0.1), c(0.1), c(0.3)]);
        assert_eq!(devectorize(&vectorize(&asym).unwrap()).unwrap()[(1, 0)], 0.1);
    }

    #[test]
    fn maximally_mixed() {
        let rho = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(0.5)]);
        assert_eq!(vectorize(&rho).unwrap().amplitudes(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn vectorize_errors() {
        let bad = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.3), c(0.0), c(0.5)]);
        assert!(matches!(vectorize(&bad), Err(Error::NotHermitian(_))));
        let three = DMatrix::from_element(3, 3, c(0.0));
        assert!(matches!(vectorize(&three), Err(Error::NotPowerOfFour(9))));
        let cplx = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.5), Complex::new(0.0, 0.1), Complex::new(0.0, -0.1), c(0.5)],
        );
        assert!(matches!(vectorize(&cplx), Err(Error::ComplexEntries(_))));
    }

    #[test]
    fn identity_channel_is_noop() {
        let s = full_initial_state(3).unwrap();
        let out = apply_channel(&KrausChannel::identity(3), &s).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn half_flip_bond_kills_odd_components() {
        let s = full_initial_state(2).unwrap();
        let out = apply_channel(&KrausChannel::nn_bond(2, 0, 0.5).unwrap(), &s).unwrap();
        for (idx, &a) in out.amplitudes().iter().enumerate() {
            let (u, l) = (idx & 3, idx >> 2);
            let zz_even = (u ^ l).count_ones() % 2 == 0;
            let want = if zz_even { 0.25 } else { 0.0 };
            assert!((a - want).abs() < 1e-15, "idx {idx}");
        }
    }

    #[test]
    fn sector_mismatch() {
        let reduced = DoubledState::new(2, Sector::ParityReduced2L, vec![0.5; 4]).unwrap();
        assert!(matches!(
            apply_channel(&KrausChannel::identity(2), &reduced),
            Err(Error::SectorMismatch { .. })
        ));
    }

    #[test]
    fn tau_mapping() {
        assert_eq!(tau_from_p(0.0).unwrap(), 0.0);
        assert!((tau_from_p(0.25).unwrap() - 2f64.ln() / 2.0).abs() < 1e-15);
        assert!(matches!(tau_from_p(0.5), Err(Error::ProbabilityDomain(_))));
        assert!(tau_from_p(-0.1).is_err());
        assert!(tau_from_p(0.4999999).unwrap() > tau_from_p(0.49).unwrap());
        assert!((p_from_tau(tau_from_p(0.3).unwrap()).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn symmetry_classification() {
        let gx = PauliString::uniform(4, Pauli::X);
        let nn = KrausChannel::nn_chain(4, 0.2).unwrap();
        let r = classify_symmetry(&nn, &gx).unwrap();
        assert!(r.strong && r.weak);

        let z = KrausChannel::single_site_dephasing(4, 1, 0.3).unwrap();
        let r = classify_symmetry(&z, &gx).unwrap();
        assert!(!r.strong && r.weak);
        assert_eq!(r.phases, vec![1, -1]);

        let r = classify_symmetry(&KrausChannel::identity(4), &"XYZI".parse().unwrap()).unwrap();
        assert!(r.strong);
    }

    #[test]
    fn channel_validation() {
        let z = PauliString::uniform(2, Pauli::Z);
        assert!(KrausChannel::new(vec![(0.6, z.clone())]).is_err());
        assert!(KrausChannel::new(vec![(1.0, z.clone()), (0.0, PauliString::identity(3))]).is_err());
        assert!(KrausChannel::new(vec![(1.5, z.clone()), (-0.5, z)]).is_err());
        assert!(KrausChannel::nn_bond(3, 2, 0.1).is_err());
    }

    #[test]
    fn composition_merges_strings() {
        let c = KrausChannel::nn_chain(4, 0.1).unwrap();
        assert_eq!(c.terms().len(), 8);
        let total: f64 = c.terms().iter().map(|(w, _)| w).sum();
        assert!((total - 1.0).abs() < 1e-15);
        // all-pairs channel only produces even-weight Z strings
        assert_eq!(KrausChannel::ir_all_pairs(4, 0.5).unwrap().terms().len(), 8);
    }

    #[test]
    fn parity_projector_is_idempotent_and_keeps_initial_state() {
        let s = full_initial_state(2).unwrap();
        assert_eq!(s.parity_project().unwrap(), s);
        let mixed = DoubledState::new(2, Sector::Full4L, (0..16).map(|i| i as f64).collect()).unwrap();
        let once = mixed.parity_project().unwrap();
        let twice = once.parity_project().unwrap();
        for (a, b) in once.amplitudes().iter().zip(twice.amplitudes()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn embed_then_reduce_roundtrips() {
        let r = DoubledState::new(3, Sector::ParityReduced2L, (1..=8).map(f64::from).collect()).unwrap();
        let back = r.embed().unwrap().reduce().unwrap();
        for (a, b) in r.amplitudes().iter().zip(back.amplitudes()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((r.norm() - r.embed().unwrap().norm()).abs() < 1e-12);
    }
}
