//! Signed Pauli strings and their algebra.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, CMatrix, I, ONE, ZERO};
use crate::qstate::{DENSE_PURE_LIMIT, bit_of};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Product of two single-qubit Paulis as (power of i, letter).
    pub fn mul_with_phase(self, rhs: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, rhs) {
            (I, p) | (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
        }
    }

    pub fn matrix(self) -> CMatrix {
        let m = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        CMatrix::from_row_slice(2, 2, &m)
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Global phase i^k, stored as k mod 4.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_power(k: u8) -> Phase {
        match k & 3 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn power(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn value(self) -> Complex64 {
        match self {
            Phase::PlusOne => ONE,
            Phase::PlusI => I,
            Phase::MinusOne => -ONE,
            Phase::MinusI => -I,
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, Phase::PlusOne | Phase::MinusOne)
    }
}

// phases are powers of i, so multiplying adds exponents
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.power() + rhs.power())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    phase: Phase,
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(phase: Phase, letters: Vec<Pauli>) -> Self {
        PauliString { phase, letters }
    }

    pub fn identity(n: usize) -> Self {
        PauliString::new(Phase::PlusOne, vec![Pauli::I; n])
    }

    /// A single letter on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut letters = vec![Pauli::I; n];
        letters[q] = p;
        PauliString::new(Phase::PlusOne, letters)
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn negated(&self) -> Self {
        PauliString::new(self.phase * Phase::MinusOne, self.letters.clone())
    }

    pub fn is_identity_letters(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// A string with real phase is a Hermitian involution (up to sign).
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n_qubits(), other.n_qubits());
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|&(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        clashes % 2 == 0
    }

    pub fn try_mul(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.n_qubits() != rhs.n_qubits() {
            return Err(Error::Dimension {
                expected: self.n_qubits(),
                got: rhs.n_qubits(),
            });
        }
        let mut power = self.phase.power() + rhs.phase.power();
        let letters = self
            .letters
            .iter()
            .zip(&rhs.letters)
            .map(|(&a, &b)| {
                let (k, p) = a.mul_with_phase(b);
                power += k;
                p
            })
            .collect();
        Ok(PauliString::new(Phase::from_power(power), letters))
    }

    /// Bit masks of X-type and Z-type support, qubit 0 in the most significant position.
    pub(crate) fn masks(&self) -> (usize, usize) {
        let n = self.n_qubits();
        let mut x = 0usize;
        let mut z = 0usize;
        for (q, &p) in self.letters.iter().enumerate() {
            let bit = bit_of(n, q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit
                }
                Pauli::Z => z |= bit,
            }
        }
        (x, z)
    }

    /// Sparse action: P|b⟩ = coeff(b) |b ⊕ x_mask⟩.
    pub(crate) fn action(&self) -> PauliAction {
        let (x_mask, z_mask) = self.masks();
        let n_y = self.letters.iter().filter(|&&p| p == Pauli::Y).count() as u8;
        PauliAction {
            x_mask,
            z_mask,
            base: Phase::from_power(self.phase.power() + n_y).value(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct PauliAction {
    pub x_mask: usize,
    pub z_mask: usize,
    pub base: Complex64,
}

impl PauliAction {
    #[inline]
    pub fn apply(&self, b: usize) -> (usize, Complex64) {
        let c = if (b & self.z_mask).count_ones().is_multiple_of(2) {
            self.base
        } else {
            -self.base
        };
        (b ^ self.x_mask, c)
    }
}

impl Mul for &PauliString {
    type Output = PauliString;
    fn mul(self, rhs: &PauliString) -> PauliString {
        self.try_mul(rhs).expect("Pauli strings of different length")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase {
            Phase::PlusOne => "+",
            Phase::PlusI => "+i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        };
        write!(f, "{sign}")?;
        for p in &self.letters {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PauliString {
    type Err = Error;

    /// Parses the `Display` form, e.g. "XZI", "+XY", "-iZ".
    fn from_str(s: &str) -> Result<Self> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (Phase::PlusI, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (Phase::MinusI, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (Phase::PlusOne, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MinusOne, r)
        } else {
            (Phase::PlusOne, s)
        };
        let letters = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidArgument(format!("bad Pauli letter {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::InvalidArgument("empty Pauli string".into()));
        }
        Ok(PauliString::new(phase, letters))
    }
}

/// Dense matrix of a Pauli string: phase times the Kronecker product in qubit order.
pub fn pauli_to_matrix(p: &PauliString) -> Result<CMatrix> {
    let n = p.n_qubits();
    if n > DENSE_PURE_LIMIT {
        return Err(Error::SizeCap {
            what: "dense Pauli matrix",
            n,
            limit: DENSE_PURE_LIMIT,
        });
    }
    let dim = 1usize << n;
    let action = p.action();
    let mut m = CMatrix::zeros(dim, dim);
    for b in 0..dim {
        let (out, c) = action.apply(b);
        m[(out, b)] = c;
    }
    Ok(m)
}

/// Reference construction through explicit Kronecker products.
pub fn pauli_to_matrix_kron(p: &PauliString) -> CMatrix {
    let mut m = CMatrix::from_element(1, 1, p.phase.value());
    for &letter in &p.letters {
        m = kron(&m, &letter.matrix());
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(phase: Phase, s: &str) -> PauliString {
        let letters = s
            .chars()
            .map(|c| match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => panic!("bad letter"),
            })
            .collect();
        PauliString::new(phase, letters)
    }

    #[test]
    fn parse_round_trips_display() {
        for text in ["+XYZ", "-iIZ", "+iY", "-XX"] {
            let p: PauliString = text.parse().unwrap();
            assert_eq!(p.to_string(), text);
        }
        assert_eq!("ZI".parse::<PauliString>().unwrap(), ps(Phase::PlusOne, "ZI"));
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
    }

    fn close(a: &CMatrix, b: &CMatrix) -> bool {
        (a - b).iter().all(|z| z.norm() < 1e-12)
    }

    #[test]
    fn single_qubit_table_matches_matrices() {
        let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for &a in &all {
            for &b in &all {
                let (k, c) = a.mul_with_phase(b);
                let lhs = a.matrix() * b.matrix();
                let rhs = c.matrix() * Phase::from_power(k).value();
                assert!(close(&lhs, &rhs), "{a:?}*{b:?}");
            }
        }
    }

    #[test]
    fn z_matrix_is_diag() {
        let m = pauli_to_matrix(&ps(Phase::PlusOne, "Z")).unwrap();
        assert_eq!(m[(0, 0)], ONE);
        assert_eq!(m[(1, 1)], -ONE);
        assert_eq!(m[(0, 1)], ZERO);
    }

    #[test]
    fn identity_two_qubits() {
        let m = pauli_to_matrix(&ps(Phase::PlusOne, "II")).unwrap();
        assert!(close(&m, &CMatrix::identity(4, 4)));
    }

    #[test]
    fn ix_times_y_is_minus_z() {
        let a = ps(Phase::PlusI, "X");
        let b = ps(Phase::PlusOne, "Y");
        let c = &a * &b;
        assert_eq!(c, ps(Phase::MinusOne, "Z"));
        let dense = pauli_to_matrix(&a).unwrap() * pauli_to_matrix(&b).unwrap();
        assert!(close(&dense, &pauli_to_matrix(&c).unwrap()));
    }

    #[test]
    fn size_cap_is_enforced() {
        let p = PauliString::identity(DENSE_PURE_LIMIT + 1);
        assert!(matches!(pauli_to_matrix(&p), Err(Error::SizeCap { .. })));
    }

    fn arb_string(n: usize) -> impl Strategy<Value = PauliString> {
        (
            0u8..4,
            proptest::collection::vec(prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)], n),
        )
            .prop_map(|(k, letters)| PauliString::new(Phase::from_power(k), letters))
    }

    proptest! {
        #[test]
        fn product_is_associative(a in arb_string(4), b in arb_string(4), c in arb_string(4)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn square_is_signed_identity(a in arb_string(5)) {
            let sq = &a * &a;
            prop_assert!(sq.is_identity_letters());
            prop_assert!(sq.phase().is_real());
        }

        #[test]
        fn sparse_matrix_matches_kronecker(a in arb_string(3)) {
            prop_assert!(close(&pauli_to_matrix(&a).unwrap(), &pauli_to_matrix_kron(&a)));
        }

        #[test]
        fn product_matches_dense_product(a in arb_string(3), b in arb_string(3)) {
            let dense = pauli_to_matrix(&a).unwrap() * pauli_to_matrix(&b).unwrap();
            prop_assert!(close(&dense, &pauli_to_matrix(&(&a * &b)).unwrap()));
        }

        #[test]
        fn commutation_matches_dense(a in arb_string(3), b in arb_string(3)) {
            let ma = pauli_to_matrix(&a).unwrap();
            let mb = pauli_to_matrix(&b).unwrap();
            let comm = &ma * &mb - &mb * &ma;
            let dense_commute = comm.iter().all(|z| z.norm() < 1e-12);
            prop_assert_eq!(a.commutes_with(&b), dense_commute);
        }
    }
}
