//! Bit vectors and Pauli masks over circuit qubits.

use serde::Serialize;

/// Fixed-length bit vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        let w = &mut self.words[i >> 6];
        let b = 1u64 << (i & 63);
        if v {
            *w |= b;
        } else {
            *w &= !b;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn xor_with(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

impl Serialize for BitVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let ones: Vec<usize> = self.ones().collect();
        ones.serialize(s)
    }
}

/// Single-qubit Pauli encoded as `x | z << 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Pauli(pub u8);

impl Pauli {
    pub const I: Pauli = Pauli(0);
    pub const X: Pauli = Pauli(1);
    pub const Z: Pauli = Pauli(2);
    pub const Y: Pauli = Pauli(3);

    pub fn x(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn z(self) -> bool {
        self.0 & 2 == 2
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    pub fn compose(self, o: Pauli) -> Pauli {
        Pauli(self.0 ^ o.0)
    }
}

/// X and Z parts of a Pauli operator on every circuit qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PauliMask {
    pub x_bits: BitVec,
    pub z_bits: BitVec,
}

impl PauliMask {
    pub fn identity(n: usize) -> Self {
        PauliMask { x_bits: BitVec::zeros(n), z_bits: BitVec::zeros(n) }
    }

    pub fn len(&self) -> usize {
        self.x_bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli(self.x_bits.get(q) as u8 | (self.z_bits.get(q) as u8) << 1)
    }

    pub fn apply(&mut self, q: usize, p: Pauli) {
        if p.x() {
            self.x_bits.flip(q);
        }
        if p.z() {
            self.z_bits.flip(q);
        }
    }

    /// Composition (phases dropped).
    pub fn compose(&mut self, other: &PauliMask) {
        self.x_bits.xor_with(&other.x_bits);
        self.z_bits.xor_with(&other.z_bits);
    }

    pub fn clear(&mut self) {
        self.x_bits.clear();
        self.z_bits.clear();
    }

    pub fn weight(&self) -> usize {
        (0..self.len()).filter(|&q| !self.get(q).is_identity()).count()
    }
}
