//! Pauli strings, weighted Pauli sums and their matrix-free action on states.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::BufRead;

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{c, cone, czero, Real, C};
use crate::state::Statevector;

/// Pauli strings are limited to 64 qubits (bit-mask representation).
pub const MAX_PAULI_QUBITS: usize = 64;
/// Largest register for which dense matrices may be materialised.
pub const DENSE_QUBIT_CAP: usize = 12;
/// Terms with |coefficient| below this are dropped on canonicalisation.
pub const DROP_TOLERANCE: f64 = 1e-14;
/// Largest imaginary residue accepted when forming a Hermitian sum.
pub const IMAG_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub const ALL: [PauliOp; 4] = [PauliOp::I, PauliOp::X, PauliOp::Y, PauliOp::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            PauliOp::I => (false, false),
            PauliOp::X => (true, false),
            PauliOp::Y => (true, true),
            PauliOp::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }

    pub fn from_letter(ch: char) -> Option<Self> {
        match ch {
            'I' => Some(PauliOp::I),
            'X' => Some(PauliOp::X),
            'Y' => Some(PauliOp::Y),
            'Z' => Some(PauliOp::Z),
            _ => None,
        }
    }

    /// Single-qubit product `self · other = phase · letter`, phase as a power of `i`.
    fn product(self, other: PauliOp) -> (u8, PauliOp) {
        use PauliOp::*;
        match (self, other) {
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
}

/// Tensor product of single-qubit Paulis; qubit 0 is the least significant bit.
#[derive(Clone)]
pub struct PauliString {
    ops: Vec<PauliOp>,
    x_mask: u64,
    z_mask: u64,
}

impl PauliString {
    pub fn new(ops: Vec<PauliOp>) -> Result<Self> {
        if ops.len() > MAX_PAULI_QUBITS {
            return Err(Error::Resource { what: "Pauli string", n: ops.len(), cap: MAX_PAULI_QUBITS });
        }
        let (mut x_mask, mut z_mask) = (0u64, 0u64);
        for (q, op) in ops.iter().enumerate() {
            let (x, z) = op.bits();
            if x {
                x_mask |= 1 << q;
            }
            if z {
                z_mask |= 1 << q;
            }
        }
        Ok(Self { ops, x_mask, z_mask })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![PauliOp::I; n]).expect("identity within cap")
    }

    /// Builds a string from sparse `(qubit, letter)` pairs.
    pub fn from_sparse(n: usize, letters: &[(usize, PauliOp)]) -> Result<Self> {
        let mut ops = vec![PauliOp::I; n];
        for &(q, op) in letters {
            if q >= n {
                return Err(Error::Range(format!("qubit {q} outside {n}-qubit string")));
            }
            ops[q] = op;
        }
        Self::new(ops)
    }

    /// Parses compact notation like `"X0 Z1 Y3"` or `"I"`.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let mut chars = tok.chars();
            let op = chars
                .next()
                .and_then(PauliOp::from_letter)
                .ok_or_else(|| Error::Parse { line: 0, msg: format!("bad Pauli token `{tok}`") })?;
            let q: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::Parse { line: 0, msg: format!("bad qubit index in `{tok}`") })?;
            letters.push((q, op));
        }
        Self::from_sparse(n, &letters)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[PauliOp] {
        &self.ops
    }

    #[inline]
    pub fn op(&self, q: usize) -> PauliOp {
        self.ops[q]
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&q| self.ops[q] != PauliOp::I).collect()
    }

    pub fn weight(&self) -> usize {
        (self.x_mask | self.z_mask).count_ones() as usize
    }

    fn y_count(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    /// `P|b⟩ = phase(b) |b ⊕ x⟩`, returns `phase(b)`.
    #[inline]
    pub fn phase_on<T: Real>(&self, basis: usize) -> C<T> {
        let sign_flip = ((basis as u64) & self.z_mask).count_ones() & 1 == 1;
        let base = i_power::<T>(self.y_count() as u8);
        if sign_flip {
            -base
        } else {
            base
        }
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        ensure_dim(self.n(), other.n())?;
        let anti = (self.x_mask & other.z_mask) ^ (self.z_mask & other.x_mask);
        Ok(anti.count_ones() % 2 == 0)
    }

    /// `self · other = phase · product` with `phase ∈ {1, i, -1, -i}`.
    pub fn multiply<T: Real>(&self, other: &PauliString) -> Result<(C<T>, PauliString)> {
        let (k, p) = self.multiply_exponent(other)?;
        Ok((i_power(k), p))
    }

    /// Like [`PauliString::multiply`] but returns the phase as a power of `i`.
    pub fn multiply_exponent(&self, other: &PauliString) -> Result<(u8, PauliString)> {
        ensure_dim(self.n(), other.n())?;
        let mut power = 0u8;
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(a, b)| {
                let (k, p) = a.product(*b);
                power = (power + k) % 4;
                p
            })
            .collect();
        Ok((power, PauliString::new(ops)?))
    }

    /// Dense `2^n × 2^n` matrix (oracle use only).
    pub fn dense<T: Real>(&self) -> Result<CMatrix<T>> {
        PauliSum::from_terms(self.n(), vec![(T::one(), self.clone())])?.dense_matrix()
    }
}

#[inline]
pub(crate) fn i_power<T: Real>(k: u8) -> C<T> {
    match k % 4 {
        0 => cone(),
        1 => c(T::zero(), T::one()),
        2 => c(-T::one(), T::zero()),
        _ => c(T::zero(), -T::one()),
    }
}

impl PartialEq for PauliString {
    fn eq(&self, other: &Self) -> bool {
        self.ops == other.ops
    }
}

impl Eq for PauliString {}

impl Hash for PauliString {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ops.len().hash(state);
        self.x_mask.hash(state);
        self.z_mask.hash(state);
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for (q, op) in self.ops.iter().enumerate() {
            if *op == PauliOp::I {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", op.letter(), q)?;
            first = false;
        }
        Ok(())
    }
}

/// Hermitian operator `Σ_k c_k P_k` with real coefficients and distinct strings.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum<T> {
    n: usize,
    terms: Vec<(T, PauliString)>,
}

impl<T: Real> PauliSum<T> {
    /// Canonicalising constructor for real coefficients.
    pub fn from_terms(n: usize, terms: Vec<(T, PauliString)>) -> Result<Self> {
        Self::from_complex_terms(n, terms.into_iter().map(|(w, p)| (c(w, T::zero()), p)).collect())
    }

    /// Merges duplicate strings (first-occurrence order), drops negligible
    /// terms and rejects non-Hermitian residues.
    pub fn from_complex_terms(n: usize, terms: Vec<(C<T>, PauliString)>) -> Result<Self> {
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        let mut merged: Vec<(C<T>, PauliString)> = Vec::new();
        for (w, p) in terms {
            ensure_dim(n, p.n())?;
            match index.get(&p) {
                Some(&i) => merged[i].0 += w,
                None => {
                    index.insert(p.clone(), merged.len());
                    merged.push((w, p));
                }
            }
        }
        let drop = T::lit(DROP_TOLERANCE);
        let imag = T::lit(IMAG_TOLERANCE);
        let mut out = Vec::with_capacity(merged.len());
        for (w, p) in merged {
            if w.im.abs() > imag {
                return Err(Error::NotHermitian(format!("term {p} has coefficient {w}")));
            }
            if w.re.abs() >= drop {
                out.push((w.re, p));
            }
        }
        Ok(Self { n, terms: out })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(T, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the identity string (zero when absent).
    pub fn identity_coefficient(&self) -> T {
        self.terms.iter().filter(|(_, p)| p.is_identity()).map(|(w, _)| *w).sum()
    }

    /// `Σ_k c_k P_k |psi⟩`, one amplitude permutation per term.
    pub fn apply(&self, psi: &Statevector<T>) -> Result<Statevector<T>> {
        ensure_dim(self.n, psi.n())?;
        let amps = psi.amps();
        let mut out = vec![czero::<T>(); amps.len()];
        for (w, p) in &self.terms {
            let x = p.x_mask() as usize;
            let base = p.phase_on::<T>(0) * *w;
            let z = p.z_mask();
            for (b, a) in amps.iter().enumerate() {
                let coeff = if ((b as u64) & z).count_ones() & 1 == 1 { -base } else { base };
                out[b ^ x] += coeff * a;
            }
        }
        Ok(Statevector::from_amps_unchecked(self.n, out))
    }

    /// Dense Hermitian matrix; refuses registers above [`DENSE_QUBIT_CAP`].
    pub fn dense_matrix(&self) -> Result<CMatrix<T>> {
        if self.n > DENSE_QUBIT_CAP {
            return Err(Error::Resource { what: "dense matrix", n: self.n, cap: DENSE_QUBIT_CAP });
        }
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for (w, p) in &self.terms {
            let x = p.x_mask() as usize;
            for b in 0..dim {
                m[(b ^ x, b)] += p.phase_on::<T>(b) * *w;
            }
        }
        Ok(m)
    }

    /// Precomputes the grouped form used on hot paths.
    pub fn compile(&self) -> PauliOperator<T> {
        PauliOperator::new(self)
    }

    /// Parses the line-oriented text format.
    ///
    /// `n` may be given explicitly, taken from a `# qubits <n>` comment, or
    /// inferred from the largest qubit index present.
    pub fn read_text<R: BufRead>(reader: R, n: Option<usize>) -> Result<Self> {
        let mut declared = n;
        let mut raw: Vec<(usize, T, Vec<(usize, PauliOp)>)> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                let mut words = comment.split_whitespace();
                if declared.is_none() && words.next() == Some("qubits") {
                    if let Some(v) = words.next().and_then(|w| w.parse().ok()) {
                        declared = Some(v);
                    }
                }
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let coeff_text = fields.next().unwrap_or_default();
            let coeff: f64 = coeff_text
                .parse()
                .map_err(|_| Error::Parse { line: line_no, msg: format!("bad coefficient `{coeff_text}`") })?;
            let mut letters = Vec::new();
            let mut saw_any = false;
            for tok in fields {
                saw_any = true;
                if tok == "I" {
                    continue;
                }
                let mut chars = tok.chars();
                let op = chars
                    .next()
                    .and_then(PauliOp::from_letter)
                    .ok_or_else(|| Error::Parse { line: line_no, msg: format!("bad Pauli token `{tok}`") })?;
                let q: usize = chars
                    .as_str()
                    .parse()
                    .map_err(|_| Error::Parse { line: line_no, msg: format!("bad qubit index in `{tok}`") })?;
                if letters.iter().any(|(p, _)| *p == q) {
                    return Err(Error::Parse { line: line_no, msg: format!("qubit {q} repeated") });
                }
                letters.push((q, op));
            }
            if !saw_any {
                return Err(Error::Parse { line: line_no, msg: "missing Pauli letters".into() });
            }
            raw.push((line_no, T::lit(coeff), letters));
        }
        let inferred = raw.iter().flat_map(|(_, _, l)| l.iter().map(|(q, _)| q + 1)).max().unwrap_or(0);
        let n = declared.unwrap_or(inferred);
        let mut terms = Vec::with_capacity(raw.len());
        for (line, w, letters) in raw {
            let p = PauliString::from_sparse(n, &letters).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            terms.push((w, p));
        }
        Self::from_terms(n, terms)
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        Self::read_text(text.as_bytes(), None)
    }

    /// Serialises to the text format with a `# qubits` header comment.
    pub fn to_text(&self) -> String {
        let mut s = format!("# qubits {}\n", self.n);
        for (w, p) in &self.terms {
            s.push_str(&format!("{} {}\n", w.as_f64(), p));
        }
        s
    }
}

/// A [`PauliSum`] regrouped by X-mask: each group is one amplitude permutation
/// followed by a precomputed diagonal.
#[derive(Clone, Debug)]
pub struct PauliOperator<T> {
    n: usize,
    groups: Vec<(usize, Vec<C<T>>)>,
}

impl<T: Real> PauliOperator<T> {
    pub fn new(sum: &PauliSum<T>) -> Self {
        let dim = 1usize << sum.n();
        let mut order: Vec<u64> = Vec::new();
        let mut diag: HashMap<u64, Vec<C<T>>> = HashMap::new();
        for (w, p) in sum.terms() {
            let entry = diag.entry(p.x_mask()).or_insert_with(|| {
                order.push(p.x_mask());
                vec![czero(); dim]
            });
            for (b, d) in entry.iter_mut().enumerate() {
                *d += p.phase_on::<T>(b) * *w;
            }
        }
        let groups = order.into_iter().map(|x| (x as usize, diag.remove(&x).unwrap_or_default())).collect();
        Self { n: sum.n(), groups }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, psi: &Statevector<T>) -> Result<Statevector<T>> {
        ensure_dim(self.n, psi.n())?;
        let mut out = vec![czero(); psi.dim()];
        self.apply_into(psi.amps(), &mut out);
        Ok(Statevector::from_amps_unchecked(self.n, out))
    }

    pub(crate) fn apply_into(&self, amps: &[C<T>], out: &mut [C<T>]) {
        out.iter_mut().for_each(|o| *o = czero());
        for (x, d) in &self.groups {
            for (b, (a, w)) in amps.iter().zip(d).enumerate() {
                out[b ^ x] += w * a;
            }
        }
    }

    /// `⟨psi|H|psi⟩` without allocating `H|psi⟩`; imaginary residue returned too.
    pub fn expectation_complex(&self, amps: &[C<T>]) -> C<T> {
        let mut acc = czero();
        for (x, d) in &self.groups {
            for (b, (a, w)) in amps.iter().zip(d).enumerate() {
                acc += amps[b ^ x].conj() * w * a;
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(n: usize, s: &str) -> PauliString {
        PauliString::parse(n, s).unwrap()
    }

    #[test]
    fn commutation_examples() {
        assert!(ps(1, "X0").commutes(&ps(1, "X0")).unwrap());
        assert!(!ps(1, "X0").commutes(&ps(1, "Z0")).unwrap());
        assert!(ps(2, "X0 Z1").commutes(&ps(2, "Z0 X1")).unwrap());
        assert!(matches!(ps(1, "X0").commutes(&ps(2, "X0")), Err(Error::Dimension { .. })));
    }

    #[test]
    fn multiplication_examples() {
        let (ph, p) = ps(1, "I").multiply::<f64>(&ps(1, "Z0")).unwrap();
        assert_eq!((ph, p), (c(1.0, 0.0), ps(1, "Z0")));
        let (ph, p) = ps(1, "X0").multiply::<f64>(&ps(1, "Y0")).unwrap();
        assert_eq!((ph, p), (c(0.0, 1.0), ps(1, "Z0")));
        let (ph, p) = ps(2, "X0 Y1").multiply::<f64>(&ps(2, "Y0 Y1")).unwrap();
        assert_eq!((ph, p), (c(0.0, 1.0), ps(2, "Z0")));
    }

    #[test]
    fn apply_examples() {
        let z = PauliSum::<f64>::parse_text("1.0 Z0").unwrap();
        let one = Statevector::basis(1, 1).unwrap();
        let out = z.apply(&one).unwrap();
        assert_eq!(out.amps()[1], c(-1.0, 0.0));

        let id = PauliSum::<f64>::parse_text("# qubits 1\n1.0 I").unwrap();
        let psi = Statevector::from_amps(1, vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert_eq!(id.apply(&psi).unwrap(), psi);

        let mix = PauliSum::<f64>::parse_text("0.5 X0\n0.5 Z0").unwrap();
        let out = mix.apply(&Statevector::basis(1, 0).unwrap()).unwrap();
        assert_eq!(out.amps(), &[c(0.5, 0.0), c(0.5, 0.0)]);
    }

    #[test]
    fn dense_examples_and_cap() {
        let z = PauliSum::<f64>::parse_text("1.0 Z0").unwrap().dense_matrix().unwrap();
        assert_eq!(z[(0, 0)], c(1.0, 0.0));
        assert_eq!(z[(1, 1)], c(-1.0, 0.0));
        let x = PauliSum::<f64>::parse_text("1.0 X0").unwrap().dense_matrix().unwrap();
        assert_eq!(x[(0, 1)], c(1.0, 0.0));
        assert_eq!(x[(1, 0)], c(1.0, 0.0));
        assert_eq!(x[(0, 0)], c(0.0, 0.0));

        let big = PauliSum::<f64>::from_terms(13, vec![(1.0, PauliString::identity(13))]).unwrap();
        assert!(matches!(big.dense_matrix(), Err(Error::Resource { .. })));
    }

    #[test]
    fn canonicalisation_merges_and_drops() {
        let s = PauliSum::<f64>::parse_text("0.5 Z0\n0.25 Z0\n1e-16 X0\n-0.1 I").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.terms()[0], (0.75, ps(1, "Z0")));
        assert_eq!(s.identity_coefficient(), -0.1);

        let err = PauliSum::<f64>::from_complex_terms(1, vec![(c(0.0, 1e-3), ps(1, "X0"))]);
        assert!(matches!(err, Err(Error::NotHermitian(_))));
    }

    #[test]
    fn text_format_round_trip_and_errors() {
        let text = "# comment\n\n-0.09886 I\n0.1711 Z0\n0.045 X0 X1 Y2 Y3\n";
        let s = PauliSum::<f64>::parse_text(text).unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(s.len(), 3);
        let back = PauliSum::<f64>::parse_text(&s.to_text()).unwrap();
        assert_eq!(back, s);

        assert!(matches!(PauliSum::<f64>::parse_text("1,5 Z0"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(PauliSum::<f64>::parse_text("1.0 Q0"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(PauliSum::<f64>::parse_text("1.0 Z0\n2.0"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(PauliSum::<f64>::parse_text("1.0 Z0 X0"), Err(Error::Parse { .. })));
    }

    #[test]
    fn compiled_operator_matches_plain_apply() {
        let s = PauliSum::<f64>::parse_text("0.3 X0 Y1\n-0.2 Z0 Z2\n0.1 Y0 Y1 X2\n0.7 I\n0.05 X1").unwrap();
        let psi = Statevector::from_amps(
            3,
            (0..8).map(|k| c((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos())).collect(),
        )
        .unwrap()
        .normalized();
        let a = s.apply(&psi).unwrap();
        let b = s.compile().apply(&psi).unwrap();
        for (x, y) in a.amps().iter().zip(b.amps()) {
            assert!((x - y).norm() < 1e-14);
        }
        let e = s.compile().expectation_complex(psi.amps());
        let direct = psi.inner(&a).unwrap();
        assert!((e - direct).norm() < 1e-14);
    }
}
