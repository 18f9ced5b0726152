//! Second-quantised Hamiltonians and the Jordan–Wigner mapping to Pauli sums.

use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::pauli::{PauliOp, PauliString, PauliSum};
use crate::scalar::{c, cone, Real, C};

const HERMITICITY_TOL: f64 = 1e-10;

/// Molecular integrals in the spin-orbital basis (Hartree).
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralTable<T> {
    pub norb: usize,
    pub core: T,
    /// `h_ij` in file order.
    pub one_body: Vec<((usize, usize), T)>,
    /// `g_ijkl` multiplying `a†_i a†_j a_k a_l`, in file order.
    pub two_body: Vec<((usize, usize, usize, usize), T)>,
}

impl<T: Real> IntegralTable<T> {
    pub fn new(norb: usize, core: T) -> Self {
        Self { norb, core, one_body: Vec::new(), two_body: Vec::new() }
    }

    pub fn one_body_value(&self, i: usize, j: usize) -> T {
        self.one_body.iter().filter(|(k, _)| *k == (i, j)).map(|(_, v)| *v).sum()
    }

    /// Real-symmetric check on the one-body block.
    pub fn check_hermitian(&self) -> Result<()> {
        let tol = T::lit(HERMITICITY_TOL);
        for &((i, j), v) in &self.one_body {
            let mirror = self.one_body_value(j, i);
            if (v - mirror).abs() > tol {
                return Err(Error::NotHermitian(format!("h[{i}][{j}] = {v} but h[{j}][{i}] = {mirror}")));
            }
        }
        Ok(())
    }

    /// Reads the integral text format (`norb`, `core`, `h i j v`, `g i j k l v`, `#` comments).
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut norb: Option<usize> = None;
        let mut core: Option<T> = None;
        let mut one_body = Vec::new();
        let mut two_body = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let index = |s: &str, norb: Option<usize>| -> Result<usize> {
                let n = norb.ok_or_else(|| err("`norb` must precede integral records".into()))?;
                let v: usize = s.parse().map_err(|_| err(format!("bad index `{s}`")))?;
                if v >= n {
                    return Err(err(format!("index {v} outside {n} orbitals")));
                }
                Ok(v)
            };
            let value = |s: &str| -> Result<T> {
                s.parse::<f64>().map(T::lit).map_err(|_| err(format!("bad value `{s}`")))
            };
            match (fields[0], fields.len()) {
                ("norb", 2) => {
                    if norb.is_some() {
                        return Err(err("duplicate `norb`".into()));
                    }
                    norb = Some(fields[1].parse().map_err(|_| err(format!("bad norb `{}`", fields[1])))?);
                }
                ("core", 2) => {
                    if core.is_some() {
                        return Err(err("duplicate `core`".into()));
                    }
                    core = Some(value(fields[1])?);
                }
                ("h", 4) => {
                    let key = (index(fields[1], norb)?, index(fields[2], norb)?);
                    if one_body.iter().any(|(k, _)| *k == key) {
                        return Err(err(format!("duplicate h {} {}", key.0, key.1)));
                    }
                    one_body.push((key, value(fields[3])?));
                }
                ("g", 6) => {
                    let key = (
                        index(fields[1], norb)?,
                        index(fields[2], norb)?,
                        index(fields[3], norb)?,
                        index(fields[4], norb)?,
                    );
                    two_body.push((key, value(fields[5])?));
                }
                (tag, n) => return Err(err(format!("unrecognised record `{tag}` with {n} fields"))),
            }
        }
        let norb = norb.ok_or_else(|| Error::Parse { line: 0, msg: "missing `norb`".into() })?;
        let table = Self { norb, core: core.unwrap_or_else(T::zero), one_body, two_body };
        table.check_hermitian()?;
        Ok(table)
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        Self::read(text.as_bytes())
    }
}

/// One ladder operator `a_mode` or `a†_mode`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub mode: usize,
    pub raise: bool,
}

impl Ladder {
    pub fn raise(mode: usize) -> Self {
        Self { mode, raise: true }
    }

    pub fn lower(mode: usize) -> Self {
        Self { mode, raise: false }
    }
}

/// Linear combination of products of ladder operators (leftmost acts last).
#[derive(Clone, Debug, PartialEq)]
pub struct FermionOperator<T> {
    pub norb: usize,
    pub terms: Vec<(C<T>, Vec<Ladder>)>,
}

impl<T: Real> FermionOperator<T> {
    pub fn new(norb: usize) -> Self {
        Self { norb, terms: Vec::new() }
    }

    pub fn push(&mut self, coeff: C<T>, ladders: Vec<Ladder>) -> Result<()> {
        if let Some(l) = ladders.iter().find(|l| l.mode >= self.norb) {
            return Err(Error::Range(format!("mode {} outside {} orbitals", l.mode, self.norb)));
        }
        self.terms.push((coeff, ladders));
        Ok(())
    }

    /// `Σ_j a†_j a_j`.
    pub fn number_operator(norb: usize) -> Self {
        let mut op = Self::new(norb);
        for j in 0..norb {
            op.terms.push((cone(), vec![Ladder::raise(j), Ladder::lower(j)]));
        }
        op
    }

    /// True when every term has as many raising as lowering operators.
    pub fn conserves_number(&self) -> bool {
        self.terms.iter().all(|(_, l)| {
            let raises = l.iter().filter(|x| x.raise).count();
            2 * raises == l.len()
        })
    }
}

/// `core + Σ h_ij a†_i a_j + Σ g_ijkl a†_i a†_j a_k a_l`, one term per entry.
pub fn build_hamiltonian<T: Real>(table: &IntegralTable<T>) -> FermionOperator<T> {
    let mut op = FermionOperator::new(table.norb);
    if table.core != T::zero() {
        op.terms.push((c(table.core, T::zero()), Vec::new()));
    }
    for &((i, j), v) in &table.one_body {
        if v != T::zero() {
            op.terms.push((c(v, T::zero()), vec![Ladder::raise(i), Ladder::lower(j)]));
        }
    }
    for &((i, j, k, l), v) in &table.two_body {
        if v != T::zero() {
            op.terms.push((
                c(v, T::zero()),
                vec![Ladder::raise(i), Ladder::raise(j), Ladder::lower(k), Ladder::lower(l)],
            ));
        }
    }
    op
}

/// The two Pauli strings of `a_j = Z_{<j} (X_j + iY_j)/2` (or its adjoint).
fn ladder_paulis<T: Real>(norb: usize, l: Ladder) -> Result<[(C<T>, PauliString); 2]> {
    let mut ops = vec![PauliOp::I; norb];
    for op in ops.iter_mut().take(l.mode) {
        *op = PauliOp::Z;
    }
    ops[l.mode] = PauliOp::X;
    let x = PauliString::new(ops.clone())?;
    ops[l.mode] = PauliOp::Y;
    let y = PauliString::new(ops)?;
    let half = T::lit(0.5);
    let yc = if l.raise { -half } else { half };
    Ok([(c(half, T::zero()), x), (c(T::zero(), yc), y)])
}

/// Jordan–Wigner transform with Z-strings on modes below the acted mode.
pub fn jordan_wigner<T: Real>(f: &FermionOperator<T>) -> Result<PauliSum<T>> {
    let n = f.norb;
    let mut all: Vec<(C<T>, PauliString)> = Vec::new();
    for (coeff, ladders) in &f.terms {
        let mut acc: Vec<(C<T>, PauliString)> = vec![(*coeff, PauliString::identity(n))];
        for &l in ladders {
            let factors = ladder_paulis::<T>(n, l)?;
            let mut merged: HashMap<PauliString, C<T>> = HashMap::new();
            let mut order: Vec<PauliString> = Vec::new();
            for (w, p) in &acc {
                for (fw, fp) in &factors {
                    let (phase, prod) = p.multiply::<T>(fp)?;
                    let w = *w * *fw * phase;
                    match merged.get_mut(&prod) {
                        Some(v) => *v += w,
                        None => {
                            order.push(prod.clone());
                            merged.insert(prod, w);
                        }
                    }
                }
            }
            acc = order.into_iter().map(|p| (merged[&p], p)).collect();
        }
        all.extend(acc);
    }
    PauliSum::from_complex_terms(n, all).map_err(|e| match e {
        Error::NotHermitian(msg) => Error::NotHermitian(format!("Jordan–Wigner result: {msg}")),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let t = IntegralTable::<f64>::parse_text("norb 2\ncore 0.0\nh 0 0 -1.25\n").unwrap();
        assert_eq!(t.norb, 2);
        assert_eq!(t.one_body, vec![((0, 0), -1.25)]);

        let err = IntegralTable::<f64>::parse_text("norb 2\ncore 0.0\nh 0 1 0.5\n");
        assert!(matches!(err, Err(Error::NotHermitian(_))));

        let err = IntegralTable::<f64>::parse_text("norb 2\nh 0 2 0.5\n");
        assert!(matches!(err, Err(Error::Parse { line: 2, .. })));
        let err = IntegralTable::<f64>::parse_text("h 0 0 0.5\n");
        assert!(matches!(err, Err(Error::Parse { line: 1, .. })));
        let err = IntegralTable::<f64>::parse_text("norb 2\ng 0 0 1 x\n");
        assert!(matches!(err, Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn hamiltonian_examples() {
        let t = IntegralTable::<f64>::new(1, 0.7);
        let h = build_hamiltonian(&t);
        assert_eq!(h.terms, vec![(c(0.7, 0.0), vec![])]);

        let mut t = IntegralTable::<f64>::new(1, 0.0);
        t.one_body.push(((0, 0), -1.0));
        let h = build_hamiltonian(&t);
        assert_eq!(h.terms, vec![(c(-1.0, 0.0), vec![Ladder::raise(0), Ladder::lower(0)])]);
    }

    #[test]
    fn number_operators_map_to_half_identity_minus_half_z() {
        for mode in 0..2 {
            let mut f = FermionOperator::<f64>::new(2);
            f.push(cone(), vec![Ladder::raise(mode), Ladder::lower(mode)]).unwrap();
            let p = jordan_wigner(&f).unwrap();
            let expect = PauliSum::from_terms(
                2,
                vec![
                    (0.5, PauliString::identity(2)),
                    (-0.5, PauliString::from_sparse(2, &[(mode, PauliOp::Z)]).unwrap()),
                ],
            )
            .unwrap();
            assert_eq!(p, expect);
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut f = FermionOperator::<f64>::new(2);
        f.push(cone(), vec![Ladder::raise(1), Ladder::lower(0)]).unwrap();
        assert!(matches!(jordan_wigner(&f), Err(Error::NotHermitian(_))));
    }
}
