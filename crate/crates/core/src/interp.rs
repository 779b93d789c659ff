//! The standard interpretation of a diagram as a dense matrix.
//!
//! Basis states are big-endian over the ordered wire lists: the first output
//! wire is the most significant bit of the row index, the first input wire the
//! most significant bit of the column index.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::Mul;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::diagram::{cpm_construct, Diagram, EdgeId, End, Generator, GeneratorKind};
use crate::error::{Error, Result};

/// Default entrywise tolerance for comparing matrices.
pub const TOLERANCE: f64 = 1e-9;

/// Widest intermediate tensor the contraction will build, in wires.
pub const MAX_WIDTH: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix(DMatrix<Complex64>);

/// A column vector of `2^n` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket(pub DVector<Complex64>);

fn log2_exact(n: usize) -> Option<usize> {
    n.is_power_of_two().then(|| n.trailing_zeros() as usize)
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(wires: usize) -> Matrix {
        Matrix(DMatrix::identity(1 << wires, 1 << wires))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Matrix {
        Matrix(DMatrix::from_fn(rows, cols, f))
    }

    /// Row-major entries.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[Complex64]) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if log2_exact(rows).is_none() || log2_exact(cols).is_none() {
            return Err(Error::Malformed(format!(
                "matrix shape {rows}x{cols} is not a power of two"
            )));
        }
        Ok(Matrix(DMatrix::from_row_slice(rows, cols, data)))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn num_outputs(&self) -> usize {
        log2_exact(self.rows()).unwrap_or(0)
    }

    pub fn num_inputs(&self) -> usize {
        log2_exact(self.cols()).unwrap_or(0)
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.0[(row, col)] = value;
    }

    pub fn as_inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Row-major entries.
    pub fn to_row_vec(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        Matrix(self.0.kronecker(&other.0))
    }

    pub fn conj(&self) -> Matrix {
        Matrix(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: Complex64) -> Matrix {
        Matrix(self.0.map(|z| z * s))
    }

    /// Largest entrywise modulus of the difference; infinite when the shapes
    /// differ.
    pub fn max_deviation(&self, other: &Matrix) -> f64 {
        if self.0.shape() != other.0.shape() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.max_deviation(other) <= tol
    }

    /// Number of entries with modulus above `tol`.
    pub fn nonzeros(&self, tol: f64) -> usize {
        self.0.iter().filter(|z| z.norm() > tol).count()
    }

    /// Reorders the wires. Output wire `i` of the result is output wire
    /// `out_perm[i]` of `self`, and likewise for inputs.
    pub fn permute_wires(&self, out_perm: &[usize], in_perm: &[usize]) -> Matrix {
        let (m, n) = (self.num_outputs(), self.num_inputs());
        assert_eq!(out_perm.len(), m);
        assert_eq!(in_perm.len(), n);
        let remap = |idx: usize, perm: &[usize], w: usize| -> usize {
            let mut src = 0;
            for (i, &p) in perm.iter().enumerate() {
                let bit = (idx >> (w - 1 - i)) & 1;
                src |= bit << (w - 1 - p);
            }
            src
        };
        Matrix::from_fn(self.rows(), self.cols(), |r, c| {
            self.0[(remap(r, out_perm, m), remap(c, in_perm, n))]
        })
    }

    /// `M ⊗ conj(M)` on interleaved wires: each wire of `M` is followed by its
    /// conjugate twin.
    pub fn doubled(&self) -> Matrix {
        let (m, n) = (self.num_outputs(), self.num_inputs());
        let split = |idx: usize, w: usize| -> (usize, usize) {
            let (mut a, mut b) = (0, 0);
            for i in 0..w {
                a = (a << 1) | ((idx >> (2 * (w - 1 - i) + 1)) & 1);
                b = (b << 1) | ((idx >> (2 * (w - 1 - i))) & 1);
            }
            (a, b)
        };
        Matrix::from_fn(1 << (2 * m), 1 << (2 * n), |r, c| {
            let (y, yb) = split(r, m);
            let (x, xb) = split(c, n);
            self.0[(y, x)] * self.0[(yb, xb)].conj()
        })
    }

    pub fn apply(&self, state: &Ket) -> Result<Ket> {
        apply(self, state)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        Matrix(&self.0 * &rhs.0)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|c| {
                    let z = self.0[(r, c)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Ket {
    /// The computational basis state `|bits⟩`, first bit most significant.
    pub fn basis(bits: &[u8]) -> Ket {
        let idx = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        let mut v = DVector::zeros(1 << bits.len());
        v[idx] = Complex64::new(1.0, 0.0);
        Ket(v)
    }

    pub fn from_vec(amplitudes: Vec<Complex64>) -> Result<Ket> {
        if log2_exact(amplitudes.len()).is_none() {
            return Err(Error::Malformed(format!(
                "{} amplitudes is not a power of two",
                amplitudes.len()
            )));
        }
        Ok(Ket(DVector::from_vec(amplitudes)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn wires(&self) -> usize {
        log2_exact(self.0.len()).unwrap_or(0)
    }

    pub fn max_deviation(&self, other: &Ket) -> f64 {
        if self.0.len() != other.0.len() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn apply(m: &Matrix, state: &Ket) -> Result<Ket> {
    if m.cols() != state.len() {
        return Err(Error::DimensionMismatch {
            expected: m.cols(),
            got: state.len(),
        });
    }
    Ok(Ket(&m.0 * &state.0))
}

/// Dense tensor over a list of open edges, first edge most significant.
struct Tensor {
    edges: Vec<EdgeId>,
    data: Vec<Complex64>,
}

fn generator_value(kind: &GeneratorKind, bits: &[u8]) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    Ok(match kind {
        GeneratorKind::Z(a) => {
            let mut v = Complex64::new(0.0, 0.0);
            if bits.iter().all(|&b| b == 0) {
                v += one;
            }
            if bits.iter().all(|&b| b == 1) {
                v += Complex64::from_polar(1.0, a.to_radians());
            }
            v
        }
        GeneratorKind::H => {
            let sign = if bits[0] & bits[1] == 1 { -1.0 } else { 1.0 };
            Complex64::new(sign * FRAC_1_SQRT_2, 0.0)
        }
        GeneratorKind::Cup | GeneratorKind::Cap => {
            if bits[0] == bits[1] {
                one
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
        GeneratorKind::Ground => return Err(Error::GroundPresent),
    })
}

/// `⟦d⟧` for a ground-free diagram, by absorbing generators one at a time
/// into a tensor over the currently open edges. Self-loops and cycles need no
/// special treatment: an edge is summed out once both of its ends are in.
pub fn interp(d: &Diagram) -> Result<Matrix> {
    if d.has_ground() {
        return Err(Error::GroundPresent);
    }
    let gens = d.generators();
    let ne = d.edges().len();
    // Generator ends still to absorb, per edge.
    let mut pending: Vec<u8> = d
        .edges()
        .iter()
        .map(|e| {
            [e.top, e.bottom]
                .iter()
                .filter(|x| x.gen().is_some())
                .count() as u8
        })
        .collect();
    let boundary: Vec<bool> = d
        .edges()
        .iter()
        .map(|e| matches!(e.top, End::Slot(_)) || matches!(e.bottom, End::Slot(_)))
        .collect();
    // Bare wires are open from the start and never touched.
    let bare: Vec<EdgeId> = d.edge_ids().filter(|e| pending[e.0] == 0).collect();
    let mut t = Tensor {
        data: vec![Complex64::new(1.0, 0.0); 1 << bare.len()],
        edges: bare,
    };
    let mut done = vec![false; gens.len()];
    let mut pos = vec![usize::MAX; ne];
    for (i, e) in t.edges.iter().enumerate() {
        pos[e.0] = i;
    }
    for _ in 0..gens.len() {
        // Greedy slice order: absorb the generator giving the narrowest result.
        let mut best: Option<(usize, usize, usize)> = None; // (result width, peak width, g)
        for (g, gen) in gens.iter().enumerate() {
            if done[g] {
                continue;
            }
            let (width, peak) = absorb_widths(&t, gen, &pos, &pending, &boundary);
            if best.is_none_or(|b| (width, peak) < (b.0, b.1)) {
                best = Some((width, peak, g));
            }
        }
        let (_, peak, g) = best.unwrap();
        if peak > MAX_WIDTH {
            return Err(Error::TooWide { wires: peak });
        }
        t = absorb(t, &gens[g], &mut pending, &boundary)?;
        pos.iter_mut().for_each(|p| *p = usize::MAX);
        for (i, e) in t.edges.iter().enumerate() {
            pos[e.0] = i;
        }
        done[g] = true;
    }
    let (m, n) = (d.num_outputs(), d.num_inputs());
    if m + n > MAX_WIDTH {
        return Err(Error::TooWide { wires: m + n });
    }
    let w = t.edges.len();
    let mut out = Matrix::zeros(1 << m, 1 << n);
    for r in 0..1usize << m {
        'col: for c in 0..1usize << n {
            let mut bits: Vec<Option<u8>> = vec![None; w];
            let assign = |slot_edge: EdgeId, bit: u8, bits: &mut Vec<Option<u8>>| -> bool {
                let p = pos[slot_edge.0];
                match bits[p] {
                    Some(b) if b != bit => false,
                    _ => {
                        bits[p] = Some(bit);
                        true
                    }
                }
            };
            for (j, &e) in d.outputs().iter().enumerate() {
                if !assign(e, ((r >> (m - 1 - j)) & 1) as u8, &mut bits) {
                    continue 'col;
                }
            }
            for (i, &e) in d.inputs().iter().enumerate() {
                if !assign(e, ((c >> (n - 1 - i)) & 1) as u8, &mut bits) {
                    continue 'col;
                }
            }
            let idx = bits.iter().fold(0usize, |acc, b| {
                (acc << 1) | b.expect("every open edge is a boundary edge") as usize
            });
            out.set(r, c, t.data[idx]);
        }
    }
    Ok(out)
}

/// Width after absorbing `gen`, and the width of the loop that does it.
fn absorb_widths(
    t: &Tensor,
    gen: &Generator,
    pos: &[usize],
    pending: &[u8],
    boundary: &[bool],
) -> (usize, usize) {
    let mut fresh = Vec::new();
    let mut closing = 0;
    let mut hits = std::collections::HashMap::new();
    for e in gen.inputs.iter().chain(&gen.outputs) {
        *hits.entry(*e).or_insert(0u8) += 1;
    }
    for (e, k) in hits {
        if pos[e.0] == usize::MAX {
            fresh.push(e);
        }
        if pending[e.0] == k && !boundary[e.0] {
            closing += 1;
        }
    }
    let peak = t.edges.len() + fresh.len();
    (peak - closing, peak)
}

fn absorb(t: Tensor, gen: &Generator, pending: &mut [u8], boundary: &[bool]) -> Result<Tensor> {
    let ports: Vec<EdgeId> = gen.inputs.iter().chain(&gen.outputs).copied().collect();
    let mut fresh: Vec<EdgeId> = Vec::new();
    for &e in &ports {
        if !t.edges.contains(&e) && !fresh.contains(&e) {
            fresh.push(e);
        }
    }
    for &e in &ports {
        pending[e.0] -= 1;
    }
    // Working index: old edges followed by fresh edges.
    let work: Vec<EdgeId> = t.edges.iter().chain(&fresh).copied().collect();
    let keep: Vec<usize> = (0..work.len())
        .filter(|&i| pending[work[i].0] > 0 || boundary[work[i].0])
        .collect();
    let ww = work.len();
    let port_pos: Vec<usize> = ports
        .iter()
        .map(|e| work.iter().position(|x| x == e).unwrap())
        .collect();
    let new_edges: Vec<EdgeId> = keep.iter().map(|&i| work[i]).collect();
    let mut data = vec![Complex64::new(0.0, 0.0); 1 << keep.len()];
    let nf = fresh.len();
    let mut bits = vec![0u8; ports.len()];
    for (old_idx, &amp) in t.data.iter().enumerate() {
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        for f in 0..1usize << nf {
            let full = (old_idx << nf) | f;
            for (k, &p) in port_pos.iter().enumerate() {
                bits[k] = ((full >> (ww - 1 - p)) & 1) as u8;
            }
            let v = generator_value(&gen.kind, &bits)?;
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let idx = keep
                .iter()
                .fold(0usize, |acc, &i| (acc << 1) | ((full >> (ww - 1 - i)) & 1));
            data[idx] += amp * v;
        }
    }
    Ok(Tensor {
        edges: new_edges,
        data,
    })
}

/// `⟦d⟧` of a ground diagram on the doubled space, via the CPM construction.
pub fn interp_cpm(d: &Diagram) -> Result<Matrix> {
    interp(&cpm_construct(d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Angle;
    use crate::diagram::{Boundary, Generator};
    use crate::fixtures;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(rows: usize, cols: usize, data: &[f64]) -> Matrix {
        let v: Vec<Complex64> = data.iter().map(|&x| c(x, 0.0)).collect();
        Matrix::from_row_slice(rows, cols, &v).unwrap()
    }

    #[test]
    fn primitives() {
        assert!(interp(&Diagram::identity_wire())
            .unwrap()
            .approx_eq(&Matrix::identity(1), 1e-15));
        let s = FRAC_1_SQRT_2;
        let h = real(2, 2, &[s, s, s, -s]);
        assert!(interp(&Diagram::h()).unwrap().approx_eq(&h, 1e-15));
        let swap = real(
            4,
            4,
            &[
                1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.,
            ],
        );
        assert!(interp(&Diagram::swap_wires())
            .unwrap()
            .approx_eq(&swap, 0.0));
        assert!(interp(&Diagram::cup())
            .unwrap()
            .approx_eq(&real(1, 4, &[1., 0., 0., 1.]), 0.0));
        assert!(interp(&Diagram::cap())
            .unwrap()
            .approx_eq(&real(4, 1, &[1., 0., 0., 1.]), 0.0));
        assert!(interp(&Diagram::empty())
            .unwrap()
            .approx_eq(&real(1, 1, &[1.]), 0.0));
        assert_eq!(interp(&Diagram::ground()), Err(Error::GroundPresent));
    }

    #[test]
    fn spiders() {
        let a = Angle::pi_ratio(1, 4);
        let e = Complex64::from_polar(1.0, a.to_radians());
        let z = interp(&Diagram::z(1, 2, a)).unwrap();
        assert_eq!(z.get(0, 0), c(1.0, 0.0));
        assert!((z.get(3, 1) - e).norm() < 1e-15);
        assert_eq!(z.nonzeros(1e-12), 2);
        let scalar = interp(&Diagram::z(0, 0, a)).unwrap();
        assert!((scalar.get(0, 0) - (c(1.0, 0.0) + e)).norm() < 1e-15);
        // red spiders are H-conjugated green ones
        assert!(interp(&Diagram::red_spider(1, 1, Angle::ZERO))
            .unwrap()
            .approx_eq(&Matrix::identity(1), 1e-12));
        let s = FRAC_1_SQRT_2;
        assert!(interp(&Diagram::red_spider(0, 1, Angle::ZERO))
            .unwrap()
            .approx_eq(&real(2, 1, &[2.0 * s, 0.0]), 1e-12));
    }

    #[test]
    fn cnot_fixture() {
        let m = interp(&fixtures::cnot()).unwrap();
        let s = FRAC_1_SQRT_2;
        let want = real(
            4,
            4,
            &[s, 0., 0., 0., 0., s, 0., 0., 0., 0., 0., s, 0., 0., s, 0.],
        );
        assert!(m.approx_eq(&want, 1e-12), "{m}");
        let out = m.apply(&Ket::basis(&[1, 0])).unwrap();
        let mut want = Ket::basis(&[1, 1]);
        want.0 *= c(s, 0.0);
        assert!(out.max_deviation(&want) < 1e-12);
    }

    #[test]
    fn compositionality() {
        let a = Diagram::z(1, 2, Angle::pi_ratio(1, 2));
        let b = Diagram::h().tensor(&Diagram::red_spider(1, 1, Angle::pi_ratio(1, 4)));
        let ab = interp(&a.then(&b).unwrap()).unwrap();
        let want = &interp(&b).unwrap() * &interp(&a).unwrap();
        assert!(ab.approx_eq(&want, 1e-12));
        let t = interp(&a.tensor(&b)).unwrap();
        assert!(t.approx_eq(&interp(&a).unwrap().kron(&interp(&b).unwrap()), 1e-12));
    }

    #[test]
    fn self_loop_collapses() {
        // Z(2,2) with output 1 fed back into input 1.
        let a = Angle::pi_ratio(1, 3);
        let g = Generator {
            kind: GeneratorKind::Z(a),
            inputs: vec![EdgeId(0), EdgeId(2)],
            outputs: vec![EdgeId(1), EdgeId(2)],
        };
        let d = Diagram::from_parts(
            vec!["a".into(), "b".into(), "l".into()],
            vec![g],
            vec![EdgeId(0)],
            vec![EdgeId(1)],
        )
        .unwrap();
        assert!(interp(&d)
            .unwrap()
            .approx_eq(&interp(&Diagram::z(1, 1, a)).unwrap(), 1e-12));
    }

    #[test]
    fn snake_and_bending() {
        let d = Diagram::z(1, 1, Angle::pi_ratio(1, 2))
            .then(&Diagram::h())
            .unwrap();
        let bent = d.bend_wire(Boundary::Input(0)).unwrap();
        let back = bent.bend_wire(Boundary::Output(1)).unwrap();
        assert!(interp(&back)
            .unwrap()
            .approx_eq(&interp(&d).unwrap(), 1e-12));
        // state entry (y, x) of the bent diagram is M[y][x]
        let m = interp(&d).unwrap();
        let s = interp(&bent).unwrap();
        for y in 0..2 {
            for x in 0..2 {
                assert!((s.get(2 * y + x, 0) - m.get(y, x)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cpm_of_ground_and_pure() {
        let g = interp_cpm(&Diagram::ground()).unwrap();
        assert!(g.approx_eq(&real(1, 4, &[1., 0., 0., 1.]), 0.0));
        let d = Diagram::z(1, 2, Angle::pi_ratio(1, 4))
            .then(&Diagram::h().tensor(&Diagram::identity_wire()))
            .unwrap();
        let m = interp(&d).unwrap();
        assert!(interp_cpm(&d).unwrap().approx_eq(&m.doubled(), 1e-12));
        let gh = Diagram::h().then(&Diagram::ground()).unwrap();
        let sup = interp_cpm(&gh).unwrap();
        assert!((sup.get(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn wire_permutation() {
        let m = interp(&Diagram::swap_wires()).unwrap();
        assert!(m
            .permute_wires(&[1, 0], &[0, 1])
            .approx_eq(&Matrix::identity(2), 0.0));
    }
}
