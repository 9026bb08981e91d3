//! YAML state, witness and particle files.
//!
//! ```yaml
//! dims: [2, 2]
//! matrix:
//!   - [[0.25, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
//!   ...
//! ```
//!
//! Complex entries are `[re, im]` pairs and the matrix is row-major with
//! Alice-major indices. Witness files add `sep_floor` and an optional
//! `pseudo_mixture` list of `{c, a, b}` terms. Particle files carry
//! `n_modes` and either the upper triangle `w` (fermions, `i < j`), the upper
//! triangle `v` (bosons, `i ≤ j`), or a full `matrix` for fermions.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{BosonState, FermionState};
use crate::linalg::CMatrix;
use crate::scalar::Real;
use crate::state::DensityMatrix;
use crate::witness::{PseudoMixture, PseudoTerm, Witness};

type Pair = [f64; 2];

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    dims: [usize; 2],
    matrix: Vec<Vec<Pair>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessFile {
    dims: [usize; 2],
    matrix: Vec<Vec<Pair>>,
    sep_floor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pseudo_mixture: Option<Vec<TermFile>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    c: f64,
    a: Vec<Pair>,
    b: Vec<Pair>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParticleFile {
    n_modes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w: Option<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<Pair>>>,
}

fn parse_error(e: serde_yaml::Error) -> Error {
    let (line, column) = e.location().map_or((0, 0), |l| (l.line(), l.column()));
    Error::Parse { line, column, message: e.to_string() }
}

fn to_c<T: Real>(p: &Pair) -> Complex<T> {
    Complex::new(T::lit(p[0]), T::lit(p[1]))
}

fn from_c<T: Real>(z: &Complex<T>) -> Pair {
    [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
}

fn matrix_from_rows<T: Real>(rows: &[Vec<Pair>], dim: usize) -> Result<CMatrix<T>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Shape(format!("expected a {dim}x{dim} matrix")));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| to_c(&rows[i][j])))
}

fn rows_from_matrix<T: Real>(m: &CMatrix<T>) -> Vec<Vec<Pair>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(from_c).collect()).collect()
}

fn to_yaml<S: Serialize>(value: &S) -> String {
    serde_yaml::to_string(value).expect("plain data serialises")
}

/// Parses and validates a state file.
pub fn parse_state<T: Real>(text: &str) -> Result<DensityMatrix<T>> {
    let f: StateFile = serde_yaml::from_str(text).map_err(parse_error)?;
    let [m, n] = f.dims;
    DensityMatrix::new(m, n, matrix_from_rows(&f.matrix, m * n)?)
}

pub fn state_to_string<T: Real>(rho: &DensityMatrix<T>) -> String {
    let (m, n) = rho.dims();
    to_yaml(&StateFile { dims: [m, n], matrix: rows_from_matrix(rho.matrix()) })
}

/// A witness file; `pseudo_mixture` is returned when present.
pub fn parse_witness<T: Real>(text: &str) -> Result<(Witness<T>, Option<PseudoMixture<T>>)> {
    let f: WitnessFile = serde_yaml::from_str(text).map_err(parse_error)?;
    let [m, n] = f.dims;
    let operator: CMatrix<T> = matrix_from_rows(&f.matrix, m * n)?;
    let defect = operator.hermiticity_defect();
    if defect > T::lit(1e-10) {
        return Err(Error::NonHermitian { defect: defect.to_f64_lossy(), tol: 1e-10 });
    }
    let pm = f.pseudo_mixture.map(|terms| PseudoMixture {
        terms: terms
            .iter()
            .map(|t| PseudoTerm { c: T::lit(t.c), a: t.a.iter().map(to_c).collect(), b: t.b.iter().map(to_c).collect() })
            .collect(),
    });
    let w = Witness {
        operator,
        m,
        n,
        sep_floor: T::lit(f.sep_floor),
        search_restarts: 0,
        detected_value: None,
    };
    Ok((w, pm))
}

pub fn witness_to_string<T: Real>(w: &Witness<T>, pm: Option<&PseudoMixture<T>>) -> String {
    to_yaml(&WitnessFile {
        dims: [w.m, w.n],
        matrix: rows_from_matrix(&w.operator),
        sep_floor: w.sep_floor.to_f64_lossy(),
        pseudo_mixture: pm.map(|p| {
            p.terms
                .iter()
                .map(|t| TermFile {
                    c: t.c.to_f64_lossy(),
                    a: t.a.iter().map(from_c).collect(),
                    b: t.b.iter().map(from_c).collect(),
                })
                .collect()
        }),
    })
}

/// Contents of a particle file.
#[derive(Clone, Debug)]
pub enum Particles<T: Real = f64> {
    Fermions(FermionState<T>),
    Bosons(BosonState<T>),
}

pub fn parse_particles<T: Real>(text: &str) -> Result<Particles<T>> {
    let f: ParticleFile = serde_yaml::from_str(text).map_err(parse_error)?;
    let n = f.n_modes;
    match (f.w, f.v, f.matrix) {
        (Some(w), None, None) => {
            let expect = n * n.saturating_sub(1) / 2;
            if w.len() != expect {
                return Err(Error::Shape(format!("w needs {expect} entries for {n} modes, found {}", w.len())));
            }
            let mut m = CMatrix::zeros(n, n);
            let mut it = w.iter();
            for i in 0..n {
                for j in (i + 1)..n {
                    let z = to_c(it.next().expect("length checked"));
                    m[(i, j)] = z;
                    m[(j, i)] = -z;
                }
            }
            Ok(Particles::Fermions(FermionState::new(m)?))
        }
        (None, Some(v), None) => {
            let expect = n * (n + 1) / 2;
            if v.len() != expect {
                return Err(Error::Shape(format!("v needs {expect} entries for {n} modes, found {}", v.len())));
            }
            let mut m = CMatrix::zeros(n, n);
            let mut it = v.iter();
            for i in 0..n {
                for j in i..n {
                    let z = to_c(it.next().expect("length checked"));
                    m[(i, j)] = z;
                    m[(j, i)] = z;
                }
            }
            Ok(Particles::Bosons(BosonState::new(m)?))
        }
        (None, None, Some(rows)) => Ok(Particles::Fermions(FermionState::new(matrix_from_rows(&rows, n)?)?)),
        _ => Err(Error::Parse { line: 1, column: 1, message: "exactly one of `w`, `v` or `matrix` is required".into() }),
    }
}

pub fn fermion_to_string<T: Real>(s: &FermionState<T>) -> String {
    let n = s.n_modes();
    let mut w = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            w.push(from_c(&s.w()[(i, j)]));
        }
    }
    to_yaml(&ParticleFile { n_modes: n, w: Some(w), v: None, matrix: None })
}

pub fn boson_to_string<T: Real>(s: &BosonState<T>) -> String {
    let n = s.n_modes();
    let mut v = Vec::new();
    for i in 0..n {
        for j in i..n {
            v.push(from_c(&s.v()[(i, j)]));
        }
    }
    to_yaml(&ParticleFile { n_modes: n, w: None, v: Some(v), matrix: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::state::random_state;

    #[test]
    fn state_round_trip() {
        let mut r = rng::seeded(1);
        let rho = random_state::<f64, _>(&mut r, 2, 3, 4);
        let back: DensityMatrix<f64> = parse_state(&state_to_string(&rho)).unwrap();
        assert!((back.matrix() - rho.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn parse_error_has_location() {
        let text = "dims: [2, 2]\nmatrix: [[[1, 0]]\n";
        match parse_state::<f64>(text) {
            Err(Error::Parse { line, .. }) => assert!(line >= 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_hermitian_is_an_invariant_violation() {
        let text = "dims: [2, 2]\nmatrix:\n- [[0.25,0],[0.1,0],[0,0],[0,0]]\n- [[0,0],[0.25,0],[0,0],[0,0]]\n- [[0,0],[0,0],[0.25,0],[0,0]]\n- [[0,0],[0,0],[0,0],[0.25,0]]\n";
        assert!(matches!(parse_state::<f64>(text), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn particle_round_trips() {
        let mut r = rng::seeded(2);
        let f = FermionState::<f64>::random(&mut r, 4);
        match parse_particles::<f64>(&fermion_to_string(&f)).unwrap() {
            Particles::Fermions(g) => assert!((g.w() - f.w()).max_abs() < 1e-12),
            _ => panic!("expected fermions"),
        }
        let b = BosonState::<f64>::random(&mut r, 3);
        match parse_particles::<f64>(&boson_to_string(&b)).unwrap() {
            Particles::Bosons(g) => assert!((g.v() - b.v()).max_abs() < 1e-12),
            _ => panic!("expected bosons"),
        }
    }

    #[test]
    fn symmetric_full_matrix_is_rejected_for_fermions() {
        let text = "n_modes: 2\nmatrix:\n- [[0,0],[0.5,0]]\n- [[0.5,0],[0,0]]\n";
        assert!(matches!(parse_particles::<f64>(text), Err(Error::NotAntisymmetric { .. })));
    }
}
