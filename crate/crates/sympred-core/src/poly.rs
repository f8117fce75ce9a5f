//! Sparse multivariate polynomials and polynomial vector fields with exact
//! evaluation and differentiation. These carry every "first-layer" identity
//! check: brackets and flat derivatives of test fields incur no truncation
//! error, only rounding.

use crate::linalg::{Matrix, Vector};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// Polynomial in `nvars` variables: exponent multi-index -> coefficient.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u8>, f64>,
}

fn pow(base: f64, exp: u8) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Poly {
        let mut p = Poly::zero(nvars);
        p.add_term(&alloc::vec![0; nvars], c);
        p
    }

    /// The coordinate function x_i.
    pub fn coordinate(nvars: usize, i: usize) -> Poly {
        assert!(i < nvars);
        let mut exps = alloc::vec![0u8; nvars];
        exps[i] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(&exps, 1.0);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: &[u8], coeff: f64) {
        assert_eq!(exps.len(), self.nvars);
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(exps.to_vec()).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(exps);
        }
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        assert_eq!(x.len(), self.nvars);
        let mut acc = 0.0;
        for (exps, &c) in &self.terms {
            let mut term = c;
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term *= pow(x[i], e);
                }
            }
            acc += term;
        }
        acc
    }

    /// Exact partial derivative with respect to x_i.
    pub fn partial(&self, i: usize) -> Poly {
        assert!(i < self.nvars);
        let mut out = Poly::zero(self.nvars);
        for (exps, &c) in &self.terms {
            if exps[i] == 0 {
                continue;
            }
            let mut de = exps.clone();
            de[i] -= 1;
            out.add_term(&de, c * exps[i] as f64);
        }
        out
    }

    /// Exact directional derivative sum_i (d_i f)(x) v_i.
    pub fn directional(&self, x: &Vector, v: &Vector) -> f64 {
        assert_eq!(v.len(), self.nvars);
        (0..self.nvars)
            .map(|i| self.partial(i).eval(x) * v[i])
            .sum()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (exps, &c) in &other.terms {
            out.add_term(exps, c);
        }
        out
    }

    pub fn scale(&self, c: f64) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (exps, &v) in &self.terms {
            out.add_term(exps, v * c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let exps: Vec<u8> = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(&exps, ca * cb);
            }
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&v| v as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Iterate (exponents, coefficient) pairs in deterministic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &f64)> {
        self.terms.iter()
    }
}

/// Polynomial map from R^nvars to R^nvars, one polynomial per component.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyField {
    nvars: usize,
    comps: Vec<Poly>,
}

impl PolyField {
    pub fn from_components(comps: Vec<Poly>) -> PolyField {
        assert!(!comps.is_empty());
        let nvars = comps[0].nvars();
        assert!(comps.iter().all(|p| p.nvars() == nvars));
        assert_eq!(comps.len(), nvars, "vector fields match the space dimension");
        PolyField { nvars, comps }
    }

    pub fn zero(nvars: usize) -> PolyField {
        PolyField {
            nvars,
            comps: (0..nvars).map(|_| Poly::zero(nvars)).collect(),
        }
    }

    /// The identity field x -> x.
    pub fn identity(nvars: usize) -> PolyField {
        PolyField {
            nvars,
            comps: (0..nvars).map(|i| Poly::coordinate(nvars, i)).collect(),
        }
    }

    /// The linear field x -> M x.
    pub fn linear(m: &Matrix) -> PolyField {
        let nvars = m.nrows();
        assert_eq!(m.ncols(), nvars);
        let comps = (0..nvars)
            .map(|i| {
                let mut p = Poly::zero(nvars);
                for j in 0..nvars {
                    let mut exps = alloc::vec![0u8; nvars];
                    exps[j] = 1;
                    p.add_term(&exps, m[(i, j)]);
                }
                p
            })
            .collect();
        PolyField { nvars, comps }
    }

    pub fn constant(v: &Vector) -> PolyField {
        let nvars = v.len();
        PolyField {
            nvars,
            comps: (0..nvars).map(|i| Poly::constant(nvars, v[i])).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.comps[i]
    }

    pub fn eval(&self, x: &Vector) -> Vector {
        Vector::from_fn(self.nvars, |i, _| self.comps[i].eval(x))
    }

    /// Exact directional derivative (DF)(x) y.
    pub fn flat_derivative(&self, x: &Vector, y: &Vector) -> Vector {
        assert_eq!(y.len(), self.nvars);
        Vector::from_fn(self.nvars, |i, _| {
            (0..self.nvars)
                .map(|j| self.comps[i].partial(j).eval(x) * y[j])
                .sum()
        })
    }

    /// Symbolic derivative along another field: (DF) G, component i equal
    /// to sum_j (d_j F_i) G_j.
    pub fn derivative_along(&self, g: &PolyField) -> PolyField {
        assert_eq!(self.nvars, g.nvars);
        let comps = (0..self.nvars)
            .map(|i| {
                let mut acc = Poly::zero(self.nvars);
                for j in 0..self.nvars {
                    acc = acc.add(&self.comps[i].partial(j).mul(&g.comps[j]));
                }
                acc
            })
            .collect();
        PolyField {
            nvars: self.nvars,
            comps,
        }
    }

    /// Lie bracket [F, G] = (DG) F - (DF) G, exact.
    pub fn bracket(&self, g: &PolyField) -> PolyField {
        g.derivative_along(self).add_scaled(&self.derivative_along(g), -1.0)
    }

    pub fn add(&self, other: &PolyField) -> PolyField {
        self.add_scaled(other, 1.0)
    }

    pub fn add_scaled(&self, other: &PolyField, c: f64) -> PolyField {
        assert_eq!(self.nvars, other.nvars);
        let comps = (0..self.nvars)
            .map(|i| self.comps[i].add(&other.comps[i].scale(c)))
            .collect();
        PolyField {
            nvars: self.nvars,
            comps,
        }
    }

    pub fn scale(&self, c: f64) -> PolyField {
        PolyField {
            nvars: self.nvars,
            comps: self.comps.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Compose with a linear map on the left: x -> M F(x).
    pub fn apply_matrix(&self, m: &Matrix) -> PolyField {
        assert_eq!(m.nrows(), self.nvars);
        assert_eq!(m.ncols(), self.nvars);
        let comps = (0..self.nvars)
            .map(|i| {
                let mut acc = Poly::zero(self.nvars);
                for j in 0..self.nvars {
                    acc = acc.add(&self.comps[j].scale(m[(i, j)]));
                }
                acc
            })
            .collect();
        PolyField {
            nvars: self.nvars,
            comps,
        }
    }

    /// Multiply every component by a scalar polynomial.
    pub fn scalar_mul(&self, p: &Poly) -> PolyField {
        assert_eq!(self.nvars, p.nvars());
        PolyField {
            nvars: self.nvars,
            comps: self.comps.iter().map(|c| c.mul(p)).collect(),
        }
    }

    /// The scalar polynomial omega(F, G) in the canonical pairwise form.
    pub fn omega_poly(&self, g: &PolyField) -> Poly {
        assert_eq!(self.nvars, g.nvars);
        assert_eq!(self.nvars % 2, 0);
        let mut acc = Poly::zero(self.nvars);
        for i in 0..self.nvars / 2 {
            acc = acc.add(&self.comps[2 * i].mul(&g.comps[2 * i + 1]));
            acc = acc.add(&self.comps[2 * i + 1].mul(&g.comps[2 * i]).scale(-1.0));
        }
        acc
    }
}

/// The field X_f with omega(X_f, .) = df: in canonical pair coordinates
/// (X_f)_{2i} = d_{2i+1} f and (X_f)_{2i+1} = -d_{2i} f.
pub fn hamiltonian_vector_field(f: &Poly) -> PolyField {
    let nvars = f.nvars();
    assert_eq!(nvars % 2, 0);
    let comps = (0..nvars)
        .map(|i| {
            if i % 2 == 0 {
                f.partial(i + 1)
            } else {
                f.partial(i - 1).scale(-1.0)
            }
        })
        .collect();
    PolyField::from_components(comps)
}
