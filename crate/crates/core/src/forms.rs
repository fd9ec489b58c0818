//! Constant-coefficient alternating forms on ℝ⁷.
//!
//! A general form is stored densely, one coefficient per subset of
//! `{0,…,6}` encoded as a 7-bit mask. Degree-3 and degree-4 forms also have a
//! 35-component view in lexicographic order of index triples/quadruples.

use crate::vec7::V7;

pub const DIM: usize = 7;

/// Sign of the permutation that sorts `idx` (0 if an index repeats).
pub fn perm_sign(idx: &[usize]) -> f64 {
    let mut sign = 1.0;
    for i in 0..idx.len() {
        for j in (i + 1)..idx.len() {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn mask_indices(mask: u8) -> Vec<usize> {
    (0..DIM).filter(|i| mask & (1 << i) != 0).collect()
}

/// All sorted index tuples of length `k`, lexicographic.
pub fn combinations(k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..DIM {
            cur.push(i);
            rec(i + 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, &mut Vec::new(), &mut out);
    out
}

fn det(m: &mut [Vec<f64>]) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for r in (c + 1)..n {
            let f = m[r][c] / m[c][c];
            let (top, bottom) = m.split_at_mut(r);
            for (x, y) in bottom[0][c..n].iter_mut().zip(&top[c][c..n]) {
                *x -= f * y;
            }
        }
    }
    d
}

/// Alternating form of a fixed degree with constant coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    pub degree: usize,
    pub coeffs: [f64; 128],
}

impl Form {
    pub fn zero(degree: usize) -> Self {
        Form { degree, coeffs: [0.0; 128] }
    }

    /// `sign · e^{i₁} ∧ … ∧ e^{i_k}` for arbitrary (possibly unsorted) indices.
    pub fn basis(idx: &[usize], coeff: f64) -> Self {
        let mut f = Form::zero(idx.len());
        f.add_term(idx, coeff);
        f
    }

    pub fn add_term(&mut self, idx: &[usize], coeff: f64) {
        assert_eq!(idx.len(), self.degree);
        let s = perm_sign(idx);
        if s == 0.0 {
            return;
        }
        let mask = idx.iter().fold(0u8, |m, &i| m | (1 << i));
        self.coeffs[mask as usize] += s * coeff;
    }

    pub fn coeff(&self, sorted_idx: &[usize]) -> f64 {
        let mask = sorted_idx.iter().fold(0u8, |m, &i| m | (1 << i));
        self.coeffs[mask as usize]
    }

    fn terms(&self) -> impl Iterator<Item = (u8, f64)> + '_ {
        (0u8..128)
            .filter(move |m| m.count_ones() as usize == self.degree)
            .map(move |m| (m, self.coeffs[m as usize]))
            .filter(|(_, c)| *c != 0.0)
    }

    /// Evaluate on `degree` vectors.
    pub fn eval(&self, vs: &[V7<f64>]) -> f64 {
        assert_eq!(vs.len(), self.degree);
        let mut total = 0.0;
        for (mask, c) in self.terms() {
            let idx = mask_indices(mask);
            let mut m: Vec<Vec<f64>> = idx
                .iter()
                .map(|&i| vs.iter().map(|v| v[i]).collect())
                .collect();
            total += c * det(&mut m);
        }
        total
    }

    pub fn wedge(&self, other: &Form) -> Form {
        let mut out = Form::zero(self.degree + other.degree);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if a & b != 0 {
                    continue;
                }
                let mut idx = mask_indices(a);
                idx.extend(mask_indices(b));
                out.add_term(&idx, ca * cb);
            }
        }
        out
    }

    /// `v ⌟ self`
    pub fn interior(&self, v: &V7<f64>) -> Form {
        assert!(self.degree >= 1);
        let mut out = Form::zero(self.degree - 1);
        for (mask, c) in self.terms() {
            let idx = mask_indices(mask);
            for (m, &i) in idx.iter().enumerate() {
                if v[i] == 0.0 {
                    continue;
                }
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let rest: Vec<usize> = idx.iter().copied().filter(|&j| j != i).collect();
                out.add_term(&rest, sign * v[i] * c);
            }
        }
        out
    }

    /// Euclidean Hodge star for the orientation `e¹ ∧ … ∧ e⁷` (`orientation = +1`)
    /// or its reverse (`-1`).
    pub fn hodge(&self, orientation: f64) -> Form {
        let mut out = Form::zero(DIM - self.degree);
        for (mask, c) in self.terms() {
            let idx = mask_indices(mask);
            let comp: Vec<usize> = (0..DIM).filter(|i| mask & (1 << i) == 0).collect();
            let mut all = idx.clone();
            all.extend(&comp);
            let s = perm_sign(&all);
            out.add_term(&comp, orientation * s * c);
        }
        out
    }

    /// Coefficient of the top-degree form against `e¹ ∧ … ∧ e⁷`.
    pub fn top_coeff(&self) -> f64 {
        assert_eq!(self.degree, DIM);
        self.coeffs[127]
    }
}

macro_rules! dense_form {
    ($name:ident, $deg:expr) => {
        /// Dense 35-component view of an alternating form on ℝ⁷.
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name {
            pub coeffs: [f64; 35],
        }

        impl $name {
            pub const DEGREE: usize = $deg;

            pub fn from_form(f: &Form) -> Self {
                assert_eq!(f.degree, $deg);
                let mut coeffs = [0.0; 35];
                for (k, idx) in combinations($deg).iter().enumerate() {
                    coeffs[k] = f.coeff(idx);
                }
                $name { coeffs }
            }

            pub fn to_form(&self) -> Form {
                let mut f = Form::zero($deg);
                for (k, idx) in combinations($deg).iter().enumerate() {
                    f.add_term(idx, self.coeffs[k]);
                }
                f
            }

            pub fn eval(&self, vs: &[V7<f64>]) -> f64 {
                self.to_form().eval(vs)
            }
        }
    };
}

dense_form!(AltForm3, 3);
dense_form!(AltForm4, 4);

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> V7<f64> {
        let mut v = [0.0; 7];
        v[i] = 1.0;
        v
    }

    #[test]
    fn there_are_35_triples_and_quadruples() {
        assert_eq!(combinations(3).len(), 35);
        assert_eq!(combinations(4).len(), 35);
    }

    #[test]
    fn basis_form_evaluates_to_permutation_sign() {
        let f = Form::basis(&[0, 1, 2], 1.0);
        assert_eq!(f.eval(&[e(0), e(1), e(2)]), 1.0);
        assert_eq!(f.eval(&[e(1), e(0), e(2)]), -1.0);
        assert_eq!(f.eval(&[e(0), e(0), e(2)]), 0.0);
    }

    #[test]
    fn wedge_of_one_forms_is_determinant() {
        let a = Form::basis(&[0], 1.0);
        let b = Form::basis(&[3], 1.0);
        let w = a.wedge(&b);
        assert_eq!(w.eval(&[e(0), e(3)]), 1.0);
        assert_eq!(w.eval(&[e(3), e(0)]), -1.0);
    }

    #[test]
    fn hodge_star_of_volume_pieces() {
        let f = Form::basis(&[0, 1, 2], 1.0);
        let s = f.hodge(1.0);
        assert_eq!(s.coeff(&[3, 4, 5, 6]), 1.0);
        assert_eq!(f.wedge(&s).top_coeff(), 1.0);
    }

    #[test]
    fn interior_product_matches_evaluation() {
        let f = Form::basis(&[1, 2, 5], 2.0);
        let v = [0.3, 0.7, -0.2, 0.0, 1.0, 0.5, 0.1];
        let w = [0.0, 0.4, 1.0, -0.6, 0.0, 0.2, 0.9];
        let x = [1.0, -0.1, 0.3, 0.2, 0.5, 0.8, -0.7];
        let lhs = f.interior(&v).eval(&[w, x]);
        let rhs = f.eval(&[v, w, x]);
        assert!((lhs - rhs).abs() < 1e-14);
    }
}
