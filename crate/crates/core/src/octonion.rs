//! Imaginary octonions, the 7-dimensional cross product and the flat G₂ forms.
//!
//! The whole crate uses a single multiplication convention, fixed by
//!
//! ```text
//! φ₀ = e¹²³ + e¹⁴⁵ + e¹⁶⁷ + e²⁴⁶ − e²⁵⁷ − e³⁴⁷ − e³⁵⁶
//! ```
//!
//! with `x × y` defined by `⟨x × y, z⟩ = φ₀(x, y, z)` and the imaginary
//! octonion product `xy = −⟨x, y⟩ + x × y`. Indices in code are 0-based, so
//! `e₁` is `ImOct::basis(0)`.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::dual::Real;
use crate::error::{Error, Result};
use crate::forms::{AltForm3, AltForm4, Form};
use crate::vec7::{self, V7};

/// Signed terms of φ₀, 1-based as in the module docs.
pub const PHI0_TERMS: [([usize; 3], f64); 7] = [
    ([1, 2, 3], 1.0),
    ([1, 4, 5], 1.0),
    ([1, 6, 7], 1.0),
    ([2, 4, 6], 1.0),
    ([2, 5, 7], -1.0),
    ([3, 4, 7], -1.0),
    ([3, 5, 6], -1.0),
];

/// Orientation used for the Hodge dual `∗φ₀`. With `+1` the volume form is
/// `e¹ ∧ … ∧ e⁷`; this choice makes `Υ` of type (3,0) and `dω = 3 Im Υ`.
pub const HODGE_ORIENTATION: f64 = 1.0;

/// `CROSS_TABLE[i][j] = ±(k+1)` means `eᵢ × eⱼ = ±e_k` (0-based `i, j, k`);
/// the diagonal is 0.
pub const CROSS_TABLE: [[i8; 7]; 7] = build_cross_table();

const fn build_cross_table() -> [[i8; 7]; 7] {
    let mut t = [[0i8; 7]; 7];
    let mut n = 0;
    while n < 7 {
        let (idx, s) = PHI0_TERMS[n];
        let sign: i8 = if s > 0.0 { 1 } else { -1 };
        let (a, b, c) = (idx[0] - 1, idx[1] - 1, idx[2] - 1);
        // cyclic permutations are even
        t[a][b] = sign * (c as i8 + 1);
        t[b][c] = sign * (a as i8 + 1);
        t[c][a] = sign * (b as i8 + 1);
        t[b][a] = -sign * (c as i8 + 1);
        t[c][b] = -sign * (a as i8 + 1);
        t[a][c] = -sign * (b as i8 + 1);
        n += 1;
    }
    t
}

/// Cross product on any scalar type. Each output term is a 2×2 minor
/// `xᵢyⱼ − xⱼyᵢ`, so `x × x` vanishes exactly.
pub fn cross<T: Real>(x: &V7<T>, y: &V7<T>) -> V7<T> {
    let mut out = vec7::zero::<T>();
    for (i, row) in CROSS_TABLE.iter().enumerate() {
        for (j, &e) in row.iter().enumerate().skip(i + 1) {
            let k = (e.unsigned_abs() - 1) as usize;
            let minor = x[i] * y[j] - x[j] * y[i];
            if e > 0 {
                out[k] += minor;
            } else {
                out[k] -= minor;
            }
        }
    }
    out
}

pub fn phi0_generic<T: Real>(x: &V7<T>, y: &V7<T>, z: &V7<T>) -> T {
    vec7::dot(&cross(x, y), z)
}

fn psi0_terms() -> &'static [([usize; 4], f64)] {
    static TERMS: OnceLock<Vec<([usize; 4], f64)>> = OnceLock::new();
    TERMS.get_or_init(|| {
        let star = phi0_form().hodge(HODGE_ORIENTATION);
        crate::forms::combinations(4)
            .into_iter()
            .filter_map(|idx| {
                let c = star.coeff(&idx);
                (c != 0.0).then(|| ([idx[0], idx[1], idx[2], idx[3]], c))
            })
            .collect()
    })
}

const PERMS4: [([usize; 4], f64); 24] = {
    let mut out = [([0usize; 4], 0.0f64); 24];
    let mut n = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                let mut d = 0;
                while d < 4 {
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        let p = [a, b, c, d];
                        let mut inv = 0;
                        let mut i = 0;
                        while i < 4 {
                            let mut j = i + 1;
                            while j < 4 {
                                if p[i] > p[j] {
                                    inv += 1;
                                }
                                j += 1;
                            }
                            i += 1;
                        }
                        out[n] = (p, if inv % 2 == 0 { 1.0 } else { -1.0 });
                        n += 1;
                    }
                    d += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

/// `∗φ₀(w, x, y, z)` on any scalar type.
pub fn psi0_generic<T: Real>(w: &V7<T>, x: &V7<T>, y: &V7<T>, z: &V7<T>) -> T {
    let vs = [w, x, y, z];
    let mut total = T::zero();
    for (idx, c) in psi0_terms() {
        let mut det = T::zero();
        for (p, s) in PERMS4.iter() {
            let term = vs[0][idx[p[0]]] * vs[1][idx[p[1]]] * vs[2][idx[p[2]]] * vs[3][idx[p[3]]];
            if *s > 0.0 {
                det += term;
            } else {
                det -= term;
            }
        }
        total += det.scale(*c);
    }
    total
}

/// φ₀ as a dense alternating form.
pub fn phi0_form() -> Form {
    let mut f = Form::zero(3);
    for (idx, s) in PHI0_TERMS {
        f.add_term(&[idx[0] - 1, idx[1] - 1, idx[2] - 1], s);
    }
    f
}

pub fn phi0_alt() -> AltForm3 {
    AltForm3::from_form(&phi0_form())
}

pub fn star_phi0_alt() -> AltForm4 {
    AltForm4::from_form(&phi0_form().hodge(HODGE_ORIENTATION))
}

/// Render the imaginary-unit product table as a signed-index matrix:
/// entry `(i, j)` is `±ek` when `eᵢeⱼ = ±e_k` and `-1` on the diagonal.
pub fn product_table_text() -> String {
    let mut s = String::new();
    s.push_str("     ");
    for j in 1..=7 {
        s.push_str(&format!("{:>5}", format!("e{j}")));
    }
    s.push('\n');
    for (i, row) in CROSS_TABLE.iter().enumerate() {
        s.push_str(&format!("{:>5}", format!("e{}", i + 1)));
        for &e in row {
            let cell = if e == 0 {
                "-1".to_string()
            } else if e > 0 {
                format!("e{e}")
            } else {
                format!("-e{}", -e)
            };
            s.push_str(&format!("{cell:>5}"));
        }
        s.push('\n');
    }
    s
}

/// A vector of ℝ⁷ = Im 𝕆.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImOct(pub V7<f64>);

impl ImOct {
    pub const ZERO: ImOct = ImOct([0.0; 7]);

    pub fn basis(i: usize) -> Self {
        ImOct(vec7::basis(i))
    }

    pub fn dot(&self, o: &ImOct) -> f64 {
        vec7::dot(&self.0, &o.0)
    }

    pub fn norm(&self) -> f64 {
        vec7::norm(&self.0)
    }

    pub fn cross(&self, o: &ImOct) -> ImOct {
        ImOct(cross(&self.0, &o.0))
    }

    /// Octonion product of two imaginary octonions as (real part, imaginary part).
    pub fn oct_mul(&self, o: &ImOct) -> (f64, ImOct) {
        (-self.dot(o), self.cross(o))
    }
}

impl Add for ImOct {
    type Output = ImOct;
    fn add(self, o: ImOct) -> ImOct {
        ImOct(vec7::add(&self.0, &o.0))
    }
}

impl Sub for ImOct {
    type Output = ImOct;
    fn sub(self, o: ImOct) -> ImOct {
        ImOct(vec7::sub(&self.0, &o.0))
    }
}

impl Neg for ImOct {
    type Output = ImOct;
    fn neg(self) -> ImOct {
        ImOct(vec7::neg(&self.0))
    }
}

impl Mul<ImOct> for f64 {
    type Output = ImOct;
    fn mul(self, o: ImOct) -> ImOct {
        ImOct(vec7::scale(self, &o.0))
    }
}

impl From<V7<f64>> for ImOct {
    fn from(v: V7<f64>) -> Self {
        ImOct(v)
    }
}

pub fn phi0(x: &ImOct, y: &ImOct, z: &ImOct) -> f64 {
    phi0_generic(&x.0, &y.0, &z.0)
}

pub fn star_phi0(w: &ImOct, x: &ImOct, y: &ImOct, z: &ImOct) -> f64 {
    psi0_generic(&w.0, &x.0, &y.0, &z.0)
}

/// Coefficient of `B_φ(v, w) = ⅙ (v ⌟ φ) ∧ (w ⌟ φ) ∧ φ` against `e¹ ∧ … ∧ e⁷`.
pub fn g2_bilinear(phi: &AltForm3, v: &ImOct, w: &ImOct) -> f64 {
    let f = phi.to_form();
    f.interior(&v.0).wedge(&f.interior(&w.0)).wedge(&f).top_coeff() / 6.0
}

/// Whether span(b1, b2, b3) is calibrated by φ₀, i.e. `|φ₀| = 1` on an
/// orthonormal basis of it.
pub fn is_associative_plane(b1: &ImOct, b2: &ImOct, b3: &ImOct, tol: f64) -> Result<bool> {
    Ok((associativity_defect(b1, b2, b3)?).abs() < tol)
}

/// `1 − |φ₀(u₁, u₂, u₃)|` on the orthonormalized triple.
pub fn associativity_defect(b1: &ImOct, b2: &ImOct, b3: &ImOct) -> Result<f64> {
    let scale = b1.norm().max(b2.norm()).max(b3.norm()).max(1e-300);
    let q = vec7::gram_schmidt(&[b1.0, b2.0, b3.0], 1e-10 * scale)
        .ok_or_else(|| Error::DegenerateInput("vectors are linearly dependent".into()))?;
    Ok(1.0 - phi0_generic(&q[0], &q[1], &q[2]).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(i: usize) -> ImOct {
        ImOct::basis(i - 1)
    }

    fn random(rng: &mut ChaCha8Rng) -> ImOct {
        ImOct(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn table_examples() {
        assert_eq!(e(1).cross(&e(2)), e(3));
        assert_eq!(phi0(&e(1), &e(2), &e(3)), 1.0);
        assert_eq!(e(3).cross(&e(4)), -e(7));
        assert_eq!(e(1).cross(&e(5)), -e(4));
    }

    #[test]
    fn cross_is_alternating_and_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x = random(&mut rng);
            let y = random(&mut rng);
            let c = x.cross(&y);
            assert!(x.cross(&x).norm() == 0.0);
            assert!(c.dot(&x).abs() < 1e-12 && c.dot(&y).abs() < 1e-12);
            let lag = x.dot(&x) * y.dot(&y) - x.dot(&y).powi(2);
            assert!((c.dot(&c) - lag).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_and_star_phi_fully_antisymmetric_on_basis() {
        let b: Vec<ImOct> = (0..7).map(ImOct::basis).collect();
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let v = phi0(&b[i], &b[j], &b[k]);
                    assert_eq!(v, -phi0(&b[j], &b[i], &b[k]));
                    assert_eq!(v, -phi0(&b[i], &b[k], &b[j]));
                    assert_eq!(v, phi0(&b[j], &b[k], &b[i]));
                }
            }
        }
    }

    #[test]
    fn star_phi_complementary_quadruple() {
        assert_eq!(star_phi0(&e(4), &e(5), &e(6), &e(7)), 1.0);
        assert_eq!(star_phi0(&e(4), &e(4), &e(6), &e(7)), 0.0);
        let f = phi0_form();
        let vol = f.wedge(&star_phi0_alt().to_form()).top_coeff();
        assert_eq!(vol, 7.0);
    }

    #[test]
    fn generic_and_dense_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (w, x, y, z) = (random(&mut rng), random(&mut rng), random(&mut rng), random(&mut rng));
        let dense = star_phi0_alt().eval(&[w.0, x.0, y.0, z.0]);
        assert!((dense - star_phi0(&w, &x, &y, &z)).abs() < 1e-12);
        let d3 = phi0_alt().eval(&[x.0, y.0, z.0]);
        assert!((d3 - phi0(&x, &y, &z)).abs() < 1e-12);
    }

    #[test]
    fn bilinear_form_recovers_euclidean_metric() {
        let phi = phi0_alt();
        for i in 0..7 {
            for j in 0..7 {
                let b = g2_bilinear(&phi, &ImOct::basis(i), &ImOct::basis(j));
                assert_eq!(b, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn associative_planes() {
        assert!(is_associative_plane(&e(1), &e(2), &e(3), 1e-10).unwrap());
        assert!(!is_associative_plane(&e(1), &e(2), &e(4), 1e-10).unwrap());
        assert!(matches!(
            is_associative_plane(&e(1), &e(1), &e(3), 1e-10),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn octonion_product_commutator_is_twice_cross() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random(&mut rng);
        let y = random(&mut rng);
        let (rx, ix) = x.oct_mul(&y);
        let (ry, iy) = y.oct_mul(&x);
        assert!((rx - ry).abs() < 1e-15);
        let half = 0.5 * (ix - iy);
        assert!(vec7::dist_inf(&half.0, &x.cross(&y).0) < 1e-15);
    }

    #[test]
    fn table_dump_has_seven_rows() {
        let t = product_table_text();
        assert_eq!(t.lines().count(), 8);
        assert!(t.lines().nth(1).unwrap().contains("e3"));
    }
}
