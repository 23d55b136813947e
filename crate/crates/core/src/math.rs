//! Small dense complex matrices (2x2 and 4x4) and a Hermitian eigensolver.
//!
//! Everything in this crate lives in a four-dimensional Hilbert space, so the
//! matrix layer is hand-rolled over fixed-size arrays instead of pulling in a
//! general linear-algebra backend. The eigensolver is a cyclic complex Jacobi
//! iteration, which is exact to working precision for matrices this small.

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// `i^k` for integer `k` (negative allowed).
pub fn i_pow(k: i64) -> C64 {
    match k.rem_euclid(4) {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

/// `e^{i x}` on the unit circle.
pub fn expi(x: f64) -> C64 {
    C64::new(x.cos(), x.sin())
}

/// 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn zeros() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let mut out = Mat2::zeros();
        for r in 0..2 {
            for c in 0..2 {
                let mut acc = ZERO;
                for k in 0..2 {
                    acc += self.0[r][k] * rhs.0[k][c];
                }
                out.0[r][c] = acc;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Mat2 {
        let mut out = Mat2::zeros();
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[c][r].conj();
            }
        }
        out
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, z: C64) -> Mat2 {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for e in row.iter_mut() {
                *e *= z;
            }
        }
        out
    }

    /// Max entrywise deviation from the 2x2 identity.
    pub fn dist_identity(&self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let t = if r == c { ONE } else { ZERO };
                d = d.max((self.0[r][c] - t).norm());
            }
        }
        d
    }

    /// Frobenius deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let mut acc = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let t = if r == c { ONE } else { ZERO };
                acc += (p.0[r][c] - t).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

/// 4x4 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[C64; 4]; 4]);

impl Mat4 {
    pub fn zeros() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Mat4::zeros();
        for k in 0..4 {
            m.0[k][k] = ONE;
        }
        m
    }

    pub fn from_rows(rows: [[C64; 4]; 4]) -> Self {
        Mat4(rows)
    }

    pub fn mul(&self, rhs: &Mat4) -> Mat4 {
        let mut out = Mat4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = ZERO;
                for k in 0..4 {
                    acc += self.0[r][k] * rhs.0[k][c];
                }
                out.0[r][c] = acc;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for r in 0..4 {
            let mut acc = ZERO;
            for k in 0..4 {
                acc += self.0[r][k] * v[k];
            }
            out[r] = acc;
        }
        out
    }

    pub fn adjoint(&self) -> Mat4 {
        let mut out = Mat4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] = self.0[c][r].conj();
            }
        }
        out
    }

    pub fn scale(&self, z: C64) -> Mat4 {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for e in row.iter_mut() {
                *e *= z;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat4) -> Mat4 {
        let mut out = *self;
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] += rhs.0[r][c];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Mat4) -> Mat4 {
        let mut out = *self;
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] -= rhs.0[r][c];
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2] + self.0[3][3]
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> C64 {
        let m = &self.0;
        let minor = |r0: usize, r1: usize, r2: usize, c0: usize, c1: usize, c2: usize| -> C64 {
            m[r0][c0] * (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1])
                - m[r0][c1] * (m[r1][c0] * m[r2][c2] - m[r1][c2] * m[r2][c0])
                + m[r0][c2] * (m[r1][c0] * m[r2][c1] - m[r1][c1] * m[r2][c0])
        };
        m[0][0] * minor(1, 2, 3, 1, 2, 3) - m[0][1] * minor(1, 2, 3, 0, 2, 3)
            + m[0][2] * minor(1, 2, 3, 0, 1, 3)
            - m[0][3] * minor(1, 2, 3, 0, 1, 2)
    }

    /// Max entrywise absolute difference.
    pub fn max_abs_diff(&self, rhs: &Mat4) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                d = d.max((self.0[r][c] - rhs.0[r][c]).norm());
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        let mut d: f64 = 0.0;
        for row in &self.0 {
            for e in row {
                d = d.max(e.norm());
            }
        }
        d
    }

    /// Frobenius deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let mut acc = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                let t = if r == c { ONE } else { ZERO };
                acc += (p.0[r][c] - t).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Frobenius deviation from the Hermitian condition `A = A†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut acc = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                acc += (self.0[r][c] - self.0[c][r].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `|tr(A†B)| / 4`; equals 1 iff the unitaries agree up to a global phase.
    pub fn phase_fidelity(&self, rhs: &Mat4) -> f64 {
        self.adjoint().mul(rhs).trace().norm() / 4.0
    }

    /// Max entrywise difference after aligning the global phase of `self`
    /// onto `rhs`.
    pub fn phase_aligned_diff(&self, rhs: &Mat4) -> f64 {
        let ovl = self.adjoint().mul(rhs).trace();
        let phase = if ovl.norm() > 1e-300 {
            ovl / ovl.norm()
        } else {
            ONE
        };
        self.scale(phase).max_abs_diff(rhs)
    }
}

/// Eigendecomposition of a 4x4 Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns eigenvalues in ascending order and the matching
/// orthonormal eigenvectors as columns of a unitary.
pub fn eigh4(a: &Mat4) -> ([f64; 4], Mat4) {
    let mut m = *a;
    let mut v = Mat4::identity();
    let scale = m.max_abs().max(1e-300);
    let tol = 1e-16 * scale;

    for _sweep in 0..60 {
        let mut off: f64 = 0.0;
        for p in 0..4 {
            for q in (p + 1)..4 {
                off = off.max(m.0[p][q].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                let g = m.0[p][q];
                let gn = g.norm();
                if gn <= tol * 1e-2 {
                    continue;
                }
                let phase = g / gn;
                let app = m.0[p][p].re;
                let aqq = m.0[q][q].re;
                // Rotation angle zeroing the (p,q) entry; the stable
                // smaller-root formula for tan(theta).
                let tau = (app - aqq) / (2.0 * gn);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Plane rotation R: R[p][p]=c, R[p][q]=-s*phase,
                // R[q][p]=s*conj(phase), R[q][q]=c; update M <- R†MR, V <- VR.
                let mut r = Mat4::identity();
                r.0[p][p] = C64::new(c, 0.0);
                r.0[p][q] = -phase * s;
                r.0[q][p] = phase.conj() * s;
                r.0[q][q] = C64::new(c, 0.0);
                m = r.adjoint().mul(&m).mul(&r);
                v = v.mul(&r);
                // Clamp the eliminated entry to keep structural zeros exact.
                m.0[p][q] = ZERO;
                m.0[q][p] = ZERO;
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&x, &y| m.0[x][x].re.partial_cmp(&m.0[y][y].re).unwrap());
    let mut vals = [0.0; 4];
    let mut vecs = Mat4::zeros();
    for (dst, &src) in order.iter().enumerate() {
        vals[dst] = m.0[src][src].re;
        for r in 0..4 {
            vecs.0[r][dst] = v.0[r][src];
        }
    }
    (vals, vecs)
}

/// `exp(i s t H)` for Hermitian `H`, via the eigendecomposition.
pub fn exp_i_hermitian(h: &Mat4, t: f64, sign: f64) -> Mat4 {
    let (vals, vecs) = eigh4(h);
    let mut out = Mat4::zeros();
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = ZERO;
            for k in 0..4 {
                acc += vecs.0[r][k] * expi(sign * vals[k] * t) * vecs.0[c][k].conj();
            }
            out.0[r][c] = acc;
        }
    }
    out
}

/// Formats a float with 12 significant digits, used by the CSV emitters so
/// reports are byte-stable across runs.
pub fn fmt_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let s = format!("{:.11e}", x);
    // Trim trailing zeros in the mantissa for readability while keeping the
    // formatting deterministic.
    if let Some(epos) = s.find('e') {
        let (mant, exp) = s.split_at(epos);
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{}{}", mant, exp)
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng) -> Mat4 {
        let mut m = Mat4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = C64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            }
        }
        let adj = m.adjoint();
        m.add(&adj).scale(C64::new(0.5, 0.0))
    }

    #[test]
    fn eigh4_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let h = random_hermitian(&mut rng);
            let (vals, vecs) = eigh4(&h);
            assert!(vecs.unitarity_defect() < 1e-12);
            // H V = V diag(vals)
            let hv = h.mul(&vecs);
            let mut vd = vecs;
            for r in 0..4 {
                for c in 0..4 {
                    vd.0[r][c] *= vals[c];
                }
            }
            assert!(hv.max_abs_diff(&vd) < 1e-11);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let u = exp_i_hermitian(&Mat4::zeros(), 3.7, 1.0);
        assert!(u.max_abs_diff(&Mat4::identity()) < 1e-14);
    }

    #[test]
    fn exponential_is_unitary_and_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let h = random_hermitian(&mut rng);
            let u1 = exp_i_hermitian(&h, 0.3, 1.0);
            let u2 = exp_i_hermitian(&h, 0.9, 1.0);
            let u3 = exp_i_hermitian(&h, 1.2, 1.0);
            assert!(u1.unitarity_defect() < 1e-12);
            assert!(u2.mul(&u1).max_abs_diff(&u3) < 1e-11);
        }
    }

    #[test]
    fn det_of_known_matrix() {
        let mut m = Mat4::identity();
        m.0[0][0] = C64::new(2.0, 0.0);
        m.0[1][3] = C64::new(0.0, 1.0);
        assert!((m.det() - C64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fmt_g12_is_stable() {
        assert_eq!(fmt_g12(0.0), "0");
        assert_eq!(fmt_g12(1.0), "1e0");
        assert_eq!(fmt_g12(-0.25), "-2.5e-1");
        assert_eq!(fmt_g12(f64::NAN), "nan");
    }
}
