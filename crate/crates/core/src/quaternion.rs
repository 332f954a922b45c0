//! Exact quaternion arithmetic.
//!
//! Two integer structures live here: Lipschitz quaternions in the Hamilton
//! algebra (i^2 = j^2 = -1, ij = -ji = k) with their norm-n strata R(n), and
//! elements of the natural order Z + Zw + ZW + ZwW in an indefinite rational
//! quaternion algebra with w^2 = a > 0, W^2 = b, wW = -Ww. Both use checked
//! 64-bit arithmetic: overflow is an error, never a wraparound.

use crate::error::{Error, Result};
use crate::tol;

/// A Lipschitz quaternion a0 + a1 i + a2 j + a3 k with exact i64 coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quaternion {
    pub a0: i64,
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
}

impl Quaternion {
    pub const fn new(a0: i64, a1: i64, a2: i64, a3: i64) -> Self {
        Quaternion { a0, a1, a2, a3 }
    }

    pub const fn one() -> Self {
        Quaternion::new(1, 0, 0, 0)
    }

    pub fn conjugate(&self) -> Self {
        Quaternion::new(self.a0, -self.a1, -self.a2, -self.a3)
    }

    pub fn neg(&self) -> Self {
        Quaternion::new(-self.a0, -self.a1, -self.a2, -self.a3)
    }

    /// Reduced norm a0^2 + a1^2 + a2^2 + a3^2, exactly.
    pub fn norm(&self) -> Result<i64> {
        let sq = |x: i64| x.checked_mul(x).ok_or(Error::ArithmeticOverflow);
        let mut acc: i64 = 0;
        for v in [self.a0, self.a1, self.a2, self.a3] {
            acc = acc.checked_add(sq(v)?).ok_or(Error::ArithmeticOverflow)?;
        }
        Ok(acc)
    }

    /// Hamilton product, exact and checked.
    pub fn multiply(&self, r: &Quaternion) -> Result<Quaternion> {
        let m = |x: i64, y: i64| x.checked_mul(y).ok_or(Error::ArithmeticOverflow);
        let add4 = |t: [i64; 4]| -> Result<i64> {
            let mut acc = t[0];
            for &v in &t[1..] {
                acc = acc.checked_add(v).ok_or(Error::ArithmeticOverflow)?;
            }
            Ok(acc)
        };
        let (p0, p1, p2, p3) = (self.a0, self.a1, self.a2, self.a3);
        let (q0, q1, q2, q3) = (r.a0, r.a1, r.a2, r.a3);
        Ok(Quaternion::new(
            add4([m(p0, q0)?, -m(p1, q1)?, -m(p2, q2)?, -m(p3, q3)?])?,
            add4([m(p0, q1)?, m(p1, q0)?, m(p2, q3)?, -m(p3, q2)?])?,
            add4([m(p0, q2)?, -m(p1, q3)?, m(p2, q0)?, m(p3, q1)?])?,
            add4([m(p0, q3)?, m(p1, q2)?, -m(p2, q1)?, m(p3, q0)?])?,
        ))
    }

    /// The unit quaternion q / sqrt(N(q)).
    pub fn to_unit(&self) -> Result<Su2Element> {
        let n = self.norm()?;
        if n == 0 {
            return Err(Error::DegenerateInput("zero quaternion has no direction"));
        }
        let s = 1.0 / (n as f64).sqrt();
        Ok(Su2Element::new(
            self.a0 as f64 * s,
            self.a1 as f64 * s,
            self.a2 as f64 * s,
            self.a3 as f64 * s,
        ))
    }
}

/// A unit quaternion; the floating image of alpha / sqrt(N(alpha)).
#[derive(Clone, Copy, Debug)]
pub struct Su2Element {
    pub c: [f64; 4],
}

impl Su2Element {
    pub fn new(c0: f64, c1: f64, c2: f64, c3: f64) -> Self {
        let e = Su2Element { c: [c0, c1, c2, c3] };
        debug_assert!((e.norm_sq() - 1.0).abs() < tol::UNIT_NORM);
        e
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum()
    }

    pub fn multiply(&self, r: &Su2Element) -> Su2Element {
        let [p0, p1, p2, p3] = self.c;
        let [q0, q1, q2, q3] = r.c;
        Su2Element {
            c: [
                p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
                p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
                p0 * q2 - p1 * q3 + p2 * q0 + p3 * q1,
                p0 * q3 + p1 * q2 - p2 * q1 + p3 * q0,
            ],
        }
    }

    /// Image under the double cover SU(2) -> SO(3): conjugation on the
    /// imaginary units. The same matrix is produced for u and -u.
    pub fn to_rotation(&self) -> RotationMatrix {
        let [w, x, y, z] = self.c;
        RotationMatrix {
            m: [
                [
                    1.0 - 2.0 * (y * y + z * z),
                    2.0 * (x * y - w * z),
                    2.0 * (x * z + w * y),
                ],
                [
                    2.0 * (x * y + w * z),
                    1.0 - 2.0 * (x * x + z * z),
                    2.0 * (y * z - w * x),
                ],
                [
                    2.0 * (x * z - w * y),
                    2.0 * (y * z + w * x),
                    1.0 - 2.0 * (x * x + y * y),
                ],
            ],
        }
    }
}

/// A 3x3 rotation matrix (orthogonal, det +1).
#[derive(Clone, Copy, Debug)]
pub struct RotationMatrix {
    pub m: [[f64; 3]; 3],
}

impl RotationMatrix {
    pub fn identity() -> Self {
        RotationMatrix { m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] }
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = self.m[i][0] * v[0] + self.m[i][1] * v[1] + self.m[i][2] * v[2];
        }
        out
    }

    pub fn matmul(&self, r: &RotationMatrix) -> RotationMatrix {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] =
                    self.m[i][0] * r.m[0][j] + self.m[i][1] * r.m[1][j] + self.m[i][2] * r.m[2][j];
            }
        }
        RotationMatrix { m: out }
    }

    pub fn transpose(&self) -> RotationMatrix {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.m[j][i];
            }
        }
        RotationMatrix { m: out }
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Max entry of R^T R - I.
    pub fn orthogonality_defect(&self) -> f64 {
        let t = self.transpose().matmul(self);
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((t.m[i][j] - target).abs());
            }
        }
        worst
    }

    pub fn is_rotation(&self) -> bool {
        self.orthogonality_defect() < tol::ROTATION_ORTHO && (self.det() - 1.0).abs() < tol::ROTATION_ORTHO
    }

    /// Rotation angle in [0, pi] from the trace.
    pub fn angle(&self) -> f64 {
        let c = ((self.m[0][0] + self.m[1][1] + self.m[2][2] - 1.0) / 2.0).clamp(-1.0, 1.0);
        c.acos()
    }
}

/// The SO(3) image of q under normalize-then-conjugate.
pub fn rotation_of(q: &Quaternion) -> Result<RotationMatrix> {
    Ok(q.to_unit()?.to_rotation())
}

/// Lattice points of norm n in the odd stratum:
/// { a in H(Z) : N(a) = n, a0 odd, a1, a2, a3 even },
/// listed in lexicographic order of (a0, a1, a2, a3). Empty unless
/// n = 1 mod 4. Closed under conjugation and negation.
pub fn enumerate_rn(n: u64) -> Vec<Quaternion> {
    let mut out = Vec::new();
    if n == 0 || n % 4 != 1 {
        return out;
    }
    let n = n as i64;
    let amax = isqrt(n);
    let mut a0 = -(if amax % 2 == 0 { amax - 1 } else { amax });
    while a0 <= amax {
        let r0 = n - a0 * a0;
        let a1max = isqrt(r0);
        let mut a1 = -(a1max - a1max % 2);
        while a1 <= a1max {
            let r1 = r0 - a1 * a1;
            let a2max = isqrt(r1);
            let mut a2 = -(a2max - a2max % 2);
            while a2 <= a2max {
                let r2 = r1 - a2 * a2;
                let a3 = isqrt(r2);
                if a3 * a3 == r2 && a3 % 2 == 0 {
                    if a3 > 0 {
                        out.push(Quaternion::new(a0, a1, a2, -a3));
                        out.push(Quaternion::new(a0, a1, a2, a3));
                    } else {
                        out.push(Quaternion::new(a0, a1, a2, 0));
                    }
                }
                a2 += 2;
            }
            a1 += 2;
        }
        a0 += 2;
    }
    out
}

/// Floor of sqrt for non-negative i64.
pub fn isqrt(v: i64) -> i64 {
    if v < 0 {
        return -1;
    }
    let mut r = (v as f64).sqrt() as i64;
    while r > 0 && r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

/// Structure constants of an indefinite rational quaternion algebra:
/// w^2 = a with a > 0 and W^2 = b, both squarefree.
///
/// The order in use is the natural one, Z + Zw + ZW + ZwW. An order level
/// is carried as configuration for refined (Eichler-type) orders with local
/// congruence conditions at the primes dividing it; everything in this
/// crate runs at level 1, and nothing currently branches on the value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndefAlgebra {
    a: i64,
    b: i64,
    order_level: u64,
}

impl IndefAlgebra {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        Self::with_order_level(a, b, 1)
    }

    /// Configuration hook for refined orders; only level 1 is exercised.
    pub fn with_order_level(a: i64, b: i64, order_level: u64) -> Result<Self> {
        if a <= 0 {
            return Err(Error::InvalidAlgebra { a, b, reason: "a must be positive" });
        }
        if b == 0 {
            return Err(Error::InvalidAlgebra { a, b, reason: "b must be nonzero" });
        }
        if !squarefree(a) {
            return Err(Error::InvalidAlgebra { a, b, reason: "a must be squarefree" });
        }
        if !squarefree(b.abs()) {
            return Err(Error::InvalidAlgebra { a, b, reason: "b must be squarefree" });
        }
        if order_level == 0 {
            return Err(Error::InvalidAlgebra { a, b, reason: "order level must be positive" });
        }
        Ok(IndefAlgebra { a, b, order_level })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn order_level(&self) -> u64 {
        self.order_level
    }

    pub fn element(&self, x0: i64, x1: i64, x2: i64, x3: i64) -> OrderElement {
        OrderElement { alg: *self, x: [x0, x1, x2, x3] }
    }
}

fn squarefree(mut v: i64) -> bool {
    if v == 0 {
        return false;
    }
    let mut d = 2i64;
    while d * d <= v {
        if v % (d * d) == 0 {
            return false;
        }
        while v % d == 0 {
            v /= d;
        }
        d += 1;
    }
    true
}

/// x0 + x1 w + x2 W + x3 wW in the natural order of an indefinite algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderElement {
    pub alg: IndefAlgebra,
    pub x: [i64; 4],
}

impl OrderElement {
    /// Reduced norm x0^2 - a x1^2 - b x2^2 + ab x3^2, exactly.
    pub fn reduced_norm(&self) -> Result<i64> {
        let (a, b) = (self.alg.a, self.alg.b);
        let sq = |v: i64| v.checked_mul(v).ok_or(Error::ArithmeticOverflow);
        let mul = |x: i64, y: i64| x.checked_mul(y).ok_or(Error::ArithmeticOverflow);
        let t0 = sq(self.x[0])?;
        let t1 = mul(a, sq(self.x[1])?)?;
        let t2 = mul(b, sq(self.x[2])?)?;
        let t3 = mul(mul(a, b)?, sq(self.x[3])?)?;
        t0.checked_sub(t1)
            .and_then(|v| v.checked_sub(t2))
            .and_then(|v| v.checked_add(t3))
            .ok_or(Error::ArithmeticOverflow)
    }

    pub fn conjugate(&self) -> OrderElement {
        OrderElement { alg: self.alg, x: [self.x[0], -self.x[1], -self.x[2], -self.x[3]] }
    }

    /// Exact product in the algebra; the order is closed under it.
    pub fn multiply(&self, r: &OrderElement) -> Result<OrderElement> {
        assert_eq!(self.alg, r.alg, "elements of different algebras");
        let (a, b) = (self.alg.a, self.alg.b);
        let m = |x: i64, y: i64| x.checked_mul(y).ok_or(Error::ArithmeticOverflow);
        let add = |x: i64, y: i64| x.checked_add(y).ok_or(Error::ArithmeticOverflow);
        let [p0, p1, p2, p3] = self.x;
        let [q0, q1, q2, q3] = r.x;
        // (p0 + p1 w + p2 W + p3 wW)(q0 + q1 w + q2 W + q3 wW) with
        // w^2 = a, W^2 = b, wW = -Ww, (wW)^2 = -ab.
        let y0 = add(add(m(p0, q0)?, m(a, m(p1, q1)?)?)?, add(m(b, m(p2, q2)?)?, -m(a, m(b, m(p3, q3)?)?)?)?)?;
        let y1 = add(add(m(p0, q1)?, m(p1, q0)?)?, add(-m(b, m(p2, q3)?)?, m(b, m(p3, q2)?)?)?)?;
        let y2 = add(add(m(p0, q2)?, m(p2, q0)?)?, add(m(a, m(p1, q3)?)?, -m(a, m(p3, q1)?)?)?)?;
        let y3 = add(add(m(p0, q3)?, m(p3, q0)?)?, add(m(p1, q2)?, -m(p2, q1)?)?)?;
        Ok(OrderElement { alg: self.alg, x: [y0, y1, y2, y3] })
    }

    /// Embedding into M(2, R): with s = sqrt(a),
    ///
    ///   1  -> I,  w -> [[-s, 0], [0, s]],  W -> [[0, 1], [b, 0]],
    ///
    /// extended multiplicatively, so x0 + x1 w + x2 W + x3 wW maps to
    /// [[x0 - x1 s, x2 - x3 s], [b (x2 + x3 s), x0 + x1 s]]. The determinant
    /// is the reduced norm, and conjugation maps to the adjugate.
    pub fn theta_embed(&self) -> [[f64; 2]; 2] {
        let s = (self.alg.a as f64).sqrt();
        let [x0, x1, x2, x3] = self.x.map(|v| v as f64);
        let b = self.alg.b as f64;
        [[x0 - x1 * s, x2 - x3 * s], [b * (x2 + x3 * s), x0 + x1 * s]]
    }
}
