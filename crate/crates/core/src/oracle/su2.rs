//! Self-contained 2x2 complex algebra with closed-form exponentials.

use num_complex::Complex64 as C;

pub type M2 = [[C; 2]; 2];
pub type V2 = [C; 2];

const Z: C = C::new(0.0, 0.0);

pub fn identity() -> M2 {
    [[C::new(1.0, 0.0), Z], [Z, C::new(1.0, 0.0)]]
}

pub fn mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[Z; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn adjoint(a: &M2) -> M2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn conj(a: &M2) -> M2 {
    [
        [a[0][0].conj(), a[0][1].conj()],
        [a[1][0].conj(), a[1][1].conj()],
    ]
}

pub fn apply(a: &M2, v: &V2) -> V2 {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

pub fn dot(u: &V2, v: &V2) -> C {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

pub fn max_diff(a: &M2, b: &M2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// `exp(-i (c0 + v . sigma) t)` by the Rodrigues formula.
pub fn exp_pauli(c0: f64, v: [f64; 3], t: f64) -> M2 {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let (cos, sin_over_r) = if r == 0.0 {
        (1.0, t)
    } else {
        ((r * t).cos(), (r * t).sin() / r)
    };
    let s = C::new(0.0, -sin_over_r);
    let global = C::from_polar(1.0, -c0 * t);
    // cos 1 - i sin (n . sigma)
    let m = [
        [C::new(cos, 0.0) + s * v[2], s * C::new(v[0], -v[1])],
        [s * C::new(v[0], v[1]), C::new(cos, 0.0) - s * v[2]],
    ];
    [
        [global * m[0][0], global * m[0][1]],
        [global * m[1][0], global * m[1][1]],
    ]
}

/// Step propagator of `omega/2 (1 + cos L sz + sin L sx)` held for `dt`.
pub fn rotation_step(omega: f64, lambda: f64, dt: f64) -> M2 {
    let h = omega / 2.0;
    exp_pauli(h, [h * lambda.sin(), 0.0, h * lambda.cos()], dt)
}

/// Eigenvectors of `H(L)` for `L` in `[0, pi]`: (ground, excited), with the
/// first nonzero component made real and positive.
pub fn eigenvectors(lambda: f64) -> (V2, V2) {
    let (c, s) = ((lambda / 2.0).cos(), (lambda / 2.0).sin());
    let fix = |v: [f64; 2]| -> V2 {
        let lead = if v[0].abs() > 1e-12 { v[0] } else { v[1] };
        let sign = lead.signum();
        [C::new(sign * v[0], 0.0), C::new(sign * v[1], 0.0)]
    };
    (fix([-s, c]), fix([c, s]))
}

/// Trace distance of two 2x2 Hermitian unit-trace matrices.
pub fn trace_distance(a: &M2, b: &M2) -> f64 {
    let d = [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ];
    let half_gap = (d[0][0].re - d[1][1].re) / 2.0;
    let mean = (d[0][0].re + d[1][1].re) / 2.0;
    let radius = (half_gap * half_gap + d[0][1].norm_sqr()).sqrt();
    0.5 * ((mean + radius).abs() + (mean - radius).abs())
}

pub fn outer(v: &V2) -> M2 {
    [
        [v[0] * v[0].conj(), v[0] * v[1].conj()],
        [v[1] * v[0].conj(), v[1] * v[1].conj()],
    ]
}

pub fn add_scaled(acc: &mut M2, a: &M2, w: f64) {
    for i in 0..2 {
        for j in 0..2 {
            acc[i][j] += a[i][j] * w;
        }
    }
}
