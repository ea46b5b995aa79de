//! High-precision values of G and F with their first and second
//! derivatives, written out from the defining formulas independently of the
//! f64 and interval evaluators, which are tested against it.

use astro_float::BigFloat;

use crate::hp::{to_f64, Hp};
use crate::scalar::Mode;

/// Value, gradient `(∂t, ∂x, ∂y)` and `(x, y)`-Hessian of G or F.
pub struct Jet {
    pub value: BigFloat,
    pub grad: [BigFloat; 3],
    pub hess: [[BigFloat; 2]; 2],
    /// `dx/du` (`sec² u`) resp. `dx/dw` (`−csch² w`), for compact gradients.
    pub dxdu: [BigFloat; 2],
}

/// `th` is θ or ℓ; all inputs are taken exactly.
pub fn jet(hp: &mut Hp, mode: Mode, th: &BigFloat, x: &BigFloat, y: &BigFloat) -> Jet {
    let one = hp.int(1);
    let n = |hp: &Hp, k: i64| hp.int(k);
    let (s, c) = match mode {
        Mode::Trig => (hp.sin(th), hp.cos(th)),
        Mode::Hyp => (hp.sinh(th), hp.cosh(th)),
    };
    let s2 = hp.mul(&s, &s);
    let s3 = hp.mul(&s2, &s);
    let xy = hp.mul(x, y);
    let xpy = hp.add(x, y);
    // Per-coordinate pieces: b(z), b'(z), b''(z) and dz/du.
    let piece = |hp: &mut Hp, z: &BigFloat| -> [BigFloat; 4] {
        let z2 = hp.mul(z, z);
        match mode {
            Mode::Trig => {
                let w = hp.add(&one, &z2);
                let at = hp.atan(z);
                let b = hp.sub(&hp.div(&hp.mul(&n(hp, 2), z), &w), &hp.mul(&n(hp, 6), &at));
                let b1 = hp.sub(&hp.div(&hp.mul(&n(hp, 2), &hp.sub(&one, &z2)), &hp.mul(&w, &w)), &hp.div(&n(hp, 6), &w));
                let b2 = hp.div(&hp.mul(&n(hp, 16), &hp.mul(&z2, z)), &hp.powi(&w, 3));
                [b, b1, b2, w]
            }
            Mode::Hyp => {
                let w = hp.sub(&z2, &one);
                let at = hp.atanh(&hp.div(&one, z));
                let b = hp.add(&hp.mul(&n(hp, 6), &at), &hp.div(&hp.mul(&n(hp, 2), z), &w));
                let b1 = hp
                    .add(&hp.div(&n(hp, 6), &w), &hp.div(&hp.mul(&n(hp, 2), &hp.add(&z2, &one)), &hp.mul(&w, &w)))
                    .neg();
                let b2 = hp.div(&hp.mul(&n(hp, 16), &hp.mul(&z2, z)), &hp.powi(&w, 3));
                [b, b1, b2, w.neg()]
            }
        }
    };
    let px = piece(hp, x);
    let py = piece(hp, y);
    let three = n(hp, 3);
    let six = n(hp, 6);
    let (value, dt, gx, gy) = match mode {
        Mode::Trig => {
            let k = hp.mul(&hp.powi(&hp.sub(&one, &c), 2), &hp.add(&n(hp, 2), &c));
            let pi = hp.pi();
            let mut v = hp.add(&hp.mul(&s3, &xy), &hp.mul(&k, &xpy));
            v = hp.sub(&hp.sub(&v, &s3), &hp.mul(&six, &s));
            v = hp.add(&v, &hp.mul(&six, &hp.sub(&pi, th)));
            v = hp.add(&hp.add(&v, &px[0]), &py[0]);
            // dθ = 3s²c(xy − 1) + 3s³(x + y) − 6c − 6
            let mut dt = hp.mul(&hp.mul(&three, &hp.mul(&s2, &c)), &hp.sub(&xy, &one));
            dt = hp.add(&dt, &hp.mul(&hp.mul(&three, &s3), &xpy));
            dt = hp.sub(&hp.sub(&dt, &hp.mul(&six, &c)), &six);
            let gx = hp.add(&hp.add(&hp.mul(&s3, y), &k), &px[1]);
            let gy = hp.add(&hp.add(&hp.mul(&s3, x), &k), &py[1]);
            (v, dt, gx, gy)
        }
        Mode::Hyp => {
            let k = hp.mul(&hp.powi(&hp.sub(&c, &one), 2), &hp.add(&c, &n(hp, 2)));
            let mut v = hp.sub(&hp.mul(&s3, &xy), &hp.mul(&k, &xpy));
            v = hp.sub(&hp.add(&v, &s3), &hp.mul(&six, &s));
            v = hp.sub(&v, &hp.mul(&six, th));
            v = hp.add(&hp.add(&v, &px[0]), &py[0]);
            // dℓ = 3S²C(xy + 1) − 3S³(x + y) − 6C − 6
            let mut dt = hp.mul(&hp.mul(&three, &hp.mul(&s2, &c)), &hp.add(&xy, &one));
            dt = hp.sub(&dt, &hp.mul(&hp.mul(&three, &s3), &xpy));
            dt = hp.sub(&hp.sub(&dt, &hp.mul(&six, &c)), &six);
            let gx = hp.add(&hp.sub(&hp.mul(&s3, y), &k), &px[1]);
            let gy = hp.add(&hp.sub(&hp.mul(&s3, x), &k), &py[1]);
            (v, dt, gx, gy)
        }
    };
    let [_, _, hx, dx] = px;
    let [_, _, hy, dy] = py;
    Jet { value, grad: [dt, gx, gy], hess: [[hx, s3.clone()], [s3, hy]], dxdu: [dx, dy] }
}

/// [`jet`] at an f64 point, rounded back to f64 values.
pub fn jet_f64(hp: &mut Hp, mode: Mode, t: f64, x: f64, y: f64) -> ([f64; 3], f64, [[f64; 2]; 2]) {
    let (t, x, y) = (hp.f64(t), hp.f64(x), hp.f64(y));
    let j = jet(hp, mode, &t, &x, &y);
    let h = |r: usize, c: usize| to_f64(&j.hess[r][c]);
    (j.grad.each_ref().map(to_f64), to_f64(&j.value), [[h(0, 0), h(0, 1)], [h(1, 0), h(1, 1)]])
}
