//! Real roots of a cubic from the closed form, polished by Newton.

use crate::real::Real;

/// Real roots of `c3 x^3 + c2 x^2 + c1 x + c0`, ascending and deduplicated to
/// `1e-9` relative. Degenerate leading coefficients fall back to the
/// quadratic or linear formula.
pub fn real_cubic_roots<T: Real>(c3: T, c2: T, c1: T, c0: T) -> Vec<T> {
    let coeffs = [c3, c2, c1, c0];
    let mut candidates = if c3 != T::zero() {
        monic_candidates(c2 / c3, c1 / c3, c0 / c3)
    } else if c2 != T::zero() {
        quadratic_roots(c2, c1, c0)
    } else if c1 != T::zero() {
        vec![-c0 / c1]
    } else {
        Vec::new()
    };

    for x in candidates.iter_mut() {
        *x = newton_polish(&coeffs, *x);
    }
    candidates.retain(|x| x.is_finite() && is_root(&coeffs, *x));
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    dedup_relative(&mut candidates, T::lit(1e-9));
    candidates
}

/// Closed-form candidates for `x^3 + a x^2 + b x + c`.
///
/// Near a vanishing discriminant both the simple and the double root are
/// offered; spurious ones are removed by the residual filter in the caller.
fn monic_candidates<T: Real>(a: T, b: T, c: T) -> Vec<T> {
    let three = T::lit(3.0);
    let shift = -a / three;
    let p = b - a * a / three;
    let q = T::lit(2.0) * a * a * a / T::lit(27.0) - a * b / three + c;
    let half_q = q / T::lit(2.0);
    let third_p = p / three;
    // Cardano's radicand; negative <=> three distinct real roots.
    let radicand = half_q * half_q + third_p * third_p * third_p;
    let scale = half_q * half_q + (third_p * third_p * third_p).abs();
    let near_degenerate = radicand.abs() <= T::lit(64.0) * T::epsilon() * scale;

    let mut out = Vec::with_capacity(4);
    if radicand < T::zero() && !near_degenerate {
        let r = (-third_p).sqrt();
        let cos_arg = (-half_q / (r * r * r)).max(-T::one()).min(T::one());
        let phi = cos_arg.acos() / three;
        let two_pi_3 = T::lit(2.0) * T::PI() / three;
        for k in 0..3 {
            let t = T::lit(2.0) * r * (phi - two_pi_3 * T::from_usize_lossy(k)).cos();
            out.push(t + shift);
        }
    } else {
        let s = radicand.max(T::zero()).sqrt();
        let big = -(half_q.signum()) * (half_q.abs() + s).cbrt();
        let small = if big != T::zero() {
            -third_p / big
        } else {
            T::zero()
        };
        out.push(big + small + shift);
        if near_degenerate && p != T::zero() {
            // simple root 3q/p and double root -3q/(2p)
            out.push(three * q / p + shift);
            out.push(-three * q / (T::lit(2.0) * p) + shift);
        }
    }
    out
}

fn quadratic_roots<T: Real>(a: T, b: T, c: T) -> Vec<T> {
    let disc = b * b - T::lit(4.0) * a * c;
    if disc < T::zero() {
        if disc.abs() <= T::lit(64.0) * T::epsilon() * b * b {
            return vec![-b / (T::lit(2.0) * a)];
        }
        return Vec::new();
    }
    let q = -(b + b.signum() * disc.sqrt()) / T::lit(2.0);
    let mut out = vec![q / a];
    if q != T::zero() {
        out.push(c / q);
    }
    out
}

fn eval<T: Real>(c: &[T; 4], x: T) -> (T, T, T) {
    // value, derivative, and the sum of |terms| for a relative residual
    let v = ((c[0] * x + c[1]) * x + c[2]) * x + c[3];
    let d = (T::lit(3.0) * c[0] * x + T::lit(2.0) * c[1]) * x + c[2];
    let ax = x.abs();
    let mag = ((c[0].abs() * ax + c[1].abs()) * ax + c[2].abs()) * ax + c[3].abs();
    (v, d, mag)
}

fn newton_polish<T: Real>(c: &[T; 4], mut x: T) -> T {
    for _ in 0..60 {
        let (v, d, _) = eval(c, x);
        if d == T::zero() || !d.is_finite() {
            break;
        }
        let step = v / d;
        let next = x - step;
        if !next.is_finite() {
            break;
        }
        let (vn, _, _) = eval(c, next);
        if vn.abs() > v.abs() {
            break;
        }
        x = next;
        if step.abs() <= T::epsilon() * x.abs() {
            break;
        }
    }
    x
}

fn is_root<T: Real>(c: &[T; 4], x: T) -> bool {
    let (v, _, mag) = eval(c, x);
    // a double root only reaches |P| ~ eps * mag
    v.abs() <= T::lit(1e3) * T::epsilon() * mag.max(T::min_positive_value())
}

pub(crate) fn dedup_relative<T: Real>(sorted: &mut Vec<T>, rel: T) {
    sorted.dedup_by(|b, a| {
        let scale = a.abs().max(b.abs());
        (*a - *b).abs() <= rel * scale || (*a == *b)
    });
}
