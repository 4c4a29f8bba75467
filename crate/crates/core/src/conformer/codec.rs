use super::{add, cross, dot, norm, scale, sub, unit, Conformer, InternalConformer, Point, Record};
use crate::error::ConformerError;
use crate::Scalar;

const COLLINEAR_SIN: f64 = 1e-6;

fn degrees<T: Scalar>(rad: T) -> T {
    rad.to_degrees()
}

/// Angle at `b` between `a` and `c`, in degrees.
fn angle<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    let (u, v) = (sub(a, b), sub(c, b));
    degrees(norm(cross(u, v)).atan2(dot(u, v)))
}

fn sin_of_angle<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    let (u, v) = (sub(a, b), sub(c, b));
    norm(cross(u, v)) / (norm(u) * norm(v))
}

/// Signed dihedral a-b-c-d in (−180°, 180°].
fn dihedral<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> T {
    let (b1, b2, b3) = (sub(b, a), sub(c, b), sub(d, c));
    let (n1, n2) = (cross(b1, b2), cross(b2, b3));
    let y = dot(cross(n1, n2), unit(b2));
    let x = dot(n1, n2);
    let deg = degrees(y.atan2(x));
    if deg <= T::c(-180.0) {
        T::c(180.0)
    } else {
        deg
    }
}

pub fn encode_conformer<T: Scalar>(c: &Conformer<T>) -> Result<InternalConformer<T>, ConformerError> {
    let p = &c.coords;
    if p.is_empty() {
        return Err(ConformerError::Empty);
    }
    for (i, x) in p.iter().enumerate() {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(ConformerError::NonFinite(i));
        }
        if i > 0 && norm(sub(*x, p[i - 1])) == T::zero() {
            return Err(ConformerError::Coincident(i - 1, i));
        }
    }
    let mut records = Vec::with_capacity(p.len());
    let mut degenerate = vec![false; p.len()];
    for i in 0..p.len() {
        records.push(match i {
            0 => Record::First,
            1 => Record::Second { d: norm(sub(p[1], p[0])) },
            2 => Record::Third { d: norm(sub(p[2], p[1])), alpha: angle(p[0], p[1], p[2]) },
            _ => {
                let (p1, p2, p3, p4) = (p[i - 3], p[i - 2], p[i - 1], p[i]);
                let flat = sin_of_angle(p1, p2, p3) < T::c(COLLINEAR_SIN);
                degenerate[i] = flat;
                Record::Full {
                    alpha: angle(p2, p3, p4),
                    beta: if flat { T::zero() } else { dihedral(p1, p2, p3, p4) },
                    d: norm(sub(p4, p3)),
                }
            }
        });
    }
    Ok(InternalConformer { records, degenerate })
}

fn check<T: Scalar>(i: usize, r: &Record<T>) -> Result<(), ConformerError> {
    let bad = |reason| Err(ConformerError::BadRecord { index: i, reason });
    let v = r.values();
    if v.iter().any(|x| !x.is_finite()) {
        return bad("non-finite value");
    }
    let (d, alpha, beta) = match *r {
        Record::First => return Ok(()),
        Record::Second { d } => (d, None, None),
        Record::Third { d, alpha } => (d, Some(alpha), None),
        Record::Full { alpha, beta, d } => (d, Some(alpha), Some(beta)),
    };
    if d <= T::zero() {
        return bad("distance must be positive");
    }
    if alpha.is_some_and(|a| a < T::zero() || a > T::c(180.0)) {
        return bad("angle outside [0, 180]");
    }
    if beta.is_some_and(|b| b < T::c(-180.0) || b > T::c(180.0)) {
        return bad("dihedral outside [-180, 180]");
    }
    Ok(())
}

/// Fixed unit vector perpendicular to `axis`.
fn any_perpendicular<T: Scalar>(axis: Point<T>) -> Point<T> {
    let abs = [axis[0].abs(), axis[1].abs(), axis[2].abs()];
    let k = (0..3).min_by(|&a, &b| abs[a].partial_cmp(&abs[b]).unwrap()).unwrap();
    let mut e = [T::zero(); 3];
    e[k] = T::one();
    unit(cross(axis, e))
}

fn place<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, r: (T, T, T), flat: bool) -> Point<T> {
    let (alpha, beta, d) = (r.0.to_radians(), r.1.to_radians(), r.2);
    let bc = unit(sub(c, b));
    let raw = cross(sub(b, a), bc);
    let n = if flat || norm(raw) <= T::c(COLLINEAR_SIN) * norm(sub(b, a)) { any_perpendicular(bc) } else { unit(raw) };
    let m = cross(n, bc);
    let local = [-d * alpha.cos(), d * alpha.sin() * beta.cos(), d * alpha.sin() * beta.sin()];
    add(c, add(scale(bc, local[0]), add(scale(m, local[1]), scale(n, local[2]))))
}

pub fn decode_conformer<T: Scalar>(ic: &InternalConformer<T>) -> Result<Conformer<T>, ConformerError> {
    if ic.records.is_empty() {
        return Err(ConformerError::Empty);
    }
    let z = T::zero();
    let mut out: Vec<Point<T>> = Vec::with_capacity(ic.len());
    for (i, r) in ic.records.iter().enumerate() {
        check(i, r)?;
        let flat = ic.degenerate.get(i).copied().unwrap_or(false);
        let p = match (i, *r) {
            (0, Record::First) => [z, z, z],
            (1, Record::Second { d }) => [d, z, z],
            (2, Record::Third { d, alpha }) => {
                let a = alpha.to_radians();
                add(out[1], [-d * a.cos(), d * a.sin(), z])
            }
            (i, Record::Full { alpha, beta, d }) if i >= 3 => {
                place(out[i - 3], out[i - 2], out[i - 1], (alpha, beta, d), flat)
            }
            _ => return Err(ConformerError::BadRecord { index: i, reason: "record kind does not fit its position" }),
        };
        out.push(p);
    }
    Ok(Conformer::new(out))
}
