use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast};

/// Floating-point type the measure, transport and adapted layers are generic over.
pub trait Scalar:
    Float + FromPrimitive + NumCast + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Tolerance on weight sums and marginal residuals for this precision.
    const TOL: f64;

    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 is representable")
    }

    fn f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// Bit pattern used for exact equality grouping; `-0.0` and `0.0` share a key.
    fn key(self) -> u64;
}

impl Scalar for f64 {
    const TOL: f64 = 1e-9;

    fn key(self) -> u64 {
        if self == 0.0 {
            0
        } else {
            self.to_bits()
        }
    }
}

impl Scalar for f32 {
    const TOL: f64 = 1e-5;

    fn key(self) -> u64 {
        if self == 0.0 {
            0
        } else {
            self.to_bits() as u64
        }
    }
}

/// `|x|^p` with the common integer exponents special-cased.
#[inline]
pub fn powp<S: Scalar>(x: S, p: S) -> S {
    let a = x.abs();
    if p == S::one() {
        a
    } else if p == S::of(2.0) {
        a * a
    } else {
        a.powf(p)
    }
}

#[inline]
pub fn root<S: Scalar>(x: S, p: S) -> S {
    let x = x.max(S::zero());
    if p == S::one() {
        x
    } else if p == S::of(2.0) {
        x.sqrt()
    } else {
        x.powf(p.recip())
    }
}

/// Euclidean distance raised to `p`.
#[inline]
pub fn dist_p<S: Scalar>(a: &[S], b: &[S], p: S) -> S {
    if a.len() == 1 {
        return powp(a[0] - b[0], p);
    }
    let sq: S = a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum();
    if p == S::of(2.0) {
        sq
    } else {
        powp(sq.sqrt(), p)
    }
}

pub fn norm<S: Scalar>(a: &[S]) -> S {
    a.iter().map(|&x| x * x).sum::<S>().sqrt()
}
