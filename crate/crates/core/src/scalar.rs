use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point type the series and linear algebra are generic over: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal (tolerances, parsed constants).
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal not representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub(crate) fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// Formats a float the way the text renderings do: shortest round-trip
/// scientific notation with at least one fractional digit (`5.0e-1`).
pub fn fmt_sci<T: Real>(x: T) -> String {
    let s = format!("{:e}", x);
    match s.find('e') {
        Some(pos) if !s[..pos].contains('.') => format!("{}.0{}", &s[..pos], &s[pos..]),
        _ => s,
    }
}

/// Seventeen significant digits, the JSON float format.
pub fn fmt_json<T: Real>(x: T) -> String {
    if x.is_finite() {
        format!("{:.16e}", x)
    } else {
        "null".to_string()
    }
}
