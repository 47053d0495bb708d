//! Log-scaled floating point values `mantissa · e^exponent`.
//!
//! Collocation matrix entries involve products like `I_m(y a) K_m(y b)` whose
//! factors overflow or underflow `f64` long before the product does (already
//! at y·(b−a) ≳ 700). Every Bessel evaluation therefore carries an explicit
//! exponent, and products/ratios are formed by adding exponents so only the
//! final, well-scaled combination is ever collapsed to `f64`.

/// A real number stored as `mantissa · exp(exponent)`.
///
/// After normalization the mantissa is 0 or has magnitude in `[1e-2, 1e2)`,
/// which keeps arguments up to `x ~ 1e4` representable with full precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    mantissa: f64,
    exponent: f64,
}

const MANTISSA_LO: f64 = 1e-2;
const MANTISSA_HI: f64 = 1e2;

impl ScaledValue {
    pub const ZERO: ScaledValue = ScaledValue {
        mantissa: 0.0,
        exponent: 0.0,
    };
    pub const ONE: ScaledValue = ScaledValue {
        mantissa: 1.0,
        exponent: 0.0,
    };

    /// Builds `mantissa · e^exponent` and normalizes.
    pub fn new(mantissa: f64, exponent: f64) -> Self {
        ScaledValue { mantissa, exponent }.normalized()
    }

    pub fn from_f64(value: f64) -> Self {
        Self::new(value, 0.0)
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Collapses to a plain `f64`; overflows to ±inf / underflows to 0 when
    /// the exponent is outside the representable range.
    pub fn value(&self) -> f64 {
        self.mantissa * self.exponent.exp()
    }

    /// `ln|value|`; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn signum(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    pub fn abs(&self) -> Self {
        ScaledValue {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    pub fn neg(&self) -> Self {
        ScaledValue {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }

    pub fn mul(&self, rhs: &ScaledValue) -> Self {
        Self::new(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }

    pub fn div(&self, rhs: &ScaledValue) -> Self {
        Self::new(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }

    /// Multiplies by a plain factor without touching the exponent scale.
    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.mantissa * factor, self.exponent)
    }

    pub fn add(&self, rhs: &ScaledValue) -> Self {
        if self.is_zero() {
            return *rhs;
        }
        if rhs.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = lo.exponent - hi.exponent;
        if shift < -745.0 {
            return *hi;
        }
        Self::new(hi.mantissa + lo.mantissa * shift.exp(), hi.exponent)
    }

    pub fn sub(&self, rhs: &ScaledValue) -> Self {
        self.add(&rhs.neg())
    }

    /// Ratio of magnitudes as a plain f64 (useful for convergence checks).
    pub fn ratio_abs(&self, rhs: &ScaledValue) -> f64 {
        (self.ln_abs() - rhs.ln_abs()).exp()
    }

    fn normalized(mut self) -> Self {
        if self.mantissa == 0.0 {
            return ScaledValue::ZERO;
        }
        debug_assert!(self.mantissa.is_finite() && self.exponent.is_finite());
        let mag = self.mantissa.abs();
        if (MANTISSA_LO..MANTISSA_HI).contains(&mag) {
            return self;
        }
        // shift an integer amount of e-folds so the exponent stays exact-ish
        let k = mag.ln().round();
        self.mantissa *= (-k).exp();
        self.exponent += k;
        self
    }
}

impl std::fmt::Display for ScaledValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.17e}*e^{:.17e}", self.mantissa, self.exponent)
    }
}
