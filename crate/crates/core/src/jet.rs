//! Truncated univariate Taylor arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients `c_0..c_K` of a scalar function
//! about an expansion point; the k-th derivative is `k! * c_k`. Working with
//! coefficients rather than raw derivatives keeps the Cauchy products well
//! scaled up to the maximum supported order. The conversion factor `k!` is
//! applied only at [`Jet::derivative`].
//!
//! The one nonstandard primitive is [`Jet::expm1_ratio`], the function
//! `g(u) = u / (e^u - 1)` that appears in the gate opening rates with a
//! removable singularity at `u = 0`. Direct evaluation of the quotient loses
//! all digits there, so for small constant terms the jet is pushed through
//! the Bernoulli series of `g` instead.

use crate::error::{Error, Result};

/// Largest supported expansion order. Determinants for systems with up to
/// nine states need derivatives up to order eight.
pub const MAX_ORDER: usize = 8;

/// Constant terms below this magnitude route `expm1_ratio` through the
/// Bernoulli series branch.
///
/// The switch point balances the two error sources: the truncated series
/// degrades as `|u_0|` grows, while the quotient branch amplifies roundoff
/// by roughly `(e^u0 / (e^u0 - 1))^k` through its division recurrence as
/// `|u_0|` shrinks. At 0.25 with the degree-18 series both branches agree
/// to better than 1e-12 of the jet's magnitude at the working orders.
pub const EXPM1_RATIO_SWITCH: f64 = 0.25;

/// Coefficients `B_k / k!` of `u/(e^u - 1) = sum B_k/k! u^k`, `k = 0..=18`.
const BERNOULLI_OVER_FACTORIAL: [f64; 19] = [
    1.0,
    -0.5,
    1.0 / 12.0,
    0.0,
    -1.0 / 720.0,
    0.0,
    1.0 / 30_240.0,
    0.0,
    -1.0 / 1_209_600.0,
    0.0,
    1.0 / 47_900_160.0,
    0.0,
    -691.0 / 1_307_674_368_000.0,
    0.0,
    7.0 / 6.0 / 87_178_291_200.0,
    0.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
    0.0,
    43_867.0 / 798.0 / 6_402_373_705_728_000.0,
];

const FACTORIAL: [f64; MAX_ORDER + 1] =
    [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0];

/// Taylor coefficients of a scalar function of one variable, truncated at a
/// fixed order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    order: usize,
    c: [f64; MAX_ORDER + 1],
}

impl Jet {
    /// Jet of the constant function `x -> value`.
    pub fn constant(value: f64, order: usize) -> Jet {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut c = [0.0; MAX_ORDER + 1];
        c[0] = value;
        Jet { order, c }
    }

    /// Jet of the identity function expanded at `x0`: `c_0 = x0, c_1 = 1`.
    pub fn variable(x0: f64, order: usize) -> Jet {
        assert!(
            (1..=MAX_ORDER).contains(&order),
            "variable jet order must be in 1..={MAX_ORDER}, got {order}"
        );
        let mut j = Jet::constant(x0, order);
        j.c[1] = 1.0;
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The `order + 1` Taylor coefficients.
    pub fn coeffs(&self) -> &[f64] {
        &self.c[..=self.order]
    }

    /// Value at the expansion point (`c_0`).
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Exact k-th derivative at the expansion point, `k! * c_k`.
    pub fn derivative(&self, k: usize) -> f64 {
        assert!(k <= self.order, "derivative order {k} > jet order {}", self.order);
        self.c[k] * FACTORIAL[k]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }

    /// Coefficients of `exp` of the jet (standard recurrence for composed
    /// series).
    pub fn exp(&self) -> Jet {
        let n = self.order;
        let mut e = Jet::constant(self.c[0].exp(), n);
        for k in 1..=n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += (j as f64) * self.c[j] * e.c[k - j];
            }
            e.c[k] = acc / k as f64;
        }
        e
    }

    /// Coefficients of `e^u - 1`. Identical to [`Jet::exp`] except that the
    /// constant term is computed with `exp_m1`, keeping full relative
    /// precision for small arguments.
    pub fn expm1(&self) -> Jet {
        let mut e = self.exp();
        e.c[0] = self.c[0].exp_m1();
        e
    }

    /// `g(u) = u / (e^u - 1)`, entire along the real line once the removable
    /// singularity at zero is filled in with `g(0) = 1`.
    pub fn expm1_ratio(&self) -> Jet {
        if self.c[0].abs() < EXPM1_RATIO_SWITCH {
            self.expm1_ratio_series()
        } else {
            self.expm1_ratio_direct()
        }
    }

    /// Bernoulli-series branch: Horner evaluation of the degree-18 series
    /// of `g`, composed with the jet.
    fn expm1_ratio_series(&self) -> Jet {
        let degree = BERNOULLI_OVER_FACTORIAL.len() - 1;
        let mut acc = Jet::constant(BERNOULLI_OVER_FACTORIAL[degree], self.order);
        for k in (0..degree).rev() {
            acc = acc * *self + BERNOULLI_OVER_FACTORIAL[k];
        }
        acc
    }

    /// Quotient branch `u / (e^u - 1)`; requires the constant term away from
    /// zero.
    fn expm1_ratio_direct(&self) -> Jet {
        self.div_unchecked(&self.expm1())
    }

    /// Division with an explicit domain check on the denominator.
    pub fn try_div(&self, rhs: &Jet) -> Result<Jet> {
        if rhs.c[0] == 0.0 {
            return Err(Error::domain(
                "jet division by series with zero constant term",
            ));
        }
        Ok(self.div_unchecked(rhs))
    }

    fn div_unchecked(&self, rhs: &Jet) -> Jet {
        assert_eq!(self.order, rhs.order, "jet order mismatch");
        let n = self.order;
        let mut q = Jet::constant(0.0, n);
        for k in 0..=n {
            let mut acc = self.c[k];
            for j in 0..k {
                acc -= q.c[j] * rhs.c[k - j];
            }
            q.c[k] = acc / rhs.c[0];
        }
        q
    }
}

/// Scalar counterpart of [`Jet::expm1_ratio`], sharing its switch threshold
/// so scalar and jet evaluations agree bit-for-bit at order zero.
pub fn expm1_ratio_scalar(u: f64) -> f64 {
    if u.abs() < EXPM1_RATIO_SWITCH {
        let degree = BERNOULLI_OVER_FACTORIAL.len() - 1;
        let mut acc = BERNOULLI_OVER_FACTORIAL[degree];
        for k in (0..degree).rev() {
            acc = acc * u + BERNOULLI_OVER_FACTORIAL[k];
        }
        acc
    } else {
        u / u.exp_m1()
    }
}

impl std::ops::Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        assert_eq!(self.order, rhs.order, "jet order mismatch");
        let mut out = self;
        for k in 0..=self.order {
            out.c[k] += rhs.c[k];
        }
        out
    }
}

impl std::ops::Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        assert_eq!(self.order, rhs.order, "jet order mismatch");
        let mut out = self;
        for k in 0..=self.order {
            out.c[k] -= rhs.c[k];
        }
        out
    }
}

impl std::ops::Mul for Jet {
    type Output = Jet;
    /// Cauchy product truncated at the common order.
    fn mul(self, rhs: Jet) -> Jet {
        assert_eq!(self.order, rhs.order, "jet order mismatch");
        let n = self.order;
        let mut out = Jet::constant(0.0, n);
        for k in 0..=n {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.c[j] * rhs.c[k - j];
            }
            out.c[k] = acc;
        }
        out
    }
}

impl std::ops::Div for Jet {
    type Output = Jet;
    /// Panics if the divisor has zero constant term; use [`Jet::try_div`]
    /// when the denominator is not known to be bounded away from zero.
    fn div(self, rhs: Jet) -> Jet {
        self.try_div(&rhs).expect("jet division")
    }
}

impl std::ops::Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let mut out = self;
        for k in 0..=self.order {
            out.c[k] = -out.c[k];
        }
        out
    }
}

impl std::ops::Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self;
        out.c[0] += rhs;
        out
    }
}

impl std::ops::Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        let mut out = self;
        out.c[0] -= rhs;
        out
    }
}

impl std::ops::Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        let mut out = self;
        for k in 0..=self.order {
            out.c[k] *= rhs;
        }
        out
    }
}
