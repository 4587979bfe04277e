//! Scalar fields for the exact linear algebra: `Q` and the quadratic
//! cyclotomic fields `Q(zeta_m)` with `m in {1, 2, 3, 4, 6}`.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use super::rat::Rat;
use crate::{Error, Result};

/// Arithmetic every coefficient field in the pipeline supports.
pub trait Field: Clone + PartialEq + Eq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rat(r: Rat) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn inverse(&self) -> Option<Self>;

    fn divide(&self, other: &Self) -> Self {
        self.times(&other.inverse().expect("division by zero"))
    }

    fn from_int(n: i64) -> Self {
        Self::from_rat(Rat::from_int(n))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// The element as a rational, when it lies in `Q`.
    fn as_rat(&self) -> Option<Rat>;

    /// Embed a cyclotomic scalar, when this field contains it.
    fn from_cyclo(c: &CycloElem) -> Option<Self>;

    fn to_cyclo(&self) -> CycloElem;
}

impl Field for Rat {
    fn zero() -> Self {
        Rat::zero()
    }
    fn one() -> Self {
        Rat::one()
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        self.recip()
    }
    fn as_rat(&self) -> Option<Rat> {
        Some(self.clone())
    }
    fn from_cyclo(c: &CycloElem) -> Option<Self> {
        c.as_rat()
    }
    fn to_cyclo(&self) -> CycloElem {
        CycloElem::rational(self.clone())
    }
}

/// An element `c0 + c1*z` of `Q(zeta_m)`.
///
/// Conductors 2 and 6 are folded into 1 and 3 (same fields); `m = 1` means the
/// element is rational and adopts the conductor of whatever it meets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloElem {
    conductor: u8,
    c: [Rat; 2],
}

impl CycloElem {
    pub fn rational(r: Rat) -> CycloElem {
        CycloElem { conductor: 1, c: [r, Rat::zero()] }
    }

    /// `c0 + c1*zeta_m`. Panics for conductors outside `{1, 2, 3, 4, 6}`.
    pub fn new(m: u8, c0: Rat, c1: Rat) -> CycloElem {
        match m {
            1 | 2 => {
                assert!(c1.is_zero(), "Q(zeta_{m}) = Q has no zeta term");
                CycloElem::rational(c0)
            }
            3 => CycloElem { conductor: 3, c: [c0, c1] }.normalize(),
            4 => CycloElem { conductor: 4, c: [c0, c1] }.normalize(),
            // zeta_6 = 1 + zeta_3
            6 => CycloElem { conductor: 3, c: [&c0 + &c1, c1] }.normalize(),
            _ => panic!("unsupported conductor {m}"),
        }
    }

    /// `zeta_m^k` for `m | 12` with `phi(m) <= 2`, i.e. `m in {1, 2, 3, 4, 6}`.
    pub fn root_of_unity(m: u8, k: i64) -> CycloElem {
        let k = k.rem_euclid(m as i64);
        match m {
            1 => CycloElem::rational(Rat::one()),
            2 => CycloElem::rational(Rat::from_int(if k == 0 { 1 } else { -1 })),
            4 => match k {
                0 => CycloElem::rational(Rat::one()),
                1 => CycloElem::new(4, Rat::zero(), Rat::one()),
                2 => CycloElem::rational(-Rat::one()),
                _ => CycloElem::new(4, Rat::zero(), -Rat::one()),
            },
            3 | 6 => {
                // powers of zeta_6 = 1 + w, w = zeta_3, w^2 = -1 - w
                let k6 = if m == 3 { 2 * k } else { k };
                let z6 = CycloElem::new(6, Rat::zero(), Rat::one());
                let mut acc = CycloElem::rational(Rat::one());
                for _ in 0..k6 {
                    acc = acc.times(&z6);
                }
                acc
            }
            _ => panic!("unsupported root of unity order {m}"),
        }
    }

    fn normalize(mut self) -> CycloElem {
        if self.c[1].is_zero() {
            self.conductor = 1;
        }
        self
    }

    pub fn conductor(&self) -> u8 {
        self.conductor
    }

    pub fn coeffs(&self) -> (&Rat, &Rat) {
        (&self.c[0], &self.c[1])
    }

    fn join(a: u8, b: u8) -> u8 {
        match (a, b) {
            (1, x) | (x, 1) => x,
            (x, y) if x == y => x,
            _ => panic!("mixing Q(zeta_{a}) with Q(zeta_{b})"),
        }
    }

    /// Complex conjugate (the nontrivial Galois automorphism).
    pub fn conj(&self) -> CycloElem {
        match self.conductor {
            1 => self.clone(),
            4 => CycloElem { conductor: 4, c: [self.c[0].clone(), -&self.c[1]] },
            // conj(w) = w^2 = -1 - w
            _ => CycloElem {
                conductor: 3,
                c: [&self.c[0] - &self.c[1], -&self.c[1]],
            }
            .normalize(),
        }
    }

    /// Field norm to `Q`.
    pub fn norm(&self) -> Rat {
        self.times(&self.conj()).as_rat().expect("norm is rational")
    }
}

impl Field for CycloElem {
    fn zero() -> Self {
        CycloElem::rational(Rat::zero())
    }
    fn one() -> Self {
        CycloElem::rational(Rat::one())
    }
    fn from_rat(r: Rat) -> Self {
        CycloElem::rational(r)
    }
    fn is_zero(&self) -> bool {
        self.c[0].is_zero() && self.c[1].is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        let m = CycloElem::join(self.conductor, o.conductor);
        CycloElem { conductor: m, c: [&self.c[0] + &o.c[0], &self.c[1] + &o.c[1]] }.normalize()
    }
    fn minus(&self, o: &Self) -> Self {
        let m = CycloElem::join(self.conductor, o.conductor);
        CycloElem { conductor: m, c: [&self.c[0] - &o.c[0], &self.c[1] - &o.c[1]] }.normalize()
    }
    fn times(&self, o: &Self) -> Self {
        let m = CycloElem::join(self.conductor, o.conductor);
        let (a, b) = (&self.c[0], &self.c[1]);
        let (c, d) = (&o.c[0], &o.c[1]);
        if m == 1 {
            return CycloElem::rational(a * c);
        }
        let ac = a * c;
        let bd = b * d;
        let cross = &(a * d) + &(b * c);
        let (r0, r1) = if m == 4 {
            // z^2 = -1
            (&ac - &bd, cross)
        } else {
            // z^2 = -1 - z
            (&ac - &bd, &cross - &bd)
        };
        CycloElem { conductor: m, c: [r0, r1] }.normalize()
    }
    fn negate(&self) -> Self {
        CycloElem { conductor: self.conductor, c: [-&self.c[0], -&self.c[1]] }
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let inv_n = CycloElem::rational(n.recip()?);
        Some(self.conj().times(&inv_n))
    }
    fn as_rat(&self) -> Option<Rat> {
        if self.c[1].is_zero() {
            Some(self.c[0].clone())
        } else {
            None
        }
    }
    fn from_cyclo(c: &CycloElem) -> Option<Self> {
        Some(c.clone())
    }
    fn to_cyclo(&self) -> CycloElem {
        self.clone()
    }
}

impl fmt::Display for CycloElem {
    /// `z{m}:c0+c1*z`, or a plain rational when the element lies in `Q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conductor == 1 {
            return write!(f, "{}", self.c[0]);
        }
        write!(f, "z{}:{}+{}*z", self.conductor, self.c[0], self.c[1])
    }
}

impl CycloElem {
    /// Human-readable `a + b i` (conductor 4) or `a + b ζ_3`.
    pub fn pretty(&self) -> String {
        let [c0, c1] = &self.c;
        if self.conductor == 1 || c1.is_zero() {
            return c0.to_string();
        }
        let z = if self.conductor == 4 { "i" } else { "ζ_3" };
        let coeff = if c1.is_one() {
            String::new()
        } else if (-c1).is_one() {
            String::from("-")
        } else {
            c1.to_string()
        };
        let term = format!("{coeff}{z}");
        if c0.is_zero() {
            term
        } else if c1.is_negative() {
            format!("{c0}{term}")
        } else {
            format!("{c0}+{term}")
        }
    }
}

impl fmt::Debug for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for CycloElem {
    type Err = Error;

    fn from_str(s: &str) -> Result<CycloElem> {
        let s = s.trim();
        let Some(rest) = s.strip_prefix('z') else {
            return Ok(CycloElem::rational(s.parse()?));
        };
        let bad = || Error::Parse(format!("cyclotomic element: {s}"));
        let (m, body) = rest.split_once(':').ok_or_else(bad)?;
        let m: u8 = m.parse().map_err(|_| bad())?;
        let body = body.strip_suffix("*z").ok_or_else(bad)?;
        // split on the '+' that separates c0 from c1 (c0 may itself carry a sign)
        let idx = body[1..].find('+').map(|i| i + 1).ok_or_else(bad)?;
        let c0: Rat = body[..idx].parse()?;
        let c1: Rat = body[idx + 1..].parse()?;
        if ![1u8, 2, 3, 4, 6].contains(&m) {
            return Err(bad());
        }
        Ok(CycloElem::new(m, c0, c1))
    }
}

impl CycloElem {
    pub fn to_text(&self) -> String {
        format!("{self}")
    }
}
