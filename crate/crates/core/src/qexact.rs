//! Exact truncated Laurent series in `q^{1/D}` (optionally also in `z^{1/E}`)
//! with big-integer coefficients.
//!
//! A series is known below its order: coefficients of `q^{k/D}` with
//! `k < order` are exact, everything at or above is unknown. Truncation is in
//! `q` only; `z` exponents are unrestricted.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest order accepted by [`formal_verify`].
pub const FORMAL_ORDER_CAP: u32 = 400;

type ZPoly = BTreeMap<i64, BigInt>;

/// Exact truncated series. Exponent numerators are over `q_den` (and
/// `z_den`); `order` is a numerator over `q_den`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    q_den: i64,
    z_den: i64,
    bivariate: bool,
    order: i64,
    terms: BTreeMap<(i64, i64), BigInt>,
}

impl TruncatedSeries {
    /// The zero series in `q^{1/q_den}`, known below `q^{order/q_den}`.
    pub fn zero(q_den: i64, order: i64) -> Self {
        assert!(q_den > 0, "denominator must be positive");
        Self {
            q_den,
            z_den: 1,
            bivariate: false,
            order,
            terms: BTreeMap::new(),
        }
    }

    /// The constant 1, known below `q^{order}` (whole units).
    pub fn one(order: i64) -> Self {
        Self::from_terms(1, order, [(0, BigInt::one())])
    }

    /// Univariate series from `(exponent numerator, coefficient)` pairs;
    /// terms at or beyond the order are dropped.
    pub fn from_terms<C: Into<BigInt>>(q_den: i64, order: i64, terms: impl IntoIterator<Item = (i64, C)>) -> Self {
        let mut s = Self::zero(q_den, order);
        for (k, c) in terms {
            s.accumulate((k, 0), c.into());
        }
        s
    }

    /// Bivariate series from `(q numerator, z numerator, coefficient)`.
    pub fn from_terms_z<C: Into<BigInt>>(
        q_den: i64,
        z_den: i64,
        order: i64,
        terms: impl IntoIterator<Item = (i64, i64, C)>,
    ) -> Self {
        assert!(z_den > 0, "denominator must be positive");
        let mut s = Self::zero(q_den, order);
        s.z_den = z_den;
        s.bivariate = true;
        for (k, j, c) in terms {
            s.accumulate((k, j), c.into());
        }
        s
    }

    fn accumulate(&mut self, key: (i64, i64), c: BigInt) {
        if key.0 >= self.order || c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn q_den(&self) -> i64 {
        self.q_den
    }

    pub fn z_den(&self) -> i64 {
        self.z_den
    }

    pub fn is_bivariate(&self) -> bool {
        self.bivariate
    }

    /// Order numerator over `q_den`.
    pub fn order(&self) -> i64 {
        self.order
    }

    /// Order as an exact rational exponent of `q`.
    pub fn order_exponent(&self) -> Rational64 {
        Rational64::new(self.order, self.q_den)
    }

    /// Smallest `q` numerator with a nonzero coefficient; the order for the
    /// zero series.
    pub fn min_exponent(&self) -> i64 {
        self.terms.keys().next().map_or(self.order, |k| k.0)
    }

    /// Coefficient of `q^{k/D} z^{j/E}`, or `None` at or beyond the order.
    pub fn coefficient(&self, k: i64, j: i64) -> Option<BigInt> {
        (k < self.order).then(|| self.terms.get(&(k, j)).cloned().unwrap_or_default())
    }

    /// Nonzero terms `((q numerator, z numerator), coefficient)` in order.
    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &BigInt)> {
        self.terms.iter()
    }

    /// Same series over finer denominators (multiples of the current ones).
    pub fn refine(&self, q_den: i64, z_den: i64) -> Self {
        assert!(q_den % self.q_den == 0 && z_den % self.z_den == 0, "refinement must be a multiple");
        let (fq, fz) = (q_den / self.q_den, z_den / self.z_den);
        Self {
            q_den,
            z_den,
            bivariate: self.bivariate,
            order: self.order * fq,
            terms: self.terms.iter().map(|(&(k, j), c)| ((k * fq, j * fz), c.clone())).collect(),
        }
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let q = self.q_den.lcm(&other.q_den);
        let z = self.z_den.lcm(&other.z_den);
        let mut a = self.refine(q, z);
        let mut b = other.refine(q, z);
        let bi = a.bivariate || b.bivariate;
        a.bivariate = bi;
        b.bivariate = bi;
        (a, b)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.common(other);
        a.order = a.order.min(b.order);
        a.terms.retain(|k, _| k.0 < a.order);
        for (k, c) in b.terms {
            a.accumulate(k, c);
        }
        a
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiply every coefficient by an integer.
    pub fn scale(&self, k: impl Into<BigInt>) -> Self {
        let k = k.into();
        let mut s = self.clone();
        if k.is_zero() {
            s.terms.clear();
        } else {
            for c in s.terms.values_mut() {
                *c *= &k;
            }
        }
        s
    }

    /// Product; the order is `min(O₁ + m₂, O₂ + m₁)` with `mᵢ` the minimal
    /// exponents.
    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let order = (a.order + b.min_exponent()).min(b.order + a.min_exponent());
        let mut acc: HashMap<(i64, i64), BigInt> = HashMap::new();
        for (&(k1, j1), c1) in &a.terms {
            for (&(k2, j2), c2) in &b.terms {
                if k1 + k2 >= order {
                    break;
                }
                *acc.entry((k1 + k2, j1 + j2)).or_default() += c1 * c2;
            }
        }
        let mut out = Self {
            q_den: a.q_den,
            z_den: a.z_den,
            bivariate: a.bivariate,
            order,
            terms: BTreeMap::new(),
        };
        out.terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out
    }

    /// Integer power. Negative powers go through [`Self::invert`].
    pub fn pow(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.invert()?.pow(-n);
        }
        let mut result = {
            let mut one = Self::from_terms(self.q_den, self.order - self.min_exponent(), [(0, 1)]);
            one.z_den = self.z_den;
            one.bivariate = self.bivariate;
            one
        };
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// Multiplicative inverse. The lowest `q` power must be a single
    /// monomial `±q^a z^b`; the result is known below `O − 2a`.
    pub fn invert(&self) -> Result<Self> {
        let a = self.min_exponent();
        if a >= self.order {
            return Err(Error::Domain("cannot invert a series with no known nonzero term".into()));
        }
        let lead: Vec<_> = self.terms.range((a, i64::MIN)..=(a, i64::MAX)).collect();
        if lead.len() != 1 || !lead[0].1.abs().is_one() {
            return Err(Error::Domain(
                "series inversion needs a leading monomial with coefficient ±1".into(),
            ));
        }
        let b = lead[0].0 .1;
        let sign = lead[0].1.clone();
        // u = sign·q^{-a}z^{-b}·f = 1 + g
        let rel_order = self.order - a;
        let mut g: BTreeMap<i64, ZPoly> = BTreeMap::new();
        for (&(k, j), c) in &self.terms {
            if k > a {
                g.entry(k - a).or_default().insert(j - b, c * &sign);
            }
        }
        let mut h: BTreeMap<i64, ZPoly> = BTreeMap::new();
        h.insert(0, ZPoly::from([(0, BigInt::one())]));
        for n in 1..rel_order {
            let mut slice = ZPoly::new();
            for (&k, gk) in g.range(1..=n) {
                if let Some(hn) = h.get(&(n - k)) {
                    for (j1, c1) in gk {
                        for (j2, c2) in hn {
                            *slice.entry(j1 + j2).or_default() -= c1 * c2;
                        }
                    }
                }
            }
            slice.retain(|_, c| !c.is_zero());
            if !slice.is_empty() {
                h.insert(n, slice);
            }
        }
        let mut out = Self {
            q_den: self.q_den,
            z_den: self.z_den,
            bivariate: self.bivariate,
            order: rel_order - a,
            terms: BTreeMap::new(),
        };
        for (n, slice) in h {
            for (j, c) in slice {
                out.accumulate((n - a, j - b), c * &sign);
            }
        }
        Ok(out)
    }

    /// Numeric value at `q = e^{log_q}`, `z = e^{log_z}`; fractional powers
    /// are `exp(x·log)`.
    pub fn eval_log(&self, log_q: Complex64, log_z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(k, j), c)| {
                let x = log_q * (k as f64 / self.q_den as f64) + log_z * (j as f64 / self.z_den as f64);
                x.exp() * c.to_f64().unwrap_or(f64::NAN)
            })
            .sum()
    }

    /// Numeric value with principal logarithms of `q` and `z`.
    pub fn eval(&self, q: Complex64, z: Complex64) -> Complex64 {
        let log_z = if self.bivariate { z.ln() } else { Complex64::new(0.0, 0.0) };
        self.eval_log(q.ln(), log_z)
    }

    /// Text table: `k/D<TAB>coef` (or `k/D<TAB>j/E<TAB>coef`), sorted by
    /// exponent.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (&(k, j), c) in &self.terms {
            if self.bivariate {
                let _ = writeln!(out, "{k}/{}\t{j}/{}\t{c}", self.q_den, self.z_den);
            } else {
                let _ = writeln!(out, "{k}/{}\t{c}", self.q_den);
            }
        }
        out
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&(k, j), c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c}·q^({k}/{})", self.q_den)?;
            if self.bivariate && j != 0 {
                write!(f, "·z^({j}/{})", self.z_den)?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^({}/{}))", self.order, self.q_den)
    }
}

/// Smallest `q` exponent below both orders where the two series differ.
pub fn first_mismatch(a: &TruncatedSeries, b: &TruncatedSeries) -> Option<Rational64> {
    let d = a.sub(b);
    d.terms.keys().next().map(|&(k, _)| Rational64::new(k, d.q_den))
}

/// `∏_{n ≥ 1} (1 + sign·q^{step·n + offset} z^{zexp})^power`, expanded up
/// to the order (whole `q` units over `q_den`).
fn factor_product(q_den: i64, order: i64, step: i64, offset: i64, zexp: i64, sign: i64, power: u32) -> TruncatedSeries {
    let mut acc = unit(q_den, order, zexp != 0);
    let mut n = 1;
    while step * n + offset < order {
        let f = binomial(q_den, order, step * n + offset, zexp, sign, zexp != 0);
        for _ in 0..power {
            acc = acc.mul(&f);
        }
        n += 1;
    }
    acc
}

fn unit(q_den: i64, order: i64, bivariate: bool) -> TruncatedSeries {
    if bivariate {
        TruncatedSeries::from_terms_z(q_den, 1, order, [(0, 0, 1)])
    } else {
        TruncatedSeries::from_terms(q_den, order, [(0, 1)])
    }
}

fn binomial(q_den: i64, order: i64, k: i64, j: i64, sign: i64, bivariate: bool) -> TruncatedSeries {
    if bivariate {
        TruncatedSeries::from_terms_z(q_den, 1, order, [(0, 0, 1), (k, j, sign)])
    } else {
        TruncatedSeries::from_terms(q_den, order, [(0, 1), (k, sign)])
    }
}

/// Product families that can be expanded exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductFamily {
    /// `∏(1−q^{2n})(1+q^{2n−1})²`
    Theta3,
    /// `∏(1−q^{2n})(1−q^{2n−1})²`
    Theta4,
    /// `2q^{1/4}∏(1−q^{2n})(1+q^{2n})²`
    Theta2,
    /// `∏(1−q^{2n})(1+q^{2n−1}z²)(1+q^{2n−1}z^{−2})` with `z = e^{πiu}`
    Theta3Z,
    /// `∏(1−q^{2n})(1−q^{2n−1}z²)(1−q^{2n−1}z^{−2})`
    Theta4Z,
    /// `q^{1/24}∏(1−qⁿ)`, in the eta nome
    EtaTerm,
    /// `∏(1−q^{2pn}) / (1−q^{2n})^p`
    LandenRhs(u32),
}

impl ProductFamily {
    fn q_den(self) -> i64 {
        match self {
            ProductFamily::Theta2 => 4,
            ProductFamily::EtaTerm => 24,
            _ => 1,
        }
    }
}

/// Exact expansion of a product family, known below `q^{order}`.
pub fn expand_product(family: ProductFamily, order: u32) -> Result<TruncatedSeries> {
    if order == 0 {
        return Err(Error::Domain("order must be at least 1".into()));
    }
    let d = family.q_den();
    let o = order as i64 * d;
    Ok(match family {
        ProductFamily::Theta3 => factor_product(1, o, 2, 0, 0, -1, 1).mul(&factor_product(1, o, 2, -1, 0, 1, 2)),
        ProductFamily::Theta4 => factor_product(1, o, 2, 0, 0, -1, 1).mul(&factor_product(1, o, 2, -1, 0, -1, 2)),
        ProductFamily::Theta2 => {
            let body = factor_product(4, o, 8, 0, 0, -1, 1).mul(&factor_product(4, o, 8, 0, 0, 1, 2));
            TruncatedSeries::from_terms(4, o, [(1, 2)]).mul(&body)
        }
        ProductFamily::Theta3Z | ProductFamily::Theta4Z => {
            let s = if family == ProductFamily::Theta3Z { 1 } else { -1 };
            factor_product(1, o, 2, 0, 0, -1, 1)
                .mul(&factor_product(1, o, 2, -1, 2, s, 1))
                .mul(&factor_product(1, o, 2, -1, -2, s, 1))
        }
        ProductFamily::EtaTerm => TruncatedSeries::from_terms(24, o, [(1, 1)]).mul(&factor_product(24, o, 24, 0, 0, -1, 1)),
        ProductFamily::LandenRhs(p) => {
            check_p(p)?;
            let p = p as i64;
            let num = factor_product(1, o, 2 * p, 0, 0, -1, 1);
            let den = factor_product(1, o, 2, 0, 0, -1, p as u32);
            num.mul(&den.invert()?)
        }
    })
}

fn check_p(p: u32) -> Result<()> {
    if p == 0 || p > 24 {
        return Err(Error::Domain(format!("p must lie in 1..=24 (got {p})")));
    }
    Ok(())
}

/// Theta series from the defining sums (`z = e^{πiu}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesDefinition {
    /// `Σ q^{n²}`
    Theta3,
    /// `Σ (−1)ⁿ q^{n²}`
    Theta4,
    /// `Σ q^{(n+½)²}`
    Theta2,
    /// `Σ q^{n²} z^{2n}`
    Theta3Z,
    /// `Σ (−1)ⁿ q^{n²} z^{2n}`
    Theta4Z,
}

/// Expansion of a defining theta sum in `q^{p·(·)}` (i.e. at `pτ`, and
/// `z^{p·}` for the bivariate forms), known below `q^{order}`.
pub fn theta_series(kind: SeriesDefinition, p: i64, order: u32) -> TruncatedSeries {
    let order = order as i64;
    let bound = (((order as f64) / p as f64).sqrt() as i64) + 2;
    match kind {
        SeriesDefinition::Theta3 | SeriesDefinition::Theta4 => {
            let alt = kind == SeriesDefinition::Theta4;
            TruncatedSeries::from_terms(
                1,
                order,
                (-bound..=bound).map(|n| (p * n * n, if alt && n % 2 != 0 { -1 } else { 1 })),
            )
        }
        SeriesDefinition::Theta2 => TruncatedSeries::from_terms(
            4,
            order * 4,
            (-bound..=bound).map(|n| (p * (2 * n + 1) * (2 * n + 1), 1)),
        ),
        SeriesDefinition::Theta3Z | SeriesDefinition::Theta4Z => {
            let alt = kind == SeriesDefinition::Theta4Z;
            TruncatedSeries::from_terms_z(
                1,
                1,
                order,
                (-bound..=bound).map(|n| (p * n * n, 2 * p * n, if alt && n % 2 != 0 { -1 } else { 1 })),
            )
        }
    }
}

/// Identities checked coefficient by coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormalId {
    /// `∏(1−q^{4n})²(1−q^{4n−2})² = ∏(1−q^{2n})²`, and with it
    /// `∏(1−q^{4n})(1−q^{4n−2})² · ∏(1−q^{4n})/(1−q^{2n})² = 1`.
    Agm2Cancel,
    /// `∏(1+q^{2n−1})²(1+q^{6n−3})² − ∏(1−q^{2n−1})²(1−q^{6n−3})² = 4q∏(1+q^{2n})²(1+q^{6n})²`
    Theta13,
    /// `θ₃⁴ = θ₄⁴ + θ₂⁴` from the defining sums, and
    /// `∏(1+q^{2n−1})⁸ − ∏(1−q^{2n−1})⁸ = 16q∏(1+q^{2n})⁸`.
    Quartic,
    /// Order-`p` Landen formula as an identity in `(q, z)`:
    /// `N · ∏(1−q^{2n})^p = D · ∏(1−q^{2pn})` with `N = θ₄(pu, pτ)` from its
    /// sum and `D = ∏_k θ₄(u + k/p, τ)`. For `p = 2`, `D = θ₄(u)θ₃(u)` from
    /// the sums; for `p ≥ 3` the grouped product
    /// `∏(1−q^{2n})^p (1−q^{p(2n−1)}z^{2p})(1−q^{p(2n−1)}z^{−2p})`.
    LandenNd(u32),
    /// `D` for `p ≥ 3` from the individual shifted sums; these carry
    /// coefficients in `ℤ[e^{2πi/p}]` and are not handled here.
    LandenNdDirect(u32),
    /// `a³ = b³ + c³` for the Borwein series, with `c` in powers of `q^{1/3}`.
    Cubic,
}

impl FormalId {
    pub fn name(&self) -> String {
        match self {
            FormalId::Agm2Cancel => "AGM2_cancel".into(),
            FormalId::Theta13 => "theta_13".into(),
            FormalId::Quartic => "quartic".into(),
            FormalId::LandenNd(p) => format!("landen_ND({p})"),
            FormalId::LandenNdDirect(p) => format!("landen_ND_direct({p})"),
            FormalId::Cubic => "cubic".into(),
        }
    }
}

impl FromStr for FormalId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let param = |prefix: &str| -> Option<Result<u32>> {
            let rest = lower.strip_prefix(prefix)?;
            let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')'))?;
            Some(inner.parse().map_err(|_| Error::Domain(format!("bad p in {s:?}"))))
        };
        match lower.as_str() {
            "agm2_cancel" => return Ok(FormalId::Agm2Cancel),
            "theta_13" => return Ok(FormalId::Theta13),
            "quartic" => return Ok(FormalId::Quartic),
            "cubic" => return Ok(FormalId::Cubic),
            _ => {}
        }
        if let Some(p) = param("landen_nd_direct") {
            return Ok(FormalId::LandenNdDirect(p?));
        }
        if let Some(p) = param("landen_nd") {
            return Ok(FormalId::LandenNd(p?));
        }
        Err(Error::Unsupported(format!("unknown formal identity {s:?}")))
    }
}

/// Result of a coefficient comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalOutcome {
    pub passed: bool,
    /// Smallest `q` exponent with a differing coefficient.
    pub first_mismatch: Option<Rational64>,
    /// Exponent below which all coefficients were compared.
    pub compared_below: Rational64,
    /// Largest absolute coefficient difference (0 when passed).
    pub max_abs_difference: BigInt,
}

fn compare(pairs: &[(TruncatedSeries, TruncatedSeries)]) -> FormalOutcome {
    let mut first: Option<Rational64> = None;
    let mut below: Option<Rational64> = None;
    let mut max_diff = BigInt::zero();
    for (a, b) in pairs {
        let d = a.sub(b);
        let o = d.order_exponent();
        below = Some(below.map_or(o, |x| x.min(o)));
        if let Some(m) = first_mismatch(a, b) {
            first = Some(first.map_or(m, |x| x.min(m)));
        }
        for c in d.terms.values() {
            max_diff = max_diff.max(c.abs());
        }
    }
    FormalOutcome {
        passed: first.is_none(),
        first_mismatch: first,
        compared_below: below.unwrap_or_default(),
        max_abs_difference: max_diff,
    }
}

/// Compare both sides of `id` to `q^{order}` with the default cap.
pub fn formal_verify(id: FormalId, order: u32) -> Result<FormalOutcome> {
    formal_verify_with_cap(id, order, FORMAL_ORDER_CAP)
}

/// [`formal_verify`] with an explicit cap on `order`.
pub fn formal_verify_with_cap(id: FormalId, order: u32, cap: u32) -> Result<FormalOutcome> {
    if order == 0 || order > cap {
        return Err(Error::Domain(format!("order must lie in 1..={cap} (got {order})")));
    }
    let o = order as i64;
    let pairs = match id {
        FormalId::Agm2Cancel => {
            let e4 = factor_product(1, o, 4, 0, 0, -1, 1);
            let o42 = factor_product(1, o, 4, -2, 0, -1, 1);
            let e2 = factor_product(1, o, 2, 0, 0, -1, 1);
            let lhs = e4.mul(&e4).mul(&o42).mul(&o42);
            let rhs = e2.mul(&e2);
            let ratio = e4.mul(&o42).mul(&o42).mul(&e4).mul(&rhs.invert()?);
            vec![(lhs, rhs), (ratio, TruncatedSeries::one(o))]
        }
        FormalId::Theta13 => {
            let plus = factor_product(1, o, 2, -1, 0, 1, 2).mul(&factor_product(1, o, 6, -3, 0, 1, 2));
            let minus = factor_product(1, o, 2, -1, 0, -1, 2).mul(&factor_product(1, o, 6, -3, 0, -1, 2));
            let right = TruncatedSeries::from_terms(1, o, [(1, 4)])
                .mul(&factor_product(1, o, 2, 0, 0, 1, 2))
                .mul(&factor_product(1, o, 6, 0, 0, 1, 2));
            vec![(plus.sub(&minus), right)]
        }
        FormalId::Quartic => {
            let t3 = theta_series(SeriesDefinition::Theta3, 1, order).pow(4)?;
            let t4 = theta_series(SeriesDefinition::Theta4, 1, order).pow(4)?;
            let t2 = theta_series(SeriesDefinition::Theta2, 1, order).pow(4)?;
            let plus = factor_product(1, o, 2, -1, 0, 1, 8);
            let minus = factor_product(1, o, 2, -1, 0, -1, 8);
            let right = TruncatedSeries::from_terms(1, o, [(1, 16)]).mul(&factor_product(1, o, 2, 0, 0, 1, 8));
            vec![(t3, t4.add(&t2)), (plus.sub(&minus), right)]
        }
        FormalId::LandenNd(p) => {
            check_p(p)?;
            let pi = p as i64;
            let n = theta_series(SeriesDefinition::Theta4Z, pi, order);
            let e2p = factor_product(1, o, 2, 0, 0, -1, p);
            let d = if p == 2 {
                theta_series(SeriesDefinition::Theta4Z, 1, order).mul(&theta_series(SeriesDefinition::Theta3Z, 1, order))
            } else {
                e2p.mul(&factor_product(1, o, 2 * pi, -pi, 2 * pi, -1, 1))
                    .mul(&factor_product(1, o, 2 * pi, -pi, -2 * pi, -1, 1))
            };
            let c = factor_product(1, o, 2 * pi, 0, 0, -1, 1);
            vec![(n.mul(&e2p), d.mul(&c))]
        }
        FormalId::LandenNdDirect(p) if p >= 3 => {
            return Err(Error::Unsupported(format!(
                "landen_ND_direct({p}) needs coefficients in Z[e^(2 pi i/{p})]; use the grouped form or the numeric check"
            )))
        }
        FormalId::LandenNdDirect(p) => return formal_verify_with_cap(FormalId::LandenNd(p), order, cap),
        FormalId::Cubic => {
            let (a, b, c) = cubic_series(order)?;
            vec![(a.pow(3)?, b.pow(3)?.add(&c.pow(3)?))]
        }
    };
    Ok(compare(&pairs))
}

/// Exact `a`, `b` (integer coefficients) and `c` (in `q^{1/3}`) to `q^{order}`.
pub fn cubic_series(order: u32) -> Result<(TruncatedSeries, TruncatedSeries, TruncatedSeries)> {
    let o = order as i64;
    // m² + mn + n² ≥ ½ max(|m|,|n|)², so terms below q^o have |m|,|n| < √(2o) + 1
    let w = 2 * ((o as f64).sqrt() as i64) + 2;
    let mut a = BTreeMap::<i64, BigInt>::new();
    // b coefficient counts by ω-power
    let mut b = BTreeMap::<i64, [i64; 3]>::new();
    let mut c = BTreeMap::<i64, BigInt>::new();
    for m in -w..=w {
        for n in -w..=w {
            let e = m * m + m * n + n * n;
            if e < o {
                *a.entry(e).or_default() += 1;
                b.entry(e).or_default()[(m - n).rem_euclid(3) as usize] += 1;
            }
            let (x, y) = (3 * m + 1, 3 * n + 1);
            let e3 = (x * x + x * y + y * y) / 3;
            if e3 < 3 * o {
                *c.entry(e3).or_default() += 1;
            }
        }
    }
    let mut bt = Vec::new();
    for (e, [c0, c1, c2]) in b {
        if c1 != c2 {
            return Err(Error::CrossCheck(format!("b(q) coefficient of q^{e} is not an integer")));
        }
        bt.push((e, BigInt::from(c0 - c1)));
    }
    Ok((
        TruncatedSeries::from_terms(1, o, a),
        TruncatedSeries::from_terms(1, o, bt),
        TruncatedSeries::from_terms(3, 3 * o, c),
    ))
}
