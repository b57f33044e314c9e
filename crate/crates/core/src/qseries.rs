//! Truncated q-expansions with exact rational coefficients.
//!
//! A [`QExpansion`] stores the first `prec` Fourier coefficients of a form
//! together with weight and level metadata and two flags: `is_cusp` (constant
//! term vanishes and the value was constructed as a cusp form) and
//! `quasimodular` (the expansion involves `E_2` or a raw derivative and does
//! not transform with its stated weight).
//!
//! Precision propagates pessimistically: every binary operation truncates to
//! the smaller operand precision, and `V_t` keeps the input precision rather
//! than reporting coefficients it cannot know.

use num_integer::Integer;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, rational_to_string, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    coeffs: Vec<Rational>,
    weight: i64,
    level: u64,
    is_cusp: bool,
    quasimodular: bool,
}

impl QExpansion {
    /// Builds an expansion from explicit coefficients. Flags default to
    /// "not cuspidal, genuinely modular"; use the `with_*` builders to adjust.
    pub fn new(coeffs: Vec<Rational>, weight: i64, level: u64) -> Self {
        assert!(level >= 1, "level must be positive");
        assert!(!coeffs.is_empty(), "need at least one coefficient");
        QExpansion {
            coeffs,
            weight,
            level,
            is_cusp: false,
            quasimodular: false,
        }
    }

    pub fn zero(prec: usize, weight: i64, level: u64) -> Self {
        QExpansion::new(vec![Rational::zero(); prec.max(1)], weight, level).with_cusp_flag(true)
    }

    /// Constructor with every field explicit, for operators that know the
    /// transformation behavior of their output better than the flag algebra
    /// does (the Serre derivative, the named recipe kinds).
    pub(crate) fn raw(
        coeffs: Vec<Rational>,
        weight: i64,
        level: u64,
        is_cusp: bool,
        quasimodular: bool,
    ) -> Self {
        QExpansion::new(coeffs, weight, level)
            .with_cusp_flag(is_cusp)
            .with_quasimodular_flag(quasimodular)
    }

    /// Flags the value as a cusp form. Panics if the constant term is nonzero.
    pub fn with_cusp_flag(mut self, is_cusp: bool) -> Self {
        if is_cusp {
            assert!(
                self.coeffs[0].is_zero(),
                "cusp form must have zero constant term"
            );
        }
        self.is_cusp = is_cusp;
        self
    }

    pub fn with_quasimodular_flag(mut self, quasimodular: bool) -> Self {
        self.quasimodular = quasimodular;
        self
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn is_cusp(&self) -> bool {
        self.is_cusp
    }

    pub fn is_quasimodular(&self) -> bool {
        self.quasimodular
    }

    /// Coefficient of `q^n`. Panics if `n >= prec`: coefficients beyond the
    /// truncation order are unknown and must not be read.
    pub fn coeff(&self, n: usize) -> &Rational {
        assert!(
            n < self.prec(),
            "coefficient {n} beyond truncation order {}",
            self.prec()
        );
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero_series(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    /// All coefficients have denominator 1.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Restriction to a smaller precision.
    pub fn truncate(&self, prec: usize) -> QExpansion {
        assert!(prec >= 1 && prec <= self.prec());
        QExpansion {
            coeffs: self.coeffs[..prec].to_vec(),
            ..self.clone()
        }
    }

    /// Coefficient-wise sum. Errors unless the weights agree; the result
    /// level is the lcm and the precision the minimum.
    pub fn add(&self, other: &QExpansion) -> Result<QExpansion> {
        if self.weight != other.weight {
            return Err(Error::WeightMismatch {
                left: self.weight,
                right: other.weight,
            });
        }
        let prec = self.prec().min(other.prec());
        let coeffs = (0..prec)
            .map(|n| &self.coeffs[n] + &other.coeffs[n])
            .collect();
        Ok(QExpansion {
            coeffs,
            weight: self.weight,
            level: self.level.lcm(&other.level),
            is_cusp: self.is_cusp && other.is_cusp,
            quasimodular: self.quasimodular || other.quasimodular,
        })
    }

    pub fn sub(&self, other: &QExpansion) -> Result<QExpansion> {
        self.add(&other.scale(&crate::rational::rat_int(-1)))
    }

    /// Cauchy product truncated to the minimum precision. Weights add,
    /// levels combine by lcm.
    pub fn mul(&self, other: &QExpansion) -> QExpansion {
        let prec = self.prec().min(other.prec());
        let mut coeffs = vec![Rational::zero(); prec];
        for (i, a) in self.coeffs.iter().enumerate().take(prec) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(prec - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        QExpansion {
            coeffs,
            weight: self.weight + other.weight,
            level: self.level.lcm(&other.level),
            is_cusp: self.is_cusp || other.is_cusp,
            quasimodular: self.quasimodular || other.quasimodular,
        }
    }

    pub fn scale(&self, c: &Rational) -> QExpansion {
        QExpansion {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            ..self.clone()
        }
    }

    /// The normalized derivative `D = q d/dq`: coefficient `n` maps to
    /// `n * a(n)`. Weight rises by 2 and the result is flagged quasimodular.
    pub fn derive(&self) -> QExpansion {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a * crate::rational::rat_int(n as i64))
            .collect();
        QExpansion {
            coeffs,
            weight: self.weight + 2,
            level: self.level,
            is_cusp: self.is_cusp,
            quasimodular: true,
        }
    }

    /// `V_t`: substitutes `q -> q^t`, i.e. `result[n] = self[n/t]` when `t | n`
    /// and 0 otherwise. The precision stays at `self.prec()` (coefficients
    /// between `prec` and `t*(prec-1)` would be known, but pessimistic
    /// propagation keeps the window uniform) and the level is multiplied by
    /// `t`.
    pub fn v_expand(&self, t: u64) -> QExpansion {
        assert!(t >= 1, "V_t needs t >= 1");
        let prec = self.prec();
        let coeffs = (0..prec)
            .map(|n| {
                if n as u64 % t == 0 {
                    self.coeffs[(n as u64 / t) as usize].clone()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        QExpansion {
            coeffs,
            weight: self.weight,
            level: self.level * t,
            is_cusp: self.is_cusp,
            quasimodular: self.quasimodular,
        }
    }

    /// Line-oriented text form: a metadata header followed by one
    /// `n numerator/denominator` line per coefficient.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "weight {} level {} prec {} cusp {} quasimodular {}\n",
            self.weight,
            self.level,
            self.prec(),
            self.is_cusp as u8,
            self.quasimodular as u8
        );
        for (n, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{} {}/{}\n", n, c.numer(), c.denom()));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<QExpansion> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty q-expansion text".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 10
            || fields[0] != "weight"
            || fields[2] != "level"
            || fields[4] != "prec"
            || fields[6] != "cusp"
            || fields[8] != "quasimodular"
        {
            return Err(Error::Parse(format!("bad q-expansion header {header:?}")));
        }
        let weight: i64 = fields[1]
            .parse()
            .map_err(|_| Error::Parse("bad weight".into()))?;
        let level: u64 = fields[3]
            .parse()
            .map_err(|_| Error::Parse("bad level".into()))?;
        let prec: usize = fields[5]
            .parse()
            .map_err(|_| Error::Parse("bad prec".into()))?;
        let is_cusp = fields[7] == "1";
        let quasimodular = fields[9] == "1";
        let mut coeffs = vec![Rational::zero(); prec];
        let mut seen = 0usize;
        for line in lines {
            let (idx, value) = line
                .trim()
                .split_once(' ')
                .ok_or_else(|| Error::Parse(format!("bad coefficient line {line:?}")))?;
            let n: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad index {idx:?}")))?;
            if n >= prec {
                return Err(Error::Parse(format!("index {n} exceeds prec {prec}")));
            }
            coeffs[n] = parse_rational(value)?;
            seen += 1;
        }
        if seen != prec {
            return Err(Error::Parse(format!(
                "expected {prec} coefficient lines, found {seen}"
            )));
        }
        if is_cusp && !coeffs[0].is_zero() {
            return Err(Error::Parse(
                "cusp flag set but constant term is nonzero".into(),
            ));
        }
        Ok(QExpansion {
            coeffs,
            weight,
            level,
            is_cusp,
            quasimodular,
        })
    }
}

/// JSON shape: coefficients as exact `[numerator, denominator]` string pairs.
#[derive(Serialize, Deserialize)]
struct QExpansionRepr {
    weight: i64,
    level: u64,
    prec: usize,
    is_cusp: bool,
    quasimodular: bool,
    coeffs: Vec<[String; 2]>,
}

impl Serialize for QExpansion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = QExpansionRepr {
            weight: self.weight,
            level: self.level,
            prec: self.prec(),
            is_cusp: self.is_cusp,
            quasimodular: self.quasimodular,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| [c.numer().to_string(), c.denom().to_string()])
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QExpansion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = QExpansionRepr::deserialize(deserializer)?;
        if repr.prec != repr.coeffs.len() || repr.prec == 0 {
            return Err(D::Error::custom("prec does not match coefficient count"));
        }
        if repr.level == 0 {
            return Err(D::Error::custom("level must be positive"));
        }
        let coeffs: Vec<Rational> = repr
            .coeffs
            .iter()
            .map(|[n, d]| parse_rational(&format!("{n}/{d}")).map_err(D::Error::custom))
            .collect::<std::result::Result<_, _>>()?;
        if repr.is_cusp && !coeffs[0].is_zero() {
            return Err(D::Error::custom("cusp flag set but constant term nonzero"));
        }
        Ok(QExpansion {
            coeffs,
            weight: repr.weight,
            level: repr.level,
            is_cusp: repr.is_cusp,
            quasimodular: repr.quasimodular,
        })
    }
}

/// Pretty one-line rendering of the first few terms, for reports.
pub fn short_display(f: &QExpansion, terms: usize) -> String {
    let mut parts = Vec::new();
    for (n, c) in f.coeffs().iter().enumerate().take(terms) {
        if c.is_zero() {
            continue;
        }
        let c = rational_to_string(c);
        match n {
            0 => parts.push(c),
            1 => parts.push(format!("{c}*q")),
            _ => parts.push(format!("{c}*q^{n}")),
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        let tail = if f.prec() > terms { " + ..." } else { "" };
        format!("{}{}", parts.join(" + "), tail)
    }
}
