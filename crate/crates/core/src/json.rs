//! JSON forms of contexts and polynomials.
//!
//! A polynomial is either a list of terms
//! `{monomial: [[name, exponent], ...], coeff: {re_num, re_den, im_num, im_den, hbar_pow}}`
//! or an expression string such as `"x*xi + 1/2 hbar^-1 * (2+3i) * y^2"`.
//! Factors listed in a monomial are multiplied in the order given, so the
//! Koszul sign of reordering odd factors is applied on input; output always
//! lists factors in context order.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{AlgebraError, Context, Generator, SuperPoly};
use crate::scalar::{Gauss, Scalar, Window};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JsonError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("bad integer literal `{0}`")]
    BadInteger(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("parse error at offset {pos} in `{input}`: {message}")]
    Parse { input: String, pos: usize, message: String },
}

/// Arbitrary-precision integer, written as a JSON number when it fits in i64
/// and as a decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Int(BigInt::from(v))),
            Raw::Str(s) => BigInt::from_str(s.trim())
                .map(Int)
                .map_err(|_| serde::de::Error::custom(format!("bad integer literal `{s}`"))),
        }
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Self {
        Int(BigInt::from(v))
    }
}

fn one() -> Int {
    Int::from(1)
}

fn zero() -> Int {
    Int::from(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub name: String,
    pub gh: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextJson {
    #[serde(default)]
    pub name: Option<String>,
    pub generators: Vec<GeneratorJson>,
}

impl ContextJson {
    pub fn build(&self, window: Window) -> Result<Context, JsonError> {
        let gens = self.generators.iter().map(|g| Generator::new(g.name.clone(), g.gh)).collect();
        Ok(Context::with_window(self.name.clone().unwrap_or_else(|| "input".into()), gens, window)?)
    }

    pub fn from_context(ctx: &Context) -> Self {
        ContextJson {
            name: Some(ctx.name().to_string()),
            generators: ctx.generators().iter().map(|g| GeneratorJson { name: g.name.clone(), gh: g.gh }).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffJson {
    pub re_num: Int,
    #[serde(default = "one")]
    pub re_den: Int,
    #[serde(default = "zero")]
    pub im_num: Int,
    #[serde(default = "one")]
    pub im_den: Int,
    #[serde(default)]
    pub hbar_pow: i32,
}

impl CoeffJson {
    pub fn to_scalar(&self) -> Result<Scalar, JsonError> {
        if self.re_den.0.is_zero() || self.im_den.0.is_zero() {
            return Err(JsonError::ZeroDenominator);
        }
        let re = BigRational::new(self.re_num.0.clone(), self.re_den.0.clone());
        let im = BigRational::new(self.im_num.0.clone(), self.im_den.0.clone());
        Ok(Scalar::from_gauss(Gauss::new(re, im), self.hbar_pow))
    }

    fn from_gauss(c: &Gauss, k: i32) -> Self {
        CoeffJson {
            re_num: Int(c.re.numer().clone()),
            re_den: Int(c.re.denom().clone()),
            im_num: Int(c.im.numer().clone()),
            im_den: Int(c.im.denom().clone()),
            hbar_pow: k,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub monomial: Vec<(String, u32)>,
    pub coeff: CoeffJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyJson {
    Text(String),
    Terms(Vec<TermJson>),
}

impl PolyJson {
    pub fn to_poly(&self, ctx: &Context) -> Result<SuperPoly, JsonError> {
        match self {
            PolyJson::Text(s) => parse_poly(ctx, s),
            PolyJson::Terms(ts) => {
                let mut out = SuperPoly::zero(ctx);
                for t in ts {
                    let names: Vec<(&str, u32)> = t.monomial.iter().map(|(n, e)| (n.as_str(), *e)).collect();
                    out = &out + &SuperPoly::product_of(ctx, &names, t.coeff.to_scalar()?)?;
                }
                Ok(out)
            }
        }
    }

    /// Term list in normal form, one entry per (monomial, ħ-power).
    pub fn terms_of(p: &SuperPoly) -> Vec<TermJson> {
        let ctx = p.context();
        let mut out = Vec::new();
        for (m, c) in p.terms() {
            let monomial: Vec<(String, u32)> = (0..ctx.len())
                .filter(|&i| m.exp(i) > 0)
                .map(|i| (ctx.generator(i).name.clone(), m.exp(i)))
                .collect();
            for (k, g) in c.terms() {
                out.push(TermJson { monomial: monomial.clone(), coeff: CoeffJson::from_gauss(g, k) });
            }
        }
        out
    }
}

/// Canonical report form of a polynomial: display text plus the term list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolyReport {
    pub text: String,
    pub terms: Vec<TermJson>,
}

impl PolyReport {
    pub fn new(p: &SuperPoly) -> Self {
        PolyReport { text: p.to_string(), terms: PolyJson::terms_of(p) }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, JsonError> {
    let err = |pos: usize, m: &str| JsonError::Parse { input: src.to_string(), pos, message: m.to_string() };
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let is_ident = |c: char| c.is_alphanumeric() || c == '_' || c == '.' || c == '\'';
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let num: String = chars[start..i].iter().map(|x| x.1).collect();
            let mut value = BigRational::from_integer(BigInt::from_str(&num).map_err(|_| JsonError::BadInteger(num.clone()))?);
            // a/b written without spaces is a single rational literal
            if i + 1 < chars.len() && chars[i].1 == '/' && chars[i + 1].1.is_ascii_digit() {
                i += 1;
                let s2 = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let den: String = chars[s2..i].iter().map(|x| x.1).collect();
                let den = BigInt::from_str(&den).map_err(|_| JsonError::BadInteger(den.clone()))?;
                if den.is_zero() {
                    return Err(JsonError::ZeroDenominator);
                }
                value /= BigRational::from_integer(den);
            }
            out.push((pos, Tok::Num(value)));
        } else if c == 'ħ' {
            out.push((pos, Tok::Ident("hbar".into())));
            i += 1;
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && is_ident(chars[i].1) {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|x| x.1).collect())));
        } else if "+-*/^()[]".contains(c) {
            let c = match c {
                '[' => '(',
                ']' => ')',
                c => c,
            };
            out.push((pos, Tok::Op(c)));
            i += 1;
        } else {
            return Err(err(pos, &format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    at: usize,
    ctx: &'a Context,
}

impl Parser<'_> {
    fn err(&self, m: &str) -> JsonError {
        let pos = self.toks.get(self.at).map_or(self.src.len(), |t| t.0);
        JsonError::Parse { input: self.src.to_string(), pos, message: m.to_string() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<SuperPoly, JsonError> {
        let mut acc = if self.eat('-') { -&self.term()? } else { self.term()? };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')))
    }

    fn term(&mut self) -> Result<SuperPoly, JsonError> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.power()?;
            } else if self.eat('/') {
                match self.peek().cloned() {
                    Some(Tok::Num(r)) if !r.is_zero() => {
                        self.at += 1;
                        acc = acc.scale(&Scalar::from_rational(r.recip()));
                    }
                    _ => return Err(self.err("division only by a nonzero number")),
                }
            } else if self.starts_atom() {
                acc = &acc * &self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<SuperPoly, JsonError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let n = match self.peek().cloned() {
            Some(Tok::Num(r)) if r.is_integer() => {
                self.at += 1;
                r.to_integer().to_u32().ok_or_else(|| self.err("exponent too large"))?
            }
            _ => return Err(self.err("expected an integer exponent")),
        };
        if !neg {
            return Ok(base.pow(n));
        }
        if !base.is_constant() {
            return Err(self.err("negative exponent of a non-constant"));
        }
        let (inv, _) = base
            .constant_term()
            .inverse(self.ctx.window())
            .ok_or_else(|| self.err("constant is not invertible"))?;
        Ok(SuperPoly::constant(self.ctx, inv).pow(n))
    }

    fn atom(&mut self) -> Result<SuperPoly, JsonError> {
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.at += 1;
                Ok(SuperPoly::constant(self.ctx, Scalar::from_rational(r)))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if self.ctx.contains(&name) {
                    return Ok(SuperPoly::var(self.ctx, &name)?);
                }
                match name.as_str() {
                    "i" => Ok(SuperPoly::constant(self.ctx, Scalar::i())),
                    "hbar" => Ok(SuperPoly::constant(self.ctx, Scalar::hbar_pow(1))),
                    _ => Err(AlgebraError::UnknownGenerator(name).into()),
                }
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            _ => Err(self.err("expected a number, name or `(`")),
        }
    }
}

/// Parses an expression over `ctx`; `i` and `hbar` (or `ħ`) are reserved unless
/// the context has generators of those names.
pub fn parse_poly(ctx: &Context, src: &str) -> Result<SuperPoly, JsonError> {
    let toks = lex(src)?;
    let mut p = Parser { src, toks, at: 0, ctx };
    if p.toks.is_empty() {
        return Err(p.err("empty expression"));
    }
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// A rational given as an integer, a `"a/b"` string or `{num, den}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalJson {
    Int(i64),
    Text(String),
    Parts { num: Int, den: Int },
}

impl RationalJson {
    pub fn to_rational(&self) -> Result<BigRational, JsonError> {
        match self {
            RationalJson::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
            RationalJson::Text(s) => {
                let (n, d) = s.split_once('/').unwrap_or((s.as_str(), "1"));
                let parse = |x: &str| BigInt::from_str(x.trim()).map_err(|_| JsonError::BadInteger(s.clone()));
                let (n, d) = (parse(n)?, parse(d)?);
                if d.is_zero() {
                    return Err(JsonError::ZeroDenominator);
                }
                Ok(BigRational::new(n, d))
            }
            RationalJson::Parts { num, den } => {
                if den.0.is_zero() {
                    return Err(JsonError::ZeroDenominator);
                }
                Ok(BigRational::new(num.0.clone(), den.0.clone()))
            }
        }
    }
}

/// Canonical `num/den` rendering, or just `num` for integers.
pub fn render_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::from_pairs("t", &[("x", 0), ("xi", 1), ("eta", 1), ("y", 2)]).unwrap()
    }

    #[test]
    fn display_text_roundtrips() {
        let c = ctx();
        let p = parse_poly(&c, "3/2*x^2*xi + (1+2i) hbar^-1 eta*xi - y + 7").unwrap();
        let back = parse_poly(&c, &p.to_string()).unwrap();
        assert_eq!(p, back);
        let terms = PolyJson::Terms(PolyJson::terms_of(&p)).to_poly(&c).unwrap();
        assert_eq!(p, terms);
    }

    #[test]
    fn listed_order_carries_koszul_sign() {
        let c = ctx();
        let t = |m: Vec<(&str, u32)>| TermJson {
            monomial: m.into_iter().map(|(n, e)| (n.to_string(), e)).collect(),
            coeff: CoeffJson { re_num: 1.into(), re_den: 1.into(), im_num: 0.into(), im_den: 1.into(), hbar_pow: 0 },
        };
        let a = PolyJson::Terms(vec![t(vec![("eta", 1), ("xi", 1)])]).to_poly(&c).unwrap();
        let b = PolyJson::Terms(vec![t(vec![("xi", 1), ("eta", 1)])]).to_poly(&c).unwrap();
        assert_eq!(a, -&b);
        assert_eq!(a, parse_poly(&c, "eta*xi").unwrap());
    }

    #[test]
    fn json_shapes() {
        let c = ctx();
        let v: PolyJson = serde_json::from_str(r#"[{"monomial": [["x", 2]], "coeff": {"re_num": "-5", "re_den": 3}}]"#).unwrap();
        assert_eq!(v.to_poly(&c).unwrap(), parse_poly(&c, "-5/3 x^2").unwrap());
        let big = Int(BigInt::from(10).pow(30));
        assert_eq!(serde_json::to_string(&big).unwrap(), "\"1000000000000000000000000000000\"");
        assert_eq!(serde_json::to_string(&Int::from(-4)).unwrap(), "-4");
        assert!(parse_poly(&c, "x +").is_err());
        assert!(parse_poly(&c, "z").is_err());
        assert!(parse_poly(&c, "x^-1").is_err());
        assert_eq!(RationalJson::Text("6/4".into()).to_rational().unwrap(), BigRational::new(3.into(), 2.into()));
    }
}
