//! Text DSL for vector fields and the JSON frame document.
//!
//! Grammar (frozen):
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := rational | var | deriv | '(' expr ')' | factor '^' uint
//! rational := int ('/' uint)?
//! var      := 'x' uint
//! deriv    := 'd' uint
//! ```
//! `^` binds tighter than `*`; unary minus binds loosest among prefixes.
//! A well-formed field is a sum of terms, each carrying exactly one
//! derivation symbol; powers apply to scalars only. Rationals only —
//! decimal literals are rejected with a hint to use `p/q`.

use num_traits::{One, Signed};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::frames::{CarnotType, Frame};
use crate::poly::{MultiIndex, Poly, Rat};
use crate::vf::PolyVectorField;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Var(usize),
    Deriv(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let offset = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                out.push(Spanned {
                    tok: match c {
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '/' => Tok::Slash,
                        '^' => Tok::Caret,
                        '(' => Tok::LParen,
                        _ => Tok::RParen,
                    },
                    offset,
                });
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    return Err(Error::Parse {
                        offset: i,
                        message: "decimal literals are not supported; use p/q".into(),
                    });
                }
                let text = &src[start..i];
                let value: u64 = text.parse().map_err(|_| Error::Parse {
                    offset: start,
                    message: format!("integer literal '{text}' out of range"),
                })?;
                out.push(Spanned {
                    tok: Tok::Int(value),
                    offset,
                });
            }
            'x' | 'd' => {
                let start = i;
                i += 1;
                let digits_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if digits_start == i {
                    return Err(Error::Parse {
                        offset: start,
                        message: format!("'{c}' must be followed by an index, e.g. {c}1"),
                    });
                }
                let idx: usize = src[digits_start..i].parse().map_err(|_| Error::Parse {
                    offset: digits_start,
                    message: "index out of range".into(),
                })?;
                out.push(Spanned {
                    tok: if c == 'x' { Tok::Var(idx) } else { Tok::Deriv(idx) },
                    offset,
                });
            }
            '.' => {
                return Err(Error::Parse {
                    offset,
                    message: "decimal literals are not supported; use p/q".into(),
                });
            }
            _ => {
                return Err(Error::Parse {
                    offset,
                    message: format!("unexpected character '{c}'"),
                });
            }
        }
    }
    Ok(out)
}

/// A partially evaluated DSL value: a scalar polynomial plus a
/// vector-field part (coefficients of the derivation symbols).
#[derive(Debug, Clone)]
struct Value {
    scalar: Poly,
    vector: Vec<Poly>,
    /// True iff a derivation symbol occurs syntactically in this
    /// subexpression (independent of coefficient cancellation, so that
    /// e.g. `0*d1` is still a well-formed field term).
    has_deriv: bool,
}

impl Value {
    fn scalar(n: usize, p: Poly) -> Self {
        Value {
            scalar: p,
            vector: vec![Poly::zero(n); n],
            has_deriv: false,
        }
    }

    fn deriv(n: usize, j: usize) -> Self {
        let mut vector = vec![Poly::zero(n); n];
        vector[j] = Poly::one(n);
        Value {
            scalar: Poly::zero(n),
            vector,
            has_deriv: true,
        }
    }

    fn add(&self, other: &Value) -> Value {
        Value {
            scalar: self.scalar.add(&other.scalar),
            vector: self
                .vector
                .iter()
                .zip(&other.vector)
                .map(|(a, b)| a.add(b))
                .collect(),
            has_deriv: self.has_deriv || other.has_deriv,
        }
    }

    fn neg(&self) -> Value {
        Value {
            scalar: self.scalar.neg(),
            vector: self.vector.iter().map(Poly::neg).collect(),
            has_deriv: self.has_deriv,
        }
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    n: usize,
    src_len: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next_offset(&self) -> usize {
        self.peek().map(|s| s.offset).unwrap_or(self.src_len)
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let offset = self.next_offset();
        match self.bump() {
            Some(s) if s.tok == tok => Ok(()),
            _ => Err(Error::Parse {
                offset,
                message: format!("expected {what}"),
            }),
        }
    }

    fn check_index(&self, idx: usize, offset: usize) -> Result<usize> {
        if idx == 0 || idx > self.n {
            return Err(Error::Parse {
                offset,
                message: format!("index {idx} out of range 1..={}", self.n),
            });
        }
        Ok(idx - 1)
    }

    // expr := term (('+'|'-') term)*  with unary minus allowed before terms
    fn expr(&mut self) -> Result<Value> {
        let mut negate = false;
        while let Some(s) = self.peek() {
            match s.tok {
                Tok::Minus => {
                    negate = !negate;
                    self.bump();
                }
                Tok::Plus => {
                    self.bump();
                }
                _ => break,
            }
        }
        let first = self.term()?;
        let mut acc = if negate { first.neg() } else { first };
        while let Some(s) = self.peek() {
            let negate = match s.tok {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.bump();
            let t = self.term()?;
            acc = acc.add(&if negate { t.neg() } else { t });
        }
        Ok(acc)
    }

    // term := factor ('*' factor)*; at most one derivation per product
    fn term(&mut self) -> Result<Value> {
        let mut acc = self.factor()?;
        while matches!(self.peek().map(|s| &s.tok), Some(Tok::Star)) {
            self.bump();
            let offset = self.next_offset();
            let rhs = self.factor()?;
            acc = self.mul_values(acc, rhs, offset)?;
        }
        Ok(acc)
    }

    fn mul_values(&self, lhs: Value, rhs: Value, offset: usize) -> Result<Value> {
        match (lhs.has_deriv, rhs.has_deriv) {
            (true, true) => Err(Error::Parse {
                offset,
                message: "term carries more than one derivation symbol".into(),
            }),
            (false, false) => Ok(Value::scalar(self.n, lhs.scalar.mul(&rhs.scalar))),
            (true, false) => Ok(Value {
                scalar: lhs.scalar.mul(&rhs.scalar),
                vector: lhs.vector.iter().map(|p| p.mul(&rhs.scalar)).collect(),
                has_deriv: true,
            }),
            (false, true) => Ok(Value {
                scalar: lhs.scalar.mul(&rhs.scalar),
                vector: rhs.vector.iter().map(|p| p.mul(&lhs.scalar)).collect(),
                has_deriv: true,
            }),
        }
    }

    // factor := atom ('^' uint)*
    fn factor(&mut self) -> Result<Value> {
        let mut base = self.atom()?;
        while matches!(self.peek().map(|s| &s.tok), Some(Tok::Caret)) {
            self.bump();
            let offset = self.next_offset();
            let exponent = match self.bump() {
                Some(Spanned {
                    tok: Tok::Int(e), ..
                }) => e,
                _ => {
                    return Err(Error::Parse {
                        offset,
                        message: "expected a non-negative integer exponent after '^'".into(),
                    })
                }
            };
            if base.has_deriv {
                return Err(Error::Parse {
                    offset,
                    message: "powers apply to scalars only, not derivation symbols".into(),
                });
            }
            let e = u32::try_from(exponent).map_err(|_| Error::Parse {
                offset,
                message: "exponent out of range".into(),
            })?;
            base = Value::scalar(self.n, base.scalar.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Value> {
        let offset = self.next_offset();
        match self.bump().map(|s| s.tok) {
            Some(Tok::Int(v)) => {
                let numer = Rat::from_integer(v.into());
                // rational := int ('/' uint)?
                if matches!(self.peek().map(|s| &s.tok), Some(Tok::Slash)) {
                    self.bump();
                    let doffset = self.next_offset();
                    match self.bump() {
                        Some(Spanned {
                            tok: Tok::Int(d), ..
                        }) => {
                            if d == 0 {
                                return Err(Error::Parse {
                                    offset: doffset,
                                    message: "zero denominator".into(),
                                });
                            }
                            Ok(Value::scalar(
                                self.n,
                                Poly::constant(self.n, numer / Rat::from_integer(d.into())),
                            ))
                        }
                        _ => Err(Error::Parse {
                            offset: doffset,
                            message: "expected a positive integer denominator".into(),
                        }),
                    }
                } else {
                    Ok(Value::scalar(self.n, Poly::constant(self.n, numer)))
                }
            }
            Some(Tok::Var(idx)) => {
                let j = self.check_index(idx, offset)?;
                Ok(Value::scalar(self.n, Poly::var(self.n, j)))
            }
            Some(Tok::Deriv(idx)) => {
                let j = self.check_index(idx, offset)?;
                Ok(Value::deriv(self.n, j))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Minus) => {
                // unary minus inside a parenthesized or nested position
                let inner = self.factor()?;
                Ok(inner.neg())
            }
            _ => Err(Error::Parse {
                offset,
                message: "expected a rational, variable, derivation, or '('".into(),
            }),
        }
    }
}

/// Parse a vector-field expression in `n` variables.
pub fn parse_field(src: &str, n: usize) -> Result<PolyVectorField> {
    let toks = lex(src)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        n,
        src_len: src.len(),
        _src: src,
    };
    let value = parser.expr()?;
    if parser.pos < parser.toks.len() {
        return Err(Error::Parse {
            offset: parser.next_offset(),
            message: "unexpected trailing input".into(),
        });
    }
    if !value.has_deriv {
        return Err(Error::Parse {
            offset: 0,
            message: "term carries no derivation symbol (expected exactly one)".into(),
        });
    }
    if !value.scalar.is_zero() {
        return Err(Error::Parse {
            offset: 0,
            message: "expression has a scalar-only term (each term needs a derivation)".into(),
        });
    }
    Ok(PolyVectorField::new(value.vector))
}

fn render_rat(c: &Rat) -> String {
    if c.is_integer() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn render_monomial(alpha: &MultiIndex) -> Vec<String> {
    let mut parts = Vec::new();
    for (i, &e) in alpha.exponents().iter().enumerate() {
        if e == 1 {
            parts.push(format!("x{}", i + 1));
        } else if e > 1 {
            parts.push(format!("x{}^{e}", i + 1));
        }
    }
    parts
}

/// Pretty-print a vector field in the DSL; the output re-parses to the
/// identical field.
pub fn render_field(field: &PolyVectorField) -> String {
    let mut pieces: Vec<(bool, String)> = Vec::new(); // (negative, body)
    for (k, comp) in field.components().iter().enumerate() {
        for (alpha, c) in comp.terms() {
            let neg = c.is_negative();
            let abs = c.abs();
            let mut factors = Vec::new();
            if !abs.is_one() || alpha.total_degree() == 0 {
                factors.push(render_rat(&abs));
            }
            factors.extend(render_monomial(alpha));
            factors.push(format!("d{}", k + 1));
            pieces.push((neg, factors.join("*")));
        }
    }
    if pieces.is_empty() {
        return "0*d1".into();
    }
    let mut out = String::new();
    for (i, (neg, body)) in pieces.iter().enumerate() {
        if i == 0 {
            if *neg {
                out.push('-');
            }
        } else {
            out.push_str(if *neg { " - " } else { " + " });
        }
        out.push_str(body);
    }
    out
}

/// The JSON frame document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrameDoc {
    #[serde(rename = "type")]
    carnot_type: Vec<usize>,
    fields: Vec<String>,
    jet_order: Option<u32>,
    samples: Option<SampleSpec>,
    flow: Option<FlowSpec>,
}

/// Sample-box specification for the numeric harness.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    /// Half-width of the sampling box (default 1/4).
    pub half: f64,
    /// Number of sample points.
    pub count: usize,
}

/// Integrator overrides.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub steps_per_unit: Option<u32>,
    pub guard_radius: Option<f64>,
}

/// A parsed frame document: the frame plus harness options.
#[derive(Debug, Clone)]
pub struct FrameDoc {
    pub frame: Frame,
    pub jet_order: Option<u32>,
    pub samples: Option<SampleSpec>,
    pub flow: Option<FlowSpec>,
}

/// Parse the UTF-8 JSON frame document.
pub fn parse_frame_doc(src: &str) -> Result<FrameDoc> {
    let raw: RawFrameDoc = serde_json::from_str(src).map_err(|e| Error::Document {
        path: "$".into(),
        message: e.to_string(),
    })?;
    let ctype = CarnotType::new(raw.carnot_type).map_err(|e| Error::Document {
        path: "$.type".into(),
        message: e.to_string(),
    })?;
    let w = ctype.weights();
    let n = w.n();
    if raw.fields.len() != n {
        return Err(Error::Document {
            path: "$.fields".into(),
            message: format!("expected {n} fields for this type, got {}", raw.fields.len()),
        });
    }
    let mut fields = Vec::with_capacity(n);
    for (i, text) in raw.fields.iter().enumerate() {
        let f = parse_field(text, n).map_err(|e| Error::Document {
            path: format!("$.fields[{i}]"),
            message: e.to_string(),
        })?;
        fields.push(f);
    }
    let frame = Frame::new(w, fields)?;
    if let Some(jet) = raw.jet_order {
        if jet == 0 {
            return Err(Error::Document {
                path: "$.jet_order".into(),
                message: "jet order must be positive".into(),
            });
        }
    }
    if let Some(s) = &raw.samples {
        if !(s.half > 0.0) || s.count == 0 {
            return Err(Error::Document {
                path: "$.samples".into(),
                message: "half-width must be positive and count nonzero".into(),
            });
        }
    }
    if let Some(f) = &raw.flow {
        if let Some(steps) = f.steps_per_unit {
            if steps < 16 {
                return Err(Error::Document {
                    path: "$.flow.steps_per_unit".into(),
                    message: "step count below the minimum of 16".into(),
                });
            }
        }
        if let Some(r) = f.guard_radius {
            if !(r > 0.0) {
                return Err(Error::Document {
                    path: "$.flow.guard_radius".into(),
                    message: "guard radius must be positive".into(),
                });
            }
        }
    }
    Ok(FrameDoc {
        frame,
        jet_order: raw.jet_order,
        samples: raw.samples,
        flow: raw.flow,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::poly::{rat, ratio};
    use proptest::prelude::*;

    #[test]
    fn single_derivation() {
        let f = parse_field("d1", 3).unwrap();
        assert_eq!(f, PolyVectorField::coordinate(3, 0));
    }

    #[test]
    fn symmetric_heisenberg_first_field() {
        let f = parse_field("d1 - 1/2*x2*d3", 3).unwrap();
        assert_eq!(&f, &fixtures::symmetric_heisenberg().fields()[0]);
    }

    #[test]
    fn powers_and_precedence() {
        // '^' binds tighter than '*': 2*x1^2*d2 = 2·(x1²)·∂₂
        let f = parse_field("2*x1^2*d2", 2).unwrap();
        let expected = PolyVectorField::new(vec![
            Poly::zero(2),
            Poly::var(2, 0).pow(2).scale(&rat(2)),
        ]);
        assert_eq!(f, expected);
    }

    #[test]
    fn unary_minus_and_parens() {
        let f = parse_field("-(x1 + 1/3)*d2 + d1", 2).unwrap();
        let expected = PolyVectorField::new(vec![
            Poly::one(2),
            Poly::var(2, 0).add(&Poly::constant(2, ratio(1, 3))).neg(),
        ]);
        assert_eq!(f, expected);
    }

    #[test]
    fn deriv_power_rejected() {
        let err = parse_field("x1*x1*d2 + d1^2", 2).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("scalars only"), "{msg}");
    }

    #[test]
    fn zero_or_double_deriv_rejected() {
        assert!(parse_field("x1*x2", 2).is_err());
        assert!(parse_field("d1*d2", 2).is_err());
    }

    #[test]
    fn decimal_rejected_with_hint() {
        let err = parse_field("0.5*d1", 1).unwrap_err();
        assert!(err.to_string().contains("use p/q"));
    }

    #[test]
    fn index_bounds_checked() {
        assert!(parse_field("d4", 3).is_err());
        assert!(parse_field("x0*d1", 3).is_err());
    }

    #[test]
    fn byte_offsets_reported() {
        match parse_field("d1 + %", 2).unwrap_err() {
            Error::Parse { offset, .. } => assert_eq!(offset, 5),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn division_by_zero_denominator() {
        assert!(parse_field("1/0*d1", 1).is_err());
    }

    #[test]
    fn render_round_trips_fixtures() {
        for frame in [
            fixtures::symmetric_heisenberg(),
            fixtures::polarized_heisenberg(),
            fixtures::engel(),
        ] {
            for f in frame.fields() {
                let text = render_field(f);
                let back = parse_field(&text, frame.weights().n()).unwrap();
                assert_eq!(&back, f, "render was {text}");
            }
        }
    }

    #[test]
    fn frame_doc_heisenberg() {
        let doc = r#"{
            "type": [2, 3],
            "fields": ["d1 - 1/2*x2*d3", "d2 + 1/2*x1*d3", "d3"],
            "jet_order": 5
        }"#;
        let parsed = parse_frame_doc(doc).unwrap();
        assert_eq!(parsed.frame.weights().weights(), &[1, 1, 2]);
        assert_eq!(parsed.frame.fields(), fixtures::symmetric_heisenberg().fields());
        assert_eq!(parsed.jet_order, Some(5));
    }

    #[test]
    fn frame_doc_bad_type() {
        let doc = r#"{"type": [3, 2], "fields": ["d1", "d2", "d3"]}"#;
        let err = parse_frame_doc(doc).unwrap_err();
        assert!(err.to_string().contains("strictly increasing"), "{err}");
    }

    #[test]
    fn frame_doc_count_mismatch() {
        let doc = r#"{"type": [2, 3], "fields": ["d1", "d2"]}"#;
        let err = parse_frame_doc(doc).unwrap_err();
        assert!(matches!(err, Error::Document { ref path, .. } if path == "$.fields"));
    }

    fn rat_strategy() -> impl Strategy<Value = Rat> {
        (-8i64..=8, 1i64..=4).prop_map(|(p, q)| ratio(p, q))
    }

    fn poly_strategy(n: usize) -> impl Strategy<Value = Poly> {
        proptest::collection::vec(
            (proptest::collection::vec(0u32..3, n), rat_strategy()),
            0..4,
        )
        .prop_map(move |terms| {
            let mut p = Poly::zero(n);
            for (exps, c) in terms {
                p.add_term(MultiIndex::new(exps), c);
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn render_parse_round_trip(
            comps in proptest::collection::vec(poly_strategy(3), 3..=3)
        ) {
            let field = PolyVectorField::new(comps);
            let text = render_field(&field);
            let back = parse_field(&text, 3).unwrap();
            // the "0*d1" placeholder for the zero field parses to zero
            prop_assert_eq!(back, field);
        }

        #[test]
        fn parser_totality(src in "[ x d 0-9 + * / ^ ( ) .-]{0,40}") {
            // arbitrary near-grammar strings must never panic
            let _ = parse_field(&src, 3);
        }
    }
}
