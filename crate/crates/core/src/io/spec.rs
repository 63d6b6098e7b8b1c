//! Parser for the rule-spec mini-language.
//!
//! ```text
//! ed | wta | wts:a=<v|inf>
//! interval:[a,b];[a,b];…        (inf allowed as the last upper bound; empty is ED)
//! interval:steps=<K>            ((k−1, k) for k = 1..K)
//! geometric:lambda=<v>[,unchecked]
//! proportional:<v>,<v>,…
//! sp:<fn>                       fn = arithmetic | identity | zero | linear=<λ>
//!                                    | shift=<c> | cap=<a|inf> | pwl=<x:y,…>
//! param:hyperarithmetic | param:list=<fn>|<fn>|…
//! cx:<name>[=<i>,<j>]
//! ```

use std::fmt;

use thiserror::Error;

use crate::rules::{
    CounterexampleRule, IntervalList, MonotoneFn, ParametricFamily, PiecewiseLinear, RuleError,
    RuleSpec,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let found = if self.found.is_empty() {
            "end of input".to_string()
        } else {
            format!("`{}`", self.found)
        };
        write!(
            f,
            "rule spec, column {}: expected {}, found {found}",
            self.position + 1,
            self.expected.join(" or ")
        )
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn error<S: ToString>(&self, expected: &[S]) -> ParseError {
        let found: String = self.rest().chars().take(12).collect();
        ParseError {
            position: self.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn invalid(&self, at: usize, err: RuleError) -> ParseError {
        ParseError {
            position: at,
            expected: vec![format!("valid parameters ({err})")],
            found: self.text[at..].to_string(),
        }
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), ParseError> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.error(&[format!("`{lit}`")]))
        }
    }

    fn word(&mut self) -> &'a str {
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-' || c == '_'))
            .unwrap_or(self.rest().len());
        let w = &self.rest()[..len];
        self.pos += len;
        w
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')))
            .unwrap_or(self.rest().len());
        let token = &self.rest()[..len];
        match token.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos += len;
                Ok(v)
            }
            _ => Err(self.error(&["a number"])),
        }
    }

    fn number_or_inf(&mut self) -> Result<f64, ParseError> {
        if self.eat("inf") {
            Ok(f64::INFINITY)
        } else {
            self.number()
                .map_err(|_| self.error(&["a number", "`inf`"]))
        }
    }

    fn end(&self) -> Result<(), ParseError> {
        if self.rest().is_empty() {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }
}

/// Parses one rule spec; surrounding whitespace is ignored.
pub fn parse_rule_spec(text: &str) -> Result<RuleSpec, ParseError> {
    let mut c = Cursor {
        text: text.trim(),
        pos: 0,
    };
    let start = c.pos;
    let family = c.word();
    let rule = match family {
        "ed" => RuleSpec::Ed,
        "wta" => RuleSpec::Wta,
        "wts" => {
            c.expect(":")?;
            c.expect("a=")?;
            let at = c.pos;
            let a = c.number_or_inf()?;
            let rule = RuleSpec::Wts(a);
            rule.validate().map_err(|e| c.invalid(at, e))?;
            rule
        }
        "interval" => {
            c.expect(":")?;
            parse_interval(&mut c)?
        }
        "geometric" => {
            c.expect(":")?;
            c.expect("lambda=")?;
            let at = c.pos;
            let lambda = c.number()?;
            let allow_increasing = c.eat(",unchecked");
            let rule = RuleSpec::Geometric {
                lambda,
                allow_increasing,
            };
            rule.validate().map_err(|e| c.invalid(at, e))?;
            rule
        }
        "proportional" => {
            c.expect(":")?;
            let at = c.pos;
            let mut weights = vec![c.number()?];
            while c.eat(",") {
                weights.push(c.number()?);
            }
            RuleSpec::proportional(weights).map_err(|e| c.invalid(at, e))?
        }
        "sp" => {
            c.expect(":")?;
            let at = c.pos;
            let f = parse_fn(&mut c)?;
            let rule = RuleSpec::SingleParametric(f);
            rule.validate().map_err(|e| c.invalid(at, e))?;
            rule
        }
        "param" => {
            c.expect(":")?;
            let at = c.pos;
            let rule = match c.word() {
                "hyperarithmetic" => RuleSpec::hyperarithmetic(),
                "list" => {
                    c.expect("=")?;
                    let mut fs = vec![parse_fn(&mut c)?];
                    while c.eat("|") {
                        fs.push(parse_fn(&mut c)?);
                    }
                    RuleSpec::Parametric(ParametricFamily::Listed(fs))
                }
                _ => {
                    c.pos = at;
                    return Err(c.error(&["`hyperarithmetic`", "`list=`"]));
                }
            };
            rule.validate().map_err(|e| c.invalid(at, e))?;
            rule
        }
        "cx" => {
            c.expect(":")?;
            let at = c.pos;
            let body = c.rest();
            let cx: CounterexampleRule = body.parse().map_err(|e| match e {
                RuleError::UnknownCounterexample(_) => {
                    let mut names: Vec<String> = CounterexampleRule::NAMES
                        .iter()
                        .map(|n| format!("`{n}`"))
                        .collect();
                    names.push("`pair-favoritism=<i>,<j>`".into());
                    c.error(&names)
                }
                other => c.invalid(at, other),
            })?;
            c.pos = c.text.len();
            RuleSpec::Counterexample(cx)
        }
        _ => {
            c.pos = start;
            return Err(c.error(&[
                "`ed`",
                "`wta`",
                "`wts:`",
                "`interval:`",
                "`geometric:`",
                "`proportional:`",
                "`sp:`",
                "`param:`",
                "`cx:`",
            ]));
        }
    };
    c.end()?;
    Ok(rule)
}

fn parse_interval(c: &mut Cursor<'_>) -> Result<RuleSpec, ParseError> {
    let at = c.pos;
    if c.eat("steps=") {
        let k = c.number()?;
        if k.fract() != 0.0 || k < 1.0 {
            return Err(c.invalid(
                at,
                RuleError::InvalidRuleParams("step count must be a positive integer".into()),
            ));
        }
        return Ok(RuleSpec::Interval(IntervalList::unit_steps(k as usize)));
    }
    if c.rest().is_empty() {
        return Ok(RuleSpec::Interval(IntervalList::empty()));
    }
    let mut intervals = Vec::new();
    loop {
        c.expect("[")?;
        let a = c.number()?;
        c.expect(",")?;
        let b = c.number_or_inf()?;
        c.expect("]")?;
        intervals.push((a, b));
        if !c.eat(";") {
            break;
        }
    }
    IntervalList::new(intervals)
        .map(RuleSpec::Interval)
        .map_err(|e| c.invalid(at, e))
}

/// One monotone function.
fn parse_fn(c: &mut Cursor<'_>) -> Result<MonotoneFn, ParseError> {
    let at = c.pos;
    let f = match c.word() {
        "arithmetic" => MonotoneFn::Shift(1.0),
        "identity" => MonotoneFn::Identity,
        "zero" => MonotoneFn::Zero,
        "linear" => {
            c.expect("=")?;
            MonotoneFn::Linear(c.number()?)
        }
        "shift" => {
            c.expect("=")?;
            MonotoneFn::Shift(c.number()?)
        }
        "cap" => {
            c.expect("=")?;
            MonotoneFn::Cap(c.number_or_inf()?)
        }
        "pwl" => {
            c.expect("=")?;
            let mut points = Vec::new();
            loop {
                let x = c.number()?;
                c.expect(":")?;
                let y = c.number()?;
                points.push((x, y));
                if !c.eat(",") {
                    break;
                }
            }
            MonotoneFn::Piecewise(PiecewiseLinear::new(points).map_err(|e| c.invalid(at, e))?)
        }
        _ => {
            c.pos = at;
            return Err(c.error(&[
                "`arithmetic`",
                "`identity`",
                "`zero`",
                "`linear=`",
                "`shift=`",
                "`cap=`",
                "`pwl=`",
            ]));
        }
    };
    f.validate().map_err(|e| c.invalid(at, e))?;
    Ok(f)
}
