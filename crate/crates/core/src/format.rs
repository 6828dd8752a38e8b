//! Plain-text formats: state-space models, rational models, interpolation
//! data, filter specifications, signals, and a matrix-market importer.
//!
//! Every text format is line oriented, ignores blank lines and treats `#` as
//! the start of a comment. Complex numbers are written as `re im` pairs and
//! floats use the shortest representation that reads back exactly.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimate::SignalSeries;
use crate::filter::{make_caratheodory, make_circle_filter, make_point_filter, InputToStateFilter, InterpolationPoint, Spacing};
use crate::interp::InterpolationData;
use crate::numkit::{Complex64, ComplexMatrix, Polynomial};
use crate::realize::{Domain, RationalTransferFunction, StateSpaceModel};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-empty lines with comments removed, tokenized, with 1-based line numbers.
fn content_lines(text: &str, comment: char) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split(comment).next().unwrap_or("");
            let tokens: Vec<&str> = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .collect();
            (!tokens.is_empty()).then_some((i + 1, tokens))
        })
        .collect()
}

fn parse_f64(token: &str, line: usize) -> Result<f64> {
    let x: f64 = token.parse().map_err(|_| parse_err(line, format!("'{token}' is not a number")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("'{token}' is not finite")));
    }
    Ok(x)
}

fn parse_pairs(tokens: &[&str], count: usize, line: usize) -> Result<Vec<Complex64>> {
    if tokens.len() != 2 * count {
        return Err(parse_err(
            line,
            format!(
                "expected {count} complex entries ({} numbers), found {} numbers",
                2 * count,
                tokens.len()
            ),
        ));
    }
    tokens
        .chunks(2)
        .map(|p| Ok(Complex64::new(parse_f64(p[0], line)?, parse_f64(p[1], line)?)))
        .collect()
}

fn write_f64(out: &mut String, x: f64) {
    use fmt::Write;
    // Debug is the shortest round-trip form and switches to exponents at the extremes
    let _ = write!(out, "{x:?}");
}

fn write_row(out: &mut String, row: impl IntoIterator<Item = Complex64>) {
    let mut first = true;
    for z in row {
        if !first {
            out.push(' ');
        }
        first = false;
        write_f64(out, z.re);
        out.push(' ');
        write_f64(out, z.im);
    }
    out.push('\n');
}

struct Cursor<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            lines: content_lines(text, '#'),
            pos: 0,
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let last = self.lines.last().map_or(0, |l| l.0);
        let item = self
            .lines
            .get(self.pos)
            .cloned()
            .ok_or_else(|| parse_err(last, format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(item)
    }

    fn finish(&self) -> Result<()> {
        match self.lines.get(self.pos) {
            Some((line, _)) => Err(parse_err(*line, "unexpected trailing data")),
            None => Ok(()),
        }
    }

    fn header(&mut self, tag: &str, fields: usize) -> Result<(usize, Vec<&'a str>)> {
        let (line, tokens) = self.next(&format!("'{tag}' header"))?;
        if tokens[0] != tag || tokens.len() != fields + 1 {
            return Err(parse_err(line, format!("expected header '{tag}' with {fields} fields")));
        }
        Ok((line, tokens[1..].to_vec()))
    }

    fn matrix(&mut self, rows: usize, cols: usize, what: &str) -> Result<ComplexMatrix> {
        let mut m = ComplexMatrix::zeros(rows, cols);
        for i in 0..rows {
            let (line, tokens) = self.next(what)?;
            for (j, z) in parse_pairs(&tokens, cols, line)?.into_iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }
}

fn parse_usize(token: &str, line: usize) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("'{token}' is not a nonnegative integer")))
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(Domain::Discrete),
            "continuous" => Ok(Domain::Continuous),
            _ => Err(Error::InvalidArgument(format!("unknown domain '{s}'"))),
        }
    }
}

/// ```text
/// sss <order> <discrete|continuous>
/// <order rows of A>
/// <order rows of B, one entry each>
/// <one row of C>
/// <D>
/// ```
pub fn parse_model(text: &str) -> Result<StateSpaceModel> {
    let mut cur = Cursor::new(text);
    let (line, fields) = cur.header("sss", 2)?;
    let order = parse_usize(fields[0], line)?;
    let domain: Domain = fields[1]
        .parse()
        .map_err(|_| parse_err(line, format!("unknown domain '{}'", fields[1])))?;
    let a = cur.matrix(order, order, "a row of A")?;
    let b = cur.matrix(order, 1, "an entry of B")?;
    let c = if order > 0 {
        cur.matrix(1, order, "the row C")?
    } else {
        ComplexMatrix::zeros(1, 0)
    };
    let d = cur.matrix(1, 1, "D")?[(0, 0)];
    cur.finish()?;
    StateSpaceModel::new(a, b, c, d, domain)
}

pub fn write_model(model: &StateSpaceModel) -> String {
    let mut out = format!("sss {} {}\n", model.order(), model.domain().as_str());
    out.push_str("# A\n");
    for row in model.a().row_iter() {
        write_row(&mut out, row.iter().copied());
    }
    out.push_str("# B\n");
    for z in model.b().iter() {
        write_row(&mut out, [*z]);
    }
    if model.order() > 0 {
        out.push_str("# C\n");
        write_row(&mut out, model.c().iter().copied());
    }
    out.push_str("# D\n");
    write_row(&mut out, [model.d()]);
    out
}

/// ```text
/// rtf <deg num> <deg den>
/// <numerator coefficients, ascending powers of z>
/// <denominator coefficients>
/// ```
pub fn parse_rational(text: &str) -> Result<RationalTransferFunction> {
    let mut cur = Cursor::new(text);
    let (line, fields) = cur.header("rtf", 2)?;
    let dn = parse_usize(fields[0], line)?;
    let dd = parse_usize(fields[1], line)?;
    let num = cur.matrix(1, dn + 1, "numerator coefficients")?;
    let den = cur.matrix(1, dd + 1, "denominator coefficients")?;
    cur.finish()?;
    RationalTransferFunction::new(
        Polynomial::new(num.iter().copied().collect())?,
        Polynomial::new(den.iter().copied().collect())?,
    )
}

pub fn write_rational(w: &RationalTransferFunction) -> String {
    let mut out = format!("rtf {} {}\n", w.num().degree(), w.den().degree());
    out.push_str("# numerator\n");
    write_row(&mut out, w.num().coeffs().iter().copied());
    out.push_str("# denominator\n");
    write_row(&mut out, w.den().coeffs().iter().copied());
    out
}

/// ```text
/// data <n>
/// <n rows of Σ>
/// <n rows of H, one entry each>
/// ```
pub fn parse_data(text: &str) -> Result<InterpolationData> {
    let mut cur = Cursor::new(text);
    let (line, fields) = cur.header("data", 1)?;
    let n = parse_usize(fields[0], line)?;
    let sigma = cur.matrix(n, n, "a row of Sigma")?;
    let markov = cur.matrix(n, 1, "an entry of H")?;
    cur.finish()?;
    InterpolationData::new(sigma, markov)
}

pub fn write_data(data: &InterpolationData) -> String {
    let mut out = format!("data {}\n", data.sigma().nrows());
    out.push_str("# Sigma\n");
    for row in data.sigma().row_iter() {
        write_row(&mut out, row.iter().copied());
    }
    out.push_str("# H\n");
    for z in data.markov().iter() {
        write_row(&mut out, [*z]);
    }
    out
}

/// ```text
/// matrix <rows> <cols>
/// <rows rows of entries>
/// ```
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut cur = Cursor::new(text);
    let (line, fields) = cur.header("matrix", 2)?;
    let rows = parse_usize(fields[0], line)?;
    let cols = parse_usize(fields[1], line)?;
    let m = cur.matrix(rows, cols, "a matrix row")?;
    cur.finish()?;
    Ok(m)
}

pub fn write_matrix(m: &ComplexMatrix) -> String {
    let mut out = format!("matrix {} {}\n", m.nrows(), m.ncols());
    for row in m.row_iter() {
        write_row(&mut out, row.iter().copied());
    }
    out
}

/// One real value per line, or `re im` per line when `two_column` is set.
pub fn parse_signal(text: &str, two_column: bool, sample_period: f64) -> Result<SignalSeries> {
    let width = if two_column { 2 } else { 1 };
    let mut samples = Vec::new();
    for (line, tokens) in content_lines(text, '#') {
        if tokens.len() != width {
            return Err(parse_err(line, format!("expected {width} value(s), found {}", tokens.len())));
        }
        let re = parse_f64(tokens[0], line)?;
        let im = if two_column { parse_f64(tokens[1], line)? } else { 0.0 };
        samples.push(Complex64::new(re, im));
    }
    SignalSeries::new(samples, sample_period)
}

/// Point spacing on a circle filter; the sample period for `Log` is supplied at build time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleSpacing {
    Even,
    Log { f_lo: f64, f_hi: f64 },
}

/// Textual description of an input-to-state filter.
///
/// Inline forms:
///
/// ```text
/// caratheodory[:n]
/// circle:<radius>[:n][:even | :log:<f_lo>:<f_hi>][:nonconj]
/// points:<re>,<im>[,<mult>];<re>,<im>[,<mult>];...
/// ```
///
/// The file form is a list of `key = value` lines with keys `kind`, `n`,
/// `radius`, `spacing`, `f_lo`, `f_hi`, `conjugate` and repeated
/// `point = <re> <im> [mult]`.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterSpec {
    Caratheodory {
        n: Option<usize>,
    },
    Circle {
        radius: f64,
        n: Option<usize>,
        spacing: CircleSpacing,
        conjugate_closed: bool,
    },
    Points(Vec<InterpolationPoint>),
}

impl FilterSpec {
    /// Number of states if the spec fixes it.
    pub fn order(&self) -> Option<usize> {
        match self {
            FilterSpec::Caratheodory { n } | FilterSpec::Circle { n, .. } => *n,
            FilterSpec::Points(points) => Some(points.iter().map(|p| p.multiplicity).sum()),
        }
    }

    /// Builds the filter, using `default_n` when the spec leaves the order open.
    pub fn build(&self, default_n: Option<usize>, period: Option<f64>) -> Result<InputToStateFilter> {
        let n = || {
            self.order()
                .or(default_n)
                .ok_or_else(|| Error::InvalidArgument(format!("filter '{self}' needs an order")))
        };
        match self {
            FilterSpec::Caratheodory { .. } => make_caratheodory(n()?),
            FilterSpec::Circle {
                radius,
                spacing,
                conjugate_closed,
                ..
            } => {
                let spacing = match *spacing {
                    CircleSpacing::Even => Spacing::Even,
                    CircleSpacing::Log { f_lo, f_hi } => {
                        let period =
                            period.ok_or_else(|| Error::InvalidArgument("log-spaced circle filter needs a sample period".into()))?;
                        Spacing::Log { f_lo, f_hi, period }
                    }
                };
                make_circle_filter(n()?, *radius, spacing, *conjugate_closed)
            }
            FilterSpec::Points(points) => make_point_filter(points),
        }
    }

    /// Accepts either form: text containing `=` or a newline is read as a file.
    pub fn parse(text: &str) -> Result<Self> {
        if text.contains('=') || text.contains('\n') {
            Self::parse_file(text)
        } else {
            text.trim().parse()
        }
    }

    pub fn parse_file(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut n = None;
        let mut radius = None;
        let mut spacing = None;
        let mut f_lo = None;
        let mut f_hi = None;
        let mut conjugate = true;
        let mut points = Vec::new();
        let mut last = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            last = line;
            let (key, value) = body.split_once('=').ok_or_else(|| parse_err(line, "expected 'key = value'"))?;
            let value = value.trim();
            match key.trim() {
                "kind" => kind = Some(value.to_string()),
                "n" => n = Some(parse_usize(value, line)?),
                "radius" => radius = Some(parse_f64(value, line)?),
                "spacing" => spacing = Some(value.to_string()),
                "f_lo" => f_lo = Some(parse_f64(value, line)?),
                "f_hi" => f_hi = Some(parse_f64(value, line)?),
                "conjugate" => {
                    conjugate = value
                        .parse()
                        .map_err(|_| parse_err(line, format!("'{value}' is not true or false")))?;
                }
                "point" => {
                    let tokens: Vec<&str> = value.split_whitespace().collect();
                    if tokens.len() != 2 && tokens.len() != 3 {
                        return Err(parse_err(line, "point needs 're im [multiplicity]'"));
                    }
                    let point = Complex64::new(parse_f64(tokens[0], line)?, parse_f64(tokens[1], line)?);
                    let multiplicity = tokens.get(2).map(|t| parse_usize(t, line)).transpose()?.unwrap_or(1);
                    points.push(InterpolationPoint { point, multiplicity });
                }
                other => return Err(parse_err(line, format!("unknown key '{other}'"))),
            }
        }
        let kind = kind.ok_or_else(|| parse_err(last, "missing 'kind'"))?;
        match kind.as_str() {
            "caratheodory" => Ok(FilterSpec::Caratheodory { n }),
            "circle" => {
                let radius = radius.ok_or_else(|| parse_err(last, "circle filter needs 'radius'"))?;
                let spacing = match spacing.as_deref().unwrap_or("even") {
                    "even" => CircleSpacing::Even,
                    "log" => CircleSpacing::Log {
                        f_lo: f_lo.ok_or_else(|| parse_err(last, "log spacing needs 'f_lo'"))?,
                        f_hi: f_hi.ok_or_else(|| parse_err(last, "log spacing needs 'f_hi'"))?,
                    },
                    other => return Err(parse_err(last, format!("unknown spacing '{other}'"))),
                };
                Ok(FilterSpec::Circle {
                    radius,
                    n,
                    spacing,
                    conjugate_closed: conjugate,
                })
            }
            "points" => {
                if points.is_empty() {
                    return Err(parse_err(last, "points filter needs at least one 'point'"));
                }
                Ok(FilterSpec::Points(points))
            }
            other => Err(parse_err(last, format!("unknown filter kind '{other}'"))),
        }
    }

    pub fn to_file_text(&self) -> String {
        let mut out = String::new();
        match self {
            FilterSpec::Caratheodory { n } => {
                out.push_str("kind = caratheodory\n");
                if let Some(n) = n {
                    out.push_str(&format!("n = {n}\n"));
                }
            }
            FilterSpec::Circle {
                radius,
                n,
                spacing,
                conjugate_closed,
            } => {
                out.push_str(&format!("kind = circle\nradius = {radius:?}\n"));
                if let Some(n) = n {
                    out.push_str(&format!("n = {n}\n"));
                }
                match spacing {
                    CircleSpacing::Even => out.push_str("spacing = even\n"),
                    CircleSpacing::Log { f_lo, f_hi } => out.push_str(&format!("spacing = log\nf_lo = {f_lo:?}\nf_hi = {f_hi:?}\n")),
                }
                out.push_str(&format!("conjugate = {conjugate_closed}\n"));
            }
            FilterSpec::Points(points) => {
                out.push_str("kind = points\n");
                for p in points {
                    out.push_str(&format!("point = {:?} {:?} {}\n", p.point.re, p.point.im, p.multiplicity));
                }
            }
        }
        out
    }
}

impl FromStr for FilterSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidArgument(format!("filter '{s}': {msg}"));
        let num = |t: &str| -> Result<f64> {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(format!("'{t}' is not a number")))
        };
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "caratheodory" | "cara" => {
                let n = if rest.is_empty() {
                    None
                } else {
                    Some(rest.parse().map_err(|_| bad(format!("'{rest}' is not an order")))?)
                };
                Ok(FilterSpec::Caratheodory { n })
            }
            "circle" => {
                let mut tokens = rest.split(':').filter(|t| !t.is_empty()).peekable();
                let radius = num(tokens.next().ok_or_else(|| bad("missing radius".into()))?)?;
                let n = match tokens.peek().and_then(|t| t.parse::<usize>().ok()) {
                    Some(n) => {
                        tokens.next();
                        Some(n)
                    }
                    None => None,
                };
                let mut spacing = CircleSpacing::Even;
                let mut conjugate_closed = true;
                while let Some(t) = tokens.next() {
                    match t {
                        "even" => spacing = CircleSpacing::Even,
                        "log" => {
                            let f_lo = num(tokens.next().ok_or_else(|| bad("log needs f_lo and f_hi".into()))?)?;
                            let f_hi = num(tokens.next().ok_or_else(|| bad("log needs f_lo and f_hi".into()))?)?;
                            spacing = CircleSpacing::Log { f_lo, f_hi };
                        }
                        "nonconj" => conjugate_closed = false,
                        other => return Err(bad(format!("unexpected '{other}'"))),
                    }
                }
                Ok(FilterSpec::Circle {
                    radius,
                    n,
                    spacing,
                    conjugate_closed,
                })
            }
            "points" => {
                let mut points = Vec::new();
                for item in rest.split(';').filter(|t| !t.trim().is_empty()) {
                    let parts: Vec<&str> = item.split(',').map(str::trim).collect();
                    if parts.len() != 2 && parts.len() != 3 {
                        return Err(bad(format!("point '{item}' must be re,im[,mult]")));
                    }
                    let multiplicity = match parts.get(2) {
                        Some(m) => m.parse().map_err(|_| bad(format!("'{m}' is not a multiplicity")))?,
                        None => 1,
                    };
                    points.push(InterpolationPoint {
                        point: Complex64::new(num(parts[0])?, num(parts[1])?),
                        multiplicity,
                    });
                }
                if points.is_empty() {
                    return Err(bad("no points given".into()));
                }
                Ok(FilterSpec::Points(points))
            }
            _ => Err(bad(format!("unknown filter kind '{kind}'"))),
        }
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterSpec::Caratheodory { n: None } => write!(f, "caratheodory"),
            FilterSpec::Caratheodory { n: Some(n) } => write!(f, "caratheodory:{n}"),
            FilterSpec::Circle {
                radius,
                n,
                spacing,
                conjugate_closed,
            } => {
                write!(f, "circle:{radius:?}")?;
                if let Some(n) = n {
                    write!(f, ":{n}")?;
                }
                match spacing {
                    CircleSpacing::Even => write!(f, ":even")?,
                    CircleSpacing::Log { f_lo, f_hi } => write!(f, ":log:{f_lo:?}:{f_hi:?}")?,
                }
                if !conjugate_closed {
                    write!(f, ":nonconj")?;
                }
                Ok(())
            }
            FilterSpec::Points(points) => {
                write!(f, "points:")?;
                for (i, p) in points.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{:?},{:?}", p.point.re, p.point.im)?;
                    if p.multiplicity != 1 {
                        write!(f, ",{}", p.multiplicity)?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Reads one matrix in matrix-market exchange format (`coordinate` or
/// `array`; `real`, `integer` or `complex`; `general`, `symmetric`,
/// `skew-symmetric` or `hermitian`).
pub fn parse_matrix_market(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty matrix-market file"))?;
    let words: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err(1, "missing '%%MatrixMarket matrix' banner"));
    }
    let coordinate = match words[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(parse_err(1, format!("unsupported layout '{other}'"))),
    };
    let complex = match words[3].as_str() {
        "real" | "integer" => false,
        "complex" => true,
        other => return Err(parse_err(1, format!("unsupported field '{other}'"))),
    };
    let symmetry = words[4].clone();
    if !matches!(symmetry.as_str(), "general" | "symmetric" | "skew-symmetric" | "hermitian") {
        return Err(parse_err(1, format!("unsupported symmetry '{symmetry}'")));
    }
    let mut body = lines.filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('%')).then_some((i + 1, l.split_whitespace().collect::<Vec<_>>()))
    });
    let (line, size) = body.next().ok_or_else(|| parse_err(1, "missing size line"))?;
    let want = if coordinate { 3 } else { 2 };
    if size.len() != want {
        return Err(parse_err(line, "malformed size line"));
    }
    let rows = parse_usize(size[0], line)?;
    let cols = parse_usize(size[1], line)?;
    let width = if complex { 2 } else { 1 };
    let value = |tokens: &[&str], line: usize| -> Result<Complex64> {
        let re = parse_f64(tokens[0], line)?;
        let im = if complex { parse_f64(tokens[1], line)? } else { 0.0 };
        Ok(Complex64::new(re, im))
    };
    let mut m = ComplexMatrix::zeros(rows, cols);
    let mut place = |i: usize, j: usize, v: Complex64| {
        m[(i, j)] = v;
        if i != j {
            match symmetry.as_str() {
                "symmetric" => m[(j, i)] = v,
                "skew-symmetric" => m[(j, i)] = -v,
                "hermitian" => m[(j, i)] = v.conj(),
                _ => {}
            }
        }
    };
    if coordinate {
        let nnz = parse_usize(size[2], line)?;
        for _ in 0..nnz {
            let (line, t) = body.next().ok_or_else(|| parse_err(line, "fewer entries than declared"))?;
            if t.len() != 2 + width {
                return Err(parse_err(line, "malformed entry"));
            }
            let i = parse_usize(t[0], line)?;
            let j = parse_usize(t[1], line)?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(parse_err(line, format!("index ({i}, {j}) out of range")));
            }
            place(i - 1, j - 1, value(&t[2..], line)?);
        }
    } else {
        let general = symmetry == "general";
        for j in 0..cols {
            let start = if general {
                0
            } else if symmetry == "skew-symmetric" {
                j + 1
            } else {
                j
            };
            for i in start..rows {
                let (line, t) = body.next().ok_or_else(|| parse_err(line, "fewer entries than declared"))?;
                if t.len() != width {
                    return Err(parse_err(line, "malformed entry"));
                }
                place(i, j, value(&t, line)?);
            }
        }
    }
    if let Some((line, _)) = body.next() {
        return Err(parse_err(line, "more entries than declared"));
    }
    Ok(m)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Loads a continuous-time model from `A.mtx`, `B.mtx`, `C.mtx` and an
/// optional `D.mtx` in `dir`, keeping input column `input` of `B` and output
/// row `output` of `C`.
pub fn import_matrix_market(dir: &Path, input: usize, output: usize) -> Result<StateSpaceModel> {
    let load = |name: &str| -> Result<ComplexMatrix> {
        let path = dir.join(name);
        parse_matrix_market(&read_text(&path)?).map_err(|e| match e {
            Error::Parse { line, msg } => Error::Parse {
                line,
                msg: format!("{}: {msg}", path.display()),
            },
            other => other,
        })
    };
    let a = load("A.mtx")?;
    let b = load("B.mtx")?;
    let c = load("C.mtx")?;
    let d = if dir.join("D.mtx").exists() { Some(load("D.mtx")?) } else { None };
    if input >= b.ncols() || output >= c.nrows() {
        return Err(Error::Dimension(format!(
            "B has {} inputs and C has {} outputs",
            b.ncols(),
            c.nrows()
        )));
    }
    let d = match d {
        Some(d) if output < d.nrows() && input < d.ncols() => d[(output, input)],
        Some(_) => return Err(Error::Dimension("D is smaller than B and C imply".into())),
        None => Complex64::default(),
    };
    StateSpaceModel::new(
        a,
        b.columns(input, 1).into_owned(),
        c.rows(output, 1).into_owned(),
        d,
        Domain::Continuous,
    )
}

/// Reads a model file, or a matrix-market directory when `path` is a directory.
pub fn load_model(path: &Path) -> Result<StateSpaceModel> {
    if path.is_dir() {
        import_matrix_market(path, 0, 0)
    } else {
        parse_model(&read_text(path)?)
    }
}
