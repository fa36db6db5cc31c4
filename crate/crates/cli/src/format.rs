//! Line-oriented text interchange format.
//!
//! Every non-blank line that does not start with `#` is one record: a tag
//! followed by whitespace-separated fields. Rationals are written `p/q`
//! (a bare integer is accepted on input); faces are comma-separated vertex
//! ids.
//!
//! ```text
//! kind triangulation            # or `fan`
//! k 2                           # subdivision count of a result
//! seed 7                        # seed used for generic heights
//! v <id> <x1> ... <xn>          # vertex coordinates
//! f <id> <id> ...               # facet
//! h <id> <p/q>                  # height of a vertex
//! margin <face> <p/q>           # wall margin of a certificate
//! y <face> <p/q>                # wall multiplier of an irregularity witness
//! step <face> <id> <x1> ... <xn>  # stellar step: face, new vertex, point
//! move <face> <face>            # bistellar move A -> B
//! eps <stage> <p/q>             # epsilon chosen at a pipeline stage
//! ```
//!
//! A file carries whichever records its content needs: a complex is `v` and
//! `f` records, a certificate `h` and `margin` records, and so on. Records
//! are serialized in the order listed above.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use regsub::bistellar::Move;
use regsub::linalg::{format_rat, parse_rat};
use regsub::subdivision::{StellarHistory, StellarStep};
use regsub::{Complex, Face, Point, Rat, Vertex};

/// Interpretation of the geometric part of a document.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocKind {
    Triangulation,
    Fan,
}

impl DocKind {
    fn as_str(self) -> &'static str {
        match self {
            DocKind::Triangulation => "triangulation",
            DocKind::Fan => "fan",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub kind: Option<DocKind>,
    pub k: Option<u64>,
    pub seed: Option<u64>,
    pub vertices: BTreeMap<Vertex, Point>,
    pub facets: Vec<Face>,
    pub heights: BTreeMap<Vertex, Rat>,
    pub margins: BTreeMap<Face, Rat>,
    pub multipliers: BTreeMap<Face, Rat>,
    pub steps: Vec<StellarStep>,
    pub moves: Vec<Move>,
    pub epsilons: Vec<(String, Rat)>,
}

/// A malformed record, located by 1-based line and field (the tag is
/// field 1).
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, field {field}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub field: usize,
    pub message: String,
}

struct Fields<'a> {
    line: usize,
    toks: Vec<&'a str>,
}

impl<'a> Fields<'a> {
    fn err<T>(&self, field: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: self.line,
            field,
            message: message.into(),
        })
    }

    fn get(&self, i: usize, what: &str) -> Result<&'a str, ParseError> {
        match self.toks.get(i) {
            Some(t) => Ok(t),
            None => self.err(i + 1, format!("missing {what}")),
        }
    }

    fn exact(&self, n: usize) -> Result<(), ParseError> {
        if self.toks.len() > n {
            return self.err(n + 1, "unexpected extra field");
        }
        Ok(())
    }

    fn vertex(&self, i: usize) -> Result<Vertex, ParseError> {
        let t = self.get(i, "vertex id")?;
        t.parse()
            .or_else(|_| self.err(i + 1, format!("`{t}` is not a vertex id")))
    }

    fn count(&self, i: usize) -> Result<u64, ParseError> {
        let t = self.get(i, "count")?;
        t.parse()
            .or_else(|_| self.err(i + 1, format!("`{t}` is not a nonnegative integer")))
    }

    fn rat(&self, i: usize) -> Result<Rat, ParseError> {
        let t = self.get(i, "rational")?;
        match parse_rat(t) {
            Some(r) => Ok(r),
            None => self.err(i + 1, format!("`{t}` is not a rational p/q")),
        }
    }

    fn face(&self, i: usize) -> Result<Face, ParseError> {
        let t = self.get(i, "face")?;
        let ids: Result<Vec<Vertex>, _> = t.split(',').map(str::parse).collect();
        let Ok(ids) = ids else {
            return self.err(i + 1, format!("`{t}` is not a comma-separated face"));
        };
        match Face::new(ids) {
            Ok(f) => Ok(f),
            Err(e) => self.err(i + 1, e.to_string()),
        }
    }

    fn point(&self, from: usize) -> Result<Point, ParseError> {
        if self.toks.len() <= from {
            return self.err(from + 1, "missing coordinates");
        }
        (from..self.toks.len()).map(|i| self.rat(i)).collect()
    }
}

impl Document {
    pub fn parse(text: &str) -> Result<Document, ParseError> {
        let mut doc = Document::default();
        let mut dim: Option<(usize, usize)> = None;
        for (n, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            let fl = Fields { line: n + 1, toks };
            match fl.toks[0] {
                "kind" => {
                    fl.exact(2)?;
                    doc.kind = Some(match fl.get(1, "kind")? {
                        "triangulation" => DocKind::Triangulation,
                        "fan" => DocKind::Fan,
                        other => {
                            return fl.err(2, format!("unknown kind `{other}`, expected triangulation or fan"))
                        }
                    });
                }
                "k" => {
                    fl.exact(2)?;
                    doc.k = Some(fl.count(1)?);
                }
                "seed" => {
                    fl.exact(2)?;
                    doc.seed = Some(fl.count(1)?);
                }
                "v" => {
                    let id = fl.vertex(1)?;
                    let p = fl.point(2)?;
                    match dim {
                        Some((d, first)) if d != p.len() => {
                            return fl.err(
                                2 + p.len().min(d),
                                format!("{} coordinates, but line {first} has {d}", p.len()),
                            )
                        }
                        None => dim = Some((p.len(), n + 1)),
                        _ => {}
                    }
                    if doc.vertices.insert(id, p).is_some() {
                        return fl.err(2, format!("vertex {id} defined twice"));
                    }
                }
                "f" => {
                    let ids: Result<Vec<Vertex>, _> = (1..fl.toks.len().max(2)).map(|i| fl.vertex(i)).collect();
                    match Face::new(ids?) {
                        Ok(f) => doc.facets.push(f),
                        Err(e) => return fl.err(2, e.to_string()),
                    }
                }
                "h" => {
                    fl.exact(3)?;
                    doc.heights.insert(fl.vertex(1)?, fl.rat(2)?);
                }
                "margin" => {
                    fl.exact(3)?;
                    doc.margins.insert(fl.face(1)?, fl.rat(2)?);
                }
                "y" => {
                    fl.exact(3)?;
                    doc.multipliers.insert(fl.face(1)?, fl.rat(2)?);
                }
                "step" => doc.steps.push(StellarStep {
                    tau: fl.face(1)?,
                    nu: fl.vertex(2)?,
                    point: fl.point(3)?,
                }),
                "move" => {
                    fl.exact(3)?;
                    doc.moves.push(Move::new(fl.face(1)?, fl.face(2)?));
                }
                "eps" => {
                    fl.exact(3)?;
                    doc.epsilons.push((fl.get(1, "stage")?.to_string(), fl.rat(2)?));
                }
                other => return fl.err(1, format!("unknown record `{other}`")),
            }
        }
        Ok(doc)
    }

    /// The facets as an abstract complex (`None` without `f` records).
    pub fn complex(&self) -> Option<regsub::Result<Complex>> {
        if self.facets.is_empty() {
            return None;
        }
        Some(Complex::new(self.facets.iter().map(|f| f.to_vec())))
    }

    pub fn history(&self) -> StellarHistory {
        StellarHistory {
            steps: self.steps.clone(),
        }
    }

    pub fn set_history(&mut self, h: &StellarHistory) {
        self.steps = h.steps.clone();
    }

    pub fn set_complex(&mut self, c: &Complex) {
        self.facets = c.facets().to_vec();
    }
}

fn face_str(f: &Face) -> String {
    let ids: Vec<String> = f.iter().map(ToString::to_string).collect();
    ids.join(",")
}

fn point_str(p: &[Rat]) -> String {
    let xs: Vec<String> = p.iter().map(format_rat).collect();
    xs.join(" ")
}

impl fmt::Display for Document {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        if let Some(k) = self.kind {
            writeln!(s, "kind {}", k.as_str())?;
        }
        if let Some(k) = self.k {
            writeln!(s, "k {k}")?;
        }
        if let Some(seed) = self.seed {
            writeln!(s, "seed {seed}")?;
        }
        for (v, p) in &self.vertices {
            writeln!(s, "v {v} {}", point_str(p))?;
        }
        for f in &self.facets {
            let ids: Vec<String> = f.iter().map(ToString::to_string).collect();
            writeln!(s, "f {}", ids.join(" "))?;
        }
        for (v, x) in &self.heights {
            writeln!(s, "h {v} {}", format_rat(x))?;
        }
        for (f, x) in &self.margins {
            writeln!(s, "margin {} {}", face_str(f), format_rat(x))?;
        }
        for (f, x) in &self.multipliers {
            writeln!(s, "y {} {}", face_str(f), format_rat(x))?;
        }
        for st in &self.steps {
            writeln!(s, "step {} {} {}", face_str(&st.tau), st.nu, point_str(&st.point))?;
        }
        for m in &self.moves {
            writeln!(s, "move {} {}", face_str(&m.a), face_str(&m.b))?;
        }
        for (stage, x) in &self.epsilons {
            writeln!(s, "eps {stage} {}", format_rat(x))?;
        }
        out.write_str(&s)
    }
}
