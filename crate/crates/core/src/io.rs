//! JSON and CSV interchange.
//!
//! Floats are written with 17 significant digits (enough to round-trip any
//! f64) through a `%g`-style formatter; CSV tables use 12.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::channels::{ChannelFlavor, ClassicalChannel};
use crate::error::{QlockError, Result};
use crate::linalg::{partial_trace, ComplexMatrix, Subsystem, HERMITIAN_TOL};
use crate::passive::{BipartiteObservable, Observable};
use crate::states::DensityOperator;

pub const JSON_DIGITS: usize = 17;
pub const CSV_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<C64> for ComplexEntry {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexEntry> for C64 {
    fn from(e: ComplexEntry) -> Self {
        C64::new(e.re, e.im)
    }
}

fn entries(m: &ComplexMatrix) -> Vec<ComplexEntry> {
    m.as_slice().iter().map(|&z| z.into()).collect()
}

fn matrix_from_entries(e: &[ComplexEntry]) -> Result<ComplexMatrix> {
    ComplexMatrix::from_row_major(e.iter().map(|&x| x.into()).collect())
}

fn vector_from_entries(e: &[ComplexEntry]) -> Vec<C64> {
    e.iter().map(|&x| x.into()).collect()
}

// ---------------------------------------------------------------- formatting

/// `%.{digits}g`: fixed or scientific notation, trailing zeros stripped.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Pretty JSON whose floats carry [`JSON_DIGITS`] significant digits.
struct SigFormatter {
    pretty: serde_json::ser::PrettyFormatter<'static>,
}

impl serde_json::ser::Formatter for SigFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            w.write_all(fmt_sig(value, JSON_DIGITS).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.pretty.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let fmt = SigFormatter {
        pretty: serde_json::ser::PrettyFormatter::new(),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| QlockError::Parse(e.to_string()))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| QlockError::Parse(format!("{}: {e}", path.display())))
}

// --------------------------------------------------------------------- states

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: [usize; 2],
    pub matrix: Vec<ComplexEntry>,
}

impl StateFile {
    pub fn from_state(rho: &DensityOperator) -> Self {
        let (d1, d2) = rho.dims();
        Self {
            dims: [d1, d2],
            matrix: entries(rho.matrix()),
        }
    }

    pub fn to_state(&self) -> Result<DensityOperator> {
        let [d1, d2] = self.dims;
        if self.matrix.len() != (d1 * d2) * (d1 * d2) {
            return Err(QlockError::Parse(format!(
                "dims {d1}x{d2} need {} matrix entries, found {}",
                (d1 * d2) * (d1 * d2),
                self.matrix.len()
            )));
        }
        DensityOperator::new(matrix_from_entries(&self.matrix)?, (d1, d2))
    }
}

pub fn state_to_json(rho: &DensityOperator) -> String {
    to_json_string(&StateFile::from_state(rho))
}

pub fn state_from_json(text: &str) -> Result<DensityOperator> {
    parse_json::<StateFile>(text)?.to_state()
}

// ---------------------------------------------------------------- observables

/// `{"dim": d, "matrix": [...]}` or `{"levels": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableFile {
    Levels { levels: Vec<f64> },
    Matrix { dim: usize, matrix: Vec<ComplexEntry> },
}

impl ObservableFile {
    pub fn from_observable(obs: &Observable) -> Self {
        Self::Matrix {
            dim: obs.dim(),
            matrix: entries(obs.matrix()),
        }
    }

    pub fn to_observable(&self) -> Result<Observable> {
        match self {
            Self::Levels { levels } => Observable::from_levels(levels),
            Self::Matrix { dim, matrix } => {
                if matrix.len() != dim * dim {
                    return Err(QlockError::Parse(format!(
                        "dim {dim} needs {} matrix entries, found {}",
                        dim * dim,
                        matrix.len()
                    )));
                }
                Observable::new(matrix_from_entries(matrix)?)
            }
        }
    }
}

/// Either the two local terms or a total observable on the product space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BipartiteObservableFile {
    Local { o1: ObservableFile, o2: ObservableFile },
    Total(ObservableFile),
}

impl BipartiteObservableFile {
    pub fn from_observable(b: &BipartiteObservable) -> Self {
        Self::Local {
            o1: ObservableFile::from_observable(&b.o1),
            o2: ObservableFile::from_observable(&b.o2),
        }
    }

    /// A total observable must split as O₁⊗I + I⊗O₂ over `dims`; a diagonal
    /// `levels` list is read in computational order |00⟩, |01⟩, ….
    pub fn to_observable(&self, dims: (usize, usize)) -> Result<BipartiteObservable> {
        match self {
            Self::Local { o1, o2 } => BipartiteObservable::new(o1.to_observable()?, o2.to_observable()?),
            Self::Total(total) => split_additive(total.to_observable()?.matrix(), dims),
        }
    }
}

/// Writes h as O₁⊗I + I⊗O₂ with Tr O₂ = 0, or fails if h is not additive.
pub fn split_additive(h: &ComplexMatrix, dims: (usize, usize)) -> Result<BipartiteObservable> {
    let (d1, d2) = dims;
    if h.dim() != d1 * d2 {
        return Err(QlockError::DimensionMismatch {
            expected: d1 * d2,
            found: h.dim(),
        });
    }
    let o1 = partial_trace(h, dims, Subsystem::A1)?.scale_real(1.0 / d2 as f64);
    let mean = h.trace().re / (d1 * d2) as f64;
    let o2 = &partial_trace(h, dims, Subsystem::A2)?.scale_real(1.0 / d1 as f64)
        - &ComplexMatrix::identity(d2).scale_real(mean);
    let b = BipartiteObservable::new(Observable::new(o1)?, Observable::new(o2)?)?;
    let defect = (b.total.matrix() - h).max_abs();
    let scale = h.max_abs().max(1.0);
    if defect > HERMITIAN_TOL * scale * 10.0 {
        return Err(QlockError::Parse(format!(
            "observable is not of the form O1⊗I + I⊗O2 (residual {defect:.3e})"
        )));
    }
    Ok(b)
}

// ------------------------------------------------------------------- channels

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub flavor: ChannelFlavor,
    /// Each element a row-major matrix.
    pub povm: Vec<Vec<ComplexEntry>>,
    pub preps: Vec<Vec<ComplexEntry>>,
}

impl ChannelFile {
    pub fn from_channel(c: &ClassicalChannel) -> Self {
        Self {
            flavor: c.flavor(),
            povm: c.povm().iter().map(entries).collect(),
            preps: c
                .preps()
                .iter()
                .map(|v| v.iter().map(|&z| z.into()).collect())
                .collect(),
        }
    }

    /// Validates the general measure-and-prepare constraints and, for the
    /// restricted flavors, the flavor's own constraints.
    pub fn to_channel(&self) -> Result<ClassicalChannel> {
        let povm = self
            .povm
            .iter()
            .map(|e| matrix_from_entries(e))
            .collect::<Result<Vec<_>>>()?;
        let preps: Vec<Vec<C64>> = self.preps.iter().map(|v| vector_from_entries(v)).collect();
        ClassicalChannel::with_flavor(povm, preps, self.flavor)
    }
}

// ------------------------------------------------------------------------ CSV

/// Writes `header` then each row with [`CSV_DIGITS`] significant digits.
pub fn write_csv<W: Write>(mut w: W, header: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|&x| fmt_sig(x, CSV_DIGITS)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}
