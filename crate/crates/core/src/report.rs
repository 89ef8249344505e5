//! Report serialization: extended reals that survive JSON, and a float
//! formatter that always writes 17 significant digits so reruns with the
//! same seed produce byte-identical output.

use std::fmt;
use std::io;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

/// Extended real for report fields: finite values serialize as numbers,
/// infinities as the strings "inf" and "-inf".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtReal(pub f64);

impl ExtReal {
    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal(v)
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            serializer.serialize_f64(self.0)
        } else if self.0 == f64::INFINITY {
            serializer.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            serializer.serialize_str("-inf")
        } else {
            serializer.serialize_str("nan")
        }
    }
}

struct ExtRealVisitor;

impl Visitor<'_> for ExtRealVisitor {
    type Value = ExtReal;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "a number or one of the strings \"inf\", \"-inf\", \"nan\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
        Ok(ExtReal(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
        Ok(ExtReal(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
        Ok(ExtReal(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
        match v {
            "inf" => Ok(ExtReal(f64::INFINITY)),
            "-inf" => Ok(ExtReal(f64::NEG_INFINITY)),
            "nan" => Ok(ExtReal(f64::NAN)),
            other => Err(E::custom(format!("unrecognized extended real {other:?}"))),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<ExtReal, D::Error> {
        deserializer.deserialize_any(ExtRealVisitor)
    }
}

/// Formats one value for CSV cells with the same conventions as JSON.
pub fn format_ext(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        "nan".into()
    }
}

/// Compact JSON formatter printing every float with 17 significant digits.
struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.7e}")
    }
}

/// Serializes to compact JSON with fixed-precision floats.
pub fn to_json_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    to_json_writer(&mut out, value)?;
    Ok(String::from_utf8(out).expect("serializer emits UTF-8"))
}

/// Writer-based variant of [`to_json_string`].
pub fn to_json_writer<W: io::Write, T: Serialize>(writer: W, value: &T) -> serde_json::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(writer, SciFormatter);
    value.serialize(&mut ser)
}
