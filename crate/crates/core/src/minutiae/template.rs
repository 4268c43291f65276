use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const MAX_MINUTIAE: usize = 300;
const MAGIC: &str = "FPT1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MinutiaKind {
    Ending,
    Bifurcation,
}

impl MinutiaKind {
    pub fn code(self) -> char {
        match self {
            MinutiaKind::Ending => 'E',
            MinutiaKind::Bifurcation => 'B',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minutia {
    pub x: f64,
    pub y: f64,
    /// Direction of the ridge leaving the point, radians in `[0, 2pi)`.
    pub direction: f64,
    pub kind: MinutiaKind,
    pub reliability: f64,
}

impl Minutia {
    pub fn new(x: f64, y: f64, direction: f64, kind: MinutiaKind, reliability: f64) -> Self {
        Self { x, y, direction: direction.rem_euclid(TAU), kind, reliability }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinutiaeTemplate {
    pub source_id: String,
    pub width: usize,
    pub height: usize,
    pub minutiae: Vec<Minutia>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinutiaeCounts {
    pub endings: usize,
    pub bifurcations: usize,
    pub pct_bifurcation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityStats {
    pub mean_ending: Option<f64>,
    pub mean_bifurcation: Option<f64>,
}

impl MinutiaeTemplate {
    pub fn new(source_id: impl Into<String>, width: usize, height: usize, minutiae: Vec<Minutia>) -> Self {
        Self { source_id: source_id.into(), width, height, minutiae }
    }

    pub fn counts(&self) -> MinutiaeCounts {
        let bifurcations = self.minutiae.iter().filter(|m| m.kind == MinutiaKind::Bifurcation).count();
        let endings = self.minutiae.len() - bifurcations;
        MinutiaeCounts {
            endings,
            bifurcations,
            pct_bifurcation: bifurcations as f64 / (endings + bifurcations).max(1) as f64,
        }
    }

    pub fn reliability_stats(&self) -> ReliabilityStats {
        let mean_of = |kind| {
            let v: Vec<f64> = self.minutiae.iter().filter(|m| m.kind == kind).map(|m| m.reliability).collect();
            (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
        };
        ReliabilityStats { mean_ending: mean_of(MinutiaKind::Ending), mean_bifurcation: mean_of(MinutiaKind::Bifurcation) }
    }

    /// Text form: `FPT1 <id> <w> <h> <count>` then `x y dir_deg kind rel` lines.
    pub fn to_text(&self) -> Result<String> {
        if self.source_id.is_empty() || self.source_id.chars().any(char::is_whitespace) {
            return Err(Error::MalformedTemplate(format!("source id {:?} must be a non-empty token", self.source_id)));
        }
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC} {} {} {} {}", self.source_id, self.width, self.height, self.minutiae.len());
        for m in &self.minutiae {
            let _ = writeln!(
                s,
                "{} {} {:.2} {} {:.3}",
                m.x,
                m.y,
                m.direction.to_degrees(),
                m.kind.code(),
                m.reliability
            );
        }
        Ok(s)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::MalformedTemplate(msg);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 5 || h[0] != MAGIC {
            return Err(bad(format!("bad header {header:?}")));
        }
        let num = |s: &str, what: &str| s.parse::<usize>().map_err(|_| bad(format!("bad {what} {s:?}")));
        let (width, height, count) = (num(h[2], "width")?, num(h[3], "height")?, num(h[4], "count")?);
        if count > MAX_MINUTIAE {
            return Err(bad(format!("count {count} exceeds {MAX_MINUTIAE}")));
        }
        let mut minutiae = Vec::with_capacity(count);
        for (k, line) in lines.enumerate() {
            if k >= count {
                return Err(bad(format!("more than {count} minutia lines")));
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 {
                return Err(bad(format!("line {}: expected 5 fields", k + 2)));
            }
            let real = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad(format!("bad number {s:?}")));
            let kind = match f[3] {
                "E" => MinutiaKind::Ending,
                "B" => MinutiaKind::Bifurcation,
                other => return Err(bad(format!("bad kind {other:?}"))),
            };
            minutiae.push(Minutia::new(real(f[0])?, real(f[1])?, real(f[2])?.to_radians(), kind, real(f[4])?));
        }
        if minutiae.len() != count {
            return Err(bad(format!("header declares {count} minutiae, found {}", minutiae.len())));
        }
        Ok(Self { source_id: h[1].to_string(), width, height, minutiae })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(kind: MinutiaKind, rel: f64) -> Minutia {
        Minutia::new(10.0, 20.0, 1.0, kind, rel)
    }

    #[test]
    fn counts_and_percentage() {
        let empty = MinutiaeTemplate::new("e", 64, 64, vec![]);
        assert_eq!(empty.counts(), MinutiaeCounts { endings: 0, bifurcations: 0, pct_bifurcation: 0.0 });
        let t = MinutiaeTemplate::new(
            "t",
            64,
            64,
            vec![m(MinutiaKind::Ending, 1.0), m(MinutiaKind::Ending, 1.0), m(MinutiaKind::Ending, 1.0), m(MinutiaKind::Bifurcation, 1.0)],
        );
        assert_eq!(t.counts().pct_bifurcation, 0.25);
    }

    #[test]
    fn reliability_partition() {
        let t = MinutiaeTemplate::new("t", 64, 64, vec![m(MinutiaKind::Ending, 1.0), m(MinutiaKind::Bifurcation, 1.0)]);
        assert_eq!(t.reliability_stats(), ReliabilityStats { mean_ending: Some(1.0), mean_bifurcation: Some(1.0) });
        let empty = MinutiaeTemplate::new("e", 64, 64, vec![]);
        assert_eq!(empty.reliability_stats(), ReliabilityStats { mean_ending: None, mean_bifurcation: None });
        let endings = MinutiaeTemplate::new("t", 64, 64, vec![m(MinutiaKind::Ending, 0.2), m(MinutiaKind::Ending, 0.4)]);
        let r = endings.reliability_stats();
        assert!((r.mean_ending.unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(r.mean_bifurcation, None);
    }

    #[test]
    fn text_format_layout() {
        let t = MinutiaeTemplate::new(
            "s1_i0",
            512,
            480,
            vec![Minutia::new(100.0, 42.0, std::f64::consts::FRAC_PI_2, MinutiaKind::Bifurcation, 0.8766)],
        );
        assert_eq!(t.to_text().unwrap(), "FPT1 s1_i0 512 480 1\n100 42 90.00 B 0.877\n");
    }

    #[test]
    fn parser_rejects_malformed_counts() {
        assert!(MinutiaeTemplate::from_text("FPT1 a 10 10 2\n1 2 3.00 E 0.500\n").is_err());
        assert!(MinutiaeTemplate::from_text("FPT1 a 10 10 0\n1 2 3.00 E 0.500\n").is_err());
        assert!(MinutiaeTemplate::from_text("FPT1 a 10 10 x\n").is_err());
        assert!(MinutiaeTemplate::from_text("FPT1 a 10 10 301\n").is_err());
        assert!(MinutiaeTemplate::from_text("FPT2 a 10 10 0\n").is_err());
        assert!(MinutiaeTemplate::from_text("FPT1 a 10 10 1\n1 2 3.00 Q 0.500\n").is_err());
        assert!(MinutiaeTemplate::from_text("FPT1 a 10 10 1\n1 2 NaN E 0.500\n").is_err());
        let ok = MinutiaeTemplate::from_text("FPT1 a 10 10 1\n1 2 3.00 E 0.500\n").unwrap();
        assert_eq!(ok.minutiae.len(), 1);
    }

    #[test]
    fn whitespace_in_id_rejected() {
        assert!(MinutiaeTemplate::new("a b", 1, 1, vec![]).to_text().is_err());
    }
}
