use crate::error::{Error, Result};
use crate::minutiae::MinutiaeTemplate;

/// Slack added to every tolerance comparison so that exact ties survive the
/// rounding introduced by rotating coordinates.
pub(crate) const EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatcherConfig {
    /// Distance tolerance between paired entries, px.
    pub td: f64,
    /// Angle tolerance on each beta, degrees.
    pub t_theta: f64,
    /// Maximum rotation disagreement between linked entries, degrees.
    pub t_rot: f64,
    /// Pairs farther apart than this are not tabulated, px.
    pub d_max: f64,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        Self { td: 10.0, t_theta: 11.25, t_rot: 22.5, d_max: 125.0 }
    }
}

impl MatcherConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(self.td) && ok(self.t_theta) && ok(self.t_rot) && ok(self.d_max)) {
            return Err(Error::InvalidParameter(format!("matcher tolerances must be positive: {self:?}")));
        }
        if self.t_theta >= 180.0 || self.t_rot > 180.0 {
            return Err(Error::InvalidParameter(format!("angle tolerances out of range: {self:?}")));
        }
        Ok(())
    }
}

/// Wraps degrees into `(-180, 180]`.
pub fn wrap_deg(a: f64) -> f64 {
    let r = (a + 180.0).rem_euclid(360.0) - 180.0;
    if r == -180.0 {
        180.0
    } else {
        r
    }
}

/// `wrap_deg` for inputs in `(-540, 540]`; exact and odd-symmetric, which
/// the hot loops of the scorer rely on.
#[inline]
pub(crate) fn wrap_near(a: f64) -> f64 {
    if a > 180.0 {
        a - 360.0
    } else if a <= -180.0 {
        a + 360.0
    } else {
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntraEntry {
    pub i: u32,
    pub j: u32,
    pub d: f64,
    pub beta1: f64,
    pub beta2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntraTable {
    pub entries: Vec<IntraEntry>,
}

impl IntraTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Tabulates every minutia pair `i < j` with `0 < d <= d_max`. Coincident
/// minutiae have no segment direction and form no entry.
pub fn build_intra(t: &MinutiaeTemplate, cfg: &MatcherConfig) -> IntraTable {
    let m = &t.minutiae;
    let mut entries = Vec::new();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let (dx, dy) = (m[j].x - m[i].x, m[j].y - m[i].y);
            let d = dx.hypot(dy);
            if d <= 0.0 || d > cfg.d_max + EPS {
                continue;
            }
            let seg = dy.atan2(dx).to_degrees();
            entries.push(IntraEntry {
                i: i as u32,
                j: j as u32,
                d,
                beta1: wrap_deg(m[i].direction.to_degrees() - seg),
                beta2: wrap_deg(m[j].direction.to_degrees() - seg),
            });
        }
    }
    entries.sort_by(|a, b| a.d.total_cmp(&b.d).then(a.i.cmp(&b.i)).then(a.j.cmp(&b.j)));
    IntraTable { entries }
}
