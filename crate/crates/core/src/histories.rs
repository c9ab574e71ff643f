//! Piecewise-constant histories in a configuration groupoid and their action.
//!
//! A history stores its segments in increasing parameter order. A reversed
//! history keeps the same parameter interval and segment order, with every
//! morphism replaced by its inverse; it is traversed from the top of the
//! interval down to `t0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::FiniteGroupoid;

/// Times closer than this are treated as equal when matching endpoints.
pub const TIME_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Forward,
    Reversed,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Reversed,
            Orientation::Reversed => Orientation::Forward,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub morphism: usize,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct History {
    pub segments: Vec<Segment>,
    pub t0: f64,
    pub orientation: Orientation,
}

impl History {
    pub fn new(t0: f64, segments: Vec<Segment>) -> Result<Self> {
        if let Some(s) = segments.iter().find(|s| !(s.duration > 0.0 && s.duration.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "segment duration must be positive, got {}",
                s.duration
            )));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidArgument("start time must be finite".into()));
        }
        Ok(Self {
            segments,
            t0,
            orientation: Orientation::Forward,
        })
    }

    /// Zero-duration history sitting at time `t`.
    pub fn empty(t: f64) -> Self {
        Self {
            segments: Vec::new(),
            t0: t,
            orientation: Orientation::Forward,
        }
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Top of the parameter interval.
    pub fn t1(&self) -> f64 {
        self.t0 + self.duration()
    }

    /// Time at which traversal begins.
    pub fn start_time(&self) -> f64 {
        match self.orientation {
            Orientation::Forward => self.t0,
            Orientation::Reversed => self.t1(),
        }
    }

    /// Time at which traversal ends.
    pub fn end_time(&self) -> f64 {
        match self.orientation {
            Orientation::Forward => self.t1(),
            Orientation::Reversed => self.t0,
        }
    }

    /// Segments in the order they are traversed.
    fn traversal(&self) -> Box<dyn DoubleEndedIterator<Item = &Segment> + '_> {
        match self.orientation {
            Orientation::Forward => Box::new(self.segments.iter()),
            Orientation::Reversed => Box::new(self.segments.iter().rev()),
        }
    }
}

/// `w' ∘ w`: `w` first, then `w'`. Both must share an orientation and `w`
/// must end when `w'` starts.
pub fn compose_histories(w: &History, w_next: &History) -> Result<History> {
    if w.orientation != w_next.orientation {
        return Err(Error::OrientationMismatch);
    }
    let (end, start) = (w.end_time(), w_next.start_time());
    if (end - start).abs() > TIME_TOLERANCE * (1.0 + end.abs()) {
        return Err(Error::TimeMismatch { end, start });
    }
    // Keep the stored segment list in increasing parameter order.
    let (low, high) = match w.orientation {
        Orientation::Forward => (w, w_next),
        Orientation::Reversed => (w_next, w),
    };
    let mut segments = low.segments.clone();
    segments.extend(high.segments.iter().cloned());
    Ok(History {
        segments,
        t0: low.t0,
        orientation: w.orientation,
    })
}

/// Endpoint objects that fail to chain at the junction of a composite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JunctionMismatch {
    pub arriving: usize,
    pub departing: usize,
}

/// Like [`compose_histories`], additionally reporting whether the last
/// morphism of `w` ends at the object where the first morphism of `w'`
/// begins. A mismatch is a warning; the composite is still returned.
pub fn compose_histories_checked(
    g: &FiniteGroupoid,
    w: &History,
    w_next: &History,
) -> Result<(History, Option<JunctionMismatch>)> {
    let composite = compose_histories(w, w_next)?;
    let warning = match (w.traversal().last(), w_next.traversal().next()) {
        (Some(a), Some(b)) => {
            let (arriving, departing) = (g.target(a.morphism), g.source(b.morphism));
            (arriving != departing).then_some(JunctionMismatch {
                arriving,
                departing,
            })
        }
        _ => None,
    };
    Ok((composite, warning))
}

/// `w⁻¹(s) = w(s)⁻¹`, with the orientation flipped.
pub fn reverse_history(g: &FiniteGroupoid, w: &History) -> History {
    History {
        segments: w
            .segments
            .iter()
            .map(|s| Segment {
                morphism: g.inverse(s.morphism),
                duration: s.duration,
            })
            .collect(),
        t0: w.t0,
        orientation: w.orientation.flipped(),
    }
}

/// A real function on morphisms, with a certificate of invariance under
/// `α ↦ α⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct QLagrangianOnK {
    values: Vec<f64>,
    tau_invariant: bool,
}

impl QLagrangianOnK {
    pub fn new(g: &FiniteGroupoid, values: Vec<f64>, tolerance: f64) -> Result<Self> {
        if values.len() != g.morphism_count() {
            return Err(Error::GroupoidMismatch {
                expected: g.morphism_count(),
                found: values.len(),
            });
        }
        let tau_invariant =
            (0..values.len()).all(|a| (values[g.inverse(a)] - values[a]).abs() <= tolerance);
        Ok(Self {
            values,
            tau_invariant,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_tau_invariant(&self) -> bool {
        self.tau_invariant
    }
}

/// `S(w) = Σ ℓ(α_i) Δt_i`, with an overall minus sign on reversed histories.
pub fn action(lagrangian: &QLagrangianOnK, w: &History) -> Result<f64> {
    let k = lagrangian.values.len();
    let mut total = 0.0;
    for s in &w.segments {
        if s.morphism >= k {
            return Err(Error::InvalidArgument(format!("segment morphism {} out of range", s.morphism)));
        }
        total += lagrangian.values[s.morphism] * s.duration;
    }
    Ok(match w.orientation {
        Orientation::Forward => total,
        Orientation::Reversed => -total,
    })
}
