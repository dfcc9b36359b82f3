use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One interval `(birth, death)` of a persistence module, with multiplicity.
/// Essential bars have `death == f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bar {
    pub degree: usize,
    pub birth: f64,
    pub death: f64,
    pub mult: usize,
}

impl Bar {
    pub fn new(degree: usize, birth: f64, death: f64) -> Self {
        Bar {
            degree,
            birth,
            death,
            mult: 1,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    /// Whether the bar is alive at filtration value `t`.
    pub fn contains(&self, t: f64) -> bool {
        self.birth <= t && t < self.death
    }

    fn key_cmp(&self, other: &Bar) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

/// A multiset of bars, kept sorted by `(degree, birth, death)` with equal
/// bars merged into one entry.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Barcode {
    bars: Vec<Bar>,
}

impl Barcode {
    pub fn new() -> Self {
        Barcode::default()
    }

    /// Validates (`birth < death`, positive multiplicity, finite birth) and
    /// canonicalizes.
    pub fn from_bars<I: IntoIterator<Item = Bar>>(bars: I) -> Result<Self> {
        let mut out = Barcode::new();
        for b in bars {
            out.push(b)?;
        }
        Ok(out)
    }

    pub fn push(&mut self, bar: Bar) -> Result<()> {
        if !(bar.birth < bar.death) || !bar.birth.is_finite() || bar.death.is_nan() || bar.mult == 0 {
            return Err(Error::Invariant(format!("invalid bar {bar:?}")));
        }
        match self.bars.binary_search_by(|b| b.key_cmp(&bar)) {
            Ok(i) => self.bars[i].mult += bar.mult,
            Err(i) => self.bars.insert(i, bar),
        }
        Ok(())
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Number of bars counted with multiplicity.
    pub fn total(&self) -> usize {
        self.bars.iter().map(|b| b.mult).sum()
    }

    /// Bars of one degree.
    pub fn in_degree(&self, degree: usize) -> Barcode {
        Barcode {
            bars: self.bars.iter().filter(|b| b.degree == degree).copied().collect(),
        }
    }

    /// `(birth, death)` pairs of one degree, repeated by multiplicity.
    pub fn expanded(&self, degree: usize) -> Vec<(f64, f64)> {
        self.bars
            .iter()
            .filter(|b| b.degree == degree)
            .flat_map(|b| std::iter::repeat_n((b.birth, b.death), b.mult))
            .collect()
    }

    /// Multiset union.
    pub fn union(&self, other: &Barcode) -> Barcode {
        let mut out = self.clone();
        for b in &other.bars {
            out.push(*b).expect("bars of a valid barcode");
        }
        out
    }

    /// Number of bars of `degree` alive at `t`, with multiplicity.
    pub fn alive_at(&self, degree: usize, t: f64) -> usize {
        self.bars
            .iter()
            .filter(|b| b.degree == degree && b.contains(t))
            .map(|b| b.mult)
            .sum()
    }

    /// Removes one copy of the bar `(degree, birth, death)`; false if absent.
    pub fn remove_one(&mut self, degree: usize, birth: f64, death: f64) -> bool {
        let probe = Bar::new(degree, birth, death);
        match self.bars.binary_search_by(|b| b.key_cmp(&probe)) {
            Ok(i) => {
                self.bars[i].mult -= 1;
                if self.bars[i].mult == 0 {
                    self.bars.remove(i);
                }
                true
            }
            Err(_) => false,
        }
    }

    /// Reduced version: one infinite degree-0 bar (the earliest) removed.
    pub fn to_reduced(&self) -> Barcode {
        let mut out = self.clone();
        if let Some(b) = self.bars.iter().find(|b| b.degree == 0 && b.is_infinite()) {
            out.remove_one(0, b.birth, b.death);
        }
        out
    }

    /// Every endpoint multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Barcode {
        Barcode::from_bars(self.bars.iter().map(|b| Bar {
            birth: b.birth * factor,
            death: b.death * factor,
            ..*b
        }))
        .expect("scaling by a positive factor keeps bars valid")
    }

    /// JSON form. `operation` labels the module (`"id"`, `"Sq1"`, ...).
    pub fn to_json(&self, operation: &str, with_u_scale: bool) -> BarcodeJson {
        BarcodeJson {
            field: "F2".into(),
            operation: operation.into(),
            bars: self
                .bars
                .iter()
                .map(|b| BarJson {
                    degree: b.degree,
                    birth: round_significant(b.birth),
                    death: (!b.is_infinite()).then(|| round_significant(b.death)),
                    death_u_scale: with_u_scale.then(|| (!b.is_infinite()).then(|| round_significant(b.death / 2.0))),
                    mult: b.mult,
                })
                .collect(),
        }
    }

    pub fn from_json(json: &BarcodeJson) -> Result<Barcode> {
        Barcode::from_bars(json.bars.iter().map(|b| Bar {
            degree: b.degree,
            birth: b.birth,
            death: b.death.unwrap_or(f64::INFINITY),
            mult: b.mult,
        }))
        .map_err(|_| Error::Parse {
            line: 0,
            msg: "barcode JSON contains a bar with birth >= death or zero multiplicity".into(),
        })
    }
}

/// Serialized barcode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarcodeJson {
    pub field: String,
    pub operation: String,
    pub bars: Vec<BarJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarJson {
    pub degree: usize,
    pub birth: f64,
    pub death: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub death_u_scale: Option<Option<f64>>,
    #[serde(default = "one")]
    pub mult: usize,
}

fn one() -> usize {
    1
}

/// Rounds to 9 significant digits, the precision of all JSON output.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_and_merging() {
        let b = Barcode::from_bars([
            Bar::new(1, 0.5, 2.0),
            Bar::new(0, 0.0, f64::INFINITY),
            Bar::new(1, 0.5, 2.0),
            Bar::new(0, 0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(b.bars().len(), 3);
        assert_eq!(b.total(), 4);
        assert_eq!(b.bars()[0].death, 1.0);
        assert_eq!(b.bars()[2].mult, 2);
        assert_eq!(b.alive_at(1, 1.0), 2);
        assert_eq!(b.alive_at(1, 2.0), 0);
    }

    #[test]
    fn rejects_empty_intervals() {
        assert!(Barcode::from_bars([Bar::new(0, 1.0, 1.0)]).is_err());
        assert!(Barcode::from_bars([Bar { mult: 0, ..Bar::new(0, 0.0, 1.0) }]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let b = Barcode::from_bars([Bar::new(1, 0.0, 2.0943951023931957), Bar::new(0, 0.0, f64::INFINITY)]).unwrap();
        let json = b.to_json("id", false);
        let text = serde_json::to_string(&json).unwrap();
        assert_eq!(
            text,
            r#"{"field":"F2","operation":"id","bars":[{"degree":0,"birth":0.0,"death":null,"mult":1},{"degree":1,"birth":0.0,"death":2.0943951,"mult":1}]}"#
        );
        let back: BarcodeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Barcode::from_json(&back).unwrap().bars()[1].death, 2.0943951);

        let with_u = serde_json::to_string(&b.in_degree(1).to_json("Sq1", true)).unwrap();
        assert!(with_u.contains(r#""death_u_scale":1.04719755"#));
    }

    #[test]
    fn reduced_drops_one_component() {
        let b = Barcode::from_bars([Bar::new(0, 0.0, f64::INFINITY), Bar::new(0, 0.0, 1.0)]).unwrap();
        let r = b.to_reduced();
        assert_eq!(r.total(), 1);
        assert!(!r.bars()[0].is_infinite());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn rounding() {
        assert_eq!(round_significant(std::f64::consts::PI), 3.14159265);
        assert_eq!(round_significant(0.0), 0.0);
        assert_eq!(round_significant(123456789012.0), 123456789000.0);
    }
}
