//! Crop rotations and their full-sun revenues.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::agronomy::ShadeClass;
use crate::time::MonthSet;
use crate::{Error, Result};

/// One crop occupying a set of months.
#[derive(Debug, Clone, PartialEq)]
pub struct CropEntry {
    pub months: MonthSet,
    pub name: String,
    /// Full-sun net revenue for the season, in US cents per hectare.
    pub revenue_cents: u64,
    pub response: ShadeClass,
}

impl CropEntry {
    pub fn new(name: &str, months: MonthSet, revenue_per_ha: f64, response: ShadeClass) -> Result<Self> {
        Ok(Self {
            months,
            name: name.to_string(),
            revenue_cents: to_cents(revenue_per_ha)?,
            response,
        })
    }

    /// Full-sun revenue, $/ha per season.
    pub fn revenue(&self) -> f64 {
        self.revenue_cents as f64 / 100.0
    }
}

/// Converts $/ha to whole cents, rejecting negative or non-finite amounts.
pub fn to_cents(dollars: f64) -> Result<u64> {
    if !dollars.is_finite() || dollars < 0.0 {
        return Err(Error::Invalid(format!(
            "revenue {dollars} must be a non-negative amount"
        )));
    }
    Ok(crate::math::round(dollars * 100.0) as u64)
}

/// A yearly rotation. Months not covered by an entry must be listed as fallow.
#[derive(Debug, Clone, PartialEq)]
pub struct CropPlan {
    pub name: String,
    pub entries: Vec<CropEntry>,
    pub fallow: MonthSet,
}

impl CropPlan {
    pub fn new(name: &str, entries: Vec<CropEntry>, fallow: MonthSet) -> Result<Self> {
        let plan = Self {
            name: name.to_string(),
            entries,
            fallow,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = self.fallow;
        for e in &self.entries {
            if e.months.is_empty() {
                return Err(Error::Invalid(format!(
                    "crop {} in plan {} has no months",
                    e.name, self.name
                )));
            }
            if seen.intersects(e.months) {
                return Err(Error::Invalid(format!(
                    "crop {} in plan {} overlaps another entry or a fallow month",
                    e.name, self.name
                )));
            }
            seen = seen.union(e.months);
        }
        if seen != MonthSet::ALL {
            let missing: Vec<&str> = seen.complement().iter().map(|m| m.abbrev()).collect();
            return Err(Error::Invalid(format!(
                "plan {} leaves months uncovered and not fallow: {}",
                self.name,
                missing.join(", ")
            )));
        }
        Ok(())
    }

    pub fn total_cents(&self) -> u64 {
        self.entries.iter().map(|e| e.revenue_cents).sum()
    }

    /// Annual full-sun revenue, $/ha.
    pub fn total_revenue(&self) -> f64 {
        self.total_cents() as f64 / 100.0
    }

    /// Months carrying a crop.
    pub fn cropped_months(&self) -> MonthSet {
        self.fallow.complement()
    }

    /// Same rotation with every entry assigned a different response curve.
    pub fn with_response(mut self, response: ShadeClass) -> Self {
        for e in &mut self.entries {
            e.response = response.clone();
        }
        self
    }

    /// Rotation moved by `by` months, e.g. 6 to use a northern plan south of the equator.
    pub fn shifted(&self, by: u8) -> Self {
        Self {
            name: self.name.clone(),
            entries: self
                .entries
                .iter()
                .map(|e| CropEntry {
                    months: e.months.shifted(by),
                    ..e.clone()
                })
                .collect(),
            fallow: self.fallow.shifted(by),
        }
    }
}

fn entry(name: &str, from: u8, to: u8, cents: u64) -> CropEntry {
    CropEntry {
        months: MonthSet::span(from, to).expect("valid months"),
        name: name.to_string(),
        revenue_cents: cents,
        response: ShadeClass::Tolerant,
    }
}

/// Wheat and cotton rotation of a low-value Punjab farm (2018 prices).
pub fn low_value_plan() -> CropPlan {
    CropPlan {
        name: "LV".to_string(),
        entries: vec![entry("Cotton", 4, 9, 6_988), entry("Wheat", 10, 3, 22_843)],
        fallow: MonthSet::EMPTY,
    }
}

/// Tomato, cauliflower and garlic rotation of a high-value Punjab farm (2018 prices).
pub fn high_value_plan() -> CropPlan {
    CropPlan {
        name: "HV".to_string(),
        entries: vec![
            entry("Tomato", 4, 6, 94_881),
            entry("Cauliflower", 7, 9, 114_598),
            entry("Garlic", 10, 3, 709_754),
        ],
        fallow: MonthSet::EMPTY,
    }
}

pub fn builtin_crop_tables() -> Vec<CropPlan> {
    vec![low_value_plan(), high_value_plan()]
}

/// Looks up a built-in plan by name, ignoring case.
pub fn builtin_plan(name: &str) -> Option<CropPlan> {
    builtin_crop_tables()
        .into_iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Month;

    #[test]
    fn builtin_plans_are_valid() {
        for p in builtin_crop_tables() {
            p.validate().unwrap();
        }
        assert_eq!(low_value_plan().total_cents(), 29_831);
    }

    #[test]
    fn rejects_overlap_and_gaps() {
        let a = entry("A", 1, 6, 100);
        let b = entry("B", 6, 12, 100);
        assert!(CropPlan::new("x", vec![a.clone(), b], MonthSet::EMPTY).is_err());
        assert!(CropPlan::new("x", vec![a.clone()], MonthSet::EMPTY).is_err());
        let p = CropPlan::new("x", vec![a], MonthSet::span(7, 12).unwrap()).unwrap();
        assert_eq!(p.cropped_months().len(), 6);
    }

    #[test]
    fn negative_revenue_rejected() {
        assert!(CropEntry::new("x", MonthSet::ALL, -1.0, ShadeClass::Tolerant).is_err());
        assert_eq!(to_cents(1145.98).unwrap(), 114_598);
    }

    #[test]
    fn shift_moves_seasons() {
        let p = low_value_plan().shifted(6);
        assert!(p.entries[0].months.contains(Month::new(10).unwrap()));
        p.validate().unwrap();
    }
}
