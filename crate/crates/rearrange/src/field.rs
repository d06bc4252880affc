use numeric::Real;

use crate::error::RearrangeError;
use crate::step::StepFunction;

/// Piecewise-constant field: one value per cell, each cell with positive measure.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField<T> {
    values: Vec<T>,
    measures: Vec<T>,
    total: T,
}

impl<T: Real> DiscreteField<T> {
    pub fn new(values: Vec<T>, measures: Vec<T>) -> Result<Self, RearrangeError> {
        assert_eq!(values.len(), measures.len(), "values and measures differ in length");
        if values.is_empty() {
            return Err(RearrangeError::EmptyField);
        }
        for (index, (v, m)) in values.iter().zip(&measures).enumerate() {
            if !(*m > T::zero()) || !m.is_finite() {
                return Err(RearrangeError::BadMeasure { index, measure: m.to_f64_lossy() });
            }
            if !v.is_finite() {
                return Err(RearrangeError::BadValue { index });
            }
        }
        let total = measures.iter().copied().sum();
        Ok(DiscreteField { values, measures, total })
    }

    pub fn from_cells(cells: &[(T, T)]) -> Result<Self, RearrangeError> {
        let (v, m) = cells.iter().copied().unzip();
        Self::new(v, m)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn measures(&self) -> &[T] {
        &self.measures
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_measure(&self) -> T {
        self.total
    }

    pub fn cells(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.values.iter().copied().zip(self.measures.iter().copied())
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `∫ |u|`.
    pub fn l1_norm(&self) -> T {
        self.cells().map(|(v, m)| v.abs() * m).sum()
    }

    /// `∫ u`.
    pub fn integral(&self) -> T {
        self.cells().map(|(v, m)| v * m).sum()
    }

    /// Same cells with every value mapped through `f`.
    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        DiscreteField {
            values: self.values.iter().map(|&v| f(v)).collect(),
            measures: self.measures.clone(),
            total: self.total,
        }
    }
}

/// Decreasing rearrangement `u*(s) = inf{t ≥ 0 : |{|u| > t}| ≤ s}` of `|u|`.
pub fn rearrangement<T: Real>(u: &DiscreteField<T>) -> StepFunction<T> {
    let mut cells: Vec<(T, T)> = u.cells().map(|(v, m)| (v.abs(), m)).collect();
    cells.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut breakpoints = vec![T::zero()];
    let mut values: Vec<T> = Vec::new();
    let mut acc = T::zero();
    for (v, m) in cells {
        acc += m;
        if values.last() == Some(&v) {
            *breakpoints.last_mut().unwrap() = acc;
        } else {
            values.push(v);
            breakpoints.push(acc);
        }
    }
    StepFunction::from_parts(breakpoints, values)
}

/// `|{|u| > t}|`.
pub fn distribution<T: Real>(u: &DiscreteField<T>, t: T) -> T {
    u.cells().filter(|(v, _)| v.abs() > t).map(|(_, m)| m).sum()
}

/// `inf{t : |{u > t}| ≤ |Ω|/2}` over signed values.
pub fn median<T: Real>(u: &DiscreteField<T>) -> T {
    let mut cells: Vec<(T, T)> = u.cells().collect();
    cells.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let half = u.total_measure() * numeric::lit(0.5);
    let slack = half * T::epsilon() * numeric::lit(8.0);
    // Walk downward; `above` is the measure strictly above the current value.
    let mut above = T::zero();
    let mut best = cells[0].0;
    let mut i = 0;
    while i < cells.len() {
        let v = cells[i].0;
        if above > half + slack {
            break;
        }
        best = v;
        while i < cells.len() && cells[i].0 == v {
            above += cells[i].1;
            i += 1;
        }
    }
    best
}

/// `T_t(s) = s` for `|s| ≤ t`, `t·sign(s)` otherwise.
pub fn truncate_value<T: Real>(s: T, t: T) -> T {
    s.max(-t).min(t)
}

pub fn truncate<T: Real>(u: &DiscreteField<T>, t: T) -> DiscreteField<T> {
    u.map(|s| truncate_value(s, t))
}

/// `∫₀ˢ g*(r) dr`.
pub fn tail_integral<T: Real>(g: &DiscreteField<T>, s: T) -> T {
    rearrangement(g).integral_to(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(cells: &[(f64, f64)]) -> DiscreteField<f64> {
        DiscreteField::from_cells(cells).unwrap()
    }

    #[test]
    fn two_cell_sort() {
        let r = rearrangement(&field(&[(1.0, 0.5), (3.0, 0.5)]));
        assert_eq!(r.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(r.values(), &[3.0, 1.0]);
        assert_eq!(r.eval(0.25), 3.0);
        assert_eq!(r.eval(0.5), 1.0);
    }

    #[test]
    fn absolute_values_merge() {
        let r = rearrangement(&field(&[(-2.0, 1.0), (2.0, 1.0)]));
        assert_eq!(r.breakpoints(), &[0.0, 2.0]);
        assert_eq!(r.values(), &[2.0]);
    }

    #[test]
    fn distribution_examples() {
        let u = field(&[(3.0, 0.5), (1.0, 0.5)]);
        assert_eq!(distribution(&u, 2.0), 0.5);
        assert_eq!(distribution(&u, 3.0), 0.0);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&field(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)])), 2.0);
        assert_eq!(median(&field(&[(4.5, 0.3), (4.5, 1.2)])), 4.5);
        // |{u > −v}| is exactly half, so the infimum sits at the lower value.
        assert_eq!(median(&field(&[(0.7, 0.1), (-0.7, 0.1), (0.7, 0.1), (-0.7, 0.1)])), -0.7);
        assert_eq!(median(&field(&[(0.7, 0.1), (-0.7, 0.1), (0.0, 0.01)])), 0.0);
    }

    #[test]
    fn truncation_cases() {
        assert_eq!(truncate_value(3.0, 2.0), 2.0);
        assert_eq!(truncate_value(-3.0, 2.0), -2.0);
        assert_eq!(truncate_value(1.0, 2.0), 1.0);
        let u = field(&[(0.5, 1.0), (-1.5, 2.0)]);
        assert_eq!(truncate(&u, 1.5), u);
    }

    #[test]
    fn tail_integral_examples() {
        let g = field(&[(3.0, 0.5), (1.0, 0.5)]);
        assert_eq!(tail_integral(&g, 0.5), 1.5);
        assert_eq!(tail_integral(&g, 1.0), g.l1_norm());
    }

    #[test]
    fn rejects_bad_cells() {
        assert_eq!(DiscreteField::<f64>::new(vec![], vec![]), Err(RearrangeError::EmptyField));
        assert!(matches!(
            DiscreteField::new(vec![1.0, 2.0], vec![1.0, 0.0]),
            Err(RearrangeError::BadMeasure { index: 1, .. })
        ));
    }

    #[test]
    fn single_precision() {
        let u = DiscreteField::<f32>::from_cells(&[(2.0, 0.25), (-4.0, 0.75)]).unwrap();
        assert_eq!(rearrangement(&u).eval(0.5), 4.0);
        assert_eq!(median(&u), -4.0);
    }
}
