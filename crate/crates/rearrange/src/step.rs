use std::io::{self, Write};

use numeric::Real;

/// Non-increasing, right-continuous step function on `[0, s_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<T> {
    breakpoints: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> StepFunction<T> {
    pub(crate) fn from_parts(breakpoints: Vec<T>, values: Vec<T>) -> Self {
        debug_assert_eq!(breakpoints.len(), values.len() + 1);
        StepFunction { breakpoints, values }
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn support_end(&self) -> T {
        *self.breakpoints.last().unwrap()
    }

    /// Value at `s`; zero at and beyond the right end.
    pub fn eval(&self, s: T) -> T {
        let j = self.breakpoints.partition_point(|b| *b <= s);
        if j == 0 || j > self.values.len() {
            return T::zero();
        }
        self.values[j - 1]
    }

    /// `|{s : f(s) > t}|`.
    pub fn measure_above(&self, t: T) -> T {
        let j = self.values.partition_point(|v| *v > t);
        self.breakpoints[j]
    }

    /// `∫₀ˢ f`.
    pub fn integral_to(&self, s: T) -> T {
        let mut acc = T::zero();
        for (j, &v) in self.values.iter().enumerate() {
            let (a, b) = (self.breakpoints[j], self.breakpoints[j + 1]);
            if s <= a {
                break;
            }
            acc += v * (b.min(s) - a);
        }
        acc
    }

    /// Pointwise `min(f, t)`.
    pub fn clamp_above(&self, t: T) -> Self {
        let mut breakpoints = vec![T::zero()];
        let mut values: Vec<T> = Vec::new();
        for (j, &v) in self.values.iter().enumerate() {
            let v = v.min(t);
            if values.last() == Some(&v) {
                *breakpoints.last_mut().unwrap() = self.breakpoints[j + 1];
            } else {
                values.push(v);
                breakpoints.push(self.breakpoints[j + 1]);
            }
        }
        StepFunction { breakpoints, values }
    }

    /// Two-column CSV `s,value`, one row per breakpoint with the value on its right.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "s,value")?;
        for (s, v) in self.breakpoints.iter().zip(&self.values) {
            writeln!(w, "{:e},{:e}", s.to_f64_lossy(), v.to_f64_lossy())?;
        }
        if let Some(end) = self.breakpoints.last() {
            writeln!(w, "{:e},0", end.to_f64_lossy())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows() {
        let f = StepFunction::from_parts(vec![0.0, 0.5, 1.0], vec![3.0, 1.0]);
        let mut out = Vec::new();
        f.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "s,value\n0e0,3e0\n5e-1,1e0\n1e0,0\n");
    }

    #[test]
    fn clamp_merges_steps() {
        let f = StepFunction::from_parts(vec![0.0, 0.5, 1.0, 2.0], vec![3.0, 2.0, 1.0]);
        let g = f.clamp_above(2.0);
        assert_eq!(g.breakpoints(), &[0.0, 1.0, 2.0]);
        assert_eq!(g.values(), &[2.0, 1.0]);
    }
}
