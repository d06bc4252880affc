use std::fmt::Write;

use orlicz::{predict_regularity, OrliczError, SobolevParams};

/// The tabulated classes of `u` and `∇u` for `B(t) ≈ t^p (log t)^β` near
/// infinity, with the `Θ` alternative for `∇u`.
pub fn list_predictions(p: f64, beta: f64, sigma: f64, n: usize) -> Result<String, OrliczError> {
    let params = SobolevParams::new(n, sigma)?;
    let pred = predict_regularity(p, beta, &params)?;
    let mut s = String::new();
    writeln!(s, "p = {p}, beta = {beta}, sigma = {sigma}, n = {n}").unwrap();
    writeln!(s, "{pred}").unwrap();
    if n >= 2 {
        writeln!(s, "Θ alternative: ∇u: {}", pred.grad_theta).unwrap();
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subcritical_table_row() {
        let s = list_predictions(1.5, 0.0, 2.0, 2).unwrap();
        assert!(s.contains("u: L^{2,∞}; ∇u: L^{1,∞}"), "{s}");
    }

    #[test]
    fn critical_table_row() {
        let s = list_predictions(2.0, 0.0, 2.0, 2).unwrap();
        assert!(s.contains("u: exp L; ∇u: L^{2,∞}(log L)^{−1}"), "{s}");
    }

    #[test]
    fn non_lipschitz_sigma() {
        let s = list_predictions(3.0, 0.0, 4.0, 2).unwrap();
        assert!(s.contains("u: L^{8,∞}; ∇u: L^{2.666667,∞}"), "{s}");
    }

    #[test]
    fn out_of_table() {
        assert!(matches!(list_predictions(1.0, 0.0, 2.0, 2), Err(OrliczError::OutOfTable(_))));
        assert!(list_predictions(1.5, -1.0, 2.0, 2).is_err());
    }
}
