use crate::{Error, Result};

/// Cronbach's alpha for a persons × k table of item scores, using sample
/// variances (n − 1 denominator).
pub fn cronbach_alpha(scores: &[Vec<f64>]) -> Result<f64> {
    let n = scores.len();
    let k = scores.first().map_or(0, Vec::len);
    if k < 2 {
        return Err(Error::invalid("cronbach's alpha needs at least two items"));
    }
    if n < 2 {
        return Err(Error::invalid(
            "cronbach's alpha needs at least two respondents",
        ));
    }
    if scores
        .iter()
        .any(|r| r.len() != k || r.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::invalid(
            "score table must be complete and rectangular",
        ));
    }
    let var = |vals: &mut dyn Iterator<Item = f64>| -> f64 {
        let v: Vec<f64> = vals.collect();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    };
    let item_var: f64 = (0..k).map(|j| var(&mut scores.iter().map(|r| r[j]))).sum();
    let total_var = var(&mut scores.iter().map(|r| r.iter().sum::<f64>()));
    if total_var <= 0.0 {
        return Err(Error::Undefined("alpha"));
    }
    let k = k as f64;
    Ok(k / (k - 1.0) * (1.0 - item_var / total_var))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_columns() {
        let t: Vec<Vec<f64>> = [1.0, 3.0, 2.0, 5.0].iter().map(|&v| vec![v, v]).collect();
        assert!((cronbach_alpha(&t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uncorrelated_equal_variance() {
        // columns (1,1,-1,-1) and (1,-1,1,-1): zero covariance, equal variance
        let t = vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ];
        assert!(cronbach_alpha(&t).unwrap().abs() < 1e-12);
    }

    #[test]
    fn hand_evaluated() {
        // a=(1,2,3,4): var 5/3; b=(1,2,3,5): var 35/12; a+b=(2,4,6,9): var 107/12
        // alpha = 2·(1 − (20/12 + 35/12)/(107/12)) = 2·52/107
        let t = vec![
            vec![1.0, 1.0],
            vec![2.0, 2.0],
            vec![3.0, 3.0],
            vec![4.0, 5.0],
        ];
        assert!((cronbach_alpha(&t).unwrap() - 104.0 / 107.0).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_undefined() {
        let t = vec![vec![2.0, 2.0], vec![2.0, 2.0]];
        assert!(matches!(cronbach_alpha(&t), Err(Error::Undefined("alpha"))));
        assert!(cronbach_alpha(&[vec![1.0]]).is_err());
    }
}
