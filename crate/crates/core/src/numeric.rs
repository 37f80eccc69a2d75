//! Small numerical helpers shared by the inference and entropy modules.

/// `p ln p` with the `0 ln 0 = 0` convention.
#[inline]
pub fn xlogx(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// Shannon entropy (nats) of a probability vector.
pub fn entropy(probs: &[f64]) -> f64 {
    -probs.iter().map(|&p| xlogx(p)).sum::<f64>()
}

/// `a / b`, with any division by zero mapped to zero.
///
/// Used wherever a zero denominator is only reachable together with a zero
/// numerator weight (for example `L_{t+1}(k) / G_{t+1}(k)`).
#[inline]
pub(crate) fn ratio_or_zero(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Adds another partial sum, keeping both compensations.
    #[inline]
    pub fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.compensation += other.compensation;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a sequence of values.
pub fn stable_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

/// Renders a float like C's `%.{digits}g`: fixed or scientific notation,
/// trailing zeros removed. Output is platform independent.
pub fn format_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_conventions() {
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
        assert!((entropy(&[0.5, 0.5]) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(xlogx(0.0), 0.0);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut values = vec![1e16];
        values.extend(std::iter::repeat_n(1.0, 1000));
        values.push(-1e16);
        assert_eq!(stable_sum(values.iter().copied()), 1000.0);
    }

    #[test]
    fn format_g_matches_printf() {
        assert_eq!(format_g(1.0, 12), "1");
        assert_eq!(format_g(0.5, 12), "0.5");
        assert_eq!(format_g(std::f64::consts::LN_2, 12), "0.69314718056");
        assert_eq!(format_g(1.1, 12), "1.1");
        assert_eq!(format_g(0.5 + 0.6, 12), "1.1");
        assert_eq!(format_g(123456789012345.0, 12), "1.23456789012e+14");
        assert_eq!(format_g(0.000012345, 12), "1.2345e-05");
        assert_eq!(format_g(0.0001, 12), "0.0001");
        assert_eq!(format_g(-2.5, 12), "-2.5");
        assert_eq!(format_g(-0.0, 12), "0");
        assert_eq!(format_g(100.0, 12), "100");
    }
}
