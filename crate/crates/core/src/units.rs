//! dB / dBm / linear conversions.

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

#[inline]
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for v in [-174.0, -96.0, 0.0, 1.78, 30.0] {
            assert!((watts_to_dbm(dbm_to_watts(v)) - v).abs() < 1e-12);
            assert!((linear_to_db(db_to_linear(v)) - v).abs() < 1e-12);
        }
        assert_eq!(dbm_to_watts(30.0), 1.0);
    }
}
