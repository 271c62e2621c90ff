//! Fixed-order compensated summation.

/// Neumaier-compensated sum, evaluated strictly left to right.
pub(crate) fn neumaier<I: IntoIterator<Item = f64>>(items: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in items {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
