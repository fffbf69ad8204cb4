use super::clickset::{check_pair, ClickSet};
use crate::error::Result;

/// Mean L1 distance over all cross pairs, each axis divided by the object size.
pub fn pl1(a: &ClickSet, b: &ClickSet) -> Result<f64> {
    check_pair(a, b)?;
    let na = a.normalized();
    let nb = b.normalized();
    let mut total = 0.0;
    for p in &na {
        for q in &nb {
            total += (p.0 - q.0).abs() + (p.1 - q.1).abs();
        }
    }
    Ok(total / (na.len() * nb.len()) as f64)
}
