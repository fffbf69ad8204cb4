//! Pearson and Spearman correlation between per-instance measurements, for
//! example NoC under different click sources.

use clickbench::harness::correlation_report;

fn main() -> clickbench::Result<()> {
    let names = ["baseline NoC", "sampled NoC", "object area"];
    // one row per instance
    let table = vec![
        vec![2.0, 3.1, 5200.0],
        vec![1.0, 1.4, 9100.0],
        vec![4.0, 6.2, 800.0],
        vec![3.0, 3.9, 2100.0],
        vec![1.0, 2.0, 7600.0],
        vec![6.0, 9.5, 350.0],
    ];
    let report = correlation_report(&table)?;
    for (i, row) in report.iter().enumerate() {
        for (j, c) in row.iter().enumerate().skip(i + 1) {
            let show = |v: Option<f64>| v.map_or_else(|| "-".into(), |v| format!("{v:+.3}"));
            println!(
                "{:>13} ~ {:<12} pearson {}  spearman {}",
                names[i],
                names[j],
                show(c.pearson),
                show(c.spearman)
            );
        }
    }
    Ok(())
}
