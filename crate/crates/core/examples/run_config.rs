//! Runs an experiment config and prints the report.
//!
//! ```text
//! cargo run -p slow-ads-core --example run_config -- configs/mock-demo.toml
//! ```

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .ok_or("usage: run_config <config.toml>")?;
    let output = slow_ads::runner::run_from_file(path.as_ref())?;
    print!("{}", slow_ads::runner::render_report_tsv(&output.report));
    print!(
        "{}",
        slow_ads::runner::render_stats_tsv(&output.stats.into_iter().collect::<Vec<_>>())
    );
    println!("{:?}", output.budget_ratio);
    Ok(())
}
