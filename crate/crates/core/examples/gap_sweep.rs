//! Gap versus signal power, written as CSV to stdout.

use thermal_capacity::cli::{sweep, write_csv, SweepSpec};


fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SweepSpec {
        lambda: "0.5".parse()?,
        n_env: "0.5:5:3".parse()?,
        n_signal: "0.1:1000:8:log".parse()?,
    };
    let rows = sweep(&spec)?;
    write_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}
