//! Capacity upper bounds, scheme lower bounds and their high-SNR gaps.

use twrc::bounds::{asymptotic_gaps, bounds_report, c_ub_sym, r_lb_mr, r_lb_zf};
use twrc::channel::PowerConfig;

fn main() -> twrc::Result<()> {
    let pc = PowerConfig::new(10.0, 20.0, 10.0)?;
    let report = bounds_report(&pc, 1.0, 0.8, 0.3)?;
    println!("{}", serde_json::to_string_pretty(&report)?);

    let rho = 1.0 / 3.0;
    let (mr, zf) = asymptotic_gaps(rho)?;
    println!("limit gaps at rho = 1/3: mr {mr:.6}, zf {zf:.6}");
    for db in [10.0, 20.0, 30.0, 40.0] {
        let p = 10f64.powf(db / 10.0);
        let pc = PowerConfig::new(p, p, p)?;
        let ub = c_ub_sym(1.0, p);
        println!(
            "{db:>4} dB: C_UB = {ub:.4}, gaps mr {:.4}, zf {:.4}",
            ub - r_lb_mr(&pc, 1.0, 1.0, rho)?,
            ub - r_lb_zf(&pc, 1.0, 1.0, rho)?
        );
    }
    Ok(())
}
