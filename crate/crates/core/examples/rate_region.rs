//! Boundary of the optimal AF rate region by rate-profile bisection.

use twrc::channel::{effective, gen_channels, PowerConfig};
use twrc::optimal::{max_sum_rate, rate_region_boundary};
use twrc::region::RateProfile;

fn main() -> twrc::Result<()> {
    let pair = gen_channels(4, 0.5, 42)?;
    let eff = effective(&pair);
    let pc = PowerConfig::new(10.0, 10.0, 10.0)?;

    let sr = max_sum_rate(&eff, &pc, &RateProfile::equal(), 1e-4)?;
    println!(
        "equal profile: R in [{:.5}, {:.5}] after {} steps",
        sr.r_sum, sr.r_upper, sr.steps
    );

    let region = rate_region_boundary(&eff, &pc, 9, 1e-3)?;
    for p in &region.points {
        println!("r21 = {:.4}  r12 = {:.4}", p.rates.r21, p.rates.r12);
    }
    print!("{}", region.to_csv_string(Some("optimal"))?);
    Ok(())
}
