//! MRR-MRT and ZFR-ZFT against the optimum along a few rate profiles.

use twrc::channel::{effective, gen_channels, PowerConfig};
use twrc::optimal::max_sum_rate;
use twrc::region::RateProfile;
use twrc::suboptimal::{oneway_alternating, scheme_profile_sum_rate, sweep_region, OneWayPower, Scheme};

fn main() -> twrc::Result<()> {
    let pc = PowerConfig::new(10.0, 10.0, 10.0)?;
    for rho in [0.1, 0.5, 0.8] {
        let pair = gen_channels(4, rho, 42)?;
        let eff = effective(&pair);
        println!("rho = {rho}");
        for alpha in [0.2, 0.5, 0.8] {
            let prof = RateProfile::new(alpha)?;
            let opt = max_sum_rate(&eff, &pc, &prof, 1e-4)?.r_sum;
            let mr = scheme_profile_sum_rate(Scheme::Mr, &pair, &pc, &prof)?.r_sum;
            let zf = scheme_profile_sum_rate(Scheme::Zf, &pair, &pc, &prof)?.r_sum;
            println!("  alpha21 = {alpha}: optimal {opt:.4}, mr {mr:.4}, zf {zf:.4}");
        }
        let mr = sweep_region(Scheme::Mr, &pair, &pc, 33)?;
        println!(
            "  mr sweep: {} pareto points, best sum {:.4}",
            mr.len(),
            mr.max_sum_rate()
        );
        println!(
            "  one-way alternating: {:.4}",
            oneway_alternating(&pair, &pc, OneWayPower::PerSlot)
        );
    }
    Ok(())
}
