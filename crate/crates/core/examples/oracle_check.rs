//! Cross-checks the SDP optimum with a derivative-free search over the
//! beamformer itself.

use twrc::channel::{effective, gen_channels, PowerConfig};
use twrc::optimal::{max_sum_rate, min_relay_power};
use twrc::oracle::{oracle_max_sum_rate, oracle_min_power};
use twrc::region::RateProfile;

fn main() -> twrc::Result<()> {
    let pair = gen_channels(3, 0.6, 9)?;
    let eff = effective(&pair);
    let pc = PowerConfig::new(5.0, 12.0, 8.0)?;
    let prof = RateProfile::new(0.3)?;

    let sdp = max_sum_rate(&eff, &pc, &prof, 1e-5)?;
    let w = oracle_max_sum_rate(&eff, &pc, &prof, 32, 2000, 7)?;
    println!(
        "sum-rate: sdp [{:.6}, {:.6}], oracle {:.6}",
        sdp.r_sum, sdp.r_upper, w.r_sum
    );

    let mp = min_relay_power(&eff, &pc, 1.0, 2.0)?;
    if let Some(wp) = oracle_min_power(&eff, &pc, 1.0, 2.0, 32, 2000, 7)? {
        println!("min power: sdp {:.6}, oracle {:.6}", mp.p_star, wp.power);
    }
    Ok(())
}
