//! Minimum relay power for a pair of SNR targets via the SDP relaxation and
//! rank-one recovery.

use twrc::channel::{effective, gen_channels, snr_pair_reduced, PowerConfig};
use twrc::optimal::min_relay_power;

fn main() -> twrc::Result<()> {
    let pair = gen_channels(4, 0.3, 1)?;
    let eff = effective(&pair);
    let pc = PowerConfig::new(10.0, 10.0, 10.0)?;
    for target in [0.5, 2.0, 5.0] {
        let mp = min_relay_power(&eff, &pc, target, target)?;
        match mp.beamformer {
            Some(bf) => {
                let (s21, s12) = snr_pair_reduced(&bf, &eff, &pc);
                println!(
                    "target {target}: p* = {:.6} (relaxation {:.6}), snr = ({s21:.4}, {s12:.4})",
                    mp.p_star, mp.relaxed_objective
                );
            }
            None => println!("target {target}: unreachable at any relay power"),
        }
    }
    Ok(())
}
