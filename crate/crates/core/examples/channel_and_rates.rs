//! Draws a channel pair with a prescribed correlation and evaluates the
//! rates of a few relay matrices.

use twrc::channel::{effective, gen_channels, rate_pair, relay_power, Beamformer, PowerConfig};
use twrc::suboptimal::{direct_relay, mrr_mrt};

fn main() -> twrc::Result<()> {
    let pair = gen_channels(4, 0.5, 42)?;
    let pc = PowerConfig::new(10.0, 10.0, 10.0)?;
    println!(
        "M = {}, rho = {:.4}, theta = ({:.4}, {:.4})",
        pair.m(),
        pair.correlation(),
        pair.theta1(),
        pair.theta2()
    );

    for (name, a) in [
        ("direct", direct_relay(&pair, &pc)?),
        ("mrr-mrt", mrr_mrt(&pair, 1.0, &pc)?),
    ] {
        let r = rate_pair(&a, &pair, &pc);
        println!(
            "{name:>8}: r21 = {:.4}, r12 = {:.4}, relay power = {:.4}",
            r.r21,
            r.r12,
            relay_power(&a, &pair, &pc)
        );
    }

    // any relay matrix acts only through its 2x2 image in the channel frame
    let eff = effective(&pair);
    let a = mrr_mrt(&pair, 1.0, &pc)?;
    let back = Beamformer::from_full(&a, &eff).lift(&eff);
    println!(
        "reduced round trip error = {:.2e}",
        rate_pair(&back, &pair, &pc).sum() - rate_pair(&a, &pair, &pc).sum()
    );
    Ok(())
}
