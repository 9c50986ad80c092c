//! Decode-and-forward region: MAC pentagon, BC frontier and their
//! time-shared intersection, next to the AF capacity region.

use twrc::channel::gen_channels;
use twrc::df::{df_capacity_region, half_mac_within_half_bc};
use twrc::optimal::capacity_region;

fn main() -> twrc::Result<()> {
    let pair = gen_channels(4, 0.5, 42)?;
    let p = 100.0;
    let df = df_capacity_region(&pair, p, p, p, 17, 17)?;
    println!(
        "MAC: c1 = {:.4}, c2 = {:.4}, sum = {:.4}",
        df.mac.c1, df.mac.c2, df.mac.c_sum
    );
    println!(
        "half MAC inside half BC: {}",
        half_mac_within_half_bc(&df.mac, &df.bc, 1e-9)
    );
    let best = df
        .per_tau
        .iter()
        .max_by(|a, b| a.polygon.area().total_cmp(&b.polygon.area()))
        .unwrap();
    println!(
        "largest region at tau = {:.4}, area {:.4}",
        best.tau,
        best.polygon.area()
    );
    println!("DF best sum-rate {:.4}", df.envelope.max_sum_rate());

    let af = capacity_region(&pair, p, p, p, 3, 9, 1e-3)?;
    println!("AF best sum-rate {:.4}", af.max_sum_rate());
    Ok(())
}
