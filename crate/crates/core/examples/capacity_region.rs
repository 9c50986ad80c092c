//! Capacity region as the union of rate regions over source powers.

use twrc::channel::gen_channels;
use twrc::optimal::{capacity_region, power_axis};

fn main() -> twrc::Result<()> {
    let pair = gen_channels(4, 0.5, 42)?;
    println!("source power axis: {:?}", power_axis(10.0, 4));
    let region = capacity_region(&pair, 10.0, 10.0, 10.0, 4, 9, 1e-3)?;
    for p in &region.points {
        println!("r21 = {:.4}  r12 = {:.4}", p.rates.r21, p.rates.r12);
    }
    println!("sum capacity estimate {:.4}", region.max_sum_rate());
    Ok(())
}
