//! Length and mass schedules, the product floor and the NDRoNS mass loss.
use anderson2p::msa::{ndrons_mass, next_mass_lower_bound, MsaSchedule};

fn main() -> anderson2p::Result<()> {
    let s = MsaSchedule::build(3, 1.5, 3, 0.5, 0.5)?;
    println!("{:>3} {:>6} {:>10}", "k", "L_k", "m_k");
    for (k, (l, m)) in s.lengths.iter().zip(&s.masses).enumerate() {
        println!("{k:>3} {l:>6} {m:>10.6}");
    }
    println!("mass product {:.6}, floor ok: {}", s.mass_product, s.product_floor_ok);

    for gamma in [0.3, 0.6, 0.65, 1.0] {
        let s = MsaSchedule::build(3, 1.5, 3, 0.5, gamma)?;
        println!("gamma {gamma:<5} product {:.6} floor ok {}", s.mass_product, s.product_floor_ok);
    }

    for l in [11, 36, 216] {
        let n = ndrons_mass(1.0, l, 1);
        println!("L={l:<4} m'=1 -> {:.4} (loss {:.4}, half-mass ok {})", n.mass, n.loss, n.half_mass_ok);
    }
    // The (E,J)-CNR mass update only becomes positive at large scales.
    for l in [36u64, 3174, 178_884] {
        match next_mass_lower_bound(0.5, 3, l) {
            Ok(m) => println!("L={l}: next mass >= {m:.4}"),
            Err(e) => println!("L={l}: {e}"),
        }
    }
    Ok(())
}
