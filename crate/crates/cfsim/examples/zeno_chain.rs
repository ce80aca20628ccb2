//! The quantum Zeno effect in a chained interferometer: many weak looks
//! beat one strong look.
//!
//! N small-angle beam splitters rotate the photon from Alice's rail toward
//! Bob's. If Bob blocks his rail, each cycle's tiny excursion is absorbed
//! with probability sin²(π/2N) and the rotation restarts, so the photon
//! survives on Alice's side with probability cos²ᴺ(π/2N) → 1. If Bob does
//! nothing, the rotations add up to a full π/2 and the photon always
//! crosses. Run with `cargo run --example zeno_chain`.

use cfsim::optics::PhotonState;
use cfsim::protocols::{build_zeno, zeno_blocked_survival, BobAction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let input = PhotonState::vacuum();

    println!("cycles   P(DA|block)  closed form   P(absorbed)   P(DB|open)");
    println!("------   -----------  -----------   -----------   ----------");
    for cycles in [1usize, 2, 5, 10, 50, 250] {
        let blocked = build_zeno(cycles, BobAction::Block)?;
        let open = build_zeno(cycles, BobAction::Open)?;
        let db = blocked.circuit.run_fock(&input)?;
        let od = open.circuit.run_fock(&input)?;
        println!(
            "{cycles:>6}   {:>11.6}  {:>11.6}   {:>11.6}   {:>10.6}",
            db.probability("DA"),
            zeno_blocked_survival(cycles),
            db.probability("B"),
            od.probability("DB"),
        );
    }

    println!();
    println!("Blocking keeps the photon out of Bob's rail (survival → 1 as");
    println!("cycles grow); opening guarantees it crosses. Reading DA vs DB");
    println!("is reading Bob's choice, and in the blocked case the photon");
    println!("that carried the answer never entered his laboratory.");
    Ok(())
}
