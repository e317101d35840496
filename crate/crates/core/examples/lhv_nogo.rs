//! Enumerate the local deterministic strategies, print the certificate and
//! re-verify it after a JSON round trip.

use hardy_toolkit::lhv::{nogo_certificate, recheck, NoGoCertificate};

fn main() {
    let cert = nogo_certificate();
    println!("{} strategies, {} survive the three zero constraints:", cert.strategy_count, cert.survivors.len());
    for s in &cert.survivors {
        println!("  {s}");
    }
    println!("survivors producing 11-+: {}", cert.survivors_reaching_target.len());
    for step in &cert.chain {
        println!("  {} => {}  (constraint #{})", step.premise, step.conclusion, step.constraint);
    }
    println!("  contradicts {}", cert.contradicts);
    println!(
        "quantum witness: p(11-+) = {:.6} under theta = ({:.4}, {:.4})",
        cert.quantum_witness.probability, cert.quantum_witness.family.theta_left, cert.quantum_witness.family.theta_right
    );

    let json = serde_json::to_string(&cert).unwrap();
    let restored: NoGoCertificate = serde_json::from_str(&json).unwrap();
    let summary = recheck(&restored).expect("certificate rechecks");
    println!("recheck after round trip: {summary:?}");

    let mut forged = restored.clone();
    forged.survivors.pop();
    println!("recheck of a tampered certificate: {:?}", recheck(&forged).unwrap_err());
}
