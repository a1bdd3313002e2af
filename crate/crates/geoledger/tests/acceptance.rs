use std::io::Write;

use geoledger::acceptance::{run_all, AcceptanceOptions, CRITERIA};

#[test]
fn acceptance_grid() {
    let results = run_all(&[], &AcceptanceOptions::default()).expect("grid runs");
    assert_eq!(results.len(), CRITERIA.len());
    // written to the handle directly so the table shows up without --nocapture
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for r in &results {
        writeln!(out, "{}", r.line()).unwrap();
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.pass()).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
