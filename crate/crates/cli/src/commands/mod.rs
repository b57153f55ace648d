pub mod export;
pub mod qudit;
pub mod reconstruct;
pub mod robustness;
pub mod table1;
pub mod verify;

/// `PASS` or `FAIL`.
pub fn verdict(passed: bool) -> String {
    if passed { "PASS" } else { "FAIL" }.to_string()
}
