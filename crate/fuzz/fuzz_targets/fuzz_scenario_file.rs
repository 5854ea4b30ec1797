//! Fuzzes the scenario file parser: arbitrary input may be rejected
//! with an error but must never panic.

#![no_main]

use fdrthresh::simulate::SimulationScenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = SimulationScenario::parse(text);
});
