//! Fuzzes the statistics file parser: arbitrary input may be rejected
//! with an error but must never panic.

#![no_main]

use fdrthresh::cli::parse_statistics;
use fdrthresh::models::StatisticScale;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // The CLI reads files as text, so non-UTF-8 input never reaches the
    // parser.
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for scale in [
        StatisticScale::ZScore,
        StatisticScale::PValue,
        StatisticScale::NativeY,
    ] {
        let _ = parse_statistics(text, None, scale);
    }
    // Drive the column lookup with a name taken from the header itself.
    if let Some(header) = text.lines().next() {
        let sep = if header.contains('\t') { '\t' } else { ',' };
        if let Some(name) = header.split(sep).next() {
            let _ = parse_statistics(text, Some(name.trim()), StatisticScale::ZScore);
        }
    }
});
