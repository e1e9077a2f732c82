#![no_main]

use hht_dsp::io::load_signal_from_reader;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    for rate_override in [None, Some(500.0)] {
        if let Ok(series) = load_signal_from_reader(data, rate_override) {
            assert!(series.len() >= 1);
            assert!(series.sample_rate() > 0.0);
            assert!(series.samples().iter().all(|v| v.is_finite()));
        }
    }
});
