#![no_main]

use hht_dsp::emd::{decompose, SiftConfig, StopCriterion};
use hht_dsp::TimeSeries;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.is_empty() {
        return;
    }
    let criterion = if data[0] & 1 == 0 {
        StopCriterion::Sd
    } else {
        StopCriterion::SNumber
    };
    let samples: Vec<f64> = data[1..]
        .chunks_exact(8)
        .take(512)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .filter(|v| v.is_finite() && v.abs() <= 1e6)
        .collect();
    if samples.len() < 4 {
        return;
    }

    let x = TimeSeries::new(samples, 100.0).expect("finite samples accepted");
    let config = SiftConfig { criterion, ..Default::default() };
    let d = decompose(&x, &config).expect("decompose is total on finite input");
    let bound = 1e-9 * x.max_abs().max(f64::MIN_POSITIVE);
    assert!(
        d.reconstruction_error() <= bound,
        "reconstruction error {} over bound {}",
        d.reconstruction_error(),
        bound
    );
    assert!(d.imfs().len() <= config.effective_max_imfs(x.len()));
});
