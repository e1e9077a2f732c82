#![no_main]

use hht_dsp::hsa::analytic_signal;
use hht_dsp::TimeSeries;
use libfuzzer_sys::fuzz_target;
use std::f64::consts::PI;

fuzz_target!(|data: &[u8]| {
    let samples: Vec<f64> = data
        .chunks_exact(8)
        .take(1024)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .filter(|v| v.is_finite() && v.abs() <= 1e6)
        .collect();
    if samples.len() < 4 {
        return;
    }

    let x = TimeSeries::new(samples, 250.0).expect("finite samples accepted");
    let sig = analytic_signal(&x).expect("analytic signal is total on finite input");

    let amp = sig.amplitude().samples();
    let re = sig.real_part().samples();
    let im = sig.imag_part().samples();
    for k in 0..x.len() {
        let lhs = amp[k] * amp[k];
        let rhs = re[k] * re[k] + im[k] * im[k];
        assert!(
            (lhs - rhs).abs() <= 1e-12 * lhs.max(1.0),
            "amplitude identity off at {k}: {lhs} vs {rhs}"
        );
    }
    if sig.degenerate_samples().is_empty() {
        for pair in sig.phase_unwrapped().samples().windows(2) {
            let d = pair[1] - pair[0];
            assert!(d > -PI && d <= PI, "phase jump {d}");
        }
    }
    assert!(sig
        .instantaneous_frequency()
        .samples()
        .iter()
        .all(|v| v.is_finite()));
});
