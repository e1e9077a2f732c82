#![no_main]

use hht_dsp::dwt::{dwt_multilevel, idwt_multilevel};
use hht_dsp::TimeSeries;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.is_empty() {
        return;
    }
    let levels = (data[0] % 6) as usize + 1;
    let samples: Vec<f64> = data[1..]
        .chunks_exact(8)
        .take(2048)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .filter(|v| v.is_finite() && v.abs() <= 1e3)
        .collect();
    if samples.len() < 2 {
        return;
    }

    let x = TimeSeries::new(samples, 1.0).expect("finite samples accepted");
    let d = dwt_multilevel(&x, levels).expect("valid depth");
    let back = idwt_multilevel(&d).expect("well-formed decomposition");
    assert_eq!(back.len(), x.len());
    for (a, b) in x.samples().iter().zip(back.samples()) {
        assert!((a - b).abs() <= 1e-12, "roundtrip {a} vs {b}");
    }
    let energy = d.coefficient_energy() - d.padding_energy();
    let reference = x.energy();
    assert!(
        (energy - reference).abs() <= 1e-10 * reference.max(1e-300),
        "energy {energy} vs {reference}"
    );
});
