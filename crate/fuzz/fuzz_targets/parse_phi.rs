#![no_main]

use libfuzzer_sys::fuzz_target;

use arrival::decompose::Ratio;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ratio) = text.parse::<Ratio>() {
        assert!(ratio.den() >= 1);
        // Display and parse are mutually inverse on accepted ratios.
        let back: Ratio = ratio.to_string().parse().expect("display form must parse");
        assert_eq!(back, ratio);
    }
});
