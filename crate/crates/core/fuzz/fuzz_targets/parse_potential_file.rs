#![no_main]

use boundcount::potential::Potential;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = Potential::from_json(text) {
        let again = Potential::from_json(&v.to_json()).expect("written files load back");
        assert_eq!(again.pieces.len(), v.pieces.len());
        let _ = v.eval(0.5);
    }
});
