#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(e) = boundcount::expr::parse(src) {
        // Printing and re-parsing must not panic either.
        let _ = boundcount::expr::parse(&e.to_string());
    }
});
