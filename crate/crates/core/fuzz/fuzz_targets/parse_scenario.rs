// SPDX-License-Identifier: Apache-2.0

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        // Any input either parses or yields a typed error; it must not panic.
        if let Ok(s) = wigner_dilation::scenario::parse_scenario(text) {
            let times = s.time.times();
            assert_eq!(times.len(), s.time.n_points);
            assert!(s.system.n() >= 0.0);
        }
    }
});
