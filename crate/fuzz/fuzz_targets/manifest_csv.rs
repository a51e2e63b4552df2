//! The corpus manifest parser must reject arbitrary bytes with an error,
//! never a panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use toposig::pipeline::CorpusManifest;

fuzz_target!(|data: &[u8]| {
    let _ = CorpusManifest::parse_csv(data);
});
