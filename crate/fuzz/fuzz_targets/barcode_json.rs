//! Cached barcode files are revalidated on load; arbitrary bytes must
//! come back as integrity errors, never panics. Accepted files must
//! survive a serialize round trip.

#![no_main]

use libfuzzer_sys::fuzz_target;
use toposig::persistence::format::BarcodeFile;

fuzz_target!(|data: &[u8]| {
    if let Ok(file) = BarcodeFile::from_json_bytes(data) {
        let barcode = file.to_barcode().expect("validated file converts");
        let reencoded = BarcodeFile::from_barcode(&file.image_id, file.channel, &barcode);
        let bytes = reencoded.to_json_bytes();
        let reparsed = BarcodeFile::from_json_bytes(&bytes).expect("round trip parses");
        assert_eq!(reparsed.intervals, file.intervals);
    }
});
