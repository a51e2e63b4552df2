//! Image decoding faces untrusted files; decode failures must be errors,
//! never panics. Small successful decodes also run channel extraction and
//! filtration construction, covering the numeric entry path.

#![no_main]

use libfuzzer_sys::fuzz_target;
use toposig::cubical::build_filtration;
use toposig::imaging::{decode_image, extract_channels, Channel};

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = decode_image(data) {
        if img.width() * img.height() <= 64 * 64 {
            let channels = extract_channels(&img);
            let complex = build_filtration(channels.get(Channel::Gray));
            assert_eq!(
                complex.vertex_count(),
                (img.width() * img.height()) as usize
            );
        }
    }
});
