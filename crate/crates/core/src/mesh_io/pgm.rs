//! Binary PGM (P5, maxval 255) encoding and decoding.

use std::fs;
use std::path::Path;

use super::MeshIoError;

/// An 8-bit grayscale raster, row-major, top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// Encodes `P5\nW H\n255\n` followed by the raw bytes.
pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    assert_eq!(
        pixels.len(),
        width * height,
        "pixel buffer does not match {width}x{height}"
    );
    let header = format!("P5\n{width} {height}\n255\n");
    let mut out = Vec::with_capacity(header.len() + pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(pixels);
    out
}

pub fn write_pgm(
    path: &Path,
    width: usize,
    height: usize,
    pixels: &[u8],
) -> Result<(), MeshIoError> {
    fs::write(path, encode_pgm(width, height, pixels)).map_err(|source| MeshIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_pgm(path: &Path) -> Result<GrayImage, MeshIoError> {
    let bytes = fs::read(path).map_err(|source| MeshIoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_pgm(&bytes)
}

/// Decodes a binary P5 image with maxval ≤ 255. Header comments are allowed.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, MeshIoError> {
    let bad = |msg: &str| MeshIoError::Pgm(msg.to_string());
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(bad("missing P5 magic"));
    }
    let mut pos = 2;
    let mut header = [0usize; 3];
    for field in header.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(bad("truncated header")),
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("expected a decimal header field"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("header field out of range"))?;
    }
    let [width, height, maxval] = header;
    if maxval == 0 || maxval > 255 {
        return Err(bad("only 8-bit maxval (1..=255) is supported"));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(bad("missing separator after maxval")),
    }
    let expected = width * height;
    let data = &bytes[pos..];
    if data.len() != expected {
        return Err(MeshIoError::Pgm(format!(
            "expected {expected} raster bytes for {width}x{height}, found {}",
            data.len()
        )));
    }
    Ok(GrayImage {
        width,
        height,
        pixels: data.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zero_2x2() {
        let bytes = encode_pgm(2, 2, &[0; 4]);
        let mut expected = b"P5\n2 2\n255\n".to_vec();
        expected.extend_from_slice(&[0; 4]);
        assert_eq!(bytes, expected);
    }

    #[test]
    fn single_white_pixel() {
        let bytes = encode_pgm(1, 1, &[255]);
        assert_eq!(bytes.last(), Some(&0xFF));
        assert_eq!(bytes.len(), b"P5\n1 1\n255\n".len() + 1);
    }

    #[test]
    fn size_is_header_plus_raster() {
        let bytes = encode_pgm(3, 2, &[1, 2, 3, 4, 5, 6]);
        assert_eq!(bytes.len(), b"P5\n3 2\n255\n".len() + 6);
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!(img.get(2, 1), 6);
        assert_eq!(img.get(0, 1), 4);
    }

    #[test]
    fn header_comments_accepted() {
        let mut bytes = b"P5\n# made by hand\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[7, 9]);
        assert_eq!(decode_pgm(&bytes).unwrap().pixels, vec![7, 9]);
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(decode_pgm(b"P2\n1 1\n255\n0").is_err());
        assert!(decode_pgm(b"P5\n2 2\n255\n\0\0").is_err());
        assert!(decode_pgm(b"P5\n1 1\n65535\n\0\0").is_err());
        assert!(decode_pgm(b"P5\n1").is_err());
    }
}
