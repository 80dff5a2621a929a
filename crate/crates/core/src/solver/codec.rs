//! Compact byte encodings for canonical element payloads.

use super::KeyBytes;

#[inline]
pub fn put_varint(out: &mut KeyBytes, mut v: u64) {
    while v >= 0x80 {
        out.push((v as u8) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

#[inline]
pub fn get_varint(b: &[u8], pos: &mut usize) -> u64 {
    let mut v = 0u64;
    let mut shift = 0;
    loop {
        let byte = b[*pos];
        *pos += 1;
        v |= ((byte & 0x7f) as u64) << shift;
        if byte < 0x80 {
            return v;
        }
        shift += 7;
    }
}

#[inline]
pub fn put_signed(out: &mut KeyBytes, v: i64) {
    put_varint(out, ((v << 1) ^ (v >> 63)) as u64);
}

#[inline]
pub fn get_signed(b: &[u8], pos: &mut usize) -> i64 {
    let u = get_varint(b, pos);
    ((u >> 1) as i64) ^ -((u & 1) as i64)
}

/// Length-prefixed byte run.
pub fn put_bytes(out: &mut KeyBytes, bytes: &[u8]) {
    put_varint(out, bytes.len() as u64);
    out.extend_from_slice(bytes);
}

pub fn get_bytes<'a>(b: &'a [u8], pos: &mut usize) -> &'a [u8] {
    let n = get_varint(b, pos) as usize;
    let s = &b[*pos..*pos + n];
    *pos += n;
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_round_trip() {
        for v in [0i64, 1, -1, 63, -64, 300, -300, i64::MAX / 3, i64::MIN / 3] {
            let mut out = KeyBytes::new();
            put_signed(&mut out, v);
            let mut pos = 0;
            assert_eq!(get_signed(&out, &mut pos), v);
            assert_eq!(pos, out.len());
        }
    }
}
