//! GF(2^8) arithmetic with the 0x11d reduction polynomial and generator 2.

const PRIMITIVE: u16 = 0x11d;

pub struct Tables {
    pub exp: [u8; 512],
    pub log: [u8; 256],
}

pub fn tables() -> &'static Tables {
    use std::sync::OnceLock;
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut exp = [0u8; 512];
        let mut log = [0u8; 256];
        let mut x: u16 = 1;
        for (i, slot) in exp.iter_mut().take(255).enumerate() {
            *slot = x as u8;
            log[x as usize] = i as u8;
            x <<= 1;
            if x & 0x100 != 0 {
                x ^= PRIMITIVE;
            }
        }
        // extend periodically so exponent sums up to 510 need no reduction
        for i in 255..512 {
            exp[i] = exp[i % 255];
        }
        Tables { exp, log }
    })
}

#[inline]
pub fn mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        return 0;
    }
    let t = tables();
    t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
}

#[inline]
pub fn div(a: u8, b: u8) -> u8 {
    debug_assert!(b != 0, "division by zero in GF(256)");
    if a == 0 {
        return 0;
    }
    let t = tables();
    t.exp[t.log[a as usize] as usize + 255 - t.log[b as usize] as usize]
}

#[inline]
pub fn inverse(a: u8) -> u8 {
    div(1, a)
}

/// alpha^power for any non-negative power.
#[inline]
pub fn alpha_pow(power: usize) -> u8 {
    tables().exp[power % 255]
}

/// Evaluate a polynomial (ascending coefficient order) at x.
pub fn poly_eval(poly: &[u8], x: u8) -> u8 {
    let mut acc = 0u8;
    for &c in poly.iter().rev() {
        acc = mul(acc, x) ^ c;
    }
    acc
}

/// Product of two polynomials in ascending order.
pub fn poly_mul(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &ca) in a.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        for (j, &cb) in b.iter().enumerate() {
            out[i + j] ^= mul(ca, cb);
        }
    }
    out
}
