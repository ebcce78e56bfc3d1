//! Systematic Reed-Solomon codec over GF(2^8), syndrome decoder with
//! Berlekamp-Massey, Chien search and Forney's algorithm. Codewords are
//! `data ‖ parity` with any parity count up to 255 - 1; shortened blocks
//! decode transparently.

use crate::gf256::{alpha_pow, div, inverse, mul, poly_eval, poly_mul};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsError(pub String);

impl std::fmt::Display for RsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "reed-solomon: {}", self.0)
    }
}

impl std::error::Error for RsError {}

/// Generator polynomial with roots alpha^0 .. alpha^{parity-1}, ascending.
fn generator(parity: usize) -> Vec<u8> {
    let mut g = vec![1u8];
    for i in 0..parity {
        g = poly_mul(&g, &[alpha_pow(i), 1]);
    }
    g
}

/// Parity symbols for a data block.
pub fn encode(data: &[u8], parity: usize) -> Vec<u8> {
    assert!(parity >= 1 && data.len() + parity <= 255, "block too long");
    let g = generator(parity);
    // polynomial long division of data * x^parity by g, remainder out;
    // data[0] is the highest-order coefficient
    let mut rem = vec![0u8; parity];
    for &d in data {
        let factor = d ^ rem[0];
        rem.rotate_left(1);
        rem[parity - 1] = 0;
        if factor != 0 {
            for (r, &gc) in rem.iter_mut().zip(g.iter().rev().skip(1)) {
                *r ^= mul(gc, factor);
            }
        }
    }
    rem
}

fn syndromes(codeword: &[u8], parity: usize) -> Vec<u8> {
    (0..parity)
        .map(|i| {
            let x = alpha_pow(i);
            codeword.iter().fold(0u8, |acc, &c| mul(acc, x) ^ c)
        })
        .collect()
}

/// Correct `codeword` (data ‖ parity) in place; returns the number of
/// corrected symbols or an error when the block is beyond repair.
pub fn correct(codeword: &mut [u8], parity: usize) -> Result<usize, RsError> {
    let n = codeword.len();
    assert!(parity >= 1 && n <= 255 && n > parity);
    let synd = syndromes(codeword, parity);
    if synd.iter().all(|&s| s == 0) {
        return Ok(0);
    }

    // Berlekamp-Massey for the error locator sigma (ascending coefficients)
    let mut sigma = vec![1u8];
    let mut prev = vec![1u8];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut b = 1u8;
    for i in 0..parity {
        let mut delta = synd[i];
        for j in 1..=l.min(sigma.len() - 1) {
            delta ^= mul(sigma[j], synd[i - j]);
        }
        if delta == 0 {
            m += 1;
            continue;
        }
        let coef = div(delta, b);
        let mut candidate = sigma.clone();
        if candidate.len() < prev.len() + m {
            candidate.resize(prev.len() + m, 0);
        }
        for (j, &p) in prev.iter().enumerate() {
            candidate[j + m] ^= mul(coef, p);
        }
        if 2 * l <= i {
            prev = sigma;
            b = delta;
            l = i + 1 - l;
            m = 1;
        } else {
            m += 1;
        }
        sigma = candidate;
    }
    while sigma.last() == Some(&0) {
        sigma.pop();
    }
    let errors = sigma.len() - 1;
    if errors == 0 || 2 * errors > parity {
        return Err(RsError(format!("{errors} errors exceed the correction bound")));
    }

    // Chien search over the block's positions
    let mut positions = Vec::with_capacity(errors);
    for p in 0..n {
        let x_inv = alpha_pow(255 - ((n - 1 - p) % 255));
        if poly_eval(&sigma, x_inv) == 0 {
            positions.push(p);
        }
    }
    if positions.len() != errors {
        return Err(RsError("error locator does not factor over the block".into()));
    }

    // Forney: omega = (synd * sigma) mod x^parity
    let mut omega = poly_mul(&synd, &sigma);
    omega.truncate(parity);
    // formal derivative of sigma: odd-power coefficients shift down
    let sigma_deriv: Vec<u8> = sigma
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| if i % 2 == 1 { c } else { 0 })
        .collect();
    for &p in &positions {
        let x = alpha_pow((n - 1 - p) % 255);
        let x_inv = inverse(x);
        let denom = poly_eval(&sigma_deriv, x_inv);
        if denom == 0 {
            return Err(RsError("degenerate error magnitude".into()));
        }
        let magnitude = mul(x, div(poly_eval(&omega, x_inv), denom));
        codeword[p] ^= magnitude;
    }

    // a decode that does not land on a codeword is a failure, never a
    // silent wrong answer
    if syndromes(codeword, parity).iter().any(|&s| s != 0) {
        return Err(RsError("correction did not restore a codeword".into()));
    }
    Ok(positions.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xorshift(state: &mut u64) -> u64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        *state
    }

    #[test]
    fn parity_matches_known_rate() {
        let data = vec![7u8; 204];
        assert_eq!(encode(&data, 51).len(), 51);
    }

    #[test]
    fn clean_codeword_decodes_unchanged() {
        let data: Vec<u8> = (0..100u32).map(|i| (i * 7) as u8).collect();
        let parity = encode(&data, 20);
        let mut cw = [data.clone(), parity].concat();
        let orig = cw.clone();
        assert_eq!(correct(&mut cw, 20).unwrap(), 0);
        assert_eq!(cw, orig);
    }

    #[test]
    fn corrects_up_to_bound_across_shapes() {
        let mut rng = 0x3cf5_1e2d_u64;
        for &(k, q) in &[(204usize, 51usize), (100, 20), (25, 7), (1, 1), (10, 51), (6, 2)] {
            let t = q / 2;
            for _ in 0..40 {
                let data: Vec<u8> = (0..k).map(|_| xorshift(&mut rng) as u8).collect();
                let parity = encode(&data, q);
                let clean = [data.clone(), parity].concat();
                let n = clean.len();
                let n_errors = if t == 0 { 0 } else { (xorshift(&mut rng) as usize % t) + 1 };
                let mut corrupted = clean.clone();
                let mut hit = std::collections::BTreeSet::new();
                while hit.len() < n_errors {
                    hit.insert(xorshift(&mut rng) as usize % n);
                }
                for &p in &hit {
                    let mut flip = 0u8;
                    while flip == 0 {
                        flip = xorshift(&mut rng) as u8;
                    }
                    corrupted[p] ^= flip;
                }
                let fixed = correct(&mut corrupted, q);
                assert_eq!(fixed.unwrap(), n_errors, "k={k} q={q}");
                assert_eq!(corrupted, clean, "k={k} q={q}");
            }
        }
    }

    #[test]
    fn beyond_bound_fails_cleanly() {
        let mut rng = 0x9e37_79b9_u64;
        for _ in 0..60 {
            let data: Vec<u8> = (0..100).map(|_| xorshift(&mut rng) as u8).collect();
            let parity = encode(&data, 20);
            let clean = [data.clone(), parity].concat();
            let mut corrupted = clean.clone();
            // 2t errors: far past the t=10 bound
            let mut hit = std::collections::BTreeSet::new();
            while hit.len() < 20 {
                hit.insert(xorshift(&mut rng) as usize % corrupted.len());
            }
            for &p in &hit {
                let mut flip = 0u8;
                while flip == 0 {
                    flip = xorshift(&mut rng) as u8;
                }
                corrupted[p] ^= flip;
            }
            match correct(&mut corrupted, 20) {
                Err(_) => {}
                Ok(_) => assert_eq!(corrupted, clean, "silent wrong decode"),
            }
        }
    }

    #[test]
    fn single_error_exhaustive_small_block() {
        let data: Vec<u8> = (1..=20).collect();
        let parity = encode(&data, 4);
        let clean = [data, parity].concat();
        for pos in 0..clean.len() {
            for flip in [1u8, 0x80, 0xff] {
                let mut cw = clean.clone();
                cw[pos] ^= flip;
                assert_eq!(correct(&mut cw, 4).unwrap(), 1);
                assert_eq!(cw, clean);
            }
        }
    }
}
