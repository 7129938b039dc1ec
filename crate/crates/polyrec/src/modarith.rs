//! Machine-word modular arithmetic: mulmod/powmod via u128, modular inverse,
//! and deterministic Miller-Rabin primality for u64.

/// `(a * b) mod m` without overflow.
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m`, with `0^0 = 1`.
pub fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, when `gcd(a, m) = 1`.
pub fn invmod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r.abs() != 1 {
        return None;
    }
    let mut inv = old_s * old_r.signum();
    inv = inv.rem_euclid(m as i128);
    Some(inv as u64)
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    // This witness set decides primality for all n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= start`, or `None` on u64 overflow.
pub fn next_prime_at_least(start: u64) -> Option<u64> {
    let mut n = start.max(2);
    loop {
        if is_prime_u64(n) {
            return Some(n);
        }
        n = n.checked_add(1)?;
    }
}
