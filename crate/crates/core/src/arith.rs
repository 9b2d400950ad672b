//! Small exact integer helpers shared by the algebraic and geometric layers.

use crate::error::{Error, Result};

/// Narrows an `i128` intermediate to `i64`, reporting overflow instead of wrapping.
pub fn narrow(v: i128, what: &'static str) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow(what))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

pub fn gcd_u(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd_u(a, b) * b
    }
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn modp(a: i128, m: i128) -> i128 {
    a.rem_euclid(m)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = xgcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc: u128 = 1;
    let mut b = (base % m) as u128;
    let mm = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % mm;
        }
        b = b * b % mm;
        exp >>= 1;
    }
    acc as u64
}

pub fn is_prime(n: u64) -> bool {
    is_prime128(n as u128)
}

fn mul_mod128(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a % m) * (b % m) % m;
    }
    let (mut a, mut b, mut acc) = (a % m, b % m, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod128(acc, a, m);
        }
        a = add_mod128(a, a, m);
        b >>= 1;
    }
    acc
}

fn add_mod128(a: u128, b: u128, m: u128) -> u128 {
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

fn pow_mod128(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut acc = 1u128 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod128(acc, b, m);
        }
        b = mul_mod128(b, b, m);
        e >>= 1;
    }
    acc
}

/// Miller–Rabin with the first 20 prime bases (deterministic far beyond 2⁶⁴).
pub fn is_prime128(n: u128) -> bool {
    const BASES: [u128; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];
    if n < 2 {
        return false;
    }
    for b in BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for a in BASES {
        let mut x = pow_mod128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod128(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A nontrivial factor of the composite `n` (Pollard–Brent).
fn pollard(n: u128) -> u128 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u128;
    loop {
        let f = |x: u128| add_mod128(mul_mod128(x, x, n), c, n);
        let (mut x, mut y, mut d) = (2u128, 2u128, 1u128);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd128(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Factorization into `(prime, exponent)` pairs, ascending.
pub fn factor128(n: u128) -> Vec<(u128, u32)> {
    let mut primes = Vec::new();
    let mut n = n;
    for d in 2u128..1000 {
        while n % d == 0 {
            primes.push(d);
            n /= d;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime128(m) {
            primes.push(m);
        } else {
            let d = pollard(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    primes.sort();
    let mut out: Vec<(u128, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Factorization into `(prime, exponent)` pairs, ascending.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    factor128(n as u128).into_iter().map(|(p, e)| (p as u64, e)).collect()
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt(n as u128) as i128;
    (r * r == n).then_some(r)
}

/// Kronecker symbol `(d | n)` for `n > 0`.
pub fn kronecker(d: i64, n: u64) -> i32 {
    let mut result = 1i32;
    let mut n = n;
    let a = d as i128;
    if n == 0 {
        return if d.unsigned_abs() == 1 { 1 } else { 0 };
    }
    while n % 2 == 0 {
        n /= 2;
        let r = a.rem_euclid(8);
        if r == 0 || r == 2 || r == 4 || r == 6 {
            return 0;
        }
        if r == 3 || r == 5 {
            result = -result;
        }
    }
    // Jacobi symbol for odd n
    let mut a = a.rem_euclid(n as i128) as u64;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Multiplicative order of `a` modulo `m` (requires gcd(a, m) = 1).
pub fn mult_order(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    if gcd_u(a % m, m) != 1 {
        return None;
    }
    let mut x = a % m;
    let mut k = 1;
    while x != 1 {
        x = ((x as u128 * a as u128) % m as u128) as u64;
        k += 1;
    }
    Some(k)
}

/// Square roots of `a` modulo a prime `p`, by exhaustive search (desk scale).
pub fn sqrt_mod_prime_all(a: i64, p: u64) -> Vec<u64> {
    let a = a.rem_euclid(p as i64) as u64;
    (0..p).filter(|x| x * x % p == a).collect()
}
