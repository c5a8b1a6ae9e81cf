//! Small-prime utilities: a plain Eratosthenes table and trial division.

/// Floor of the square root, exact for all `u64`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).map_or(true, |sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// All primes `p <= limit`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    // odd-only table: index i stands for 2i+1
    let half = limit / 2 + 1;
    let mut composite = vec![false; half];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = vec![2];
    out.extend(
        (1..half)
            .filter(|&i| !composite[i] && 2 * i + 1 <= limit)
            .map(|i| (2 * i + 1) as u64),
    );
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d <= n / d {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime table sized for factoring every value up to `max_value`.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn for_max_value(max_value: u64) -> Self {
        Self {
            primes: primes_up_to(isqrt(max_value)),
        }
    }

    /// Factorization as ascending `(prime, exponent)` pairs. Values whose
    /// square root exceeds the table fall back to odd trial division.
    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        if n <= 1 {
            return out;
        }
        for &p in &self.primes {
            if p > n / p {
                break;
            }
            if n % p == 0 {
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                out.push((p, e));
            }
        }
        let last = self.primes.last().copied().unwrap_or(1);
        if n > 1 && last.saturating_mul(last) < n {
            let mut d = if last < 3 { 3 } else { last + 2 };
            if d % 2 == 0 {
                d += 1;
            }
            while d <= n / d {
                if n % d == 0 {
                    let mut e = 0;
                    while n % d == 0 {
                        n /= d;
                        e += 1;
                    }
                    out.push((d, e));
                }
                d += 2;
            }
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }
}

pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    PrimeTable::for_max_value(n.min(1 << 40)).factorize(n)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
