//! Fixtures shared by the benchmarks.

use expcycle_core::numtheory::{is_prime, smallest_primitive_root};
use expcycle_core::ExpMapParams;

/// Smallest prime `>= 2^(m-1)` with its smallest primitive root.
pub fn dyadic_fixture(m: u32) -> ExpMapParams {
    let p = (1u64 << (m - 1)..).find(|&n| is_prime(n)).unwrap();
    let g = smallest_primitive_root(p).unwrap();
    ExpMapParams::new(p, g).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures() {
        let f = dyadic_fixture(16);
        assert_eq!((f.p(), f.g()), (32771, 2));
        assert!(f.is_primitive_root());
    }
}
