use rand::Rng;

use crate::error::{Error, Result};
use crate::fields::{inverse, Fe, FiniteField, Matrix};
use crate::jordan::JordanType;
use crate::theta::CommutingTuple;

/// A random partition of `n` with parts at most `p`.
pub fn random_jordan_type<G: Rng + ?Sized>(p: u32, n: usize, rng: &mut G) -> JordanType {
    let mut left = n;
    let mut parts = Vec::new();
    while left > 0 {
        let k = rng.gen_range(1..=left.min(p as usize));
        parts.push(k);
        left -= k;
    }
    let mut counts = vec![0; p as usize];
    for k in parts {
        counts[k - 1] += 1;
    }
    JordanType::new(p, counts).expect("parts bounded by p")
}

pub fn random_invertible<G: Rng + ?Sized>(field: &FiniteField, n: usize, rng: &mut G) -> Matrix<Fe> {
    loop {
        let data = (0..n * n).map(|_| field.random(rng)).collect();
        let m = Matrix::from_vec(n, n, data);
        if inverse(field, &m).is_ok() {
            return m;
        }
    }
}

/// `r` commuting p-nilpotent `n x n` matrices, each a random polynomial
/// without constant term in one conjugated nilpotent `N = P J P^{-1}`.
pub fn random_commuting_tuple<G: Rng + ?Sized>(
    field: &FiniteField,
    n: usize,
    r: usize,
    rng: &mut G,
) -> Result<CommutingTuple<Fe>> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidArgument("tuple size and height must be positive".into()));
    }
    let p = field.characteristic();
    let j = random_jordan_type(p, n, rng).realize(field);
    let pm = random_invertible(field, n, rng);
    let nil = pm.mul(field, &j).mul(field, &inverse(field, &pm)?);
    let mats = (0..r)
        .map(|_| {
            let mut acc = Matrix::zeros(field, n, n);
            let mut power = nil.clone();
            for _ in 1..p {
                acc = acc.add(field, &power.scale(field, field.random(rng)));
                power = power.mul(field, &nil);
            }
            acc
        })
        .collect();
    CommutingTuple::new(field, mats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_tuples_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (p, n) in [(2, 4), (3, 5), (5, 7)] {
            let f = FiniteField::prime(p).unwrap();
            for r in 1..4 {
                let t = random_commuting_tuple(&f, n, r, &mut rng).unwrap();
                assert_eq!((t.height(), t.size()), (r, n));
            }
        }
        let g = FiniteField::new(3, 2).unwrap();
        assert!(random_commuting_tuple(&g, 3, 2, &mut rng).is_ok());
        assert_eq!(random_jordan_type(3, 8, &mut rng).dim(), 8);
    }
}
