//! Seeded generation of guarded systems for stress corpora.
//!
//! A guarded system `y_i - (c_i + x * p_i(x, y))` always satisfies the
//! solvability hypotheses with `r0 = c`: the value at the origin vanishes
//! by construction and the Jacobian there is the identity.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::parse::PolySystem;
use crate::poly::{Monomial, Polynomial};
use crate::rat::{rat, Rat};
use crate::var::{VarId, VarOrder};

fn random_inner_poly(rng: &mut ChaCha8Rng, n: u32, max_deg: u32, max_terms: usize) -> Polynomial {
    let mut p = Polynomial::zero();
    let terms = rng.gen_range(1..=max_terms);
    for _ in 0..terms {
        let mut pairs = Vec::new();
        let mut budget = max_deg;
        if rng.gen_bool(0.3) && budget > 0 {
            let e = rng.gen_range(1..=budget);
            budget -= e;
            pairs.push((VarId::X, e));
        }
        for i in 1..=n {
            if budget > 0 && rng.gen_bool(0.5) {
                let e = rng.gen_range(1..=budget);
                budget -= e;
                pairs.push((VarId::Y(i), e));
            }
        }
        let c = loop {
            let c = rng.gen_range(-5i64..=5);
            if c != 0 {
                break c;
            }
        };
        p.add_term(Monomial::from_pairs(pairs), rat(c));
    }
    p
}

/// A guarded system with `n` unknowns named `y1..yn`, reproducible from the
/// seed.
pub fn random_guarded_system(seed: u64, n: usize) -> PolySystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let mut equations = Vec::with_capacity(n);
    let mut r0: Vec<Rat> = Vec::with_capacity(n);
    let x = Polynomial::var(VarId::X);
    for i in 1..=n {
        let c = rat(rng.gen_range(-3i64..=3));
        let inner = random_inner_poly(&mut rng, n as u32, 2, 3);
        let eq = Polynomial::var(VarId::Y(i as u32))
            .sub(&Polynomial::constant(c.clone()))
            .sub(&x.mul(&inner));
        equations.push(eq);
        r0.push(c);
    }
    PolySystem {
        names,
        equations,
        r0,
        order: VarOrder::identity(n),
    }
}

/// A uniformly shuffled variable order on `n` unknowns.
pub fn random_order(seed: u64, n: usize) -> VarOrder {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<u32> = (1..=n as u32).collect();
    perm.shuffle(&mut rng);
    VarOrder::from_permutation(&perm).unwrap()
}
