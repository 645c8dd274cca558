use num_bigint::BigInt;
use proptest::prelude::*;
use qdecide_gadgets::words::{bilinear, gamma, gamma_square, paterson_square_vectors, paterson_x, paterson_y, sigma, words_of_length};

fn word(m: usize, max: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=m, 0..=max)
}

fn concat(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sigma_concatenation_law(m in 2usize..6, (u, w) in (word(5, 8), word(5, 8))) {
        let u: Vec<usize> = u.into_iter().map(|a| (a - 1) % m + 1).collect();
        let w: Vec<usize> = w.into_iter().map(|a| (a - 1) % m + 1).collect();
        let lhs = sigma(&concat(&u, &w), m).unwrap();
        let rhs = num_traits::pow(BigInt::from(m), w.len()) * sigma(&u, m).unwrap() + sigma(&w, m).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gamma_is_a_morphism(u in word(3, 5), w in word(3, 5), u2 in word(3, 5), w2 in word(3, 5)) {
        let lhs = gamma(&concat(&u, &u2), &concat(&w, &w2), 3).unwrap();
        let rhs = gamma(&u, &w, 3).unwrap().matmul(&gamma(&u2, &w2, 3).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gamma_square_is_a_morphism(u in word(2, 4), w in word(2, 4), u2 in word(2, 4), w2 in word(2, 4)) {
        let lhs = gamma_square(&concat(&u, &u2), &concat(&w, &w2), 2).unwrap();
        let rhs = gamma_square(&u, &w, 2).unwrap().matmul(&gamma_square(&u2, &w2, 2).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn square_pairing_is_a_square(u in word(3, 6), w in word(3, 6)) {
        let (x, y) = paterson_square_vectors();
        let v = bilinear(&y, &gamma_square(&u, &w, 3).unwrap(), &x);
        let diff = sigma(&u, 3).unwrap() - sigma(&w, 3).unwrap();
        prop_assert_eq!(v.clone(), &diff * &diff);
        prop_assert_eq!(v == BigInt::from(0), u == w);
    }
}

#[test]
fn pairing_is_the_sigma_difference_on_all_short_words() {
    let all: Vec<Vec<usize>> = (0..=4).flat_map(|n| words_of_length(3, n)).collect();
    for u in &all {
        for w in &all {
            let v = bilinear(&paterson_y(), &gamma(u, w, 3).unwrap(), &paterson_x());
            assert_eq!(v, sigma(u, 3).unwrap() - sigma(w, 3).unwrap());
        }
    }
}

#[test]
fn sigma_is_injective_on_short_words() {
    let mut seen = std::collections::HashSet::new();
    for n in 0..=6 {
        for w in words_of_length(3, n) {
            assert!(seen.insert(sigma(&w, 3).unwrap()), "{w:?}");
        }
    }
}
