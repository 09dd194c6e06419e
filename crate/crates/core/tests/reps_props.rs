use glpos::eisenstein::haar_sample;
use glpos::linalg::{is_orthogonal, minor_sequence, MinorDirection};
use glpos::reps::{
    compound, iso_projection_trace, ktype_norm, ktype_operator, lowest_ktype, normal_form,
    weyl_act, ACharacter, HighestWeight, MCharacter, WeylElement,
};
use glpos::rng::{self, Domain, Gaussian};
use glpos::{SquareMatrix, Tolerances};
use proptest::prelude::*;

fn gaussian_matrix(n: usize, seed: u64, index: u64) -> SquareMatrix {
    let mut g = Gaussian::new(rng::stream(Domain::Test, seed, index));
    let mut data = vec![0.0; n * n];
    g.fill(&mut data);
    SquareMatrix::new(n, data).unwrap()
}

fn permutation(n: usize, seed: u64) -> WeylElement {
    let all = WeylElement::all(n);
    all[(seed % all.len() as u64) as usize].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn compound_is_multiplicative(n in 1usize..=5, r in 0usize..=5, seed in any::<u64>()) {
        prop_assume!(r <= n);
        let a = gaussian_matrix(n, seed, 0);
        let b = gaussian_matrix(n, seed, 1);
        let lhs = compound(&(&a * &b), r).unwrap();
        let rhs = &compound(&a, r).unwrap() * &compound(&b, r).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9);
    }

    #[test]
    fn ktype_operator_is_orthogonal(n in 1usize..=6, r in 0usize..=6, seed in any::<u64>(), idx in 0u64..100) {
        prop_assume!(r <= n);
        let k = haar_sample(n, seed, idx).unwrap();
        let desc = lowest_ktype(r, n).unwrap();
        let op = ktype_operator(&k, &desc, &Tolerances::default()).unwrap();
        prop_assert_eq!(op.n(), desc.dim);
        prop_assert!(is_orthogonal(&op, 1e-9));
    }

    #[test]
    fn iso_trace_is_leading_minor(n in 1usize..=8, r in 0usize..=8, seed in any::<u64>(), idx in 0u64..100) {
        prop_assume!(r <= n / 2);
        let k = haar_sample(n, seed, idx).unwrap();
        let desc = lowest_ktype(r, n).unwrap();
        let t = iso_projection_trace(&k, &desc, &Tolerances::default()).unwrap();
        let expected = if r == 0 { 1.0 } else { minor_sequence(&k, MinorDirection::Leading)[r - 1] };
        prop_assert!((t - expected).abs() <= 1e-10);
    }

    #[test]
    fn weyl_action_is_a_group_action(n in 1usize..=6, s1 in any::<u64>(), s2 in any::<u64>(), bits in any::<u8>()) {
        let eps: Vec<u8> = (0..n).map(|i| bits >> i & 1).collect();
        let delta = MCharacter::new(eps).unwrap();
        let nu = ACharacter::new((0..n).map(|i| i as f64 * 0.25 - 0.5).collect()).unwrap();
        let a = permutation(n, s1);
        let b = permutation(n, s2);
        let (d1, n1) = weyl_act(&b, &delta, &nu).unwrap();
        let (d2, n2) = weyl_act(&a, &d1, &n1).unwrap();
        let (d3, n3) = weyl_act(&a.compose(&b), &delta, &nu).unwrap();
        prop_assert_eq!(d2, d3);
        prop_assert_eq!(n2, n3);
    }

    #[test]
    fn normal_form_reaches_delta_r(n in 1usize..=8, bits in any::<u8>()) {
        let eps: Vec<u8> = (0..n).map(|i| bits >> i & 1).collect();
        let delta = MCharacter::new(eps).unwrap();
        let (r, sigma) = normal_form(&delta);
        let normal = MCharacter::normal(r, n).unwrap();
        let (image, _) = weyl_act(&sigma, &normal, &ACharacter::trivial(n)).unwrap();
        prop_assert_eq!(image, delta);
    }
}

#[test]
fn norm_increases_with_wedge_degree() {
    for n in 2..=8usize {
        let m = n / 2;
        let norms: Vec<f64> = (0..=m)
            .map(|j| {
                let b = (0..m).map(|i| i64::from(i < j)).collect();
                ktype_norm(&HighestWeight::new(n, b).unwrap())
            })
            .collect();
        assert!(norms.windows(2).all(|w| w[0] < w[1]), "n = {n}: {norms:?}");
    }
}
