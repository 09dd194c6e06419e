use glpos::decomp::{cartan, exp_p0_sample, h_projection, iwasawa, kappa};
use glpos::eisenstein::haar_sample;
use glpos::kappa_image::{membership, preimage_in_p0, symmetrize_right};
use glpos::linalg::{is_orthogonal, jacobi_sym_eig, minor_sequence, MinorDirection};
use glpos::rng::{self, Domain, Gaussian};
use glpos::{SquareMatrix, Tolerances};
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn well_conditioned(n: usize, seed: u64) -> SquareMatrix {
    let mut g = Gaussian::new(rng::stream(Domain::Test, seed, n as u64));
    let mut data = vec![0.0; n * n];
    g.fill(&mut data);
    let a = SquareMatrix::new(n, data).unwrap();
    &a + &SquareMatrix::identity(n).scale(n as f64)
}

fn reversal(n: usize) -> SquareMatrix {
    SquareMatrix::permutation(&(0..n).rev().collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kappa_cocycle(n in 1usize..=6, seed in any::<u64>(), idx in 0u64..1000) {
        let g = well_conditioned(n, seed);
        let k0 = haar_sample(n, seed, idx).unwrap();
        let lhs = kappa(&(&g * &k0), &tol()).unwrap();
        let rhs = &kappa(&g, &tol()).unwrap() * &k0;
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9);
    }

    #[test]
    fn h_right_k_invariant(n in 1usize..=6, seed in any::<u64>(), idx in 0u64..1000) {
        let g = well_conditioned(n, seed);
        let k0 = haar_sample(n, seed, idx).unwrap();
        let h1 = h_projection(&g, &tol()).unwrap();
        let h2 = h_projection(&(&g * &k0), &tol()).unwrap();
        for (a, b) in h1.iter().zip(&h2) {
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }
    }

    #[test]
    fn kappa_commutes_with_signs(n in 1usize..=6, seed in any::<u64>(), mask in any::<u8>()) {
        let g = well_conditioned(n, seed);
        let signs: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let m = SquareMatrix::diag(&signs);
        let lhs = kappa(&(&(&m * &g) * &m), &tol()).unwrap();
        let rhs = &(&m * &kappa(&g, &tol()).unwrap()) * &m;
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9);
    }

    #[test]
    fn iwasawa_factor_shapes(n in 1usize..=8, seed in any::<u64>()) {
        let g = well_conditioned(n, seed);
        let f = iwasawa(&g, &tol()).unwrap();
        prop_assert!(f.n_part.is_upper_triangular());
        prop_assert!(f.n_part.diagonal().iter().all(|&d| d == 1.0));
        prop_assert!(f.a_part.iter().all(|&a| a > 0.0));
        prop_assert!(is_orthogonal(&f.k_part, tol().ortho_tol));
    }

    #[test]
    fn cartan_factor_shapes(n in 1usize..=8, seed in any::<u64>()) {
        let g = well_conditioned(n, seed);
        let f = cartan(&g, &tol()).unwrap();
        prop_assert!(is_orthogonal(&f.k_part, tol().ortho_tol));
        prop_assert!(f.p_part.asymmetry() <= tol().ortho_tol);
        let eig = jacobi_sym_eig(&f.p_part, &tol()).unwrap();
        prop_assert!(eig.values.iter().all(|&v| v > 0.0));
        prop_assert!(f.reconstruct().max_abs_diff(&g) <= 1e-10 * g.max_abs());
    }

    #[test]
    fn spd_kappa_in_image(n in 2usize..=6, seed in any::<u64>()) {
        let p = exp_p0_sample(n, seed);
        let rep = membership(&kappa(&p, &tol()).unwrap(), &tol()).unwrap();
        prop_assert!(rep.in_image);
        prop_assert!(rep.trailing_minors.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn reversal_swaps_minor_sequences(n in 2usize..=6, seed in any::<u64>(), idx in 0u64..1000) {
        // With w the reversal, the leading minors of w B w are the trailing minors of B.
        let b = haar_sample(n, seed, idx).unwrap();
        let w = reversal(n);
        let c = &(&w * &b) * &w;
        let lead = minor_sequence(&c, MinorDirection::Leading);
        let trail = minor_sequence(&b, MinorDirection::Trailing);
        for (x, y) in lead.iter().zip(&trail) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        // Conjugation by w preserves the image when B has positive minors.
        if minor_sequence(&b, MinorDirection::Leading).iter().all(|&v| v > 1e-6) {
            prop_assert!(membership(&c, &tol()).unwrap().in_image);
            prop_assert!(preimage_in_p0(&c, &tol()).is_ok());
        }
    }

    #[test]
    fn symmetrizer_is_exact_and_unique(n in 2usize..=6, seed in any::<u64>(), idx in 0u64..1000) {
        let Some(b) = (idx..idx + 1000)
            .map(|i| haar_sample(n, seed, i).unwrap())
            .find(|b| minor_sequence(b, MinorDirection::Leading).iter().all(|&v| v > 1e-6))
        else {
            return Ok(());
        };
        let c = symmetrize_right(&b, &tol()).unwrap();
        for i in 0..n {
            prop_assert_eq!(c.get(i, i), 1.0);
            for j in 0..i {
                prop_assert_eq!(c.get(i, j), 0.0);
            }
        }
        // B^T symmetrized from the right is positive definite.
        let bt = b.transpose();
        let ct = symmetrize_right(&bt, &tol()).unwrap();
        let s = &bt * &ct;
        let s = (&s + &s.transpose()).scale(0.5);
        let eig = jacobi_sym_eig(&s, &tol()).unwrap();
        prop_assert!(eig.values.iter().all(|&v| v > 0.0));
        // Uniqueness: the construction is a pure function of B.
        prop_assert_eq!(symmetrize_right(&b, &tol()).unwrap(), c);
    }
}
