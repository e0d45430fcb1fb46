use charp_core::cohom::{
    b1_dims, chi_b1, frobenius_htop_map, frobenius_htop_map_full, h0_quotient_basis,
    htop_kernel_basis, HypersurfaceDatum,
};
use charp_core::criteria::fedder_is_split;
use charp_core::families::random_hypersurface;
use charp_core::{FpMatrix, Monomial, MultiPoly, PrimeField};
use proptest::prelude::*;

const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

fn poly_strategy(nvars: usize) -> impl Strategy<Value = MultiPoly> {
    (
        prop::sample::select(PRIMES.to_vec()),
        prop::collection::vec((prop::collection::vec(0u32..4, nvars), 0u32..13), 0..6),
    )
        .prop_map(move |(p, terms)| {
            let field = PrimeField::new(p).unwrap();
            MultiPoly::from_terms(field, nvars, terms.into_iter().map(|(e, c)| (Monomial::new(e), c)))
        })
}

fn same_field_triple() -> impl Strategy<Value = (MultiPoly, MultiPoly, MultiPoly)> {
    (1usize..4).prop_flat_map(|nvars| {
        (poly_strategy(nvars), poly_strategy(nvars), poly_strategy(nvars)).prop_map(|(a, b, c)| {
            let field = a.field();
            let rebase = |f: MultiPoly| {
                MultiPoly::from_terms(field, f.nvars(), f.terms().map(|(m, c)| (m.clone(), c)).collect::<Vec<_>>())
            };
            (a, rebase(b), rebase(c))
        })
    })
}

fn matrix_strategy() -> impl Strategy<Value = FpMatrix> {
    (prop::sample::select(PRIMES.to_vec()), 1usize..7, 1usize..7).prop_flat_map(|(p, r, c)| {
        prop::collection::vec(0u32..13, r * c)
            .prop_map(move |e| FpMatrix::new(PrimeField::new(p).unwrap(), r, c, e).unwrap())
    })
}

fn naive_pow(f: &MultiPoly, e: u64) -> MultiPoly {
    let mut acc = MultiPoly::one(f.field(), f.nvars());
    for _ in 0..e {
        acc = acc.mul(f).unwrap();
    }
    acc
}

proptest! {
    #[test]
    fn pow_matches_repeated_multiplication(f in (1usize..4).prop_flat_map(poly_strategy), e in 0u64..7) {
        prop_assert_eq!(f.pow(e).unwrap(), naive_pow(&f, e));
    }

    #[test]
    fn frobenius_scales_exponents(f in (1usize..4).prop_flat_map(poly_strategy)) {
        let p = f.modulus();
        prop_assert_eq!(f.pow(p as u64).unwrap(), f.scale_exponents(p).unwrap());
    }

    #[test]
    fn ring_axioms((a, b, c) in same_field_triple()) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.add(&b).unwrap().mul(&c).unwrap(),
            a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap()
        );
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn coefficients_agree_with_term_listing(f in (1usize..4).prop_flat_map(poly_strategy)) {
        for (m, c) in f.terms() {
            prop_assert_eq!(f.coeff(m).value, c);
            prop_assert!(c != 0);
        }
    }

    #[test]
    fn display_round_trips(f in (1usize..4).prop_flat_map(poly_strategy)) {
        // the zero polynomial prints as a bare "0", which is not a term
        prop_assume!(!f.is_zero());
        let text = f.to_string();
        let back = MultiPoly::parse(&text, f.modulus() as u64, f.nvars()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn parser_never_panics(text in "\\PC{0,40}", p in prop::sample::select(PRIMES.to_vec())) {
        let _ = MultiPoly::parse(&text, p, 3);
    }

    #[test]
    fn parser_never_panics_on_grammar_soup(text in "[x0-9^*+ -]{0,40}") {
        let _ = MultiPoly::parse(&text, 5, 4);
    }

    #[test]
    fn rank_nullity(m in matrix_strategy()) {
        let (basis, free) = m.kernel();
        prop_assert_eq!(m.rank() + basis.len(), m.cols());
        prop_assert_eq!(free.len(), basis.len());
        prop_assert_eq!(m.rank(), m.transpose().rank());
        for v in &basis {
            prop_assert!(m.apply(v).unwrap().iter().all(|&e| e == 0));
        }
    }

    #[test]
    fn stable_rank_is_a_similarity_invariant(
        m in (prop::sample::select(PRIMES.to_vec()), 1usize..5).prop_flat_map(|(p, n)| {
            prop::collection::vec(0u32..13, n * n)
                .prop_map(move |e| FpMatrix::new(PrimeField::new(p).unwrap(), n, n, e).unwrap())
        }),
        ops in prop::collection::vec((0usize..5, 0usize..5, 1u32..13), 0..8),
    ) {
        let field = m.field();
        let n = m.rows();
        let mut conj = FpMatrix::identity(field, n);
        let mut inv = FpMatrix::identity(field, n);
        for (i, j, c) in ops {
            let (i, j) = (i % n, j % n);
            if i == j {
                continue;
            }
            let mut e = FpMatrix::identity(field, n);
            e.set(i, j, c);
            let mut e_inv = FpMatrix::identity(field, n);
            e_inv.set(i, j, field.neg(c % field.modulus()));
            conj = conj.mul(&e).unwrap();
            inv = e_inv.mul(&inv).unwrap();
        }
        prop_assert_eq!(conj.mul(&inv).unwrap(), FpMatrix::identity(field, n));
        let similar = conj.mul(&m).unwrap().mul(&inv).unwrap();
        prop_assert_eq!(similar.stable_rank().unwrap(), m.stable_rank().unwrap());
        prop_assert_eq!(similar.rank(), m.rank());
    }
}

fn small_hypersurface() -> impl Strategy<Value = HypersurfaceDatum> {
    (
        prop::sample::select(vec![2u64, 3, 5]),
        2usize..4,
        1u32..5,
        any::<u64>(),
    )
        .prop_filter_map("no smooth sample", |(p, n, d, seed)| {
            let d = if n == 3 { d.min(4) } else { d };
            random_hypersurface(p, n, d, seed).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn euler_characteristic_is_additive(x in small_hypersurface(), s in -2i64..3) {
        let row = b1_dims(&x, s);
        prop_assert_eq!(row.euler_characteristic(), chi_b1(&x, s));
        if s == 0 {
            prop_assert_eq!(row.euler_characteristic(), 0);
        }
    }

    #[test]
    fn serre_duality_dimensions(x in small_hypersurface(), m in -4i64..3) {
        let dual = x.canonical_level() - m;
        prop_assert_eq!(htop_kernel_basis(&x, m).len(), h0_quotient_basis(&x, dual).len());
    }

    #[test]
    fn frobenius_does_not_depend_on_target_coordinates(x in small_hypersurface(), m in -2i64..1) {
        let fast = frobenius_htop_map(&x, m);
        let full = frobenius_htop_map_full(&x, m);
        prop_assert_eq!(fast.matrix, full.matrix);
    }

    #[test]
    fn ranks_are_permutation_invariant(
        x in small_hypersurface(),
        perm in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let perm: Vec<usize> = perm.into_iter().filter(|&i| i < x.nvars()).collect();
        let y = x.permute_vars(&perm).unwrap();
        for s in -1..=1 {
            let (a, b) = (frobenius_htop_map(&x, s), frobenius_htop_map(&y, s));
            prop_assert_eq!(a.rank(), b.rank());
            prop_assert_eq!(b1_dims(&x, s).dims, b1_dims(&y, s).dims);
        }
        if x.degree() as usize <= x.n() + 1 {
            prop_assert_eq!(
                fedder_is_split(&x).unwrap().is_positive(),
                fedder_is_split(&y).unwrap().is_positive()
            );
        }
    }
}
