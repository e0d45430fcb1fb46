//! Verdict-level criteria: Frobenius splitting, ordinarity, Ulrich and ACM
//! checks for `B^1_X`, Künneth products, and the numerical Ulrich-twist
//! obstruction on surfaces.

use std::ops::RangeInclusive;

use crate::cohom::{
    b1_dims, chi_b1, frobenius_htop_map, frobenius_htop_map_full, hasse_witt,
    pushforward_twist_dims, B1Table, HypersurfaceDatum,
};
use crate::error::{Error, Result};
use crate::poly::Monomial;
use crate::verdict::{
    AcmCell, AcmEvidence, EquivalenceEvidence, Evidence, FedderBranch, FedderEvidence,
    KunnethCell, KunnethEvidence, ObstructionEvidence, ObstructionRow, OrdinaryEvidence,
    PushforwardEvidence, UlrichEvidence, Verdict, VerdictKind, VerdictValue,
};

/// Default ACM window half-width, `max(2d, p)`.
pub fn default_window(x: &HypersurfaceDatum) -> i64 {
    (2 * x.degree() as i64).max(x.p() as i64)
}

/// Fedder's criterion for `X = V(f)` with `d <= n + 1`.
///
/// For `d = n + 1` the coefficient of `(x_0 ... x_n)^{p-1}` in `f^{p-1}`
/// decides. For `d < n + 1` the verdict is the general membership test
/// `f^{p-1} not in (x_0^p, ..., x_n^p)`, which can fail (the Fermat cubic
/// surface at `p = 2` is one case).
pub fn fedder_is_split(x: &HypersurfaceDatum) -> Result<Verdict> {
    let d = x.degree() as usize;
    let n = x.n();
    if d > n + 1 {
        return Err(Error::UnsupportedRange(format!(
            "Fedder test implemented for d <= n+1, got d = {d}, n = {n}"
        )));
    }
    let p = x.p();
    let power = x.frobenius_power();
    let first_small = power
        .terms()
        .find(|(m, _)| m.exponents().iter().all(|&e| e < p));
    let general_membership = first_small.is_some();
    let diagonal = Monomial::diagonal(x.nvars(), p - 1);
    let (branch, witness, coefficient) = if d == n + 1 {
        let c = power.coeff(&diagonal).value;
        assert_eq!(
            c != 0,
            general_membership,
            "Fedder coefficient and membership test disagree"
        );
        (FedderBranch::CalabiYau, diagonal, c)
    } else {
        match first_small {
            Some((m, c)) => (FedderBranch::LowDegree, m.clone(), c),
            None => (FedderBranch::LowDegree, diagonal, 0),
        }
    };
    Ok(Verdict::holds(
        VerdictKind::Split,
        coefficient != 0,
        Evidence::Fedder(FedderEvidence {
            branch,
            coefficient,
            witness_monomial: witness.exponents().to_vec(),
            general_membership,
        }),
    ))
}

fn require_curve(x: &HypersurfaceDatum) -> Result<u64> {
    x.genus().ok_or_else(|| {
        Error::Precondition(format!("expected a plane curve, got n = {}", x.n()))
    })
}

/// Ordinary iff the Hasse–Witt matrix is invertible. Reports the p-rank.
pub fn is_ordinary_curve(x: &HypersurfaceDatum) -> Result<Verdict> {
    let genus = require_curve(x)?;
    let hw = hasse_witt(x)?;
    let rank = hw.rank();
    let p_rank = hw.stable_rank()?;
    Ok(Verdict::holds(
        VerdictKind::Ordinary,
        rank as u64 == genus,
        Evidence::Ordinary(OrdinaryEvidence {
            genus,
            hasse_witt: hw.to_rows(),
            rank,
            p_rank,
        }),
    ))
}

/// `B^1_X(1) ⊗ O^r` is Ulrich iff `B^1_X` has no cohomology at twist 0.
pub fn ulrich_rank_multiplier(x: &HypersurfaceDatum, r: u64) -> Result<Verdict> {
    let genus = require_curve(x)?;
    if r == 0 {
        return Err(Error::Precondition("rank multiplier must be positive".into()));
    }
    let row = b1_dims(x, 0);
    let ordinary = is_ordinary_curve(x)?.is_positive();
    let ulrich = row.is_zero();
    assert_eq!(ulrich, ordinary, "Ulrich and ordinary verdicts disagree");
    let p = x.p() as u64;
    let dims: Vec<u64> = row.dims.iter().map(|h| h * r).collect();
    let value = if ulrich {
        VerdictValue::Holds
    } else {
        let index = dims.iter().position(|&h| h != 0).unwrap_or(0);
        VerdictValue::FailsAt {
            twist: 0,
            index,
            dimension: dims[index],
        }
    };
    Ok(Verdict::new(
        VerdictKind::Ulrich,
        value,
        Evidence::Ulrich(UlrichEvidence {
            genus,
            bundle_rank: (p - 1) * r,
            bundle_degree: (p as i64 - 1) * (genus as i64 - 1) * r as i64,
            multiplier: r,
            b1_dims: dims,
            ordinary,
        }),
    ))
}

pub fn ulrich_check_curve(x: &HypersurfaceDatum) -> Result<Verdict> {
    ulrich_rank_multiplier(x, 1)
}

/// ACM check for `B^1_X` on a hypersurface of dimension at least 2.
///
/// Only `H^{n-2}(B^1_X(m))`, the kernel of Frobenius on top cohomology, can
/// be nonzero among the middle groups. It is checked for `m` in
/// `[-window, d - n - 1]`; above that range the source vanishes.
pub fn acm_check_b1(x: &HypersurfaceDatum, window: i64) -> Result<Verdict> {
    if x.dim() < 2 {
        return Err(Error::Precondition(format!(
            "ACM check needs dim X >= 2, got {}",
            x.dim()
        )));
    }
    let top = x.canonical_level();
    let from = -window.max(0);
    let certified = match fedder_is_split(x) {
        Ok(v) => v.is_positive(),
        Err(Error::UnsupportedRange(_)) => false,
        Err(e) => return Err(e),
    };
    let cells: Vec<AcmCell> = (from.min(top)..=top)
        .map(|m| {
            let map = frobenius_htop_map(x, m);
            AcmCell {
                twist: m,
                source_dim: map.source_dim() as u64,
                kernel_dim: map.kernel_dim() as u64,
            }
        })
        .collect();
    // the failure closest to twist 0 is the most reproducible witness
    let failure = cells.iter().rev().find(|c| c.kernel_dim != 0);
    let index = x.n() - 2;
    let value = match (failure, certified) {
        (Some(c), _) => VerdictValue::FailsAt {
            twist: c.twist,
            index,
            dimension: c.kernel_dim,
        },
        (None, true) => VerdictValue::CertifiedBySplitting,
        (None, false) => VerdictValue::WindowVerified {
            from: from.min(top),
            to: top,
        },
    };
    Ok(Verdict::new(
        VerdictKind::Acm,
        value,
        Evidence::Acm(AcmEvidence {
            certified_by_splitting: certified,
            window: (from.min(top), top),
            consistent: !(certified && failure.is_some()),
            cells,
            vacuous_from: top + 1,
            closed_form_zero_indices: (1..=x.n().saturating_sub(3)).collect(),
        }),
    ))
}

/// Three independent checks on a Calabi–Yau hypersurface: the Fedder
/// coefficient, `h^{dim-1}(B^1_X) = 0`, and injectivity of Frobenius on
/// `H^{dim}(O_X)`. The verdict is whether they agree.
pub fn fsplit_equivalence_check(x: &HypersurfaceDatum) -> Result<Verdict> {
    if x.canonical_level() != 0 || x.dim() < 2 {
        return Err(Error::Precondition(format!(
            "equivalence check needs d = n+1 and dim X >= 2, got d = {}, n = {}",
            x.degree(),
            x.n()
        )));
    }
    let fedder = fedder_is_split(x)?;
    let Evidence::Fedder(fe) = &fedder.evidence else {
        unreachable!("Fedder verdict without Fedder evidence")
    };
    let h = b1_dims(x, 0).dims[x.dim() - 1];
    let injective = frobenius_htop_map_full(x, 0).matrix.kernel_basis().is_empty();
    let split = fedder.is_positive();
    let consistent = split == (h == 0) && split == injective;
    Ok(Verdict::new(
        VerdictKind::Equivalence,
        if consistent {
            VerdictValue::Consistent
        } else {
            VerdictValue::Inconsistent
        },
        Evidence::Equivalence(EquivalenceEvidence {
            fedder_split: split,
            fedder_coefficient: fe.coefficient,
            b1_h_dim_minus_one: h,
            frobenius_injective: injective,
        }),
    ))
}

/// `F_*(O_X)(m)` has cohomology `O_X(pm)`; on a hypersurface the middle
/// groups vanish for every twist.
pub fn pushforward_acm_check(x: &HypersurfaceDatum, window: i64) -> Result<Verdict> {
    if x.dim() < 2 {
        return Err(Error::Precondition(format!(
            "ACM check needs dim X >= 2, got {}",
            x.dim()
        )));
    }
    let w = window.max(0);
    let cells: Vec<_> = (-w..=w).map(|m| pushforward_twist_dims(x, m)).collect();
    let middle_indices: Vec<usize> = (1..x.dim()).collect();
    let failure = cells.iter().find_map(|c| {
        middle_indices
            .iter()
            .find(|&&i| c.dims[i] != 0)
            .map(|&i| (c.twist, i, c.dims[i]))
    });
    let value = match failure {
        Some((twist, index, dimension)) => VerdictValue::FailsAt {
            twist,
            index,
            dimension,
        },
        None => VerdictValue::CertifiedForHypersurfaces,
    };
    Ok(Verdict::new(
        VerdictKind::Acm,
        value,
        Evidence::Pushforward(PushforwardEvidence {
            window: (-w, w),
            cells,
            middle_indices,
        }),
    ))
}

/// Ulrich conditions for `E = ⊠ B^1_{X_i}(i)` on a product of curves.
///
/// `tables[i]` must hold `(h^0, h^1)` of `B^1_{X_{i+1}}(s)` for every `s` in
/// `[1 - m, m - 1]`, `m = tables.len()`.
pub fn kunneth_ulrich_check(tables: &[B1Table]) -> Result<Verdict> {
    let m = tables.len();
    if m == 0 {
        return Err(Error::Precondition("at least one factor required".into()));
    }
    let span = m as i64 - 1;
    for (i, table) in tables.iter().enumerate() {
        for s in -span..=span {
            let row = table.row(s).ok_or_else(|| {
                Error::Precondition(format!("factor {} has no row at twist {s}", i + 1))
            })?;
            if row.dims.len() != 2 {
                return Err(Error::Precondition(format!(
                    "factor {} is not a curve",
                    i + 1
                )));
            }
        }
    }
    let cohomology = |k: usize, t: i64| -> u64 {
        let mut total = 0u64;
        for alpha in 0u32..(1 << m) {
            if alpha.count_ones() as usize != k {
                continue;
            }
            let mut term = 1u64;
            for (i, table) in tables.iter().enumerate() {
                let s = i as i64 + 1 - t;
                let row = table.row(s).expect("checked above");
                term *= row.dims[((alpha >> i) & 1) as usize];
                if term == 0 {
                    break;
                }
            }
            total += term;
        }
        total
    };
    let mut cells = Vec::new();
    for k in 1..=m {
        let t = k as i64;
        cells.push(KunnethCell {
            condition: "H^k(E(-k))".into(),
            k,
            t,
            value: cohomology(k, t),
        });
    }
    for k in 0..m {
        let t = k as i64 + 1;
        cells.push(KunnethCell {
            condition: "H^k(E(-k-1))".into(),
            k,
            t,
            value: cohomology(k, t),
        });
    }
    let first_failure = cells.iter().find(|c| c.value != 0).cloned();
    let value = match &first_failure {
        Some(c) => VerdictValue::FailsAt {
            twist: -c.t,
            index: c.k,
            dimension: c.value,
        },
        None => VerdictValue::Holds,
    };
    Ok(Verdict::new(
        VerdictKind::Ulrich,
        value,
        Evidence::Kunneth(KunnethEvidence {
            factors: m,
            window: (-span, span),
            cells,
            first_failure,
        }),
    ))
}

/// Decides the obstruction from rows of `(t, chi(E(t-1)), chi(E(t-2)))`.
/// Passing is a necessary condition only.
pub fn obstruction_verdict(rows: Vec<ObstructionRow>) -> Verdict {
    let admissible: Vec<i64> = rows
        .iter()
        .filter(|r| r.chi_minus_one == 0 && r.chi_minus_two == 0)
        .map(|r| r.t)
        .collect();
    let value = if admissible.is_empty() {
        VerdictValue::Obstructed
    } else {
        VerdictValue::ObstructionPassed
    };
    Verdict::new(
        VerdictKind::Obstruction,
        value,
        Evidence::Obstruction(ObstructionEvidence { rows, admissible }),
    )
}

/// An Ulrich bundle `E` on a surface has `chi(E(-1)) = chi(E(-2)) = 0`;
/// tests that condition for `B^1_X(t)` over a range of `t`.
pub fn ulrich_twist_obstruction(
    x: &HypersurfaceDatum,
    twists: RangeInclusive<i64>,
) -> Result<Verdict> {
    if x.dim() != 2 {
        return Err(Error::Precondition(format!(
            "obstruction check needs a surface, got dim X = {}",
            x.dim()
        )));
    }
    let chi = |s: i64| -> Result<i64> {
        i64::try_from(chi_b1(x, s)).map_err(|_| Error::ExponentOverflow)
    };
    let rows = twists
        .map(|t| {
            Ok(ObstructionRow {
                t,
                chi_minus_one: chi(t - 1)?,
                chi_minus_two: chi(t - 2)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(obstruction_verdict(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_fermat, random_plane_curve};

    fn fedder_witness(v: &Verdict) -> u32 {
        match &v.evidence {
            Evidence::Fedder(e) => e.coefficient,
            _ => panic!("wrong evidence"),
        }
    }

    #[test]
    fn fedder_examples() {
        let v = fedder_is_split(&make_fermat(3, 3, 4).unwrap()).unwrap();
        assert!(!v.is_positive());
        assert_eq!(fedder_witness(&v), 0);
        let v = fedder_is_split(&make_fermat(5, 3, 4).unwrap()).unwrap();
        assert!(v.is_positive());
        assert_eq!(fedder_witness(&v), 4);
        for p in [2, 3, 7] {
            let conic = HypersurfaceDatum::parse("x0^2 + x1*x2", p, 2).unwrap();
            assert!(fedder_is_split(&conic).unwrap().is_positive());
        }
        // low degree but not split
        let cubic = make_fermat(2, 3, 3).unwrap();
        assert!(!fedder_is_split(&cubic).unwrap().is_positive());
        let quintic_curve = make_fermat(3, 2, 5).unwrap();
        assert!(matches!(
            fedder_is_split(&quintic_curve),
            Err(Error::UnsupportedRange(_))
        ));
    }

    #[test]
    fn ordinary_examples() {
        let v = is_ordinary_curve(&make_fermat(7, 2, 3).unwrap()).unwrap();
        assert!(v.is_positive());
        let Evidence::Ordinary(e) = &v.evidence else { panic!() };
        assert_eq!((e.p_rank, e.hasse_witt.clone()), (1, vec![vec![6]]));
        let v = is_ordinary_curve(&make_fermat(2, 2, 3).unwrap()).unwrap();
        assert!(!v.is_positive());
        let conic = HypersurfaceDatum::parse("x0^2 + x1*x2", 5, 2).unwrap();
        assert!(is_ordinary_curve(&conic).unwrap().is_positive());
        assert!(is_ordinary_curve(&make_fermat(5, 3, 4).unwrap()).is_err());
    }

    #[test]
    fn ulrich_examples() {
        let v = ulrich_check_curve(&make_fermat(7, 2, 3).unwrap()).unwrap();
        assert_eq!(v.value, VerdictValue::Holds);
        let Evidence::Ulrich(e) = &v.evidence else { panic!() };
        assert_eq!((e.bundle_rank, e.bundle_degree), (6, 0));
        let v = ulrich_check_curve(&make_fermat(5, 2, 3).unwrap()).unwrap();
        assert!(!v.is_positive());
        assert!(matches!(v.value, VerdictValue::FailsAt { twist: 0, .. }));
        let v3 = ulrich_rank_multiplier(&make_fermat(7, 2, 3).unwrap(), 3).unwrap();
        assert!(v3.is_positive());
        let bad = ulrich_rank_multiplier(&make_fermat(5, 2, 3).unwrap(), 4).unwrap();
        let Evidence::Ulrich(e) = &bad.evidence else { panic!() };
        assert_eq!(e.b1_dims, vec![4, 4]);
        for seed in 0..5 {
            let c = random_plane_curve(3, 4, seed).unwrap();
            assert_eq!(
                ulrich_check_curve(&c).unwrap().is_positive(),
                is_ordinary_curve(&c).unwrap().is_positive()
            );
        }
    }

    #[test]
    fn acm_examples() {
        let x = make_fermat(3, 3, 4).unwrap();
        let v = acm_check_b1(&x, default_window(&x)).unwrap();
        assert_eq!(
            v.value,
            VerdictValue::FailsAt {
                twist: 0,
                index: 1,
                dimension: 1
            }
        );
        let x = make_fermat(5, 3, 4).unwrap();
        let v = acm_check_b1(&x, 4).unwrap();
        assert_eq!(v.value, VerdictValue::CertifiedBySplitting);
        let Evidence::Acm(e) = &v.evidence else { panic!() };
        assert_eq!(e.window, (-4, 0));
        assert!(e.cells.iter().all(|c| c.kernel_dim == 0));
        assert!(acm_check_b1(&make_fermat(7, 2, 3).unwrap(), 3).is_err());
    }

    #[test]
    fn equivalence_examples() {
        let v = fsplit_equivalence_check(&make_fermat(3, 3, 4).unwrap()).unwrap();
        assert_eq!(v.value, VerdictValue::Consistent);
        let Evidence::Equivalence(e) = &v.evidence else { panic!() };
        assert_eq!((e.fedder_split, e.b1_h_dim_minus_one, e.frobenius_injective), (false, 1, false));
        let v = fsplit_equivalence_check(&make_fermat(5, 3, 4).unwrap()).unwrap();
        let Evidence::Equivalence(e) = &v.evidence else { panic!() };
        assert_eq!((e.fedder_split, e.b1_h_dim_minus_one, e.frobenius_injective), (true, 0, true));
        assert!(fsplit_equivalence_check(&make_fermat(5, 3, 3).unwrap()).is_err());
    }

    #[test]
    fn pushforward_examples() {
        for (p, n, d, w) in [(3, 3, 4, 5), (5, 3, 3, 5), (3, 4, 5, 3)] {
            let v = pushforward_acm_check(&make_fermat(p, n, d).unwrap(), w).unwrap();
            assert_eq!(v.value, VerdictValue::CertifiedForHypersurfaces);
        }
        let k3 = pushforward_twist_dims(&make_fermat(3, 3, 4).unwrap(), 0);
        assert_eq!(k3.dims, vec![1, 0, 1]);
    }

    #[test]
    fn kunneth_examples() {
        let ordinary = make_fermat(7, 2, 3).unwrap();
        let single = B1Table::compute(&ordinary, 0..=0);
        assert!(kunneth_ulrich_check(&[single]).unwrap().is_positive());
        let t = B1Table::compute(&ordinary, -1..=1);
        assert!(kunneth_ulrich_check(&[t.clone(), t.clone()]).unwrap().is_positive());
        let bad = B1Table::compute(&make_fermat(5, 2, 3).unwrap(), -1..=1);
        let v = kunneth_ulrich_check(&[bad, t.clone()]).unwrap();
        let Evidence::Kunneth(e) = &v.evidence else { panic!() };
        let cell = e.first_failure.clone().unwrap();
        assert_eq!((cell.k, cell.t), (1, 1));
        assert!(kunneth_ulrich_check(&[B1Table::compute(&ordinary, 0..=0), t]).is_err());
    }

    #[test]
    fn obstruction_examples() {
        let x = make_fermat(3, 3, 4).unwrap();
        let v = ulrich_twist_obstruction(&x, -10..=10).unwrap();
        assert_eq!(v.value, VerdictValue::Obstructed);
        let Evidence::Obstruction(e) = &v.evidence else { panic!() };
        assert_eq!(e.rows.iter().find(|r| r.t == 0).unwrap().chi_minus_one, 16);
        let passed = obstruction_verdict(vec![ObstructionRow {
            t: 3,
            chi_minus_one: 0,
            chi_minus_two: 0,
        }]);
        assert_eq!(passed.value, VerdictValue::ObstructionPassed);
    }
}
