//! Built-in example families, the Jacobian smoothness test, and two
//! classical oracles for elliptic and hyperelliptic Hasse–Witt data that do
//! not go through the cohomology models.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cohom::HypersurfaceDatum;
use crate::error::{Error, Result};
use crate::field::{FpScalar, PrimeField};
use crate::matrix::{FpMatrix, RowReducer};
use crate::poly::{monomials_of_degree, Monomial, MultiPoly};
use crate::verdict::{Evidence, SmoothEvidence, Verdict, VerdictKind};

/// Resampling budget for the random families.
pub const RANDOM_RETRIES: usize = 64;

/// Everything needed to rebuild a defining polynomial bit for bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    Fermat { p: u64, n: usize, d: u32 },
    Dwork { p: u64, n: usize, lambda: u64 },
    LegendreCubic { p: u64, lambda: u64 },
    RandomPlaneCurve { p: u64, d: u32, seed: u64 },
    RandomHypersurface { p: u64, n: usize, d: u32, seed: u64 },
    /// `y^2 = h(x)`, coefficients of `h` in ascending degree.
    Hyperelliptic { p: u64, coefficients: Vec<i64> },
    Custom { p: u64, n: usize, poly: String },
}

impl FamilySpec {
    pub fn p(&self) -> u64 {
        match self {
            FamilySpec::Fermat { p, .. }
            | FamilySpec::Dwork { p, .. }
            | FamilySpec::LegendreCubic { p, .. }
            | FamilySpec::RandomPlaneCurve { p, .. }
            | FamilySpec::RandomHypersurface { p, .. }
            | FamilySpec::Hyperelliptic { p, .. }
            | FamilySpec::Custom { p, .. } => *p,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FamilySpec::Fermat { .. } => "fermat",
            FamilySpec::Dwork { .. } => "dwork",
            FamilySpec::LegendreCubic { .. } => "legendre-cubic",
            FamilySpec::RandomPlaneCurve { .. } => "random-plane-curve",
            FamilySpec::RandomHypersurface { .. } => "random-hypersurface",
            FamilySpec::Hyperelliptic { .. } => "hyperelliptic",
            FamilySpec::Custom { .. } => "custom",
        }
    }

    /// Builds the hypersurface. Hyperelliptic specs have no hypersurface model here.
    pub fn build(&self) -> Result<HypersurfaceDatum> {
        match self {
            FamilySpec::Fermat { p, n, d } => make_fermat(*p, *n, *d),
            FamilySpec::Dwork { p, n, lambda } => make_dwork(*p, *n, *lambda),
            FamilySpec::LegendreCubic { p, lambda } => make_legendre_cubic(*p, *lambda),
            FamilySpec::RandomPlaneCurve { p, d, seed } => random_plane_curve(*p, *d, *seed),
            FamilySpec::RandomHypersurface { p, n, d, seed } => {
                random_hypersurface(*p, *n, *d, *seed)
            }
            FamilySpec::Hyperelliptic { .. } => Err(Error::Precondition(
                "hyperelliptic models are only available to the Cartier-Manin oracle".into(),
            )),
            FamilySpec::Custom { p, n, poly } => HypersurfaceDatum::parse(poly, *p, *n),
        }
    }

    /// Smoothness known without the Jacobian computation, where a closed form exists.
    pub fn smooth_closed_form(&self) -> Option<bool> {
        match self {
            FamilySpec::Fermat { p, d, .. } => Some(!(*d as u64).is_multiple_of(*p)),
            FamilySpec::Dwork { p, n, lambda } => Some(!dwork_is_singular(*p, *n, *lambda)),
            FamilySpec::LegendreCubic { p, lambda } => {
                Some(*p != 2 && lambda % p != 0 && lambda % p != 1)
            }
            _ => None,
        }
    }

    /// Parses the compact form `kind,key=value,...`, for example
    /// `fermat,p=7,n=2,d=3` or `legendre,p=5,lambda=2`. `n` defaults to 2
    /// and `d` to `n + 1` where they apply.
    pub fn parse_compact(text: &str) -> Result<FamilySpec> {
        let mut parts = text.split(',').map(str::trim);
        let kind = parts.next().unwrap_or_default();
        let mut kv: HashMap<&str, &str> = HashMap::new();
        let mut offset = kind.len() + 1;
        for part in parts {
            let Some((k, v)) = part.split_once('=') else {
                return Err(Error::Syntax {
                    pos: offset,
                    msg: format!("expected key=value, found '{part}'"),
                });
            };
            if kv.insert(k.trim(), v.trim()).is_some() {
                return Err(Error::Syntax {
                    pos: offset,
                    msg: format!("duplicate key '{}'", k.trim()),
                });
            }
            offset += part.len() + 1;
        }
        fn num<T: std::str::FromStr>(kv: &HashMap<&str, &str>, key: &str) -> Result<Option<T>> {
            kv.get(key)
                .map(|v| {
                    v.parse::<T>().map_err(|_| Error::Syntax {
                        pos: 0,
                        msg: format!("bad value for '{key}': '{v}'"),
                    })
                })
                .transpose()
        }
        fn req<T: std::str::FromStr>(kv: &HashMap<&str, &str>, key: &str) -> Result<T> {
            num(kv, key)?.ok_or_else(|| Error::Syntax {
                pos: 0,
                msg: format!("missing '{key}'"),
            })
        }
        let p: u64 = req(&kv, "p")?;
        let n: usize = num(&kv, "n")?.unwrap_or(2);
        let d_default = u32::try_from(n + 1).unwrap_or(u32::MAX);
        let allowed: &[&str] = match kind {
            "fermat" => &["p", "n", "d"],
            "dwork" => &["p", "n", "lambda"],
            "legendre" | "legendre-cubic" => &["p", "lambda"],
            "random-plane-curve" => &["p", "d", "seed"],
            "random-hypersurface" => &["p", "n", "d", "seed"],
            "custom" => &["p", "n", "poly"],
            other => {
                return Err(Error::Syntax {
                    pos: 0,
                    msg: format!("unknown family '{other}'"),
                })
            }
        };
        if let Some(k) = kv.keys().find(|k| !allowed.contains(k)) {
            return Err(Error::Syntax {
                pos: 0,
                msg: format!("unexpected key '{k}' for {kind}"),
            });
        }
        Ok(match kind {
            "fermat" => FamilySpec::Fermat {
                p,
                n,
                d: num(&kv, "d")?.unwrap_or(d_default),
            },
            "dwork" => FamilySpec::Dwork {
                p,
                n,
                lambda: req(&kv, "lambda")?,
            },
            "legendre" | "legendre-cubic" => FamilySpec::LegendreCubic {
                p,
                lambda: req(&kv, "lambda")?,
            },
            "random-plane-curve" => FamilySpec::RandomPlaneCurve {
                p,
                d: num(&kv, "d")?.unwrap_or(3),
                seed: num(&kv, "seed")?.unwrap_or(0),
            },
            "random-hypersurface" => FamilySpec::RandomHypersurface {
                p,
                n,
                d: num(&kv, "d")?.unwrap_or(d_default),
                seed: num(&kv, "seed")?.unwrap_or(0),
            },
            _ => FamilySpec::Custom {
                p,
                n,
                poly: req::<String>(&kv, "poly")?,
            },
        })
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Fermat { p, n, d } => write!(f, "fermat,p={p},n={n},d={d}"),
            FamilySpec::Dwork { p, n, lambda } => write!(f, "dwork,p={p},n={n},lambda={lambda}"),
            FamilySpec::LegendreCubic { p, lambda } => write!(f, "legendre-cubic,p={p},lambda={lambda}"),
            FamilySpec::RandomPlaneCurve { p, d, seed } => {
                write!(f, "random-plane-curve,p={p},d={d},seed={seed}")
            }
            FamilySpec::RandomHypersurface { p, n, d, seed } => {
                write!(f, "random-hypersurface,p={p},n={n},d={d},seed={seed}")
            }
            FamilySpec::Hyperelliptic { p, coefficients } => {
                write!(f, "hyperelliptic,p={p},coefficients={coefficients:?}")
            }
            FamilySpec::Custom { p, n, poly } => write!(f, "custom,p={p},n={n},poly={poly}"),
        }
    }
}

fn field(p: u64) -> Result<PrimeField> {
    PrimeField::new(p)
}

/// `x_0^d + ... + x_n^d`.
pub fn make_fermat(p: u64, n: usize, d: u32) -> Result<HypersurfaceDatum> {
    let fp = field(p)?;
    if d == 0 {
        return Err(Error::Precondition("degree must be positive".into()));
    }
    if (d as u64).is_multiple_of(p) {
        return Err(Error::SingularFamily(format!(
            "Fermat hypersurface of degree {d} is singular in characteristic {p}"
        )));
    }
    let terms = (0..=n).map(|i| {
        let mut e = vec![0; n + 1];
        e[i] = d;
        (Monomial::new(e), 1)
    });
    HypersurfaceDatum::new(MultiPoly::from_terms(fp, n + 1, terms))
}

/// `x_0^{n+1} + ... + x_n^{n+1} - lambda x_0 ... x_n`.
pub fn make_dwork(p: u64, n: usize, lambda: u64) -> Result<HypersurfaceDatum> {
    let fp = field(p)?;
    if (n as u64 + 1).is_multiple_of(p) {
        return Err(Error::Precondition(format!(
            "Dwork family needs p not dividing n+1 = {}",
            n + 1
        )));
    }
    let d = u32::try_from(n + 1).map_err(|_| Error::ExponentOverflow)?;
    let mut terms: Vec<(Monomial, u32)> = (0..=n)
        .map(|i| {
            let mut e = vec![0; n + 1];
            e[i] = d;
            (Monomial::new(e), 1)
        })
        .collect();
    terms.push((Monomial::diagonal(n + 1, 1), fp.neg(fp.reduce_u64(lambda))));
    HypersurfaceDatum::new(MultiPoly::from_terms(fp, n + 1, terms))
}

/// Closed form: the Dwork member is singular iff `lambda^{n+1} = (n+1)^{n+1}`.
pub fn dwork_is_singular(p: u64, n: usize, lambda: u64) -> bool {
    let Ok(fp) = field(p) else { return false };
    let e = n as u64 + 1;
    fp.pow(fp.reduce_u64(lambda), e) == fp.pow(fp.reduce_u64(e), e)
}

/// Plane Legendre cubic `y^2 z = x (x - z)(x - lambda z)` in variables `(x, y, z) = (x0, x1, x2)`.
pub fn make_legendre_cubic(p: u64, lambda: u64) -> Result<HypersurfaceDatum> {
    let fp = field(p)?;
    if p == 2 {
        return Err(Error::Precondition("Legendre form needs odd p".into()));
    }
    let l = fp.reduce_u64(lambda);
    if l == 0 || l == 1 {
        return Err(Error::Precondition(format!(
            "lambda = {l} gives a singular Legendre cubic"
        )));
    }
    let terms = [
        (Monomial::new(vec![0, 2, 1]), 1),
        (Monomial::new(vec![3, 0, 0]), fp.neg(1)),
        (Monomial::new(vec![2, 0, 1]), fp.add(1, l)),
        (Monomial::new(vec![1, 0, 2]), fp.neg(l)),
    ];
    HypersurfaceDatum::new(MultiPoly::from_terms(fp, 3, terms))
}

/// Dense random form of degree `d` in `n + 1` variables, resampled from the
/// same seeded stream until it is smooth.
pub fn random_hypersurface(p: u64, n: usize, d: u32, seed: u64) -> Result<HypersurfaceDatum> {
    let fp = field(p)?;
    if d == 0 {
        return Err(Error::Precondition("degree must be positive".into()));
    }
    let monomials = monomials_of_degree(n + 1, d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_RETRIES {
        let terms = monomials
            .iter()
            .map(|m| (m.clone(), rng.gen_range(0..fp.modulus())))
            .collect::<Vec<_>>();
        let f = MultiPoly::from_terms(fp, n + 1, terms);
        if f.is_zero() {
            continue;
        }
        let x = HypersurfaceDatum::new(f)?;
        if is_smooth(&x).is_positive() {
            return Ok(x);
        }
    }
    Err(Error::RetryBudget(RANDOM_RETRIES))
}

pub fn random_plane_curve(p: u64, d: u32, seed: u64) -> Result<HypersurfaceDatum> {
    random_hypersurface(p, 2, d, seed)
}

/// Degree cutoff for the Jacobian test.
pub fn smoothness_cutoff(x: &HypersurfaceDatum) -> u32 {
    let n1 = x.nvars() as u32;
    let d = x.degree();
    if d.is_multiple_of(x.p()) {
        n1 * d + 1
    } else {
        n1 * (d - 1) + 1
    }
}

/// Jacobian criterion: `X` is smooth iff the ideal `(f, df/dx_0, ..., df/dx_n)`
/// contains every form of some degree `t <= cutoff`.
///
/// Once a graded piece is full every later one is, so only two degrees are
/// examined: `(n+1)(d-2)+1`, where a smooth `X` with `p ∤ d` already fills,
/// and the cutoff itself when the first one does not.
pub fn is_smooth(x: &HypersurfaceDatum) -> Verdict {
    let f = x.polynomial();
    let mut generators: Vec<MultiPoly> = f.partials().into_iter().filter(|g| !g.is_zero()).collect();
    generators.push(f.clone());
    let cutoff = smoothness_cutoff(x);
    let start = (x.nvars() as i64 * (x.degree() as i64 - 2) + 1).clamp(1, cutoff as i64) as u32;
    let mut quotient_dims = Vec::new();
    let mut vanishing_degree = None;
    let degrees = if start == cutoff { vec![start] } else { vec![start, cutoff] };
    for t in degrees {
        let columns = monomials_of_degree(x.nvars(), t);
        let pos: HashMap<&Monomial, usize> =
            columns.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut span = RowReducer::new(x.field(), columns.len());
        'fill: for g in &generators {
            let gd = g.homogeneous_degree().unwrap_or(0) as u32;
            if gd > t {
                continue;
            }
            for u in monomials_of_degree(x.nvars(), t - gd) {
                let mut row = vec![0u32; columns.len()];
                for (b, c) in g.terms() {
                    row[pos[&u.checked_mul(b).expect("exponent overflow")]] = c;
                }
                span.insert(row);
                if span.is_full() {
                    break 'fill;
                }
            }
        }
        let q = (columns.len() - span.rank()) as u64;
        quotient_dims.push((t, q));
        if q == 0 {
            vanishing_degree = Some(t);
            break;
        }
    }
    Verdict::holds(
        VerdictKind::Smooth,
        vanishing_degree.is_some(),
        Evidence::Smooth(SmoothEvidence {
            cutoff,
            vanishing_degree,
            quotient_dims,
        }),
    )
}

/// Cartier–Manin matrix of `y^2 = h(x)`: entry `(i, j)` is the coefficient
/// of `x^{ip - j}` in `h^{(p-1)/2}`, `1 <= i, j <= g`. `h` is taken to be
/// squarefree.
pub fn cartier_manin_hyperelliptic(p: u64, coefficients: &[i64], g: usize) -> Result<FpMatrix> {
    let fp = field(p)?;
    if p == 2 {
        return Err(Error::Precondition("Cartier-Manin formula needs odd p".into()));
    }
    let reduced: Vec<u32> = coefficients.iter().map(|&c| fp.reduce_i64(c)).collect();
    let degree = reduced.iter().rposition(|&c| c != 0);
    if degree != Some(2 * g + 1) {
        return Err(Error::Precondition(format!(
            "h must have degree 2g+1 = {} mod {p}, got {degree:?}",
            2 * g + 1
        )));
    }
    let h = MultiPoly::from_terms(
        fp,
        1,
        reduced
            .iter()
            .enumerate()
            .map(|(i, &c)| (Monomial::new(vec![i as u32]), c)),
    );
    let power = h.pow((p - 1) / 2)?;
    let mut m = FpMatrix::zeros(fp, g, g);
    for i in 1..=g {
        for j in 1..=g {
            let e = i as u64 * p - j as u64;
            let e = u32::try_from(e).map_err(|_| Error::ExponentOverflow)?;
            m.set(i - 1, j - 1, power.coeff(&Monomial::new(vec![e])).value);
        }
    }
    Ok(m)
}

/// Deuring polynomial `H(lambda) = sum_i C((p-1)/2, i)^2 lambda^i`.
pub fn deuring_hasse(p: u64, lambda: u64) -> Result<FpScalar> {
    let fp = field(p)?;
    if p == 2 {
        return Err(Error::Precondition("Deuring polynomial needs odd p".into()));
    }
    let l = fp.reduce_u64(lambda);
    if l == 0 || l == 1 {
        return Err(Error::Precondition(format!("lambda = {l} is not admissible")));
    }
    let m = (p - 1) / 2;
    let mut binom = 1u32;
    let mut lpow = 1u32;
    let mut sum = 0u32;
    for i in 0..=m {
        if i > 0 {
            binom = fp.mul(binom, fp.reduce_u64(m - i + 1));
            binom = fp.mul(binom, fp.inv(fp.reduce_u64(i)));
            lpow = fp.mul(lpow, l);
        }
        sum = fp.add(sum, fp.mul(fp.mul(binom, binom), lpow));
    }
    Ok(fp.scalar(sum))
}

/// Ascending coefficients of `x (x - 1)(x - lambda)`.
pub fn legendre_hyperelliptic_coefficients(lambda: u64) -> Vec<i64> {
    let l = lambda as i64;
    vec![0, l, -(1 + l), 1]
}
