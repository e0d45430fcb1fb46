//! Structured verdicts with the evidence that produced them.

use serde::{Deserialize, Serialize};

use crate::cohom::PushforwardDims;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Smooth,
    Split,
    Ordinary,
    Ulrich,
    Acm,
    Equivalence,
    Obstruction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum VerdictValue {
    Holds,
    Fails,
    /// ACM for every twist, backed by a Frobenius splitting.
    CertifiedBySplitting,
    /// ACM for every twist by the closed-form vanishing of middle cohomology
    /// of line bundles on hypersurfaces.
    CertifiedForHypersurfaces,
    /// No failure inside `[from, to]`; says nothing outside the window.
    WindowVerified { from: i64, to: i64 },
    /// First failing cell: `H^index(...)` at `twist` has this dimension.
    FailsAt {
        twist: i64,
        index: usize,
        dimension: u64,
    },
    Consistent,
    Inconsistent,
    /// Necessary condition only; never a claim that an Ulrich twist exists.
    ObstructionPassed,
    Obstructed,
}

impl VerdictValue {
    pub fn is_positive(&self) -> bool {
        matches!(
            self,
            VerdictValue::Holds
                | VerdictValue::CertifiedBySplitting
                | VerdictValue::CertifiedForHypersurfaces
                | VerdictValue::WindowVerified { .. }
                | VerdictValue::Consistent
                | VerdictValue::ObstructionPassed
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FedderBranch {
    /// `d = n + 1`: one coefficient of `f^{p-1}` decides.
    CalabiYau,
    /// `d < n + 1`: some monomial of `f^{p-1}` with all exponents `<= p-1`.
    LowDegree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothEvidence {
    pub cutoff: u32,
    /// A degree where the Jacobian ideal contains all forms.
    pub vanishing_degree: Option<u32>,
    /// `(t, dim S_t / J_t)` for each degree examined.
    pub quotient_dims: Vec<(u32, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FedderEvidence {
    pub branch: FedderBranch,
    /// Coefficient of the witness monomial in `f^{p-1}` (0 when absent).
    pub coefficient: u32,
    pub witness_monomial: Vec<u32>,
    /// Result of the general test: `f^{p-1}` has a term with all exponents `<= p-1`.
    pub general_membership: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinaryEvidence {
    pub genus: u64,
    pub hasse_witt: Vec<Vec<u32>>,
    pub rank: usize,
    pub p_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UlrichEvidence {
    pub genus: u64,
    /// Rank of `B^1_X ⊗ O^r`, `(p-1) r`.
    pub bundle_rank: u64,
    /// Degree of `B^1_X ⊗ O^r`, `(p-1)(g-1) r`.
    pub bundle_degree: i64,
    pub multiplier: u64,
    /// `h^i(B^1_X ⊗ O^r)` at twist 0, i.e. `h^i(E(-1))` for `E = B^1_X(1) ⊗ O^r`.
    pub b1_dims: Vec<u64>,
    pub ordinary: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcmCell {
    pub twist: i64,
    pub source_dim: u64,
    /// `h^{dim X - 1}(B^1_X(m))`, the kernel of Frobenius on top cohomology.
    pub kernel_dim: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcmEvidence {
    pub certified_by_splitting: bool,
    pub window: (i64, i64),
    pub cells: Vec<AcmCell>,
    /// Twists at or above this have zero source and are vacuous.
    pub vacuous_from: i64,
    /// Cohomological indices known to vanish in closed form.
    pub closed_form_zero_indices: Vec<usize>,
    /// Splitting certificate and window agree (always expected).
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceEvidence {
    pub fedder_split: bool,
    pub fedder_coefficient: u32,
    /// `h^{d-1}(X, B^1_X)` with `d = dim X`.
    pub b1_h_dim_minus_one: u64,
    pub frobenius_injective: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushforwardEvidence {
    pub window: (i64, i64),
    pub cells: Vec<PushforwardDims>,
    pub middle_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KunnethCell {
    /// `"H^k(E(-k))"` or `"H^k(E(-k-1))"`.
    pub condition: String,
    pub k: usize,
    pub t: i64,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KunnethEvidence {
    pub factors: usize,
    pub window: (i64, i64),
    pub cells: Vec<KunnethCell>,
    pub first_failure: Option<KunnethCell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionRow {
    pub t: i64,
    pub chi_minus_one: i64,
    pub chi_minus_two: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionEvidence {
    pub rows: Vec<ObstructionRow>,
    pub admissible: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleEvidence {
    pub lambda: u64,
    pub hasse_witt: u32,
    pub deuring: u32,
    pub cartier_manin: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Evidence {
    Smooth(SmoothEvidence),
    Fedder(FedderEvidence),
    Ordinary(OrdinaryEvidence),
    Ulrich(UlrichEvidence),
    Acm(AcmEvidence),
    Equivalence(EquivalenceEvidence),
    Pushforward(PushforwardEvidence),
    Kunneth(KunnethEvidence),
    Obstruction(ObstructionEvidence),
    Oracle(OracleEvidence),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub value: VerdictValue,
    pub evidence: Evidence,
}

impl Verdict {
    pub fn new(kind: VerdictKind, value: VerdictValue, evidence: Evidence) -> Self {
        Verdict {
            kind,
            value,
            evidence,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.value.is_positive()
    }

    /// Shorthand for boolean verdicts.
    pub fn holds(kind: VerdictKind, holds: bool, evidence: Evidence) -> Self {
        let value = if holds {
            VerdictValue::Holds
        } else {
            VerdictValue::Fails
        };
        Verdict::new(kind, value, evidence)
    }
}
