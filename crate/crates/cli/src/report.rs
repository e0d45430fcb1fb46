use std::fmt::Write as _;

use charp_core::families::FamilySpec;
use charp_core::verdict::{Evidence, FedderBranch, Verdict, VerdictKind, VerdictValue};
use serde::{Deserialize, Serialize};

use crate::args::Format;
use crate::error::{Result, EXIT_NEGATIVE, EXIT_POSITIVE};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyField {
    Single(FamilySpec),
    Product(Vec<FamilySpec>),
}

/// Report for one command on one instance. Field order is the canonical
/// JSON order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub family: FamilyField,
    pub p: Option<u64>,
    pub n: Option<usize>,
    pub d: Option<u32>,
    pub verdicts: Vec<Verdict>,
    pub window: Option<(i64, i64)>,
    pub tool_version: String,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.verdicts.iter().all(Verdict::is_positive) {
            EXIT_POSITIVE
        } else {
            EXIT_NEGATIVE
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => self.render_csv(),
            Format::Md => Ok(self.render_md()),
        }
    }

    fn family_label(&self) -> String {
        match &self.family {
            FamilyField::Single(f) => f.to_string(),
            FamilyField::Product(fs) => fs
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" x "),
        }
    }

    fn render_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["command", "family", "kind", "status", "summary"])?;
        for v in &self.verdicts {
            w.write_record([
                self.command.as_str(),
                &self.family_label(),
                kind_name(v.kind),
                status_name(&v.value),
                &describe(v),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    fn render_md(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "## {}: {}\n", self.command, self.family_label());
        for v in &self.verdicts {
            let _ = writeln!(out, "- **{}**: {}", kind_name(v.kind), describe(v));
        }
        if let Some((a, b)) = self.window {
            let _ = writeln!(out, "\nwindow: [{a}, {b}]");
        }
        for v in &self.verdicts {
            evidence_table(&mut out, &v.evidence);
        }
        out
    }
}

pub fn kind_name(kind: VerdictKind) -> &'static str {
    match kind {
        VerdictKind::Smooth => "smooth",
        VerdictKind::Split => "split",
        VerdictKind::Ordinary => "ordinary",
        VerdictKind::Ulrich => "ulrich",
        VerdictKind::Acm => "acm",
        VerdictKind::Equivalence => "equivalence",
        VerdictKind::Obstruction => "obstruction",
    }
}

pub fn status_name(value: &VerdictValue) -> &'static str {
    match value {
        VerdictValue::Holds => "holds",
        VerdictValue::Fails => "fails",
        VerdictValue::CertifiedBySplitting => "certified-by-splitting",
        VerdictValue::CertifiedForHypersurfaces => "certified-for-hypersurfaces",
        VerdictValue::WindowVerified { .. } => "window-verified",
        VerdictValue::FailsAt { .. } => "fails-at",
        VerdictValue::Consistent => "consistent",
        VerdictValue::Inconsistent => "inconsistent",
        VerdictValue::ObstructionPassed => "obstruction-passed",
        VerdictValue::Obstructed => "obstructed",
    }
}

/// One-line human description, witness included for negative verdicts.
pub fn describe(v: &Verdict) -> String {
    let ok = v.is_positive();
    match (&v.evidence, &v.value) {
        (Evidence::Smooth(e), _) => match e.vanishing_degree {
            Some(t) => format!("smooth (Jacobian ideal fills degree {t})"),
            None => format!("singular (at cutoff {})", e.cutoff),
        },
        (Evidence::Fedder(e), _) => match (ok, e.branch) {
            (true, FedderBranch::CalabiYau) => format!("split (witness {})", e.coefficient),
            (true, FedderBranch::LowDegree) => {
                format!("split (deg < n+1, witness monomial {:?})", e.witness_monomial)
            }
            (false, _) => format!(
                "not split (coefficient of {:?} in f^(p-1) is {})",
                e.witness_monomial, e.coefficient
            ),
        },
        (Evidence::Ordinary(e), _) => {
            if ok {
                format!("ordinary (genus {}, p-rank {})", e.genus, e.p_rank)
            } else {
                format!(
                    "not ordinary (genus {}, Hasse-Witt rank {}, p-rank {})",
                    e.genus, e.rank, e.p_rank
                )
            }
        }
        (Evidence::Ulrich(e), value) => match value {
            VerdictValue::FailsAt {
                index, dimension, ..
            } => format!(
                "not Ulrich: h^{index}(B^1 ⊗ O^{}) = {dimension} at twist 0",
                e.multiplier
            ),
            _ => format!(
                "Ulrich, rank {}, degree {}",
                e.bundle_rank, e.bundle_degree
            ),
        },
        (Evidence::Acm(e), value) => match value {
            VerdictValue::CertifiedBySplitting => format!(
                "ACM (certified by splitting; window [{}, {}] all kernels 0)",
                e.window.0, e.window.1
            ),
            VerdictValue::WindowVerified { from, to } => {
                format!("no failure for m in [{from}, {to}] (window-verified only)")
            }
            VerdictValue::FailsAt {
                twist,
                index,
                dimension,
            } => format!("fails-at(m={twist}, i={index}), kernel dim {dimension}"),
            other => status_name(other).to_string(),
        },
        (Evidence::Pushforward(e), value) => match value {
            VerdictValue::FailsAt {
                twist,
                index,
                dimension,
            } => format!("fails-at(m={twist}, i={index}), dimension {dimension}"),
            _ => format!(
                "ACM (certified for hypersurfaces; middle indices {:?} vanish on [{}, {}])",
                e.middle_indices, e.window.0, e.window.1
            ),
        },
        (Evidence::Equivalence(e), _) => format!(
            "{}: split={}, h^(dim-1)(B^1)={}, F injective on H^dim(O_X)={}",
            if ok { "consistent" } else { "INCONSISTENT" },
            e.fedder_split,
            e.b1_h_dim_minus_one,
            e.frobenius_injective
        ),
        (Evidence::Oracle(e), _) => format!(
            "{}: lambda={}, Hasse-Witt={}, Deuring={}, Cartier-Manin={}",
            if ok { "oracles agree" } else { "ORACLES DISAGREE" },
            e.lambda,
            e.hasse_witt,
            e.deuring,
            e.cartier_manin
        ),
        (Evidence::Kunneth(e), _) => match &e.first_failure {
            Some(c) => format!(
                "not Ulrich on the product: {} = {} at k={}, t={}",
                c.condition, c.value, c.k, c.t
            ),
            None => format!("Ulrich on the product of {} curves", e.factors),
        },
        (Evidence::Obstruction(e), _) => {
            if ok {
                format!(
                    "obstruction passed at t in {:?} (necessary condition only)",
                    e.admissible
                )
            } else {
                let witness = e
                    .rows
                    .iter()
                    .filter(|r| r.chi_minus_one != 0 || r.chi_minus_two != 0)
                    .min_by_key(|r| r.t.abs());
                match witness {
                    Some(r) => format!(
                        "obstructed: no admissible t; e.g. t={}: chi(B^1({})) = {}, chi(B^1({})) = {}",
                        r.t,
                        r.t - 1,
                        r.chi_minus_one,
                        r.t - 2,
                        r.chi_minus_two
                    ),
                    None => "obstructed: empty window".into(),
                }
            }
        }
    }
}

fn evidence_table(out: &mut String, evidence: &Evidence) {
    match evidence {
        Evidence::Acm(e) => {
            let _ = writeln!(out, "\n| m | dim H^top(O_X(m)) | kernel |\n|---|---|---|");
            for c in &e.cells {
                let _ = writeln!(out, "| {} | {} | {} |", c.twist, c.source_dim, c.kernel_dim);
            }
            let _ = writeln!(
                out,
                "\ntwists >= {} are vacuous; indices {:?} vanish in closed form",
                e.vacuous_from, e.closed_form_zero_indices
            );
        }
        Evidence::Kunneth(e) => {
            let _ = writeln!(out, "\n| condition | k | t | value |\n|---|---|---|---|");
            for c in &e.cells {
                let _ = writeln!(out, "| {} | {} | {} | {} |", c.condition, c.k, c.t, c.value);
            }
        }
        Evidence::Obstruction(e) => {
            let _ = writeln!(out, "\n| t | chi(B^1(t-1)) | chi(B^1(t-2)) |\n|---|---|---|");
            for r in &e.rows {
                let _ = writeln!(out, "| {} | {} | {} |", r.t, r.chi_minus_one, r.chi_minus_two);
            }
        }
        Evidence::Ordinary(e) if !e.hasse_witt.is_empty() => {
            let _ = writeln!(out, "\nHasse-Witt matrix: {:?}", e.hasse_witt);
        }
        _ => {}
    }
}
