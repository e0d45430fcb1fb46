use std::io::Write;
use std::path::Path;

use charp_core::cohom::{B1Table, HypersurfaceDatum};
use charp_core::criteria::{
    acm_check_b1, default_window, fedder_is_split, fsplit_equivalence_check, is_ordinary_curve,
    kunneth_ulrich_check, pushforward_acm_check, ulrich_rank_multiplier, ulrich_twist_obstruction,
};
use charp_core::families::{is_smooth, FamilySpec};
use charp_core::verdict::Verdict;

use crate::args::{parse_spec, Cli, Command, InstanceArgs, KunnethArgs, OutputArgs};
use crate::error::{CliError, Result};
use crate::report::{FamilyField, Report, SCHEMA_VERSION, TOOL_VERSION};
use crate::scan::run_scan;

/// Runs one invocation and returns the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Fedder(a) => instance(a, "fedder", stdout, |x, _| Ok(vec![fedder_is_split(x)?])),
        Command::Ordinary(a) => instance(a, "ordinary", stdout, |x, _| {
            require_smooth_curve(x)?;
            Ok(vec![is_ordinary_curve(x)?])
        }),
        Command::UlrichCurve(a) => instance(&a.instance, "ulrich-curve", stdout, |x, _| {
            require_smooth_curve(x)?;
            Ok(vec![ulrich_rank_multiplier(x, a.rank)?])
        }),
        Command::AcmB1(a) => instance(a, "acm-b1", stdout, |x, w| {
            let w = w.unwrap_or_else(|| default_window(x));
            let v = acm_check_b1(x, w)?;
            let window = match &v.evidence {
                charp_core::verdict::Evidence::Acm(e) => e.window,
                _ => unreachable!(),
            };
            Ok((vec![v], Some(window)))
        }),
        Command::FsplitEquiv(a) => {
            instance(a, "fsplit-equiv", stdout, |x, _| Ok(vec![fsplit_equivalence_check(x)?]))
        }
        Command::PushforwardAcm(a) => instance(a, "pushforward-acm", stdout, |x, w| {
            let w = w.unwrap_or_else(|| default_window(x)).max(0);
            Ok((vec![pushforward_acm_check(x, w)?], Some((-w, w))))
        }),
        Command::Obstruction(a) => {
            let (from, to) = (a.t_from, a.t_to);
            if from > to {
                return Err(CliError::Usage(format!("empty t window [{from}, {to}]")));
            }
            instance(&a.instance, "obstruction", stdout, |x, _| {
                Ok((vec![ulrich_twist_obstruction(x, from..=to)?], Some((from, to))))
            })
        }
        Command::Scan(a) => run_scan(a, stdout, stderr),
        Command::Kunneth(a) => kunneth(a, stdout, stderr),
    }
}

/// What a command hands back: verdicts and optionally the window examined.
trait Outcome {
    fn split(self) -> (Vec<Verdict>, Option<(i64, i64)>);
}

impl Outcome for Vec<Verdict> {
    fn split(self) -> (Vec<Verdict>, Option<(i64, i64)>) {
        (self, None)
    }
}

impl Outcome for (Vec<Verdict>, Option<(i64, i64)>) {
    fn split(self) -> (Vec<Verdict>, Option<(i64, i64)>) {
        self
    }
}

fn instance<O: Outcome>(
    args: &InstanceArgs,
    command: &str,
    stdout: &mut dyn Write,
    check: impl FnOnce(&HypersurfaceDatum, Option<i64>) -> charp_core::Result<O>,
) -> Result<i32> {
    let spec = args.source.family_spec()?;
    let x = spec.build()?;
    let (verdicts, window) = check(&x, args.window)?.split();
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        family: FamilyField::Single(spec),
        p: Some(x.p() as u64),
        n: Some(x.n()),
        d: Some(x.degree()),
        verdicts,
        window,
        tool_version: TOOL_VERSION.to_string(),
    };
    emit(&report, &args.output, stdout)
}

fn emit(report: &Report, output: &OutputArgs, stdout: &mut dyn Write) -> Result<i32> {
    let text = report.render(output.format)?;
    write_output(&text, output.out.as_deref(), stdout)?;
    Ok(report.exit_code())
}

fn write_output(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

pub(crate) fn require_smooth_curve(x: &HypersurfaceDatum) -> charp_core::Result<()> {
    if x.n() != 2 {
        return Err(charp_core::Error::Precondition(format!(
            "expected a plane curve, got n = {}",
            x.n()
        )));
    }
    if !is_smooth(x).is_positive() {
        return Err(charp_core::Error::Precondition(
            "the curve is singular".into(),
        ));
    }
    Ok(())
}

fn kunneth(args: &KunnethArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let specs: Vec<FamilySpec> = args
        .factors
        .iter()
        .map(|s| parse_spec(s))
        .collect::<Result<_>>()?;
    let m = specs.len() as i64;
    let mut tables = Vec::with_capacity(specs.len());
    let mut primes = Vec::with_capacity(specs.len());
    for spec in &specs {
        let x = spec.build()?;
        require_smooth_curve(&x)?;
        primes.push(x.p() as u64);
        tables.push(B1Table::compute(&x, (1 - m)..=(m - 1)));
    }
    let p = primes
        .iter()
        .all(|&q| q == primes[0])
        .then_some(primes[0]);
    if p.is_none() {
        writeln!(
            stderr,
            "note: factors live in different characteristics {primes:?}; only the numerical Künneth sums are meaningful"
        )?;
    }
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "kunneth".into(),
        family: FamilyField::Product(specs),
        p,
        n: Some(2),
        d: None,
        verdicts: vec![kunneth_ulrich_check(&tables)?],
        window: Some((1 - m, m - 1)),
        tool_version: TOOL_VERSION.to_string(),
    };
    emit(&report, &args.output, stdout)
}
