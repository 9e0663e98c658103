use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dirac_hardy_core::algebra::algebra_residuals;
use dirac_hardy_core::discretization::io::{write_field, Precision};
use dirac_hardy_core::operators::Sign;
use dirac_hardy_core::potentials::PotentialSpec;
use dirac_hardy_core::solver::{solve, symmetry_check, SolverConfig};
use dirac_hardy_core::verification::{
    equality_case, sharpness_sweep, sweep_csv, sweep_grid, verify, verify_with_cross_check, ExtremizerFamily,
    InequalityReport, VerifyInput, VerifyParams,
};
use dirac_hardy_core::{Field, MatrixPotential};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::field_spec::{parse_field_spec, FieldDefaults, FieldSpec};
use crate::profile::Grids;
use crate::report::{write_atomic, Report};
use crate::{Command, Common, FamilyArg};

/// Largest algebra residual accepted as exact.
const ALGEBRA_TOL: f64 = 1e-14;
/// Allowed growth of `‖ψ‖/‖f‖` over the bound 1.
const NORM_SLACK: f64 = 1e-3;

/// Spec text and the directory relative paths resolve against.
fn spec_text(arg: &str, params: &[String]) -> CliResult<(String, PathBuf)> {
    let (mut text, base) = if let Some(path) = arg.strip_prefix('@') {
        let p = Path::new(path);
        let dir = p.parent().map(Path::to_path_buf).unwrap_or_default();
        (std::fs::read_to_string(p)?, dir)
    } else if arg.contains('=') {
        (arg.to_string(), PathBuf::from("."))
    } else {
        (format!("kind={arg}"), PathBuf::from("."))
    };
    for p in params {
        text.push('\n');
        text.push_str(p);
    }
    Ok((text, base))
}

fn field_from(arg: &str, params: &[String], defaults: &FieldDefaults) -> CliResult<(FieldSpec, PathBuf)> {
    let (text, base) = spec_text(arg, params)?;
    Ok((parse_field_spec(&text, defaults)?, base))
}

fn potential_from(arg: &str) -> CliResult<(PotentialSpec, PathBuf)> {
    let (text, base) = spec_text(arg, &[])?;
    Ok((PotentialSpec::parse(&text)?, base))
}

fn grids(common: &Common, base: Option<dirac_hardy_core::RadialGrid>) -> CliResult<Grids> {
    common.profile.resolve(&common.overrides(), base)
}

fn table(title: &str, rows: &[(&str, String)]) -> String {
    let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = format!("{title}\n");
    for (k, v) in rows {
        let _ = writeln!(s, "  {k:<w$}  {v}");
    }
    s
}

fn cartesian(input: VerifyInput, grids: &Grids) -> CliResult<Field> {
    match input {
        VerifyInput::Cartesian(f) => Ok(f),
        VerifyInput::Dirac(d) => Ok(d.embed(grids.cartesian)?),
        VerifyInput::Pauli(_) => Err(CliError::Config("the solver needs a 4-component field".into())),
    }
}

fn report_rows(r: &InequalityReport) -> Vec<(&'static str, String)> {
    vec![
        ("inequality", r.id.to_string()),
        ("lhs", format!("{:.12e}", r.lhs)),
        ("rhs", format!("{:.12e}", r.rhs)),
        ("slack", format!("{:.6e}", r.slack)),
        ("ratio", r.ratio.map_or("-".into(), |x| format!("{x:.12}"))),
        ("quad_err", format!("{:.3e}", r.quad_err)),
        ("constant", r.realized_constant.map_or("-".into(), |x| format!("{x:.12}"))),
        ("holds", r.holds().to_string()),
    ]
}

pub fn run(command: &Command, common: &Common) -> CliResult<(Report, String)> {
    let seed = common.seed;
    match command {
        Command::AlgebraCheck => {
            let residuals = algebra_residuals();
            let worst = residuals.iter().map(|r| r.residual).fold(0.0, f64::max);
            let passed = worst <= ALGEBRA_TOL;
            let mut rows: Vec<(&str, String)> =
                residuals.iter().map(|r| (r.relation.as_str(), format!("{:e}", r.residual))).collect();
            rows.push(("worst", format!("{worst:e}")));
            let summary = table("algebra-check", &rows);
            let report = Report::new(
                "algebra-check",
                seed,
                json!({ "tolerance": ALGEBRA_TOL }),
                passed,
                json!({ "residuals": residuals, "worst": worst }),
            );
            Ok((report, summary))
        }

        Command::Verify { id, field, params, eps, m, sign, potential, cross_check } => {
            let g = grids(common, None)?;
            let defaults = FieldDefaults { arity: id.arity(), seed, eps: *eps, mass: *m };
            let (spec, base) = field_from(field, params, &defaults)?;
            let mut vp = VerifyParams::new(*eps, *m).with_sign((*sign).into());
            vp.h_grid = g.radial;
            let mut pot_echo = Value::Null;
            if let Some(p) = potential {
                let (ps, pbase) = potential_from(p)?;
                vp = vp.with_potential(ps.radial_scalar(&pbase)?);
                pot_echo = serde_json::to_value(&ps)?;
            }
            let input = spec.build(g.cartesian, g.radial, &base)?;
            let with_seed = |r: InequalityReport| match spec.seed() {
                Some(s) => r.with_seed(s),
                None => r,
            };
            let config = json!({
                "id": id, "eps": eps, "m": m, "sign": Sign::from(*sign), "grids": g,
                "field": spec, "potential": pot_echo, "cross_check": cross_check,
            });
            if *cross_check {
                let (a, b) = verify_with_cross_check(*id, &input, &vp, g.cartesian)?;
                let (a, b) = (with_seed(a), with_seed(b));
                let passed = a.holds() && b.holds();
                let mut summary = table("verify (channel)", &report_rows(&a));
                summary.push_str(&table("verify (cartesian)", &report_rows(&b)));
                let report = Report::new("verify", seed, config, passed, json!({ "channel": a, "cartesian": b }));
                Ok((report, summary))
            } else {
                let r = with_seed(verify(*id, &input, &vp)?);
                let summary = table("verify", &report_rows(&r));
                Ok((Report::new("verify", seed, config, r.holds(), serde_json::to_value(&r)?), summary))
            }
        }

        Command::Sharpness { eps, m, deltas, csv } => {
            let g = grids(common, Some(sweep_grid()))?;
            let outcome = sharpness_sweep(*eps, *m, deltas, g.radial)?;
            let table_csv = sweep_csv(&outcome);
            if let Some(path) = csv {
                write_atomic(path, table_csv.as_bytes())?;
            }
            let mut summary = format!("sharpness eps={eps} m={m} monotone={}\n", outcome.monotone);
            for (d, r) in outcome.deltas().iter().zip(outcome.ratios()) {
                let _ = writeln!(summary, "  delta {d:<8} ratio {r:.12}");
            }
            let config = json!({ "eps": eps, "m": m, "deltas": deltas, "radial_grid": g.radial, "csv": csv });
            Ok((Report::new("sharpness", seed, config, outcome.monotone, serde_json::to_value(&outcome)?), summary))
        }

        Command::Equality { id, family, eps, m, lambda, delta, cutoff } => {
            let g = grids(common, None)?;
            let fam = match family {
                FamilyArg::Psi0 => ExtremizerFamily::psi0(*eps, *m, *delta)?,
                FamilyArg::ExpLambda => match lambda {
                    Some(l) => ExtremizerFamily::exp_lambda(*eps, *m, *l)?,
                    None => ExtremizerFamily::exp_lambda_extremal(*eps, *m)?,
                },
                FamilyArg::Phi0Radial => ExtremizerFamily::phi0_radial(*eps, *m, *cutoff)?,
            };
            let r = equality_case(*id, &fam, g.radial)?;
            let mut rows = report_rows(&r);
            rows.extend(r.notes.iter().map(|n| ("note", n.clone())));
            let summary = table("equality", &rows);
            let config = json!({ "id": id, "family": fam, "radial_grid": g.radial });
            Ok((Report::new("equality", seed, config, r.holds(), serde_json::to_value(&r)?), summary))
        }

        Command::Solve { potential, field, params, sign, mass, max_terms, probe, psi_out } => {
            let g = grids(common, None)?;
            let (ps, pbase) = potential_from(potential)?;
            let v = ps.build(&pbase)?;
            let defaults = FieldDefaults { arity: 4, seed, eps: 1.0, mass: *mass };
            let (spec, base) = field_from(field, params, &defaults)?;
            let f = cartesian(spec.build(g.cartesian, g.radial, &base)?, &g)?;
            let cfg = SolverConfig {
                max_terms: *max_terms,
                enforce_hypothesis: !probe,
                ..SolverConfig::new((*sign).into(), *mass)
            };
            let out = solve(&f, &v, &cfg)?;
            if let Some(path) = psi_out {
                let mut buf = Vec::new();
                write_field(&mut buf, &out.psi, Precision::Complex128)?;
                write_atomic(path, &buf)?;
            }
            let s = &out.summary;
            let passed = s.residual <= cfg.residual_tol
                && s.diagnostics.norm_ratio <= 1.0 + NORM_SLACK
                && s.diagnostics.is_finite();
            let mut rows = vec![
                ("potential", ps_label(&v)),
                ("bound", format!("{:.6}", s.potential_bound)),
                ("terms", s.terms.to_string()),
                ("contraction", format!("{:.4}", s.contraction_factor)),
                ("residual", format!("{:.3e}", s.residual)),
                ("|psi|/|f|", format!("{:.6}", s.diagnostics.norm_ratio)),
                ("int |psi|^2/|x|", format!("{:.6e}", s.diagnostics.inverse_weighted)),
                ("local gradient", format!("{:.6e}", s.diagnostics.local_gradient)),
                ("H^1/2 norm", format!("{:.6e}", s.diagnostics.h_half)),
            ];
            rows.extend(s.warnings.iter().map(|w| ("warning", w.clone())));
            let config = json!({
                "potential": ps, "field": spec, "solver": cfg, "grids": g, "psi_out": psi_out,
            });
            Ok((Report::new("solve", seed, config, passed, serde_json::to_value(s)?), table("solve", &rows)))
        }

        Command::Symmetry { potential, field, field2, mass, tol } => {
            let g = grids(common, None)?;
            let (ps, pbase) = potential_from(potential)?;
            let v = ps.build(&pbase)?;
            let first = FieldDefaults { arity: 4, seed, eps: 1.0, mass: *mass };
            let second = FieldDefaults { seed: seed.wrapping_add(1), ..first };
            let (s1, b1) = field_from(field, &[], &first)?;
            let (s2, b2) = field_from(field2.as_deref().unwrap_or(field), &[], &second)?;
            let f1 = cartesian(s1.build(g.cartesian, g.radial, &b1)?, &g)?;
            let f2 = cartesian(s2.build(g.cartesian, g.radial, &b2)?, &g)?;
            let cfg = SolverConfig::new(Sign::Plus, *mass);
            let defect = symmetry_check(&f1, &f2, &v, &cfg)?;
            let passed = defect <= *tol;
            let summary = table(
                "symmetry",
                &[("potential", ps_label(&v)), ("defect", format!("{defect:.3e}")), ("tolerance", format!("{tol:e}"))],
            );
            let config = json!({ "potential": ps, "field": s1, "field2": s2, "mass": mass, "tol": tol, "grids": g });
            Ok((Report::new("symmetry", seed, config, passed, json!({ "defect": defect })), summary))
        }

        Command::ReportMerge { inputs } => {
            let mut reports = Vec::with_capacity(inputs.len());
            let mut passed = 0;
            let mut rows = Vec::new();
            for path in inputs {
                let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                let ok = v.get("passed").and_then(Value::as_bool).ok_or_else(|| {
                    CliError::Config(format!("{} is not a report (no `passed` field)", path.display()))
                })?;
                passed += usize::from(ok);
                rows.push((path.display().to_string(), if ok { "pass" } else { "FAIL" }.to_string()));
                reports.push(v);
            }
            let all = passed == inputs.len();
            let row_refs: Vec<(&str, String)> = rows.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
            let summary = table(&format!("report-merge: {passed} of {} passed", inputs.len()), &row_refs);
            let result = json!({ "total": inputs.len(), "passed_count": passed, "reports": reports });
            Ok((Report::new("report-merge", seed, json!({ "inputs": inputs }), all, result), summary))
        }
    }
}

fn ps_label(v: &MatrixPotential) -> String {
    format!("{:?}", v.kind())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_text_forms() {
        assert_eq!(spec_text("gaussian-packet", &[]).unwrap().0, "kind=gaussian-packet");
        assert_eq!(spec_text("kind=coulomb nu=0.5", &["x=1".into()]).unwrap().0, "kind=coulomb nu=0.5\nx=1");
        assert!(spec_text("@/definitely/missing", &[]).is_err());
    }

    #[test]
    fn tables_align() {
        let t = table("t", &[("a", "1".into()), ("long", "2".into())]);
        assert_eq!(t, "t\n  a     1\n  long  2\n");
    }
}
