use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;

use rmt_tails::exec::Exec;
use rmt_tails::montecarlo::{lambda_max_stats, sample_chains, write_csv, SamplerConfig, RNG_NAME};
use rmt_tails::orthopoly::{hankel_log_gap, log_gap_probability, TruncatedWeight};
use rmt_tails::potentials::{count_real_roots, saddle_points, Family, Polynomial, PotentialSpec};
use rmt_tails::rate_functions::{gaussian_action, gaussian_left_f, left_tail_general_with_digits, multicritical_action};
use rmt_tails::real::MAX_DIGITS;
use rmt_tails::spectral_curve::{density, heff, instanton_action, right_tail_with_landscape, solve_one_cut, y_real};
use rmt_tails::verify::{run_all, run_suite, SuiteReport};
use rmt_tails::Error;

use crate::manifest::{sha256_file, RunManifest};
use crate::{Cli, CliError, Command, FamilyArg, PotentialArgs, SideArg};

/// Largest N for which `gap` adds the Hankel cross-check column.
const HANKEL_COLUMN_MAX_N: usize = 6;

fn num(x: f64) -> String {
    // no "-0" in output
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

impl PotentialArgs {
    fn spec(&self, t: f64) -> Result<PotentialSpec, CliError> {
        let family = if let Some(cs) = &self.coeffs {
            let coeffs = cs.iter().map(|c| Polynomial::parse_coeff(c.trim())).collect::<Result<Vec<_>, _>>()?;
            Family::Custom { coeffs: Polynomial::new(coeffs) }
        } else {
            match self.family {
                FamilyArg::Gaussian => Family::Gaussian,
                FamilyArg::Multicritical => {
                    let k = self.k.ok_or_else(|| CliError::Usage("--family multicritical needs --k".into()))?;
                    if k < 0 {
                        return Err(CliError::Usage(format!("--k must be a non-negative integer, got {k}")));
                    }
                    Family::Multicritical { k: k as u32 }
                }
            }
        };
        Ok(PotentialSpec::new(family, t)?)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run(args: &[String]) -> Result<(), CliError> {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Err(CliError::Usage(String::new())) } else { Ok(()) };
        }
    };
    if cli.precision == 0 || cli.precision > MAX_DIGITS {
        return Err(CliError::Usage(format!("--precision must be in 1..={MAX_DIGITS}")));
    }
    let mut man = RunManifest::new(args[1..].to_vec(), cli.precision);
    let p = cli.precision;
    let csv = match &cli.command {
        Command::Potential { pot, json } => {
            let text = cmd_potential(&pot.spec(1.0)?, *json)?;
            print!("{text}");
            return Ok(());
        }
        Command::Verify { suite } => return cmd_verify(suite.as_deref()),
        Command::Replay { manifest } => return cmd_replay(manifest),
        Command::Spectral { pot, t, x_grid } => {
            let spec = pot.spec(*t)?;
            man.potential = Some(spec.clone());
            man.t = Some(*t);
            cmd_spectral(&spec, x_grid.as_ref(), p)?
        }
        Command::Tails { pot, side, t, z_grid, n } => {
            let spec = pot.spec(*t)?;
            man.potential = Some(spec.clone());
            man.t = Some(*t);
            man.n = *n;
            man.z_grid = Some(z_grid.to_string());
            cmd_tails(&spec, *side, &z_grid.points(), *n, p)?
        }
        Command::Gap { pot, t, n, z_grid } => {
            let spec = pot.spec(*t)?;
            man.potential = Some(spec.clone());
            man.t = Some(*t);
            man.n = Some(*n);
            man.z_grid = Some(z_grid.to_string());
            cmd_gap(&spec, *n, &z_grid.points(), p)?
        }
        Command::Sample { pot, t, n, sweeps, seed, wall, burn_in, thin, chains, step } => {
            let spec = pot.spec(*t)?;
            man.potential = Some(spec.clone());
            man.t = Some(*t);
            man.n = Some(*n);
            man.seed = Some(*seed);
            man.rng = Some(RNG_NAME.to_string());
            let cfg = SamplerConfig {
                v: spec.polynomial()?,
                t: *t,
                n: *n,
                wall: *wall,
                step: *step,
                sweeps: *sweeps,
                burn_in: *burn_in,
                thin: *thin,
                seed: *seed,
                initial: None,
            };
            cmd_sample(&cfg, (*chains).max(1))?
        }
    };
    match &cli.out {
        Some(path) => {
            fs::write(path, csv)?;
            let m = man.write_for(path)?;
            eprintln!("wrote {} and {}", path.display(), m.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_potential(spec: &PotentialSpec, json: bool) -> Result<String, CliError> {
    let v = spec.polynomial()?;
    let dv = v.derivative();
    let roots = count_real_roots(&dv, None)?;
    let sp = saddle_points(&v)?;
    let coeffs: Vec<String> = v.coeffs().iter().map(|c| c.to_string()).collect();
    if json {
        let crit = |ps: &[rmt_tails::potentials::CriticalPoint]| -> Vec<serde_json::Value> {
            ps.iter()
                .map(|c| serde_json::json!({"x": c.x, "value": c.value, "multiplicity": c.multiplicity}))
                .collect()
        };
        let out = serde_json::json!({
            "potential": spec.label(),
            "coefficients": coeffs,
            "V": v.to_string(),
            "dV": dv.to_string(),
            "real_roots_of_dV": roots,
            "minima": crit(&sp.real_minima),
            "maxima": crit(&sp.real_maxima),
            "inflections": crit(&sp.inflections),
            "complex_saddles": sp.complex_saddles.iter().map(|c| serde_json::json!({"re": c.z.0, "im": c.z.1, "multiplicity": c.multiplicity})).collect::<Vec<_>>(),
        });
        return Ok(serde_json::to_string_pretty(&out).expect("serialisable") + "\n");
    }
    let mut s = String::new();
    let _ = writeln!(s, "potential: {}", spec.label());
    let _ = writeln!(s, "V(x) = {v}");
    let _ = writeln!(s, "coefficients (x^0 upwards): {}", coeffs.join(", "));
    let _ = writeln!(s, "V'(x) = {dv}");
    let _ = writeln!(s, "real roots of V' (Sturm count): {roots}");
    for (kind, pts) in [("minimum", &sp.real_minima), ("maximum", &sp.real_maxima), ("inflection", &sp.inflections)] {
        for c in pts.iter() {
            let _ = writeln!(s, "{kind}: x = {}  V = {}  multiplicity {}", num(c.x), num(c.value), c.multiplicity);
        }
    }
    for c in &sp.complex_saddles {
        let _ = writeln!(s, "complex saddle: {} {:+.16e}i  multiplicity {}", num(c.z.0), c.z.1, c.multiplicity);
    }
    Ok(s)
}

fn cmd_spectral(spec: &PotentialSpec, grid: Option<&crate::grid::Grid>, precision: u32) -> Result<String, CliError> {
    let v = spec.polynomial()?;
    let sol = solve_one_cut(&v, spec.t)?;
    let xs = match grid {
        Some(g) => g.points(),
        None => {
            let w = sol.a - sol.b;
            crate::grid::Grid { lo: sol.b - 0.25 * w, hi: sol.a + 0.25 * w, count: 101, log: false }.points()
        }
    };
    let rows = Exec::Parallel.map(xs, |x| -> Result<String, Error> {
        Ok(format!("{},{},{},{}", num(x), num(density(&sol, x).value), num(y_real(&sol, x)), num(heff(&sol, x)?)))
    });
    let mut s = String::new();
    let _ = writeln!(s, "# rmt-tails spectral potential={} precision={precision}", spec.label());
    let _ = writeln!(s, "# b={},a={},t={}", num(sol.b), num(sol.a), num(sol.t));
    let _ = writeln!(s, "x,rho,y,heff");
    for r in rows {
        let _ = writeln!(s, "{}", r?);
    }
    Ok(s)
}

fn cmd_tails(
    spec: &PotentialSpec,
    side: SideArg,
    zs: &[f64],
    n: Option<usize>,
    precision: u32,
) -> Result<String, CliError> {
    let v = spec.polynomial()?;
    let t = spec.t;
    let sol = solve_one_cut(&v, t)?;
    let mut s = String::new();
    let _ = writeln!(s, "# rmt-tails tails side={} potential={} precision={precision}",
        if side == SideArg::Left { "left" } else { "right" },
        spec.label());
    let _ = writeln!(s, "# b={},a={},t={}", num(sol.b), num(sol.a), num(t));
    let gaussian = matches!(spec.family, Family::Gaussian);
    let k1 = matches!(spec.family, Family::Multicritical { k: 1 });
    match side {
        SideArg::Left => {
            let _ = writeln!(s, "z,value,method,flag");
            let rows = Exec::Parallel.map(zs.to_vec(), |z| {
                if z >= sol.a {
                    return format!("{},{},closed_form,beyond_edge", num(z), num(0.0));
                }
                if gaussian {
                    let f = gaussian_left_f(z, t).unwrap_or(f64::NAN);
                    return format!("{},{},closed_form,ok", num(z), num(f));
                }
                match left_tail_general_with_digits(&v, t, z, precision) {
                    Ok(r) => format!("{},{},planar_solver,ok", num(z), num(r.value)),
                    Err(e) => format!("{},{},planar_solver,{}", num(z), num(f64::NAN), flag_of(&e)),
                }
            });
            rows.iter().for_each(|r| {
                let _ = writeln!(s, "{r}");
            });
        }
        SideArg::Right => {
            let _ = writeln!(s, "z,action,action_closed_form,log_p,method,flag");
            let rows = Exec::Parallel.map(zs.to_vec(), |z| {
                if z < sol.a {
                    let nan = num(f64::NAN);
                    return format!("{},{nan},{nan},{nan},spectral_curve,inside_support", num(z));
                }
                let action = instanton_action(&sol, z).map_or(f64::NAN, |a| a.action);
                let closed = if gaussian {
                    gaussian_action(t, z).unwrap_or(f64::NAN)
                } else if k1 {
                    multicritical_action(&sol, z).unwrap_or(f64::NAN)
                } else {
                    f64::NAN
                };
                let (lp, flag) = match n {
                    None => (f64::NAN, "ok".to_string()),
                    Some(n) => match right_tail_with_landscape(&v, t, z, n) {
                        Ok(r) => (r.value, "ok".to_string()),
                        Err(e) => (f64::NAN, flag_of(&e)),
                    },
                };
                format!("{},{},{},{},spectral_curve,{flag}", num(z), num(action), num(closed), num(lp))
            });
            rows.iter().for_each(|r| {
                let _ = writeln!(s, "{r}");
            });
        }
    }
    Ok(s)
}

fn flag_of(e: &Error) -> String {
    match e {
        Error::NearEdge { .. } => "near_edge".into(),
        Error::Domain(_) => "outside_domain".into(),
        _ => "solver_failed".into(),
    }
}

fn cmd_gap(spec: &PotentialSpec, n: usize, zs: &[f64], precision: u32) -> Result<String, CliError> {
    let v = spec.polynomial()?;
    let with_hankel = n <= HANKEL_COLUMN_MAX_N;
    let rows = Exec::Parallel.map(zs.to_vec(), |z| -> Result<String, Error> {
        let w = TruncatedWeight::new(v.clone(), spec.t, n, Some(z), precision)?;
        let g = log_gap_probability(&w)?;
        let mut row = format!("{},{},stieltjes,{}", num(z), num(g.log_p), g.digits);
        if with_hankel {
            let h = hankel_log_gap(&w)?;
            let _ = write!(row, ",{},{}", num(h.log_p), num((g.log_p - h.log_p).abs()));
        }
        Ok(row)
    });
    let mut s = String::new();
    let _ = writeln!(s, "# rmt-tails gap potential={} t={} N={n} precision={precision}", spec.label(), num(spec.t));
    let _ = writeln!(s, "{}", if with_hankel { "z,log_p,method,digits,hankel,abs_diff" } else { "z,log_p,method,digits" });
    for r in rows {
        let _ = writeln!(s, "{}", r?);
    }
    Ok(s)
}

fn cmd_sample(cfg: &SamplerConfig, chains: usize) -> Result<String, CliError> {
    let states = sample_chains(cfg, chains, Exec::Parallel)?;
    if states.len() >= 100 {
        let stats = lambda_max_stats(&states, &[0.5], &[])?;
        eprintln!("kept {} states, mean lambda_max = {:.6} +- {:.6}", stats.samples, stats.mean, stats.mean_err);
    }
    let mut buf = Vec::new();
    write_csv(&states, &mut buf)?;
    Ok(String::from_utf8(buf).expect("ascii csv"))
}

fn print_report(r: &SuiteReport) {
    println!("[{}] {} (criterion {}, {:.1} s)", if r.passed() { "PASS" } else { "FAIL" }, r.suite, r.criterion, r.seconds);
    for c in &r.checks {
        println!("    {} {}: {:.6e} ({})", if c.pass { "ok  " } else { "FAIL" }, c.label, c.value, c.bound);
    }
}

fn cmd_verify(suite: Option<&str>) -> Result<(), CliError> {
    let reports = match suite {
        Some(name) => vec![run_suite(name).map_err(|e| CliError::Usage(e.to_string()))?],
        None => run_all(),
    };
    reports.iter().for_each(print_report);
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.suite).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("failed suites: {}", failed.join(", "))))
    }
}

/// Replaces the value of `--out` in a recorded argument list.
fn redirect_out(args: &[String], to: &Path) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--out" {
            it.next();
            out.push("--out".into());
            out.push(to.display().to_string());
        } else if a.starts_with("--out=") {
            out.push(format!("--out={}", to.display()));
        } else {
            out.push(a.clone());
        }
    }
    out
}

fn cmd_replay(path: &Path) -> Result<(), CliError> {
    let man = RunManifest::read(path)?;
    let recorded = man
        .outputs
        .first()
        .ok_or_else(|| CliError::Usage("manifest lists no outputs".into()))?;
    let target = PathBuf::from(format!("{}.replay", recorded.path));
    let mut args = vec!["rmt-tails".to_string()];
    args.extend(redirect_out(&man.command_line, &target));
    // the recorded precision wins over the environment
    if !args.iter().any(|a| a == "--precision" || a.starts_with("--precision=")) {
        args.push(format!("--precision={}", man.precision));
    }
    run(&args)?;
    let digest = sha256_file(&target)?;
    if digest == recorded.sha256 {
        println!("identical: {} ({digest})", target.display());
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "digest mismatch: recorded {} but replay produced {digest} ({})",
            recorded.sha256,
            target.display()
        )))
    }
}
