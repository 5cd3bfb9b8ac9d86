use dlpad::asymptotics::{
    growth_exponent, kappa_star, linear_grid, max_pairwise_spread, theta, ScalingCurve, KAPPA_STAR_CALIBRATION,
};
use dlpad::cgf::{activity, cgf, critical_cumulant_with, Precision};
use dlpad::combinatorics::{phi_asymptotic, phi_exact};
use dlpad::mc::{simulate_replica, summarize, McConfig};
use dlpad::model::critical_point;
use dlpad::oracles::{build_sector_hamiltonian, fd_cumulants};
use dlpad::{ModelParams, Sector};
use rayon::prelude::*;
use serde_json::json;

use crate::args::{CollapseArgs, CumulantsArgs, OracleArgs, PhiArgs, SimulateArgs};
use crate::table::{Cell, Format, Table};
use crate::{CliError, Report};

const DEFAULT_NU: f64 = 0.9;
const DEFAULT_MC_NU: f64 = 0.5;
const ORACLE_NUS: [f64; 3] = [0.3, 0.5, 0.9];
const ORACLE_S_OFFSET: f64 = 0.2;

fn check_sizes(sizes: &[usize]) -> Result<(), CliError> {
    if sizes.is_empty() {
        return Err(CliError::Usage("--L needs at least one size".into()));
    }
    if let Some(l) = sizes.iter().find(|&&l| l < 2 || l % 2 != 0) {
        return Err(CliError::Usage(format!("L = {l} must be even and at least 2")));
    }
    Ok(())
}

/// `K` for `(w, μ)` is `2w` times `K` at `w = 1/2` and the same `ν`.
fn rate_scale(p: &ModelParams) -> f64 {
    2.0 * p.w()
}

fn rate_meta(t: &mut Table, p: &ModelParams) {
    t.meta("nu", json!(p.nu()));
    t.meta("w", json!(p.w()));
    t.meta("mu", json!(p.mu()));
    t.meta("rate_scale", json!(rate_scale(p)));
}

pub fn cumulants(a: &CumulantsArgs) -> Result<Report, CliError> {
    let p = a.rates.resolve(DEFAULT_NU)?;
    check_sizes(&a.sizes)?;
    if a.orders.is_empty() {
        return Err(CliError::Usage("--orders needs at least one order".into()));
    }
    let nu = p.nu();
    if nu >= 1.0 {
        return Err(CliError::Usage("no critical point for mu >= w".into()));
    }
    let sector = Sector::from(a.sector);
    let scale = rate_scale(&p);
    let jobs: Vec<(usize, usize)> = a.sizes.iter().flat_map(|&l| a.orders.iter().map(move |&n| (l, n))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(l, n)| -> Result<Vec<Cell>, CliError> {
            let kc = scale * critical_cumulant_with(nu, l, n, sector, Precision::Auto)?;
            let ks = match sector {
                Sector::Even => scale * kappa_star(n, nu)?,
                Sector::Odd => f64::NAN,
            };
            let lf = l as f64;
            let ratio = match (n, growth_exponent(n)) {
                (0 | 1, _) => kc,
                (_, 0) => kc / lf.ln(),
                (_, e) => kc / lf.powi(e),
            };
            Ok(vec![l.into(), n.into(), kc.into(), ks.into(), ratio.into()])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new("cumulants/1", &["L", "n", "kappa_c", "kappa_star", "ratio"]);
    t.rows = rows;
    rate_meta(&mut t, &p);
    t.meta("sector", json!(sector.as_str()));
    t.meta("kappa_star_calibration", json!(KAPPA_STAR_CALIBRATION));
    t.meta("ratio", json!("n<=1: kappa_c; n=2,3: kappa_c/ln L; even n>=4: kappa_c/L^(n-2); odd n>=5: kappa_c/L^(n-3)"));
    Ok(Report { table: t, passed: true, default_format: Format::Csv })
}

pub fn collapse(a: &CollapseArgs) -> Result<Report, CliError> {
    let p = a.rates.resolve(DEFAULT_NU)?;
    check_sizes(&a.sizes)?;
    let nu = p.nu();
    if nu >= 1.0 {
        return Err(CliError::Usage("no critical point for mu >= w".into()));
    }
    let us = linear_grid(a.u_min, a.u_max, a.u_steps)?;
    let scale = rate_scale(&p);
    let limit = ScalingCurve::limit_h(nu, &us, a.tol)?;
    let curves = a.sizes.par_iter().map(|&l| ScalingCurve::finite_l(nu, l, &us)).collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new("collapse/1", &["L", "u", "L2_K0_tilde", "h_limit"]);
    for (c, &l) in curves.iter().zip(&a.sizes) {
        for (&(u, v), &(_, h)) in c.samples.iter().zip(&limit.samples) {
            t.push(vec![l.into(), u.into(), (scale * v).into(), (scale * h).into()]);
        }
    }
    rate_meta(&mut t, &p);
    t.meta("theta", json!(theta(nu)?));
    t.meta("kappa_star_calibration", json!(KAPPA_STAR_CALIBRATION));
    t.meta("h_calibration", json!(1.0));
    t.meta("max_pairwise_spread", json!(scale * max_pairwise_spread(&curves)));
    t.meta("h_tol", json!(a.tol));
    Ok(Report { table: t, passed: true, default_format: Format::Csv })
}

struct OracleCase {
    p: ModelParams,
    size: usize,
    sector: Sector,
    label: String,
    s: f64,
}

fn oracle_cases(a: &OracleArgs) -> Result<Vec<OracleCase>, CliError> {
    let params: Vec<ModelParams> = match (a.w, a.mu) {
        (Some(w), Some(mu)) => vec![ModelParams::new(w, mu)?],
        _ if a.nu.is_empty() => ORACLE_NUS.iter().map(|&nu| ModelParams::from_nu(nu)).collect::<Result<_, _>>()?,
        _ => a.nu.iter().map(|&nu| ModelParams::from_nu(nu)).collect::<Result<_, _>>()?,
    };
    let sectors: Vec<Sector> = match a.sector {
        Some(s) => vec![s.into()],
        None => Sector::BOTH.to_vec(),
    };
    let mut cases = Vec::new();
    for p in &params {
        let tilts: Vec<(String, f64)> = if !a.s.is_empty() {
            a.s.iter().map(|&s| ("custom".to_owned(), s)).collect()
        } else {
            let mut v = vec![("0".to_owned(), 0.0)];
            if let Ok(sc) = critical_point(p) {
                v.push(("s_c".into(), sc));
                v.push(("s_c-0.2".into(), sc - ORACLE_S_OFFSET));
                v.push(("s_c+0.2".into(), sc + ORACLE_S_OFFSET));
            }
            v
        };
        for &size in &a.sizes {
            for &sector in &sectors {
                for (label, s) in &tilts {
                    cases.push(OracleCase { p: *p, size, sector, label: label.clone(), s: *s });
                }
            }
        }
    }
    Ok(cases)
}

pub fn oracle_check(a: &OracleArgs) -> Result<Report, CliError> {
    check_sizes(&a.sizes)?;
    if let Some(l) = a.sizes.iter().find(|&&l| l > dlpad::oracles::ed::MAX_SIZE) {
        return Err(CliError::Usage(format!("L = {l} exceeds the exact-diagonalization limit")));
    }
    let cases = oracle_cases(a)?;
    let results = cases
        .par_iter()
        .map(|c| -> Result<(Vec<Cell>, bool), CliError> {
            let k = cgf(&c.p, c.s, c.size, c.sector)?;
            let mut h = build_sector_hamiltonian(&c.p, c.s, c.size, c.sector)?;
            if let Some(eps) = a.perturb {
                h.perturb(eps);
            }
            let (k_ed, ed_note) = match h.ground_energy() {
                Ok(e) => (-e / c.size as f64, None),
                Err(e) => (f64::NAN, Some(e.to_string())),
            };
            let act = activity(&c.p, c.s, c.size, c.sector)?;
            let fd = fd_cumulants(&c.p, c.size, c.s, 1, c.sector)?;
            let res_ed = (k - k_ed).abs();
            let res_fd = (act - fd.value).abs();
            let ok = res_ed <= a.tol && res_fd <= a.fd_tol;
            let status = match ed_note {
                Some(msg) => format!("error: {msg}"),
                None if ok => "ok".to_owned(),
                None => "fail".to_owned(),
            };
            let row = vec![
                c.p.nu().into(),
                c.p.w().into(),
                c.p.mu().into(),
                c.size.into(),
                c.sector.as_str().into(),
                c.label.as_str().into(),
                c.s.into(),
                k.into(),
                k_ed.into(),
                res_ed.into(),
                act.into(),
                fd.value.into(),
                fd.error.into(),
                res_fd.into(),
                status.into(),
            ];
            Ok((row, ok))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(
        "oracle-check/1",
        &[
            "nu",
            "w",
            "mu",
            "L",
            "sector",
            "s_label",
            "s",
            "cgf_formula",
            "cgf_ed",
            "residual_ed",
            "activity_formula",
            "activity_fd",
            "fd_error",
            "residual_fd",
            "status",
        ],
    );
    let mut passed = true;
    let mut failures = 0usize;
    for (row, ok) in results {
        passed &= ok;
        failures += usize::from(!ok);
        t.push(row);
    }
    t.meta("tol", json!(a.tol));
    t.meta("fd_tol", json!(a.fd_tol));
    t.meta("perturb", json!(a.perturb));
    t.meta("failures", json!(failures));
    Ok(Report { table: t, passed, default_format: Format::Csv })
}

pub fn simulate(a: &SimulateArgs) -> Result<Report, CliError> {
    let p = a.rates.resolve(DEFAULT_MC_NU)?;
    if a.size < 2 || a.size % 2 != 0 {
        return Err(CliError::Usage(format!("L = {} must be even and at least 2", a.size)));
    }
    let cfg = McConfig { burn_in_fraction: a.burn_in, ..McConfig::new(a.size, a.t_max, a.seed, a.replicas) };
    cfg.validate()?;
    let runs =
        (0..a.replicas as u64).into_par_iter().map(|i| simulate_replica(&p, &cfg, i)).collect::<Result<Vec<_>, _>>()?;
    let s = summarize(&p, &runs)?;
    let (dz, az) = (s.density_z(), s.activity_z());
    let passed = dz.abs() <= a.z_max && az.abs() <= a.z_max;
    let mut t = Table::new(
        "simulate/1",
        &[
            "L",
            "replicas",
            "t_max",
            "burn_in",
            "seed",
            "density",
            "density_se",
            "density_theory",
            "density_z",
            "activity_rate",
            "activity_rate_se",
            "activity_rate_theory",
            "activity_z",
            "depositions",
            "annihilations",
            "hops",
        ],
    );
    t.push(vec![
        a.size.into(),
        s.replicas.into(),
        a.t_max.into(),
        a.burn_in.into(),
        a.seed.into(),
        s.density.into(),
        s.density_se.into(),
        s.density_theory.into(),
        dz.into(),
        s.activity_rate.into(),
        s.activity_rate_se.into(),
        s.activity_rate_theory.into(),
        az.into(),
        s.events.deposition.into(),
        s.events.annihilation.into(),
        s.events.hop.into(),
    ]);
    rate_meta(&mut t, &p);
    t.meta("z_max", json!(a.z_max));
    t.meta("rng", json!("ChaCha8, seed_from_u64(seed), stream = replica index"));
    Ok(Report { table: t, passed, default_format: Format::Json })
}

pub fn phi_table(a: &PhiArgs) -> Result<Report, CliError> {
    let mut t = Table::new("phi-table/1", &["m", "N", "exact", "asymptotic", "diff_N4"]);
    for &m in &a.m {
        for &n in &a.n {
            let exact = phi_exact(m, n)?;
            let asym = phi_asymptotic(m, n)?;
            let n4 = (n as f64).powi(4);
            t.push(vec![m.into(), n.into(), exact.into(), asym.into(), ((exact - asym) * n4).into()]);
        }
    }
    Ok(Report { table: t, passed: true, default_format: Format::Csv })
}
