//! The subcommands. Each returns its standard output and a human summary.

use std::fmt::Write;

use specasym_core::asymptotics::{
    check_boundary_match, chi1_fit, chi_fit, compute_d, extract_remainders, pair_difference,
};
use specasym_core::solutions::{birkhoff_fss, default_upsilon_grid, direct_mismatch, upsilon, upsilon_d};
use specasym_core::spectrum::{locate_eigenvalues, weight_numbers_checked, Spectrum};
use specasym_core::{
    conjugate_system, diagonal_split, sector_frame, ExpressionSpec, ProblemSpec, C,
};

use crate::config::{Overrides, ProblemConfig, Resolved};
use crate::error::CliError;
use crate::format::{complex12, num, Csv};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub stdout: String,
    /// Written to standard error under `--report`.
    pub report: String,
}

fn re_im(z: C) -> [String; 2] {
    [num(z.re), num(z.im)]
}

fn locate(problem: &ProblemSpec, s: &Resolved) -> Result<Spectrum, CliError> {
    Ok(locate_eigenvalues(problem, s.l_min, s.l_max, &s.locate)?)
}

fn spectrum_report(sp: &Spectrum) -> String {
    let m = &sp.model;
    let multiple = sp.data.iter().filter(|d| d.multiplicity > 1).count();
    format!(
        "located {} eigenvalues ({multiple} multiple), anchor radius {:.6} with {} zeros inside\n\
         model: kappa = {}, G = {:.12}, chi = {}, numbering shift {}\n",
        sp.data.len(),
        sp.anchor_radius,
        sp.anchor_count,
        m.kappa,
        m.growth,
        complex12(m.chi),
        m.shift
    )
}

/// `F(x)` as a whitespace-aligned table.
pub fn cmd_matrix(cfg: &ProblemConfig, x: f64) -> Result<Output, CliError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(CliError::Config {
            path: "x".into(),
            message: format!("x = {x} lies outside [0, 1]"),
        });
    }
    let problem = cfg.problem()?;
    let f = problem.matrix();
    let m = f.eval(x);
    let n = f.n();
    let cells: Vec<Vec<String>> = (0..n).map(|i| (0..n).map(|j| complex12(m[(i, j)])).collect()).collect();
    let width = cells.iter().flatten().map(|c| c.len()).max().unwrap_or(1);
    let mut out = String::new();
    for row in &cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    let report = format!(
        "F({x}) for n = {n}; breakpoints {:?}; companion: {}\n",
        f.breakpoints(),
        f.is_companion()
    );
    Ok(Output { stdout: out, report })
}

pub fn cmd_spectrum(cfg: &ProblemConfig, o: &Overrides) -> Result<Output, CliError> {
    let s = cfg.resolve(o)?;
    let problem = cfg.problem()?;
    let sp = locate(&problem, &s)?;
    let mut csv = Csv::new(&[
        "l",
        "re_lambda",
        "im_lambda",
        "re_rho",
        "im_rho",
        "re_eps",
        "im_eps",
        "multiplicity",
    ]);
    for d in &sp.data {
        let [a, b] = re_im(d.lambda);
        let [c, e] = re_im(d.rho);
        let [f, g] = re_im(d.epsilon);
        csv.row(&[d.l.to_string(), a, b, c, e, f, g, d.multiplicity.to_string()]);
    }
    Ok(Output {
        stdout: csv.finish(),
        report: spectrum_report(&sp),
    })
}

pub fn cmd_weights(cfg: &ProblemConfig, o: &Overrides) -> Result<Output, CliError> {
    if cfg.weight_form.is_none() {
        return Err(CliError::Config {
            path: "weight_form".into(),
            message: "the weights command needs a weight_form section".into(),
        });
    }
    let s = cfg.resolve(o)?;
    let problem = cfg.problem()?;
    let sp = locate(&problem, &s)?;
    let checked = weight_numbers_checked(&problem, &sp.data, &s.cauchy)?;
    let mut csv = Csv::new(&["l", "re_beta", "im_beta"]);
    let mut report = spectrum_report(&sp);
    let mut worst = 0.0f64;
    for (d, check) in &checked {
        match d.beta {
            Some(b) => {
                let [x, y] = re_im(b);
                csv.row(&[d.l.to_string(), x, y]);
            }
            None => csv.row(&[d.l.to_string(), String::new(), String::new()]),
        }
        if let Some(c) = check {
            worst = worst.max((c.beta - c.residue).norm() / c.beta.norm());
        }
    }
    writeln!(report, "largest relative gap between the derivative ratio and the residue: {worst:.3e}").unwrap();
    Ok(Output {
        stdout: csv.finish(),
        report,
    })
}

pub fn cmd_asymptotics(cfg: &ProblemConfig, o: &Overrides) -> Result<Output, CliError> {
    let s = cfg.resolve(o)?;
    let problem = cfg.problem()?;
    let sp = locate(&problem, &s)?;
    let m = &sp.model;
    let mut csv = Csv::new(&[
        "l",
        "re_c1",
        "im_c1",
        "re_c2",
        "im_c2",
        "re_chi",
        "im_chi",
        "re_rho0",
        "im_rho0",
        "re_lambda0",
        "im_lambda0",
    ]);
    let [c1r, c1i] = re_im(m.c1);
    let [c2r, c2i] = re_im(m.c2);
    let [chr, chi] = re_im(m.chi_effective());
    for l in s.l_min..=s.l_max {
        let [tr, ti] = re_im(m.predicted_t(l));
        let [lr, li] = re_im(m.predicted_lambda(l));
        csv.row(&[
            l.to_string(),
            c1r.clone(),
            c1i.clone(),
            c2r.clone(),
            c2i.clone(),
            chr.clone(),
            chi.clone(),
            tr,
            ti,
            lr,
            li,
        ]);
    }
    let mut report = spectrum_report(&sp);
    match chi_fit(&sp.data, m.growth, (s.l_min, s.l_max)) {
        Ok(c) => writeln!(report, "fitted chi over [{}, {}]: {}", s.l_min, s.l_max, complex12(c)).unwrap(),
        Err(e) => writeln!(report, "fitted chi unavailable: {e}").unwrap(),
    }
    let rem = extract_remainders(&sp.data, m);
    match chi1_fit(&rem.epsilons, (s.l_min, s.l_max)) {
        Ok(f) => writeln!(report, "fitted chi_1: {} (residual {:.3e}, {} indices)", complex12(f.chi1), f.residual, f.used).unwrap(),
        Err(e) => writeln!(report, "fitted chi_1 unavailable: {e}").unwrap(),
    }
    Ok(Output {
        stdout: csv.finish(),
        report,
    })
}

/// Smallest `nu0` such that the two specs share every `sigma_nu`, `nu >= nu0`.
fn default_nu0(a: &ExpressionSpec, b: &ExpressionSpec) -> usize {
    let n = a.n();
    let last_diff = (0..n - 1)
        .rev()
        .find(|&nu| !a.coefficients()[nu].symbolic_eq(&b.coefficients()[nu]));
    match last_diff {
        Some(nu) => (nu + 1).min(n - 1),
        None => n - 1,
    }
}

pub fn cmd_compare(a: &ProblemConfig, b: &ProblemConfig, nu0: Option<usize>, o: &Overrides) -> Result<Output, CliError> {
    let s = a.resolve(o)?;
    let need = |c: &ProblemConfig, which: &str| -> Result<ExpressionSpec, CliError> {
        c.expression()?.ok_or_else(|| CliError::Config {
            path: format!("{which}.coefficients"),
            message: "compare needs coefficient-form problems".into(),
        })
    };
    let (ea, eb) = (need(a, "A")?, need(b, "B")?);
    let nu0 = nu0.unwrap_or_else(|| default_nu0(&ea, &eb));
    let order = compute_d(&ea, &eb, nu0)?;
    let (pa, pb) = (a.problem()?, b.problem()?);
    let mut report = String::new();
    match check_boundary_match(&pa.boundary, &pb.boundary, order.d, false) {
        Ok(()) => writeln!(report, "boundary coefficients match to order d = {}", order.d).unwrap(),
        Err(e) => writeln!(report, "boundary coefficients do not match the decay hypothesis: {e}").unwrap(),
    }
    let (sa, sb) = (locate(&pa, &s)?, locate(&pb, &s)?);
    let cmp = pair_difference(&sa.data, &sb.data, &order, (s.l_min, s.l_max))?;
    let list = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let slope = cmp.slope_fit.map(num).unwrap_or_default();
    let [chr, chi] = re_im(cmp.c_hat);
    let mut csv = Csv::new(&[
        "l",
        "d",
        "n_d",
        "n_d0",
        "re_rho_hat",
        "im_rho_hat",
        "re_c_hat",
        "im_c_hat",
        "slope_fit",
    ]);
    for (l, r) in &cmp.rho_hat {
        let [x, y] = re_im(*r);
        csv.row(&[
            l.to_string(),
            order.d.to_string(),
            list(&order.n_d),
            list(&order.n_d0),
            x,
            y,
            chr.clone(),
            chi.clone(),
            slope.clone(),
        ]);
    }
    writeln!(
        report,
        "nu0 = {nu0}, d = {}, N_d = [{}], N_d0 = [{}], c_hat = {}, slope of |rho_hat| = {}",
        order.d,
        list(&order.n_d),
        list(&order.n_d0),
        complex12(cmp.c_hat),
        if slope.is_empty() { "none (identical spectra)".to_string() } else { slope.clone() }
    )
    .unwrap();
    Ok(Output {
        stdout: csv.finish(),
        report,
    })
}

/// Birkhoff solutions at `|rho|` on the bisector of the sector.
pub fn cmd_birkhoff(cfg: &ProblemConfig, rhos: &[f64], o: &Overrides) -> Result<Output, CliError> {
    if let Some(i) = rhos.iter().position(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(CliError::Config {
            path: format!("rho[{i}]"),
            message: format!("|rho| must be positive, got {}", rhos[i]),
        });
    }
    let s = cfg.resolve(o)?;
    let problem = cfg.problem()?;
    let f = problem.matrix();
    let n = f.n();
    let frame = sector_frame(n, s.kappa.unwrap_or(1))?.with_extension(s.h, 1.0);
    let sys = conjugate_system(&diagonal_split(f), &frame)?;
    // Against the zero-coefficient problem the leading difference term is the first nonzero A_k.
    let d = sys.a.iter().position(|a| !a.is_zero()).unwrap_or(0);
    let mut csv = Csv::new(&["re_rho", "im_rho", "upsilon", "upsilon_d", "max_E", "residual"]);
    let mut report = format!("sector kappa = {}, leading term A_{d}\n", frame.kappa);
    for &t in rhos {
        let rho = frame.midpoint_direction() * t;
        let grid = default_upsilon_grid(rho);
        let sol = birkhoff_fss(&sys, rho, &s.birkhoff)?;
        let res = direct_mismatch(f, &frame, &sol, 5, &s.integration)?;
        let [x, y] = re_im(rho);
        csv.row(&[
            x,
            y,
            num(upsilon(&sys, rho, grid)),
            num(upsilon_d(&sys.a[d], &frame.omegas, rho, grid)),
            num(sol.max_remainder()),
            num(res),
        ]);
        writeln!(report, "|rho| = {t}: {} fixed-point iterations", sol.iterations).unwrap();
    }
    Ok(Output {
        stdout: csv.finish(),
        report,
    })
}
