//! The full verification suite for one system, multiplicity and weight.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bethe::{self, SolveOptions};
use crate::eigen::{self, EigenfunctionEval, JumpStencil};
use crate::error::Result;
use crate::exp_poly::ExpPolynomial;
use crate::operators::checks;
use crate::report::{track, CheckReport};
use crate::root_system::{AffineRoot, Multiplicity, RootSystem};
use crate::sampling::{random_alcove_point, random_wall_point};
use crate::weyl::WeylGroup;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteOptions {
    pub points: usize,
    pub wall_points: usize,
    pub sigma_samples: usize,
    pub seed: u64,
    pub fd_step: f64,
    /// Coarse step of the convergence-order measurement.
    pub order_step: f64,
    pub limit_k: f64,
    pub limit_identity_k: f64,
    /// Adds `t·i·ρ` to `λ` before the eigenfunction checks.
    pub perturb_lambda: Option<f64>,
    /// Restricts the suite to checks whose name starts with one of these.
    pub only: Option<Vec<String>>,
    #[serde(skip)]
    pub solve: SolveOptions,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            points: 20,
            wall_points: 10,
            sigma_samples: 100,
            seed: 42,
            fd_step: 1e-4,
            order_step: 0.02,
            limit_k: 1e6,
            limit_identity_k: 1e4,
            perturb_lambda: None,
            only: None,
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub system: String,
    pub multiplicity: Multiplicity,
    pub weight: Vec<i64>,
    pub checks: Vec<CheckReport>,
    pub all_pass: bool,
}

struct Ctx<'a> {
    rs: &'a Arc<RootSystem>,
    wg: &'a WeylGroup,
    k: Multiplicity,
    weight: &'a [i64],
    opts: &'a SuiteOptions,
    out: Vec<CheckReport>,
}

impl Ctx<'_> {
    fn wants(&self, name: &str) -> bool {
        match &self.opts.only {
            None => true,
            Some(list) => list.iter().any(|p| name.starts_with(p.as_str())),
        }
    }

    fn push(&mut self, r: CheckReport) {
        if self.wants(&r.name) {
            self.out.push(r);
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.opts.seed);
        r.set_stream(stream);
        r
    }
}

/// Runs every checker; a checker that errors is reported as a failure.
pub fn run_suite(
    rs: &Arc<RootSystem>,
    wg: &WeylGroup,
    k: &Multiplicity,
    weight: &[i64],
    opts: &SuiteOptions,
) -> Result<SuiteReport> {
    k.validate()?;
    rs.weight(weight)?;
    let mut ctx = Ctx {
        rs,
        wg,
        k: *k,
        weight,
        opts,
        out: Vec::new(),
    };
    operator_checks(&mut ctx);
    let eig = solver_checks(&mut ctx);
    if let Some(eig) = eig {
        eigen_checks(&mut ctx, &eig);
    }
    let all_pass = ctx.out.iter().all(|c| c.pass);
    Ok(SuiteReport {
        system: rs.name(),
        multiplicity: *k,
        weight: weight.to_vec(),
        checks: ctx.out,
        all_pass,
    })
}

fn or_fail(name: &str, r: Result<CheckReport>) -> CheckReport {
    r.unwrap_or_else(|e| CheckReport::flag(name, false, format!("error: {e}")))
}

fn random_direction<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn operator_checks(ctx: &mut Ctx<'_>) {
    let rs: &RootSystem = ctx.rs;
    let k = ctx.k;
    let n = rs.rank;
    let mut rng = ctx.rng(1);
    let fs: Vec<ExpPolynomial> = (0..4).map(|_| checks::sample_function(&mut rng, rs, 3)).collect();
    ctx.push(checks::check_quadratic(rs, &fs, 1e-12));
    ctx.push(checks::check_braid(rs, &k, &fs, 1e-10));
    ctx.push(checks::check_involution(rs, &k, &fs, 1e-10));
    ctx.push(checks::check_wall_restriction(rs, &k, &fs[0], ctx.opts.wall_points, &mut rng, 1e-10));
    ctx.push(checks::check_antisymmetry(rs, &fs, 1e-10));
    ctx.push(checks::check_symbolic_cross(rs, &k, &fs, &mut rng, 1e-10));
    ctx.push(checks::check_intertwiner_commutation(rs, &k, &fs, &mut rng, 1e-10));
    let mus: Vec<Vec<Complex64>> = (0..10)
        .map(|_| (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..3.0))).collect())
        .collect();
    ctx.push(checks::check_intertwiner_closed_form(rs, &k, &mus, 1e-10));

    if !["cross_relation", "dunkl_commutator", "intertwining", "w0_invariant_descent", "laplacian"]
        .iter()
        .any(|p| ctx.wants(p))
    {
        return;
    }
    let f = checks::sample_function(&mut rng, rs, 3);
    let points = checks::regular_points(&mut rng, rs, ctx.opts.points);
    let u = random_direction(&mut rng, n);
    let u2 = random_direction(&mut rng, n);
    let arc = ctx.rs.clone();
    let mut reports: Vec<CheckReport> = (0..=n)
        .into_par_iter()
        .map(|j| {
            or_fail(
                &format!("cross_relation_a{j}"),
                checks::check_cross_relation(arc.clone(), &k, j, &u, &f, &points, 1e-8),
            )
        })
        .collect();
    reports.push(or_fail(
        "dunkl_commutator",
        checks::check_commutator(arc.clone(), &k, &u, &u2, &f, &points, 1e-8),
    ));
    reports.push(or_fail("intertwining", checks::check_intertwining(arc.clone(), &k, &u, &f, &points, 1e-8)));
    match checks::check_w0_invariant_descent(arc, &k, &f, &points, 1e-8, 1e-4) {
        Ok(d) => {
            reports.push(d.symbolic);
            reports.push(d.finite_difference);
        }
        Err(e) => reports.push(CheckReport::flag("w0_invariant_descent", false, format!("error: {e}"))),
    }
    for r in reports {
        ctx.push(r);
    }
}

fn random_dominant<R: Rng>(rng: &mut R, rs: &RootSystem) -> Vec<f64> {
    let mut v = vec![0.0; rs.rank];
    for w in &rs.fundamental_weights {
        v = crate::linalg::axpy(&v, rng.gen_range(0.0..3.0) * 2.0 * PI, w);
    }
    v
}

/// Returns the eigenfunction to verify, if the spectral point is regular.
fn solver_checks(ctx: &mut Ctx<'_>) -> Option<EigenfunctionEval> {
    let rs: &RootSystem = ctx.rs;
    let wg = ctx.wg;
    let k = ctx.k;
    let weight = ctx.weight;
    let sopts = ctx.opts.solve;
    if k.is_zero() || k.require_positive(rs).is_err() {
        let note = "vanishing multiplicity: free spectral point 2πμ";
        for name in ["bae_residual", "gap_bounds", "sigma_bounds", "equivariance", "impenetrable_limit", "pauli"] {
            ctx.push(CheckReport::skipped(name, note));
        }
        let mu = rs.weight(weight).ok()?;
        let lambda: Vec<Complex64> = mu.iter().map(|&x| Complex64::new(0.0, 2.0 * PI * x)).collect();
        let lambda = perturbed(ctx, &lambda);
        let psi = eigen::psi_free(rs, wg, &lambda);
        let p2 = lambda.iter().map(|z| z * z).sum();
        return Some(EigenfunctionEval {
            lambda,
            mode: eigen::EigenMode::Free,
            k: Multiplicity::zero(),
            psi,
            p2,
        });
    }

    let sol = match bethe::solve(rs, wg, &k, weight, &sopts) {
        Ok(s) => s,
        Err(e) => {
            ctx.push(CheckReport::flag("solve", false, format!("error: {e}")));
            return None;
        }
    };
    ctx.push(CheckReport::new("bae_residual", sol.bae_residual, 1e-9, wg.order()));
    ctx.push(CheckReport::flag(
        "gap_bounds",
        sol.gap.holds,
        format!("min slack {:.3e}, applicable {}", sol.gap.min_slack, sol.gap.applicable),
    ));
    let mut rng = ctx.rng(2);
    let mut worst = f64::INFINITY;
    for _ in 0..ctx.opts.sigma_samples {
        let l = random_dominant(&mut rng, rs);
        worst = worst.min(bethe::sigma_bound_slack(rs, &k, &l));
    }
    ctx.push(CheckReport::new("sigma_bounds", (-worst).max(0.0), 1e-12, ctx.opts.sigma_samples).with_note(format!("min slack {worst:.3e}")));
    ctx.push(or_fail("equivariance", bethe::equivariance_check(rs, wg, &k, weight, &sopts, 1e-9)));
    ctx.push(match bethe::impenetrable_limit_study(rs, weight, &[ctx.opts.limit_k], &sopts) {
        Ok(rows) => {
            let r = &rows[0];
            CheckReport::new("impenetrable_limit", r.distance, r.envelope.max(f64::MIN_POSITIVE) * (1.0 + 1e-9), 1)
                .with_note(format!("k = {:e}, per-pairing ratio {:.3}", r.k, r.max_pairing_gap))
        }
        Err(e) => CheckReport::flag("impenetrable_limit", false, format!("error: {e}")),
    });
    ctx.push(CheckReport::new("pauli_k_equals_hessian", sol.pauli.hessian_deviation, 1e-10, 1));
    ctx.push(CheckReport::above("pauli_k_positive_definite", sol.pauli.min_eigenvalue, 0.0, 1));
    if !sol.regular {
        ctx.push(CheckReport::flag(
            "pauli_exclusion",
            true,
            sol.pauli.reason.clone().unwrap_or_default(),
        ));
        return None;
    }
    let lambda = perturbed(ctx, &sol.lambda);
    match EigenfunctionEval::from_lambda(rs, wg, &k, &lambda) {
        Ok(e) => Some(e),
        Err(e) => {
            ctx.push(CheckReport::flag("eigenfunction", false, format!("error: {e}")));
            None
        }
    }
}

fn perturbed(ctx: &Ctx<'_>, lambda: &[Complex64]) -> Vec<Complex64> {
    match ctx.opts.perturb_lambda {
        None => lambda.to_vec(),
        Some(t) => lambda
            .iter()
            .zip(&ctx.rs.rho)
            .map(|(l, r)| l + Complex64::new(0.0, t * r))
            .collect(),
    }
}

fn jump_samples<R: Rng>(rng: &mut R, rs: &RootSystem, eig: &EigenfunctionEval, count: usize) -> Result<Vec<(AffineRoot, Vec<f64>)>> {
    let mut cand = Vec::new();
    for b in rs.positive_roots() {
        cand.push(AffineRoot::new(b, 0));
        cand.push(AffineRoot::new(b, 1));
        cand.push(AffineRoot::new(rs.negate(b), 1));
    }
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        let a = if out.len() <= rs.rank { rs.simple_affine(out.len()) } else { cand[rng.gen_range(0..cand.len())] };
        let v = random_wall_point(rng, rs, a, 1.2, 0.01);
        if eig.eval(rs, &v)?.norm() >= 1e-3 || tries > 50 * count {
            out.push((a, v));
        }
    }
    Ok(out)
}

fn eigen_checks(ctx: &mut Ctx<'_>, eig: &EigenfunctionEval) {
    let rs: &RootSystem = ctx.rs;
    let wg = ctx.wg;
    let k = ctx.k;
    let mut rng = ctx.rng(3);
    let n = rs.rank;

    let at0 = eig.psi.eval(&vec![0.0; n]);
    ctx.push(CheckReport::new("psi_normalization", (at0 - 1.0).norm(), 1e-12, 1));
    if eig.mode == eigen::EigenMode::BetheK {
        let via = eigen::psi_via_operators(rs, wg, &k, &eig.lambda);
        let dev = via.max_difference(&eig.psi) / (1.0 + eig.psi.max_abs_coefficient());
        ctx.push(CheckReport::new("psi_operator_route", dev, 1e-10, 1));
    }
    ctx.push(CheckReport::new("bae_detector", eigen::bae_detector(rs, &k, &eig.psi), 1e-8, 1));

    let pts: Vec<Vec<f64>> = (0..ctx.opts.points).map(|_| crate::sampling::random_point(&mut rng, n, 1.5)).collect();
    let mut inv = 0.0;
    let mut per = 0.0;
    let result: Result<()> = (|| {
        for v in &pts {
            let base = eig.eval(rs, v)?;
            for j in 0..=n {
                let img = rs.affine_reflect(rs.simple_affine(j), v);
                track(&mut inv, (eig.eval(rs, &img)? - base).norm());
            }
        }
        for v in pts.iter().take(5) {
            let coeffs: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
            let mut t = v.clone();
            for (c, a) in coeffs.iter().zip(&rs.coroots[..n]) {
                t = crate::linalg::axpy(&t, *c as f64, a);
            }
            track(&mut per, (eig.eval(rs, &t)? - eig.eval(rs, v)?).norm());
        }
        Ok(())
    })();
    match result {
        Ok(()) => {
            ctx.push(CheckReport::new("phi_invariance", inv, 1e-12, pts.len() * (n + 1)));
            ctx.push(CheckReport::new("phi_periodicity", per, 1e-12, 5));
        }
        Err(e) => ctx.push(CheckReport::flag("phi_invariance", false, format!("error: {e}"))),
    }

    let inner: Vec<Vec<f64>> = (0..10).map(|_| random_alcove_point(&mut rng, rs, 2.5 * ctx.opts.order_step)).collect();
    ctx.push(or_fail(
        "eigen_fd",
        eigen::verify_eigen(rs, eig, &inner, ctx.opts.fd_step)
            .map(|r| CheckReport::new("eigen_fd", r.max_relative_residual, 1e-6, r.points)),
    ));
    ctx.push(or_fail(
        "eigen_fd_order",
        eigen::eigen_convergence_order(rs, eig, &inner, ctx.opts.order_step)
            .map(|(order, ..)| CheckReport::above("eigen_fd_order", order, 1.8, inner.len())),
    ));

    let jumps = jump_samples(&mut rng, rs, eig, ctx.opts.wall_points)
        .and_then(|s| eigen::verify_jumps(rs, eig, &s, 3, &JumpStencil::default()));
    match jumps {
        Ok(rep) => {
            for o in rep.orders {
                let name = format!("jump_r{}", o.order);
                if o.order == 1 && !k.is_zero() {
                    ctx.push(CheckReport::new(name, o.max_relative, 1e-3, o.samples).with_note(format!("floor ratio {:.3e}", o.max_floor_ratio)));
                } else {
                    ctx.push(
                        CheckReport::new(name, o.max_floor_ratio, 1.0, o.samples)
                            .with_note(format!("deviation over certified noise floor; abs {:.3e}", o.max_deviation)),
                    );
                }
            }
        }
        Err(e) => ctx.push(CheckReport::flag("jump_r1", false, format!("error: {e}"))),
    }

    if eig.mode != eigen::EigenMode::BetheK || ctx.opts.perturb_lambda.is_some() {
        return;
    }
    match EigenfunctionEval::impenetrable(rs, wg, ctx.weight) {
        Ok(inf) => {
            let mut m = 0.0;
            let res: Result<()> = (0..ctx.opts.wall_points).try_for_each(|i| {
                let a = rs.simple_affine(i % (n + 1));
                let v = random_wall_point(&mut rng, rs, a, 1.2, 1e-3);
                track(&mut m, inf.eval(rs, &v)?.norm());
                Ok(())
            });
            ctx.push(or_fail("impenetrable_wall_zero", res.map(|_| CheckReport::new("impenetrable_wall_zero", m, 1e-10, ctx.opts.wall_points))));
            let far: Vec<Vec<f64>> = (0..10).map(|_| random_alcove_point(&mut rng, rs, 0.05)).collect();
            ctx.push(or_fail(
                "impenetrable_eigen_fd",
                eigen::verify_eigen(rs, &inf, &far, ctx.opts.fd_step)
                    .map(|r| CheckReport::new("impenetrable_eigen_fd", r.max_relative_residual, 1e-6, r.points)),
            ));
            let pts: Vec<Vec<f64>> = (0..10).map(|_| random_alcove_point(&mut rng, rs, 0.02)).collect();
            ctx.push(or_fail(
                "impenetrable_limit_identity",
                eigen::impenetrable_limit_identity(rs, wg, ctx.weight, ctx.opts.limit_identity_k, &pts, &ctx.opts.solve)
                    .map(|d| CheckReport::new("impenetrable_limit_identity", d, 1e-2, pts.len())),
            ));
        }
        Err(e) => ctx.push(CheckReport::skipped("impenetrable_wall_zero", format!("{e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::CartanKind;

    #[test]
    fn a1_suite_passes_and_perturbation_is_detected() {
        let rs = Arc::new(RootSystem::new(CartanKind::A, 1).unwrap());
        let wg = WeylGroup::new(&rs).unwrap();
        let k = Multiplicity::constant(2.0);
        let rep = run_suite(&rs, &wg, &k, &[1], &SuiteOptions::default()).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "{c:?}");
        }
        let opts = SuiteOptions {
            perturb_lambda: Some(0.1),
            only: Some(vec!["bae_detector".into()]),
            ..SuiteOptions::default()
        };
        let bad = run_suite(&rs, &wg, &k, &[1], &opts).unwrap();
        assert_eq!(bad.checks.len(), 1);
        assert!(!bad.all_pass && bad.checks[0].max_deviation > 1e-3);
    }

    #[test]
    fn free_suite_passes() {
        let rs = Arc::new(RootSystem::new(CartanKind::A, 2).unwrap());
        let wg = WeylGroup::new(&rs).unwrap();
        let rep = run_suite(&rs, &wg, &Multiplicity::zero(), &[1, 0], &SuiteOptions::default()).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "{c:?}");
        }
    }
}
