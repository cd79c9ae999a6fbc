//! Task execution: classify, curvature, geodesic, verify, flagcurv.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::Value;

use spraylab_core::curvature::{
    classify, isotropic_defect_rhs, isotropic_defect_tensor, isotropic_residual, matrix_rel_error,
    riemann_generic, riemann_projective_closed, scalar_data, zero_residuals, FdSprayEngine,
    Verdict,
};
use spraylab_core::error::Error;
use spraylab_core::families::Family;
use spraylab_core::finsler::{
    flag_curvature, fundamental_tensor, induced_spray, InducedSpray, MetricSpec,
};
use spraylab_core::num::{fd_jet2, invariants, random_orthogonal, PointPair};
use spraylab_core::sample::SamplePlan;
use spraylab_core::spray::{
    check_equivariance, check_homogeneity, geodesic_integrate, straightness_deviation, Spray,
    StepControl,
};
use spraylab_core::weakiso::{ambient_weakiso_check, weak_iso_residuals};

use crate::jobspec::{Job, Source, Task};
use crate::report::{Check, Report};
use crate::CliError;

pub struct RunOutput {
    /// report JSON or geodesic CSV
    pub artifact: String,
    /// 0 when every check passed, 2 otherwise
    pub exit_code: i32,
}

pub fn run_job(job: &Job) -> Result<RunOutput, CliError> {
    match job.task {
        Task::Classify => run_classify(job),
        Task::Curvature => run_curvature(job),
        Task::Geodesic => run_geodesic(job),
        Task::Verify => run_verify(job),
        Task::FlagCurv => run_flagcurv(job),
    }
}

fn lift(e: Error) -> CliError {
    match e {
        Error::DomainExit(msg) => CliError::Domain(msg),
        other => CliError::Domain(other.to_string()),
    }
}

fn family_plan(job: &Job, family: &Family, count: usize) -> SamplePlan {
    SamplePlan::new(job.dim, count, job.seed, family.sampling_radius())
}

fn finish(report: Report, job: &Job) -> Result<RunOutput, CliError> {
    let exit_code = if report.all_pass() { 0 } else { 2 };
    let _ = job;
    Ok(RunOutput {
        artifact: report.to_json(),
        exit_code,
    })
}

// ---------------------------------------------------------------- classify

fn run_classify(job: &Job) -> Result<RunOutput, CliError> {
    let family = match &job.source {
        Source::Family(f) => f,
        Source::Metric { .. } => {
            return Err(CliError::schema(
                "task",
                "classify runs on projective families; give spray.family",
            ))
        }
    };
    let plan = family_plan(job, family, job.samples);
    let rep = classify(family.profile.as_ref(), &plan, &job.tol).map_err(lift)?;

    let mut out = Report::new("classify", &job.source_name, job.dim, job.samples, job.seed);
    out.push_str("verdict", rep.verdict.as_str());
    out.push_num("residual_c5_max", rep.residual_c5.max);
    out.push_num("residual_c5_mean", rep.residual_c5.mean);
    out.push_num("residual_c8_max", rep.residual_c8.max);
    out.push_num("residual_c8_mean", rep.residual_c8.mean);
    out.push_num("residual_c9_max", rep.residual_c9.max);
    out.push_num("residual_c9_mean", rep.residual_c9.mean);
    out.push_num("residual_c10_max", rep.residual_c10.max);
    out.push_num("residual_c10_mean", rep.residual_c10.mean);
    out.push_num("trace_scale_max", rep.trace_scale_max);

    // structural identities along the same sweep
    let mut flagpole = 0.0f64;
    let mut tau_defect = 0.0f64;
    let mut c10_dep = 0.0f64;
    for pair in plan.pairs() {
        let r = riemann_projective_closed(family.profile.as_ref(), &pair).map_err(lift)?;
        flagpole = flagpole.max(r.flagpole_defect());
        let sd = scalar_data(family.profile.as_ref(), &pair).map_err(lift)?;
        tau_defect = tau_defect.max(sd.contraction_defect(&pair.y));
        let ic = invariants(&pair).map_err(lift)?;
        let jet = family.profile.jet(ic.r, ic.s).map_err(lift)?;
        let (c8, c9, c10) = zero_residuals(&jet, ic.s);
        let scale = 1.0 + jet.max_abs();
        c10_dep = c10_dep.max((c10 - (ic.s * c9 - c8)).abs() / scale);
    }
    out.add_check(Check::le("flagpole_contraction", flagpole, 1e-8));
    out.add_check(Check::le("tau_contraction_identity", tau_defect, 1e-9));
    out.add_check(Check::le("c10_dependency_identity", c10_dep, 1e-12));
    out.add_check(Check::le(
        "verdict_determinate",
        if rep.verdict == Verdict::Indeterminate {
            1.0
        } else {
            0.0
        },
        0.5,
    ));
    finish(out, job)
}

// ---------------------------------------------------------------- curvature

fn run_curvature(job: &Job) -> Result<RunOutput, CliError> {
    let mut out = Report::new(
        "curvature",
        &job.source_name,
        job.dim,
        job.samples,
        job.seed,
    );
    let mut dump = Vec::with_capacity(job.samples);
    let mut flagpole = 0.0f64;

    let tensors: Vec<(PointPair, nalgebra::DMatrix<f64>)> = match &job.source {
        Source::Family(family) => {
            let plan = family_plan(job, family, job.samples);
            plan.pairs()
                .into_iter()
                .map(|pair| {
                    let t =
                        riemann_projective_closed(family.profile.as_ref(), &pair).map_err(lift)?;
                    Ok((pair, t.matrix))
                })
                .collect::<Result<_, CliError>>()?
        }
        Source::Metric { spec, .. } => {
            let metric = spec.build(job.dim).map_err(lift)?;
            let radius = sampling_radius_for(spec);
            let plan = SamplePlan::new(job.dim, job.samples, job.seed, radius);
            let spray = InducedSpray::new(metric);
            let engine = FdSprayEngine {
                spray: &spray,
                cfg: spray.cfg,
            };
            plan.pairs()
                .into_iter()
                .map(|pair| {
                    let t = riemann_generic(&engine, &pair).map_err(lift)?;
                    Ok((pair, t.matrix))
                })
                .collect::<Result<_, CliError>>()?
        }
    };

    for (pair, matrix) in &tensors {
        let contracted = matrix * &pair.y;
        let scale =
            pair.y.norm_squared() * (1.0 + matrix.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        flagpole = flagpole.max(contracted.amax() / scale);

        let mut obj = serde_json::Map::new();
        obj.insert("x".into(), num_array(pair.x.iter()));
        obj.insert("y".into(), num_array(pair.y.iter()));
        let rows: Vec<Value> = (0..matrix.nrows())
            .map(|i| num_array(matrix.row(i).iter()))
            .collect();
        obj.insert("riemann".into(), Value::Array(rows));
        dump.push(Value::Object(obj));
    }

    out.push_value("tensors", Value::Array(dump));
    let threshold = match &job.source {
        Source::Family(_) => 1e-8,
        // doubly differenced near the ball rim; same error scale as the
        // flag-curvature bound
        Source::Metric { .. } => 1e-5,
    };
    out.add_check(Check::le("flagpole_contraction", flagpole, threshold));
    finish(out, job)
}

fn num_array<'a>(values: impl Iterator<Item = &'a f64>) -> Value {
    Value::Array(
        values
            .map(|&v| {
                serde_json::Number::from_f64(v)
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            })
            .collect(),
    )
}

fn sampling_radius_for(spec: &MetricSpec) -> f64 {
    let r = spec.domain_radius();
    if r.is_finite() {
        0.9 * r
    } else {
        1.0
    }
}

// ---------------------------------------------------------------- geodesic

fn run_geodesic(job: &Job) -> Result<RunOutput, CliError> {
    let (spray, radius): (Box<dyn Spray>, f64) = match &job.source {
        Source::Family(family) => (Box::new(family.spray(job.dim)), family.sampling_radius()),
        Source::Metric { spec, .. } => {
            let metric = spec.build(job.dim).map_err(lift)?;
            (
                Box::new(InducedSpray::new(metric)),
                sampling_radius_for(spec),
            )
        }
    };

    let g = job
        .geodesic
        .clone()
        .unwrap_or(crate::jobspec::GeodesicFile {
            x0: None,
            y0: None,
            t_end: None,
            step: None,
        });
    let x0 = match g.x0 {
        Some(v) => DVector::from_vec(v),
        None => {
            let mut v = DVector::zeros(job.dim);
            v[0] = 0.3 * radius.min(1.0);
            v
        }
    };
    let y0 = match g.y0 {
        Some(v) => DVector::from_vec(v),
        None => {
            let mut v = DVector::zeros(job.dim);
            v[0] = 0.4;
            v[1] = 1.0;
            v
        }
    };
    if x0.len() != job.dim || y0.len() != job.dim {
        return Err(CliError::schema(
            "geodesic.x0",
            "start vectors must match spray.dim",
        ));
    }
    let t_end = g.t_end.unwrap_or(1.0);
    let step = g.step.unwrap_or(1e-3);

    let trace = geodesic_integrate(spray.as_ref(), &x0, &y0, t_end, step, StepControl::Fixed)
        .map_err(lift)?;
    Ok(RunOutput {
        artifact: trace.to_csv(),
        exit_code: 0,
    })
}

// ---------------------------------------------------------------- verify

fn run_verify(job: &Job) -> Result<RunOutput, CliError> {
    match &job.source {
        Source::Family(family) => verify_family(job, family),
        Source::Metric { spec, .. } => verify_metric(job, spec),
    }
}

// Whether a pair sits where the family can be finite-differenced: the
// integral-form isotropic family has a branch line at s = 0 (no smooth
// joining is claimed across it) and its default antiderivative basepoint
// degenerates as r -> 0, so stencils must keep clear of both.
fn differencing_ok(family: &Family, r: f64, s: f64) -> bool {
    if family.name == "isotropic_uv" {
        s.abs() >= 0.05 && r >= 0.1
    } else {
        true
    }
}

fn verify_family(job: &Job, family: &Family) -> Result<RunOutput, CliError> {
    let mut out = Report::new("verify", &job.source_name, job.dim, job.samples, job.seed);
    let spray = family.spray(job.dim);
    let profile = family.profile.as_ref();
    let plan = family_plan(job, family, job.samples);
    let pairs = plan.pairs();
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed ^ 0x5eed);

    // 2-homogeneity across scales
    let mut homog = 0.0f64;
    for pair in &pairs {
        for lambda in [0.5, 2.0, 7.0] {
            homog = homog.max(check_homogeneity(&spray, pair, lambda).map_err(lift)?);
        }
    }
    out.add_check(Check::le("homogeneity", homog, 1e-10));

    // orthogonal equivariance under Haar rotations
    let mut equiv = 0.0f64;
    for pair in &pairs {
        let u = random_orthogonal(job.dim, &mut rng);
        equiv = equiv.max(check_equivariance(&spray, pair, &u).map_err(lift)?);
    }
    out.add_check(Check::le("equivariance", equiv, 1e-10));

    // analytic jets against the differencing engine (splines carry exact
    // derivatives of the interpolant, which differencing cannot certify at
    // the knots, so tabulated profiles skip this)
    if family.name != "custom_tabulated" {
        // samples reach the ball rim where profile derivatives grow; a
        // tighter step keeps the stencil truncation under the bound there.
        // On small domain balls the r coordinate itself lives on the scale
        // radius^2, so the step shrinks with it (cubed because the engine
        // takes the cube root for second-derivative stencils).
        let r_scale = (family.spatial_radius * family.spatial_radius).clamp(0.05, 1.0);
        let jet_cfg = spraylab_core::ToleranceConfig {
            fd_step: job.tol.fd_step / 32.0 * r_scale.powi(3),
            ..job.tol
        };
        let mut jet_dev = 0.0f64;
        for pair in &pairs {
            let ic = invariants(pair).map_err(lift)?;
            if ic.s.abs() < 0.05
                || !profile.in_domain(ic.r, ic.s)
                || !differencing_ok(family, ic.r, ic.s)
            {
                continue;
            }
            let a = profile.jet(ic.r, ic.s).map_err(lift)?;
            let f = match fd_jet2(
                |r, s| profile.value(r, s).unwrap_or(f64::NAN),
                |r, s| profile.in_domain(r, s),
                ic.r,
                ic.s,
                &jet_cfg,
            ) {
                Ok(f) => f,
                Err(Error::DomainExit(_)) => continue, // stencil clipped the ball rim
                Err(e) => return Err(lift(e)),
            };
            for (got, want) in [
                (f.v, a.v),
                (f.d_r, a.d_r),
                (f.d_s, a.d_s),
                (f.d_rs, a.d_rs),
                (f.d_ss, a.d_ss),
            ] {
                jet_dev = jet_dev.max((got - want).abs() / (1.0 + want.abs()));
            }
        }
        out.add_check(Check::le("jet_vs_differencing", jet_dev, 1e-6));
    }

    // curvature from the definition against the closed form; skipped for
    // splines, where the differenced spray sees the knot discontinuities
    // in the higher derivatives
    if family.name != "custom_tabulated" {
        let mut oracle_dev = 0.0f64;
        let engine = FdSprayEngine {
            spray: &spray,
            cfg: job.tol,
        };
        let mut used = 0usize;
        for pair in &pairs {
            if used >= 30 {
                break;
            }
            let ic = invariants(pair).map_err(lift)?;
            if !differencing_ok(family, ic.r, ic.s) {
                continue;
            }
            used += 1;
            let general = riemann_generic(&engine, pair).map_err(lift)?;
            let closed = riemann_projective_closed(profile, pair).map_err(lift)?;
            oracle_dev = oracle_dev.max(matrix_rel_error(&general.matrix, &closed.matrix));
        }
        out.add_check(Check::le(
            "curvature_definition_vs_closed",
            oracle_dev,
            1e-6,
        ));
    }

    // structural identities
    let mut flagpole = 0.0f64;
    let mut tau_defect = 0.0f64;
    let mut c10_dep = 0.0f64;
    for pair in &pairs {
        let r = riemann_projective_closed(profile, pair).map_err(lift)?;
        flagpole = flagpole.max(r.flagpole_defect());
        let sd = scalar_data(profile, pair).map_err(lift)?;
        tau_defect = tau_defect.max(sd.contraction_defect(&pair.y));
        let ic = invariants(pair).map_err(lift)?;
        let jet = profile.jet(ic.r, ic.s).map_err(lift)?;
        let (c8, c9, c10) = zero_residuals(&jet, ic.s);
        c10_dep = c10_dep.max((c10 - (ic.s * c9 - c8)).abs() / (1.0 + jet.max_abs()));
    }
    out.add_check(Check::le("flagpole_contraction", flagpole, 1e-8));
    out.add_check(Check::le("tau_contraction_identity", tau_defect, 1e-9));
    out.add_check(Check::le("c10_dependency_identity", c10_dep, 1e-12));

    family_residual_checks(&mut out, family, &pairs)?;

    // projective geodesics stay straight
    let mut straight = 0.0f64;
    let radius = family.sampling_radius();
    for k in 0..5 {
        let start_plan = SamplePlan::new(job.dim, 1, job.seed ^ (k + 11), 0.4 * radius);
        let pair = &start_plan.pairs()[0];
        let trace = geodesic_integrate(
            &spray,
            &pair.x,
            &(&pair.y / pair.y.norm()),
            1.0,
            1e-3,
            StepControl::Fixed,
        )
        .map_err(lift)?;
        straight = straight.max(straightness_deviation(&trace));
    }
    out.add_check(Check::le("geodesic_straightness", straight, 1e-6));

    finish(out, job)
}

fn family_residual_checks(
    out: &mut Report,
    family: &Family,
    pairs: &[PointPair],
) -> Result<(), CliError> {
    let profile = family.profile.as_ref();
    match family.name {
        "flat" => {
            let mut r_max = 0.0f64;
            for pair in pairs {
                let r = riemann_projective_closed(profile, pair).map_err(lift)?;
                r_max = r_max.max(r.max_abs() / pair.y.norm_squared());
            }
            out.add_check(Check::le("curvature_norm", r_max, 1e-12));
        }
        "zero_curvature" => {
            let mut c8_max = 0.0f64;
            let mut c9_max = 0.0f64;
            let mut r_max = 0.0f64;
            for pair in pairs {
                let ic = invariants(pair).map_err(lift)?;
                let jet = profile.jet(ic.r, ic.s).map_err(lift)?;
                let (c8, c9, _) = zero_residuals(&jet, ic.s);
                c8_max = c8_max.max(c8.abs());
                c9_max = c9_max.max(c9.abs());
                let r = riemann_projective_closed(profile, pair).map_err(lift)?;
                r_max = r_max.max(r.max_abs() / pair.y.norm_squared());
            }
            out.add_check(Check::le("residual_c8", c8_max, 1e-9));
            out.add_check(Check::le("residual_c9", c9_max, 1e-9));
            out.add_check(Check::le("curvature_norm", r_max, 1e-8));
        }
        "funk" | "quadratic_example" | "isotropic_uv" => {
            let mut c5_max = 0.0f64;
            let mut defect_max = 0.0f64;
            for pair in pairs {
                let ic = invariants(pair).map_err(lift)?;
                if ic.s.abs() < 1e-3 && family.name == "isotropic_uv" {
                    continue; // the antiderivative basepoint degenerates at s = 0
                }
                let jet = profile.jet(ic.r, ic.s).map_err(lift)?;
                c5_max = c5_max.max(isotropic_residual(&jet, ic.s).abs());
                let lhs = isotropic_defect_tensor(profile, pair).map_err(lift)?;
                let rhs = isotropic_defect_rhs(&jet, pair).map_err(lift)?;
                let scale = 1.0 + rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                defect_max = defect_max.max(lhs.iter().fold(0.0f64, |a, v| a.max(v.abs())) / scale);
            }
            out.add_check(Check::le("residual_c5", c5_max, 1e-9));
            out.add_check(Check::le("isotropic_defect", defect_max, 1e-8));
        }
        "weakiso1" | "weakiso2" => {
            let witness = family
                .witness
                .as_ref()
                .expect("weakiso families carry a witness");
            let bound = if family.name == "weakiso1" {
                1e-8
            } else {
                1e-7
            };
            let mut r1 = 0.0f64;
            let mut r2 = 0.0f64;
            let mut ambient = 0.0f64;
            for pair in pairs {
                let ic = invariants(pair).map_err(lift)?;
                let pj = profile.jet(ic.r, ic.s).map_err(lift)?;
                let gj = witness.gamma.jet(ic.r, ic.s).map_err(lift)?;
                let res = weak_iso_residuals(&pj, &gj, (witness.a)(ic.r), ic.s);
                r1 = r1.max(res.res1.abs());
                r2 = r2.max(res.res2.abs());
                let amb = ambient_weakiso_check(profile, witness.gamma.as_ref(), &*witness.a, pair)
                    .map_err(lift)?;
                ambient = ambient.max(amb.a9_norm()).max(amb.a10_norm());
            }
            out.add_check(Check::le("residual_a11_first", r1, bound));
            out.add_check(Check::le("residual_a11_second", r2, bound));
            out.add_check(Check::le("ambient_conditions", ambient, 1e-6));
        }
        _ => {}
    }
    Ok(())
}

fn verify_metric(job: &Job, spec: &MetricSpec) -> Result<RunOutput, CliError> {
    let mut out = Report::new("verify", &job.source_name, job.dim, job.samples, job.seed);
    let metric = spec.build(job.dim).map_err(lift)?;
    let plan = SamplePlan::new(job.dim, job.samples, job.seed, sampling_radius_for(spec));
    let pairs = plan.pairs();

    let mut euler = 0.0f64;
    let mut posdef_failures = 0.0f64;
    let mut homog = 0.0f64;
    for pair in &pairs {
        let t = fundamental_tensor(metric.as_ref(), pair, &job.tol).map_err(lift)?;
        let f = metric.value(&pair.x, &pair.y).map_err(lift)?;
        let q = (&t.g * &pair.y).dot(&pair.y);
        euler = euler.max((q - f * f).abs() / (1.0 + f * f));
        if !t.positive_definite {
            posdef_failures += 1.0;
        }

        let g1 = induced_spray(metric.as_ref(), pair, &job.tol).map_err(lift)?;
        let doubled = PointPair::new(pair.x.clone(), 2.0 * &pair.y).map_err(lift)?;
        let g2 = induced_spray(metric.as_ref(), &doubled, &job.tol).map_err(lift)?;
        homog = homog.max((&g2 - 4.0 * &g1).norm() / (1.0 + 4.0 * g1.norm()));
    }
    out.add_check(Check::le("euler_identity", euler, 1e-8));
    out.add_check(Check::le(
        "positive_definite_failures",
        posdef_failures,
        0.5,
    ));
    out.add_check(Check::le("induced_spray_homogeneity", homog, 1e-8));

    finish(out, job)
}

// ---------------------------------------------------------------- flagcurv

fn run_flagcurv(job: &Job) -> Result<RunOutput, CliError> {
    let (spec, expected): (MetricSpec, Option<f64>) = match &job.source {
        Source::Metric { spec, .. } => (spec.clone(), expected_flag_curvature(spec)),
        Source::Family(family) => {
            let spec = metric_counterpart(family)?;
            let expected = expected_flag_curvature(&spec);
            (spec, expected)
        }
    };
    let metric = spec.build(job.dim).map_err(lift)?;
    let plan = SamplePlan::new(job.dim, job.samples, job.seed, sampling_radius_for(&spec));
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed ^ 0xf1a6);

    let mut ks = Vec::with_capacity(job.samples);
    for pair in plan.pairs() {
        let u = transverse_direction(&pair, &mut rng);
        ks.push(flag_curvature(metric.as_ref(), &pair, &u, &job.tol).map_err(lift)?);
    }
    let mean = ks.iter().sum::<f64>() / ks.len() as f64;
    let min = ks.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let mut out = Report::new("flagcurv", &job.source_name, job.dim, job.samples, job.seed);
    out.push_num("k_mean", mean);
    out.push_num("k_min", min);
    out.push_num("k_max", max);
    out.push_array("k_values", &ks);
    if let Some(want) = expected {
        out.push_num("k_expected", want);
        let dev = ks.iter().fold(0.0f64, |a, k| a.max((k - want).abs()));
        out.add_check(Check::le("flag_curvature_max_deviation", dev, 1e-5));
        out.add_check(Check::le(
            "flag_curvature_mean_deviation",
            (mean - want).abs(),
            1e-5,
        ));
    }
    finish(out, job)
}

fn metric_counterpart(family: &Family) -> Result<MetricSpec, CliError> {
    // flagcurv needs a norm; map the families whose induced sprays are the
    // catalog sprays
    match family.name {
        "flat" => Ok(MetricSpec::Minkowski),
        "funk" => Ok(MetricSpec::Funk),
        "spaceform" => {
            let mu = probe_spaceform_mu(family);
            Ok(MetricSpec::SpaceformAlpha { mu })
        }
        "zero_curvature" => {
            let (c, plus) = probe_zero_curvature(family)?;
            Ok(MetricSpec::Berwald { c, plus })
        }
        other => Err(CliError::schema(
            "spray.family",
            format!("family '{other}' has no built-in metric counterpart for flagcurv"),
        )),
    }
}

// Recover mu from the profile: alpha(r=0, s) = -mu s.
fn probe_spaceform_mu(family: &Family) -> f64 {
    family.profile.jet(0.0, 1.0).map(|j| -j.v).unwrap_or(1.0)
}

// Recover (c, sign): p(0, 0) = +/- 1/sqrt(c).
fn probe_zero_curvature(family: &Family) -> Result<(f64, bool), CliError> {
    let p0 = family
        .profile
        .jet(0.0, 0.0)
        .map_err(|e| CliError::Domain(e.to_string()))?
        .v;
    if p0 == 0.0 {
        return Err(CliError::Domain(
            "zero-curvature profile value vanished at origin".into(),
        ));
    }
    Ok((1.0 / (p0 * p0), p0 > 0.0))
}

fn expected_flag_curvature(spec: &MetricSpec) -> Option<f64> {
    match spec {
        MetricSpec::Minkowski => Some(0.0),
        MetricSpec::SpaceformAlpha { mu } => Some(*mu),
        MetricSpec::Funk => Some(-0.25),
        MetricSpec::Berwald { .. } => Some(0.0),
    }
}

fn transverse_direction(pair: &PointPair, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let u: DVector<f64> =
            DVector::from_fn(pair.dim(), |_, _| -> f64 { StandardNormal.sample(rng) });
        let proj = &u - u.dot(&pair.y) / pair.y.norm_squared() * &pair.y;
        if proj.norm() > 1e-3 {
            return proj;
        }
    }
}
