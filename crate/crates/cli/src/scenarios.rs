//! Scenario dispatch. Each scenario evaluates its sweep points on the rayon
//! pool and assembles rows in sweep order.

use crate::config::*;
use crate::output::{Cell, Report, Table};
use gaugeqed::cavity1d::{field_map_excited, field_map_ground, CavitySpec, Observable};
use gaugeqed::dicke::*;
use gaugeqed::gauge::*;
use gaugeqed::material::{calibrate_anharmonicity, solve_material, Family, MaterialSpectrum};
use gaugeqed::measure::{pointer_moments_continuum, pointer_moments_singlemode, PointerSetup, SingleMode};
use gaugeqed::multimode::{build_master_equation, level_shift, time_averaged_rate, ContinuumSpec, ModeSet};
use gaugeqed::opalg::{eig_hermitian, lindblad_residual, EvolveOptions};
use gaugeqed::quad::QuadOptions;
use gaugeqed::twolevel::{transition_error_scan, transitions, ExactReference, TwoLevelModel, TwoLevelParams};
use gaugeqed::vacuumfield::{flux, poynting_real, pvac, static_energy_density, udot, DipoleData, FieldGauge};
use gaugeqed::Result;
use rayon::prelude::*;

/// Tables and header report produced by one scenario run.
pub struct Outcome {
    pub tables: Vec<Table>,
    pub report: Report,
}

/// Figure label a scenario reproduces by default.
pub fn default_figure(name: &str) -> Option<&'static str> {
    match name {
        "truncation-compare" => Some("Fig. 4"),
        "photons" => Some("Fig. 7"),
        "detector-rate" => Some("Fig. 8"),
        "udot" | "energy-density" => Some("Fig. 11"),
        "cavity-map" => Some("Fig. 12"),
        "dicke" => Some("Dicke phase diagram"),
        _ => None,
    }
}

pub fn run(s: &Scenario) -> Result<Outcome> {
    match s {
        Scenario::Spectrum(p) => spectrum(p),
        Scenario::Photons(p) => photons(p),
        Scenario::TruncationCompare(p) => truncation_compare(p),
        Scenario::Switch(p) => switch(p),
        Scenario::DetectorRate(p) => detector_rate(p),
        Scenario::Pvac(p) => pvac_scan(p),
        Scenario::EnergyDensity(p) => energy_density(p),
        Scenario::Udot(p) => udot_map(p),
        Scenario::CavityMap(p) => cavity_map(p),
        Scenario::Pointer(p) => pointer(p),
        Scenario::Dicke(p) => dicke(p),
        Scenario::Master(p) => master(p),
    }
}

fn par<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> Result<R> + Sync + Send) -> Result<Vec<R>> {
    items.par_iter().map(f).collect()
}

fn grid2(a: usize, b: usize) -> Vec<(usize, usize)> {
    (0..a).flat_map(|i| (0..b).map(move |j| (i, j))).collect()
}

fn material(spec: &MaterialSpec) -> Result<MaterialSpectrum> {
    let family = match spec.family {
        FamilyName::Harmonic => return Ok(MaterialSpectrum::harmonic_exact(spec.levels)),
        FamilyName::DoubleWell => Family::DoubleWell,
        FamilyName::Josephson => Family::Josephson,
    };
    solve_material(&calibrate_anharmonicity(family, spec.mu.unwrap_or_default(), spec.levels)?)
}

fn material_knobs(report: &mut Report, spec: &MaterialSpec, m: &MaterialSpectrum) {
    report.knob("material", format!("{:?}", spec.family));
    report.knob("material levels", spec.levels);
    report.knob("material mu", m.mu);
    report.knob("material boundary leak", m.boundary_leak);
}

/// α for a single mode of detuning δ: "jc" is ω_m/(ω_m + ω) with ω_m = 1.
fn single_alpha(g: &GaugeChoice, delta: f64) -> f64 {
    match g {
        GaugeChoice::Alpha(a) => *a,
        GaugeChoice::Named(_) => alpha_jc(1.0, delta),
    }
}

fn profile(g: &GaugeChoice) -> GaugeProfile {
    match g {
        GaugeChoice::Alpha(a) => GaugeProfile::Scalar(*a),
        GaugeChoice::Named(_) => GaugeProfile::JaynesCummings,
    }
}

fn system<'a>(m: &'a MaterialSpectrum, n_levels: usize, n_fock: Option<usize>, delta: f64, eta: f64, alpha: f64) -> Result<SystemConfig<'a>> {
    let cfg = SystemConfig::new(m, n_levels, delta, eta, alpha)?;
    Ok(match n_fock {
        Some(nf) => cfg.with_fock(nf),
        None => cfg,
    })
}

fn spectrum(p: &SpectrumParams) -> Result<Outcome> {
    let m = material(&p.material)?;
    let etas = p.etas.values();
    let points = grid2(etas.len(), p.gauges.len());
    let levels = par(&points, |&(i, j)| {
        let cfg = system(&m, p.n_levels, p.n_fock, p.delta, etas[i], single_alpha(&p.gauges[j], p.delta))?;
        let mut e = eig_hermitian(&build_h_alpha(&cfg)?)?.values;
        e.truncate(p.count);
        Ok(e)
    })?;

    let mut table = Table::new(vec!["eta", "gauge", "alpha", "level", "energy"]);
    let mut spread: f64 = 0.0;
    for (&(i, j), e) in points.iter().zip(&levels) {
        let reference = &levels[i * p.gauges.len()];
        for (k, &v) in e.iter().enumerate() {
            spread = spread.max((v - reference[k]).abs() / reference[k].abs().max(1.0));
            let alpha = single_alpha(&p.gauges[j], p.delta);
            table.rows.push(vec![etas[i].into(), p.gauges[j].label().into(), alpha.into(), k.into(), v.into()]);
        }
    }
    let mut report = Report::default();
    material_knobs(&mut report, &p.material, &m);
    report.knob("n_levels", p.n_levels);
    report.knob("n_fock", p.n_fock.map_or("default".to_string(), |n| n.to_string()));
    report.residual("gauge spread (relative)", spread);
    Ok(Outcome { tables: vec![table], report })
}

fn photons(p: &PhotonsParams) -> Result<Outcome> {
    let m = material(&p.material)?;
    let etas = p.etas.values();
    let points = grid2(etas.len(), p.gauges.len());
    let values = par(&points, |&(i, j)| {
        let cfg = system(&m, p.n_levels, p.n_fock, p.delta, etas[i], single_alpha(&p.gauges[j], p.delta))?;
        match p.convergence_tol {
            Some(tol) => {
                let c = check_convergence(&cfg, tol, ground_photons)?;
                Ok((c.value, c.fock_change, c.level_change))
            }
            None => Ok((ground_photons(&cfg)?, f64::NAN, f64::NAN)),
        }
    })?;

    let mut table = Table::new(vec!["eta", "gauge", "alpha", "photons", "fock_change", "level_change"]);
    let (mut fock, mut level) = (0.0f64, 0.0f64);
    for (&(i, j), &(n, df, dl)) in points.iter().zip(&values) {
        if p.convergence_tol.is_some() {
            fock = fock.max(df);
            level = level.max(dl);
        }
        let alpha = single_alpha(&p.gauges[j], p.delta);
        table.rows.push(vec![etas[i].into(), p.gauges[j].label().into(), alpha.into(), n.into(), df.into(), dl.into()]);
    }
    let mut report = Report::default();
    material_knobs(&mut report, &p.material, &m);
    report.knob("n_levels", p.n_levels);
    report.knob("n_fock", p.n_fock.map_or("default".to_string(), |n| n.to_string()));
    if let Some(tol) = p.convergence_tol {
        report.knob("convergence tol", tol);
        report.residual("photons fock change (+8)", fock);
        report.residual("photons level change (+4)", level);
    }
    Ok(Outcome { tables: vec![table], report })
}

fn two_level_model(spec: &ModelSpec) -> TwoLevelModel {
    let a = spec.alpha.unwrap_or_default();
    match spec.kind {
        ModelKind::Standard => TwoLevelModel::Standard(a),
        ModelKind::Tilde => TwoLevelModel::Tilde(a),
        ModelKind::Rotated => TwoLevelModel::Rotated(a, spec.alpha_prime.unwrap_or_default()),
        ModelKind::ModifiedA2 => TwoLevelModel::ModifiedA2,
    }
}

fn truncation_compare(p: &TruncationParams) -> Result<Outcome> {
    let m = material(&p.material)?;
    let etas = p.etas.values();
    let models: Vec<TwoLevelModel> = p.models.iter().map(two_level_model).collect();
    let reference = ExactReference { n_levels: p.reference_levels, n_fock: p.reference_fock };
    let scans = par(&etas, |&eta| transition_error_scan(&m, &models, &[eta], p.delta, p.count, reference))?;

    let mut table = Table::new(vec!["eta", "model", "transition", "exact", "approx", "rel_error"]);
    for row in scans.iter().flatten() {
        for k in 0..row.exact.len() {
            table.rows.push(vec![
                row.eta.into(),
                row.model.label().into(),
                (k + 1).into(),
                row.exact[k].into(),
                row.approx[k].into(),
                row.rel_errors[k].into(),
            ]);
        }
    }
    let mut report = Report::default();
    material_knobs(&mut report, &p.material, &m);
    report.knob("reference levels", p.reference_levels);
    report.knob("reference fock", p.reference_fock.map_or("default".to_string(), |n| n.to_string()));
    // Truncation check of the exact reference at the strongest coupling.
    if let Some(eta) = etas.iter().cloned().reduce(f64::max) {
        let mut cfg = TwoLevelParams::new(&m, p.delta, eta, 1.0).exact_config(p.reference_levels);
        if let Some(nf) = p.reference_fock {
            cfg.n_fock = nf;
        }
        let c = check_convergence(&cfg, 1e-8, |c| Ok(transitions(&build_h_alpha(c)?, 1)?[0]))?;
        report.residual("reference first transition fock change (+8)", c.fock_change);
        report.residual("reference first transition level change (+4)", c.level_change);
    }
    Ok(Outcome { tables: vec![table], report })
}

fn envelope(spec: &EnvelopeSpec) -> Envelope {
    match *spec {
        EnvelopeSpec::Constant { value } => Envelope::Constant(value),
        EnvelopeSpec::Step { on, off } => Envelope::Step { on, off },
        EnvelopeSpec::Gaussian { center, width } => Envelope::Gaussian { center, width },
        EnvelopeSpec::RaisedCosine { start, end } => Envelope::RaisedCosine { start, end },
    }
}

fn switch(p: &SwitchParams) -> Result<Outcome> {
    let m = material(&p.material)?;
    let times = p.times.values();
    let env = envelope(&p.envelope);
    let opts = EvolveOptions { tol: p.tol, ..EvolveOptions::default() };
    let series = par(&p.gauges, |g| {
        if times.is_empty() {
            return Ok((vec![], None));
        }
        let cfg = system(&m, p.n_levels, Some(p.n_fock), p.delta, p.eta, single_alpha(g, p.delta))?;
        let direct = evolve_switched(&cfg, &env, &times, opts)?;
        let moved = match p.alpha_prime {
            Some(ap) => Some(evolve_switched_transformed(&cfg, ap, &env, &times, opts)?.values),
            None => None,
        };
        Ok((direct.values, moved))
    })?;

    let mut columns = vec!["gauge", "alpha", "t", "photons"];
    if p.alpha_prime.is_some() {
        columns.push("photons_moving_frame");
    }
    let mut table = Table::new(columns);
    let mut frame_diff: f64 = 0.0;
    for (g, (direct, moved)) in p.gauges.iter().zip(&series) {
        for (k, &n) in direct.iter().enumerate() {
            let mut row: Vec<Cell> = vec![g.label().into(), single_alpha(g, p.delta).into(), times[k].into(), n.into()];
            if let Some(mv) = moved {
                frame_diff = frame_diff.max((mv[k] - n).abs());
                row.push(mv[k].into());
            }
            table.rows.push(row);
        }
    }
    let mut report = Report::default();
    material_knobs(&mut report, &p.material, &m);
    report.knob("n_levels", p.n_levels);
    report.knob("n_fock", p.n_fock);
    report.knob("evolve tol", p.tol);
    if let Some(ap) = p.alpha_prime {
        report.knob("moving frame alpha'", ap);
        report.residual("moving frame max difference", frame_diff);
    }
    Ok(Outcome { tables: vec![table], report })
}

fn detector_rate(p: &DetectorRateParams) -> Result<Outcome> {
    let cutoffs = p.cutoffs.values();
    let points = grid2(p.gauges.len(), cutoffs.len());
    let rates = par(&points, |&(g, k)| time_averaged_rate(&ContinuumSpec::new(p.gamma, cutoffs[k]), &profile(&p.gauges[g]), p.t_avg))?;

    let mut table = Table::new(vec!["gauge", "omega_max", "rate", "quad_error"]);
    let mut err: f64 = 0.0;
    for (&(g, k), r) in points.iter().zip(&rates) {
        err = err.max(r.error);
        table.rows.push(vec![p.gauges[g].label().into(), cutoffs[k].into(), r.value.into(), r.error.into()]);
    }
    let mut report = Report::default();
    report.knob("gamma", p.gamma);
    report.knob("omega_m T", p.t_avg);
    report.knob("quadrature rel tol", ContinuumSpec::new(p.gamma, 1.0).rel_tol);
    report.residual("max quadrature error", err);
    Ok(Outcome { tables: vec![table], report })
}

fn field_gauge(g: FieldGaugeName) -> (FieldGauge, &'static str) {
    match g {
        FieldGaugeName::Multipolar => (FieldGauge::Multipolar, "multipolar"),
        FieldGaugeName::Coulomb => (FieldGauge::Coulomb, "coulomb"),
    }
}

fn pvac_scan(p: &PvacParams) -> Result<Outcome> {
    let cutoffs = p.cutoffs.values();
    let times = p.times.values();
    let points: Vec<(usize, usize, usize)> = grid2(p.gauges.len(), cutoffs.len())
        .into_iter()
        .flat_map(|(g, k)| (0..times.len()).map(move |t| (g, k, t)))
        .collect();
    let opts = QuadOptions::new(0.0, p.rel_tol);
    let values = par(&points, |&(g, k, t)| pvac(field_gauge(p.gauges[g]).0, p.omega_mn, times[t], cutoffs[k], p.d_sq, opts))?;

    let mut table = Table::new(vec!["gauge", "omega_max", "t", "probability", "quad_error"]);
    let mut err: f64 = 0.0;
    for (&(g, k, t), r) in points.iter().zip(&values) {
        err = err.max(r.error);
        table.rows.push(vec![field_gauge(p.gauges[g]).1.into(), cutoffs[k].into(), times[t].into(), r.value.into(), r.error.into()]);
    }
    let mut report = Report::default();
    report.knob("omega_mn", p.omega_mn);
    report.knob("d_sq", p.d_sq);
    report.knob("quadrature rel tol", p.rel_tol);
    report.residual("max quadrature error", err);
    Ok(Outcome { tables: vec![table], report })
}

fn energy_density(p: &EnergyDensityParams) -> Result<Outcome> {
    let dipole = DipoleData::two_level(p.omega_m, p.d, [0.0, 0.0, 1.0])?;
    let xs = p.distances.values();
    let opts = QuadOptions::new(0.0, p.rel_tol);
    let values = par(&xs, |&x| {
        let s = static_energy_density(&dipole, p.level, x, opts)?;
        let sphere = poynting_real(&dipole, p.level, x)?.sphere_integral(x);
        Ok((s, sphere))
    })?;

    let total_flux = flux(&dipole, p.level)?;
    let mut table = Table::new(vec![
        "x",
        "electric_theta",
        "electric_phi_sq",
        "electric_average",
        "magnetic_theta",
        "magnetic_phi_sq",
        "magnetic_average",
    ]);
    let mut flux_dev: f64 = 0.0;
    for (&x, (s, sphere)) in xs.iter().zip(&values) {
        flux_dev = flux_dev.max((sphere - total_flux).abs() / total_flux.abs().max(f64::MIN_POSITIVE));
        let (e, b) = (s.electric, s.magnetic);
        table.rows.push(vec![
            x.into(),
            e.theta.into(),
            e.phi_sq.into(),
            e.orientation_average().into(),
            b.theta.into(),
            b.phi_sq.into(),
            b.orientation_average().into(),
        ]);
    }
    let mut report = Report::default();
    report.knob("omega_m", p.omega_m);
    report.knob("d", p.d);
    report.knob("level", p.level);
    report.knob("quadrature rel tol", p.rel_tol);
    if total_flux != 0.0 {
        report.residual("sphere flux deviation (relative)", flux_dev);
    }
    Ok(Outcome { tables: vec![table], report })
}

fn udot_map(p: &UdotParams) -> Result<Outcome> {
    let ts = p.times.values();
    let xs = p.positions.values();
    let mut table = Table::new(vec!["t", "x", "udot"]);
    for &t in &ts {
        for &x in &xs {
            table.rows.push(vec![t.into(), x.into(), udot(t, x, p.omega_m).into()]);
        }
    }
    let mut report = Report::default();
    report.knob("omega_m", p.omega_m);
    Ok(Outcome { tables: vec![table], report })
}

fn cavity_map(p: &CavityMapParams) -> Result<Outcome> {
    let spec = CavitySpec::new(p.length, p.n_modes, p.dipole, p.volume)?;
    let xs = p.positions.values();
    let ts = p.times.values();
    let obs = match p.observable {
        ObservableName::Square => Observable::Square,
        ObservableName::Normal => Observable::Normal,
    };
    let norm = if p.normalize { spec.map_normalization() } else { 1.0 };
    let maps = par(&p.alphas, |&a| match p.state {
        StateName::Excited => field_map_excited(&spec, a, obs, &xs, &ts),
        StateName::Ground => field_map_ground(&spec, a, obs, &xs, &ts),
    })?;

    let mut tables = vec![];
    for (&a, map) in p.alphas.iter().zip(&maps) {
        let mut table = Table::new(vec!["t", "x", "value"]);
        table.suffix = Some(format!("alpha{a}"));
        table.notes.push(("alpha".into(), a.to_string()));
        for (j, &t) in ts.iter().enumerate() {
            for (i, &x) in xs.iter().enumerate() {
                table.rows.push(vec![t.into(), x.into(), (map.values[i][j] / norm).into()]);
            }
        }
        tables.push(table);
    }
    let mut report = Report::default();
    report.knob("length", p.length);
    report.knob("n_modes", p.n_modes);
    report.knob("state", format!("{:?}", p.state));
    report.knob("observable", format!("{:?}", p.observable));
    report.knob("normalization", norm);
    Ok(Outcome { tables, report })
}

fn pointer_setup(p: &PointerParams, t_p: f64, g: &GaugeChoice) -> Result<PointerSetup> {
    if p.sigma == 0.0 {
        PointerSetup::sharp(p.r_scale, t_p, profile(g))
    } else {
        PointerSetup::new(p.r_scale, p.sigma, t_p, profile(g))
    }
}

fn pointer(p: &PointerParams) -> Result<Outcome> {
    let durations = p.durations.values();
    let mut report = Report::default();
    report.knob("r_scale", p.r_scale);
    report.knob("sigma", p.sigma);
    let table = match &p.mode {
        PointerMode::Single { eta, delta } => {
            let mode = SingleMode::from_eta(*eta, *delta);
            let points = grid2(p.gauges.len(), durations.len());
            let moments = par(&points, |&(g, k)| pointer_moments_singlemode(&mode, &pointer_setup(p, durations[k], &p.gauges[g])?))?;
            let mut table = Table::new(vec!["gauge", "t_p", "mean", "variance"]);
            for (&(g, k), m) in points.iter().zip(&moments) {
                table.rows.push(vec![p.gauges[g].label().into(), durations[k].into(), m.mean.into(), m.variance.into()]);
            }
            report.knob("eta", eta);
            report.knob("delta", delta);
            table
        }
        PointerMode::Continuum { gamma, cutoffs } => {
            let cutoffs = cutoffs.values();
            let points: Vec<(usize, usize, usize)> = grid2(p.gauges.len(), cutoffs.len())
                .into_iter()
                .flat_map(|(g, c)| (0..durations.len()).map(move |k| (g, c, k)))
                .collect();
            let moments = par(&points, |&(g, c, k)| {
                pointer_moments_continuum(&ContinuumSpec::new(*gamma, cutoffs[c]), &pointer_setup(p, durations[k], &p.gauges[g])?)
            })?;
            let mut table = Table::new(vec!["gauge", "omega_max", "t_p", "mean", "variance"]);
            for (&(g, c, k), m) in points.iter().zip(&moments) {
                table.rows.push(vec![
                    p.gauges[g].label().into(),
                    cutoffs[c].into(),
                    durations[k].into(),
                    m.mean.into(),
                    m.variance.into(),
                ]);
            }
            report.knob("gamma", gamma);
            report.knob("quadrature rel tol", ContinuumSpec::new(*gamma, 1.0).rel_tol);
            table
        }
    };
    Ok(Outcome { tables: vec![table], report })
}

fn dicke(p: &DickeParamsCfg) -> Result<Outcome> {
    let taus = p.taus.values();
    let points = grid2(p.alphas.len(), taus.len());
    let base = |alpha: f64, tau: f64| {
        let d = DickeParams::at_tau(p.omega_m, p.omega, tau, alpha);
        match &p.finite_n {
            Some(f) => d.with_size(f.n_spins, f.n_bosons),
            None => d,
        }
    };
    let rows = par(&points, |&(a, k)| {
        let d = base(p.alphas[a], taus[k]);
        let phase = phase_at(&d);
        let (ep, em) = polariton_energies(&d, phase)?;
        let order = order_parameter(&d)?;
        let pi = pi_expectation(&d)?;
        let e_mf = mean_field(&d)?.energy;
        let e_zp = thermodynamic_ground_energy(&d, 0.0)?;
        let (gap, tail) = match &p.finite_n {
            Some(_) => (finite_n_gap(&d)?, boson_tail(&d)?),
            None => (f64::NAN, 0.0),
        };
        Ok((phase, em, ep, order, pi, e_mf, e_zp, gap, tail))
    })?;

    let mut table = Table::new(vec![
        "alpha",
        "tau",
        "phase",
        "e_minus",
        "e_plus",
        "order_parameter",
        "pi",
        "mean_field_energy",
        "zero_point_energy",
        "finite_n_gap",
    ]);
    let (mut sum_rule, mut tail_max) = (0.0f64, 0.0f64);
    for (&(a, k), r) in points.iter().zip(&rows) {
        let &(phase, em, ep, order, pi, e_mf, e_zp, gap, tail) = r;
        sum_rule = sum_rule.max((pi + order).abs());
        tail_max = tail_max.max(tail);
        let phase = match phase {
            Phase::Normal => "normal",
            Phase::Abnormal => "abnormal",
        };
        table.rows.push(vec![
            p.alphas[a].into(),
            taus[k].into(),
            phase.into(),
            em.into(),
            ep.into(),
            order.into(),
            pi.into(),
            e_mf.into(),
            e_zp.into(),
            gap.into(),
        ]);
    }
    let mut report = Report::default();
    report.knob("omega_m", p.omega_m);
    report.knob("omega", p.omega);
    if let Some(f) = &p.finite_n {
        report.knob("finite n_spins", f.n_spins);
        report.knob("finite n_bosons", f.n_bosons);
        report.residual("max boson tail", tail_max);
    }
    for &alpha in &p.alphas {
        let tc = critical_tau(&base(alpha, 1.0), 0.5, 2.0)?;
        report.residual(&format!("critical tau - 1 (alpha {alpha})"), tc - 1.0);
    }
    report.residual("max |pi + order parameter|", sum_rule);
    Ok(Outcome { tables: vec![table], report })
}

fn master(p: &MasterParams) -> Result<Outcome> {
    let m = material(&p.material)?;
    let spec = ContinuumSpec::new(p.gamma, p.omega_max);
    let modes = ModeSet::continuum(&spec, p.n_modes)?;
    let mut points = vec![];
    for &n in &p.shift_levels {
        for &size in p.basis_sizes.iter().filter(|&&s| n < s) {
            for a in 0..p.alphas.len() {
                points.push((n, size, a));
            }
        }
    }
    let shifts = par(&points, |&(n, size, a)| level_shift(&m, &spec, p.alphas[a], n, size, &modes))?;

    let mut table = Table::new(vec!["level", "basis", "alpha", "shift", "excluded_resonances"]);
    let mut report = Report::default();
    material_knobs(&mut report, &p.material, &m);
    report.knob("gamma", p.gamma);
    report.knob("omega_max", p.omega_max);
    report.knob("n_modes", p.n_modes);
    let na = p.alphas.len().max(1);
    for (chunk_points, chunk) in points.chunks(na).zip(shifts.chunks(na)) {
        let (n, size, _) = chunk_points[0];
        let vals: Vec<f64> = chunk.iter().map(|s| s.value).collect();
        let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
        report.residual(&format!("shift spread across alpha (level {n}, basis {size})"), spread);
        for (&(_, _, a), s) in chunk_points.iter().zip(chunk) {
            table.rows.push(vec![n.into(), size.into(), p.alphas[a].into(), s.value.into(), s.excluded.len().into()]);
        }
    }
    let steady = par(&p.alphas, |&a| {
        let me = build_master_equation(&m, &spec, p.steady_levels, a, &modes)?;
        let rho = me.stationary()?;
        Ok((1.0 - rho.operator().get(0, 0).re, lindblad_residual(&me.h, &me.jumps, &rho)))
    })?;
    for (a, (infidelity, res)) in p.alphas.iter().zip(steady) {
        report.residual(&format!("steady state 1 - ground population (alpha {a})"), infidelity);
        report.residual(&format!("steady state generator residual (alpha {a})"), res);
    }
    Ok(Outcome { tables: vec![table], report })
}
