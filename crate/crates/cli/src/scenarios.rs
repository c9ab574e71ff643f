//! End-to-end scenarios. Each one computes its metrics, records assertions
//! in a [`Report`] and writes CSV and SVG artifacts into its output
//! directory. All randomness comes from one ChaCha8 stream seeded by the
//! config.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use lagroid_core::action::{dirac_feynman_function, ActionFunctionalData};
use lagroid_core::algebra::{positivity_form, positivity_report, GroupoidFunction, Measure, State, DEFAULT_TOLERANCE};
use lagroid_core::algebroid::{
    el_flow, geodesic_flow, legendre_energy, momentum, so3_algebroid, AlgebroidPath, AlgebroidState,
    QuadraticLagrangian,
};
use lagroid_core::chart::RiemannianChart;
use lagroid_core::groupoid::{build_pair_groupoid, groupoid_from_json, validate_groupoid, FiniteGroupoid, FunctionDocument};
use lagroid_core::numeric::{field, loglog_slope};
use lagroid_core::pair::{
    log_radii, quadratic_expansion, remainder_sweep, ExpansionData, FdOptions, PairGeometry, TwoPointLagrangian};
use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::report::{num, packed, write_csv, Report};
use crate::svg::{emit_svg, Plot, PlotKind, Series};

/// Radii `|v| / c_K` of the remainder sweep.
const SWEEP_RANGE: (f64, f64) = (1e-3, 1e-1);
const SWEEP_POINTS: usize = 7;
/// Every how many samples a trajectory point goes into its SVG.
const SVG_STRIDE: usize = 10;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Core(#[from] lagroid_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("plot: {0}")]
    Svg(#[from] crate::svg::SvgError),
    #[error("{0}")]
    Input(String),
}

type Outcome = Result<(), ScenarioError>;

/// Runs the scenario and writes `report.json` into `dir`, also when the run
/// fails part way.
pub fn run(config: &ScenarioConfig, dir: &Path) -> std::io::Result<Report> {
    let mut report = Report::new(config.scenario.name(), config.seed);
    let mut run = Run {
        config,
        dir,
        report: &mut report,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
    };
    let outcome = fs::create_dir_all(dir).map_err(ScenarioError::from).and_then(|_| match config.scenario {
        ScenarioKind::Euclidean => run.euclidean(),
        ScenarioKind::Sphere | ScenarioKind::Hyperbolic => run.curved(),
        ScenarioKind::So3 => run.so3(),
        ScenarioKind::PairGroupoidState => run.pair_state(),
        ScenarioKind::Custom => run.custom(),
    });
    if let Err(e) = outcome {
        report.fail_with(e);
    }
    report.write(dir)?;
    Ok(report)
}

struct Run<'a> {
    config: &'a ScenarioConfig,
    dir: &'a Path,
    report: &'a mut Report,
    rng: ChaCha8Rng,
}

impl Run<'_> {
    fn csv(&mut self, name: &str, header: Vec<String>, rows: &[Vec<String>]) -> Outcome {
        write_csv(&self.dir.join(name), &header, rows)?;
        self.report.artifacts.push(name.into());
        Ok(())
    }

    fn svg(&mut self, name: &str, series: &[Series], plot: Plot) -> Outcome {
        fs::write(self.dir.join(name), emit_svg(series, &plot)?)?;
        self.report.artifacts.push(name.into());
        Ok(())
    }

    fn euclidean(&mut self) -> Outcome {
        let c = self.config;
        let dim = c.n.unwrap_or(2);
        let chart = RiemannianChart::by_name("euclidean", dim)?;
        let geometry = PairGeometry::new(chart.clone())?.with_step(c.step);
        let tpl = TwoPointLagrangian::canonical(geometry.clone(), c.m, c.c_k.unwrap_or(10.0));
        let points: Vec<DVector<f64>> = (0..c.points.unwrap_or(20))
            .map(|_| DVector::from_fn(dim, |_, _| self.rng.random_range(-3.0..3.0)))
            .collect();

        let (mut hessian, mut gauge, mut potential, mut irregular) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0);
        let mut rows = Vec::new();
        for (i, x) in points.iter().enumerate() {
            let e = quadratic_expansion(&tpl, x, &FdOptions::default())?;
            rows.push(expansion_row(i, &e));
            hessian = hessian.max((e.eta_matrix() - DMatrix::identity(dim, dim) * c.m).amax());
            gauge = gauge.max(e.a_vector().amax());
            potential = potential.max(e.v.abs());
            if !e.regular {
                irregular += 1.0;
            }
        }
        let tol = &c.tolerances;
        self.report.below("hessian_error", hessian, tol.hessian);
        self.report.below("gauge_error", gauge, tol.gauge);
        self.report.below("potential_error", potential, tol.potential);
        self.report.below("irregular_points", irregular, 0.5);
        self.csv("expansion.csv", expansion_header(), &rows)?;

        let v = DVector::from_fn(dim, |_, _| self.rng.random_range(-1.0..1.0));
        let path = geodesic_flow(geometry.connection(), &AlgebroidState { x: points[0].clone(), xi: v.clone() }, c.t_max.unwrap_or(1.0), c.step)?;
        let straight = path
            .samples
            .iter()
            .map(|p| (&p.state.x - &points[0] - &v * p.s).amax())
            .fold(0.0, f64::max);
        self.report.metric("geodesic_line_error", straight);
        self.geodesic_artifacts(&chart, &path)
    }

    fn curved(&mut self) -> Outcome {
        let c = self.config;
        let chart = RiemannianChart::by_name(c.scenario.name(), 2)?;
        let geometry = PairGeometry::new(chart.clone())?.with_step(c.step);
        let c_k = c.c_k.unwrap_or(2.0);
        let canonical = TwoPointLagrangian::canonical(geometry.clone(), c.m, c_k);
        let sphere = c.scenario == ScenarioKind::Sphere;
        // a τ-invariant shift whose Taylor expansion has a generic cubic term
        let shifted = canonical.shifted(if sphere { field(|x| x[0].cos()) } else { field(|x| x[0]) });
        let points: Vec<DVector<f64>> = (0..c.points.unwrap_or(10))
            .map(|_| {
                let p = if sphere {
                    [self.rng.random_range(0.5..PI - 0.5), self.rng.random_range(-PI..PI)]
                } else {
                    [self.rng.random_range(-1.0..1.0), self.rng.random_range(0.5..2.0)]
                };
                DVector::from_row_slice(&p)
            })
            .collect();

        let radii = log_radii(SWEEP_RANGE.0, SWEEP_RANGE.1, SWEEP_POINTS);
        let richardson = FdOptions {
            richardson: true,
            ..FdOptions::default()
        };
        let (mut hessian_rel, mut min_slope) = (0.0_f64, f64::INFINITY);
        let (mut rows, mut sweep_rows, mut series) = (Vec::new(), Vec::new(), Vec::new());
        for (i, x) in points.iter().enumerate() {
            let e = quadratic_expansion(&canonical, x, &FdOptions::default())?;
            rows.push(expansion_row(i, &e));
            let expected = chart.metric(x) * c.m;
            hessian_rel = hessian_rel.max((e.eta_matrix() - &expected).amax() / expected.amax());

            let angle = self.rng.random_range(0.0..2.0 * PI);
            let direction = DVector::from_row_slice(&[angle.cos(), angle.sin()]);
            let e = quadratic_expansion(&shifted, x, &richardson)?;
            let rows = remainder_sweep(&shifted, &e, &direction, &radii)?;
            let remainders: Vec<f64> = rows.iter().map(|r| r.remainder).collect();
            min_slope = min_slope.min(loglog_slope(&radii, &remainders));
            let visible: Vec<(f64, f64)> = radii
                .iter()
                .zip(&remainders)
                .filter(|(_, r)| **r > 0.0)
                .map(|(a, b)| (*a, *b))
                .collect();
            if !visible.is_empty() {
                series.push(Series::new(format!("point {i}"), visible));
            }
            sweep_rows.extend(rows.into_iter().map(|r| {
                vec![packed(&r.x), packed(&r.v), num(r.l_exact), num(r.l_quadratic), num(r.remainder)]
            }));
        }
        let tol = &c.tolerances;
        self.report.below("hessian_rel_error", hessian_rel, tol.hessian_rel);
        self.report.at_least("remainder_slope", min_slope, tol.slope_min);

        // The canonical two-point function is exactly quadratic in the fiber,
        // so its remainder only shows rounding.
        let e = quadratic_expansion(&canonical, &points[0], &FdOptions::default())?;
        let direction = DVector::from_row_slice(&[0.6, 0.8]);
        let floor = remainder_sweep(&canonical, &e, &direction, &radii)?
            .iter()
            .map(|r| r.remainder / r.l_exact.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        self.report.metric("canonical_relative_remainder", floor);

        self.csv("expansion.csv", expansion_header(), &rows)?;
        let header = ["x", "v", "L_exact", "L_quadratic", "remainder"].map(String::from).to_vec();
        self.csv("sweep.csv", header, &sweep_rows)?;
        if !series.is_empty() {
            let plot = Plot::new(
                PlotKind::LogLog { slope: Some(min_slope) },
                "c-Lagrangian remainder",
                "|v| / c_K",
                "|L - L_quadratic|",
            );
            self.svg("remainder.svg", &series, plot)?;
        }

        let v = DVector::from_row_slice(&[self.rng.random_range(-0.5..0.5), self.rng.random_range(-0.5..0.5)]);
        let path = geodesic_flow(geometry.connection(), &AlgebroidState { x: points[0].clone(), xi: v }, c.t_max.unwrap_or(1.0), c.step)?;
        self.geodesic_artifacts(&chart, &path)
    }

    fn geodesic_artifacts(&mut self, chart: &RiemannianChart, path: &AlgebroidPath) -> Outcome {
        let speed0 = chart.norm(&path.samples[0].state.x, &path.samples[0].state.xi);
        let drift = path
            .samples
            .iter()
            .map(|p| (chart.norm(&p.state.x, &p.state.xi) - speed0).abs())
            .fold(0.0, f64::max);
        self.report.below("speed_drift", drift, self.config.tolerances.speed * speed0.max(1.0));
        let (header, rows) = trajectory_table(path, |s| 0.5 * chart.norm(&s.x, &s.xi).powi(2), |s| chart.norm(&s.x, &s.xi));
        self.csv("trajectory.csv", header, &rows)?;
        let dim = chart.dim();
        let projection: Vec<(f64, f64)> = path
            .samples
            .iter()
            .step_by(SVG_STRIDE)
            .chain(std::iter::once(path.last()))
            .map(|p| if dim >= 2 { (p.state.x[0], p.state.x[1]) } else { (p.s, p.state.x[0]) })
            .collect();
        let (xl, yl) = if dim >= 2 { ("x_1", "x_2") } else { ("s", "x_1") };
        self.svg("trajectory.svg", &[Series::new("geodesic", projection)], Plot::new(PlotKind::Line, "geodesic", xl, yl))
    }

    fn so3(&mut self) -> Outcome {
        let c = self.config;
        let inertia = Vector3::from(c.inertia.unwrap_or([1.0, 2.0, 3.0]));
        let omega0 = Vector3::from(c.omega0.unwrap_or([0.3, 1.0, -0.4]));
        let t_max = c.t_max.unwrap_or(10.0);
        let eta = DMatrix::from_diagonal(&DVector::from_column_slice(inertia.as_slice()));
        let lag = QuadraticLagrangian::kinetic(field(move |_| eta.clone()), 3);
        let init = AlgebroidState::new(vec![], omega0.as_slice().to_vec());
        let path = el_flow(&lag, &so3_algebroid(), &init, t_max, c.step)?;
        let reference = rigid_body(inertia, omega0.component_mul(&inertia), path.samples.len() - 1, c.step);

        let e0 = legendre_energy(&lag, &init);
        let c0 = momentum(&lag, &init).norm_squared();
        let (mut energy, mut casimir, mut error) = (0.0_f64, 0.0_f64, 0.0_f64);
        for (sample, m_ref) in path.samples.iter().zip(&reference) {
            let m = momentum(&lag, &sample.state);
            energy = energy.max((legendre_energy(&lag, &sample.state) - e0).abs());
            casimir = casimir.max((m.norm_squared() - c0).abs());
            error = error.max((Vector3::new(m[0], m[1], m[2]) - m_ref).norm() / m_ref.norm());
        }
        let tol = &c.tolerances;
        self.report.below("energy_drift", energy, tol.drift);
        self.report.below("casimir_drift", casimir, tol.drift);
        self.report.below("reference_error", error, tol.reference);

        let (mut header, mut rows) = trajectory_table(
            &path,
            |s| legendre_energy(&lag, s),
            |s| s.xi.iter().zip(inertia.iter()).map(|(w, i)| i * w * w).sum::<f64>().sqrt(),
        );
        header.push("casimir".into());
        for (row, sample) in rows.iter_mut().zip(&path.samples) {
            row.push(num(momentum(&lag, &sample.state).norm_squared()));
        }
        self.csv("trajectory.csv", header, &rows)?;
        let pick = |i: usize, j: usize| -> Vec<(f64, f64)> {
            path.samples.iter().step_by(SVG_STRIDE).map(|p| (p.state.xi[i], p.state.xi[j])).collect()
        };
        let series = [
            Series::new("(xi_1, xi_2)", pick(0, 1)),
            Series::new("(xi_2, xi_3)", pick(1, 2)),
            Series::new("(xi_1, xi_3)", pick(0, 2)),
        ];
        self.svg("trajectory.svg", &series, Plot::new(PlotKind::Line, "angular velocity projections", "first", "second"))
    }

    fn pair_state(&mut self) -> Outcome {
        let c = self.config;
        let n = c.n.unwrap_or(5);
        let g = build_pair_groupoid(n)?;
        let potential: Vec<f64> = (0..n).map(|_| self.rng.random_range(-3.0..3.0)).collect();
        let raw: Vec<f64> = (0..n).map(|_| self.rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let density = raw.iter().map(|p| p / total).collect();
        let data = ActionFunctionalData::from_potential(&g, &potential, c.hbar, density)?;
        let phi = dirac_feynman_function(&g, &data)?;
        self.report.metric("objects", n as f64);
        self.positivity(&g, &phi)
    }

    fn custom(&mut self) -> Outcome {
        let c = self.config;
        let (gpath, ppath) = match (&c.groupoid, &c.phi) {
            (Some(g), Some(p)) => (g, p),
            _ => return Err(ScenarioError::Input("custom scenario needs groupoid and phi".into())),
        };
        let g = groupoid_from_json(&fs::read_to_string(gpath)?)?;
        let violations = validate_groupoid(&g).violations.len();
        self.report.below("groupoid_violations", violations as f64, 0.5);
        let doc: FunctionDocument = serde_json::from_str(&fs::read_to_string(ppath)?)
            .map_err(|e| ScenarioError::Input(format!("phi document: {e}")))?;
        let phi = GroupoidFunction::from_document(&g, &doc)?;
        self.positivity(&g, &phi)
    }

    fn positivity(&mut self, g: &FiniteGroupoid, phi: &GroupoidFunction) -> Outcome {
        let tol = self.config.tolerances.positivity;
        let nu = Measure::counting(g);
        let report = positivity_report(&positivity_form(g, &nu, phi)?, tol);
        self.report.at_least("min_eigenvalue", report.min_eigenvalue(), -tol);
        self.report.below("hermitian_defect", report.hermitian_defect, DEFAULT_TOLERANCE);
        self.report.metric("rank", report.rank() as f64);
        let z = State::new(g, &nu, phi)?.normalization();
        self.report.metric("normalization_re", z.re);
        self.report.metric("normalization_im", z.im);

        let rows: Vec<Vec<String>> = report
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, e)| vec![i.to_string(), num(*e)])
            .collect();
        self.csv("spectrum.csv", vec!["index".into(), "eigenvalue".into()], &rows)?;
        let points = report.eigenvalues.iter().enumerate().map(|(i, e)| (i as f64, *e)).collect();
        let plot = Plot::new(PlotKind::Spectrum, "positivity form spectrum", "index", "eigenvalue");
        self.svg("spectrum.svg", &[Series::new("Q", points)], plot)
    }
}

fn expansion_row(i: usize, e: &ExpansionData) -> Vec<String> {
    let eta: Vec<f64> = e.eta.iter().flatten().copied().collect();
    vec![i.to_string(), packed(&e.x), num(e.v), packed(&e.a), packed(&eta), e.regular.to_string()]
}

fn expansion_header() -> Vec<String> {
    ["point", "x", "V", "A", "eta", "regular"].map(String::from).to_vec()
}

/// Columns `s, x_1.., xi_1.., energy, eta_norm`.
pub fn trajectory_table(
    path: &AlgebroidPath,
    energy: impl Fn(&AlgebroidState) -> f64,
    eta_norm: impl Fn(&AlgebroidState) -> f64,
) -> (Vec<String>, Vec<Vec<String>>) {
    let first = &path.samples[0].state;
    let mut header = vec!["s".to_string()];
    header.extend((1..=first.x.len()).map(|i| format!("x_{i}")));
    header.extend((1..=first.xi.len()).map(|i| format!("xi_{i}")));
    header.extend(["energy".to_string(), "eta_norm".to_string()]);
    let rows = path
        .samples
        .iter()
        .map(|p| {
            let mut row = vec![num(p.s)];
            row.extend(p.state.x.iter().chain(p.state.xi.iter()).map(|v| num(*v)));
            row.push(num(energy(&p.state)));
            row.push(num(eta_norm(&p.state)));
            row
        })
        .collect();
    (header, rows)
}

/// Body angular momentum under Euler's equations `dM/dt = M × I⁻¹M`,
/// integrated by classical RK4 independently of the algebroid machinery.
pub fn rigid_body(inertia: Vector3<f64>, m0: Vector3<f64>, steps: usize, h: f64) -> Vec<Vector3<f64>> {
    let f = |m: &Vector3<f64>| m.cross(&m.component_div(&inertia));
    let mut m = m0;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(m);
    for _ in 0..steps {
        let k1 = f(&m);
        let k2 = f(&(m + k1 * (h / 2.0)));
        let k3 = f(&(m + k2 * (h / 2.0)));
        let k4 = f(&(m + k3 * h));
        m += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        out.push(m);
    }
    out
}
