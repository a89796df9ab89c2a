//! Acceptance gate: one test per numbered criterion, each emitting a single
//! `criterion N: PASS/FAIL` line (visible with `--nocapture`; the harness
//! ok/FAILED line mirrors it).  The expensive case-study artifacts are
//! computed once and shared.

use std::path::Path;
use std::sync::OnceLock;
use std::time::Instant;

use blister_cyl::config::{parse_config, RunSpec};
use blister_cyl::field;
use blister_cyl::material::{AxialLoad, CylinderGeometry, ElasticMaterial};
use blister_cyl::mode::{solve_mode, ModeSolution};
use blister_cyl::oracle;
use blister_cyl::run::{self, RunArtifacts};
use blister_cyl::series::{recurrence_step, recurrence_step_matrix};
use blister_cyl::truncation::select_series_order;
use blister_cyl::{Extended, Scalar};

use num_traits::{Float, FloatConst};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shipped_config() -> RunSpec {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../case_study.cfg");
    let mut spec = parse_config(&path).expect("shipped case_study.cfg parses");
    spec.output_dir = std::env::temp_dir().join("blister-acceptance-out");
    spec
}

struct Case {
    art: RunArtifacts,
    elapsed_s: f64,
}

static CASE: OnceLock<Case> = OnceLock::new();

fn case() -> &'static Case {
    CASE.get_or_init(|| {
        run::init_threads();
        let spec = shipped_config();
        let t = Instant::now();
        let art = run::run(&spec).expect("case-study run succeeds");
        Case {
            art,
            elapsed_s: t.elapsed().as_secs_f64(),
        }
    })
}

static XMODES: OnceLock<Vec<ModeSolution<Extended>>> = OnceLock::new();

/// The 29 retained modes re-solved in extended precision at the orders the
/// case-study run selected.
fn xmodes() -> &'static [ModeSolution<Extended>] {
    XMODES.get_or_init(|| {
        let c = case();
        let spec = &c.art.summary.config;
        let mat = spec.material::<Extended>().unwrap();
        let geom = spec.geometry::<Extended>().unwrap();
        let load = spec.axial_load::<Extended>(&geom).unwrap();
        c.art
            .summary
            .truncation
            .modes
            .iter()
            .map(|r| solve_mode(r.k, &mat, &geom, &load, r.n, r.bound).unwrap())
            .collect()
    })
}

fn f64_problem() -> (
    ElasticMaterial<f64>,
    CylinderGeometry<f64>,
    AxialLoad<f64>,
    RunSpec,
) {
    let spec = shipped_config();
    let mat = spec.material::<f64>().unwrap();
    let geom = spec.geometry::<f64>().unwrap();
    let load = spec.axial_load::<f64>(&geom).unwrap();
    (mat, geom, load, spec)
}

fn report(n: u32, what: &str, fails: &[String]) {
    if fails.is_empty() {
        println!("criterion {n}: PASS — {what}");
    } else {
        println!("criterion {n}: FAIL — {what}: {}", fails.join("; "));
    }
    assert!(fails.is_empty(), "criterion {n} FAIL: {}", fails.join("; "));
}

#[test]
fn criterion_01_case_study_extrema() {
    let c = case();
    let e = &c.art.extrema;
    let spec = &c.art.summary.config;
    let geom = spec.geometry::<f64>().unwrap();
    let cell = (geom.b - geom.a) / (spec.grid_nrho as f64 - 1.0);
    let mut fails = Vec::new();
    let mut check = |ok: bool, detail: String| {
        if !ok {
            fails.push(detail);
        }
    };

    let u3_mm = e.u_3.abs_value * 1e3;
    check(
        (u3_mm - 0.24).abs() <= 0.01,
        format!("max|u_3| = {u3_mm:.4} mm, expected 0.24 ± 0.01"),
    );
    check(
        (e.u_3.rho - geom.a).abs() <= cell && (e.u_3.z.abs() - 1.50).abs() <= 0.05,
        format!(
            "u_3 extremum at (rho = {:.4}, z = {:.3}), expected (a, ±1.50)",
            e.u_3.rho, e.u_3.z
        ),
    );

    let table = [
        ("sigma_z", e.sigma_z, 20.77e6, 20.77e6 * 0.02, geom.a, 1.42),
        ("sigma_r", e.sigma_r, 4.23e6, 0.15e6, geom.a, 1.42),
        ("sigma_theta", e.sigma_theta, 2.62e6, 0.15e6, geom.a, 1.43),
        ("tau_rz", e.tau_rz, 2.52e6, 0.15e6, geom.eps, 1.34),
    ];
    for (name, ex, want, tol, rho_ref, z_ref) in table {
        check(
            (ex.abs_value - want).abs() <= tol,
            format!(
                "max|{name}| = {:.3} MPa, expected {:.2} ± {:.2}",
                ex.abs_value / 1e6,
                want / 1e6,
                tol / 1e6
            ),
        );
        check(
            (ex.rho - rho_ref).abs() <= cell && (ex.z.abs() - z_ref).abs() <= 0.05,
            format!(
                "{name} extremum at (rho = {:.4}, z = {:.3}), expected ({rho_ref:.4}, ±{z_ref:.2})",
                ex.rho, ex.z
            ),
        );
    }

    check(
        c.elapsed_s <= 180.0,
        format!("runtime {:.1} s exceeds 180 s", c.elapsed_s),
    );
    report(1, "case-study extrema vs reference table", &fails);
}

#[test]
fn criterion_02_distributed_pressure() {
    let p_mpa = case().art.summary.p_pa / 1e6;
    let mut fails = Vec::new();
    if (p_mpa - 22.8).abs() > 0.05 {
        fails.push(format!("p = {p_mpa:.4} MPa, expected 22.80 to 3 sig figs"));
    }
    report(2, &format!("p = {p_mpa:.4} MPa"), &fails);
}

#[test]
fn criterion_03_l2_tail_bounds() {
    let t = &case().art.summary.truncation;
    let mut fails = Vec::new();
    if (t.l2_bound_u1 / 4.46e-5 - 1.0).abs() > 0.01 {
        fails.push(format!(
            "u1 bound {:.4e}, expected 4.46e-5 ± 1%",
            t.l2_bound_u1
        ));
    }
    if (t.l2_bound_u3 / 1.02e-6 - 1.0).abs() > 0.01 {
        fails.push(format!(
            "u3 bound {:.4e}, expected 1.02e-6 ± 1%",
            t.l2_bound_u3
        ));
    }
    report(
        3,
        &format!(
            "L2 tail bounds ({:.3e}, {:.3e}) m^(5/2)",
            t.l2_bound_u1, t.l2_bound_u3
        ),
        &fails,
    );
}

#[test]
fn criterion_04_series_order_selection() {
    let (mat, geom, _, spec) = f64_problem();
    let mut max_n = 0u32;
    let mut arg_k = 0u32;
    for i in 0..30u32 {
        let k = 2 * i + 1; // k = 1..59
        let sel = select_series_order(k, spec.epsilon_tol, &mat, &geom, spec.n_ceiling)
            .unwrap_or_else(|e| panic!("selection failed for k = {k}: {e}"));
        if sel.n > max_n {
            max_n = sel.n;
            arg_k = k;
        }
    }
    // the run must record the evaluated bound and denominator per mode
    let json = std::fs::read_to_string(&case().art.truncation_json).unwrap();
    let mut fails = Vec::new();
    if !(json.contains("\"bound\"") && json.contains("\"denominator\"")) {
        fails.push("truncation.json lacks bound/denominator records".into());
    }
    if !(113..=133).contains(&max_n) {
        fails.push(format!(
            "max selected N = {max_n} (at k = {arg_k}), expected within [113, 133]"
        ));
    }
    report(
        4,
        &format!("max selected N over k ≤ 59 is {max_n} at k = {arg_k}"),
        &fails,
    );
}

#[test]
fn criterion_05_oracle_equivalence() {
    let (mat, geom, load, _) = f64_problem();
    let records = &case().art.summary.truncation.modes;
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    for k in [1u32, 3, 5] {
        let rec = records.iter().find(|r| r.k == k).unwrap();
        let mode = solve_mode(k, &mat, &geom, &load, rec.n, rec.bound).unwrap();
        let orc = oracle::richardson_solve_mode(k, &mat, &geom, &load, run::VERIFY_MESH).unwrap();
        let dev = oracle::compare_mode(&mode, &orc).unwrap();
        worst = worst.max(dev);
        if dev > 1e-6 {
            fails.push(format!("k = {k}: deviation {dev:.3e} > 1e-6"));
        }
    }
    report(
        5,
        &format!("series vs collocation oracle, worst deviation {worst:.3e}"),
        &fails,
    );
}

#[test]
fn criterion_06_boundary_residuals() {
    let c = case();
    let spec = &c.art.summary.config;
    let mat = spec.material::<Extended>().unwrap();
    let geom = spec.geometry::<Extended>().unwrap();
    let two = Extended::of_f64(2.0);
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    for m in xmodes() {
        let s = Extended::PI() * Extended::of_usize(m.k as usize) / geom.h;
        for rho in [geom.a, geom.b] {
            let st = m.eval(rho).unwrap();
            // radial-traction row with its three term magnitudes
            let t1 = (mat.lambda + two * mat.mu) * st.dy;
            let t2 = mat.lambda / rho * st.y;
            let t3 = mat.lambda * s * st.z;
            let scale1 = t1.abs().max(t2.abs()).max(t3.abs()).as_f64();
            let r1 = (t1 + t2 + t3).abs().as_f64() / scale1.max(f64::MIN_POSITIVE);
            // shear row
            let u1 = st.dz;
            let u2 = s * st.y;
            let scale2 = u1.abs().max(u2.abs()).as_f64();
            let r2 = (u1 - u2).abs().as_f64() / scale2.max(f64::MIN_POSITIVE);
            let r = r1.max(r2);
            worst = worst.max(r);
            if r > 1e-8 {
                fails.push(format!(
                    "k = {}, rho = {:.4}: residual {r:.3e} > 1e-8",
                    m.k,
                    rho.as_f64()
                ));
            }
        }
    }
    report(
        6,
        &format!("boundary rows for all retained modes, worst relative residual {worst:.3e}"),
        &fails,
    );
}

#[test]
fn criterion_07_global_equilibrium() {
    let eq = &case().art.summary.equilibrium;
    let mut fails = Vec::new();
    for (&z, &f) in eq.z_m.iter().zip(&eq.force_n) {
        let rel = (f + 1900e3).abs() / 1900e3;
        if rel > 0.005 {
            fails.push(format!(
                "z = {z:.2}: axial force {:.2} kN deviates {:.2}% from -1900 kN",
                f / 1e3,
                rel * 100.0
            ));
        }
    }
    report(
        7,
        &format!(
            "axial force at three sections: {:?} kN",
            eq.force_n.map(|f| (f / 1e3 * 100.0).round() / 100.0)
        ),
        &fails,
    );
}

#[test]
fn criterion_08_symmetry_suite() {
    let modes = xmodes();
    let spec = &case().art.summary.config;
    let geom = spec.geometry::<f64>().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5d0f);
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..100 {
        let rho = geom.a + (geom.b - geom.a) * rng.random::<f64>();
        let z = geom.h / 2.0 * rng.random::<f64>();
        let th1 = std::f64::consts::TAU * rng.random::<f64>();
        let th2 = std::f64::consts::TAU * rng.random::<f64>();
        let xr = Extended::of_f64(rho);
        let dp = field::displacement(modes, xr, z).unwrap();
        let dm = field::displacement(modes, xr, -z).unwrap();
        let s3 = dp.u_3.abs().max(dm.u_3.abs()).max(f64::MIN_POSITIVE);
        let sr = dp.u_r.abs().max(dm.u_r.abs()).max(f64::MIN_POSITIVE);
        let odd = (dp.u_3 + dm.u_3).abs() / s3;
        let even = (dp.u_r - dm.u_r).abs() / sr;
        let (u1a, u2a, _) = field::displacement_cartesian(modes, xr, th1, z).unwrap();
        let (u1b, u2b, _) = field::displacement_cartesian(modes, xr, th2, z).unwrap();
        let na = u1a.hypot(u2a);
        let nb = u1b.hypot(u2b);
        let rot = (na - nb).abs() / na.max(nb).max(f64::MIN_POSITIVE);
        let r = odd.max(even).max(rot);
        worst = worst.max(r);
        if r > 1e-12 {
            fails.push(format!(
                "point {i} (rho = {rho:.4}, z = {z:.3}): residual {r:.3e} > 1e-12"
            ));
        }
    }
    report(
        8,
        &format!("parity and rotation invariance at 100 random points, worst {worst:.3e}"),
        &fails,
    );
}

#[test]
fn criterion_09_recurrence_oracle() {
    let (mat, _, _, _) = f64_problem();
    let sc = mat.scaled_coefficients();
    let mut rng = ChaCha8Rng::seed_from_u64(0x900d);
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let n = 2 * rng.random_range(1..=100u32) + 1; // odd in [3, 201]
        let prev: [f64; 4] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let direct = recurrence_step(n, prev, &sc);
        let matrix = recurrence_step_matrix(n, prev, &sc);
        let scale = matrix
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let diff = direct
            .iter()
            .zip(&matrix)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
            / scale;
        worst = worst.max(diff);
        if diff > 1e-12 {
            fails.push(format!("trial {trial} (n = {n}): deviation {diff:.3e} > 1e-12"));
        }
    }
    report(
        9,
        &format!("back-substitution vs explicit matrix over 50 random steps, worst {worst:.3e}"),
        &fails,
    );
}

#[test]
fn criterion_10_endface_traction_convergence() {
    let (mat, geom, load, _) = f64_problem();
    let modes = xmodes();
    let r5 = oracle::endface_traction_residual(&modes[..5], &mat, &geom, &load, 200).unwrap();
    let r29 = oracle::endface_traction_residual(modes, &mat, &geom, &load, 200).unwrap();
    let mut fails = Vec::new();
    if !(r29 * 2.0 <= r5) {
        fails.push(format!(
            "residual {r5:.4e} (M = 5) -> {r29:.4e} (M = 29): reduction {:.2}x < 2x",
            r5 / r29
        ));
    }
    report(
        10,
        &format!(
            "end-face traction L2 residual {r5:.3e} -> {r29:.3e} ({:.2}x)",
            r5 / r29
        ),
        &fails,
    );
}
