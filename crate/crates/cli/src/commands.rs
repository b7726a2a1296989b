//! `simulate`, `compare` and `orbit`.

use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symtop::dynamics::{
    commutation_residual, full_hamiltonian_field, reduced_hamiltonian_field, simulate,
};
use symtop::orbits::{casimirs, coadjoint, magnetic_form, same_orbit_witness, witness_residual};
use symtop::phase::{uniform_box, uniform_rotation, SpaceId};
use symtop::reduction::project_chart;
use symtop::{SE3Element, Se3DualPoint, Trajectory, Vec3};

use crate::config::{self, Run};
use crate::CliError;

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 17] = [
    "t",
    "x1",
    "x2",
    "x3",
    "p1",
    "p2",
    "p3",
    "nu1",
    "nu2",
    "nu3",
    "pi1",
    "pi2",
    "pi3",
    "energy",
    "C1",
    "C2",
    "ortho_defect",
];

/// Witness residual accepted by the orbit report.
pub const WITNESS_TOL: f64 = 1e-9;

/// 17 significant digits.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn run_simulation(run: &Run) -> Result<Trajectory, CliError> {
    let h = match run.space {
        SpaceId::CotSE3 => full_hamiltonian_field(&run.body, &run.potential),
        _ => reduced_hamiltonian_field(&run.body, &run.potential),
    };
    Ok(simulate(run.space, &h, &run.z0, &run.opts)?)
}

/// Writes a trajectory as CSV, projecting full states to `(x, p, ν, π)`.
pub fn write_csv<W: Write>(tr: &Trajectory, w: W) -> Result<(), CliError> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(CSV_COLUMNS)?;
    for s in &tr.samples {
        let reduced = match tr.space {
            SpaceId::Reduced => s.z.clone(),
            space => project_chart(space, &s.z)?,
        };
        let m = &s.monitors;
        let row = std::iter::once(s.t)
            .chain(reduced)
            .chain([m.energy, m.c1, m.c2, m.ortho_defect])
            .map(fmt);
        csv.write_record(row)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn cmd_simulate(
    config_path: &Path,
    out_path: &Path,
    report: &mut dyn Write,
) -> Result<(), CliError> {
    let run = config::load(config_path)?;
    let tr = run_simulation(&run)?;
    let file = std::fs::File::create(out_path)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_path.display())))?;
    write_csv(&tr, std::io::BufWriter::new(file))?;
    writeln!(report, "space: {}", run.space)?;
    writeln!(
        report,
        "steps: {}  samples: {}",
        run.opts.steps()?,
        tr.samples.len()
    )?;
    writeln!(report, "final t: {}", fmt(tr.last().t))?;
    writeln!(report, "energy drift: {:.3e}", tr.energy_drift())?;
    writeln!(report, "C1 drift: {:.3e}", tr.c1_drift())?;
    writeln!(report, "C2 drift: {:.3e}", tr.c2_drift())?;
    writeln!(
        report,
        "max orthogonality defect: {:.3e}",
        tr.max_ortho_defect()
    )?;
    writeln!(report, "wrote {}", out_path.display())?;
    Ok(())
}

pub fn cmd_compare(config_path: &Path, tol: f64, report: &mut dyn Write) -> Result<(), CliError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Validation(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let run = config::load(config_path)?;
    let s = run.full_state()?;
    let r = commutation_residual(&s, &run.body, &run.potential, &run.opts)?;
    let pass = r <= tol;
    writeln!(
        report,
        "commutation residual: {r:.3e} (tol {tol:.1e}) {}",
        if pass { "PASS" } else { "FAIL" }
    )?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "commutation residual {r:.3e} exceeds {tol:.1e}"
        )))
    }
}

/// Level, same-level samples with verified witnesses, and magnetic-form
/// values for the orbit through `(ν, π)`.
pub fn cmd_orbit(
    nu: Vec3,
    pi: Vec3,
    count: usize,
    seed: u64,
    report: &mut dyn Write,
) -> Result<(), CliError> {
    if !(nu.is_finite() && pi.is_finite()) {
        return Err(CliError::Validation("nu and pi must be finite".into()));
    }
    if nu.norm() == 0.0 {
        return Err(CliError::Validation(
            "nu = 0 lies on a point orbit; only orbits with |nu| > 0 are reported".into(),
        ));
    }
    let q = Se3DualPoint::new(nu, pi);
    let level = casimirs(&q);
    writeln!(
        report,
        "level: C1 = {}, C2 = {}",
        fmt(level.c1),
        fmt(level.c2)
    )?;
    // The magnetic form lives on the unit sphere; rescale the point onto it.
    let scale = level.c1.sqrt().recip();
    let c2_unit = level.c2 * scale * scale;
    if c2_unit == 0.0 {
        writeln!(report, "C2 = 0: the magnetic term vanishes on this orbit")?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    writeln!(
        report,
        "{:>4}  {:>24} {:>24} {:>24}  {:>10}  {:>12}",
        "k", "nu", "", "", "witness", "B(u,v)"
    )?;
    for k in 0..count {
        let g = SE3Element::new(
            uniform_box::<f64, _>(&mut rng) * 2.0,
            uniform_rotation(&mut rng),
        );
        let qk = coadjoint(&g, &q);
        let w = same_orbit_witness(&q, &qk)?;
        let r = witness_residual(&w, &q, &qk);
        worst = worst.max(r);

        let nu_unit = qk.nu * scale;
        let tangent = |rng: &mut ChaCha8Rng| {
            let a: Vec3 = uniform_box(rng);
            a - nu_unit * a.dot(&nu_unit)
        };
        let (u, v) = (tangent(&mut rng), tangent(&mut rng));
        let b = magnetic_form(&nu_unit, &u, &v, c2_unit)? + 0.0;
        writeln!(
            report,
            "{k:>4}  {:>24} {:>24} {:>24}  {r:>10.3e}  {b:>12.5e}",
            fmt(qk.nu.x()),
            fmt(qk.nu.y()),
            fmt(qk.nu.z())
        )?;
    }
    let pass = worst <= WITNESS_TOL;
    writeln!(
        report,
        "witnesses: {count} verified, max residual {worst:.3e} (tol {WITNESS_TOL:.0e}) {}",
        if pass { "PASS" } else { "FAIL" }
    )?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "witness residual {worst:.3e} exceeds {WITNESS_TOL:.0e}"
        )))
    }
}
