//! One function per subcommand. Each writes its files through [`Artifacts`]
//! and returns the name recorded in the manifest.

use std::f64::consts::PI;

use serde_json::{json, Value};
use weyllab_core::model::{bulk_bands, weyl_points, SyntheticMomentum, WeylLabel, WeylPoint};
use weyllab_core::openchain::{density_profile, edge_spectrum, solve_open_chain, symmetric_grid, ZERO_ENERGY_TOL};
use weyllab_core::spectroscopy::{fermi_arc_table, reflection_spectrum, winding_measurement, ArcTableRow, WindingLoop};
use weyllab_core::topology::{berry_field_numeric, chern_mapped_torus, chern_sphere, linearized_curvature};
use weyllab_core::ModelParams;

use crate::config::Config;
use crate::error::CliError;
use crate::output::{num, Artifacts};

/// `points` samples of [−π, π], endpoints included.
fn axis_grid(key: &str, points: usize) -> Result<Vec<f64>, CliError> {
    if points < 2 {
        return Err(CliError::Usage(format!("{key} must be at least 2, got {points}")));
    }
    let m = (points - 1) as f64;
    Ok((0..points).map(|i| -PI + 2.0 * PI * i as f64 / m).collect())
}

fn point_of(label: WeylLabel, points: &[WeylPoint; 4]) -> &WeylPoint {
    &points[WeylLabel::ALL.iter().position(|l| *l == label).unwrap()]
}

fn pair(e: Option<(f64, f64)>) -> Value {
    e.map_or(Value::Null, |(a, b)| json!([a, b]))
}

pub fn bulk_bands_cmd(cfg: &Config, out: &mut Artifacts) -> Result<(), CliError> {
    let p = cfg.model()?;
    let kx = cfg.real("kx")?;
    let grid = axis_grid("grid", cfg.count("grid")?)?;
    let rows = grid.iter().flat_map(|&t1| {
        grid.iter().map(move |&t2| {
            let (lo, hi) = bulk_bands(&SyntheticMomentum::new(kx, t1, t2), &p);
            vec![num(t1), num(t2), num(lo), num(hi)]
        })
    });
    out.csv(
        "bulk_bands.csv",
        &["theta1", "theta2", "E_minus", "E_plus"],
        rows.collect::<Vec<_>>(),
    )
}

pub fn weyl_points_cmd(cfg: &Config, out: &mut Artifacts) -> Result<(), CliError> {
    let p = cfg.model()?;
    let points = weyl_points(&p)?;
    let list: Vec<Value> = WeylLabel::ALL
        .iter()
        .zip(&points)
        .map(|(l, w)| {
            json!({
                "label": l.to_string(),
                "location": w.location.as_array(),
                "velocity": w.velocity,
                "det_velocity": w.det_velocity(),
                "chirality": w.chirality,
            })
        })
        .collect();
    out.json("weyl_points.json", &json!({ "weyl_points": list }))
}

pub fn chern_cmd(cfg: &Config, out: &mut Artifacts) -> Result<(), CliError> {
    let p = cfg.model()?;
    let (radius, mesh) = (cfg.real("radius")?, cfg.count("mesh")?);
    let (theta_r, grid) = (cfg.real("theta_r")?, cfg.count("torus_grid")?);
    let points = weyl_points(&p)?;
    let mut charges = Vec::new();
    let mut sum = 0;
    let mut agree = true;
    for (l, w) in WeylLabel::ALL.iter().zip(&points) {
        let s = chern_sphere(w, radius, mesh, &p)?;
        let t = chern_mapped_torus(w, theta_r, grid, &p)?;
        let ok = t.raw == 2 * s.value;
        agree &= ok;
        sum += s.value;
        charges.push(json!({
            "label": l.to_string(),
            "sphere": { "value": s.value, "raw": s.raw, "mesh": s.mesh },
            "torus": { "raw": t.raw, "value": t.value, "flux": t.flux, "grid": t.grid },
            "agree": ok,
        }));
    }
    out.json(
        "chern.json",
        &json!({ "charges": charges, "sum": sum, "methods_agree": agree, "orientation": "outward" }),
    )?;
    if !agree {
        return Err(CliError::Inconsistent(
            "sphere and mapped-torus Chern numbers disagree".into(),
        ));
    }
    Ok(())
}

pub fn berry_field_cmd(cfg: &Config, out: &mut Artifacts) -> Result<(), CliError> {
    let p = cfg.model()?;
    let step = cfg.real("curvature_step")?;
    let extent = cfg.real("field_extent")?;
    let m = cfg.count("field_points")?;
    if m < 2 || !(extent > 0.0) {
        return Err(CliError::Usage(
            "field_points must be at least 2 and field_extent positive".into(),
        ));
    }
    let axis: Vec<f64> = (0..m)
        .map(|i| -extent + 2.0 * extent * i as f64 / (m - 1) as f64)
        .collect();
    let points = weyl_points(&p)?;
    let mut rows = Vec::new();
    for label in cfg.weyl_labels()? {
        let w = point_of(label, &points);
        for &a in &axis {
            for &b in &axis {
                for &c in &axis {
                    let q = [a, b, c];
                    if q.iter().all(|x| x.abs() < 1e-12) {
                        continue;
                    }
                    let f = berry_field_numeric(&w.location.offset(q), step, &p)?.curvature;
                    let lin = linearized_curvature(w, q)?;
                    let mut row = vec![label.to_string()];
                    row.extend(q.iter().chain(&f).chain(&lin).map(|x| num(*x)));
                    rows.push(row);
                }
            }
        }
    }
    let header = [
        "weyl",
        "q_kx",
        "q_theta1",
        "q_theta2",
        "F_kx",
        "F_theta1",
        "F_theta2",
        "Flin_kx",
        "Flin_theta1",
        "Flin_theta2",
    ];
    out.csv("berry_field.csv", &header, rows)
}

pub fn edge_spectrum_cmd(cfg: &Config, out: &mut Artifacts) -> Result<(), CliError> {
    let p = cfg.model()?;
    let grid = axis_grid("edge_points", cfg.count("edge_points")?)?;
    let pts = edge_spectrum(&grid, &grid, &p)?;
    let rows = pts.iter().flat_map(|pt| {
        pt.eigenvalues
            .iter()
            .zip(&pt.labels)
            .enumerate()
            .map(move |(i, (e, l))| vec![num(pt.theta1), num(pt.theta2), i.to_string(), num(*e), l.to_string()])
    });
    out.csv(
        "edge_spectrum.csv",
        &["theta1", "theta2", "state", "energy", "label"],
        rows.collect::<Vec<_>>(),
    )?;
    if cfg.flag("edge_densities")? {
        let rows = pts.iter().flat_map(|pt| {
            pt.states.iter().enumerate().flat_map(move |(i, v)| {
                density_profile(v)
                    .site_densities
                    .into_iter()
                    .enumerate()
                    .map(move |(s, d)| {
                        vec![
                            num(pt.theta1),
                            num(pt.theta2),
                            i.to_string(),
                            (s + 1).to_string(),
                            num(d),
                        ]
                    })
            })
        });
        out.csv(
            "edge_density.csv",
            &["theta1", "theta2", "state", "site", "density"],
            rows.collect::<Vec<_>>(),
        )?;
    }
    Ok(())
}

pub fn density_cmd(cfg: &Config, out: &mut Artifacts) -> Result<(), CliError> {
    let p = cfg.model()?;
    let pt = solve_open_chain(cfg.real("theta1")?, cfg.real("theta2")?, ZERO_ENERGY_TOL, &p)?;
    let mut rows = Vec::new();
    for (i, v) in pt.states.iter().enumerate() {
        for (s, d) in density_profile(v).site_densities.iter().enumerate() {
            rows.push(vec![
                i.to_string(),
                num(pt.eigenvalues[i]),
                pt.labels[i].to_string(),
                (s + 1).to_string(),
                num(*d),
            ]);
        }
    }
    out.csv("density.csv", &["state", "energy", "label", "site", "density"], rows)
}

pub fn reflection_cmd(cfg: &Config, out: &mut Artifacts) -> Result<(), CliError> {
    let p = cfg.model()?;
    let grid = symmetric_grid(cfg.real("delta0_window")?, cfg.real("delta0_step")?)?;
    let trace = reflection_spectrum(cfg.real("theta1")?, cfg.real("theta2")?, &grid, &p)?;
    let (refl, emis) = (trace.reflectance(), trace.emission());
    let rows = (0..trace.len()).map(|i| {
        let r = trace.r_values[i];
        vec![num(grid[i]), num(r.re), num(r.im), num(refl[i]), num(emis[i])]
    });
    out.csv(
        "reflection.csv",
        &["delta0", "r_re", "r_im", "reflectance", "emission"],
        rows.collect::<Vec<_>>(),
    )
}

pub fn winding_cmd(cfg: &Config, out: &mut Artifacts) -> Result<(), CliError> {
    let p = cfg.model()?;
    let lp = WindingLoop {
        theta_r: cfg.real("theta_r")?,
        samples: cfg.count("samples")?,
        start: cfg.real("loop_start")?,
    };
    let points = weyl_points(&p)?;
    let mut loops = Vec::new();
    for label in cfg.weyl_labels()? {
        let w = point_of(label, &points);
        let m = winding_measurement(w, &lp, &p)?;
        let phases = m.trace.phases();
        let (t1w, t2w) = (w.location.theta1(), w.location.theta2());
        let rows = m.trace.parameter_samples.iter().enumerate().map(|(i, &th)| {
            let r = m.trace.r_values[i];
            vec![
                num(th),
                num(t1w + lp.theta_r * th.cos()),
                num(t2w + lp.theta_r * th.sin()),
                num(r.re),
                num(r.im),
                num(phases[i]),
            ]
        });
        let name = format!("winding_{label}.csv");
        out.csv(
            &name,
            &["theta", "theta1", "theta2", "r_re", "r_im", "phase"],
            rows.collect::<Vec<_>>(),
        )?;
        loops.push(json!({ "weyl": label.to_string(), "winding": m.winding, "raw": m.raw, "trace": name }));
    }
    out.json("winding.json", &json!({ "loops": loops }))
}

fn arc_rows(cfg: &Config, sizes_key: &str) -> Result<(ModelParams, Vec<f64>, Vec<ArcTableRow>), CliError> {
    let p = cfg.model()?;
    let sizes = cfg.sizes(sizes_key)?;
    let grid = symmetric_grid(cfg.real("theta1_extent")?, cfg.real("theta1_step")?)?;
    let rows = fermi_arc_table(&sizes, cfg.real("theta2")?, &grid, cfg.real("delta0_window")?, &p)?;
    Ok((p, grid, rows))
}

fn check_consistent(rows: &[ArcTableRow]) -> Result<(), CliError> {
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.detection.consistent)
        .map(|r| r.n.to_string())
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Inconsistent(format!(
            "reflection scan and diagonalization disagree on the arc for N = {}",
            bad.join(", ")
        )))
    }
}

pub fn fermi_arc_cmd(cfg: &Config, out: &mut Artifacts) -> Result<(), CliError> {
    let (p, grid, rows) = arc_rows(cfg, "arc_sizes")?;
    let theta2 = cfg.real("theta2")?;
    let detunings = symmetric_grid(cfg.real("delta0_window")?, weyllab_core::spectroscopy::DETUNING_STEP)?;
    let mut spectra = Vec::new();
    for row in &rows {
        let pn = p.with_n(row.n);
        for &t1 in &grid {
            let trace = reflection_spectrum(t1, theta2, &detunings, &pn)?;
            let emission = trace.emission();
            for (i, r) in trace.r_values.iter().enumerate() {
                spectra.push(vec![
                    row.n.to_string(),
                    num(t1),
                    num(detunings[i]),
                    num(r.re),
                    num(r.im),
                    num(emission[i]),
                ]);
            }
        }
    }
    out.csv(
        "fermi_arc_spectra.csv",
        &["N", "theta1", "delta0", "r_re", "r_im", "emission"],
        spectra,
    )?;
    let list: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "N": r.n,
                "theta1c": pair(r.detection.endpoints),
                "oracle_theta1c": pair(r.detection.oracle.endpoints),
                "consistent": r.detection.consistent,
            })
        })
        .collect();
    out.json("fermi_arc.json", &json!({ "theta2": theta2, "arcs": list }))?;
    check_consistent(&rows)
}

pub fn table1_cmd(cfg: &Config, out: &mut Artifacts) -> Result<(), CliError> {
    let (_, _, rows) = arc_rows(cfg, "table_sizes")?;
    let csv_rows = rows
        .iter()
        .map(|r| vec![r.n.to_string(), r.theta1c().map(num).unwrap_or_default()]);
    out.csv("table1.csv", &["N", "theta1c"], csv_rows.collect::<Vec<_>>())?;
    check_consistent(&rows)
}
