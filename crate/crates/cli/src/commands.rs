use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use chatter_core::describing::neg_reciprocal_over_amplitude;
use chatter_core::hb::{self, critical_mu_amplitude, critical_mu_frequency, critical_mu_power, sweep, CellStatus};
use chatter_core::lti::{log_grid, loop_tf, nyquist_locus};
use chatter_core::metrics::{empirical_crossover, measure, CrossoverConfig, Metric};
use chatter_core::sim::{simulate, steady_state_window};
use chatter_core::{ChatterError, ControllerSpec, SimConfig, TimeSeries};
use serde::Deserialize;
use serde_json::json;

use crate::args::{
    CriticalMuArgs, Format, MeasureArgs, Method, NyquistArgs, PredictArgs, SimArgs, SimulateArgs, SweepArgs,
};
use crate::error::CliError;
use crate::output::{fmt_num, fmt_opt, open_output, sidecar_path, RunManifest};

/// Worker threads for fan-out work: `CHATTER_WORKERS`, else the available cores.
fn workers() -> Result<usize, CliError> {
    match std::env::var("CHATTER_WORKERS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Usage(format!("CHATTER_WORKERS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Maps `f` over `items` on up to `n` threads; results keep input order.
fn par_map<T: Sync, R: Send>(items: &[T], n: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..n.min(items.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every slot is filled"))
        .collect()
}

fn warn_gains(spec: &ControllerSpec) {
    for w in spec.gain_warnings() {
        eprintln!("warning: {w}");
    }
}

fn sim_config(sim: &SimArgs) -> SimConfig {
    SimConfig {
        tau: sim.tau,
        horizon: sim.horizon,
        x1_initial: sim.x1_0,
        mu: sim.mu,
        divergence_threshold: sim.divergence_threshold,
        ..SimConfig::default()
    }
}

fn write_json(out: Option<&Path>, value: &impl serde::Serialize) -> Result<(), CliError> {
    let mut w = open_output(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn predict(args: &PredictArgs) -> Result<(), CliError> {
    let out = args.output.out.as_deref();
    RunManifest::new("predict", args, out, args.format.as_str())?.write()?;
    let spec = args.controller.spec();
    warn_gains(&spec);
    let r = hb::predict(&spec, args.mu)?;
    if !r.converged {
        return Err(CliError::NotConverged(format!(
            "{} at mu = {} after {} iterations, residual {:e}",
            spec.name(),
            args.mu,
            r.iterations,
            r.residual.norm()
        )));
    }
    let p = r.prediction;
    match args.format {
        Format::Json => write_json(out, &r),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(open_output(out)?);
            w.write_record(["controller", "mu", "amplitude", "omega", "power", "residual", "iterations"])?;
            w.write_record([
                spec.name().to_string(),
                fmt_num(p.mu),
                fmt_num(p.amplitude),
                fmt_num(p.omega),
                fmt_num(p.average_power),
                fmt_num(r.residual.norm()),
                r.iterations.to_string(),
            ])?;
            w.flush()?;
            Ok(())
        }
    }
}

fn mu_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(start > 0.0 && stop >= start && step > 0.0 && stop.is_finite()) {
        return Err(CliError::Usage(format!(
            "mu range needs 0 < start <= stop and step > 0, got {start}:{stop}:{step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

pub fn sweep_cmd(args: &SweepArgs) -> Result<(), CliError> {
    let out = args.output.out.as_deref();
    RunManifest::new("sweep", args, out, "csv")?.write()?;
    if args.controllers.is_empty() {
        return Err(CliError::Usage("no controllers given".into()));
    }
    let grid = mu_grid(args.mu_start, args.mu_stop, args.mu_step)?;
    let specs: Vec<ControllerSpec> = args.controllers.iter().map(|&c| args.gains.spec(c)).collect();
    for spec in &specs {
        spec.validate()?;
        warn_gains(spec);
    }
    let per_spec = par_map(&specs, workers()?, |spec| sweep(std::slice::from_ref(spec), &grid));

    let mut w = csv::Writer::from_writer(open_output(out)?);
    w.write_record(["controller", "mu", "amplitude", "omega", "power", "status"])?;
    for cell in per_spec.iter().flatten() {
        let p = match (cell.status, &cell.result) {
            (CellStatus::Ok, Some(r)) => Some(r.prediction),
            _ => None,
        };
        w.write_record([
            cell.controller.name().to_string(),
            fmt_num(cell.mu),
            fmt_opt(p.map(|p| p.amplitude)),
            fmt_opt(p.map(|p| p.omega)),
            fmt_opt(p.map(|p| p.average_power)),
            cell.status.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<(), CliError> {
    let Some(out) = args.output.out.as_deref() else {
        return Err(CliError::Usage("simulate needs --out for the trajectory and its sidecar".into()));
    };
    RunManifest::new("simulate", args, Some(out), "csv")?.write()?;
    if args.every == 0 {
        return Err(CliError::Usage("--every must be at least 1".into()));
    }
    let spec = args.controller.spec();
    warn_gains(&spec);
    let ts = simulate(&spec, &sim_config(&args.sim))?;

    let mut w = csv::Writer::from_writer(open_output(Some(out))?);
    w.write_record(["t", "x1", "x1dot", "u", "sigma"])?;
    for i in (0..ts.len()).step_by(args.every) {
        w.write_record([
            fmt_num(ts.t[i]),
            fmt_num(ts.x1[i]),
            fmt_num(ts.x1_dot[i]),
            fmt_num(ts.u[i]),
            fmt_num(ts.sigma[i]),
        ])?;
    }
    w.flush()?;
    let sidecar = json!({
        "controller": spec,
        "samples": ts.len(),
        "tau": ts.tau,
        "diverged_at": ts.diverged_at,
    });
    std::fs::write(sidecar_path(out), serde_json::to_string_pretty(&sidecar)? + "\n")?;
    match ts.diverged_at {
        Some(at) => Err(ChatterError::Diverged { at }.into()),
        None => Ok(()),
    }
}

#[derive(Debug, Deserialize)]
struct Row {
    t: f64,
    x1: f64,
    x1dot: f64,
    u: f64,
    sigma: f64,
}

#[derive(Debug, Deserialize)]
struct Sidecar {
    diverged_at: Option<f64>,
}

fn read_trajectory(path: &Path) -> Result<TimeSeries, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let rows = reader
        .deserialize::<Row>()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if rows.len() < 2 {
        return Err(CliError::Usage(format!("{}: need at least two samples", path.display())));
    }
    let mut ts = TimeSeries::with_capacity(rows[1].t - rows[0].t, rows.len());
    for r in rows {
        ts.push(r.t, r.x1, r.x1dot, r.u, r.sigma);
    }
    let sidecar = sidecar_path(path);
    if sidecar.exists() {
        let meta: Sidecar = serde_json::from_str(&std::fs::read_to_string(&sidecar)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", sidecar.display())))?;
        ts.diverged_at = meta.diverged_at;
    }
    Ok(ts)
}

pub fn measure_cmd(args: &MeasureArgs) -> Result<(), CliError> {
    let out = args.output.out.as_deref();
    RunManifest::new("measure", args, out, "json")?.write()?;
    let ts = match &args.input {
        Some(path) => read_trajectory(path)?,
        None => {
            let spec = args.controller.spec();
            warn_gains(&spec);
            simulate(&spec, &sim_config(&args.sim))?
        }
    };
    let window = steady_state_window(&ts, args.transient_fraction, None)?;
    let m = measure(&window, args.power_mode.into())?;
    write_json(out, &m)
}

fn bracket(name: &str, v: &[f64]) -> Result<(f64, f64), CliError> {
    match v {
        [lo, hi] => Ok((*lo, *hi)),
        _ => Err(CliError::Usage(format!("--{name} takes exactly two values lo,hi"))),
    }
}

pub fn critical_mu_cmd(args: &CriticalMuArgs) -> Result<(), CliError> {
    let out = args.output.out.as_deref();
    RunManifest::new("critical-mu", args, out, "json")?.write()?;
    let g = &args.gains;
    let amplitude = critical_mu_amplitude(g.k, g.k1, g.k2, g.b)?;
    let frequency = critical_mu_frequency(g.k1, g.k2, g.b)?;
    let power = critical_mu_power(g.k, g.k1, g.k2, g.b)?;
    if let Some(note) = &amplitude.note {
        eprintln!("note: {note}");
    }
    let hb_report = json!({
        "amplitude": amplitude,
        "frequency": { "mu_values": [frequency] },
        "power": power,
    });
    let report = match args.method {
        Method::Hb => json!({ "method": "hb", "hb": hb_report }),
        Method::Simulation => {
            let lsv = ControllerSpec::lsv(g.k, g.b).with_delta(g.delta);
            let stc = ControllerSpec::stc(g.k1, g.k2).with_delta(g.delta);
            let cfg = CrossoverConfig {
                sim: SimConfig {
                    tau: args.tau,
                    horizon: args.horizon,
                    x1_initial: args.x1_0,
                    divergence_threshold: args.divergence_threshold,
                    ..SimConfig::default()
                },
                transient_fraction: args.transient_fraction,
                tol: args.tol,
            };
            let jobs = [
                (Metric::Amplitude, bracket("amplitude-bracket", &args.amplitude_bracket)?),
                (Metric::Frequency, bracket("frequency-bracket", &args.frequency_bracket)?),
                (Metric::Power, bracket("power-bracket", &args.power_bracket)?),
            ];
            let found = par_map(&jobs, workers()?, |&(metric, br)| {
                empirical_crossover(metric, &lsv, &stc, br, &cfg)
            });
            let mut map = serde_json::Map::new();
            map.insert("method".into(), json!("simulation"));
            for ((metric, _), r) in jobs.iter().zip(found) {
                let c = r.map_err(|e| CliError::Io(format!("{} crossover: {e}", metric.as_str())))?;
                map.insert(metric.as_str().into(), serde_json::to_value(c)?);
            }
            map.insert("hb".into(), hb_report);
            serde_json::Value::Object(map)
        }
    };
    write_json(out, &report)
}

pub fn nyquist_cmd(args: &mut NyquistArgs) -> Result<(), CliError> {
    if args.points == 0 || args.amplitude_points == 0 {
        return Err(CliError::Usage("empty grid: --points and --amplitude-points must be positive".into()));
    }
    let spec = args.controller.spec();
    if args.df_omegas.is_empty() {
        let r = hb::predict(&spec, args.mu).map_err(|e| {
            CliError::Usage(format!("no predicted frequency to trace -1/N at ({e}); pass --df-omegas"))
        })?;
        args.df_omegas = vec![r.prediction.omega];
    }
    let out = args.output.out.as_deref();
    RunManifest::new("nyquist", &*args, out, "csv")?.write()?;

    let omegas = log_grid(args.omega_min, args.omega_max, args.points)?;
    let amplitudes = log_grid(args.amplitude_min, args.amplitude_max, args.amplitude_points)?;
    let locus = nyquist_locus(&loop_tf(args.mu)?, &omegas)?;

    let mut w = csv::Writer::from_writer(open_output(out)?);
    w.write_record(["curve", "param1", "param2", "re", "im"])?;
    for p in locus {
        w.write_record(["w".to_string(), fmt_num(p.omega), String::new(), fmt_num(p.value.re), fmt_num(p.value.im)])?;
    }
    for &omega in &args.df_omegas {
        for p in neg_reciprocal_over_amplitude(&spec, &amplitudes, omega)? {
            let (re, im) = match p.value {
                Ok(z) => (fmt_num(z.re), fmt_num(z.im)),
                Err(_) => (String::new(), String::new()),
            };
            w.write_record([
                "neg_inv_n".to_string(),
                fmt_num(p.amplitude),
                fmt_num(p.omega),
                re,
                im,
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_stop() {
        let g = mu_grid(0.01, 0.16, 0.01).unwrap();
        assert_eq!(g.len(), 16);
        assert!((g[15] - 0.16).abs() < 1e-12);
        assert_eq!(mu_grid(0.05, 0.05, 0.01).unwrap(), vec![0.05]);
        assert!(mu_grid(0.1, 0.05, 0.01).is_err());
    }

    #[test]
    fn par_map_keeps_order() {
        let v: Vec<usize> = (0..50).collect();
        assert_eq!(par_map(&v, 4, |x| x * 2), v.iter().map(|x| x * 2).collect::<Vec<_>>());
    }
}
