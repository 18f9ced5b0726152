use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qsynth_cli::manifest::RunManifest;
use qsynth_cli::report::{write_csv, CompileRow, ScanRecord, VqeRow, COMPILE_CSV, SCAN_CSV, VQE_CSV};
use qsynth_cli::{config, load_hamiltonian, parallel_map, plan_trials, plot, state_from_json, state_to_json};
use qsynth_core::fermion::{build_hamiltonian, jordan_wigner, IntegralTable};
use qsynth_core::optimizer::Trace;
use qsynth_core::tasks::{
    exact_propagator, ground_state_oracle, non_triviality, run_compile_trial, run_vqe_trial, schmidt_measure,
    CompileMode, SubspaceSpec, TaskConfig, VqeCost,
};
use qsynth_core::trotter::{self, DEFAULT_DT_GRID};
use qsynth_core::{Circuit64, Statevector64};

#[derive(Parser)]
#[command(name = "qsynth", version, about = "Variational circuit synthesis for molecular Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map an integral file to a Pauli-sum file.
    Jw {
        #[arg(long)]
        integrals: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ground energy, and propagator data when --dt is given.
    Exact {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        dt: Option<f64>,
        /// Restrict the ground state to this particle number.
        #[arg(long)]
        occupation: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the ground state here.
        #[arg(long)]
        state_out: Option<PathBuf>,
    },
    /// Adaptive VQE trials from the k-particle reference state.
    Vqe {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        occupation: usize,
        /// Label for the molecule column; defaults to the file stem.
        #[arg(long)]
        molecule: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Trotter circuits over a grid of durations, orders and step counts.
    TrotterScan {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long, value_delimiter = ',')]
        dt_grid: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        orders: Vec<u8>,
        /// Largest step count per order, in the order of --orders.
        #[arg(long, value_delimiter = ',')]
        max_steps: Option<Vec<usize>>,
        #[arg(long, default_value_t = 2)]
        occupation: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        omit_timing: bool,
    },
    /// Compile exp(-i dt H) into a short circuit.
    Compile {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        dt: f64,
        #[arg(long, default_value = "subspace")]
        mode: CompileMode,
        #[arg(long, default_value_t = 2)]
        occupation: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Schmidt measure in ebits.
    Schmidt {
        #[arg(long, conflicts_with = "from_vqe", required_unless_present = "from_vqe")]
        state: Option<PathBuf>,
        /// A VQE output directory; uses its best state.
        #[arg(long)]
        from_vqe: Option<PathBuf>,
        /// Qubits in the low half; defaults to n/2.
        #[arg(long)]
        cut: Option<usize>,
        #[arg(long, default_value_t = 1e-10)]
        rank_tol: f64,
    },
    /// Aggregate result CSVs into plot-ready tables.
    PlotData {
        #[arg(long)]
        results: PathBuf,
        /// Defaults to RESULTS/plots.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Base seed; trial i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Re-run only the trial with this seed.
    #[arg(long)]
    trial_seed: Option<u64>,
    /// key = value file of search and optimizer settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// key=value override, applied after --config.
    #[arg(long = "set")]
    overrides: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write an optimizer trace per trial.
    #[arg(long)]
    trace: bool,
    /// Zero the wall-clock columns and manifest timestamp.
    #[arg(long)]
    omit_timing: bool,
}

impl RunArgs {
    fn task_config(&self, mut cfg: TaskConfig<f64>) -> Result<TaskConfig<f64>> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            config::apply_text(&mut cfg, &text).with_context(|| format!("in {}", path.display()))?;
        }
        for pair in &self.overrides {
            config::apply_override(&mut cfg, pair)?;
        }
        cfg.search.validate()?;
        cfg.optimizer.validate()?;
        Ok(cfg)
    }

    fn manifest(&self, command: &str, cfg: &TaskConfig<f64>, inputs: &[&Path]) -> Result<RunManifest> {
        let mut m = RunManifest::new(command, config::snapshot(cfg), self.seed, self.omit_timing);
        for p in inputs {
            m.add_input(p)?;
        }
        if let Some(path) = &self.config {
            m.add_input(path)?;
        }
        Ok(m)
    }

    fn prepare_out(&self) -> Result<()> {
        fs::create_dir_all(self.out.join("circuits"))?;
        if self.trace {
            fs::create_dir_all(self.out.join("traces"))?;
        }
        Ok(())
    }

    fn write_trial(&self, trial: usize, circuit: &Circuit64, trace: &Trace) -> Result<()> {
        fs::write(self.out.join("circuits").join(format!("trial_{trial}.json")), circuit.to_json() + "\n")?;
        if self.trace {
            fs::write(self.out.join("traces").join(format!("trial_{trial}.csv")), trace.to_csv())?;
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Jw { integrals, out } => {
            let file = fs::File::open(&integrals).with_context(|| format!("opening {}", integrals.display()))?;
            let table = IntegralTable::<f64>::read(std::io::BufReader::new(file))?;
            let h = jordan_wigner(&build_hamiltonian(&table))?;
            fs::write(&out, h.to_text()).with_context(|| format!("writing {}", out.display()))?;
            println!("{} terms on {} qubits -> {}", h.len(), h.n(), out.display());
            Ok(())
        }
        Command::Exact { hamiltonian, dt, occupation, seed, state_out } => {
            exact(&hamiltonian, dt, occupation, seed, state_out.as_deref())
        }
        Command::Vqe { hamiltonian, occupation, molecule, run } => vqe(&hamiltonian, occupation, molecule, &run),
        Command::TrotterScan { hamiltonian, dt_grid, orders, max_steps, occupation, out, omit_timing } => {
            trotter_scan(&hamiltonian, dt_grid, &orders, max_steps, occupation, &out, omit_timing)
        }
        Command::Compile { hamiltonian, dt, mode, occupation, run } => compile(&hamiltonian, dt, mode, occupation, &run),
        Command::Schmidt { state, from_vqe, cut, rank_tol } => {
            let path = match (state, from_vqe) {
                (Some(p), _) => p,
                (None, Some(dir)) => dir.join("best_state.json"),
                (None, None) => bail!("pass --state or --from-vqe"),
            };
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let psi = state_from_json(&text)?;
            let cut = cut.unwrap_or(psi.n() / 2);
            println!("{}", schmidt_measure(&psi, cut, rank_tol)?);
            Ok(())
        }
        Command::PlotData { results, out } => {
            let out = out.unwrap_or_else(|| results.join("plots"));
            for p in plot::emit_plot_data(&results, &out)? {
                println!("{}", p.display());
            }
            Ok(())
        }
    }
}

fn exact(path: &Path, dt: Option<f64>, occupation: Option<usize>, seed: u64, state_out: Option<&Path>) -> Result<()> {
    let h = load_hamiltonian(path)?;
    let (energy, psi) = ground_state_oracle(&h, occupation, seed)?;
    println!("qubits: {}", h.n());
    println!("terms: {}", h.len());
    println!("ground_energy: {energy}");
    if let Some(out) = state_out {
        fs::write(out, state_to_json(&psi) + "\n")?;
    }
    if let Some(dt) = dt {
        let target = exact_propagator(&h, dt)?;
        let u = &target.u;
        let unitarity = u.adjoint().matmul(u).sub(&qsynth_core::CMatrix64::identity(u.rows())).max_abs();
        println!("dt: {dt}");
        println!("unitarity_error: {unitarity:e}");
        println!("non_triviality_full: {}", non_triviality(&h, dt, &SubspaceSpec::full(h.n())?)?);
        if let Some(k) = occupation {
            println!("non_triviality_subspace: {}", non_triviality(&h, dt, &SubspaceSpec::occupation(h.n(), k)?)?);
        }
    }
    Ok(())
}

fn vqe(path: &Path, occupation: usize, molecule: Option<String>, run: &RunArgs) -> Result<()> {
    let h = load_hamiltonian(path)?;
    let cfg = run.task_config(TaskConfig::vqe())?;
    let molecule = molecule.unwrap_or_else(|| path.file_stem().map_or("molecule".into(), |s| s.to_string_lossy().into()));
    let plan = plan_trials(run.trials, run.seed, run.trial_seed)?;
    run.prepare_out()?;
    run.manifest("vqe", &cfg, &[path])?.write(&run.out)?;

    let cost = VqeCost::with_occupation(&h, occupation)?;
    let (exact, _) = ground_state_oracle(&h, Some(occupation), run.seed)?;
    let results = parallel_map(run.jobs, &plan, |&(t, s)| run_vqe_trial(&cost, exact, &cfg, t, s, run.trace));

    let mut rows = Vec::new();
    let mut best: Option<(bool, usize, f64, Circuit64)> = None;
    for (&(t, s), res) in plan.iter().zip(results) {
        match res {
            Ok(r) => {
                run.write_trial(t, &r.circuit, &r.trace)?;
                let key = (r.success, r.gate_count, r.energy);
                let better = best.as_ref().is_none_or(|b| {
                    (key.0 && !b.0) || (key.0 == b.0 && (if key.0 { (key.1, key.2) < (b.1, b.2) } else { key.2 < b.2 }))
                });
                if better {
                    best = Some((key.0, key.1, key.2, r.circuit.clone()));
                }
                rows.push(VqeRow::from_report(&molecule, &r, run.omit_timing));
            }
            Err(e) => {
                eprintln!("trial {t} (seed {s}) failed: {e}");
                rows.push(VqeRow::failed(&molecule, t, s));
            }
        }
    }
    write_csv(&run.out.join(VQE_CSV), &rows)?;
    let Some((_, gates, energy, circuit)) = best else {
        bail!("every trial failed");
    };
    fs::write(run.out.join("best.circuit.json"), circuit.to_json() + "\n")?;
    let reference = Statevector64::basis(h.n(), (1usize << occupation) - 1)?;
    fs::write(run.out.join("best_state.json"), state_to_json(&circuit.run_current(&reference)?) + "\n")?;
    let successes = rows.iter().filter(|r| r.success).count();
    println!(
        "exact {exact:.10}  best {energy:.10}  gates {gates}  successes {successes}/{}  -> {}",
        rows.len(),
        run.out.display()
    );
    Ok(())
}

fn compile(path: &Path, dt: f64, mode: CompileMode, occupation: usize, run: &RunArgs) -> Result<()> {
    let h = load_hamiltonian(path)?;
    let cfg = run.task_config(TaskConfig::compile())?;
    let plan = plan_trials(run.trials, run.seed, run.trial_seed)?;
    run.prepare_out()?;
    let mut manifest = run.manifest("compile", &cfg, &[path])?;
    manifest.config.insert("dt".into(), dt.to_string());
    manifest.config.insert("mode".into(), mode.to_string());
    manifest.config.insert("occupation".into(), occupation.to_string());
    manifest.write(&run.out)?;

    let target = exact_propagator(&h, dt)?;
    let sector = SubspaceSpec::occupation(h.n(), occupation)?;
    let results =
        parallel_map(run.jobs, &plan, |&(t, s)| run_compile_trial(&target, mode, &sector, &cfg, t, s, run.trace));

    let mut rows = Vec::new();
    let mut best: Option<(bool, usize, Circuit64)> = None;
    for (&(t, s), res) in plan.iter().zip(results) {
        match res {
            Ok(r) => {
                run.write_trial(t, &r.circuit, &r.trace)?;
                let better = best.as_ref().is_none_or(|b| (r.success && !b.0) || (r.success == b.0 && r.gate_count < b.1));
                if better {
                    best = Some((r.success, r.gate_count, r.circuit.clone()));
                }
                rows.push(CompileRow::from_report(&r, run.omit_timing));
            }
            Err(e) => {
                eprintln!("trial {t} (seed {s}) failed: {e}");
                rows.push(CompileRow::failed(dt, &mode.to_string(), t, s));
            }
        }
    }
    write_csv(&run.out.join(COMPILE_CSV), &rows)?;
    let Some((_, gates, circuit)) = best else {
        bail!("every trial failed");
    };
    fs::write(run.out.join("best.circuit.json"), circuit.to_json() + "\n")?;
    let successes = rows.iter().filter(|r| r.success).count();
    println!("dt {dt} {mode}: successes {successes}/{}  best gates {gates}  -> {}", rows.len(), run.out.display());
    Ok(())
}

fn trotter_scan(
    path: &Path,
    dt_grid: Option<Vec<f64>>,
    orders: &[u8],
    max_steps: Option<Vec<usize>>,
    occupation: usize,
    out: &Path,
    omit_timing: bool,
) -> Result<()> {
    let h = load_hamiltonian(path)?;
    let dts = dt_grid.unwrap_or_else(|| DEFAULT_DT_GRID.to_vec());
    if let Some(m) = &max_steps {
        if m.len() != orders.len() {
            bail!("--max-steps needs one value per order");
        }
    }
    let steps = |order: u8| match &max_steps {
        Some(m) => m[orders.iter().position(|&o| o == order).expect("order listed")],
        None => trotter::default_max_steps(order),
    };
    fs::create_dir_all(out)?;
    let mut manifest = RunManifest::new("trotter-scan", Default::default(), 0, omit_timing);
    manifest.add_input(path)?;
    manifest.config.insert("dt_grid".into(), dts.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
    manifest.config.insert("orders".into(), orders.iter().map(u8::to_string).collect::<Vec<_>>().join(","));
    manifest.config.insert(
        "max_steps".into(),
        orders.iter().map(|&o| steps(o).to_string()).collect::<Vec<_>>().join(","),
    );
    manifest.config.insert("occupation".into(), occupation.to_string());
    manifest.write(out)?;

    let sector = SubspaceSpec::occupation(h.n(), occupation)?;
    let rows = trotter::scan(&h, &dts, orders, steps, &sector)?;
    let records: Vec<ScanRecord> = rows.iter().map(ScanRecord::from).collect();
    write_csv(&out.join(SCAN_CSV), &records)?;
    println!("{} points -> {}", records.len(), out.join(SCAN_CSV).display());
    Ok(())
}
