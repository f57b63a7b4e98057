use std::cell::OnceCell;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use gmspec::analysis::{
    community, correlator, cut_counts, default_stopwords, density_grid, eigenvector_metrics, modulus_order,
    real_ipr, select_near_circle, AnalysisReport, GridScale,
};
use gmspec::export::{self, round_json, Format};
use gmspec::graph::{load_edge_list_remapped, IdMap};
use gmspec::rank::{default_fit_range, NEAR_ONE_ALPHA};
use gmspec::subspaces::{detect_subspaces_with, DetectOptions, SpectrumConfig};
use gmspec::{
    core_spectrum, load_edge_list, load_labels, pagerank, pagerank_near_one, subspace_spectrum, zipf_fit,
    CoreSpectrum, CoreSpectrumConfig, DirectedGraph, Direction, EdgeListOptions, Execution, LabelTable,
    RankVector, SpectrumSummary, StochasticOperator, SubspaceDecomposition,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, DirectionArg, FormatArg, Shared};
use crate::error::CliError;
use crate::output::Staging;

/// Power iteration is hopeless this close to α = 1; the block solver is
/// used instead.
const NEAR_ONE_SWITCH: f64 = 1.0 - 1e-4;

pub fn validate(a: &Shared) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&a.alpha) {
        return Err(CliError::input(format!("--alpha must lie in [0, 1], got {}", a.alpha)));
    }
    if a.n_arnoldi < 1 {
        return Err(CliError::input("--n-arnoldi must be at least 1"));
    }
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(CliError::input(format!("--tol must be positive, got {}", a.tol)));
    }
    if a.max_iter < 1 {
        return Err(CliError::input("--max-iter must be at least 1"));
    }
    if a.threads == Some(0) {
        return Err(CliError::input("--threads must be at least 1"));
    }
    if a.cells < 1 {
        return Err(CliError::input("--cells must be at least 1"));
    }
    if a.dense_limit < 1 {
        return Err(CliError::input("--dense-limit must be at least 1"));
    }
    if !(a.memory_gib.is_finite() && a.memory_gib > 0.0) {
        return Err(CliError::input("--memory-gib must be positive"));
    }
    match (a.fit_min, a.fit_max) {
        (Some(0), _) => return Err(CliError::input("--fit-min must be at least 1")),
        (Some(lo), Some(hi)) if hi <= lo => {
            return Err(CliError::input("--fit-max must exceed --fit-min"));
        }
        _ => {}
    }
    require_file(&a.edges, "--edges")?;
    if let Some(l) = &a.labels {
        require_file(l, "--labels")?;
    }
    if a.out.exists() && !a.out.is_dir() {
        return Err(CliError::input(format!("--out {} is not a directory", a.out.display())));
    }
    Ok(())
}

fn require_file(p: &Path, flag: &str) -> Result<(), CliError> {
    if !p.is_file() {
        return Err(CliError::input(format!("{flag} {}: no such file", p.display())));
    }
    Ok(())
}

fn open(p: &Path) -> Result<BufReader<File>, CliError> {
    File::open(p)
        .map(BufReader::new)
        .map_err(|e| CliError::input(format!("{}: {e}", p.display())))
}

fn direction(a: &Shared) -> Direction {
    match a.direction {
        DirectionArg::Fwd => Direction::Forward,
        DirectionArg::Inv => Direction::Inverse,
    }
}

fn format(a: &Shared) -> Format {
    match a.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    round_json(serde_json::to_value(v).expect("plain data serializes"))
}

fn cached<'c, T>(cell: &'c OnceCell<T>, f: impl FnOnce() -> Result<T, CliError>) -> Result<&'c T, CliError> {
    if cell.get().is_none() {
        let v = f()?;
        let _ = cell.set(v);
    }
    Ok(cell.get().expect("set above"))
}

/// Loaded network plus lazily computed results shared between outputs.
pub struct Run<'a> {
    args: &'a Shared,
    exec: Execution,
    graph: DirectedGraph,
    labels: Option<LabelTable>,
    ids: Option<IdMap>,
    decomp: [OnceCell<SubspaceDecomposition>; 2],
    subspace_spectrum: OnceCell<SpectrumSummary>,
    core_spectrum: OnceCell<CoreSpectrum>,
    ranks: [OnceCell<Ranked>; 2],
}

struct Ranked {
    rank: RankVector,
    mass_on_subspaces: Option<f64>,
}

impl<'a> Run<'a> {
    pub fn load(args: &'a Shared, exec: Execution) -> Result<Self, CliError> {
        let opts = EdgeListOptions {
            index_base: args.index_base,
            ..EdgeListOptions::default()
        };
        let (graph, ids) = if args.remap {
            let (g, m) = load_edge_list_remapped(open(&args.edges)?, &opts).map_err(|e| CliError::read(&args.edges, e))?;
            (g, Some(m))
        } else {
            let g = load_edge_list(open(&args.edges)?, &opts).map_err(|e| CliError::read(&args.edges, e))?;
            (g, None)
        };
        let labels = match &args.labels {
            None => None,
            Some(p) => Some(read_labels(p, args.index_base, ids.as_ref(), graph.node_count())?),
        };
        Ok(Run {
            args,
            exec,
            graph,
            labels,
            ids,
            decomp: Default::default(),
            subspace_spectrum: OnceCell::new(),
            core_spectrum: OnceCell::new(),
            ranks: Default::default(),
        })
    }

    fn op(&self, dir: Direction) -> StochasticOperator<'_> {
        StochasticOperator::new(&self.graph, dir).with_execution(self.exec)
    }

    fn decomposition(&self, dir: Direction) -> Result<&SubspaceDecomposition, CliError> {
        let slot = match dir {
            Direction::Forward => 0,
            Direction::Inverse => 1,
        };
        cached(&self.decomp[slot], || {
            let opts = DetectOptions {
                direction: dir,
                dense_limit: self.args.dense_limit,
                reclassify_oversized: self.args.reclassify_oversized,
            };
            Ok(detect_subspaces_with(&self.graph, &opts))
        })
    }

    fn subspace_spectrum(&self) -> Result<&SpectrumSummary, CliError> {
        cached(&self.subspace_spectrum, || {
            let dir = direction(self.args);
            let cfg = SpectrumConfig {
                dense_limit: self.args.dense_limit,
                eigenvectors: false,
                exec: self.exec,
                ..SpectrumConfig::default()
            };
            Ok(subspace_spectrum(&self.op(dir), self.decomposition(dir)?, &cfg)?)
        })
    }

    fn core_spectrum(&self) -> Result<&CoreSpectrum, CliError> {
        cached(&self.core_spectrum, || {
            let d = self.decomposition(direction(self.args))?;
            let cfg = CoreSpectrumConfig {
                n_arnoldi: self.args.n_arnoldi,
                seed: self.args.seed,
                memory_budget: (self.args.memory_gib * (1u64 << 30) as f64) as usize,
                exec: self.exec,
                ..CoreSpectrumConfig::default()
            };
            let s = core_spectrum(&self.graph, d, &cfg)?;
            if s.clamped {
                eprintln!(
                    "warning: --n-arnoldi {} exceeds the core dimension N_c = {}; clamped",
                    self.args.n_arnoldi,
                    d.core_count()
                );
            }
            Ok(s)
        })
    }

    /// PageRank (`Forward`) or CheiRank (`Inverse`) at the configured α.
    fn rank(&self, dir: Direction) -> Result<&Ranked, CliError> {
        let slot = match dir {
            Direction::Forward => 0,
            Direction::Inverse => 1,
        };
        cached(&self.ranks[slot], || self.compute_rank(dir, self.args.alpha))
    }

    fn compute_rank(&self, dir: Direction, alpha: f64) -> Result<Ranked, CliError> {
        let op = self.op(dir);
        if alpha >= NEAR_ONE_SWITCH {
            let r = pagerank_near_one(&op, self.decomposition(dir)?, alpha, self.args.tol, self.args.max_iter)?;
            Ok(Ranked {
                rank: r.rank,
                mass_on_subspaces: Some(r.mass_on_subspaces),
            })
        } else {
            Ok(Ranked {
                rank: pagerank(&op, alpha, self.args.tol, self.args.max_iter)?,
                mass_on_subspaces: None,
            })
        }
    }

    fn emit_ids(&self, out: &mut Staging) -> Result<(), CliError> {
        if let Some(m) = &self.ids {
            let base = self.args.index_base as u64;
            let t = export::id_table((0..m.len()).map(|i| (i as u32, m.original_id(i as u32) + base)));
            out.table("ids", &t)?;
        }
        Ok(())
    }

    fn emit_stats(&self, out: &mut Staging) -> Result<Value, CliError> {
        let v = to_json(&self.graph.stats());
        out.json("stats.json", &v)?;
        Ok(v)
    }

    fn emit_subspaces(&self, out: &mut Staging) -> Result<(), CliError> {
        let dir = direction(self.args);
        let d = self.decomposition(dir)?;
        out.table("subspaces", &export::subspace_table(d))?;
        let summary = json!({
            "direction": dir.tag(),
            "N": d.node_count(),
            "N_c": d.core_count(),
            "N_s": d.subspace_node_count(),
            "N_d": d.subspace_count(),
            "d_max": d.max_dimension(),
            "reclassified": d.reclassified(),
        });
        out.json("subspaces_summary.json", &summary)
    }

    fn emit_spectrum(&self, out: &mut Staging) -> Result<(), CliError> {
        let sub = self.subspace_spectrum()?;
        let core = self.core_spectrum()?;
        out.table("spectrum_subspace", &export::subspace_spectrum_table(sub))?;
        out.table("spectrum_core", &export::core_spectrum_table(core))?;
        let mut summary = to_json(sub);
        let lambda_1 = core
            .values
            .first()
            .map(|v| json!({"re": v.lambda.re, "im": v.lambda.im, "abs": v.lambda.norm()}));
        let extra = json!({
            "direction": direction(self.args).tag(),
            "n_arnoldi_requested": self.args.n_arnoldi,
            "n_arnoldi": core.n_arnoldi,
            "clamped": core.clamped,
            "breakdown_step": core.breakdown_step,
            "ritz_values": core.values.len(),
            "converged": core.values.iter().filter(|v| v.converged).count(),
            "lambda_1": lambda_1,
        });
        if let (Value::Object(m), Value::Object(e)) = (&mut summary, round_json(extra)) {
            m.extend(e);
        }
        out.json("spectrum_summary.json", &summary)?;
        for p in core.pairs.iter().take(self.args.eigenvectors) {
            out.table(&format!("eigvec_m{}", p.m), &export::eigenvector_table(&p.psi))?;
        }
        Ok(())
    }

    fn fit(&self, rv: &RankVector) -> Option<Value> {
        let n = rv.len();
        let (lo, hi) = match (self.args.fit_min, self.args.fit_max, default_fit_range(n)) {
            (Some(lo), Some(hi), _) => (lo, hi),
            (lo, hi, Some((dlo, dhi))) => (lo.unwrap_or(dlo), hi.unwrap_or(dhi)),
            (Some(lo), None, None) => (lo, n),
            (None, _, None) => return None,
        };
        match zipf_fit(rv, lo, hi.min(n)) {
            Ok(f) => Some(to_json(&f)),
            Err(e) => {
                eprintln!("warning: rank fit over [{lo}, {hi}] skipped: {e}");
                None
            }
        }
    }

    fn emit_rank(&self, out: &mut Staging) -> Result<(), CliError> {
        let labels = self.labels.as_ref();
        let p = self.rank(Direction::Forward)?;
        let ps = self.rank(Direction::Inverse)?;
        out.table("pagerank", &export::rank_table(&p.rank, labels))?;
        out.table("cheirank", &export::rank_table(&ps.rank, labels))?;
        let fits = json!({
            "alpha": self.args.alpha,
            "pagerank": self.fit(&p.rank),
            "cheirank": self.fit(&ps.rank),
        });
        out.json("rank_fit.json", &round_json(fits))?;
        let summary = json!({
            "alpha": self.args.alpha,
            "pagerank": rank_summary(p),
            "cheirank": rank_summary(ps),
        });
        out.json("rank_summary.json", &round_json(summary))?;

        if self.args.near_one {
            let a = self.compute_rank(Direction::Forward, NEAR_ONE_ALPHA)?;
            let b = self.compute_rank(Direction::Inverse, NEAR_ONE_ALPHA)?;
            out.table("pagerank_near_one", &export::rank_table(&a.rank, labels))?;
            out.table("cheirank_near_one", &export::rank_table(&b.rank, labels))?;
            let summary = json!({
                "alpha": NEAR_ONE_ALPHA,
                "pagerank": rank_summary(&a),
                "cheirank": rank_summary(&b),
            });
            out.json("near_one.json", &round_json(summary))?;
        }
        Ok(())
    }

    fn emit_analysis(&self, out: &mut Staging) -> Result<(), CliError> {
        let p = &self.rank(Direction::Forward)?.rank;
        let ps = &self.rank(Direction::Inverse)?.rank;
        let core = self.core_spectrum()?;
        let selected = select_near_circle(&core.pairs, self.args.communities);

        let report = AnalysisReport {
            kappa: correlator(&p.probabilities, &ps.probabilities)?,
            pagerank_ipr: real_ipr(&p.probabilities)?,
            cheirank_ipr: real_ipr(&ps.probabilities)?,
            eigenvectors: selected.iter().map(eigenvector_metrics).collect::<Result<_, _>>()?,
        };
        out.json("analysis.json", &to_json(&report))?;

        for (scale, name) in [(GridScale::Linear, "density_linear"), (GridScale::Log, "density_log")] {
            let grid = density_grid(&p.rank, &ps.rank, self.args.cells, scale)?;
            out.table(name, &export::density_table(&grid))?;
            out.json(&format!("{name}_header.json"), &export::density_header(&grid))?;
        }

        out.table("cuts_pagerank", &export::cut_table(&cut_counts(&self.graph, &p.order)?))?;
        for pair in &selected {
            let c = cut_counts(&self.graph, &modulus_order(&pair.psi))?;
            out.table(&format!("cuts_m{}", pair.m), &export::cut_table(&c))?;
        }

        if self.labels.is_none() && !selected.is_empty() {
            eprintln!("warning: no --labels given; community report uses node ids");
        }
        let stopwords = default_stopwords();
        let communities = selected
            .iter()
            .map(|pair| community(pair, self.labels.as_ref(), &stopwords, self.args.word_pool))
            .collect::<Result<Vec<_>, _>>()?;
        out.json("communities.json", &to_json(&communities))
    }
}

fn rank_summary(r: &Ranked) -> Value {
    json!({
        "iterations": r.rank.iterations,
        "residual": r.rank.residual,
        "top_nodes": r.rank.order.iter().take(10).collect::<Vec<_>>(),
        "mass_on_subspaces": r.mass_on_subspaces,
    })
}

fn read_labels(p: &Path, base: u8, ids: Option<&IdMap>, n: usize) -> Result<LabelTable, CliError> {
    let raw = load_labels(open(p)?).map_err(|e| CliError::read(p, e))?;
    let mut shifted = LabelTable::default();
    for (id, text) in raw.iter() {
        let Some(id) = id.checked_sub(base as u64) else {
            return Err(CliError::input(format!("{}: label id {id} below the index base", p.display())));
        };
        shifted.insert(id, text);
    }
    let table = match ids {
        Some(m) => m.translate_labels(&shifted).map_err(|e| CliError::read(p, e))?,
        None => shifted,
    };
    if let Some((id, _)) = table.iter().find(|&(id, _)| id >= n as u64) {
        return Err(CliError::input(format!(
            "{}: label for node {id}, but the network has {n} nodes",
            p.display()
        )));
    }
    Ok(table)
}

/// Runs one command and returns the files it wrote.
pub fn execute(cmd: &Command, exec: Execution) -> Result<Vec<PathBuf>, CliError> {
    let args = cmd.shared();
    validate(args)?;
    let run = Run::load(args, exec)?;
    let mut out = Staging::new(&args.out, format(args))?;
    run.emit_ids(&mut out)?;
    match cmd {
        Command::Stats(_) => {
            let v = run.emit_stats(&mut out)?;
            println!("{}", serde_json::to_string(&v).expect("json value"));
        }
        Command::Subspaces(_) => run.emit_subspaces(&mut out)?,
        Command::Spectrum(_) => run.emit_spectrum(&mut out)?,
        Command::Rank(_) => run.emit_rank(&mut out)?,
        Command::Analyze(_) => run.emit_analysis(&mut out)?,
        Command::Pipeline(_) => {
            run.emit_stats(&mut out)?;
            run.emit_subspaces(&mut out)?;
            run.emit_spectrum(&mut out)?;
            run.emit_rank(&mut out)?;
            run.emit_analysis(&mut out)?;
        }
    }
    out.commit()
}
