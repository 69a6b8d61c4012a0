use std::fmt;
use std::path::{Path, PathBuf};

use gramops::fermion::{
    build_q_matrix, commutation_only_energy, free_ground_energy, j0_from_model, monomial_commutation_graph,
    random_sign_q_matrix, syk_exact_extremes, syk_expectation_wick, syk_random, FreeFermionModel, SykInstance,
};
use gramops::graph::{parse_graph, parse_weighted_graph, separation_example_complement};
use gramops::independence::{independence_number, MAX_VERTICES};
use gramops::knapsack::{
    exact_min_singular, hamiltonian_ground, parse_knapsack, parse_subset_sum, recursive_lower_bound, subset_sum_min,
    BoundOptions,
};
use gramops::psi::{optimize_coefficients, psi_lower_bound, search_separation, Coefficients, Init, PsiOptions};
use gramops::sdp::{graph_sdp_h2_with, graph_sdp_h_with, lovasz_theta_with, SdpOptions, SdpReport, SdpStatus};
use gramops::spectral::EigOptions;
use gramops::{Capacity, Graph, GraphFormat, WeightedGraph};
use serde_json::{json, Value};

use crate::args::*;

/// Verdict threshold on the squared norm of the 12-vertex example.
pub const PAPER_EXAMPLE_THRESHOLD: f64 = 2.005;
const THETA_SLACK: f64 = 1e-4;

#[derive(Debug)]
pub enum Failure {
    Lib(gramops::Error),
    Io(PathBuf, std::io::Error),
    Input(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(gramops::Error::Capacity { .. }) => 3,
            Failure::Lib(gramops::Error::NonConvergence { .. }) => 4,
            Failure::Lib(_) | Failure::Io(..) | Failure::Input(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            Failure::Input(m) => write!(f, "{m}"),
        }
    }
}

impl From<gramops::Error> for Failure {
    fn from(e: gramops::Error) -> Self {
        Failure::Lib(e)
    }
}

/// A finished command: its report and exit code (0, 1 for a failed check,
/// 4 for an unconverged solver that still produced an estimate).
pub struct Outcome {
    pub command: String,
    pub result: Value,
    pub exit: u8,
}

impl Outcome {
    fn ok(command: &str, result: Value) -> Self {
        Self {
            command: command.into(),
            result,
            exit: 0,
        }
    }
}

struct Ctx {
    seed: u64,
    cap: Capacity,
    sdp: SdpOptions,
    psi: PsiOptions,
}

impl Ctx {
    fn new(g: &GlobalArgs) -> Result<Self, Failure> {
        let cap = Capacity::from_env()?;
        let mut sdp = SdpOptions::default();
        let mut eig = EigOptions {
            seed: g.seed,
            ..EigOptions::default()
        };
        if let Some(tol) = g.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Failure::Input(format!("--tol must be positive, got {tol}")));
            }
            sdp.tol = tol;
            eig.tol = tol;
        }
        Ok(Self {
            seed: g.seed,
            cap,
            sdp,
            psi: PsiOptions {
                eig,
                capacity: cap,
                theta: false,
            },
        })
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

macro_rules! to_value {
    ($x:expr) => {
        serde_json::to_value($x).expect("reports serialize")
    };
}

fn builtin(source: &str) -> Result<Option<Graph>, Failure> {
    if source == "paper-example" {
        return Ok(Some(separation_example_complement().complement()));
    }
    let Some((family, size)) = source.split_once(':') else {
        return Ok(None);
    };
    let ctor: fn(usize) -> Graph = match family {
        "cycle" => Graph::cycle,
        "complete" => Graph::complete,
        "empty" => Graph::empty,
        _ => return Ok(None),
    };
    let n: usize = size
        .parse()
        .map_err(|_| Failure::Input(format!("bad vertex count in {source:?}")))?;
    Ok(Some(ctor(n)))
}

fn load_weighted(source: &str) -> Result<WeightedGraph, Failure> {
    if let Some(g) = builtin(source)? {
        return Ok(WeightedGraph::unit(g));
    }
    let text = read(Path::new(source))?;
    Ok(match GraphFormat::sniff(&text) {
        GraphFormat::Json => parse_weighted_graph(&text)?,
        GraphFormat::Dimacs => WeightedGraph::unit(parse_graph(&text, GraphFormat::Dimacs)?),
    })
}

fn load_graph(source: &str) -> Result<Graph, Failure> {
    Ok(load_weighted(source)?.graph().clone())
}

fn load_coeffs(source: &str, n: usize) -> Result<Option<Vec<f64>>, Failure> {
    if source == "uniform" {
        return Ok(None);
    }
    let text = read(Path::new(source))?;
    let j: Vec<f64> = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{source}: {e}")))?;
    if j.len() != n {
        return Err(Failure::Input(format!("{source}: {} coefficients for {n} vertices", j.len())));
    }
    Ok(Some(j))
}

fn sdp_outcome(command: &str, g: &Graph, r: &SdpReport) -> Outcome {
    let mut result = to_value!(r);
    result["graph_id"] = json!(g.fingerprint());
    Outcome {
        command: command.into(),
        result,
        exit: if r.status == SdpStatus::Converged { 0 } else { 4 },
    }
}

fn model(n: usize, m: &ModelArgs, seed: u64) -> Result<FreeFermionModel, Failure> {
    Ok(if m.random_sign {
        random_sign_q_matrix(n, seed)?
    } else {
        build_q_matrix(n)?
    })
}

fn instance_value(inst: &SykInstance) -> Value {
    serde_json::from_str(&inst.to_json()).expect("instance JSON is valid")
}

pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let ctx = Ctx::new(&cli.global)?;
    match &cli.command {
        Command::Graph(GraphCommand::Info { graph }) => graph_info(graph),
        Command::Theta { graph } => {
            let g = load_graph(graph)?;
            Ok(sdp_outcome("theta", &g, &lovasz_theta_with(&g, &ctx.sdp)?))
        }
        Command::SdpH(a) | Command::SdpH2(a) => {
            let h2 = matches!(cli.command, Command::SdpH2(_));
            let g = load_graph(&a.graph)?;
            let n = g.num_vertices();
            let j = load_coeffs(&a.coeffs, n)?.unwrap_or_else(|| vec![1.0 / (n.max(1) as f64).sqrt(); n]);
            let (name, r) = if h2 {
                ("sdp-h2", graph_sdp_h2_with(&g, &j, &ctx.sdp)?)
            } else {
                ("sdp-h", graph_sdp_h_with(&g, &j, &ctx.sdp)?)
            };
            Ok(sdp_outcome(name, &g, &r))
        }
        Command::Psi(a) => psi(a, &ctx),
        Command::Search(SearchCommand::TriangleFree {
            n,
            trials,
            threshold,
            theta,
        }) => {
            let opts = PsiOptions { theta: *theta, ..ctx.psi };
            let reports = search_separation(*n, *trials, *threshold, ctx.seed, &opts)?;
            let count = |f: fn(&gramops::psi::PsiReport) -> bool| reports.iter().filter(|r| f(r)).count();
            Ok(Outcome::ok(
                "search triangle-free",
                json!({
                    "n": n,
                    "trials": trials,
                    "threshold": threshold,
                    "seed": ctx.seed,
                    "exceeding": count(|r| r.exceeds_threshold == Some(true)),
                    "separations": count(|r| r.separation == Some(true)),
                    "reports": to_value!(&reports),
                }),
            ))
        }
        Command::Blowup { graph } => {
            let wg = load_weighted(graph)?;
            let b = wg.blow_up()?;
            let mut result: Value = serde_json::from_str(&b.to_json()).expect("graph JSON is valid");
            result["graph_id"] = json!(b.fingerprint());
            result["source_graph_id"] = json!(wg.graph().fingerprint());
            Ok(Outcome::ok("blowup", result))
        }
        Command::Syk(c) => syk(c, &ctx),
        Command::Knapsack(c) => knapsack(c, &ctx),
        Command::Verify(VerifyCommand::PaperExample { complement }) => verify(complement.as_deref(), &ctx),
    }
}

fn graph_info(source: &str) -> Result<Outcome, Failure> {
    let wg = load_weighted(source)?;
    let g = wg.graph();
    let alpha = if g.num_vertices() <= MAX_VERTICES {
        to_value!(&independence_number(g)?)
    } else {
        Value::Null
    };
    let degrees: Vec<usize> = (0..g.num_vertices()).map(|v| g.degree(v)).collect();
    Ok(Outcome::ok(
        "graph info",
        json!({
            "graph_id": g.fingerprint(),
            "vertices": g.num_vertices(),
            "edges": g.num_edges(),
            "degrees": degrees,
            "weights": wg.weights().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            "triangle_free": g.is_triangle_free(),
            "maximal_triangle_free": g.is_maximal_triangle_free(),
            "complement_triangle_free": g.complement().is_triangle_free(),
            "independence": alpha,
        }),
    ))
}

fn psi(a: &PsiArgs, ctx: &Ctx) -> Result<Outcome, Failure> {
    let wg = load_weighted(&a.graph)?;
    let n = wg.graph().num_vertices();
    let opts = PsiOptions { theta: a.theta, ..ctx.psi };
    let coeffs = load_coeffs(&a.coeffs, n)?;
    let unit = wg.weights().iter().all(|w| *w == 1.into());
    let result = if a.optimize.is_some() || !unit {
        let init = match coeffs {
            None => Init::Uniform,
            Some(k) => Init::Given(k),
        };
        to_value!(&optimize_coefficients(&wg, &init, a.optimize.unwrap_or(0), a.step_size, &opts)?)
    } else {
        let c = match coeffs {
            None => Coefficients::Uniform,
            Some(j) => Coefficients::Given(j),
        };
        to_value!(&psi_lower_bound(wg.graph(), &c, &opts)?)
    };
    Ok(Outcome::ok("psi", result))
}

fn syk(c: &SykCommand, ctx: &Ctx) -> Result<Outcome, Failure> {
    match c {
        SykCommand::Gen { n, q, norm } => {
            let inst = syk_random(*n, *q, ctx.seed, (*norm).into(), &ctx.cap)?;
            Ok(Outcome::ok("syk gen", instance_value(&inst)))
        }
        SykCommand::Graph { n, q, theta } => {
            let g = monomial_commutation_graph(*n, *q, &ctx.cap)?;
            let theta = if *theta {
                let r = lovasz_theta_with(&g, &ctx.sdp)?;
                if r.status != SdpStatus::Converged {
                    return Ok(sdp_outcome("syk graph", &g, &r));
                }
                json!(r.objective)
            } else {
                Value::Null
            };
            Ok(Outcome::ok(
                "syk graph",
                json!({
                    "n": n,
                    "q": q,
                    "graph_id": g.fingerprint(),
                    "vertices": g.num_vertices(),
                    "edges": g.num_edges(),
                    "theta": theta,
                }),
            ))
        }
        SykCommand::J0 { n, model: m } => {
            let model = model(*n, m, ctx.seed)?;
            let j0 = j0_from_model(&model, &ctx.cap)?;
            let energy = syk_expectation_wick(&j0, &model)?;
            Ok(Outcome::ok(
                "syk j0",
                json!({ "wick_energy": energy, "instance": instance_value(&j0) }),
            ))
        }
        SykCommand::FreeEnergy { n, model: m } => {
            let model = model(*n, m, ctx.seed)?;
            let e = free_ground_energy(&model);
            Ok(Outcome::ok(
                "syk free-energy",
                json!({ "n": n, "ground_energy": e, "energy_per_mode": e / *n as f64 }),
            ))
        }
        SykCommand::Wick { n, instance, model: m } => {
            let model = model(*n, m, ctx.seed)?;
            let inst = match instance {
                Some(p) => SykInstance::from_json(&read(p)?)?,
                None => j0_from_model(&model, &ctx.cap)?,
            };
            let energy = syk_expectation_wick(&inst, &model)?;
            let sign_matched = if inst.q() == 4 {
                json!(commutation_only_energy(&inst, &model, &ctx.cap)?)
            } else {
                Value::Null
            };
            Ok(Outcome::ok(
                "syk wick",
                json!({
                    "n": n,
                    "q": inst.q(),
                    "wick_energy": energy,
                    "sign_matched_energy": sign_matched,
                }),
            ))
        }
        SykCommand::Exact { n, q, norm } => {
            let inst = syk_random(*n, *q, ctx.seed, (*norm).into(), &ctx.cap)?;
            let (ground, top) = syk_exact_extremes(&inst, &ctx.psi.eig, &ctx.cap)?;
            Ok(Outcome::ok(
                "syk exact",
                json!({
                    "n": n,
                    "q": q,
                    "seed": ctx.seed,
                    "ground_energy": ground,
                    "top_energy": top,
                    "norm": ground.abs().max(top.abs()),
                }),
            ))
        }
    }
}

fn knapsack(c: &KnapsackCommand, ctx: &Ctx) -> Result<Outcome, Failure> {
    match c {
        KnapsackCommand::Bound {
            file,
            orders,
            leaves,
            exact,
        } => {
            let nf = parse_knapsack(&read(file)?)?;
            let opts = BoundOptions {
                search_orders: *orders,
                leaves: *leaves,
                exact: *exact,
            };
            let r = recursive_lower_bound(&nf, &opts, &ctx.cap)?;
            let mut result = to_value!(&r);
            result["qubits"] = json!(nf.num_qubits());
            Ok(Outcome::ok("knapsack bound", result))
        }
        KnapsackCommand::Exact { file } => {
            let nf = parse_knapsack(&read(file)?)?;
            Ok(Outcome::ok(
                "knapsack exact",
                json!({
                    "qubits": nf.num_qubits(),
                    "sigma_min": exact_min_singular(&nf)?,
                    "hamiltonian_ground": hamiltonian_ground(&nf)?,
                }),
            ))
        }
        KnapsackCommand::SubsetSum { file } => {
            let (c, coeffs) = parse_subset_sum(&read(file)?)?;
            Ok(Outcome::ok("knapsack subset-sum", to_value!(&subset_sum_min(c, &coeffs)?)))
        }
    }
}

fn verify(complement: Option<&Path>, ctx: &Ctx) -> Result<Outcome, Failure> {
    let comp = match complement {
        None => separation_example_complement(),
        Some(p) => {
            let text = read(p)?;
            let rows: Vec<Vec<u8>> =
                serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            let rows: Vec<&[u8]> = rows.iter().map(Vec::as_slice).collect();
            Graph::from_adjacency_rows(&rows)?
        }
    };
    let g = comp.complement();
    let alpha = independence_number(&g)?.value;
    let psi = psi_lower_bound(&g, &Coefficients::Uniform, &ctx.psi)?;
    let theta = lovasz_theta_with(&g, &ctx.sdp)?;
    let checks = [
        (
            "complement_triangle_free",
            comp.is_triangle_free(),
            json!(comp.is_triangle_free()),
            "true".to_string(),
        ),
        ("independence_number", alpha == 2.into(), to_value!(&alpha.to_string()), "2".into()),
        (
            "norm_squared",
            psi.norm_squared >= PAPER_EXAMPLE_THRESHOLD,
            json!(psi.norm_squared),
            format!(">= {PAPER_EXAMPLE_THRESHOLD}"),
        ),
        (
            "theta_upper_bound",
            theta.status == SdpStatus::Converged && theta.objective >= psi.norm_squared - THETA_SLACK,
            json!(theta.objective),
            format!(">= norm_squared - {THETA_SLACK:e}"),
        ),
    ];
    let passed = checks.iter().all(|c| c.1);
    let checks: Vec<Value> = checks
        .iter()
        .map(|(name, ok, value, req)| json!({ "check": name, "passed": ok, "value": value, "requirement": req }))
        .collect();
    Ok(Outcome {
        command: "verify paper-example".into(),
        result: json!({
            "passed": passed,
            "graph_id": g.fingerprint(),
            "vertices": g.num_vertices(),
            "hilbert_dimension": 1u64 << g.num_vertices(),
            "residual_norm": psi.residual_norm,
            "checks": checks,
        }),
        exit: if passed { 0 } else { 1 },
    })
}
