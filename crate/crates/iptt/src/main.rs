//! Command-line front end: seeded inequality sweeps (`check`), exact
//! identity verification (`identities`), and equality-witness margins
//! (`sharpness`). Exit status is nonzero iff a violation or failed check
//! occurred, so runs can gate CI.

use clap::{Args, Parser, Subcommand};
use iptt::harness::{
    parse_id_list, report, run_sweep, run_sweep_parallel, summarize, ReportFormat, SweepConfig,
};
use iptt::ineq;
use iptt::linalg::random::{ginibre_normalized, haar_unitary, normal_in_disk};
use iptt::linalg::CMatrix;
use iptt::norms::UINorm;
use iptt::transformer::{gen_field, FieldKind, IptiTransformer, OperatorField};
use iptt::HerglotzFn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "iptt",
    about = "Randomized verification of norm bounds for inner product type integral transformers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded sweeps of the selected inequalities and emit a report.
    Check(CheckArgs),
    /// Verify the exact identities (Korkine, variance forms, flattened
    /// transformer norm, unitary covariance of the functional calculus).
    Identities(IdentityArgs),
    /// Evaluate the known equality witnesses and print their margins.
    Sharpness,
}

#[derive(Args)]
struct CheckArgs {
    /// JSON config file; flags below override its fields.
    #[arg(long)]
    config: Option<String>,
    /// Comma-separated inequality ids; `c2` expands to both sign variants,
    /// `all` selects everything.
    #[arg(long)]
    ids: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    /// Comma-separated matrix dimensions in [1,16].
    #[arg(long)]
    dims: Option<String>,
    /// Comma-separated atom counts in [1,8].
    #[arg(long)]
    atoms: Option<String>,
    /// Comma-separated norm tokens: op, s<p>, sinf, kf<k>, rx<p>(<base>).
    #[arg(long)]
    norms: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated positive exponents for the theta-parametrized ids.
    #[arg(long)]
    theta: Option<String>,
    /// Comma-separated p:q:r triples satisfying 1/p = 1/(2q) + 1/(2r).
    #[arg(long)]
    pqr: Option<String>,
    /// Output format: json (canonical) or csv (lossy).
    #[arg(long)]
    format: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// Evaluate trials on a single thread instead of the rayon pool.
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct IdentityArgs {
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn parse_usize_list(list: &str, field: &str) -> Result<Vec<usize>, String> {
    list.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|e| format!("{field}: `{t}`: {e}")))
        .collect()
}

fn parse_f64_list(list: &str, field: &str) -> Result<Vec<f64>, String> {
    list.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("{field}: `{t}`: {e}")))
        .collect()
}

fn parse_pqr_list(list: &str) -> Result<Vec<[f64; 3]>, String> {
    let mut out = Vec::new();
    for tok in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = tok.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("pqr: `{tok}` is not of the form p:q:r"));
        }
        let mut triple = [0.0; 3];
        for (slot, part) in triple.iter_mut().zip(&parts) {
            *slot = part.parse::<f64>().map_err(|e| format!("pqr: `{part}`: {e}"))?;
        }
        out.push(triple);
    }
    Ok(out)
}

fn tol_override() -> Result<Option<f64>, String> {
    match std::env::var("IPTT_TOL_OVERRIDE") {
        Ok(raw) => raw
            .parse::<f64>()
            .map(Some)
            .map_err(|e| format!("IPTT_TOL_OVERRIDE: `{raw}`: {e}")),
        Err(_) => Ok(None),
    }
}

fn run_check(args: &CheckArgs) -> Result<bool, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path)
                .map_err(|e| format!("config `{path}`: {e}"))?;
            serde_json::from_str::<SweepConfig>(&raw)
                .map_err(|e| format!("config `{path}`: {e}"))?
        }
        None => SweepConfig::default(),
    };
    if let Some(ids) = &args.ids {
        let parsed = parse_id_list(ids).map_err(|e| e.to_string())?;
        cfg.inequality_ids = parsed.iter().map(|id| id.name().to_string()).collect();
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(d) = &args.dims {
        cfg.dims = parse_usize_list(d, "dims")?;
    }
    if let Some(a) = &args.atoms {
        cfg.atoms = parse_usize_list(a, "atoms")?;
    }
    if let Some(n) = &args.norms {
        cfg.norms = n.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect();
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = &args.theta {
        cfg.theta_grid = parse_f64_list(t, "theta")?;
    }
    if let Some(p) = &args.pqr {
        cfg.pqr_grid = parse_pqr_list(p)?;
    }
    if let Some(f) = &args.format {
        cfg.format = f.clone();
    }
    if let Some(o) = &args.out {
        cfg.out_path = Some(o.clone());
    }

    let resolved = cfg.resolve(tol_override()?).map_err(|e| e.to_string())?;
    let reports = if args.serial {
        run_sweep(&resolved)
    } else {
        run_sweep_parallel(&resolved)
    }
    .map_err(|e| e.to_string())?;
    let summary = summarize(&reports).map_err(|e| e.to_string())?;

    let body = match resolved.format {
        ReportFormat::Json => report::write_json(&resolved, &reports, &summary),
        ReportFormat::Csv => report::write_csv(&reports),
    };
    match &resolved.out_path {
        Some(path) => {
            std::fs::write(path, &body).map_err(|e| format!("write `{path}`: {e}"))?;
        }
        None => print!("{body}"),
    }

    for s in &summary.per_id {
        eprintln!(
            "{}: {} reports, {} violations, min relative margin {:.3e}",
            s.id.name(),
            s.count,
            s.violations,
            s.min_relative_margin
        );
    }
    Ok(summary.total_violations == 0)
}

fn shared_weight_pair(
    kind: &FieldKind,
    n_atoms: usize,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> (OperatorField, OperatorField) {
    let left = gen_field(kind, n_atoms, dim, rng.gen()).expect("field generation");
    let right_raw = gen_field(kind, n_atoms, dim, rng.gen()).expect("field generation");
    let right =
        OperatorField::new(left.weights().to_vec(), right_raw.ops().to_vec(), right_raw.flags())
            .expect("shared weights");
    (left, right)
}

struct IdentityCheck {
    name: &'static str,
    max_discrepancy: f64,
    tolerance: f64,
}

impl IdentityCheck {
    fn passed(&self) -> bool {
        self.max_discrepancy <= self.tolerance
    }
}

fn run_identities(args: &IdentityArgs) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let dims = [2usize, 4, 8];

    let mut korkine = 0.0f64;
    let mut variance = 0.0f64;
    for t in 0..args.trials {
        let dim = dims[(t % 3) as usize];
        let n_atoms = 2 + (t % 5) as usize;
        let (left, right) = shared_weight_pair(&FieldKind::General, n_atoms, dim, &mut rng);
        let transformer = IptiTransformer::new(left.clone(), right).expect("transformer");
        let x = ginibre_normalized(dim, &mut rng);
        let lhs = transformer.korkine_lhs(&x).expect("korkine lhs");
        let rhs = transformer.korkine_rhs(&x).expect("korkine rhs");
        let scale = rhs.frobenius_norm().max(1.0);
        korkine = korkine.max((&lhs - &rhs).frobenius_norm() / scale);

        let direct = left.variance().expect("variance");
        let pair = left.variance_pair_form().expect("variance pair form");
        let centered = left.second_moment_about(&left.mean()).expect("second moment");
        let vscale = direct.frobenius_norm().max(1.0);
        variance = variance
            .max((&direct - &pair).frobenius_norm() / vscale)
            .max((&direct - &centered).frobenius_norm() / vscale);
    }

    let hs_trials = (args.trials / 10).max(10);
    let mut hs = 0.0f64;
    for _ in 0..hs_trials {
        let dim = 2 + (rng.gen::<u64>() % 3) as usize;
        let n_atoms = 1 + (rng.gen::<u64>() % 4) as usize;
        let (left, right) = shared_weight_pair(&FieldKind::General, n_atoms, dim, &mut rng);
        let transformer = IptiTransformer::new(left, right).expect("transformer");
        let r = ineq::eval_hs_exact_norm(&transformer).expect("hs norm");
        hs = hs.max(r.margin.abs());
    }

    let mut covariance = 0.0f64;
    for _ in 0..args.trials {
        let dim = 2 + (rng.gen::<u64>() % 3) as usize;
        let f = HerglotzFn::random(1 + (rng.gen::<u64>() % 5) as usize, &mut rng)
            .expect("herglotz sample");
        let a = normal_in_disk(dim, 0.9, &mut rng);
        let u = haar_unitary(dim, &mut rng);
        let conjugated = &(&u * &a) * &u.adjoint();
        let lhs = f.apply(&conjugated).expect("calculus");
        let rhs = &(&u * &f.apply(&a).expect("calculus")) * &u.adjoint();
        let scale = rhs.operator_norm().expect("norm").max(1.0);
        covariance = covariance.max(lhs.max_abs_diff(&rhs) / scale);
    }

    let checks = [
        IdentityCheck { name: "korkine", max_discrepancy: korkine, tolerance: 1e-10 },
        IdentityCheck { name: "variance_forms", max_discrepancy: variance, tolerance: 1e-10 },
        IdentityCheck { name: "hs_exact_norm", max_discrepancy: hs, tolerance: 1e-8 },
        IdentityCheck { name: "unitary_covariance", max_discrepancy: covariance, tolerance: 1e-9 },
    ];
    let mut ok = true;
    for c in &checks {
        println!(
            "identity {}: max discrepancy {:.3e} (tol {:.0e}) {}",
            c.name,
            c.max_discrepancy,
            c.tolerance,
            if c.passed() { "PASS" } else { "FAIL" }
        );
        ok &= c.passed();
    }
    ok
}

fn run_sharpness() -> bool {
    let mut ok = true;
    let mut show = |name: &str, margin: f64, tol: f64| {
        let pass = margin.abs() <= tol;
        println!(
            "witness {name}: margin {margin:.3e} (tol {tol:.0e}) {}",
            if pass { "PASS" } else { "FAIL" }
        );
        ok &= pass;
    };

    let n = 1000;
    let step: Vec<f64> = (0..n).map(|i| if i < n / 2 { -1.0 } else { 1.0 }).collect();
    let r = ineq::eval_gruss_scalar(&step, &step, -1.0, 1.0, -1.0, 1.0).expect("step witness");
    show("gruss_scalar step function", r.margin, 1e-12);

    let scalar = |v: f64| CMatrix::diag_re(&[v]);
    let field = OperatorField::new(
        vec![0.5, 0.5],
        vec![scalar(-1.0), scalar(1.0)],
        iptt::transformer::FieldFlags {
            is_probability: true,
            is_self_adjoint: true,
            ..Default::default()
        },
    )
    .expect("scalar field");
    let r = ineq::eval_gruss_operator(
        &field,
        &field,
        &scalar(-1.0),
        &scalar(1.0),
        &scalar(-1.0),
        &scalar(1.0),
        &scalar(1.0),
        &UINorm::operator(),
    )
    .expect("operator witness");
    show("gruss_operator scalar +-1", r.margin, 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let u = haar_unitary(3, &mut rng);
    let v = haar_unitary(3, &mut rng);
    let flags = iptt::transformer::FieldFlags {
        is_probability: true,
        is_commuting_normal: true,
        ..Default::default()
    };
    let left = OperatorField::new(vec![1.0], vec![u], flags).expect("unitary atom");
    let right = OperatorField::new(vec![1.0], vec![v], flags).expect("unitary atom");
    let t = IptiTransformer::new(left, right).expect("transformer");
    let x = ginibre_normalized(3, &mut rng);
    let r = ineq::eval_cs_uinorm(&t, &x, &UINorm::schatten(2.0).expect("norm"))
        .expect("unitary witness");
    show("cs_uinorm unitary atoms", r.margin, 1e-9);

    let f = gen_field(&FieldKind::General, 3, 3, 99).expect("field");
    let r = ineq::eval_cs_theta(&f, &f, 1.0, &UINorm::operator()).expect("equal fields");
    show("cs_theta equal fields", r.margin, 1e-9);

    let pm = OperatorField::probability(vec![0.5, 0.5], vec![scalar(-1.0), scalar(1.0)])
        .expect("scalar field");
    let r = ineq::eval_landau_theta(&pm, &pm, 1.0, &UINorm::operator()).expect("scalar witness");
    show("landau_theta scalar +-1", r.margin, 1e-12);

    let atom = HerglotzFn::single(0.0).expect("single atom");
    let x = ginibre_normalized(3, &mut rng);
    let zero = CMatrix::zeros(3);
    let r = ineq::eval_c1(&atom, &atom, &zero, &normal_in_disk(3, 0.9, &mut rng), &UINorm::operator())
        .expect("zero witness");
    show("c1 zero operator", r.margin, 1e-12);

    let r = ineq::eval_c2(&atom, &atom, &zero, &x, &UINorm::operator(), ineq::C2Sign::Minus)
        .expect("zero witness");
    show("c2_minus zero operator", r.margin, 1e-12);

    let r = ineq::eval_hilb(&atom, &atom, &zero, &zero, &x).expect("zero witness");
    show("hilb zero operators", r.margin, 1e-12);

    // Not an equality: at A = B = 0 the gap is exactly 2(sqrt(2)-1)|||X|||.
    let norm = UINorm::operator();
    let r = ineq::eval_p1(&atom, &atom, &zero, &zero, &x, &norm).expect("zero gap");
    let expected = 2.0 * (std::f64::consts::SQRT_2 - 1.0) * norm.eval(&x).expect("norm");
    show("p1 zero operators (known gap)", r.margin - expected, 1e-12);

    ok
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ok = match &cli.command {
        Command::Check(args) => match run_check(args) {
            Ok(clean) => clean,
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
        },
        Command::Identities(args) => run_identities(args),
        Command::Sharpness => run_sharpness(),
    };
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
