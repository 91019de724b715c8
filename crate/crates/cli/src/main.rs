use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use idempotent_core::families::{
    build_bk, build_ck, build_function_algebra, build_group_algebra, build_sekine, named_group, parse_cayley,
    recover_group, sekine_gamma, sekine_index_group, sekine_k, sekine_phi_l, subgroup_haar_idempotent, ClassicalKind,
    FiniteGroup, SubgroupHost,
};
use idempotent_core::hypergroup::{canonical_subhypergroup, verify_hypergroup, FiniteQuantumHypergroup};
use idempotent_core::io::{
    canonical_string, element_to_string, functional_to_string, read_coeffs, read_functional, read_structure,
    structure_to_string, vector_value, StructureFile,
};
use idempotent_core::lattice::{build_lattice, check_distributivity, DEFAULT_MAX_CLOSURE};
use idempotent_core::qgroup::{dual, verify_quantum_group, AxiomReport};
use idempotent_core::states::{discover_idempotents, forward_fourier, Functional};
use idempotent_core::{Error, QuantumStructure, Tolerance};

#[derive(Parser)]
#[command(name = "fqg", version, about = "Idempotent states on finite quantum groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Relative equality tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Eigenvalue floor for positivity tests.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_psd: f64,
    /// Report format; `classify` defaults to json, everything else to text.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    COfGroup,
    GroupAlgebra,
    Sekine,
    Bk,
    Ck,
}

#[derive(Clone, Copy, ValueEnum)]
enum StateKind {
    Haar,
    Counit,
    Phi,
    Gamma,
    Subgroup,
}

#[derive(Args)]
struct Discovery {
    /// Number of random seed states.
    #[arg(long, default_value_t = 1000)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in quantum group or hypergroup.
    Build {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        k: Option<usize>,
        /// Cayley table file `{"elements": [...], "table": [[...]]}`.
        #[arg(long, conflicts_with = "group")]
        cayley: Option<PathBuf>,
        /// Named group: Z<n>, Z2xZ2, S3, S4, D<n>, Q8.
        #[arg(long)]
        group: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check every axiom; hypergroup axioms when the file says Δ is not multiplicative.
    Verify {
        structure: PathBuf,
        /// Check hypergroup axioms regardless of the file flag.
        #[arg(long)]
        hypergroup: bool,
    },
    /// Classify a functional: idempotency, Haar property, projection, null space.
    Classify { structure: PathBuf, functional: PathBuf },
    /// Cesàro limits of random states, one functional file per distinct idempotent.
    Discover {
        structure: PathBuf,
        #[command(flatten)]
        discovery: Discovery,
        /// Directory for the functional files.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Close idempotents under ∨/∧ and write the Hasse diagram and order table.
    Lattice {
        structure: PathBuf,
        /// Idempotent functional files; discovery is used when none are given.
        functionals: Vec<PathBuf>,
        /// Seed with the subgroup states of C(G), C*(G) or A_k.
        #[arg(long)]
        enumerate_subgroups: bool,
        #[command(flatten)]
        discovery: Discovery,
        #[arg(long, default_value_t = DEFAULT_MAX_CLOSURE)]
        max_closure: usize,
        /// Output prefix: `<prefix>.dot` and `<prefix>.csv`; DOT to stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compress by the projection of an idempotent state.
    Hypergroup {
        structure: PathBuf,
        functional: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the dual quantum group.
    Dual {
        structure: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Inverse Fourier transform of a functional, or forward transform of an element.
    Fourier {
        structure: PathBuf,
        #[arg(long, conflicts_with = "element", required_unless_present = "element")]
        functional: Option<PathBuf>,
        #[arg(long)]
        element: Option<PathBuf>,
        /// Write the normalized projection `p̂` instead of `F⁻¹φ`.
        #[arg(long, requires = "functional")]
        projection: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convolution `a ⋆ b`, or `a ⊛ b` with `--box`.
    Convolve {
        structure: PathBuf,
        a: PathBuf,
        b: PathBuf,
        #[arg(long = "box")]
        boxed: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a named state of the host.
    State {
        structure: PathBuf,
        #[arg(value_enum)]
        kind: StateKind,
        /// `l` for `phi`.
        #[arg(long)]
        l: Option<usize>,
        /// `p` for `gamma`.
        #[arg(long)]
        p: Option<usize>,
        /// Subgroup generators, by group element label.
        #[arg(long = "gen")]
        generators: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("verification failed")]
    Failed,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed | CliError::Core(Error::VerificationFailed(_)) => 1,
            CliError::Usage(_) | CliError::File { .. } => 2,
            CliError::Core(e) => match e {
                Error::DimensionMismatch { .. }
                | Error::HostMismatch
                | Error::NotIdempotent
                | Error::NotAGroup(_)
                | Error::NotASubgroup
                | Error::InvalidK(_)
                | Error::InvalidParameters(_)
                | Error::Format(_)
                | Error::Json(_)
                | Error::Io(_) => 2,
                _ => 3,
            },
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::File { path: path.to_owned(), source })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::File { path: path.to_owned(), source })
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path, tol: &Tolerance) -> Result<StructureFile> {
    Ok(read_structure(&read(path)?, tol)?)
}

fn load_functional<'h>(host: &'h QuantumStructure, path: &Path) -> Result<Functional<'h>> {
    Ok(read_functional(host, &read(path)?)?)
}

fn report_value(r: &AxiomReport) -> Value {
    let checks: Vec<Value> =
        r.checks.iter().map(|c| json!({ "name": c.name, "residual": c.residual, "passed": c.passed })).collect();
    json!({ "verdict": r.verdict(), "checks": checks })
}

fn print_report(r: &AxiomReport, format: Format) {
    match format {
        Format::Text => println!("{r}"),
        Format::Json => print!("{}", canonical_string(&report_value(r))),
    }
}

fn group_from_args(cayley: Option<&Path>, name: Option<&str>) -> Result<FiniteGroup> {
    match (cayley, name) {
        (Some(path), _) => {
            let doc: Value = serde_json::from_str(&read(path)?).map_err(Error::from)?;
            Ok(parse_cayley(&doc)?)
        }
        (None, Some(name)) => Ok(named_group(name)?),
        (None, None) => Err(CliError::Usage("this family needs --cayley or --group".into())),
    }
}

fn cmd_build(family: Family, k: Option<usize>, cayley: Option<&Path>, group: Option<&str>, tol: &Tolerance) -> Result<String> {
    let need_k = || k.ok_or_else(|| CliError::Usage("this family needs --k".into()));
    Ok(match family {
        Family::COfGroup => structure_to_string(build_function_algebra(&group_from_args(cayley, group)?, tol)?.structure(), None),
        Family::GroupAlgebra => structure_to_string(build_group_algebra(&group_from_args(cayley, group)?, tol)?.structure(), None),
        Family::Sekine => structure_to_string(build_sekine(need_k()?, tol)?.structure(), None),
        Family::Bk => hypergroup_string(&build_bk(need_k()?, tol)?),
        Family::Ck => hypergroup_string(&build_ck(need_k()?, tol)?),
    })
}

fn hypergroup_string(h: &FiniteQuantumHypergroup) -> String {
    structure_to_string(h.structure(), Some(h.coproduct_multiplicative()))
}

/// Subgroup states of a recognised host, with subgroup labels.
fn subgroup_states<'h>(host: &'h QuantumStructure, tol: &Tolerance) -> Result<(Vec<Functional<'h>>, Vec<String>)> {
    let mut states = Vec::new();
    let mut labels = Vec::new();
    if let Ok((kind, g)) = recover_group(host, tol) {
        for h in g.subgroups() {
            let which = match kind {
                ClassicalKind::Functions => SubgroupHost::Functions(&g),
                ClassicalKind::GroupAlgebra => SubgroupHost::GroupAlgebra(&g),
            };
            states.push(subgroup_haar_idempotent(host, which, &h, tol)?);
            labels.push(g.subgroup_label(&h));
        }
    } else if is_sekine(host) {
        let k = sekine_k(host)?;
        let g = sekine_index_group(k);
        for h in g.subgroups() {
            states.push(subgroup_haar_idempotent(host, SubgroupHost::Sekine, &h, tol)?);
            labels.push(g.subgroup_label(&h));
        }
    } else {
        return Err(CliError::Usage("--enumerate-subgroups needs C(G), C*(G) or A_k in its standard basis".into()));
    }
    Ok((states, labels))
}

fn is_sekine(host: &QuantumStructure) -> bool {
    host.basis_labels().first().is_some_and(|l| l == "d[0,0]") && sekine_k(host).is_ok()
}

fn classification_value(f: &Functional<'_>, tol: &Tolerance) -> Result<Value> {
    let c = f.classify(tol)?;
    Ok(json!({
        "is_idempotent": c.is_idempotent,
        "is_haar": c.is_haar,
        "projection": c.projection.as_ref().map_or(Value::Null, vector_value),
        "null_space_dim": c.null_space_dim,
    }))
}

fn run(cli: Cli) -> Result<()> {
    let tol = Tolerance::new(cli.global.tol, cli.global.tol_psd)?;
    let format = cli.global.format;
    let text_default = format.unwrap_or(Format::Text);
    match cli.command {
        Command::Build { family, k, cayley, group, output } => {
            let text = cmd_build(family, k, cayley.as_deref(), group.as_deref(), &tol)?;
            emit(output.as_deref(), &text)
        }
        Command::Verify { structure, hypergroup } => {
            let file = load(&structure, &tol)?;
            let as_hypergroup = hypergroup || file.coproduct_multiplicative == Some(false);
            let report = if as_hypergroup {
                verify_hypergroup(&file.structure, &tol)
            } else {
                verify_quantum_group(&file.structure, &tol)
            };
            print_report(&report, text_default);
            if report.verdict() {
                Ok(())
            } else {
                Err(CliError::Failed)
            }
        }
        Command::Classify { structure, functional } => {
            let file = load(&structure, &tol)?;
            let f = load_functional(&file.structure, &functional)?;
            let v = classification_value(&f, &tol)?;
            match format.unwrap_or(Format::Json) {
                Format::Json => print!("{}", canonical_string(&v)),
                Format::Text => {
                    for key in ["is_idempotent", "is_haar", "null_space_dim"] {
                        println!("{key}: {}", v[key]);
                    }
                }
            }
            Ok(())
        }
        Command::Discover { structure, discovery, output } => {
            let file = load(&structure, &tol)?;
            let found = discover_idempotents(&file.structure, discovery.seeds, discovery.rng_seed, &tol);
            let names: Vec<String> = (0..found.idempotents.len()).map(|i| format!("idempotent_{i:03}.json")).collect();
            if let Some(dir) = &output {
                fs::create_dir_all(dir).map_err(|source| CliError::File { path: dir.clone(), source })?;
                for (f, name) in found.idempotents.iter().zip(&names) {
                    write(&dir.join(name), &functional_to_string(f))?;
                }
            }
            match text_default {
                Format::Text => {
                    println!("{} idempotent states, {} seeds dropped", found.idempotents.len(), found.dropped);
                    for (f, name) in found.idempotents.iter().zip(&names) {
                        let c = f.classify(&tol)?;
                        println!("{name}  {}", if c.is_haar { "haar" } else { "non-haar" });
                    }
                }
                Format::Json => {
                    let list: Vec<Value> = found
                        .idempotents
                        .iter()
                        .zip(&names)
                        .map(|(f, name)| Ok(json!({ "file": name, "classification": classification_value(f, &tol)? })))
                        .collect::<Result<_>>()?;
                    print!("{}", canonical_string(&json!({ "dropped": found.dropped, "idempotents": list })));
                }
            }
            Ok(())
        }
        Command::Lattice { structure, functionals, enumerate_subgroups, discovery, max_closure, output } => {
            let file = load(&structure, &tol)?;
            let host = &file.structure;
            let (seeds, mut labels) = if enumerate_subgroups {
                subgroup_states(host, &tol)?
            } else if !functionals.is_empty() {
                let fs = functionals.iter().map(|p| load_functional(host, p)).collect::<Result<Vec<_>>>()?;
                let labels = functionals
                    .iter()
                    .map(|p| p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned()))
                    .collect();
                (fs, labels)
            } else {
                (discover_idempotents(host, discovery.seeds, discovery.rng_seed, &tol).idempotents, Vec::new())
            };
            let lattice = build_lattice(&seeds, &tol, max_closure)?;
            // seeds are deduplicated in order, so labels can only be kept when none merged
            if lattice.seeded != seeds.len() {
                labels.clear();
            }
            let dot = lattice.to_dot(&labels);
            let csv = lattice.order_csv(&labels);
            match &output {
                Some(prefix) => {
                    write(&prefix.with_extension("dot"), &dot)?;
                    write(&prefix.with_extension("csv"), &csv)?;
                    let violations = check_distributivity(&lattice).len();
                    match text_default {
                        Format::Text => println!(
                            "{} elements ({} seeded), {} distributivity violations",
                            lattice.len(),
                            lattice.seeded,
                            violations
                        ),
                        Format::Json => print!(
                            "{}",
                            canonical_string(&json!({
                                "elements": lattice.len(),
                                "seeded": lattice.seeded,
                                "distributivity_violations": violations,
                            }))
                        ),
                    }
                }
                None => print!("{dot}"),
            }
            Ok(())
        }
        Command::Hypergroup { structure, functional, output } => {
            let file = load(&structure, &tol)?;
            let f = load_functional(&file.structure, &functional)?;
            let sub = canonical_subhypergroup(&f, &tol)?;
            let h = &sub.compression.hypergroup;
            if let Some(path) = &output {
                write(path, &hypergroup_string(h))?;
            }
            let mut m = Map::new();
            m.insert("dim".into(), sub.compression.dim().into());
            m.insert("is_haar".into(), sub.classification.is_haar.into());
            m.insert("coproduct_multiplicative".into(), h.coproduct_multiplicative().into());
            m.insert("multiplicativity_residual".into(), sub.compression.multiplicativity_residual.into());
            m.insert("haar_factorization_residual".into(), sub.haar_factorization_residual.into());
            let v = Value::Object(m);
            match text_default {
                Format::Text => {
                    for key in ["dim", "is_haar", "coproduct_multiplicative", "multiplicativity_residual", "haar_factorization_residual"] {
                        println!("{key}: {}", v[key]);
                    }
                }
                Format::Json => print!("{}", canonical_string(&v)),
            }
            if output.is_none() {
                print!("{}", hypergroup_string(h));
            }
            Ok(())
        }
        Command::Dual { structure, output } => {
            let file = load(&structure, &tol)?;
            let d = dual(&file.structure, &tol)?;
            emit(output.as_deref(), &structure_to_string(&d, file.coproduct_multiplicative))
        }
        Command::Fourier { structure, functional, element, projection, output } => {
            let file = load(&structure, &tol)?;
            let host = &file.structure;
            let text = match (functional, element) {
                (Some(fp), _) => {
                    let f = load_functional(host, &fp)?;
                    let x = if projection { f.associated_projection(&tol)? } else { f.inverse_fourier()? };
                    element_to_string(host, &x)
                }
                (None, Some(ep)) => {
                    let a = read_coeffs(host, &read(&ep)?)?;
                    functional_to_string(&forward_fourier(host, &a))
                }
                (None, None) => return Err(CliError::Usage("need --functional or --element".into())),
            };
            emit(output.as_deref(), &text)
        }
        Command::Convolve { structure, a, b, boxed, output } => {
            let file = load(&structure, &tol)?;
            let fa = load_functional(&file.structure, &a)?;
            let fb = load_functional(&file.structure, &b)?;
            let r = if boxed { fa.box_product(&fb, &tol)? } else { fa.convolve(&fb)? };
            emit(output.as_deref(), &functional_to_string(&r))
        }
        Command::State { structure, kind, l, p, generators, output } => {
            let file = load(&structure, &tol)?;
            let host = &file.structure;
            let missing = |what: &str| CliError::Usage(format!("this state needs --{what}"));
            let f = match kind {
                StateKind::Haar => Functional::haar(host),
                StateKind::Counit => Functional::counit(host),
                StateKind::Phi => sekine_phi_l(host, l.ok_or_else(|| missing("l"))?, &tol)?,
                StateKind::Gamma => sekine_gamma(host, p.ok_or_else(|| missing("p"))?, &tol)?,
                StateKind::Subgroup => subgroup_by_generators(host, &generators, &tol)?,
            };
            emit(output.as_deref(), &functional_to_string(&f))
        }
    }
}

fn subgroup_by_generators<'h>(host: &'h QuantumStructure, gens: &[String], tol: &Tolerance) -> Result<Functional<'h>> {
    let index = |g: &FiniteGroup, label: &str| {
        g.index_of(label).ok_or_else(|| CliError::Usage(format!("no group element labelled {label:?}")))
    };
    if let Ok((kind, g)) = recover_group(host, tol) {
        let idx = gens.iter().map(|s| index(&g, s)).collect::<Result<Vec<_>>>()?;
        let h = g.generated(&idx);
        let which = match kind {
            ClassicalKind::Functions => SubgroupHost::Functions(&g),
            ClassicalKind::GroupAlgebra => SubgroupHost::GroupAlgebra(&g),
        };
        Ok(subgroup_haar_idempotent(host, which, &h, tol)?)
    } else if is_sekine(host) {
        let g = sekine_index_group(sekine_k(host)?);
        let idx = gens.iter().map(|s| index(&g, s)).collect::<Result<Vec<_>>>()?;
        Ok(subgroup_haar_idempotent(host, SubgroupHost::Sekine, &g.generated(&idx), tol)?)
    } else {
        Err(CliError::Usage("subgroup states need C(G), C*(G) or A_k in its standard basis".into()))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Failed) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
