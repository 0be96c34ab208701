//! `pltool`: command-line front end for the landscape toolbox.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use landscape_toolbox::algebra::LandscapeCombination;
use landscape_toolbox::barcode::{
    parse_barcode, random_barcode, truncate_infinite, write_barcode, InfinitePolicy,
};
use landscape_toolbox::grid::GridLandscape;
use landscape_toolbox::io::{
    emit_gnuplot, format_general, load_config, load_file_list, load_input, read_file_list,
    read_landscape_file, read_text, write_atomic, write_landscape_file, FromInput, LoadedList,
    Mode, ToolboxConfig,
};
use landscape_toolbox::metrics::Norm;
use landscape_toolbox::stats::{
    classifier_all_dims, classifier_construct, distance_matrix, p_value_matrix_text,
    pairwise_permutation_matrix_with_progress, Classification, ClassifierModel, ClassifyMode,
};

#[derive(Parser)]
#[command(name = "pltool", version, about = "Persistence landscape toolbox")]
struct Cli {
    /// Configuration file (defaults to ./configure when present).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Average the landscapes of all files in a file list.
    Average { list: PathBuf, output: PathBuf },

    /// Write gnuplot data for layers k_from..k_to (0-based, end exclusive).
    Plot {
        file: PathBuf,
        k_from: usize,
        k_to: usize,
        output: PathBuf,
    },

    /// Write gnuplot data for every file of a list into a directory.
    PlotMany {
        list: PathBuf,
        k_from: usize,
        k_to: usize,
        outdir: PathBuf,
    },

    /// Print the p-norm of every file of a list (p = -1: supremum norm).
    #[command(allow_negative_numbers = true)]
    Norms { list: PathBuf, p: f64 },

    /// Write the matrix of pairwise p-distances (p = -1: supremum norm).
    #[command(allow_negative_numbers = true)]
    DistanceMatrix {
        list: PathBuf,
        p: f64,
        output: PathBuf,
    },

    /// Pairwise permutation tests: M LIST... TRIALS P.
    #[command(allow_negative_numbers = true)]
    PermutationTest {
        #[arg(num_args = 4.., value_name = "ARGS")]
        args: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Nearest-average classifier on one degree:
    /// -construct N LIST...,
    /// -classify N QUERIES P Q,
    /// -both N LIST... QUERIES P Q.
    #[command(allow_negative_numbers = true)]
    Classify {
        /// -construct, -classify or -both.
        #[arg(allow_hyphen_values = true)]
        mode: String,
        #[arg(num_args = 1.., value_name = "ARGS")]
        args: Vec<String>,
        /// Where class_<i>.lan model files are written and read.
        #[arg(long, default_value = ".")]
        model_dir: PathBuf,
        /// Where classification.txt is written.
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },

    /// Nearest-average classifier summing distances over degrees:
    /// N D, then for each class its D lists (one per degree), then D query
    /// lists, then P Q.
    #[command(allow_negative_numbers = true)]
    ClassifyAllDims {
        #[arg(num_args = 4.., value_name = "ARGS")]
        args: Vec<String>,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },

    /// Write COUNT random barcodes of N pairs each, plus a files.txt list.
    Generate {
        n: usize,
        count: usize,
        seed: u64,
        outdir: PathBuf,
    },

    /// Replace infinite endpoints by -CUTOFF / CUTOFF and print the barcode.
    #[command(allow_negative_numbers = true)]
    Truncate {
        file: PathBuf,
        cutoff: f64,
        /// Drop infinite intervals instead of truncating them.
        #[arg(long)]
        drop: bool,
        /// Write to a file instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pltool: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load_toolbox_config(path: Option<&Path>) -> Result<ToolboxConfig> {
    match path {
        Some(p) => Ok(load_config(p)?),
        None if Path::new("configure").is_file() => Ok(load_config(Path::new("configure"))?),
        None => Ok(ToolboxConfig::default()),
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = load_toolbox_config(cli.config.as_deref())?;
    match config.mode {
        Mode::Exact => dispatch::<LandscapeCombination>(cli.command, &config),
        Mode::Grid(_) => dispatch::<GridLandscape>(cli.command, &config),
    }
}

fn report_warnings(warnings: &[(PathBuf, landscape_toolbox::barcode::Warning)]) {
    for (path, w) in warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
}

fn load_list<T: FromInput>(path: &Path, config: &ToolboxConfig) -> Result<Vec<T>> {
    let (items, warnings): LoadedList<T> = load_file_list(path, config)?;
    report_warnings(&warnings);
    Ok(items)
}

fn load_one<T: FromInput>(path: &Path, config: &ToolboxConfig) -> Result<T> {
    let parsed = load_input::<T>(path, config)?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(parsed.value)
}

fn norm_arg(p: f64) -> Result<Norm> {
    Norm::from_exponent(p).with_context(|| format!("bad norm exponent {p}"))
}

fn parse_arg<T: std::str::FromStr>(value: &str, what: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| anyhow::anyhow!("{what}: cannot parse {value:?}"))
}

fn dispatch<T: FromInput>(command: Command, config: &ToolboxConfig) -> Result<()> {
    let options = config.parse_options();
    match command {
        Command::Average { list, output } => {
            let items = load_list::<T>(&list, config)?;
            let refs: Vec<&T> = items.iter().collect();
            let avg = T::average_configured(&refs, config)?;
            write_landscape_file(&avg.to_landscape()?, &output, &options)?;
        }
        Command::Plot {
            file,
            k_from,
            k_to,
            output,
        } => {
            let landscape = load_one::<T>(&file, config)?.to_landscape()?;
            for notice in emit_gnuplot(&landscape, k_from, k_to, &output)? {
                eprintln!("note: {notice}");
            }
        }
        Command::PlotMany {
            list,
            k_from,
            k_to,
            outdir,
        } => {
            std::fs::create_dir_all(&outdir)
                .with_context(|| format!("creating {}", outdir.display()))?;
            for (i, file) in read_file_list(&list)?.iter().enumerate() {
                let landscape = load_one::<T>(file, config)?.to_landscape()?;
                let stem = file
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let out = outdir.join(format!("{i}_{stem}.dat"));
                for notice in emit_gnuplot(&landscape, k_from, k_to, &out)? {
                    eprintln!("note: {}: {notice}", file.display());
                }
            }
        }
        Command::Norms { list, p } => {
            let norm = norm_arg(p)?;
            let mut out = String::new();
            for item in load_list::<T>(&list, config)? {
                writeln!(out, "{}", format_general(item.norm(norm)?, 6))?;
            }
            print!("{out}");
        }
        Command::DistanceMatrix { list, p, output } => {
            let items = load_list::<T>(&list, config)?;
            let matrix = distance_matrix(&items, norm_arg(p)?)?;
            write_atomic(&output, matrix.to_text().as_bytes())?;
        }
        Command::PermutationTest { args, seed } => permutation_test::<T>(&args, seed, config)?,
        Command::Classify {
            mode,
            args,
            model_dir,
            output_dir,
        } => classify::<T>(&mode, &args, &model_dir, &output_dir, config)?,
        Command::ClassifyAllDims { args, output_dir } => {
            classify_all_dims::<T>(&args, &output_dir, config)?
        }
        Command::Generate {
            n,
            count,
            seed,
            outdir,
        } => {
            std::fs::create_dir_all(&outdir)
                .with_context(|| format!("creating {}", outdir.display()))?;
            let mut list = String::new();
            for i in 0..count {
                let name = format!("barcode_{i}.txt");
                let barcode = random_barcode(n, seed.wrapping_add(i as u64));
                write_atomic(
                    &outdir.join(&name),
                    write_barcode(&barcode, &options).as_bytes(),
                )?;
                writeln!(list, "{name}")?;
            }
            write_atomic(&outdir.join("files.txt"), list.as_bytes())?;
        }
        Command::Truncate {
            file,
            cutoff,
            drop,
            output,
        } => {
            let parsed = parse_barcode(&read_text(&file)?, &options)
                .with_context(|| file.display().to_string())?;
            for w in &parsed.warnings {
                eprintln!("warning: {}: {w}", file.display());
            }
            let policy = if drop {
                InfinitePolicy::Drop
            } else {
                InfinitePolicy::Truncate
            };
            let text = write_barcode(&truncate_infinite(&parsed.value, cutoff, policy)?, &options);
            match output {
                Some(path) => write_atomic(&path, text.as_bytes())?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn permutation_test<T: FromInput>(
    args: &[String],
    seed: u64,
    config: &ToolboxConfig,
) -> Result<()> {
    let m: usize = parse_arg(&args[0], "number of classes")?;
    if args.len() != m + 3 {
        bail!(
            "expected M, M class lists, trials and p ({} arguments), got {}",
            m + 3,
            args.len()
        );
    }
    let classes = args[1..=m]
        .iter()
        .map(|list| load_list::<T>(Path::new(list), config))
        .collect::<Result<Vec<_>>>()?;
    let trials: usize = parse_arg(&args[m + 1], "number of trials")?;
    let norm = norm_arg(parse_arg(&args[m + 2], "p")?)?;
    let step = (trials / 10).max(1);
    let matrix =
        pairwise_permutation_matrix_with_progress(&classes, trials, norm, seed, |i, j, done| {
            if done % step == 0 || done == trials {
                eprintln!("classes {} and {}: {done}/{trials} trials", i + 1, j + 1);
            }
        })?;
    print!("{}", p_value_matrix_text(&matrix));
    Ok(())
}

fn model_path(dir: &Path, class: usize) -> PathBuf {
    dir.join(format!("class_{}.lan", class + 1))
}

fn classification_text(results: &[Classification]) -> String {
    let mut out = String::new();
    for r in results {
        match r {
            Classification::Best { class, .. } => {
                let _ = writeln!(out, "{}", class + 1);
            }
            Classification::Ranked(list) => {
                for (class, d) in list {
                    let _ = write!(out, "({},{}) ", class + 1, format_general(*d, 6));
                }
                out.push('\n');
            }
        }
    }
    out
}

fn classify_mode(q: &str) -> Result<ClassifyMode> {
    match q {
        "0" => Ok(ClassifyMode::Best),
        "1" => Ok(ClassifyMode::Ranked),
        _ => bail!("q must be 0 or 1, got {q:?}"),
    }
}

fn construct<T: FromInput>(
    lists: &[String],
    config: &ToolboxConfig,
    norm: Norm,
) -> Result<ClassifierModel<T>> {
    let training = lists
        .iter()
        .map(|list| load_list::<T>(Path::new(list), config))
        .collect::<Result<Vec<_>>>()?;
    Ok(classifier_construct(&training, norm)?)
}

fn run_queries<T: FromInput>(
    model: &ClassifierModel<T>,
    queries: &Path,
    mode: ClassifyMode,
    output_dir: &Path,
    config: &ToolboxConfig,
) -> Result<()> {
    let results = load_list::<T>(queries, config)?
        .iter()
        .map(|q| model.classify(q, mode))
        .collect::<Result<Vec<_>, _>>()?;
    std::fs::create_dir_all(output_dir)
        .with_context(|| format!("creating {}", output_dir.display()))?;
    write_atomic(
        &output_dir.join("classification.txt"),
        classification_text(&results).as_bytes(),
    )?;
    Ok(())
}

fn classify<T: FromInput>(
    mode: &str,
    args: &[String],
    model_dir: &Path,
    output_dir: &Path,
    config: &ToolboxConfig,
) -> Result<()> {
    let usage = "usage: classify -construct N LIST... | -classify N QUERIES P Q | -both N LIST... QUERIES P Q";
    if args.is_empty() {
        bail!("{usage}");
    }
    let n: usize = parse_arg(&args[0], "number of classes")?;
    let options = config.parse_options();
    match mode {
        "-construct" => {
            if args.len() != n + 1 {
                bail!("{usage}");
            }
            // The norm plays no part in building the averages.
            let model = construct::<T>(&args[1..], config, Norm::Sup)?;
            std::fs::create_dir_all(model_dir)
                .with_context(|| format!("creating {}", model_dir.display()))?;
            for (i, avg) in model.class_averages.iter().enumerate() {
                write_landscape_file(&avg.to_landscape()?, &model_path(model_dir, i), &options)?;
            }
        }
        "-classify" => {
            if args.len() != 4 {
                bail!("{usage}");
            }
            let norm = norm_arg(parse_arg(&args[2], "p")?)?;
            let ranking = classify_mode(&args[3])?;
            let averages = (0..n)
                .map(|i| {
                    let path = model_path(model_dir, i);
                    let landscape = read_landscape_file(&path, &options)?;
                    T::from_landscape(landscape, config).map_err(|e| e.into())
                })
                .collect::<Result<Vec<_>>>()?;
            let model = ClassifierModel::from_averages(averages, norm)?;
            run_queries(&model, Path::new(&args[1]), ranking, output_dir, config)?;
        }
        "-both" => {
            if args.len() != n + 4 {
                bail!("{usage}");
            }
            let norm = norm_arg(parse_arg(&args[n + 2], "p")?)?;
            let ranking = classify_mode(&args[n + 3])?;
            let model = construct::<T>(&args[1..n + 1], config, norm)?;
            run_queries(&model, Path::new(&args[n + 1]), ranking, output_dir, config)?;
        }
        other => bail!("unknown classifier mode {other:?}; {usage}"),
    }
    Ok(())
}

fn classify_all_dims<T: FromInput>(
    args: &[String],
    output_dir: &Path,
    config: &ToolboxConfig,
) -> Result<()> {
    let n: usize = parse_arg(&args[0], "number of classes")?;
    let d: usize = parse_arg(&args[1], "number of degrees")?;
    let expected = 2 + n * d + d + 2;
    if args.len() != expected {
        bail!("expected N D, N*D training lists, D query lists, P and Q ({expected} arguments), got {}", args.len());
    }
    let norm = norm_arg(parse_arg(&args[expected - 2], "p")?)?;
    let mode = classify_mode(&args[expected - 1])?;
    let training = &args[2..2 + n * d];
    let mut models = BTreeMap::new();
    for degree in 0..d {
        let lists: Vec<String> = (0..n)
            .map(|class| training[class * d + degree].clone())
            .collect();
        models.insert(degree, construct::<T>(&lists, config, norm)?);
    }
    let query_lists = &args[2 + n * d..2 + n * d + d];
    let mut per_degree: Vec<Vec<T>> = Vec::with_capacity(d);
    for list in query_lists {
        per_degree.push(load_list::<T>(Path::new(list), config)?);
    }
    let count = per_degree[0].len();
    if per_degree.iter().any(|q| q.len() != count) {
        bail!("query lists for different degrees have different lengths");
    }
    let mut results = Vec::with_capacity(count);
    let mut columns: Vec<std::vec::IntoIter<T>> =
        per_degree.into_iter().map(Vec::into_iter).collect();
    for _ in 0..count {
        let queries: BTreeMap<usize, T> = columns
            .iter_mut()
            .enumerate()
            .map(|(degree, it)| (degree, it.next().expect("equal lengths")))
            .collect();
        results.push(classifier_all_dims(&models, &queries, norm, mode)?);
    }
    std::fs::create_dir_all(output_dir)
        .with_context(|| format!("creating {}", output_dir.display()))?;
    write_atomic(
        &output_dir.join("classification.txt"),
        classification_text(&results).as_bytes(),
    )?;
    Ok(())
}
