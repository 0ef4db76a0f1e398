//! `lumamark` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O, format or usage error, 2 the image cannot
//! carry or be compared for a watermark (too small, too few candidate
//! blocks, mismatched dimensions, crop outside the frame).

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lumamark::attacks::{self, AttackSpec, Rect};
use lumamark::codec::{self, MIN_RELIABLE_ALPHA};
use lumamark::experiment::{report_csv, run_report};
use lumamark::metrics::{decide, format_db, psnr, similarity};
use lumamark::pixmap::{read_rgb_image, read_watermark, write_rgb_image, write_watermark};
use lumamark::selection::DEFAULT_DELTA;
use lumamark::{corpus, EmbedParamsF64, Error, RgbImage, SelectionPlanF64, WatermarkBitmap};

#[derive(Parser)]
#[command(name = "lumamark", version, about = "Luminance watermarking for colour images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a 32x32 watermark into a P6 image.
    Embed {
        original: PathBuf,
        watermark: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Write the selection plan to this file.
        #[arg(long, value_name = "PATH")]
        dump_plan: Option<PathBuf>,
    },
    /// Extract a watermark by comparing a marked image with its original.
    Extract {
        original: PathBuf,
        watermarked: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Compare against this watermark and print similarity.
        #[arg(long, value_name = "WM.pbm")]
        reference: Option<PathBuf>,
        /// Read the selection plan from this file instead of recomputing it.
        #[arg(long, value_name = "PATH")]
        use_plan: Option<PathBuf>,
        /// Write the selection plan used to this file.
        #[arg(long, value_name = "PATH")]
        dump_plan: Option<PathBuf>,
    },
    /// Apply one robustness attack to a P6 image.
    Attack {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        attack: AttackArgs,
    },
    /// Print PSNR between two images and/or similarity between two watermarks.
    Metrics {
        #[arg(long, num_args = 2, value_names = ["REFERENCE", "TEST"])]
        images: Option<Vec<PathBuf>>,
        #[arg(long, num_args = 2, value_names = ["REFERENCE", "EXTRACTED"])]
        watermarks: Option<Vec<PathBuf>>,
    },
    /// Run the no-change / crop / compression / grayscale grid and print CSV.
    Report {
        original: PathBuf,
        watermark: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Write the synthetic test scenes and logo into a directory.
    Corpus {
        directory: PathBuf,
        #[arg(long, default_value_t = corpus::CORPUS_SIDE)]
        size: usize,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Luminance offset per watermark pixel.
    #[arg(long, default_value_t = codec::DEFAULT_ALPHA)]
    alpha: u32,
    /// Offset inside the log-average logarithm.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct AttackArgs {
    /// Keep rectangle X,Y,W,H and black out the rest.
    #[arg(long, value_name = "X,Y,W,H", value_parser = parse_rect)]
    crop: Option<Rect>,
    /// Replace every pixel with its rounded luminance.
    #[arg(long)]
    grayscale: bool,
    /// DCT quantization with compression factor in (0, 1].
    #[arg(long, value_name = "Q")]
    compress_quality: Option<f64>,
}

fn parse_rect(s: &str) -> Result<Rect, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y, w, h] => Ok(Rect::new(x, y, w, h)),
        _ => Err("expected four comma-separated integers X,Y,W,H".into()),
    }
}

#[derive(Debug)]
enum CliError {
    Io(PathBuf, std::io::Error),
    Input(String),
    Pipeline(Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(..) | CliError::Input(_) => 1,
            CliError::Pipeline(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Input(msg) => f.write_str(msg),
            CliError::Pipeline(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ImageTooSmall { .. }
            | Error::InsufficientCandidates { .. }
            | Error::DimensionMismatch { .. }
            | Error::RectOutOfBounds { .. } => CliError::Pipeline(e),
            other => CliError::Input(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn load_image(path: &Path) -> CliResult<RgbImage> {
    read_rgb_image(&read_file(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_watermark(path: &Path) -> CliResult<WatermarkBitmap> {
    read_watermark(&read_file(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_plan(path: &Path) -> CliResult<SelectionPlanF64> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Input(format!("{}: plan is not UTF-8", path.display())))?;
    SelectionPlanF64::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the destination directory and renames
/// it into place, so a failed command never leaves a partial output.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e| CliError::Io(path.to_path_buf(), e);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn embed_params(args: &ParamArgs) -> CliResult<EmbedParamsF64> {
    let params = EmbedParamsF64 { alpha: args.alpha, delta: args.delta };
    params.validate()?;
    if params.alpha < MIN_RELIABLE_ALPHA {
        eprintln!(
            "warning: alpha {} is below {MIN_RELIABLE_ALPHA}; rounding may flip extracted bits",
            params.alpha
        );
    }
    Ok(params)
}

fn print_plan(plan: &SelectionPlanF64) {
    let (cols, rows) = plan.grid();
    let blocks: Vec<String> = plan.blocks().iter().map(|b| format!("{},{}", b.col, b.row)).collect();
    println!("plan_grid={cols}x{rows}");
    println!("plan_image_log_avg={:.3}", plan.image_log_avg());
    println!("plan_blocks={}", blocks.join(" "));
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Embed { original, watermark, output, params, dump_plan } => {
            let params = embed_params(&params)?;
            let img = load_image(&original)?;
            let wm = load_watermark(&watermark)?;
            let plan = codec::plan_for(&img, params.delta)?;
            let marked = codec::embed_with_plan(&img, &wm, &plan, params.alpha)?;
            let db: f64 = psnr(&img, &marked)?;
            write_atomic(&output, &write_rgb_image(&marked))?;
            if let Some(path) = dump_plan {
                write_atomic(&path, plan.to_text().as_bytes())?;
            }
            println!("psnr_db={}", format_db(db));
            print_plan(&plan);
        }
        Command::Extract { original, watermarked, output, params, reference, use_plan, dump_plan } => {
            let params = embed_params(&params)?;
            let img = load_image(&original)?;
            let marked = load_image(&watermarked)?;
            let reference = reference.as_deref().map(load_watermark).transpose()?;
            if img.dimensions() != marked.dimensions() {
                return Err(CliError::Pipeline(Error::DimensionMismatch {
                    left_width: img.width(),
                    left_height: img.height(),
                    right_width: marked.width(),
                    right_height: marked.height(),
                }));
            }
            let plan = match use_plan {
                Some(path) => load_plan(&path)?,
                None => codec::plan_for(&img, params.delta)?,
            };
            let got = codec::extract_with_plan(&img, &marked, &plan)?;
            write_atomic(&output, &write_watermark(&got))?;
            if let Some(path) = dump_plan {
                write_atomic(&path, plan.to_text().as_bytes())?;
            }
            if let Some(reference) = reference {
                let sigma = similarity(&reference, &got);
                println!("sigma={sigma:.3}");
                println!("matched={}", decide(sigma));
            }
        }
        Command::Attack { input, output, attack } => {
            let spec = match (attack.crop, attack.grayscale, attack.compress_quality) {
                (Some(rect), _, _) => AttackSpec::Crop(rect),
                (_, true, _) => AttackSpec::Grayscale,
                (_, _, Some(quality)) => AttackSpec::Compress { quality },
                _ => unreachable!("clap enforces exactly one attack"),
            };
            spec.validate()?;
            let img = load_image(&input)?;
            let out = attacks::apply(&img, &spec)?;
            write_atomic(&output, &write_rgb_image(&out))?;
        }
        Command::Metrics { images, watermarks } => {
            if images.is_none() && watermarks.is_none() {
                return Err(CliError::Input("metrics needs --images and/or --watermarks".into()));
            }
            if let Some(paths) = images {
                let (a, b) = (load_image(&paths[0])?, load_image(&paths[1])?);
                let db: f64 = psnr(&a, &b)?;
                println!("psnr_db={}", format_db(db));
            }
            if let Some(paths) = watermarks {
                let (a, b) = (load_watermark(&paths[0])?, load_watermark(&paths[1])?);
                let sigma = similarity(&a, &b);
                println!("sigma={sigma:.3}");
                println!("matched={}", decide(sigma));
            }
        }
        Command::Report { original, watermark, params } => {
            let params = embed_params(&params)?;
            let img = load_image(&original)?;
            let wm = load_watermark(&watermark)?;
            let rows = run_report(&img, &wm, &params)?;
            print!("{}", report_csv(&rows));
        }
        Command::Corpus { directory, size } => {
            if size < 8 {
                return Err(CliError::Input(format!("size must be at least 8, got {size}")));
            }
            fs::create_dir_all(&directory).map_err(|e| CliError::Io(directory.clone(), e))?;
            for scene in corpus::Scene::ALL {
                let path = directory.join(format!("{}.ppm", scene.name()));
                write_atomic(&path, &write_rgb_image(&scene.render(size, size)))?;
                println!("{}", path.display());
            }
            let path = directory.join("logo.pbm");
            write_atomic(&path, &write_watermark(&corpus::logo()))?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
