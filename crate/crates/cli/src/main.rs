use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use shapejulia::geometry::PlaneWindow;
use shapejulia::render::Palette;
use shapejulia::SLevel;
use shapejulia_cli::{
    cmd_capacity, cmd_fit, cmd_render, cmd_verify, parse_length, parse_s, CliError, FitConfig, MaskInput,
    RenderOptions, VerifyOptions, EXIT_INPUT, THREADS_ENV,
};

/// Approximate planar shapes by filled Julia sets of explicit polynomials.
#[derive(Parser)]
#[command(name = "shapejulia", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct WindowArgs {
    /// Side length of the square plane window the image is fitted into.
    #[arg(long, default_value_t = 4.0)]
    window_side: f64,
    /// Window center, real part.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    window_re: f64,
    /// Window center, imaginary part.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    window_im: f64,
    /// Luminance below this is inside the shape.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
}

impl WindowArgs {
    fn input(&self) -> MaskInput {
        MaskInput {
            window: PlaneWindow {
                center: Complex64::new(self.window_re, self.window_im),
                side: self.window_side,
            },
            threshold: self.threshold,
        }
    }
}

/// A plane length or a keyword standing for "none given".
#[derive(Clone, Copy)]
struct Length(Option<f64>);

fn parse_length_arg(text: &str) -> Result<Length, String> {
    parse_length(text).map(Length)
}

#[derive(Clone, Copy, ValueEnum)]
enum PaletteArg {
    Binary,
    Iter,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a polynomial to a mask image.
    Fit {
        mask: PathBuf,
        /// Output polynomial JSON.
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long)]
        n: usize,
        /// Escape parameter, or "auto" for 1/n.
        #[arg(long, default_value = "auto", value_parser = parse_s)]
        s: SLevel,
        /// Boundary sample spacing in plane units, or "auto".
        #[arg(long, default_value = "auto", value_parser = parse_length_arg)]
        boundary_spacing: Length,
        #[arg(long, default_value_t = 0)]
        seed_index: usize,
        /// Regularization radius in plane units, or "off".
        #[arg(long, default_value = "off", value_parser = parse_length_arg)]
        epsilon: Length,
        /// Build the lemniscate polynomial z·(q/‖q‖)^k instead.
        #[arg(long)]
        hilbert_k: Option<u32>,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Render a fitted polynomial's filled Julia set to PNG.
    Render {
        poly: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        res: usize,
        #[arg(long, default_value_t = 60)]
        max_iter: u32,
        #[arg(long, value_enum, default_value = "iter")]
        palette: PaletteArg,
        /// Half-side of the square window about 0 (default 1.2·R·e^s).
        #[arg(long)]
        half_side: Option<f64>,
    },
    /// Check containment and the sufficient conditions; prints a JSON report.
    Verify {
        mask: PathBuf,
        poly: PathBuf,
        #[arg(long, default_value_t = 1000)]
        res: usize,
        #[arg(long, default_value_t = 60)]
        max_iter: u32,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Estimate the logarithmic capacity of a mask's boundary.
    Capacity {
        mask: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "auto", value_parser = parse_length_arg)]
        boundary_spacing: Length,
        #[command(flatten)]
        window: WindowArgs,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Fit {
            mask,
            out,
            n,
            s,
            boundary_spacing,
            seed_index,
            epsilon,
            hilbert_k,
            window,
        } => {
            let cfg = FitConfig {
                n,
                s,
                boundary_spacing: boundary_spacing.0,
                seed_index,
                epsilon_regularize: epsilon.0,
                hilbert_k,
                input: window.input(),
            };
            let outputs = cmd_fit(&mask, &out, &cfg)?;
            println!("{}", outputs.polynomial.display());
        }
        Command::Render {
            poly,
            out,
            res,
            max_iter,
            palette,
            half_side,
        } => {
            let opts = RenderOptions {
                resolution: res,
                max_iter,
                palette: match palette {
                    PaletteArg::Binary => Palette::Binary,
                    PaletteArg::Iter => Palette::Iter,
                },
                half_side,
            };
            cmd_render(&poly, &out, &opts)?;
            println!("{}", out.display());
        }
        Command::Verify {
            mask,
            poly,
            res,
            max_iter,
            window,
        } => {
            let opts = VerifyOptions {
                resolution: res,
                max_iter,
                input: window.input(),
            };
            let report = cmd_verify(&mask, &poly, &opts)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            return Ok(report.exit_code());
        }
        Command::Capacity {
            mask,
            n,
            boundary_spacing,
            window,
        } => {
            let report = cmd_capacity(&mask, n, boundary_spacing.0, &window.input())?;
            println!("{}", report.capacity);
            eprintln!("{}", serde_json::to_string(&report).expect("serializable"));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(t) if t > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global()
                    .expect("thread pool");
            }
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got {v:?}");
                return ExitCode::from(EXIT_INPUT as u8);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
