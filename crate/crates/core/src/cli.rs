//! `mixmatch` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::audio_io::{load_multitrack, normalize_loudness, read_wav, write_wav, AudioBuffer, WavFormat};
use crate::console::{mix, read_params, sample_random_params, write_params, ConsoleParams};
use crate::error::{Error, Result};
use crate::harness::{
    evaluate_mix, run_method1_experiment, write_method1_csv, Method1Config, DEFAULT_MAX_TRACKS,
};
use crate::optimize::{match_style, GradMode, LossKind, ObjectiveSpec, OptimizerConfig, OBJECTIVE_LOUDNESS_DBFS};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "mixmatch", version, about = "Match a multitrack mix to a reference song's style")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct TrackArgs {
    /// Directory of raw track WAVs (stereo files are split into two tracks)
    #[arg(long)]
    tracks: PathBuf,
    /// Keep at most this many tracks (seeded subset)
    #[arg(long, default_value_t = DEFAULT_MAX_TRACKS)]
    max_tracks: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a mix from a parameter file
    Mix {
        #[command(flatten)]
        input: TrackArgs,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Seed for the track subset when there are more than --max-tracks
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate console parameters that match a reference
    Match {
        #[command(flatten)]
        input: TrackArgs,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        params_out: PathBuf,
        #[arg(long, value_enum, default_value_t = LossKind::Af)]
        loss: LossKind,
        #[arg(long, value_enum, default_value_t = GradMode::Spsa)]
        grad: GradMode,
        #[arg(long, default_value_t = 300)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        spsa_averages: usize,
        /// Optional JSON optimization report
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare a mix against a reference with the audio-feature metrics
    Eval {
        #[arg(long = "mix")]
        mix_path: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        /// Write {RMS, CF, SW, SI, BS, AF_loss} here
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Render a mix with random console parameters
    Randmix {
        #[command(flatten)]
        input: TrackArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        params_out: PathBuf,
    },
    /// Self-supervised random-mix experiment over several seeds
    Method1 {
        #[command(flatten)]
        input: TrackArgs,
        /// Comma-separated seeds
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[arg(long, value_enum)]
        loss: LossKind,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = GradMode::Spsa)]
        grad: GradMode,
        #[arg(long, default_value_t = 300)]
        iters: usize,
        #[arg(long, default_value_t = 2)]
        spsa_averages: usize,
        /// Segment length in seconds (split into two halves)
        #[arg(long, default_value_t = 10.0)]
        segment_secs: f64,
    },
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn dispatch<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match run(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Error::InvalidConfig(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn write_mix(rendered: &AudioBuffer, out: &PathBuf) -> Result<()> {
    let normalized = normalize_loudness(rendered, OBJECTIVE_LOUDNESS_DBFS)?;
    write_wav(&normalized, out, WavFormat::Float32)?;
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Mix {
            input,
            params,
            out,
            seed,
        } => {
            let tracks = load_multitrack(&input.tracks, input.max_tracks, seed)?;
            let params = read_params(&params)?;
            write_mix(&mix(&tracks, &params)?, &out)
        }
        Command::Match {
            input,
            reference,
            out,
            params_out,
            loss,
            grad,
            iters,
            seed,
            spsa_averages,
            report,
        } => {
            let tracks = load_multitrack(&input.tracks, input.max_tracks, seed)?;
            let reference = read_wav(&reference)?;
            let spec = ObjectiveSpec::new(tracks, &reference, loss)?;
            let cfg = OptimizerConfig {
                grad_mode: grad,
                max_iters: iters,
                spsa_averages,
                seed,
                ..OptimizerConfig::default()
            };
            let result = match_style(&spec, &cfg)?;
            println!(
                "{} tracks, {} iterations: loss {:.6} -> {:.6}",
                spec.tracks().len(),
                result.iterations_run,
                result.initial_loss(),
                result.best_loss
            );
            write_params(&result.best_params, &params_out)?;
            write_mix(&spec.render(&result.best_params)?, &out)?;
            if let Some(path) = report {
                std::fs::write(path, serde_json::to_string_pretty(&result.to_json())? + "\n")?;
            }
            Ok(())
        }
        Command::Eval {
            mix_path,
            reference,
            json,
        } => {
            let report = evaluate_mix(&mix_path, &reference)?;
            let f = &report.features;
            println!(
                "reference at {} dBFS, mix at {} dBFS",
                report.reference_dbfs, report.prediction_dbfs
            );
            println!(
                "RMS {:.6e}  CF {:.6e}  SW {:.6e}  SI {:.6e}  BS {:.6e}  AF_loss {:.6e}",
                f.rms, f.cf, f.sw, f.si, f.bs, f.total
            );
            match report.mrstft {
                Some(v) => println!("MRSTFT {v:.6}"),
                None => println!("MRSTFT skipped (lengths differ)"),
            }
            if let Some(path) = json {
                std::fs::write(path, serde_json::to_string_pretty(f)? + "\n")?;
            }
            Ok(())
        }
        Command::Randmix {
            input,
            seed,
            out,
            params_out,
        } => {
            let tracks = load_multitrack(&input.tracks, input.max_tracks, seed)?;
            let params: ConsoleParams = sample_random_params(tracks.len(), seed)?;
            write_params(&params, &params_out)?;
            write_mix(&mix(&tracks, &params)?, &out)
        }
        Command::Method1 {
            input,
            seeds,
            loss,
            csv,
            grad,
            iters,
            spsa_averages,
            segment_secs,
        } => {
            if segment_secs.is_nan() || segment_secs <= 0.0 {
                return Err(Error::InvalidConfig("--segment-secs must be positive".into()));
            }
            let m1 = Method1Config {
                segment_samples: (segment_secs * f64::from(crate::audio_io::SAMPLE_RATE)).round() as usize,
                max_tracks: input.max_tracks,
            };
            let cfg = OptimizerConfig {
                grad_mode: grad,
                max_iters: iters,
                spsa_averages,
                ..OptimizerConfig::default()
            };
            let summary = run_method1_experiment(&input.tracks, &seeds, &cfg, loss, &m1)?;
            println!("seed,loss_kind,init_loss,final_loss,baseline_loss,mrstft_vs_gt,af_vs_gt");
            for r in &summary.rows {
                println!(
                    "{},{},{},{},{},{},{}",
                    r.seed, r.loss_kind, r.init_loss, r.final_loss, r.baseline_loss, r.mrstft_vs_gt, r.af_vs_gt
                );
            }
            println!(
                "median: init {:.6} final {:.6} baseline {:.6} af_vs_gt {:.6} mrstft_vs_gt {:.6} reduction {:.1}%",
                summary.median_init_loss,
                summary.median_final_loss,
                summary.median_baseline_loss,
                summary.median_af_vs_gt,
                summary.median_mrstft_vs_gt,
                100.0 * summary.median_relative_reduction
            );
            if let Some(path) = csv {
                write_method1_csv(&summary.rows, path)?;
            }
            Ok(())
        }
    }
}
