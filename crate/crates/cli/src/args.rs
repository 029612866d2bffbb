use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use crowdlens_core::service::SceneStore;

use crate::commands;
use crate::config::{self, CollectivityLayer, Overrides};
use crate::error::{CliError, Result};
use crate::server::{self, AppState};

#[derive(Debug, Parser)]
#[command(
    name = "crowdlens",
    version,
    about = "Crowd trajectory analytics: features, personality and emotion scores, playback server"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate tracking files and write them as canonical world-space CSV with gaps filled.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Analyze every scene into `<scene>.summary.json`.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Annotation file; answers go to `<out>/answers.json`.
        #[arg(long)]
        questions: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Answer highlighted-pedestrian questions from existing summaries.
    Questions {
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long, default_value = "summaries")]
        summaries: PathBuf,
        #[arg(long, default_value = "answers.json")]
        out: PathBuf,
    },
    /// Export per-frame series and score tables for plotting.
    Export {
        #[arg(long, value_enum, default_value_t = ExportFormat::Csv)]
        format: ExportFormat,
        #[arg(long, default_value = "summaries")]
        summaries: PathBuf,
        #[arg(long, default_value = "plots")]
        out: PathBuf,
    },
    /// Serve scenes and playback sessions over HTTP and websockets.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        /// Directory of summaries and/or tracking files.
        #[arg(long)]
        scenes: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Write a demo dataset: scenario scenes, dataset-shaped random scenes and annotations.
    Synth {
        #[arg(long)]
        out: PathBuf,
        /// Frames per random scene.
        #[arg(long, default_value_t = 240)]
        frames: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Speed weight; w2 defaults to 1 - w1.
    #[arg(long)]
    pub w1: Option<f64>,
    /// Heading weight; w1 defaults to 1 - w2.
    #[arg(long)]
    pub w2: Option<f64>,
    /// JSON item registry replacing the default one.
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// TOML config file; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl ParamArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            collectivity: CollectivityLayer {
                gamma: self.gamma,
                beta: self.beta,
                w1: self.w1,
                w2: self.w2,
            },
            registry: self.registry.clone(),
            config: self.config.clone(),
        }
    }
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { input, out } => report(&commands::ingest(&input, &out)?),
        Command::Analyze {
            input,
            out,
            questions,
            params,
        } => {
            let cfg = config::resolve(&params.overrides())?;
            report(&commands::analyze(
                &input,
                &out,
                &cfg,
                questions.as_deref(),
            )?);
        }
        Command::Questions {
            annotations,
            summaries,
            out,
        } => {
            report(&[commands::questions(&annotations, &summaries, &out)?]);
        }
        Command::Export {
            format: ExportFormat::Csv,
            summaries,
            out,
        } => {
            report(&commands::export_csv(&summaries, &out)?);
        }
        Command::Serve {
            port,
            bind,
            scenes,
            params,
        } => {
            let cfg = config::resolve(&params.overrides())?;
            serve(SocketAddr::new(bind, port), &scenes, cfg)?;
        }
        Command::Synth { out, frames } => {
            if frames < 2 {
                return Err(CliError::invariant("--frames must be at least 2"));
            }
            report(&commands::synth(&out, frames)?);
        }
    }
    Ok(())
}

/// Binds first, then loads scenes in the background; requests made before
/// loading finishes get `StoreUnavailable`.
fn serve(addr: SocketAddr, scenes: &Path, cfg: crowdlens_core::AnalysisConfig) -> Result<()> {
    if !scenes.is_dir() {
        return Err(CliError::input(scenes, "not a directory"));
    }
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::invariant(e.to_string()))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| CliError::invariant(format!("cannot bind {addr}: {e}")))?;
        eprintln!(
            "listening on http://{}",
            listener
                .local_addr()
                .map_err(|e| CliError::invariant(e.to_string()))?
        );
        let state = AppState::new(SceneStore::pending());
        let app = server::router(state.clone());
        let server = tokio::spawn(async move {
            axum::serve(listener, app)
                .with_graceful_shutdown(async {
                    let _ = tokio::signal::ctrl_c().await;
                })
                .await
        });
        let dir = scenes.to_path_buf();
        let summaries = tokio::task::spawn_blocking(move || commands::load_scene_dir(&dir, &cfg))
            .await
            .map_err(|e| CliError::invariant(e.to_string()))??;
        eprintln!("{} scenes ready", summaries.len());
        state.store.install(summaries);
        server
            .await
            .map_err(|e| CliError::invariant(e.to_string()))?
            .map_err(|e| CliError::invariant(e.to_string()))
    })
}
