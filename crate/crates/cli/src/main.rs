use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use fpsynth::synthgen::FingerClass;
use fpsynth_cli::commands::*;
use fpsynth_cli::{exit_code, Invalid, Manifest, RunConfig};
use regex::Regex;

#[derive(Parser, Debug)]
#[command(name = "fpsynth", version, about = "Synthetic fingerprint datasets, minutiae matching and uniqueness reports")]
struct Cli {
    /// Flat `key = value` configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Run seed; overrides `seed` from the config file
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate masters and their impressions plus a manifest
    Synth {
        #[arg(long)]
        count: usize,
        /// Impressions per master (the first is the baseline rendering)
        #[arg(long, default_value_t = 2)]
        impressions: usize,
        /// arch, leftLoop, rightLoop or whorl; drawn per master when omitted
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a manifest from a directory of PNG/PGM images
    Ingest {
        #[arg(long)]
        dir: PathBuf,
        /// Regex whose first capture group on the file name is the identity;
        /// every file is its own identity when omitted
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract one minutiae template per print
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score pairs of prints into an FPSC score file
    Match {
        #[arg(long)]
        manifest: PathBuf,
        /// Directory of templates from `extract`; extracted on the fly when omitted
        #[arg(long)]
        templates: Option<PathBuf>,
        #[command(flatten)]
        pairs: PairArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Imposter, cross and genuine-free score distributions with threshold and KS test
    EvalUniqueness {
        #[arg(long)]
        bona: PathBuf,
        #[arg(long)]
        syn: PathBuf,
        #[arg(long)]
        bona_templates: Option<PathBuf>,
        #[arg(long)]
        syn_templates: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-print quality metrics and the dataset summary table
    Metrics {
        /// One manifest per dataset; repeat for side-by-side columns
        #[arg(long, required = true)]
        manifest: Vec<PathBuf>,
        /// Column labels, one per manifest (default: the manifest's directory name)
        #[arg(long)]
        label: Vec<String>,
        /// CSV of `print_id,nfiq2` scores
        #[arg(long)]
        nfiq2: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Frechet distance between Gaussians fitted to two feature CSVs
    Fid { a: PathBuf, b: PathBuf },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct PairArgs {
    /// All same-identity pairs
    #[arg(long)]
    genuine: bool,
    /// `eval.per_print` sampled non-mated partners per print
    #[arg(long)]
    imposter: bool,
    /// File of `probe_id<TAB>gallery_id` lines
    #[arg(long)]
    pairs: Option<PathBuf>,
}

fn default_label(path: &std::path::Path, k: usize) -> String {
    path.canonicalize()
        .ok()
        .and_then(|p| p.parent().and_then(|d| d.file_name()).map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| format!("dataset{}", k + 1))
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global().context("thread pool")?;
    }
    let threads = rayon::current_num_threads();
    match cli.command {
        Command::Synth { count, impressions, class, out } => {
            let class = class
                .map(|c| FingerClass::parse(&c).ok_or_else(|| Invalid(format!("unknown finger class {c:?}"))))
                .transpose()?;
            let m = cmd_synth(&cfg, &SynthArgs { count, impressions, first_seed: cfg.seed, class, out: out.clone() })?;
            println!("wrote {} prints of {} identities to {}", m.len(), m.identity_count(), out.display());
        }
        Command::Ingest { dir, pattern, out } => {
            let rule = match pattern {
                Some(p) => IdentityRule::FromFilename(Regex::new(&p).map_err(|e| Invalid(format!("bad pattern: {e}")))?),
                None => IdentityRule::PerFile,
            };
            let m = cmd_ingest(&dir, &rule, &out)?;
            println!("{} prints, {} identities -> {}", m.len(), m.identity_count(), out.display());
        }
        Command::Extract { manifest, out } => {
            let m = Manifest::load(&manifest)?;
            let t = cmd_extract(&cfg, &m, &out)?;
            let total: usize = t.iter().map(|t| t.minutiae.len()).sum();
            println!("{} templates, {} minutiae -> {}", t.len(), total, out.display());
        }
        Command::Match { manifest, templates, pairs, out } => {
            let m = Manifest::load(&manifest)?;
            let t = match templates {
                Some(dir) => load_templates(&m, &dir)?,
                None => extract_all(&cfg, &m)?,
            };
            let source = match (pairs.genuine, pairs.imposter, pairs.pairs) {
                (true, _, _) => PairSource::Genuine,
                (_, true, _) => PairSource::Imposter,
                (_, _, Some(p)) => PairSource::File(p),
                _ => unreachable!("clap enforces one pair source"),
            };
            let set = cmd_match(&cfg, &m, &t, &source, &out, threads)?;
            println!("{} scores -> {}", set.records.len(), out.display());
        }
        Command::EvalUniqueness { bona, syn, bona_templates, syn_templates, out } => {
            let (bm, sm) = (Manifest::load(&bona)?, Manifest::load(&syn)?);
            let load = |m: &Manifest, dir: Option<PathBuf>| match dir {
                Some(d) => load_templates(m, &d),
                None => extract_all(&cfg, m),
            };
            let (bt, st) = (load(&bm, bona_templates)?, load(&sm, syn_templates)?);
            let r = cmd_eval_uniqueness(&cfg, &bm, &bt, &sm, &st, &out, threads)?;
            println!(
                "threshold {} (FAR {:.6}); false matches: cross {}/{}, synthetic {}/{}; KS D = {:.6}, p = {:.3e}",
                r.threshold, r.achieved_far, r.cross.false_matches, r.cross.n, r.syn.false_matches, r.syn.n, r.ks.d, r.ks.p
            );
        }
        Command::Metrics { manifest, label, nfiq2, out } => {
            if !label.is_empty() && label.len() != manifest.len() {
                return Err(Invalid(format!("{} labels for {} manifests", label.len(), manifest.len())).into());
            }
            let datasets = manifest
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    Ok(Dataset {
                        label: label.get(k).cloned().unwrap_or_else(|| default_label(p, k)),
                        manifest: Manifest::load(p)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let outs = cmd_metrics(&cfg, &datasets, nfiq2.as_deref(), &out)?;
            println!("{} datasets measured -> {}", outs.len(), out.join("table1.md").display());
        }
        Command::Fid { a, b } => {
            let r = cmd_fid(&a, &b)?;
            println!("{}", r.distance);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
