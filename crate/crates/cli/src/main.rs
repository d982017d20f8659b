// Copyright 2026 The smipe Authors.
// Licensed under the Apache-2.0 license (https://opensource.org/licenses/Apache-2.0)
// This file may not be copied, modified, or distributed
// except according to those terms.

mod data;
mod io;
mod model;
mod molecules;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "smipe",
    version,
    about = "SMILES pair encoding and vocabulary extension toolkit"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
pub struct Global {
    /// Seed for every random choice (augmentation, spellings, blending).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// No progress output on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
}

/// Input and output files; `-` or absent means stdin/stdout.
#[derive(Args, Clone)]
pub struct InOut {
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
pub struct FpArgs {
    #[arg(long, default_value_t = smipe::fingerprint::DEFAULT_RADIUS)]
    pub radius: usize,
    #[arg(long, default_value_t = smipe::fingerprint::DEFAULT_NBITS)]
    pub nbits: usize,
}

/// A base tokenizer given as vocabulary and merge files.
#[derive(Args, Clone)]
pub struct BaseFiles {
    /// Base vocabulary: one JSON string per line (ids from 256).
    #[arg(long, value_name = "PATH")]
    pub base_vocab: Option<PathBuf>,
    /// Base merges: one ["left","right"] JSON pair per line.
    #[arg(long, value_name = "PATH", requires = "base_vocab")]
    pub base_merges: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Lines,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Task {
    Generation,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Baseline {
    /// Atom-level units.
    Atom,
    /// The base tokenizer given by --base-vocab/--base-merges.
    Base,
}

#[derive(Subcommand)]
enum Command {
    /// Report validity of each SMILES line as JSON.
    Validate {
        #[command(flatten)]
        io: InOut,
        /// Grammar only, skip the valence table.
        #[arg(long)]
        grammar_only: bool,
    },
    /// Rewrite each SMILES line in canonical form.
    Canon {
        #[command(flatten)]
        io: InOut,
    },
    /// Write random spellings of each SMILES line.
    Randomize {
        #[command(flatten)]
        io: InOut,
        /// Spellings per input line.
        #[arg(long, short, default_value_t = 1)]
        n: usize,
    },
    /// Split each SMILES line into atom-level units.
    Pretokenize {
        #[command(flatten)]
        io: InOut,
        #[arg(long, default_value = " ")]
        sep: String,
    },
    /// Learn merge rules from a SMILES corpus.
    Train {
        #[command(flatten)]
        io: InOut,
        /// Keep merging while the top pair occurs more than this often.
        #[arg(long, default_value_t = 3)]
        threshold: u64,
        #[arg(long)]
        max_merges: Option<usize>,
        /// Train on the corpus as given, without random spellings.
        #[arg(long)]
        no_augment: bool,
        #[arg(long)]
        grammar_only: bool,
        #[arg(long, value_enum, default_value = "lines")]
        format: Format,
        /// JSONL field holding the SMILES.
        #[arg(long, default_value = "smiles")]
        field: String,
        /// Also write every merge with its learned frequency.
        #[arg(long, value_name = "PATH")]
        merge_stats: Option<PathBuf>,
    },
    /// Encode SMILES lines (or documents) to space-separated ids.
    Encode {
        #[command(flatten)]
        io: InOut,
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        #[command(flatten)]
        base: BaseFiles,
        /// Print token strings as a JSON array instead of ids.
        #[arg(long)]
        tokens: bool,
    },
    /// Decode lines of space-separated ids.
    Decode {
        #[command(flatten)]
        io: InOut,
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        #[command(flatten)]
        base: BaseFiles,
    },
    /// Most frequent words the base tokenizer splits into several tokens.
    ExtractOov {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        base: BaseFiles,
        #[arg(long, short, default_value_t = 1000)]
        k: usize,
        #[arg(long, value_enum, default_value = "lines")]
        format: Format,
        #[arg(long, default_value = "text")]
        field: String,
    },
    /// Build the vocabulary extension plan.
    Plan {
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        #[command(flatten)]
        base: BaseFiles,
        /// Output of extract-oov.
        #[arg(long, value_name = "PATH")]
        text_oov: Option<PathBuf>,
        /// Output of train --merge-stats, for token frequencies.
        #[arg(long, value_name = "PATH")]
        merge_stats: Option<PathBuf>,
        /// Leave out SMILES tokens that are a single atom-level unit.
        #[arg(long)]
        no_atom_units: bool,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Append mean-initialized rows to an EMB1 embedding matrix.
    ExtendEmb {
        #[arg(long, value_name = "PATH")]
        emb: PathBuf,
        #[arg(long, value_name = "PATH")]
        plan: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Hex fingerprint per SMILES line.
    Fps {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        fp: FpArgs,
    },
    /// Tanimoto similarity of line-aligned SMILES pairs.
    Sim {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[command(flatten)]
        fp: FpArgs,
    },
    /// Score tagged model outputs against gold SMILES.
    Score {
        #[command(flatten)]
        io: InOut,
        #[arg(long, value_enum)]
        task: Task,
        #[arg(long = "match", value_enum, default_value = "canonical")]
        matching: data::Matching,
        #[arg(long, value_enum, default_value = "zero")]
        invalid: data::Invalid,
        /// Outputs continue a prompt that already opened <SMILES>.
        #[arg(long)]
        open_tag_in_prompt: bool,
        #[arg(long)]
        grammar_only: bool,
        #[arg(long, value_name = "PATH")]
        per_record: Option<PathBuf>,
        #[command(flatten)]
        fp: FpArgs,
    },
    /// Weighted blend of datasets into one JSONL corpus.
    Blend {
        /// JSON list of {name, path, weight, format}.
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        #[arg(long)]
        total: usize,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        manifest: Option<PathBuf>,
    },
    /// Tag SMILES spans in JSONL records {text, spans: [[offset, length]]}.
    Wrap {
        #[command(flatten)]
        io: InOut,
        /// Join all records with <EOS> into one output record.
        #[arg(long)]
        concat: bool,
    },
    /// Tokens-per-SMILES statistics for a baseline and a trained model.
    Fertility {
        #[command(flatten)]
        io: InOut,
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        #[arg(long, value_enum, default_value = "atom")]
        baseline: Baseline,
        #[command(flatten)]
        base: BaseFiles,
        /// Also write the histogram as TSV.
        #[arg(long, value_name = "PATH")]
        tsv: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()?;
    }
    let g = cli.global;
    match cli.command {
        Command::Validate { io, grammar_only } => molecules::validate(&io, !grammar_only),
        Command::Canon { io } => molecules::canon(&io),
        Command::Randomize { io, n } => molecules::randomize(&io, n, g.seed),
        Command::Pretokenize { io, sep } => molecules::pretokenize(&io, &sep),
        Command::Fps { io, fp } => molecules::fps(&io, fp),
        Command::Sim { a, b, out, fp } => molecules::sim(&a, &b, out.as_deref(), fp),
        Command::Train {
            io,
            threshold,
            max_merges,
            no_augment,
            grammar_only,
            format,
            field,
            merge_stats,
        } => model::train(
            &io,
            model::TrainArgs {
                threshold,
                max_merges,
                augment: !no_augment,
                strict: !grammar_only,
                format,
                field,
                merge_stats,
            },
            g,
        ),
        Command::Encode {
            io,
            model: m,
            base,
            tokens,
        } => model::encode(&io, &m, &base, tokens),
        Command::Decode { io, model: m, base } => model::decode(&io, &m, &base),
        Command::ExtractOov {
            io,
            base,
            k,
            format,
            field,
        } => model::extract_oov(&io, &base, k, format, &field),
        Command::Plan {
            model: m,
            base,
            text_oov,
            merge_stats,
            no_atom_units,
            out,
        } => model::plan(
            &m,
            &base,
            text_oov.as_deref(),
            merge_stats.as_deref(),
            !no_atom_units,
            out.as_deref(),
        ),
        Command::ExtendEmb { emb, plan, out } => model::extend_emb(&emb, &plan, &out),
        Command::Score {
            io,
            task: Task::Generation,
            matching,
            invalid,
            open_tag_in_prompt,
            grammar_only,
            per_record,
            fp,
        } => data::score(
            &io,
            data::ScoreArgs {
                matching,
                invalid,
                open_tag_in_prompt,
                strict: !grammar_only,
                per_record,
                fp,
            },
        ),
        Command::Blend {
            config,
            total,
            out,
            manifest,
        } => data::blend(&config, total, out.as_deref(), manifest.as_deref(), g),
        Command::Wrap { io, concat } => data::wrap(&io, concat),
        Command::Fertility {
            io,
            model: m,
            baseline,
            base,
            tsv,
        } => data::fertility(&io, &m, baseline, &base, tsv.as_deref(), g),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if io::is_broken_pipe(&e) {
                return ExitCode::SUCCESS;
            }
            eprintln!("smipe: {e:#}");
            ExitCode::from(1)
        }
    }
}
