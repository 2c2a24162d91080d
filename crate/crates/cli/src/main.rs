mod aggregate;
mod manifest;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use morphkit::metrics::{bpelen, full_report, ReportOptions};
use morphkit::natural::{meaningfulness_rate, sample_sublanguages, InflectionTable, SampleOptions};
use morphkit::segment::{bpe_apply, bpe_train, fit_entropy, has_segment, HasConvention};
use morphkit::{
    build_language, corpus_from_language, AttrValConfig, Corpus, KindSpec, LanguageSpec,
    Preset, Segmenter, VocabBudget,
};

use aggregate::{parse_metrics_tsv, Aggregate};
use manifest::{write_atomic, Outputs};

#[derive(Parser, Debug)]
#[command(name = "morphkit", version, about = "Artificial languages, segmentation and morphology metrics")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Game configuration preset.
    #[arg(long, global = true, value_parser = parse_preset)]
    preset: Option<Preset>,
    /// key=value config file; overrides --preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, global = true, default_value = "rise", value_parser = parse_convention)]
    has_convention: HasConvention,
    /// Symbol inventory size for the fixed-budget BPE run.
    #[arg(long, global = true, default_value_t = 96)]
    bpe_vocab: usize,
    /// HAS threshold.
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    tau: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a corpus from a language spec such as `fusion:pair=1,2`.
    Gen {
        #[arg(long, value_parser = parse_kind)]
        lang: KindSpec,
        /// Output corpus; defaults to `<out-dir>/<kind>_s<seed>.tsv`.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the symbol table as `attr\tvalue\tsymbol`.
        #[arg(long)]
        dump_table: Option<PathBuf>,
    },
    /// Segment a corpus with HAS or BPE.
    Segment {
        corpus: PathBuf,
        /// has, bpe (uses --bpe-vocab) or bpemax.
        #[arg(long, default_value = "has")]
        method: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the BPE merge list here.
        #[arg(long)]
        merges: Option<PathBuf>,
    },
    /// Compute every metric for one corpus.
    Analyze {
        corpus: PathBuf,
        /// Metric TSV path; defaults to `<out-dir>/<stem>.metrics.tsv`.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write a BPELen curve, e.g. `8..200` or `8..200:8`.
        #[arg(long)]
        curve: Option<String>,
        /// Render the curve as SVG too.
        #[arg(long)]
        svg: bool,
    },
    /// BPELen over a range of vocabulary sizes.
    Curve {
        corpus: PathBuf,
        #[arg(long, default_value = "8..200")]
        range: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        svg: bool,
    },
    /// Natural-language inflection tables.
    Natural {
        #[command(subcommand)]
        command: NaturalCommand,
    },
    /// Run conditions over several seeds and compare them.
    Batch {
        /// `NAME=SPEC` or `SPEC`; repeat for each condition.
        #[arg(long = "lang", required = true)]
        langs: Vec<String>,
        /// `0..8` (exclusive end) or a comma list.
        #[arg(long, default_value = "0..8")]
        seeds: String,
        /// Keep each generated corpus next to its metrics.
        #[arg(long)]
        keep_corpora: bool,
    },
    /// Aggregate metric TSVs, grouped by file name without `_s<seed>`.
    Report {
        #[arg(required = true)]
        metrics: Vec<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum NaturalCommand {
    /// Sample Attr-Val sublanguages from an inflection table.
    Sample {
        /// CSV with `lexeme,tense,person,form`; the bundled sample when omitted.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 42)]
        roots: usize,
        #[arg(long, value_delimiter = ',')]
        tenses: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        persons: Option<Vec<String>>,
        /// Also compute the meaningfully-segmented rate under HAS and BPE.
        #[arg(long)]
        rate: bool,
    },
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: morphkit::Error| e.to_string())
}

fn parse_convention(s: &str) -> Result<HasConvention, String> {
    s.parse().map_err(|e: morphkit::Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<KindSpec, String> {
    s.parse().map_err(|e: morphkit::Error| e.to_string())
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
        (a..b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>()?
    };
    if seeds.is_empty() {
        bail!("no seeds in `{s}`");
    }
    Ok(seeds)
}

/// `A..B` inclusive, optional `:STEP`.
fn parse_range(s: &str) -> Result<Vec<usize>> {
    let (span, step) = match s.split_once(':') {
        Some((span, step)) => (span, step.trim().parse::<usize>()?),
        None => (s, 1),
    };
    let Some((a, b)) = span.split_once("..") else {
        bail!("expected a range like 8..200, got `{s}`");
    };
    let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
    if step == 0 || a > b {
        bail!("empty range `{s}`");
    }
    Ok((a..=b).step_by(step).collect())
}

impl Global {
    /// Explicit config file, then preset, then none.
    fn explicit_config(&self) -> Result<Option<AttrValConfig>> {
        if let Some(path) = &self.config {
            return Ok(Some(AttrValConfig::read(path)?));
        }
        Ok(self.preset.map(Preset::config))
    }

    fn config_for_gen(&self) -> Result<AttrValConfig> {
        Ok(self.explicit_config()?.unwrap_or_else(|| Preset::Default.config()))
    }

    /// Config for reading `corpus`: explicit, else a sibling `.cfg`, else
    /// inferred from the rows.
    fn read_corpus(&self, corpus: &Path) -> Result<Corpus> {
        let config = match self.explicit_config()? {
            Some(c) => Some(c),
            None => {
                let sibling = corpus.with_extension("cfg");
                if sibling.is_file() {
                    Some(AttrValConfig::read(&sibling)?)
                } else {
                    None
                }
            }
        };
        Ok(Corpus::read(corpus, config.as_ref())?)
    }

    fn report_options(&self) -> ReportOptions {
        ReportOptions {
            tau: self.tau,
            convention: self.has_convention,
            bpe_vocab: self.bpe_vocab,
            ..Default::default()
        }
    }

    fn out(&self, name: impl AsRef<Path>) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn stem(path: &Path) -> String {
    let name = path.file_name().map_or_else(|| "corpus".into(), |n| n.to_string_lossy().into_owned());
    name.strip_suffix(".tsv").map_or(name.clone(), str::to_string)
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn curve_csv(points: &[(VocabBudget, f64)]) -> String {
    let mut out = String::from("vocab_size,bpelen\n");
    for (b, v) in points {
        out.push_str(&format!("{b},{v}\n"));
    }
    out
}

fn write_curve(corpus: &Corpus, sizes: &[usize], csv: &Path, svg: bool, outputs: &mut Outputs, title: &str) -> Result<()> {
    let base = corpus.config().vocab_size();
    let budgets: Vec<VocabBudget> = sizes
        .iter()
        .copied()
        .filter(|&n| n >= base)
        .map(VocabBudget::Size)
        .chain([VocabBudget::Max])
        .collect();
    if budgets.len() == 1 {
        bail!("every vocabulary size in the range is below the {base} base characters");
    }
    let points = bpelen(corpus, &budgets)?;
    outputs.write(csv, curve_csv(&points))?;
    if svg {
        let numeric: Vec<(f64, f64)> = points
            .iter()
            .filter_map(|(b, v)| match b {
                VocabBudget::Size(n) => Some((*n as f64, *v)),
                VocabBudget::Max => None,
            })
            .collect();
        outputs.write(&csv.with_extension("svg"), svg::line_chart(title, "|V|", "BPELen", &numeric))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let g = cli.global;
    let mut outputs = Outputs::default();
    let mut inputs: Vec<PathBuf> = Vec::new();
    let mut seeds = vec![g.seed];
    let command_name: &str;

    match cli.command {
        Command::Gen {
            lang,
            output,
            dump_table,
        } => {
            command_name = "gen";
            let config = g.config_for_gen()?;
            let spec = LanguageSpec::new(lang, config.clone(), g.seed);
            let language = build_language(&spec)?;
            let corpus = corpus_from_language(&language)?;
            let path = output.unwrap_or_else(|| {
                g.out(format!("{}_s{}.tsv", file_safe(spec.kind.kind.name()), g.seed))
            });
            outputs.write(&path, corpus.to_tsv())?;
            outputs.write(&path.with_extension("cfg"), config.to_config_string())?;
            if let Some(table) = dump_table {
                outputs.write(&table, language.table().to_tsv(config.cardinalities()))?;
            }
            eprintln!("wrote {} pairs to {}", corpus.len(), path.display());
        }
        Command::Segment {
            corpus,
            method,
            output,
            merges,
        } => {
            command_name = "segment";
            let c = g.read_corpus(&corpus)?;
            inputs.push(corpus.clone());
            let segmented = match method.to_ascii_lowercase().as_str() {
                "has" => {
                    let model = fit_entropy(&c, None);
                    has_segment(&c, &model, g.tau, g.has_convention)?
                }
                "bpe" | "bpemax" => {
                    let budget = if method.eq_ignore_ascii_case("bpemax") {
                        VocabBudget::Max
                    } else {
                        VocabBudget::Size(g.bpe_vocab)
                    };
                    let list = bpe_train(&c, budget)?;
                    if let Some(path) = &merges {
                        outputs.write(path, list.to_tsv())?;
                    }
                    bpe_apply(&list, &c)?
                }
                other => bail!("unknown segmentation method `{other}` (has, bpe, bpemax)"),
            };
            let path = output.unwrap_or_else(|| g.out(format!("{}.{}.tsv", stem(&corpus), method.to_ascii_lowercase())));
            outputs.write(&path, segmented.to_tsv())?;
            eprintln!(
                "{} symbols, {:.3} segments per message",
                segmented.symbol_vocab().len(),
                segmented.mean_segments()
            );
        }
        Command::Analyze {
            corpus,
            output,
            curve,
            svg,
        } => {
            command_name = "analyze";
            let c = g.read_corpus(&corpus)?;
            inputs.push(corpus.clone());
            let report = full_report(&c, &g.report_options())?;
            let path = output.unwrap_or_else(|| g.out(format!("{}.metrics.tsv", stem(&corpus))));
            outputs.write(&path, report.to_tsv())?;
            print!("{}", report.to_table());
            if let Some(range) = curve {
                let sizes = parse_range(&range)?;
                let csv = g.out(format!("{}.curve.csv", stem(&corpus)));
                write_curve(&c, &sizes, &csv, svg, &mut outputs, &stem(&corpus))?;
            }
        }
        Command::Curve {
            corpus,
            range,
            output,
            svg,
        } => {
            command_name = "curve";
            let c = g.read_corpus(&corpus)?;
            inputs.push(corpus.clone());
            let sizes = parse_range(&range)?;
            let csv = output.unwrap_or_else(|| g.out(format!("{}.curve.csv", stem(&corpus))));
            write_curve(&c, &sizes, &csv, svg, &mut outputs, &stem(&corpus))?;
        }
        Command::Natural {
            command:
                NaturalCommand::Sample {
                    table,
                    count,
                    roots,
                    tenses,
                    persons,
                    rate,
                },
        } => {
            command_name = "natural sample";
            let t = match &table {
                Some(path) => {
                    inputs.push(path.clone());
                    InflectionTable::load(path)?
                }
                None => InflectionTable::sample(),
            };
            let subs = sample_sublanguages(
                &t,
                &SampleOptions {
                    count,
                    seed: g.seed,
                    n_roots: roots,
                    tenses,
                    persons,
                },
            )?;
            for (i, s) in subs.iter().enumerate() {
                outputs.write(&g.out(format!("sublanguage_{i:03}.tsv")), s.corpus.to_tsv())?;
            }
            if let Some(first) = subs.first() {
                outputs.write(&g.out("sublanguages.cfg"), first.corpus.config().to_config_string())?;
            }
            outputs.write(&g.out("alphabet.tsv"), t.alphabet_tsv())?;
            if rate {
                let mut tsv = String::from("segmenter\trate\n");
                for seg in [
                    Segmenter::Has {
                        tau: g.tau,
                        convention: g.has_convention,
                        window: None,
                    },
                    Segmenter::Bpe(VocabBudget::Size(g.bpe_vocab)),
                ] {
                    let r = meaningfulness_rate(&subs, &seg)?;
                    println!("{seg}\t{r}");
                    tsv.push_str(&format!("{seg}\t{r}\n"));
                }
                outputs.write(&g.out("rates.tsv"), tsv)?;
            }
            eprintln!("wrote {} sublanguages to {}", subs.len(), g.out_dir.display());
        }
        Command::Batch {
            langs,
            seeds: seed_arg,
            keep_corpora,
        } => {
            command_name = "batch";
            seeds = parse_seeds(&seed_arg)?;
            let config = g.config_for_gen()?;
            let conditions: Vec<(String, KindSpec)> = langs
                .iter()
                .map(|l| {
                    let (name, spec) = match l.split_once('=') {
                        Some((name, spec)) if !name.contains(':') => (name.to_string(), spec),
                        _ => (file_safe(l), l.as_str()),
                    };
                    let kind: KindSpec = spec.parse().with_context(|| format!("condition `{l}`"))?;
                    Ok((name, kind))
                })
                .collect::<Result<_>>()?;
            let mut names: Vec<&str> = conditions.iter().map(|(n, _)| n.as_str()).collect();
            names.sort_unstable();
            names.dedup();
            if names.len() != conditions.len() {
                bail!("condition names must be distinct");
            }
            let jobs: Vec<(usize, u64)> = (0..conditions.len())
                .flat_map(|c| seeds.iter().map(move |&s| (c, s)))
                .collect();
            let options = g.report_options();
            let results = jobs
                .par_iter()
                .map(|&(c, seed)| {
                    let (name, kind) = &conditions[c];
                    let spec = LanguageSpec::new(kind.clone(), config.clone(), seed);
                    let corpus = corpus_from_language(&build_language(&spec)?)?;
                    let report = full_report(&corpus, &options)?;
                    let base = format!("{}_s{seed}", file_safe(name));
                    let metrics = g.out(format!("{base}.metrics.tsv"));
                    write_atomic(&metrics, report.to_tsv().as_bytes())?;
                    let mut written = vec![metrics];
                    if keep_corpora {
                        let path = g.out(format!("{base}.tsv"));
                        write_atomic(&path, corpus.to_tsv().as_bytes())?;
                        written.push(path);
                    }
                    Ok((name.clone(), report.rows(), written))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut agg = Aggregate::default();
            for (name, rows, written) in results {
                agg.add(&name, &rows);
                outputs.extend(written);
            }
            if keep_corpora {
                outputs.write(&g.out("batch.cfg"), config.to_config_string())?;
            }
            outputs.write(&g.out("aggregate.tsv"), agg.to_tsv())?;
            outputs.write(&g.out("welch.tsv"), agg.welch_tsv())?;
            print!("{}", agg.to_table());
        }
        Command::Report { metrics } => {
            command_name = "report";
            seeds.clear();
            let mut files = metrics.clone();
            files.sort();
            let mut agg = Aggregate::default();
            for path in &files {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let rows = parse_metrics_tsv(&text).with_context(|| format!("parsing {}", path.display()))?;
                agg.add(&aggregate::group_name(path), &rows);
                inputs.push(path.clone());
            }
            outputs.write(&g.out("aggregate.tsv"), agg.to_tsv())?;
            outputs.write(&g.out("welch.tsv"), agg.welch_tsv())?;
            print!("{}", agg.to_table());
        }
    }

    outputs.finish(&manifest::RunManifest::new(
        command_name,
        g.preset.map(|p| p.name().to_string()),
        g.config.as_ref().map(|p| p.display().to_string()),
        seeds,
        &inputs,
    ))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
