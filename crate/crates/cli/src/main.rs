use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use sensorec::conllu::{load_conllu, ReviewDoc};
use sensorec::evaluation::{run_experiment, ExperimentConfig};
use sensorec::extraction::{aggregate_item_features, corpus_stats, extract_corpus};
use sensorec::lexicon::{check_disjoint, Feature, ModifierLexicon, SensoryLexicon};
use sensorec::profiles::{
    compare_sources, fuse_tables, load_feature_table, load_items, load_users, write_feature_table,
};
use sensorec::recommender::{predict, recommend_top_k, AlgorithmSpec};
use sensorec::synth::generate_synthetic;
use sensorec::{Error, Result};

/// Sensory-aware point-of-interest recommendation toolkit.
#[derive(Parser)]
#[command(name = "sensorec", version, about, max_term_width = 80)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract sensory feature evaluations from parsed reviews.
    ///
    /// Reads every `.conllu` file in the reviews directory (or a single
    /// file), matches lemmas against the sensory lexicon, applies the
    /// nearest modifier in each word's subtree and writes per-item
    /// feature means as CSV.
    Extract {
        /// Directory of `.conllu` review files (or one file).
        #[arg(long)]
        reviews: PathBuf,
        /// TSV sensory lexicon: word, feature, base, direction.
        #[arg(long)]
        sensory_lexicon: PathBuf,
        /// TSV modifier lexicon: word, impact.
        #[arg(long)]
        modifier_lexicon: PathBuf,
        /// Output CSV of per-item feature evaluations.
        #[arg(long)]
        out: PathBuf,
    },
    /// Describe a feature table, optionally comparing it to a second one.
    Stats {
        /// Feature table CSV.
        #[arg(long)]
        a: PathBuf,
        /// Optional second table; adds an overlap comparison.
        #[arg(long)]
        b: Option<PathBuf>,
    },
    /// Fuse two feature tables by count-weighted means.
    Fuse {
        /// First feature table CSV.
        #[arg(long)]
        a: PathBuf,
        /// Second feature table CSV.
        #[arg(long)]
        b: PathBuf,
        /// Output CSV for the fused table.
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank items for every user and print the top-k list as CSV.
    Recommend {
        /// Item catalog CSV (item_id, category).
        #[arg(long)]
        items: PathBuf,
        /// Feature table CSV for the catalog.
        #[arg(long)]
        features: PathBuf,
        /// User profiles CSV.
        #[arg(long)]
        users: PathBuf,
        /// Algorithm family: ind, c-only, pref-only or mc.
        #[arg(long, default_value = "ind")]
        algorithm: String,
        /// Aggregation measure: min, ave, cos or rmsd.
        #[arg(long, default_value = "ave")]
        measure: String,
        /// Blend weight for the ind family, in [0,1].
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// List length per user.
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Only predictions strictly above this enter the list.
        #[arg(long, default_value_t = 3.0)]
        threshold: f64,
    },
    /// Cross-validate algorithm configurations described by a config file.
    Evaluate {
        /// TOML experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Also write the report as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also write the aligned table to this path.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Generate a reproducible synthetic dataset plus experiment config.
    Synth {
        /// Seed for every random choice.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Number of users.
        #[arg(long, default_value_t = 30)]
        users: usize,
        /// Number of catalog items.
        #[arg(long, default_value_t = 50)]
        items: usize,
        /// Chance an item's evidence is thinned to fewer features.
        #[arg(long, default_value_t = 0.25)]
        sparsity: f64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        let code = match e {
            Error::Io { .. } => 2,
            _ => 1,
        };
        std::process::exit(code);
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Extract {
            reviews,
            sensory_lexicon,
            modifier_lexicon,
            out,
        } => cmd_extract(&reviews, &sensory_lexicon, &modifier_lexicon, &out),
        Command::Stats { a, b } => cmd_stats(&a, b.as_deref()),
        Command::Fuse { a, b, out } => cmd_fuse(&a, &b, &out),
        Command::Recommend {
            items,
            features,
            users,
            algorithm,
            measure,
            alpha,
            k,
            threshold,
        } => cmd_recommend(&items, &features, &users, &algorithm, &measure, alpha, k, threshold),
        Command::Evaluate { config, json, table } => {
            cmd_evaluate(&config, json.as_deref(), table.as_deref())
        }
        Command::Synth {
            seed,
            users,
            items,
            sparsity,
            out,
        } => cmd_synth(seed, users, items, sparsity, &out),
    }
}

/// Review files to parse: a single file, or every `.conllu` in a
/// directory, in name order.
fn review_files(reviews: &Path) -> Result<Vec<PathBuf>> {
    if reviews.is_file() {
        return Ok(vec![reviews.to_path_buf()]);
    }
    let entries = std::fs::read_dir(reviews).map_err(|e| Error::io(reviews, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(reviews, e))?;
        let path = entry.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "conllu") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn cmd_extract(reviews: &Path, sensory: &Path, modifier: &Path, out: &Path) -> Result<()> {
    let slex = SensoryLexicon::load(sensory)?;
    let mlex = ModifierLexicon::load(modifier)?;
    check_disjoint(&slex, &mlex)?;

    let files = review_files(reviews)?;
    if files.is_empty() {
        eprintln!("warning: no .conllu files under {}", reviews.display());
    }
    let mut docs: Vec<ReviewDoc> = Vec::new();
    for file in &files {
        docs.extend(load_conllu(file)?);
    }
    let mentions = extract_corpus(&docs, &slex, &mlex)?;
    let table = aggregate_item_features(&mentions);
    write_feature_table(out, &table)?;

    let stats = corpus_stats(&table);
    let coverage: Vec<String> = Feature::ALL
        .iter()
        .map(|f| format!("{} {}", f.name(), stats[f.index()].coverage))
        .collect();
    eprintln!(
        "extracted {} mentions over {} items ({} docs); feature coverage: {}",
        mentions.len(),
        table.len(),
        docs.len(),
        coverage.join(", ")
    );
    Ok(())
}

fn cmd_stats(a: &Path, b: Option<&Path>) -> Result<()> {
    let table_a = load_feature_table(a)?;
    print_table_stats("A", a, &table_a);
    let Some(b) = b else { return Ok(()) };
    let table_b = load_feature_table(b)?;
    println!();
    print_table_stats("B", b, &table_b);

    let cmp = compare_sources(&table_a, &table_b);
    println!("\noverlap between A and B (absolute per-item differences)");
    println!(
        "{:<10}  {:>6}  {:>8}  {:>8}  {:>8}  {:>8}  {:>8}  {:>9}",
        "feature", "common", "min", "max", "mean", "sd", "pearson", "mean_diff"
    );
    for f in Feature::ALL {
        let c = &cmp[f.index()];
        let pearson = match c.pearson {
            Some(p) => format!("{p:>8.4}"),
            None => format!("{:>8}", "n/a"),
        };
        println!(
            "{:<10}  {:>6}  {:>8.4}  {:>8.4}  {:>8.4}  {:>8.4}  {pearson}  {:>9.4}",
            f.name(),
            c.common,
            c.min,
            c.max,
            c.mean,
            c.sd,
            c.mean_diff
        );
    }
    Ok(())
}

fn print_table_stats(label: &str, path: &Path, table: &sensorec::profiles::FeatureTable) {
    let stats = corpus_stats(table);
    println!("source {label}: {} items ({})", table.len(), path.display());
    println!(
        "{:<10}  {:>6}  {:>9}  {:>9}  {:>10}  {:>9}",
        "feature", "known", "count_min", "count_max", "count_mean", "count_sd"
    );
    for f in Feature::ALL {
        let s = &stats[f.index()];
        println!(
            "{:<10}  {:>6}  {:>9}  {:>9}  {:>10.4}  {:>9.4}",
            f.name(),
            s.coverage,
            s.min,
            s.max,
            s.mean,
            s.sd
        );
    }
}

fn cmd_fuse(a: &Path, b: &Path, out: &Path) -> Result<()> {
    let table_a = load_feature_table(a)?;
    let table_b = load_feature_table(b)?;
    let fused = fuse_tables(&table_a, &table_b);
    let common = table_a.keys().filter(|k| table_b.contains_key(*k)).count();
    write_feature_table(out, &fused)?;
    eprintln!(
        "fused {} + {} items ({} in common) into {}",
        table_a.len(),
        table_b.len(),
        common,
        fused.len()
    );
    Ok(())
}

fn parse_algorithm(algorithm: &str, measure: &str, alpha: f64) -> Result<AlgorithmSpec> {
    let measure = measure.parse()?;
    match algorithm.to_ascii_lowercase().replace('-', "_").as_str() {
        "ind" => AlgorithmSpec::ind(measure, alpha),
        "c_only" => Ok(AlgorithmSpec::c_only(measure)),
        "pref_only" => Ok(AlgorithmSpec::pref_only()),
        "mc" => Ok(AlgorithmSpec::mc(measure)),
        other => Err(Error::invalid(format!(
            "unknown algorithm `{other}`; expected ind, c-only, pref-only or mc"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_recommend(
    items: &Path,
    features: &Path,
    users: &Path,
    algorithm: &str,
    measure: &str,
    alpha: f64,
    k: usize,
    threshold: f64,
) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    let spec = parse_algorithm(algorithm, measure, alpha)?;
    let items = load_items(items, Some(features))?;
    let users = load_users(users)?;

    println!("user_id,rank,item_id,r_hat");
    for user in &users {
        let preds: Vec<_> = items.iter().filter_map(|i| predict(&spec, user, i)).collect();
        let by_item: BTreeMap<&str, f64> =
            preds.iter().map(|p| (p.item_id.as_str(), p.r_hat)).collect();
        for (rank, item_id) in recommend_top_k(&preds, k, threshold).iter().enumerate() {
            println!(
                "{},{},{},{:.4}",
                user.user_id,
                rank + 1,
                item_id,
                by_item[item_id.as_str()]
            );
        }
    }
    Ok(())
}

fn cmd_evaluate(config: &Path, json: Option<&Path>, table: Option<&Path>) -> Result<()> {
    let config = ExperimentConfig::from_toml_file(config)?;
    let report = run_experiment(&config)?;
    let rendered = report.to_table();
    print!("{rendered}");
    if let Some(path) = table {
        std::fs::write(path, &rendered).map_err(|e| Error::io(path, e))?;
    }
    if let Some(path) = json {
        std::fs::write(path, report.to_json()).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

fn cmd_synth(seed: u64, users: usize, items: usize, sparsity: f64, out: &Path) -> Result<()> {
    let data = generate_synthetic(seed, users, items, sparsity)?;
    data.write_to_dir(out, seed)?;
    eprintln!(
        "wrote {} items, {} users, {} ratings and two feature sources to {}",
        data.items.len(),
        data.users.len(),
        data.ratings.len(),
        out.display()
    );
    Ok(())
}
