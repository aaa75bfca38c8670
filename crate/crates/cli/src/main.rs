mod cache;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use vgroup::abelian::{
    portrait_prediction, rational_map_abelianization, vg_abelianization_nucleus, PostCriticalData,
};
use vgroup::limitspace::{moore_diagram, quotient_graph, schreier_graph};
use vgroup::nucleus::{is_level_transitive, is_regular, is_self_replicating};
use vgroup::presentation::{emit_with_nucleus, verify_bundle, PresentationBundle};
use vgroup::vg::{canonical_form, tables_equal, EntryCandidates, TableJson};
use vgroup::words::m_invariant;
use vgroup::{
    catalogue, Antichain, Equality, Group, GroupDef, Nucleus, NucleusBudget, Table, Triviality,
    Word,
};

/// Writes to stdout, propagating errors so a closed pipe ends the run.
macro_rules! outln {
    ($($t:tt)*) => {
        writeln!(std::io::stdout(), $($t)*)?
    };
}

macro_rules! out {
    ($($t:tt)*) => {
        write!(std::io::stdout(), $($t)*)?
    };
}

#[derive(Parser)]
#[command(
    name = "vgroup",
    version,
    about = "Self-similar groups and their Röver–Nekrashevych groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct GroupArgs {
    /// Catalogue name (adding, basilica, grigorchuk, lamplighter,
    /// kneading:<bits>) or path to a group file.
    group: String,
    /// Ignore and do not write the nucleus cache.
    #[arg(long)]
    no_cache: bool,
    /// State budget for the nucleus search.
    #[arg(long, default_value_t = NucleusBudget::default().max_states)]
    max_states: usize,
    /// Depth budget for the nucleus search.
    #[arg(long, default_value_t = NucleusBudget::default().max_depth)]
    max_depth: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the nucleus.
    Nucleus {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Validate a group and report its structural properties.
    Check {
        #[command(flatten)]
        g: GroupArgs,
        /// Levels checked for transitivity.
        #[arg(long, default_value_t = 6)]
        level: usize,
    },
    /// Decide whether a word in the generators acts trivially.
    Wp {
        #[command(flatten)]
        g: GroupArgs,
        word: String,
        /// Explored-state limit.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Table arithmetic. Tables are JSON files, inline JSON, or group words.
    Vg {
        #[command(subcommand)]
        op: VgOp,
    },
    /// Abelianization of the Röver–Nekrashevych group.
    Abel {
        #[command(flatten)]
        g: GroupArgs,
    },
    /// Abelianization from a post-critical portrait (JSON file).
    AbelRational { portrait: PathBuf },
    /// Emit the relators of the finite presentation as JSON.
    Present {
        #[command(flatten)]
        g: GroupArgs,
        /// Verify every relator and print a summary instead.
        #[arg(long)]
        verify: bool,
        /// Write the bundle to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level-n approximation of the limit space.
    Limit {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Print the nucleus automaton instead.
        #[arg(long)]
        moore: bool,
    },
    /// Schreier graph of the generators on level n.
    Schreier {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// The number of cylinders modulo d−1 of a clopen set.
    MInvariant {
        /// Alphabet size.
        d: usize,
        /// Words of the antichain.
        words: Vec<String>,
    },
    /// List built-in groups, or print one in the group file format.
    Catalogue { name: Option<String> },
}

#[derive(Subcommand)]
enum VgOp {
    /// Product of two tables; the right one acts first
    Mul {
        #[command(flatten)]
        g: GroupArgs,
        left: String,
        right: String,
    },
    /// Inverse table
    Inv {
        #[command(flatten)]
        g: GroupArgs,
        table: String,
    },
    /// Decide whether two tables define the same element
    Eq {
        #[command(flatten)]
        g: GroupArgs,
        left: String,
        right: String,
    },
    /// Canonical form of a table
    Canon {
        #[command(flatten)]
        g: GroupArgs,
        table: String,
    },
    /// Image of a tree word
    Apply {
        #[command(flatten)]
        g: GroupArgs,
        table: String,
        word: String,
    },
}

/// Outcome that is neither success nor a domain error.
#[derive(Debug)]
struct Undecided(String);

impl std::fmt::Display for Undecided {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "undecided: {}", self.0)
    }
}

impl std::error::Error for Undecided {}

struct Loaded {
    group: Group,
    file: Option<PathBuf>,
    use_cache: bool,
    budget: NucleusBudget,
}

impl GroupArgs {
    fn load(&self) -> anyhow::Result<Loaded> {
        let (def, file) = match catalogue::by_name(&self.group) {
            Some(def) => (def?, None),
            None => {
                let path = PathBuf::from(&self.group);
                let text = fs::read_to_string(&path).with_context(|| {
                    format!(
                        "'{}' is neither a catalogue name nor a readable file",
                        self.group
                    )
                })?;
                (GroupDef::parse(&text)?, Some(path))
            }
        };
        Ok(Loaded {
            group: Group::new(def),
            file,
            use_cache: !self.no_cache,
            budget: NucleusBudget {
                max_states: self.max_states,
                max_depth: self.max_depth,
            },
        })
    }
}

impl Loaded {
    fn nucleus(&self) -> vgroup::Result<Nucleus> {
        cache::load_or_compute(
            &self.group,
            self.file.as_deref(),
            self.budget,
            self.use_cache,
        )
    }
}

fn read_table(group: &Group, arg: &str) -> anyhow::Result<Table> {
    let def = group.def();
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else if Path::new(arg).is_file() {
        fs::read_to_string(arg)?
    } else {
        return Ok(Table::from_element(def.degree(), def.parse_word(arg)?));
    };
    let json: TableJson = serde_json::from_str(&text).context("table JSON")?;
    Ok(Table::from_json(def, &json)?)
}

fn print_table(group: &Group, t: &Table) -> anyhow::Result<()> {
    outln!("{}", serde_json::to_string(&t.to_json(group.def()))?);
    Ok(())
}

fn parse_word(group: &Group, s: &str) -> anyhow::Result<Word> {
    let w: Word = s.parse()?;
    group.def().alphabet().check(&w)?;
    Ok(w)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Nucleus { g, format } => {
            let l = g.load()?;
            let n = l.nucleus()?;
            match format {
                Format::Json => {
                    outln!("{}", serde_json::to_string_pretty(&n.to_record(&l.group))?)
                }
                Format::Dot => out!("{}", moore_diagram(&l.group, &n).to_dot()),
                Format::Text => {
                    outln!("{} states", n.len());
                    for w in n.reprs() {
                        outln!("{}", w.display(l.group.def()));
                    }
                    outln!("stabilization depth {}", n.stabilization_depth());
                }
            }
        }
        Command::Check { g, level } => {
            let l = g.load()?;
            let def = l.group.def();
            outln!(
                "alphabet {}, {} generators",
                def.degree(),
                def.num_generators()
            );
            let transitive = is_level_transitive(&l.group, level)?;
            outln!(
                "level-transitive up to level {level}: {}",
                yes_no(transitive)
            );
            outln!("self-replicating: {}", is_self_replicating(&l.group, 6));
            let n = l.nucleus()?;
            outln!("contracting: yes ({} nucleus states)", n.len());
            outln!("regular: {}", yes_no(is_regular(&n)));
        }
        Command::Wp { g, word, depth } => {
            let l = g.load()?;
            let w = l.group.def().parse_word(&word)?;
            let verdict = l
                .group
                .is_trivial_within(&w, depth.unwrap_or(l.group.depth_limit()));
            outln!("{verdict}");
            if verdict == Triviality::Undecided {
                return Err(Undecided(word).into());
            }
        }
        Command::Vg { op } => run_vg(op)?,
        Command::Abel { g } => {
            let l = g.load()?;
            let n = l.nucleus()?;
            outln!("{}", vg_abelianization_nucleus(&l.group, &n)?);
        }
        Command::AbelRational { portrait } => {
            let text = fs::read_to_string(&portrait)
                .with_context(|| format!("reading {}", portrait.display()))?;
            let data: PostCriticalData = serde_json::from_str(&text).context("portrait JSON")?;
            let g = rational_map_abelianization(&data)?;
            let (k, l, exc) = portrait_prediction(&data)?;
            outln!("{g}");
            outln!(
                "cycles {k}, gcd of periods {l}, odd-degree Z/2 {}",
                yes_no(exc)
            );
        }
        Command::Present { g, verify, out } => {
            let l = g.load()?;
            let n = l.nucleus()?;
            let bundle = emit_with_nucleus(&l.group, &n)?;
            if let Some(path) = &out {
                fs::write(path, serde_json::to_string_pretty(&bundle)?)?;
            }
            if verify {
                report_verification(&l.group, &bundle)?;
            } else if out.is_none() {
                outln!("{}", serde_json::to_string_pretty(&bundle)?);
            }
        }
        Command::Limit {
            g,
            level,
            format,
            moore,
        } => {
            let l = g.load()?;
            let n = l.nucleus()?;
            if moore {
                let m = moore_diagram(&l.group, &n);
                match format {
                    Format::Dot => out!("{}", m.to_dot()),
                    _ => outln!("{}", serde_json::to_string_pretty(&m)?),
                }
                return Ok(());
            }
            let q = quotient_graph(&l.group, &n, level)?;
            match format {
                Format::Dot => out!("{}", q.to_dot()),
                Format::Json => outln!("{}", serde_json::to_string_pretty(&q)?),
                Format::Text => {
                    outln!(
                        "{} tiles, {} identifications, {} classes",
                        q.tiles.len(),
                        q.edges.len(),
                        q.classes
                    );
                    outln!(
                        "cycle: {}, path: {}",
                        yes_no(q.is_cycle()),
                        yes_no(q.is_path())
                    );
                }
            }
        }
        Command::Schreier { g, level, format } => {
            let l = g.load()?;
            let s = schreier_graph(&l.group, level)?;
            match format {
                Format::Dot => out!("{}", s.to_dot()),
                Format::Json => outln!("{}", serde_json::to_string_pretty(&s)?),
                Format::Text => {
                    outln!("{} vertices, {} components", s.vertices.len(), s.components)
                }
            }
        }
        Command::MInvariant { d, words } => {
            let words: Vec<Word> = words.iter().map(|w| w.parse()).collect::<Result<_, _>>()?;
            let alphabet = vgroup::Alphabet::new(d)?;
            for w in &words {
                alphabet.check(w)?;
            }
            let a = Antichain::new(words)?;
            outln!("{}", m_invariant(&a, d));
        }
        Command::Catalogue { name } => match name {
            None => {
                for n in catalogue::NAMES {
                    outln!("{n}");
                }
                outln!("kneading:<bits>");
            }
            Some(name) => {
                let def = catalogue::by_name(&name)
                    .ok_or_else(|| anyhow!("no catalogue entry '{name}'"))??;
                out!("{}", def.to_text());
            }
        },
    }
    Ok(())
}

fn run_vg(op: VgOp) -> anyhow::Result<()> {
    match op {
        VgOp::Mul { g, left, right } => {
            let l = g.load()?;
            let (a, b) = (read_table(&l.group, &left)?, read_table(&l.group, &right)?);
            print_table(&l.group, &a.compose(l.group.def(), &b)?)?;
        }
        VgOp::Inv { g, table } => {
            let l = g.load()?;
            print_table(&l.group, &read_table(&l.group, &table)?.inverse())?;
        }
        VgOp::Eq { g, left, right } => {
            let l = g.load()?;
            let (a, b) = (read_table(&l.group, &left)?, read_table(&l.group, &right)?);
            let verdict = tables_equal(&l.group, &a, &b);
            outln!("{verdict}");
            if verdict == Equality::Undecided {
                return Err(Undecided("table equality".into()).into());
            }
        }
        VgOp::Canon { g, table } => {
            let l = g.load()?;
            let t = read_table(&l.group, &table)?;
            let n = l.nucleus()?;
            let candidates = EntryCandidates::from_nucleus(&l.group, &n);
            print_table(&l.group, &canonical_form(&l.group, &candidates, &t))?;
        }
        VgOp::Apply { g, table, word } => {
            let l = g.load()?;
            let t = read_table(&l.group, &table)?;
            let w = parse_word(&l.group, &word)?;
            match t.apply(&l.group, &w) {
                Some(u) => outln!("{u}"),
                None => bail!("{w} is shorter than the rows of the table"),
            }
        }
    }
    Ok(())
}

fn report_verification(group: &Group, bundle: &PresentationBundle) -> anyhow::Result<()> {
    let report = verify_bundle(group, bundle)?;
    outln!("{}/{} relators verified", report.verified, report.total);
    for s in &report.failed {
        outln!("failed: {s}");
    }
    for s in &report.undecided {
        outln!("undecided: {s}");
    }
    if !report.failed.is_empty() {
        bail!("{} relators failed", report.failed.len());
    }
    if !report.undecided.is_empty() {
        return Err(Undecided(format!("{} relators", report.undecided.len())).into());
    }
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Undecided>().is_some() {
        return 2;
    }
    match err.downcast_ref::<vgroup::Error>() {
        Some(e) if e.is_budget() => 2,
        _ => 1,
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.downcast_ref::<std::io::Error>()
        .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
