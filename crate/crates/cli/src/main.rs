use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;

use branetile::cover::DEFAULT_PATCH_CAP;
use branetile::{examples, parse_tiling, BraneTiling, Error};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

mod commands;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "branetile", version, about = "Brane tiling combinatorics")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for the parallel parts (0 keeps the default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Most lifted tiles a developed patch may hold.
    #[arg(long, global = true, env = "BRANETILE_PATCH_CAP", default_value_t = DEFAULT_PATCH_CAP, value_parser = positive)]
    patch_cap: usize,
}

#[derive(Args)]
struct Input {
    /// Tiling file, or the name of a bundled tiling (c3, conifold, cube).
    tiling: String,
}

#[derive(Args)]
struct Budget {
    /// Largest path weight examined.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    weight_bound: u64,

    /// Patch radius; defaults to the weight bound plus one.
    #[arg(long, value_parser = positive)]
    radius: Option<usize>,
}

#[derive(Args)]
struct Framing {
    /// Face the modules are generated at.
    #[arg(long, default_value_t = 0)]
    face: usize,

    /// Patch radius; defaults to twice the dimension plus four.
    #[arg(long, value_parser = positive)]
    radius: Option<usize>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a tiling and report its genus and size.
    Validate(Input),
    /// List the faces with their boundary edges.
    Faces(Input),
    /// The dual quiver and its superpotential.
    Quiver(Input),
    /// Perfect matchings and edges lying in none of them.
    Matchings(Input),
    /// A positive grading with equal weight around every vertex.
    Grade(Input),
    /// Bounded search for inequivalent paths that become equivalent after
    /// appending simple loops.
    Consistency {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        budget: Budget,
    },
    /// Check that minimal paths extend to minimal paths, in both directions.
    Mr2 {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        budget: Budget,
    },
    /// Scan graded pieces for loop-shaped boundaries.
    Cy3 {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        budget: Budget,
    },
    /// Cyclic torus-fixed modules of one dimension.
    Modules {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3, value_parser = positive)]
        dim: usize,
        #[command(flatten)]
        framing: Framing,
    },
    /// Dimer configurations of the modules of one dimension.
    Dimers {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3, value_parser = positive)]
        dim: usize,
        #[command(flatten)]
        framing: Framing,
    },
    /// Weight lattices of the torus actions.
    Tw(Input),
    /// Signed fixed-point counts up to a total dimension.
    Dt {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4, value_parser = positive)]
        max_dim: usize,
        #[command(flatten)]
        framing: Framing,
    },
}

/// What every subcommand produces.
pub struct Report {
    pub command: &'static str,
    pub verdict: String,
    pub parameters: BTreeMap<&'static str, Value>,
    pub data: Value,
    pub lines: Vec<String>,
    pub code: u8,
}

impl Report {
    pub fn new(command: &'static str) -> Report {
        Report {
            command,
            verdict: "ok".into(),
            parameters: BTreeMap::new(),
            data: Value::Null,
            lines: Vec::new(),
            code: 0,
        }
    }

    pub fn param(&mut self, key: &'static str, v: impl Into<Value>) {
        self.parameters.insert(key, v.into());
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    /// A negative verdict: exit code 2.
    pub fn negative(&mut self, verdict: &str) {
        self.verdict = verdict.into();
        self.code = 2;
    }

    fn render(&self, json: bool) -> String {
        if json {
            let v = json!({
                "schema_version": SCHEMA_VERSION,
                "command": self.command,
                "verdict": self.verdict,
                "parameters": self.parameters,
                "data": self.data,
            });
            let mut s = serde_json::to_string_pretty(&v).expect("reports serialize");
            s.push('\n');
            s
        } else {
            let mut s = format!("{}: {}\n", self.command, self.verdict);
            if !self.parameters.is_empty() {
                let ps: Vec<String> = self
                    .parameters
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                s += &format!("parameters: {}\n", ps.join(" "));
            }
            for l in &self.lines {
                s += l;
                s.push('\n');
            }
            s
        }
    }
}

pub fn load(name: &str) -> Result<BraneTiling, String> {
    let text = if Path::new(name).exists() {
        std::fs::read_to_string(name).map_err(|e| format!("{name}: {e}"))?
    } else if let Some(t) = examples::bundled(name) {
        t.to_string()
    } else {
        return Err(format!("{name}: no such file or bundled tiling"));
    };
    parse_tiling(&text).map_err(|e| format!("{name}: {e}"))
}

pub enum Failure {
    Usage(String),
    Library(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Usage(e)
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let cap = cli.patch_cap;
    let budget_radius = |b: &Budget| b.radius.unwrap_or(b.weight_bound as usize + 1);
    let framing_radius = |f: &Framing, n: usize| f.radius.unwrap_or(2 * n + 4);
    let mut report = match &cli.command {
        Command::Validate(i) => commands::validate(&load(&i.tiling)?),
        Command::Faces(i) => commands::faces(&load(&i.tiling)?),
        Command::Quiver(i) => commands::quiver(&load(&i.tiling)?),
        Command::Matchings(i) => commands::matchings(&load(&i.tiling)?),
        Command::Grade(i) => commands::grade(&load(&i.tiling)?),
        Command::Consistency { input, budget } => commands::consistency(
            &load(&input.tiling)?,
            budget.weight_bound,
            budget_radius(budget),
            cap,
        )?,
        Command::Mr2 { input, budget } => commands::mr2(
            &load(&input.tiling)?,
            budget.weight_bound,
            budget_radius(budget),
            cap,
        )?,
        Command::Cy3 { input, budget } => commands::cy3(
            &load(&input.tiling)?,
            budget.weight_bound,
            budget_radius(budget),
            cap,
        )?,
        Command::Modules {
            input,
            dim,
            framing,
        } => commands::modules(
            &load(&input.tiling)?,
            *dim,
            framing.face,
            framing_radius(framing, *dim),
            cap,
        )?,
        Command::Dimers {
            input,
            dim,
            framing,
        } => commands::dimers(
            &load(&input.tiling)?,
            *dim,
            framing.face,
            framing_radius(framing, *dim) + 1,
            cap,
        )?,
        Command::Tw(i) => commands::tw(&load(&i.tiling)?)?,
        Command::Dt {
            input,
            max_dim,
            framing,
        } => commands::dt(
            &load(&input.tiling)?,
            *max_dim,
            framing.face,
            framing_radius(framing, *max_dim),
            cap,
        )?,
    };
    if report.parameters.contains_key("radius") {
        report.param("patch_cap", cap);
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match branetile::par::with_threads(cli.threads, || run(&cli)) {
        Ok(r) => {
            print!("{}", r.render(cli.json));
            ExitCode::from(r.code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource() { 3 } else { 1 })
        }
    }
}
