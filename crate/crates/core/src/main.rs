use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sortweave::flow::build_cfg;
use sortweave::harness::diff::diff_test;
use sortweave::harness::gen::{corpus, GenConfig};
use sortweave::lang::{language, LanguageDef};
use sortweave::modularizer::{modularize_schema, Schema};
use sortweave::transforms::{testcov, Pass};

const USAGE: u8 = 1;
const FAILED: u8 = 2;
const DIVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "sortweave", version, about = "Source-to-source transformations for MiniC, MiniJS and MiniLua")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply a pass and print the transformed source.
    Transform {
        #[arg(long, value_parser = ["minic", "minijs", "minilua"])]
        lang: String,
        #[arg(long)]
        pass: Pass,
        #[arg(long)]
        out: Option<PathBuf>,
        file: PathBuf,
    },
    /// Check that parsing the pretty-printed program gives it back.
    Roundtrip {
        #[arg(long, value_parser = ["minic", "minijs", "minilua"])]
        lang: String,
        file: PathBuf,
    },
    /// Compare program traces before and after a pass.
    Difftest {
        #[arg(long, value_parser = ["minic", "minijs", "minilua"])]
        lang: String,
        #[arg(long)]
        pass: Pass,
        #[arg(long, conflicts_with = "corpus", requires = "seed")]
        count: Option<usize>,
        #[arg(long, conflicts_with = "corpus", requires = "count")]
        seed: Option<u64>,
        /// Directory of programs, read in file-name order.
        #[arg(long, required_unless_present = "count")]
        corpus: Option<PathBuf>,
        /// Ignore coverage marker events.
        #[arg(long)]
        erase_markers: bool,
    },
    /// Print the control-flow graph.
    Cfg {
        #[arg(long, value_parser = ["minic", "minijs", "minilua"])]
        lang: String,
        #[arg(long, required = true)]
        dot: bool,
        file: PathBuf,
    },
    /// Print the sorts and kinds generated from a schema file.
    Modularize { schema: PathBuf },
    /// Print a language's injection table.
    Inspect {
        #[arg(long, value_name = "LANG", value_parser = ["minic", "minijs", "minilua"])]
        injections: String,
    },
}

struct Failure(u8, String);

fn fail(code: u8, msg: impl ToString) -> Failure {
    Failure(code, msg.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(USAGE, format!("{}: {e}", path.display())))
}

fn lang(key: &str) -> &'static LanguageDef {
    language(key).expect("validated by the argument parser")
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Transform { lang: key, pass, out, file } => {
            let l = lang(&key);
            let src = read(&file)?;
            let ast = l.parse(&src).map_err(|e| fail(FAILED, e))?;
            let term = l.decompose(&ast).map_err(|e| fail(FAILED, e))?;
            let result = if pass == Pass::Testcov {
                let (t, n) = testcov(&term, l).map_err(|e| fail(FAILED, e))?;
                eprintln!("coverage slots: {n}");
                t
            } else {
                pass.run(&term, l).map_err(|e| fail(FAILED, e))?
            };
            let text = l.pretty(&l.recompose(&result).map_err(|e| fail(FAILED, e))?);
            match out {
                Some(p) => fs::write(&p, text).map_err(|e| fail(USAGE, format!("{}: {e}", p.display())))?,
                None => print!("{text}"),
            }
        }
        Cmd::Roundtrip { lang: key, file } => {
            let l = lang(&key);
            let ast = l.parse(&read(&file)?).map_err(|e| fail(FAILED, e))?;
            let term = l.decompose(&ast).map_err(|e| fail(FAILED, e))?;
            let back = l.recompose(&term).map_err(|e| fail(FAILED, e))?;
            let text = l.pretty(&back);
            let again = l.parse(&text).map_err(|e| fail(FAILED, format!("printed program does not parse: {e}")))?;
            if again != ast || back != ast {
                return Err(fail(FAILED, "round trip changed the program"));
            }
            print!("{text}");
        }
        Cmd::Difftest { lang: key, pass, count, seed, corpus: dir, erase_markers } => {
            let l = lang(&key);
            let programs = match (dir, count, seed) {
                (Some(d), _, _) => read_corpus(&d, l)?,
                (None, Some(n), Some(s)) => corpus(l, &GenConfig::default().with_seed(s), n),
                _ => return Err(fail(USAGE, "give --count and --seed, or --corpus")),
            };
            let report = diff_test(l, pass, &programs, erase_markers);
            println!("{report}");
            if !report.all_passed() {
                return Err(Failure(DIVERGED, String::new()));
            }
        }
        Cmd::Cfg { lang: key, file, .. } => {
            let l = lang(&key);
            let ast = l.parse(&read(&file)?).map_err(|e| fail(FAILED, e))?;
            let term = l.decompose(&ast).map_err(|e| fail(FAILED, e))?;
            print!("{}", build_cfg(&term, l).map_err(|e| fail(FAILED, e))?.to_dot());
        }
        Cmd::Modularize { schema } => {
            let name = schema.file_stem().and_then(|s| s.to_str()).unwrap_or("Schema").to_string();
            let parsed = Schema::parse(&name, &read(&schema)?).map_err(|e| fail(FAILED, e))?;
            print!("{}", modularize_schema(&parsed).map_err(|e| fail(FAILED, e))?.dump());
        }
        Cmd::Inspect { injections } => print!("{}", lang(&injections).injections.dump()),
    }
    Ok(())
}

fn read_corpus(dir: &Path, l: &LanguageDef) -> Result<Vec<String>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| fail(USAGE, format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|x| x.to_str()) == Some(l.ext))
        .collect();
    files.sort();
    files.iter().map(|p| read(p)).collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}
