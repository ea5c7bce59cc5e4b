use std::fs;
use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pmcalc::Style;
use pmcalc_cli::script::{record, Record, Status};
use pmcalc_cli::syntax::{parse_command, strip_comment, Diagnostic};
use pmcalc_cli::{run_script, Config, Session};

#[derive(Parser, Debug)]
#[command(name = "pmcalc", version, about = "Calculus of pseudomeromorphic currents on coordinate charts")]
struct Args {
    /// Number of variables t1..tn.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Seed for random currents and test forms.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Absolute tolerance of assert_zero on numbers.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Ratio between successive regularization parameters.
    #[arg(long, default_value_t = 0.25)]
    eps_ratio: f64,
    /// Number of regularization parameters in a sweep.
    #[arg(long, default_value_t = 6)]
    eps_levels: usize,
    /// Tanh-sinh half-steps per quadrature panel.
    #[arg(long, default_value_t = 60)]
    quad_order: usize,
    /// Support radius of test-form bumps.
    #[arg(long, default_value_t = 1.0)]
    bump_radius: f64,
    #[arg(long, default_value = "ascii")]
    style: Style,
    /// Run a script instead of the REPL.
    #[arg(long)]
    script: Option<PathBuf>,
    /// Write JSON records here; human text then goes to stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Keep wall-clock times in reports.
    #[arg(long)]
    timing: bool,
}

impl Args {
    fn config(&self) -> Config {
        Config {
            dim: self.dim,
            seed: self.seed,
            tol: self.tol,
            eps_ratio: self.eps_ratio,
            eps_levels: self.eps_levels,
            quad_order: self.quad_order,
            bump_radius: self.bump_radius,
            style: self.style,
            timing: self.timing,
            ..Config::default()
        }
    }
}

fn json_line(r: &Record) -> String {
    serde_json::to_string(r).expect("records serialize")
}

fn emit(records: &[Record], json: Option<&PathBuf>) -> io::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match json {
        Some(path) => {
            let mut text = String::new();
            for r in records {
                text += &json_line(r);
                text.push('\n');
                writeln!(out, "{}", r.human())?;
            }
            fs::write(path, text)
        }
        None => {
            for r in records {
                writeln!(out, "{}", json_line(r))?;
            }
            Ok(())
        }
    }
}

fn run_file(args: &Args, path: &PathBuf) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("pmcalc: cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let run = run_script(&text, args.config());
    for r in run.records.iter().filter(|r| r.status == Status::Error) {
        eprintln!("pmcalc: {}: {}", path.display(), r.message.as_deref().unwrap_or("error"));
    }
    if let Err(e) = emit(&run.records, args.json.as_ref()) {
        eprintln!("pmcalc: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(run.exit_code as u8)
}

fn repl(args: &Args) -> ExitCode {
    let mut session = match Session::new(args.config()) {
        Ok(s) => s,
        Err(m) => {
            eprintln!("pmcalc: {m}");
            return ExitCode::from(2);
        }
    };
    let interactive = io::stdin().is_terminal();
    let mut records = Vec::new();
    let mut code = 0u8;
    let prompt = |session: &Session| {
        if interactive {
            print!("pmcalc[n={}]> ", session.ctx().dim());
            let _ = io::stdout().flush();
        }
    };
    prompt(&session);
    for (i, raw) in io::stdin().lock().lines().enumerate() {
        let Ok(raw) = raw else { break };
        let line = i + 1;
        let input = strip_comment(&raw).trim().to_string();
        match parse_command(&raw, line) {
            Ok(None) => {}
            Ok(Some(cmd)) => match session.execute(&cmd) {
                Ok(out) => {
                    let r = record(records.len() + 1, line, &cmd, &input, out, &session);
                    if r.status == Status::Fail {
                        code = code.max(1);
                    }
                    println!("{}", r.human());
                    records.push(r);
                }
                Err((span, msg)) => {
                    code = 2;
                    println!("error: {}", Diagnostic::at(&raw, line, span, msg));
                }
            },
            Err(d) => {
                code = 2;
                println!("error: {d}");
            }
        }
        prompt(&session);
    }
    if let Some(path) = &args.json {
        let text: String = records.iter().map(|r| json_line(r) + "\n").collect();
        if let Err(e) = fs::write(path, text) {
            eprintln!("pmcalc: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match &args.script {
        Some(path) => run_file(&args, path),
        None => repl(&args),
    }
}
