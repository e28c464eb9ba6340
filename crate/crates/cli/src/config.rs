// Copyright 2026 Kannai Contributors
// SPDX-License-Identifier: Apache-2.0

//! Flag and config-file parsing. Every subcommand accepts `--key value`
//! flags from a fixed key table plus `--config path`, a UTF-8 file of
//! `key = value` lines. Flags override the file.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;
use std::str::FromStr;

use clap::{Arg, ArgMatches, Command};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Heat,
    Biharmonic,
    Hj,
    KernelCompare,
    Linsolve,
    Epd,
    Transport,
    VerifyBlockenc,
    BenchBounds,
}

struct Key {
    name: &'static str,
    aliases: &'static [&'static str],
    help: &'static str,
}

const fn key(name: &'static str, help: &'static str) -> Key {
    Key {
        name,
        aliases: &[],
        help,
    }
}

const OUT: Key = Key {
    name: "out",
    aliases: &["out-path", "out_path"],
    help: "CSV destination, `-` for standard output [default: -]",
};
const N_CELLS: Key = Key {
    name: "n",
    aliases: &["n_cells"],
    help: "grid cells (modes for hj and transport) per axis",
};
const T: Key = key("T", "final time");
const EPS: Key = key("eps", "target precision");
const D: Key = key("d", "spatial dimension");
const RULE: Key = key(
    "rule",
    "quadrature rule: theorem | trapezoid [default: theorem]",
);
const R: Key = key("R", "trapezoid truncation radius [default: 10]");
const M: Key = key("M", "trapezoid panel count [default: 800]");
const TOL: Key = key("tol", "fail (exit 1) when the relative error exceeds this");
const SEED: Key = key("seed", "random seed [default: 0]");

impl Subcommand {
    pub const ALL: [Subcommand; 9] = [
        Subcommand::Heat,
        Subcommand::Biharmonic,
        Subcommand::Hj,
        Subcommand::KernelCompare,
        Subcommand::Linsolve,
        Subcommand::Epd,
        Subcommand::Transport,
        Subcommand::VerifyBlockenc,
        Subcommand::BenchBounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Heat => "heat",
            Subcommand::Biharmonic => "biharmonic",
            Subcommand::Hj => "hj",
            Subcommand::KernelCompare => "kernel-compare",
            Subcommand::Linsolve => "linsolve",
            Subcommand::Epd => "epd",
            Subcommand::Transport => "transport",
            Subcommand::VerifyBlockenc => "verify-blockenc",
            Subcommand::BenchBounds => "bench-bounds",
        }
    }

    fn about(self) -> &'static str {
        match self {
            Subcommand::Heat => "Heat equation on a staggered grid (Dirichlet or Neumann)",
            Subcommand::Biharmonic => "Biharmonic equation via the squared Laplacian",
            Subcommand::Hj => "Viscous Hamilton-Jacobi surrogate with Hopf-Cole recovery",
            Subcommand::KernelCompare => {
                "Truncation tails of the Gaussian kernel and its competitors"
            }
            Subcommand::Linsolve => "Linear solve through the long-time limit",
            Subcommand::Epd => "Euler-Poisson-Darboux solution from wave evolutions",
            Subcommand::Transport => "Heat multiplier as an average of transport evolutions",
            Subcommand::VerifyBlockenc => "Block-encoding residuals on a random factor",
            Subcommand::BenchBounds => "Empirical check of the error-budget inequalities",
        }
    }

    fn keys(self) -> Vec<Key> {
        let mut keys = match self {
            Subcommand::Heat => vec![
                N_CELLS,
                D,
                T,
                EPS,
                key(
                    "bc",
                    "boundary condition: dirichlet | neumann [default: dirichlet]",
                ),
                key(
                    "left",
                    "left Dirichlet value, one-dimensional runs only [default: 1]",
                ),
                key(
                    "right",
                    "right Dirichlet value, one-dimensional runs only [default: 1]",
                ),
                key("u0", "initial profile: cos2pi | cospi | sinpi"),
                RULE,
                R,
                M,
                TOL,
            ],
            Subcommand::Biharmonic => vec![N_CELLS, D, T, EPS, RULE, R, M, TOL],
            Subcommand::Hj => vec![
                N_CELLS,
                D,
                T,
                EPS,
                key("nu", "viscosity [default: 0.1]"),
                key("shift", "drift translation per axis [default: 0]"),
                RULE,
                R,
                M,
                TOL,
            ],
            Subcommand::KernelCompare => vec![
                T,
                EPS,
                key("beta", "improved LCHS exponent [default: 0.5]"),
                key("R", "largest radius on the grid [default: 40]"),
                key("M", "grid points [default: 400]"),
            ],
            Subcommand::Linsolve => vec![
                N_CELLS,
                D,
                EPS,
                key("rhs", "right-hand side: ones | top [default: ones]"),
            ],
            Subcommand::Epd => vec![
                N_CELLS,
                T,
                key("d", "Euler-Poisson-Darboux dimension [default: 3]"),
                TOL,
            ],
            Subcommand::Transport => vec![
                N_CELLS,
                D,
                T,
                key("nodes", "Hermite nodes per axis [default: 60]"),
                TOL,
            ],
            Subcommand::VerifyBlockenc => vec![
                key("n", "factor dimension [default: 4]"),
                key("M", "selector nodes [default: 8]"),
                SEED,
            ],
            Subcommand::BenchBounds => vec![
                N_CELLS,
                T,
                EPS,
                key("R", "truncation radius [default: 8 sqrt(T)]"),
                key("Q", "Gauss order per panel [default: from eps]"),
                key("delta_off", "claimed relative kernel error [default: 1e-3]"),
                key(
                    "inject",
                    "actual relative kernel error [default: delta_off]",
                ),
                key("delta1", "selector error [default: 1e-3]"),
                SEED,
            ],
        };
        keys.push(OUT);
        keys
    }

    /// Canonical key for `raw`, resolving aliases.
    fn canonical(self, raw: &str) -> Option<&'static str> {
        self.keys()
            .into_iter()
            .find(|k| k.name == raw || k.aliases.contains(&raw))
            .map(|k| k.name)
    }
}

/// A validated invocation: the subcommand and its merged parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    params: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new(subcommand: Subcommand, params: BTreeMap<String, String>) -> CliResult<Self> {
        for k in params.keys() {
            if subcommand.canonical(k) != Some(k.as_str()) {
                return Err(CliError::usage(format!(
                    "unknown key `{k}` for `{}`",
                    subcommand.name()
                )));
            }
        }
        Ok(Self { subcommand, params })
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    /// Parsed value of `key`, or `default` when absent.
    pub fn get<V: FromStr>(&self, key: &str, default: V) -> CliResult<V> {
        match self.params.get(key) {
            None => Ok(default),
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("invalid value `{s}` for `{key}`"))),
        }
    }

    pub fn get_opt<V: FromStr>(&self, key: &str) -> CliResult<Option<V>> {
        self.params
            .get(key)
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| CliError::usage(format!("invalid value `{s}` for `{key}`")))
            })
            .transpose()
    }

    pub fn get_str<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).map(str::trim).unwrap_or(default)
    }

    /// Parses a value that must be one of `choices`.
    pub fn choice(
        &self,
        key: &str,
        default: &'static str,
        choices: &[&'static str],
    ) -> CliResult<&'static str> {
        let v = self.get_str(key, default);
        choices.iter().copied().find(|c| *c == v).ok_or_else(|| {
            CliError::usage(format!(
                "invalid value `{v}` for `{key}`; expected one of {}",
                choices.join(", ")
            ))
        })
    }
}

fn command() -> Command {
    let mut cmd = Command::new("kannai")
        .about("Classical simulator for Kannai-transform LCU dissipative dynamics")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for sub in Subcommand::ALL {
        let mut c = Command::new(sub.name()).about(sub.about()).arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .help("file of `key = value` lines; flags take precedence"),
        );
        for k in sub.keys() {
            let mut arg = Arg::new(k.name)
                .long(k.name)
                .value_name("VALUE")
                .help(k.help)
                .allow_negative_numbers(true);
            for a in k.aliases {
                arg = arg.alias(*a);
            }
            c = c.arg(arg);
        }
        cmd = cmd.subcommand(c);
    }
    cmd
}

/// Parses a `key = value` file. Blank lines and `#` comments are skipped.
pub fn parse_config_text(
    sub: Subcommand,
    text: &str,
    origin: &str,
) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::usage(format!("{origin}:{}: expected `key = value`", lineno + 1))
        })?;
        let k = k.trim();
        let canonical = sub.canonical(k).ok_or_else(|| {
            CliError::usage(format!(
                "{origin}:{}: unknown key `{k}` for `{}`",
                lineno + 1,
                sub.name()
            ))
        })?;
        out.insert(canonical.to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn read_config_file(sub: Subcommand, path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_text(sub, &text, &path.display().to_string())
}

/// Outcome of argument parsing: a configuration, or a message clap already
/// formatted (help, version or a usage error) with its exit code.
pub enum Parsed {
    Run(RunConfig),
    Exit {
        message: String,
        code: u8,
        to_stderr: bool,
    },
}

/// Parses `argv` (including the program name), merging any config file
/// underneath the flags.
pub fn parse_config<I, S>(argv: I) -> CliResult<Parsed>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let code = e.exit_code() as u8;
            return Ok(Parsed::Exit {
                message: e.render().to_string(),
                code,
                to_stderr: e.use_stderr(),
            });
        }
    };
    let (name, sub_matches) = matches.subcommand().expect("subcommand is required");
    let sub = Subcommand::ALL
        .into_iter()
        .find(|s| s.name() == name)
        .expect("clap only accepts known subcommands");
    let mut params = match sub_matches.get_one::<String>("config") {
        Some(path) => read_config_file(sub, Path::new(path))?,
        None => BTreeMap::new(),
    };
    params.extend(flag_values(sub, sub_matches));
    Ok(Parsed::Run(RunConfig::new(sub, params)?))
}

fn flag_values(sub: Subcommand, m: &ArgMatches) -> BTreeMap<String, String> {
    sub.keys()
        .into_iter()
        .filter_map(|k| {
            m.get_one::<String>(k.name)
                .map(|v| (k.name.to_string(), v.clone()))
        })
        .collect()
}
