//! `fbc`: exact computation in free-by-cyclic groups from the command line.
//!
//! Inputs are text in the same grammars the library parses and prints:
//! words (`"a b^-2 x3"`), free-group maps (`"a -> a b^2 ; b -> b"`, with an
//! optional `inv:` block), integer matrices (`"[[1,2],[0,1]]"`), and
//! mapping-torus elements (`"t^3 | a b"`). Every subcommand validates its
//! input before dispatching to the library, reports results as plain text
//! or (with `--json`) as one flat JSON record with stable keys, and signals
//! decisions through the exit code: `0` success, `1` negative decision
//! from `iso`, `conj-mat`, `fix`, or `center`, `2` malformed input.
//! `--check` suppresses the report and leaves the exit code as the answer.

use clap::{Args, Parser, Subcommand};
use fbc_core::outclass::{classify_out, classify_out_map, iso_decide};
use fbc_core::parabolic::{fixed_by, parabolic_outer_normal_form};
use fbc_core::parse::{parse_free_map, parse_matrix, parse_torus_element, parse_word};
use fbc_core::torus::{abelian_invariants_of, builtin, center_is_nontrivial};
use fbc_core::zmat::gl2_conjugate;
use fbc_core::{
    AbelianInvariants, FreeMap, IntMatrix, OutReport, Scalar, Torus, TorusMap, Word,
};
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{Map as JsonMap, Value};
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "fbc",
    version,
    about = "Exact computation in free-by-cyclic groups F_n ⋊ ℤ",
    long_about = "Exact computation in free-by-cyclic groups F_n ⋊ ℤ: normal-form \
arithmetic in mapping tori, classification of the outer automorphism group of \
rank-2 tori, isomorphism decisions with certificates, and fixed-subgroup queries \
for the shear a ↦ a·bᵏ."
)]
struct Cli {
    /// Emit one flat JSON record instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Suppress the report and answer through the exit code alone.
    #[arg(long, global = true)]
    check: bool,
    #[command(subcommand)]
    command: Command,
}

/// One input that is either a free-group map or its abelianized matrix.
#[derive(Args)]
struct SourceArgs {
    /// Monodromy as a free-group map, e.g. "a -> a b^2 ; b -> b".
    #[arg(short = 'a', long = "auto", value_name = "MAP")]
    auto: Option<String>,
    /// Abelianized monodromy as a matrix, e.g. "[[1,2],[0,1]]".
    #[arg(short = 'm', long = "matrix", value_name = "MATRIX")]
    matrix: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify Out(M_φ) for a rank-2 mapping torus M_φ.
    Classify(SourceArgs),
    /// Decide whether two rank-2 mapping tori are isomorphic (exit 1 if not).
    Iso {
        /// Monodromy as a free-group map (repeat for the second torus).
        #[arg(short = 'a', long = "auto", value_name = "MAP")]
        autos: Vec<String>,
        /// Abelianized monodromy as a matrix (repeat for the second torus).
        #[arg(short = 'm', long = "matrix", value_name = "MATRIX")]
        matrices: Vec<String>,
    },
    /// Print the abelianization invariants of a mapping torus.
    Ab(SourceArgs),
    /// Report whether a rank-2 mapping torus has nontrivial center.
    Center {
        /// Monodromy as a free-group map.
        #[arg(short = 'a', long = "auto", value_name = "MAP")]
        auto: String,
    },
    /// Freely reduce a word.
    Reduce {
        /// The word, e.g. "a a^-1 b^3".
        word: String,
        /// Ambient free-group rank (default: inferred from the letters).
        #[arg(short = 'n', long, value_name = "RANK")]
        rank: Option<usize>,
    },
    /// Multiply mapping-torus elements and print the normal form.
    Mul {
        /// Monodromy as a free-group map.
        #[arg(short = 'a', long = "auto", value_name = "MAP")]
        auto: String,
        /// Elements "t^K | w" in multiplication order.
        #[arg(value_name = "ELEMENT", required = true)]
        elements: Vec<String>,
    },
    /// Test whether a rank-2 word is fixed by the r-th power of a ↦ a·bᵏ.
    Fix {
        /// The word to test.
        #[arg(short = 'w', long = "word", value_name = "WORD")]
        word: String,
        /// Shear parameter k ≠ 0.
        #[arg(short = 'k', value_name = "INT", allow_hyphen_values = true)]
        k: String,
        /// Power r ≠ 0.
        #[arg(short = 'r', value_name = "INT", allow_hyphen_values = true)]
        r: String,
    },
    /// Normalize a self-map of a shear mapping torus: Θ·Ψ^m·Γ_g = Ξ^i·Δ^δ·Ω^ω.
    Normalize {
        /// Monodromy as a free-group map; must have the shape a ↦ a bᵏ, b ↦ b.
        #[arg(short = 'a', long = "auto", value_name = "MAP")]
        auto: String,
        /// Θ as a composition, applied left to right: atoms Psi, Omega,
        /// Delta, Xi, Upsilon, Gamma[ELEMENT], each with an optional ^INT,
        /// e.g. "Xi^2 Delta Gamma[t | a b] Psi^3".
        #[arg(long, value_name = "COMPOSITION")]
        theta: String,
    },
    /// Decide GL₂(ℤ) conjugacy of two matrices (exit 1 if not conjugate).
    ConjMat {
        /// A matrix (give exactly two).
        #[arg(short = 'm', long = "matrix", value_name = "MATRIX")]
        matrices: Vec<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    };
    std::process::exit(code);
}

/// One finished report: exit code, machine record, and human text.
type Outcome = (i32, JsonMap<String, Value>, String);

fn run(cli: &Cli) -> Result<i32, String> {
    let (code, record, text) = match &cli.command {
        Command::Classify(source) => cmd_classify(source)?,
        Command::Iso { autos, matrices } => cmd_iso(autos, matrices)?,
        Command::Ab(source) => cmd_ab(source)?,
        Command::Center { auto } => cmd_center(auto)?,
        Command::Reduce { word, rank } => cmd_reduce(word, *rank)?,
        Command::Mul { auto, elements } => cmd_mul(auto, elements)?,
        Command::Fix { word, k, r } => cmd_fix(word, k, r)?,
        Command::Normalize { auto, theta } => cmd_normalize(auto, theta)?,
        Command::ConjMat { matrices } => cmd_conj_mat(matrices)?,
    };
    if !cli.check {
        if cli.json {
            println!("{}", Value::Object(record));
        } else {
            println!("{text}");
        }
    }
    Ok(code)
}

// ---------------------------------------------------------------------
// input loading
// ---------------------------------------------------------------------

fn stringify<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn parse_scalar(text: &str) -> Result<Scalar, String> {
    Scalar::from_str(text.trim()).map_err(|_| format!("'{text}' is not an integer"))
}

/// Parses a free-group map and guarantees it carries a verified inverse:
/// rank-2 maps are checked and inverted automatically, higher ranks need
/// an explicit `inv:` block.
fn load_verified_map(spec: &str) -> Result<FreeMap, String> {
    let map = parse_free_map::<Scalar>(spec).map_err(stringify)?;
    if map.has_inverse() {
        return Ok(map);
    }
    if map.rank() == 2 {
        if !map.is_automorphism_rank2().map_err(stringify)? {
            return Err("the map is not an automorphism of the rank-2 free group".into());
        }
        let inverse = map.invert_rank2().map_err(stringify)?;
        map.with_inverse(inverse.images().to_vec()).map_err(stringify)
    } else {
        Err(format!(
            "a rank-{} map needs an explicit inverse: append '; inv: ...' to the spec",
            map.rank()
        ))
    }
}

fn load_torus(spec: &str) -> Result<Torus, String> {
    Torus::new(load_verified_map(spec)?).map_err(stringify)
}

/// The abelianized monodromy from either input form.
fn load_abelianized(source: &SourceArgs, command: &str) -> Result<IntMatrix, String> {
    match (&source.auto, &source.matrix) {
        (Some(spec), None) => Ok(load_verified_map(spec)?.abelianize()),
        (None, Some(text)) => parse_matrix::<Scalar>(text).map_err(stringify),
        _ => Err(format!("{command} needs exactly one of -a or -m")),
    }
}

// ---------------------------------------------------------------------
// machine output
// ---------------------------------------------------------------------

/// Integers become JSON numbers when they fit `i64`, decimal strings
/// otherwise, so records always re-parse to the same values.
fn json_int(v: &Scalar) -> Value {
    match v.to_i64() {
        Some(n) => Value::from(n),
        None => Value::from(v.to_string()),
    }
}

fn json_opt<T, F: Fn(&T) -> Value>(v: &Option<T>, f: F) -> Value {
    v.as_ref().map(f).unwrap_or(Value::Null)
}

fn record(entries: Vec<(&str, Value)>) -> JsonMap<String, Value> {
    entries
        .into_iter()
        .map(|(k, v)| (k.to_owned(), v))
        .collect()
}

fn invariants_record(inv: &AbelianInvariants) -> Vec<(&'static str, Value)> {
    vec![
        ("free_rank", Value::from(inv.free_rank)),
        (
            "torsion",
            Value::Array(inv.torsion.iter().map(json_int).collect()),
        ),
        ("display", Value::from(inv.to_string())),
    ]
}

// ---------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------

fn cmd_classify(source: &SourceArgs) -> Result<Outcome, String> {
    let report: OutReport = match (&source.auto, &source.matrix) {
        (Some(spec), None) => classify_out_map(&load_verified_map(spec)?).map_err(stringify)?,
        (None, Some(text)) => {
            classify_out(&parse_matrix::<Scalar>(text).map_err(stringify)?).map_err(stringify)?
        }
        _ => return Err("classify needs exactly one of -a or -m".into()),
    };
    let mut text = report.to_string();
    if let Some(generator) = report.generator {
        text.push_str(&format!("\ngenerator: {generator}"));
    }
    let json = record(vec![
        ("case", Value::from(report.case.tag())),
        ("descriptor", Value::from(report.descriptor)),
        ("canonical_k", json_opt(&report.canonical_k, json_int)),
        (
            "parity",
            json_opt(&report.parity, |p| Value::from(u64::from(*p))),
        ),
        (
            "canonical",
            json_opt(&report.canonical, |m| Value::from(m.to_string())),
        ),
        ("generator", json_opt(&report.generator, |g| Value::from(*g))),
        (
            "conjugator",
            json_opt(&report.conjugator, |m| Value::from(m.to_string())),
        ),
    ]);
    Ok((0, json, text))
}

fn cmd_iso(autos: &[String], matrices: &[String]) -> Result<Outcome, String> {
    let mut inputs: Vec<IntMatrix> = Vec::new();
    for spec in autos {
        inputs.push(load_verified_map(spec)?.abelianize());
    }
    for text in matrices {
        inputs.push(parse_matrix::<Scalar>(text).map_err(stringify)?);
    }
    let [a, b]: [IntMatrix; 2] = inputs
        .try_into()
        .map_err(|_| "iso needs exactly two inputs (any mix of -a and -m)".to_owned())?;
    let decision = iso_decide(&a, &b).map_err(stringify)?;
    let json = record(vec![
        ("isomorphic", Value::from(decision.isomorphic)),
        ("inverted", Value::from(decision.inverted)),
        (
            "conjugator",
            json_opt(&decision.conjugator, |m| Value::from(m.to_string())),
        ),
    ]);
    let code = i32::from(!decision.isomorphic);
    Ok((code, json, decision.to_string()))
}

fn cmd_ab(source: &SourceArgs) -> Result<Outcome, String> {
    let a = load_abelianized(source, "ab")?;
    if !a.is_unimodular() {
        return Err(format!(
            "matrix {a} is not unimodular, so it is not an abelianized automorphism"
        ));
    }
    let inv = abelian_invariants_of(&a);
    Ok((0, record(invariants_record(&inv)), inv.to_string()))
}

fn cmd_center(auto: &str) -> Result<Outcome, String> {
    let torus = load_torus(auto)?;
    let center = center_is_nontrivial(&torus).map_err(stringify)?;
    let json = record(vec![
        ("nontrivial", Value::from(center.is_some())),
        (
            "element",
            json_opt(&center, |z| Value::from(z.to_string())),
        ),
    ]);
    let (code, text) = match center {
        Some(z) => (0, format!("center: nontrivial, generated by {z}")),
        None => (1, "center: trivial".to_owned()),
    };
    Ok((code, json, text))
}

fn cmd_reduce(word: &str, rank: Option<usize>) -> Result<Outcome, String> {
    let w: Word = parse_word(rank, word).map_err(stringify)?;
    let json = record(vec![
        ("word", Value::from(w.to_string())),
        ("rank", Value::from(w.rank())),
        ("syllables", Value::from(w.syllable_count())),
        ("letters", json_int(&w.letter_length())),
    ]);
    let text = w.to_string();
    Ok((0, json, text))
}

fn cmd_mul(auto: &str, elements: &[String]) -> Result<Outcome, String> {
    let torus = load_torus(auto)?;
    let mut product = torus.identity_element();
    for text in elements {
        let el = parse_torus_element(&torus, text).map_err(stringify)?;
        product = product.multiply(&el).map_err(stringify)?;
    }
    let json = record(vec![
        ("element", Value::from(product.to_string())),
        ("t_exponent", json_int(product.t_exponent())),
        ("tail", Value::from(product.tail().to_string())),
    ]);
    let text = product.to_string();
    Ok((0, json, text))
}

fn cmd_fix(word: &str, k: &str, r: &str) -> Result<Outcome, String> {
    let w: Word = parse_word(Some(2), word).map_err(stringify)?;
    let k = parse_scalar(k)?;
    let r = parse_scalar(r)?;
    let fixed = fixed_by(&w, &k, &r).map_err(stringify)?;
    let json = record(vec![
        ("fixed", Value::from(fixed)),
        ("word", Value::from(w.to_string())),
        ("k", json_int(&k)),
        ("r", json_int(&r)),
    ]);
    let text = if fixed {
        format!("fixed: {w} satisfies w·φ^r = w for φ: a ↦ a·b^{k}, r = {r}")
    } else {
        format!("not fixed: {w} moves under φ^r for φ: a ↦ a·b^{k}, r = {r}")
    };
    Ok((i32::from(!fixed), json, text))
}

fn cmd_normalize(auto: &str, theta: &str) -> Result<Outcome, String> {
    let torus = load_torus(auto)?;
    let map = parse_theta(&torus, theta)?;
    let nf = parabolic_outer_normal_form(&map).map_err(stringify)?;
    let json = record(vec![
        ("m", json_int(&nf.m)),
        ("g", Value::from(nf.g.to_string())),
        ("i", json_int(&nf.i)),
        ("delta", Value::from(nf.delta)),
        ("omega", Value::from(nf.omega)),
    ]);
    let mut rhs = format!("Ξ^{}", nf.i);
    if nf.delta {
        rhs.push_str("·Δ");
    }
    if nf.omega {
        rhs.push_str("·Ω");
    }
    let text = format!(
        "Θ·Ψ^{m}·Γ_g = {rhs}\nm = {m}\ng = {g}\ni = {i}\ndelta = {delta}\nomega = {omega}",
        m = nf.m,
        g = nf.g,
        i = nf.i,
        delta = nf.delta,
        omega = nf.omega,
    );
    Ok((0, json, text))
}

fn cmd_conj_mat(matrices: &[String]) -> Result<Outcome, String> {
    let [a, b]: [IntMatrix; 2] = matrices
        .iter()
        .map(|text| parse_matrix::<Scalar>(text).map_err(stringify))
        .collect::<Result<Vec<_>, _>>()?
        .try_into()
        .map_err(|_| "conj-mat needs exactly two -m matrices".to_owned())?;
    let witness = gl2_conjugate(&a, &b).map_err(stringify)?;
    let json = record(vec![
        ("conjugate", Value::from(witness.is_some())),
        (
            "conjugator",
            json_opt(&witness, |m| Value::from(m.to_string())),
        ),
    ]);
    let (code, text) = match witness {
        Some(p) => (0, format!("conjugate, P = {p} with P·A·P⁻¹ = B")),
        None => (1, "not conjugate".to_owned()),
    };
    Ok((code, json, text))
}

// ---------------------------------------------------------------------
// the composition grammar for `normalize --theta`
// ---------------------------------------------------------------------

/// Parses a composition of built-in self-maps, applied left to right.
///
/// Grammar: whitespace-separated atoms `NAME`, `NAME^INT`,
/// `Gamma[ELEMENT]`, or `Gamma[ELEMENT]^INT`, where `NAME` is one of
/// `Psi`, `Omega`, `Delta`, `Xi`, `Upsilon` (case-insensitive) and
/// `ELEMENT` uses the torus-element grammar `t^K | w`.
fn parse_theta(torus: &Torus, input: &str) -> Result<TorusMap, String> {
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0usize;
    let mut map = TorusMap::identity(torus);
    let mut seen_any = false;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && chars[i].is_ascii_alphabetic() {
            i += 1;
        }
        if i == start {
            return Err(format!(
                "unexpected character '{}' at offset {start} in the composition",
                chars[start]
            ));
        }
        let name: String = chars[start..i].iter().collect::<String>().to_ascii_lowercase();
        let mut element: Option<String> = None;
        if i < chars.len() && chars[i] == '[' {
            let open = i;
            i += 1;
            let body_start = i;
            let mut depth = 1usize;
            while i < chars.len() {
                match chars[i] {
                    '[' => depth += 1,
                    ']' => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                i += 1;
            }
            if depth != 0 {
                return Err(format!("unclosed '[' at offset {open} in the composition"));
            }
            element = Some(chars[body_start..i].iter().collect());
            i += 1;
        }
        let mut exp = Scalar::from(1);
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let exp_start = i;
            if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[exp_start..i].iter().collect();
            exp = parse_scalar(&text)
                .map_err(|_| format!("bad exponent '{text}' in the composition"))?;
        }
        let atom = atom_map(torus, &name, element.as_deref(), &exp)?;
        map = map.compose(&atom).map_err(stringify)?;
        seen_any = true;
    }
    if !seen_any {
        return Err("empty composition: give at least one of Psi, Omega, Delta, Xi, Upsilon, Gamma[...]".into());
    }
    Ok(map)
}

fn atom_map(
    torus: &Torus,
    name: &str,
    element: Option<&str>,
    exp: &Scalar,
) -> Result<TorusMap, String> {
    if name == "gamma" {
        let text = element
            .ok_or_else(|| "Gamma needs a conjugating element: Gamma[t^K | w]".to_owned())?;
        let g = parse_torus_element(torus, text).map_err(stringify)?;
        let powered = g.pow(exp).map_err(stringify)?;
        return builtin::gamma(&powered).map_err(stringify);
    }
    if element.is_some() {
        return Err(format!("{name} takes no [element] argument"));
    }
    match name {
        "psi" => builtin::psi_power(torus, exp).map_err(stringify),
        "xi" => builtin::xi_power(torus, exp).map_err(stringify),
        "omega" => powered(builtin::omega(torus).map_err(stringify)?, exp),
        "delta" => powered(builtin::delta(torus).map_err(stringify)?, exp),
        "upsilon" => powered(builtin::upsilon(torus).map_err(stringify)?, exp),
        other => Err(format!(
            "unknown map '{other}' (expected Psi, Omega, Delta, Xi, Upsilon, or Gamma[...])"
        )),
    }
}

fn powered(base: TorusMap, exp: &Scalar) -> Result<TorusMap, String> {
    if exp.is_zero() {
        return Ok(TorusMap::identity(base.source()));
    }
    if exp.is_negative() {
        let inverse = base.inverse_map().map_err(stringify)?;
        return inverse.power(&-exp.clone()).map_err(stringify);
    }
    base.power(exp).map_err(stringify)
}
