//! Command line front end for the Nielsen equivalence toolkit.
//!
//! Subcommands: `classify` (signature type, exceptional conditions and the
//! representation-existence case), `rep` (build and verify a cyclic-faithful
//! representation), `decide` (the congruence criterion with an explicit
//! certificate), `certify` (the invariant pipeline), `scan-pi` (exhaustive
//! injectivity scan of the invariant element), and `selftest`.
//!
//! Exit codes: 0 success or decided, 2 exceptional-unknown or every position
//! skipped, 1 runtime error, 64 usage error.

use std::fs;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use nielsen_core::eta::{
    certify_inequivalence, exact_backend_applies, verify_certificate, CertVerdict,
    CertifyOptions,
};
use nielsen_core::presentation::{
    criterion_decide, is_exceptional, parse_aux_word, rep_case, signature_type,
    FuchsianPresentation, SignatureType, StandardGenSys, Verdict,
};
use nielsen_core::scan::pi_injectivity_scan;
use nielsen_core::sl2::{build_cyclic_faithful, verify_rep};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "nielsen",
    about = "Decide and certify Nielsen equivalence of standard generating systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the signature type, exceptional conditions and the
    /// representation-existence case of a presentation
    Classify {
        #[command(flatten)]
        group: GroupArgs,
        /// Number of additional order-2 generators to append
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long)]
        json: bool,
    },
    /// Build a cyclic-faithful matrix representation and verify it
    Rep {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Apply the congruence decision criterion to two standard systems
    Decide {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        systems: SystemArgs,
        #[arg(long)]
        json: bool,
    },
    /// Run the invariant certification pipeline on two standard systems
    Certify {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        systems: SystemArgs,
        /// Coefficient backend: auto, exact or approx
        #[arg(long, default_value = "auto")]
        backend: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustively scan the invariant element for injectivity violations
    ScanPi {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u64,
        /// Comma separated rational scale factors, e.g. 1,2,1/2
        #[arg(long, default_value = "1")]
        r: String,
        #[arg(long)]
        json: bool,
    },
    /// Run a built-in consistency sweep and report each check
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct GroupArgs {
    /// Comma separated torsion exponents, e.g. 5,5,5,5,5
    #[arg(long)]
    exponents: Option<String>,
    #[arg(long)]
    genus: Option<u32>,
    #[arg(long)]
    crosscaps: Option<u32>,
    /// Extra relator tail over auxiliary generators, e.g. "d1 d2^-1"
    #[arg(long)]
    extra_relator: Option<String>,
    /// TOML file describing the presentation and generating systems
    #[arg(long)]
    input: Option<String>,
}

#[derive(Args)]
struct SystemArgs {
    /// Comma separated exponents of the first system (missing index omitted)
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    missing_u: Option<usize>,
    /// Comma separated exponents of the second system
    #[arg(long)]
    v: Option<String>,
    #[arg(long)]
    missing_v: Option<usize>,
}

#[derive(Deserialize, Default)]
struct InputFile {
    group: Option<GroupRecord>,
    gensys: Option<GenSysRecord>,
    gensys_v: Option<GenSysRecord>,
}

#[derive(Deserialize)]
struct GroupRecord {
    exponents: Vec<u32>,
    genus: Option<u32>,
    crosscaps: Option<u32>,
    extra_relator: Option<String>,
}

#[derive(Deserialize)]
struct GenSysRecord {
    missing: usize,
    exponents: Vec<i64>,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> anyhow::Result<Vec<T>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| anyhow::anyhow!("invalid {what} entry {tok:?}"))
        })
        .collect()
}

fn parse_ratios(s: &str) -> anyhow::Result<Vec<(i64, i64)>> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            if let Some((num, den)) = tok.split_once('/') {
                Ok((num.trim().parse()?, den.trim().parse()?))
            } else {
                Ok((tok.parse()?, 1))
            }
        })
        .collect()
}

fn load_input(path: &str) -> anyhow::Result<InputFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read input file {path}: {e}"))?;
    toml::from_str(&text).map_err(|e| anyhow::anyhow!("malformed input file {path}: {e}"))
}

fn resolve_group(args: &GroupArgs, extra_two: u32) -> anyhow::Result<FuchsianPresentation> {
    let record = match &args.input {
        Some(path) => load_input(path)?.group,
        None => None,
    };
    let mut exponents = match (&args.exponents, &record) {
        (Some(s), _) => parse_list::<u32>(s, "exponent")?,
        (None, Some(r)) => r.exponents.clone(),
        (None, None) => anyhow::bail!("no exponents given (use --exponents or --input)"),
    };
    exponents.extend(std::iter::repeat(2).take(extra_two as usize));
    let genus = args
        .genus
        .or(record.as_ref().and_then(|r| r.genus))
        .unwrap_or(0);
    let crosscaps = args
        .crosscaps
        .or(record.as_ref().and_then(|r| r.crosscaps))
        .unwrap_or(0);
    let relator_text = args
        .extra_relator
        .clone()
        .or(record.as_ref().and_then(|r| r.extra_relator.clone()));
    let extra_relator = match relator_text {
        Some(s) => Some(parse_aux_word(&s).map_err(|e| anyhow::anyhow!("{e:?}"))?),
        None => None,
    };
    FuchsianPresentation::new(exponents, genus, crosscaps, extra_relator)
        .map_err(|e| anyhow::anyhow!("invalid presentation: {e:?}"))
}

fn resolve_systems(
    group: &GroupArgs,
    systems: &SystemArgs,
) -> anyhow::Result<(StandardGenSys, StandardGenSys)> {
    let record = match &group.input {
        Some(path) => load_input(path)?,
        None => InputFile::default(),
    };
    let from_flags = |exps: &Option<String>,
                      missing: &Option<usize>,
                      rec: &Option<GenSysRecord>,
                      label: &str|
     -> anyhow::Result<StandardGenSys> {
        match (exps, missing) {
            (Some(e), Some(m)) => Ok(StandardGenSys::new(*m, parse_list(e, "system")?)),
            (None, None) => match rec {
                Some(r) => Ok(StandardGenSys::new(r.missing, r.exponents.clone())),
                None => anyhow::bail!("system {label} not given (flags or input file)"),
            },
            _ => anyhow::bail!("system {label} needs both its exponent list and missing index"),
        }
    };
    let u = from_flags(&systems.u, &systems.missing_u, &record.gensys, "U")?;
    let v = from_flags(&systems.v, &systems.missing_v, &record.gensys_v, "V")?;
    Ok((u, v))
}

fn print_signature(sig: &SignatureType) {
    let exps: Vec<String> = sig.exponents.iter().map(|g| g.to_string()).collect();
    println!("type: ({} | {})", exps.join(", "), sig.n);
}

fn run_classify(group: &GroupArgs, n: u32, as_json: bool) -> anyhow::Result<u8> {
    let pres = resolve_group(group, n)?;
    let sig = signature_type(&pres);
    let condition = is_exceptional(&pres);
    let case = rep_case(&pres);
    if as_json {
        let doc = json!({
            "signature": sig,
            "exceptional": condition.map(|c| c.label()),
            "rep_case": case,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        print_signature(&sig);
        match condition {
            Some(c) => println!("exceptional: yes, condition ({})", c.label()),
            None => println!("exceptional: no"),
        }
        match case.case {
            Some(c) => println!("representation case: {c:?}"),
            None => println!("representation case: none"),
        }
    }
    Ok(if condition.is_some() { EXIT_UNDECIDED } else { EXIT_OK })
}

fn run_rep(group: &GroupArgs, seed: u64, as_json: bool) -> anyhow::Result<u8> {
    let pres = resolve_group(group, 0)?;
    let rep = build_cyclic_faithful(&pres, None, seed)
        .map_err(|e| anyhow::anyhow!("build failed: {e:?}"))?;
    let report = verify_rep(&rep, &pres);
    if as_json {
        let doc = json!({ "representation": rep, "verification": report });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("residual: {:.3e}", rep.residual);
        for g in &report.generators {
            println!(
                "generator {} (order {}): trace error {:.3e}, order error {:.3e}, det error {:.3e}, {}",
                g.index,
                g.gamma,
                g.trace_error,
                g.order_error,
                g.det_error,
                if g.pass { "ok" } else { "FAIL" }
            );
        }
        println!("verified: {}", if report.pass { "yes" } else { "no" });
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_ERROR })
}

fn run_decide(group: &GroupArgs, systems: &SystemArgs, as_json: bool) -> anyhow::Result<u8> {
    let pres = resolve_group(group, 0)?;
    let (u, v) = resolve_systems(group, systems)?;
    let report =
        criterion_decide(&pres, &u, &v).map_err(|e| anyhow::anyhow!("decision failed: {e:?}"))?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_signature(&report.signature);
        for c in &report.checks {
            println!(
                "index {}: u = {}, v = {} (mod {}): {}",
                c.index,
                c.u,
                c.v,
                c.gamma,
                if c.pass { "congruent" } else { "incongruent" }
            );
        }
        match report.verdict {
            Verdict::Equivalent => {
                let cert = report.certificate.as_ref().expect("certificate");
                println!("verdict: equivalent ({} moves)", cert.ops().count());
            }
            Verdict::Inequivalent => println!("verdict: inequivalent"),
            Verdict::ExceptionalUnknown => println!(
                "verdict: unknown (exceptional condition ({}))",
                report.condition.map(|c| c.label()).unwrap_or("?")
            ),
        }
    }
    Ok(match report.verdict {
        Verdict::ExceptionalUnknown => EXIT_UNDECIDED,
        _ => EXIT_OK,
    })
}

fn run_certify(
    group: &GroupArgs,
    systems: &SystemArgs,
    backend: &str,
    tol: f64,
    seed: u64,
    as_json: bool,
) -> anyhow::Result<u8> {
    if tol <= 0.0 {
        anyhow::bail!("tolerance must be positive");
    }
    let pres = resolve_group(group, 0)?;
    match backend {
        "auto" | "approx" => {}
        "exact" => {
            if !exact_backend_applies(&pres) {
                anyhow::bail!(
                    "the exact backend needs every exponent beyond the leading pair to be 2"
                );
            }
        }
        other => anyhow::bail!("unknown backend {other:?} (expected auto, exact or approx)"),
    }
    let (u, v) = resolve_systems(group, systems)?;
    let opts = CertifyOptions { seed, tol };
    let report = certify_inequivalence(&pres, &u, &v, &opts)
        .map_err(|e| anyhow::anyhow!("certification failed: {e:?}"))?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("backend: {}", report.backend);
        if report.reduced {
            println!("reduced to the canonical quotient first");
        }
        for pos in &report.positions {
            let partner = pos
                .partner
                .map(|x| x.to_string())
                .unwrap_or_else(|| "-".into());
            println!(
                "position {} (order {}, partner {}, p = {}): {:?}",
                pos.index,
                pos.gamma,
                partner,
                pos.p.map(|x| x.to_string()).unwrap_or_else(|| "-".into()),
                pos.status
            );
        }
        println!("verdict: {:?}", report.verdict);
    }
    Ok(match report.verdict {
        CertVerdict::AllSkipped => EXIT_UNDECIDED,
        _ => EXIT_OK,
    })
}

fn run_scan(p: u32, q: u64, r: &str, as_json: bool) -> anyhow::Result<u8> {
    let r_set = parse_ratios(r)?;
    let report =
        pi_injectivity_scan(p, q, &r_set).map_err(|e| anyhow::anyhow!("scan failed: {e:?}"))?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!(
            "p = {}, q = {}: {} triples, {} collision classes, {} violations",
            report.p,
            report.q,
            report.triple_count,
            report.classes.len(),
            report.violations.len()
        );
        for v in &report.violations {
            println!(
                "violation: (a={}, b={}, r={}/{}) vs (a={}, b={}, r={}/{})",
                v.first.a, v.first.b, v.first.r.0, v.first.r.1, v.second.a, v.second.b,
                v.second.r.0, v.second.r.1
            );
        }
    }
    Ok(if report.violations.is_empty() { EXIT_OK } else { EXIT_ERROR })
}

fn run_selftest(seed: u64) -> anyhow::Result<u8> {
    let mut ok = true;
    let mut check = |label: &str, pass: bool| {
        println!("{label}: {}", if pass { "pass" } else { "fail" });
        ok &= pass;
    };

    let scan = pi_injectivity_scan(5, 5, &[(1, 1), (2, 1)])?;
    check("invariant scan p=5 q=5", scan.violations.is_empty());

    let pres = FuchsianPresentation::plain(vec![5, 5, 5, 5, 5])
        .map_err(|e| anyhow::anyhow!("{e:?}"))?;
    let rep = build_cyclic_faithful(&pres, None, seed)
        .map_err(|e| anyhow::anyhow!("build failed: {e:?}"))?;
    check("representation build", verify_rep(&rep, &pres).pass);

    // decide and certify must agree on a deterministic sweep of systems
    let units = [1i64, 2, 3, 4];
    let mut agreement = true;
    let mut cert_check = true;
    let opts = CertifyOptions { seed, tol: 1e-8 };
    for a in units {
        for b in units {
            let u = StandardGenSys::new(5, vec![1, a, 1, 1]);
            let v = StandardGenSys::new(5, vec![1, 1, b, 1]);
            let decision = criterion_decide(&pres, &u, &v)?;
            let certified = certify_inequivalence(&pres, &u, &v, &opts)
                .map_err(|e| anyhow::anyhow!("{e:?}"))?;
            let consistent = match (decision.verdict, certified.verdict) {
                (Verdict::Equivalent, CertVerdict::Consistent) => true,
                (Verdict::Inequivalent, CertVerdict::Inequivalent) => true,
                (_, CertVerdict::AllSkipped) => true,
                _ => false,
            };
            agreement &= consistent;
            if let Some(cert) = &decision.certificate {
                let numeric = verify_certificate(&pres, cert, &v, seed)
                    .map_err(|e| anyhow::anyhow!("{e:?}"))?;
                cert_check &= numeric.pass;
            }
        }
    }
    check("decide/certify agreement sweep", agreement);
    check("certificate numeric replay", cert_check);

    Ok(if ok { EXIT_OK } else { EXIT_ERROR })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Classify { group, n, json } => run_classify(group, *n, *json),
        Command::Rep { group, seed, json } => run_rep(group, *seed, *json),
        Command::Decide { group, systems, json } => run_decide(group, systems, *json),
        Command::Certify {
            group,
            systems,
            backend,
            tol,
            seed,
            json,
        } => run_certify(group, systems, backend, *tol, *seed, *json),
        Command::ScanPi { p, q, r, json } => run_scan(*p, *q, r, *json),
        Command::Selftest { seed } => run_selftest(*seed),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
