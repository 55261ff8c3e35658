// SPDX-License-Identifier: Apache-2.0

//! Command-line front end. [`run`] returns the process exit code so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 an audit or check failed, 2 bad input or a size guard tripped.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::assignment::Assignment;
use crate::choice::{
    check_over_and_above_principle, check_quota_filling, check_within_category_fairness,
    over_and_above_choose,
};
use crate::critique::repro_report;
use crate::da::{run_da_oa, AssignmentAudit, RoundLog};
use crate::format::{
    parse_assignment, parse_instance, parse_pool, to_canonical_json, AssignmentFile,
    InstitutionRoundEntry, RoundEntry,
};
use crate::model::{validate_instance, IndividualId, Market};
use crate::oracle::{generate_instance, run_suite, Check, GeneratorParams, Guards, Outcome};
use crate::report::{describe_axiom_violation, AssignmentAuditDoc, ChoiceDoc, FormalAuditDoc, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "reserve-match", version, about = "Seat allocation under vertical reservations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply the over-and-above choice rule at one institution and audit the result.
    Choose {
        instance: PathBuf,
        institution: String,
        /// JSON array of applicant ids. Defaults to every individual.
        #[arg(long, conflicts_with = "all")]
        pool: Option<PathBuf>,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run deferred acceptance with over-and-above choice (DA-OA).
    Match {
        instance: PathBuf,
        /// Include the round-by-round log.
        #[arg(long)]
        logs: bool,
        #[arg(long)]
        json: bool,
    },
    /// Check an assignment for rationality, fairness, waste, over-and-above and stability.
    Audit {
        instance: PathBuf,
        assignment: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive checks on one instance or a seeded random corpus.
    Oracle {
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        instance: Option<PathBuf>,
        /// Generate COUNT instances from seeds SEED, SEED+1, ...
        #[arg(long, num_args = 2, value_names = ["SEED", "COUNT"])]
        random: Option<Vec<u64>>,
        #[arg(long, value_enum, default_value_t = CheckArg::All)]
        check: CheckArg,
        /// Check the planted broken rules instead; succeeds when every check finds a witness.
        #[arg(long)]
        self_test: bool,
        #[arg(long, value_enum, default_value_t = Preset::Small)]
        preset: Preset,
        #[arg(long)]
        json: bool,
    },
    /// Replay the three worked examples under the literal and formal axioms.
    Repro {
        #[arg(long)]
        json: bool,
    },
    /// Print a seeded random instance.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Preset::Indian)]
        preset: Preset,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CheckArg {
    Theorem1,
    Subst,
    Sizemono,
    Manip,
    All,
}

impl CheckArg {
    fn checks(self) -> Vec<Check> {
        match self {
            CheckArg::Theorem1 => vec![Check::Uniqueness],
            CheckArg::Subst => vec![Check::Substitutability],
            CheckArg::Sizemono => vec![Check::SizeMonotonicity],
            CheckArg::Manip => vec![Check::Manipulation],
            CheckArg::All => Check::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    Small,
    Indian,
}

impl Preset {
    fn params(self) -> GeneratorParams {
        match self {
            Preset::Small => GeneratorParams::small(),
            Preset::Indian => GeneratorParams::indian(),
        }
    }
}

/// An input problem, already formatted for stderr.
struct InputError(String);

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))
}

fn load_market(path: &Path) -> Result<Market, InputError> {
    let raw = parse_instance(&read(path)?)
        .map_err(|e| InputError(format!("{}: malformed instance: {e}", path.display())))?;
    validate_instance(&raw).map_err(|e| InputError(format!("{}: invalid instance:\n{e}", path.display())))
}

fn json_line<T: Serialize>(value: &T) -> String {
    to_canonical_json(value)
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_INPUT
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Choose {
            instance,
            institution,
            pool,
            all: _,
            json,
        } => choose(&instance, &institution, pool.as_deref(), json),
        Command::Match { instance, logs, json } => match_cmd(&instance, logs, json),
        Command::Audit {
            instance,
            assignment,
            json,
        } => audit(&instance, &assignment, json),
        Command::Oracle {
            instance,
            random,
            check,
            self_test,
            preset,
            json,
        } => oracle(instance.as_deref(), random.as_deref(), check, self_test, preset, json),
        Command::Repro { json } => Ok(repro(json)),
        Command::Generate { seed, preset } => generate_instance(seed, &preset.params())
            .map(|m| (to_canonical_json(&m.to_file()), EXIT_OK))
            .map_err(|e| InputError(e.to_string())),
    };
    match result {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

type Output = Result<(String, i32), InputError>;

#[derive(Serialize)]
struct ChooseDoc {
    choice: ChoiceDoc,
    axioms: FormalAuditDoc,
}

fn choose(instance: &Path, institution: &str, pool: Option<&Path>, json: bool) -> Output {
    let market = load_market(instance)?;
    let s = market
        .institution_by_name(institution)
        .ok_or_else(|| InputError(format!("unknown institution `{institution}`")))?;
    let pool: Vec<IndividualId> = match pool {
        None => market.individual_ids().collect(),
        Some(path) => {
            let names = parse_pool(&read(path)?)
                .map_err(|e| InputError(format!("{}: malformed pool: {e}", path.display())))?;
            names
                .iter()
                .map(|n| {
                    market
                        .individual_by_name(n)
                        .ok_or_else(|| InputError(format!("pool refers to unknown individual `{n}`")))
                })
                .collect::<Result<_, _>>()?
        }
    };
    let inst = market.institution(s);
    let t = market.memberships();
    let result = over_and_above_choose(inst, &pool, &t);
    let v = |r| Verdict::from_result(&r, |e| describe_axiom_violation(&market, e));
    let doc = ChooseDoc {
        choice: ChoiceDoc::new(&market, s, &pool, &result),
        axioms: FormalAuditDoc {
            over_and_above: v(check_over_and_above_principle(inst, &pool, &result)),
            within_category_fairness: v(check_within_category_fairness(inst, &pool, &t, &result)),
            quota_filling: v(check_quota_filling(inst, &pool, &t, &result)),
        },
    };
    let code = if doc.axioms.passed() { EXIT_OK } else { EXIT_FAILED };
    if json {
        return Ok((json_line(&doc), code));
    }
    let mut text = String::new();
    let _ = writeln!(text, "institution {}, pool {{{}}}", doc.choice.institution, doc.choice.pool.join(", "));
    for c in &doc.choice.categories {
        let _ = writeln!(text, "  {}: {}", c.category, list(&c.chosen));
    }
    let _ = writeln!(text, "  rejected: {}", list(&doc.choice.rejected));
    let _ = writeln!(text, "over-and-above principle: {}", doc.axioms.over_and_above.label());
    let _ = writeln!(text, "within-category fairness: {}", doc.axioms.within_category_fairness.label());
    let _ = writeln!(text, "quota filling: {}", doc.axioms.quota_filling.label());
    Ok((text, code))
}

fn list(names: &[String]) -> String {
    if names.is_empty() {
        "-".to_string()
    } else {
        names.join(", ")
    }
}

fn round_entries(market: &Market, rounds: &[RoundLog]) -> Vec<RoundEntry> {
    rounds
        .iter()
        .map(|r| RoundEntry {
            round: r.round,
            institutions: r
                .institutions
                .iter()
                .map(|x| InstitutionRoundEntry {
                    institution: market.institution_name(x.institution).to_string(),
                    pool: market.names(&x.pool),
                    held: market.names(&x.held),
                    rejected: market.names(&x.rejected),
                })
                .collect(),
        })
        .collect()
}

fn match_cmd(instance: &Path, logs: bool, json: bool) -> Output {
    let market = load_market(instance)?;
    let outcome = run_da_oa(&market);
    let file = AssignmentFile {
        assignment: outcome.assignment.to_records(&market),
        rounds: logs.then(|| round_entries(&market, &outcome.rounds)),
    };
    if json {
        return Ok((json_line(&file), EXIT_OK));
    }
    let mut text = String::new();
    if let Some(rounds) = &file.rounds {
        for r in rounds {
            let _ = writeln!(text, "round {}", r.round);
            for x in &r.institutions {
                let _ = writeln!(
                    text,
                    "  {}: pool {{{}}} held {{{}}} rejected {{{}}}",
                    x.institution,
                    x.pool.join(", "),
                    x.held.join(", "),
                    x.rejected.join(", ")
                );
            }
        }
    }
    for i in market.individual_ids() {
        let seat = match outcome.assignment.seat(i) {
            Some(seat) => format!(
                "{} ({})",
                market.institution_name(seat.institution),
                market.category_name(seat.category)
            ),
            None => "unassigned".to_string(),
        };
        let _ = writeln!(text, "{} -> {seat}", market.individual_name(i));
    }
    Ok((text, EXIT_OK))
}

fn audit(instance: &Path, assignment: &Path, json: bool) -> Output {
    let market = load_market(instance)?;
    let file = parse_assignment(&read(assignment)?)
        .map_err(|e| InputError(format!("{}: malformed assignment: {e}", assignment.display())))?;
    let a = Assignment::from_file(&market, &file)
        .map_err(|e| InputError(format!("{}: invalid assignment: {e}", assignment.display())))?;
    let doc = AssignmentAuditDoc::new(&market, &AssignmentAudit::run(&market, &a));
    let code = if doc.passed() { EXIT_OK } else { EXIT_FAILED };
    if json {
        return Ok((json_line(&doc), code));
    }
    let mut text = String::new();
    for (name, verdict) in doc.rows() {
        let _ = writeln!(text, "{name}: {}", verdict.label());
    }
    Ok((text, code))
}

fn oracle(
    instance: Option<&Path>,
    random: Option<&[u64]>,
    check: CheckArg,
    self_test: bool,
    preset: Preset,
    json: bool,
) -> Output {
    let corpus: Vec<(String, Market)> = match (instance, random) {
        (Some(path), _) => vec![(path.display().to_string(), load_market(path)?)],
        (None, Some(&[seed, count])) => {
            let params = preset.params();
            (0..count)
                .map(|k| {
                    let s = seed.wrapping_add(k);
                    generate_instance(s, &params)
                        .map(|m| (format!("seed {s}"), m))
                        .map_err(|e| InputError(e.to_string()))
                })
                .collect::<Result<_, _>>()?
        }
        _ => return Err(InputError("give an instance file or --random SEED COUNT".into())),
    };
    let report = run_suite(&corpus, &check.checks(), self_test, &Guards::from_env());
    let code = if report.has_errors() {
        EXIT_INPUT
    } else if report.succeeded() {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    if json {
        return Ok((json_line(&report), code));
    }
    let mut text = String::new();
    for row in &report.summary {
        let _ = writeln!(
            text,
            "{} [{}]: {} instances, {} pass, {} witness, {} error",
            row.check.label(),
            row.subject,
            row.instances,
            row.passed,
            row.witnesses,
            row.errors
        );
    }
    for inst in &report.instances {
        for c in &inst.checks {
            match &c.outcome {
                Outcome::Pass => {}
                Outcome::Witness { detail } => {
                    let _ = writeln!(text, "{}: {} witness: {detail}", inst.instance, c.check.label());
                }
                Outcome::Error { detail } => {
                    let _ = writeln!(text, "{}: {} error: {detail}", inst.instance, c.check.label());
                }
            }
        }
    }
    Ok((text, code))
}

fn repro(json: bool) -> (String, i32) {
    let report = repro_report();
    let code = if report.all_hold() { EXIT_OK } else { EXIT_FAILED };
    if json {
        return (json_line(&report), code);
    }
    let mut text = String::new();
    for ex in &report.examples {
        let _ = writeln!(text, "{}", ex.name);
        let mut show = |label: &str, a: &crate::critique::AuditedChoice| {
            let cats: Vec<String> = a
                .choice
                .categories
                .iter()
                .map(|c| format!("{} {{{}}}", c.category, c.chosen.join(", ")))
                .collect();
            let _ = writeln!(
                text,
                "  {label}: {} rejected {{{}}}",
                cats.join(" "),
                a.choice.rejected.join(", ")
            );
            let failing = a.literal.failing();
            let _ = writeln!(
                text,
                "    literal axioms: {}",
                if failing.is_empty() { "all pass".to_string() } else { format!("fails {}", failing.join(", ")) }
            );
            let _ = writeln!(
                text,
                "    formal axioms: {}",
                if a.formal.passed() { "all pass" } else { "fail" }
            );
        };
        show("over-and-above", &ex.over_and_above);
        if let Some(alt) = &ex.altered {
            show("altered rule", alt);
        }
        let _ = writeln!(
            text,
            "  selections passing literal axioms: {}, formal axioms: {}",
            ex.literal_compliant_selections, ex.formal_compliant_selections
        );
    }
    for a in &report.assertions {
        let _ = writeln!(text, "[{}] {}", if a.holds { "holds" } else { "FAILS" }, a.claim);
    }
    (text, code)
}
