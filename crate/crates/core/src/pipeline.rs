//! Analysis pipeline: admissibility, dependency pairs and their side
//! condition, reduction-pair certificate, optional disproof.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dp::{extract_dps, level, DepPair};
use crate::error::Result;
use crate::order::{check_constraints, search_precedence, Certificate, Precedence, SearchLimits, Status};
use crate::pcc::is_admissible;
use crate::report::{
    AnalysisReport, CertificateReport, DpReport, RuleReport, StarReport, StepReport, Timing,
    VarReport, WitnessReport,
};
use crate::rewrite::{bounded_explore, Engine, ExplorationVerdict, ExploreLimits, InternalMode, Relation};
use crate::seeds::seed_terms;
use crate::system::RewriteSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Admissibility,
    StarCondition,
    ReductionPair,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::Admissibility => "admissibility",
            Stage::StarCondition => "star-condition",
            Stage::ReductionPair => "reduction-pair",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
    #[serde(rename = "MAYBE")]
    Maybe,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "YES",
            Verdict::No => "NO",
            Verdict::Maybe => "MAYBE",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    /// Fixed precedence; only statuses are searched.
    pub precedence: Option<Precedence>,
    pub max_symbols: usize,
    pub ge_bound: usize,
    pub disprove: bool,
    pub explore: ExploreLimits,
    pub internal: InternalMode,
    /// Number of seed terms used by the disproof.
    pub seeds: usize,
    /// Forces the given stage to fail, for testing the verdict wiring.
    pub inject_failure: Option<Stage>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            precedence: None,
            max_symbols: 8,
            ge_bound: crate::order::DEFAULT_GE_BOUND,
            disprove: false,
            explore: ExploreLimits::default(),
            internal: InternalMode::All,
            seeds: 50,
            inject_failure: None,
        }
    }
}

/// Tries every status assignment of the defined symbols with a fixed
/// precedence, all `mul` first.
fn certificate_for(
    system: &RewriteSystem,
    dps: &[DepPair],
    prec: &Precedence,
    ge_bound: usize,
) -> Option<Certificate> {
    let defined: Vec<&String> = system.signature.defined().iter().collect();
    let masks = 1usize << defined.len().min(16);
    for mask in 0..masks {
        let mut p = prec.clone();
        for (i, d) in defined.iter().enumerate() {
            let s = if mask >> i & 1 == 1 { Status::Lex } else { Status::Mul };
            if s == Status::Lex {
                p.set_status(d, s);
            }
        }
        if let Ok(c) = check_constraints(&system.rules, dps, &p, ge_bound) {
            return Some(c);
        }
    }
    None
}

pub fn run_pipeline(system: &RewriteSystem, options: &Options) -> Result<AnalysisReport> {
    let started = Instant::now();
    let sig = &system.signature;
    let mut notes = Vec::new();
    let mut failures = Vec::new();

    let mut rules = Vec::new();
    let mut all_admissible = true;
    for (i, rule) in system.rules.iter().enumerate() {
        let adm = is_admissible(rule, sig)?;
        all_admissible &= adm.admissible;
        for v in adm.underivable() {
            failures.push(format!("rule[{i}]: variable {v} is not in the pattern computability closure"));
        }
        rules.push(RuleReport {
            index: i,
            rule: rule.to_string(),
            level: level(&rule.rhs, sig),
            admissible: adm.admissible,
            variables: adm
                .witnesses
                .iter()
                .map(|w| VarReport {
                    name: w.var.name.to_string(),
                    ty: w.var.ty.to_string(),
                    trace: w.derivation.as_ref().map(|d| d.trace()),
                    derivation: w.derivation.as_ref().map(|d| d.to_report()),
                })
                .collect(),
        });
    }

    let dps = extract_dps(system)?;
    let mut all_star = true;
    let dp_reports: Vec<DpReport> = dps
        .iter()
        .enumerate()
        .map(|(i, d)| {
            if !d.star.passed() {
                all_star = false;
                failures.push(format!(
                    "dp[{i}] (rule[{}] at {}): {}",
                    d.rule,
                    d.position,
                    d.star.describe()
                ));
            }
            DpReport {
                index: i,
                rule: d.rule,
                position: d.position.clone(),
                lhs: d.lhs.to_string(),
                rhs: d.rhs.to_string(),
                star: StarReport {
                    passed: d.star.passed(),
                    detail: d.star.describe(),
                    free_bound: d.star.free_bound.iter().map(|v| v.name.to_string()).collect(),
                    type_mismatch: d
                        .star
                        .type_mismatch
                        .as_ref()
                        .map(|(g, w)| (g.to_string(), w.to_string())),
                },
            }
        })
        .collect();

    let cert = match &options.precedence {
        Some(p) => certificate_for(system, &dps, p, options.ge_bound),
        None => {
            let mut required = Precedence::new();
            for (a, b) in &system.precedence_hints {
                required.add(a, b)?;
            }
            search_precedence(
                &system.rules,
                &dps,
                sig.defined(),
                &required,
                SearchLimits {
                    max_symbols: options.max_symbols,
                    ge_bound: options.ge_bound,
                },
            )?
        }
    };
    if cert.is_none() {
        let prec = options.precedence.clone().unwrap_or_default();
        if let Err(violated) = check_constraints(&system.rules, &dps, &prec, options.ge_bound) {
            let prefix = if options.precedence.is_some() {
                "not oriented by the given precedence"
            } else {
                "no precedence found; e.g. with the empty precedence"
            };
            for c in violated {
                failures.push(format!("{prefix}: {c}"));
            }
        } else {
            failures.push("no certificate found".to_string());
        }
    }

    let inject = options.inject_failure;
    let adm_ok = all_admissible && inject != Some(Stage::Admissibility);
    let star_ok = all_star && inject != Some(Stage::StarCondition);
    let pair_ok = cert.is_some() && inject != Some(Stage::ReductionPair);
    if let Some(s) = inject {
        failures.push(format!("{s}: failure injected"));
    }

    let failed_stages: Vec<Stage> = [
        (!adm_ok, Stage::Admissibility),
        (!star_ok, Stage::StarCondition),
        (!pair_ok, Stage::ReductionPair),
    ]
    .into_iter()
    .filter_map(|(failed, s)| failed.then_some(s))
    .collect();
    let (mut verdict, stage) = if !adm_ok {
        (Verdict::Maybe, Some(Stage::Admissibility))
    } else if !star_ok {
        (Verdict::Maybe, Some(Stage::StarCondition))
    } else if !pair_ok {
        (Verdict::Maybe, Some(Stage::ReductionPair))
    } else {
        (Verdict::Yes, None)
    };

    if system.rules.is_empty() {
        notes.push("beta-only: no rules, only β-reduction on simply typed terms".to_string());
    }
    if !dps.is_empty() {
        notes.push("dependency pairs keep the original symbols (no marked tuple symbols)".to_string());
    }

    let mut witness = None;
    if options.disprove && verdict != Verdict::Yes {
        let engine = Engine {
            rules: &system.rules,
            dps: &dps,
            mode: options.internal,
        };
        let mut exceeded = false;
        for seed in seed_terms(system, options.seeds) {
            match bounded_explore(&seed, &engine, Relation::BetaRewrite, options.explore)? {
                ExplorationVerdict::CycleFound { witness: w } => {
                    verdict = Verdict::No;
                    witness = Some(w.iter().map(StepReport::from_step).collect());
                    notes.push(format!("cycle found from seed {seed}"));
                    let chain = bounded_explore(&seed, &engine, Relation::BetaChain, options.explore)?;
                    if let ExplorationVerdict::CycleFound { witness: c } = chain {
                        notes.push(format!("chain relation: cycle of length {} from the same seed", c.len()));
                    }
                    break;
                }
                ExplorationVerdict::BoundExceeded { .. } => exceeded = true,
                ExplorationVerdict::AllTerminated { .. } => {}
            }
        }
        if verdict != Verdict::No {
            notes.push(if exceeded {
                "disprove: no cycle found; some reductions exceeded the depth bound".to_string()
            } else {
                "disprove: no cycle found from the seed terms".to_string()
            });
        }
    }

    let certificate = cert.map(|c| CertificateReport {
        edges: c.precedence.edges().iter().map(|(a, b)| format!("{a}>{b}")).collect(),
        statuses: sig
            .defined()
            .iter()
            .map(|d| (d.clone(), c.precedence.status(d)))
            .collect(),
        witnesses: c
            .rule_witnesses
            .iter()
            .enumerate()
            .map(|(i, p)| WitnessReport {
                constraint: format!("rule[{i}]: {} >= {}", p.lhs, p.rhs),
                proof: p.to_report(),
            })
            .chain(c.dp_witnesses.iter().enumerate().map(|(i, p)| WitnessReport {
                constraint: format!("dp[{i}]: {} > {}", p.lhs, p.rhs),
                proof: p.to_report(),
            }))
            .collect(),
    });

    Ok(AnalysisReport {
        verdict,
        stage: if verdict == Verdict::No { None } else { stage },
        failed_stages,
        notes,
        signature: sig.summary(),
        rules,
        dps: dp_reports,
        certificate,
        failures: dedup(failures),
        witness,
        timing: Timing {
            millis: started.elapsed().as_millis() as u64,
        },
    })
}

fn dedup(v: Vec<String>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    v.into_iter().filter(|s| seen.insert(s.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_system;

    #[test]
    fn stage_and_verdict_names() {
        assert_eq!(Stage::StarCondition.to_string(), "star-condition");
        assert_eq!(serde_json::to_string(&Stage::ReductionPair).unwrap(), "\"reduction-pair\"");
        assert_eq!(serde_json::to_string(&Verdict::Maybe).unwrap(), "\"MAYBE\"");
        assert_eq!(Verdict::No.to_string(), "NO");
    }

    #[test]
    fn first_order_plus() {
        let sys = parse_system(
            "sort N\n0 : N\ns : N -> N\nplus : N -> N -> N\n\
             rule plus 0 Y -> Y\nrule plus (s X) Y -> s (plus X Y)\n",
        )
        .unwrap();
        let r = run_pipeline(&sys, &Options::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Yes);
        assert_eq!(r.stage, None);
        assert!(r.failed_stages.is_empty());
        assert_eq!(r.dps.len(), 1);
    }

    #[test]
    fn self_loop_without_rules_on_the_rhs() {
        let sys = parse_system("sort N\na : N\nrule a -> a\n").unwrap();
        let r = run_pipeline(&sys, &Options::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Maybe);
        assert_eq!(r.stage, Some(Stage::ReductionPair));
    }
}
