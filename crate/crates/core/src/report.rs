//! Analysis report and its text and JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::order::{ProofReport, Status};
use crate::pcc::DerivationReport;
use crate::pipeline::{Stage, Verdict};
use crate::rewrite::Step;
use crate::signature::SignatureSummary;
use crate::types::Position;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub verdict: Verdict,
    /// First failing stage of a MAYBE answer.
    pub stage: Option<Stage>,
    /// Every stage whose check failed, in pipeline order.
    pub failed_stages: Vec<Stage>,
    pub notes: Vec<String>,
    pub signature: SignatureSummary,
    pub rules: Vec<RuleReport>,
    pub dps: Vec<DpReport>,
    pub certificate: Option<CertificateReport>,
    pub failures: Vec<String>,
    pub witness: Option<Vec<StepReport>>,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleReport {
    pub index: usize,
    pub rule: String,
    pub level: usize,
    pub admissible: bool,
    pub variables: Vec<VarReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarReport {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
    /// Compact derivation, e.g. `arg 2; acc cons.1`; absent when the
    /// variable is not in the closure.
    pub trace: Option<String>,
    pub derivation: Option<DerivationReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DpReport {
    pub index: usize,
    pub rule: usize,
    pub position: Position,
    pub lhs: String,
    pub rhs: String,
    pub star: StarReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarReport {
    pub passed: bool,
    pub detail: String,
    pub free_bound: Vec<String>,
    pub type_mismatch: Option<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub edges: Vec<String>,
    pub statuses: BTreeMap<String, Status>,
    pub witnesses: Vec<WitnessReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub constraint: String,
    pub proof: ProofReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub kind: String,
    pub position: Position,
    pub from: String,
    pub to: String,
}

impl StepReport {
    pub fn from_step(s: &Step) -> StepReport {
        StepReport {
            kind: s.kind.to_string(),
            position: s.position.clone(),
            from: s.from.to_string(),
            to: s.to.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub millis: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text { trace: bool },
    Json,
}

pub fn render_report(report: &AnalysisReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text { trace } => render_text(report, trace),
    }
}

fn render_proof(p: &ProofReport, indent: usize, out: &mut String) {
    let _ = writeln!(
        out,
        "{:indent$}{} {} {}  [{}]",
        "",
        p.lhs,
        if p.clause == "alpha-eq" { "=" } else { ">" },
        p.rhs,
        p.clause,
        indent = indent
    );
    for q in &p.premises {
        render_proof(q, indent + 2, out);
    }
}

fn render_derivation(d: &DerivationReport, indent: usize, out: &mut String) {
    let _ = writeln!(
        out,
        "{:indent$}{}  [{} {}]",
        "",
        d.conclusion,
        d.rule,
        d.side,
        indent = indent
    );
    for q in &d.premises {
        render_derivation(q, indent + 2, out);
    }
}

fn render_text(r: &AnalysisReport, trace: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", r.verdict);
    if let Some(stage) = r.stage {
        let _ = writeln!(out, "failed stage: {stage}");
    }
    if r.failed_stages.len() > 1 {
        let all: Vec<String> = r.failed_stages.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "all failed stages: {}", all.join(", "));
    }
    let _ = writeln!(out, "defined: {}", r.signature.defined.join(" "));
    let _ = writeln!(out, "constructors: {}", r.signature.constructors.join(" "));

    let _ = writeln!(out, "\nrules:");
    for rule in &r.rules {
        let _ = writeln!(
            out,
            "  [{}] {}  ({}, level {})",
            rule.index,
            rule.rule,
            if rule.admissible { "admissible" } else { "not admissible" },
            rule.level
        );
        for v in &rule.variables {
            match &v.trace {
                Some(t) => {
                    let _ = writeln!(out, "      {} : {}  {}", v.name, v.ty, t);
                }
                None => {
                    let _ = writeln!(out, "      {} : {}  UNDERIVABLE", v.name, v.ty);
                }
            }
            if trace {
                if let Some(d) = &v.derivation {
                    render_derivation(d, 8, &mut out);
                }
            }
        }
    }

    let _ = writeln!(out, "\ndependency pairs:");
    if r.dps.is_empty() {
        let _ = writeln!(out, "  (none)");
    }
    for d in &r.dps {
        let _ = writeln!(
            out,
            "  [{}] {} -> {}  (rule[{}] at {})  {}",
            d.index, d.lhs, d.rhs, d.rule, d.position, d.star.detail
        );
    }

    if let Some(c) = &r.certificate {
        let _ = writeln!(out, "\ncertificate:");
        let edges = if c.edges.is_empty() {
            "(empty)".to_string()
        } else {
            c.edges.join(",")
        };
        let _ = writeln!(out, "  precedence: {edges}");
        let st: Vec<String> = c.statuses.iter().map(|(f, s)| format!("{f}={s}")).collect();
        if !st.is_empty() {
            let _ = writeln!(out, "  status: {}", st.join(" "));
        }
        for w in &c.witnesses {
            let _ = writeln!(out, "  {}  [{}]", w.constraint, w.proof.clause);
            if trace {
                for p in &w.proof.premises {
                    render_proof(p, 6, &mut out);
                }
            }
        }
    }

    if !r.failures.is_empty() {
        let _ = writeln!(out, "\nfailures:");
        for f in &r.failures {
            let _ = writeln!(out, "  {f}");
        }
    }

    if let Some(w) = &r.witness {
        let _ = writeln!(out, "\nnontermination witness:");
        for s in w {
            let _ = writeln!(out, "  {}@{}: {} => {}", s.kind, s.position, s.from, s.to);
        }
    }

    if !r.notes.is_empty() {
        let _ = writeln!(out, "\nnotes:");
        for n in &r.notes {
            let _ = writeln!(out, "  {n}");
        }
    }
    let _ = writeln!(out, "\ntime: {} ms", r.timing.millis);
    out
}
