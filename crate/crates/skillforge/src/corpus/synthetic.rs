//! Synthetic scenario-shaped corpus generator.
//!
//! Generates a deterministic ticket corpus for offline runs and tests. Each
//! ticket exercises one diagnostic rule; rules are split into a set the
//! initial skill will cover and per-round "missing" groups that surface as
//! bad cases in successive evolution rounds. Token markers in the dialogue
//! (`ISSUE[CASE-007]`, `DETAILS[CASE-007]`, `RULE-007:`) let scripted
//! providers react to corpus content without real model calls.

use serde::{Deserialize, Serialize};

use super::{OperationLogEntry, Ticket, Turn, TurnRole};
use crate::search::Article;
use crate::skill::{ToolParam, ToolSchema};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub scenario: String,
    pub n_tickets: usize,
    pub n_rules: usize,
    /// Rules the initial skill will know (cited in tickets); the rest are
    /// distributed across evolution rounds.
    pub known_rules: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            scenario: "storage".into(),
            n_tickets: 200,
            n_rules: 40,
            known_rules: 24,
            seed: 17,
        }
    }
}

pub const CASE_TYPES: [&str; 4] = ["access", "billing", "configuration", "performance"];

const REMEDIES: [&str; 8] = [
    "reset the replication flag and retry the upload",
    "rotate the access credential and re-sign the request",
    "raise the part-size limit in the client configuration",
    "clear the stale cache entry before the next sync",
    "re-bind the custom domain and refresh the certificate",
    "switch the endpoint to the internal address",
    "enable transfer acceleration for the affected region",
    "re-apply the lifecycle policy after the version cleanup",
];

fn symptom(case_type: &str) -> &'static str {
    match case_type {
        "access" => "requests come back with 403 errors",
        "billing" => "charges appeared that we did not expect",
        "configuration" => "the origin rule rejects our settings",
        _ => "uploads crawl below the expected throughput",
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleSpec {
    pub id: usize,
    /// Knowledge marker, e.g. `RULE-007`.
    pub rule_token: String,
    /// Case marker, e.g. `CASE-007`.
    pub case_token: String,
    pub case_type: String,
    pub remedy: String,
    pub known: bool,
    /// Evolution round (1-3) whose optimization adds this rule; `None` for
    /// known rules.
    pub round: Option<u8>,
}

impl RuleSpec {
    /// The knowledge line the skill must carry to resolve this rule's cases.
    pub fn knowledge_line(&self) -> String {
        format!(
            "{}: when {} arises, {}.",
            self.rule_token, self.case_token, self.remedy
        )
    }

    pub fn reference_resolution(&self) -> String {
        format!("Apply {}: {}.", self.rule_token, self.remedy)
    }

    pub fn reference_clarification(&self) -> String {
        format!(
            "Please confirm the resource identifier and region involved for {}.",
            self.case_token
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticMeta {
    pub scenario: String,
    pub n_tickets: usize,
    pub seed: u64,
    pub rules: Vec<RuleSpec>,
    /// Ticket index -> rule id, in generation (chronological) order.
    pub ticket_rules: Vec<usize>,
}

impl SyntheticMeta {
    pub fn rule(&self, id: usize) -> &RuleSpec {
        &self.rules[id]
    }

    pub fn known_rule_ids(&self) -> Vec<usize> {
        self.rules.iter().filter(|r| r.known).map(|r| r.id).collect()
    }

    pub fn round_rule_ids(&self, round: u8) -> Vec<usize> {
        self.rules.iter().filter(|r| r.round == Some(round)).map(|r| r.id).collect()
    }
}

/// Quarter boundaries matching [`super::split`]: balanced sizes with the
/// remainder on the earliest quarters.
fn quarter_sizes(n: usize) -> [usize; 4] {
    let base = n / 4;
    let remainder = n % 4;
    let mut sizes = [base; 4];
    for item in sizes.iter_mut().take(remainder) {
        *item += 1;
    }
    sizes
}

pub fn generate_corpus(config: &SyntheticConfig) -> (Vec<Ticket>, SyntheticMeta) {
    assert!(config.n_rules >= 4, "need at least one rule per case type");
    assert!(config.known_rules < config.n_rules, "some rules must be missing");
    assert!(config.n_tickets >= config.n_rules, "every rule needs a ticket");

    let mut rules = Vec::with_capacity(config.n_rules);
    let missing_total = config.n_rules - config.known_rules;
    for id in 0..config.n_rules {
        let known = id < config.known_rules;
        let round = if known {
            None
        } else {
            // Spread missing rules over the three evolution rounds.
            Some(((id - config.known_rules) * 3 / missing_total) as u8 + 1)
        };
        rules.push(RuleSpec {
            id,
            rule_token: format!("RULE-{id:03}"),
            case_token: format!("CASE-{id:03}"),
            case_type: CASE_TYPES[id % CASE_TYPES.len()].to_string(),
            remedy: format!("{} (procedure {id:03})", REMEDIES[id % REMEDIES.len()]),
            known,
            round,
        });
    }

    let known_ids: Vec<usize> = (0..config.known_rules).collect();
    let sizes = quarter_sizes(config.n_tickets);
    let offset = (config.seed as usize) % config.n_rules;

    let mut tickets = Vec::with_capacity(config.n_tickets);
    let mut ticket_rules = Vec::with_capacity(config.n_tickets);
    let mut idx = 0usize;
    for (quarter, &size) in sizes.iter().enumerate() {
        let pool: Vec<usize> = match quarter {
            0 | 1 | 2 => {
                let mut p = known_ids.clone();
                p.extend(
                    rules
                        .iter()
                        .filter(|r| r.round == Some(quarter as u8 + 1))
                        .map(|r| r.id),
                );
                p
            }
            _ => (0..config.n_rules).collect(),
        };
        for i in 0..size {
            let rule = &rules[pool[(i + offset) % pool.len()]];
            tickets.push(make_ticket(config, idx, rule));
            ticket_rules.push(rule.id);
            idx += 1;
        }
    }

    let meta = SyntheticMeta {
        scenario: config.scenario.clone(),
        n_tickets: config.n_tickets,
        seed: config.seed,
        rules,
        ticket_rules,
    };
    (tickets, meta)
}

fn make_ticket(config: &SyntheticConfig, idx: usize, rule: &RuleSpec) -> Ticket {
    let id = format!("synth-{idx:04}");
    let created_at = 1_000 + idx as u64 * 10;
    let turn = |role, text: String, k: u64| Turn { role, text, timestamp: created_at + k };
    let turns = vec![
        turn(
            TurnRole::Customer,
            format!(
                "ISSUE[{case}] (ref {id}) On our {scenario} service, {symptom}. What should we do?",
                case = rule.case_token,
                scenario = config.scenario,
                symptom = symptom(&rule.case_type),
            ),
            1,
        ),
        turn(TurnRole::Agent, rule.reference_clarification(), 2),
        turn(
            TurnRole::Customer,
            format!(
                "DETAILS[{case}] The resource is <RESOURCE_1> in region <REGION_1>.",
                case = rule.case_token
            ),
            3,
        ),
        turn(TurnRole::Agent, rule.reference_resolution(), 4),
        turn(TurnRole::Customer, "Thanks!".to_string(), 5),
        turn(TurnRole::Agent, "You're welcome!".to_string(), 6),
    ];

    let mut operation_log = vec![
        OperationLogEntry { tool: "lookup_case_rule".into(), timestamp: created_at + 3 },
        OperationLogEntry { tool: "query_resource_state".into(), timestamp: created_at + 3 },
    ];
    if idx % 3 == 0 {
        operation_log
            .push(OperationLogEntry { tool: "fetch_billing_profile".into(), timestamp: created_at + 4 });
    }
    if idx % 7 == 0 {
        // Deprecated utility absent from the registry; mining must warn and
        // exclude it.
        operation_log.push(OperationLogEntry { tool: "legacy_probe".into(), timestamp: created_at + 4 });
    }

    let cited_refs =
        if rule.known { vec![format!("kb://articles/rule-{:03}", rule.id)] } else { vec![] };

    Ticket {
        id,
        scenario: config.scenario.clone(),
        created_at,
        summary: format!(
            "Customer hit {case} ({} issue). Final resolution applied {rule}: {remedy}.",
            rule.case_type,
            case = rule.case_token,
            rule = rule.rule_token,
            remedy = rule.remedy,
        ),
        turns,
        operation_log,
        cited_refs,
    }
}

/// The verified-tool registry fixture backing tool mining.
pub fn tool_registry() -> Vec<ToolSchema> {
    let param = |name: &str, desc: &str| ToolParam {
        name: name.into(),
        param_type: "string".into(),
        required: true,
        description: desc.into(),
    };
    vec![
        ToolSchema {
            name: "lookup_case_rule".into(),
            description: "Look up the documented remedy for a case token".into(),
            parameters: vec![param("case", "Case token, e.g. CASE-007")],
            returns: "The matching remedy text, if documented".into(),
            usage_scenarios: vec![],
        },
        ToolSchema {
            name: "query_resource_state".into(),
            description: "Query the live state of a customer resource".into(),
            parameters: vec![param("resource", "Resource identifier placeholder")],
            returns: "Resource state record".into(),
            usage_scenarios: vec![],
        },
        ToolSchema {
            name: "fetch_billing_profile".into(),
            description: "Fetch the account billing profile and package usage".into(),
            parameters: vec![param("account", "Account identifier placeholder")],
            returns: "Billing profile with package activation dates".into(),
            usage_scenarios: vec![],
        },
    ]
}

/// Knowledge-base fixture: one article per rule plus background texture.
pub fn article_store(meta: &SyntheticMeta) -> Vec<Article> {
    let mut articles: Vec<Article> = meta
        .rules
        .iter()
        .map(|r| Article {
            title: format!("{} remedy guide", r.rule_token),
            url: format!("kb://articles/rule-{:03}", r.id),
            body: format!(
                "{} This applies to {} incidents in the {} scenario.",
                r.knowledge_line(),
                r.case_type,
                meta.scenario
            ),
            authoritative: false,
        })
        .collect();
    articles.push(Article {
        title: "Service limits overview".into(),
        url: "kb://articles/limits".into(),
        body: "Official service limits documentation for capacity planning.".into(),
        authoritative: true,
    });
    articles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{derive_tasks, split};

    #[test]
    fn corpus_is_deterministic() {
        let cfg = SyntheticConfig::default();
        let (a, _) = generate_corpus(&cfg);
        let (b, _) = generate_corpus(&cfg);
        assert_eq!(a, b);
        assert_eq!(a.len(), 200);
    }

    #[test]
    fn task_ratio_near_two() {
        let cfg = SyntheticConfig::default();
        let (tickets, _) = generate_corpus(&cfg);
        let tasks: usize = tickets.iter().map(|t| derive_tasks(t).len()).sum();
        let ratio = tasks as f64 / tickets.len() as f64;
        assert!((1.5..=2.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn all_tickets_validate_and_split() {
        let cfg = SyntheticConfig::default();
        let (tickets, _) = generate_corpus(&cfg);
        for t in &tickets {
            t.validate().unwrap();
        }
        let plan = split(&tickets).unwrap();
        assert_eq!(plan.eval_split.len(), 50);
    }

    #[test]
    fn missing_rules_confined_to_their_round() {
        let cfg = SyntheticConfig::default();
        let (tickets, meta) = generate_corpus(&cfg);
        let plan = split(&tickets).unwrap();
        for round in 1..=3u8 {
            for &rid in &meta.round_rule_ids(round) {
                let rule = meta.rule(rid);
                for (q, ids) in plan.dev_splits.iter().enumerate() {
                    let present = ids.iter().any(|id| {
                        let t = tickets.iter().find(|t| &t.id == id).unwrap();
                        t.turns.iter().any(|turn| turn.text.contains(&rule.case_token))
                    });
                    if q as u8 + 1 == round {
                        assert!(present, "rule {rid} missing from its round {round}");
                    } else {
                        assert!(!present, "rule {rid} leaked into dev quarter {}", q + 1);
                    }
                }
            }
        }
        // Every rule appears in the eval split.
        for rule in &meta.rules {
            let present = plan.eval_split.iter().any(|id| {
                let t = tickets.iter().find(|t| &t.id == id).unwrap();
                t.turns.iter().any(|turn| turn.text.contains(&rule.case_token))
            });
            assert!(present, "rule {} absent from eval", rule.id);
        }
    }

    #[test]
    fn known_rules_cite_articles() {
        let cfg = SyntheticConfig::default();
        let (tickets, meta) = generate_corpus(&cfg);
        for (idx, t) in tickets.iter().enumerate() {
            let rule = meta.rule(meta.ticket_rules[idx]);
            if rule.known {
                assert_eq!(t.cited_refs.len(), 1);
            } else {
                assert!(t.cited_refs.is_empty());
            }
        }
    }

    #[test]
    fn dialogue_is_anonymized() {
        let cfg = SyntheticConfig::default();
        let (tickets, _) = generate_corpus(&cfg);
        for t in tickets.iter().take(20) {
            for turn in &t.turns {
                assert!(crate::corpus::check_anonymization(&turn.text).is_empty());
            }
        }
    }

    #[test]
    fn article_store_covers_every_rule() {
        let cfg = SyntheticConfig::default();
        let (_, meta) = generate_corpus(&cfg);
        let store = article_store(&meta);
        assert_eq!(store.len(), cfg.n_rules + 1);
        let search = crate::search::FixtureSearch::new(store);
        use crate::search::KnowledgeSearch;
        let hits = search.search("RULE-007").unwrap();
        assert!(!hits.is_empty());
        assert!(hits[0].body.contains("RULE-007:"));
    }
}
