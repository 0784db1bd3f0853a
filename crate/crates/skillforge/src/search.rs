//! Pluggable knowledge-search interface.
//!
//! The creator and optimizer query a knowledge base for documentation. The
//! default backend is a local fixture store (a JSON article list) with
//! deterministic keyword ranking; production deployments plug in their own
//! implementation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub title: String,
    pub url: String,
    pub body: String,
    /// Official documentation: cite the link instead of embedding content.
    #[serde(default)]
    pub authoritative: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub title: String,
    pub url: String,
    pub snippet: String,
    pub body: String,
    pub authoritative: bool,
}

impl SearchResult {
    fn from_article(a: &Article) -> SearchResult {
        let snippet: String = a.body.chars().take(160).collect();
        SearchResult {
            title: a.title.clone(),
            url: a.url.clone(),
            snippet,
            body: a.body.clone(),
            authoritative: a.authoritative,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("search transport failure: {0}")]
    Transport(String),
}

pub trait KnowledgeSearch: Send + Sync {
    /// Ranked results for a free-text query.
    fn search(&self, query: &str) -> Result<Vec<SearchResult>, SearchError>;

    /// Resolves a documentation URL to its article, when the backend can.
    fn fetch(&self, url: &str) -> Result<Option<Article>, SearchError>;
}

/// Local JSON-backed store. A query term (3+ chars, lowercase) matches when
/// it appears in the title or body; results must match every term and rank
/// by total occurrences, then title.
pub struct FixtureSearch {
    articles: Vec<Article>,
    by_url: BTreeMap<String, usize>,
}

impl FixtureSearch {
    pub fn new(articles: Vec<Article>) -> Self {
        let by_url = articles
            .iter()
            .enumerate()
            .map(|(i, a)| (a.url.clone(), i))
            .collect();
        FixtureSearch { articles, by_url }
    }

    pub fn from_file(path: &Path) -> Result<Self, SearchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SearchError::Transport(format!("{path:?}: {e}")))?;
        let articles: Vec<Article> = serde_json::from_str(&text)
            .map_err(|e| SearchError::Transport(format!("{path:?}: {e}")))?;
        Ok(FixtureSearch::new(articles))
    }

    pub fn articles(&self) -> &[Article] {
        &self.articles
    }
}

impl KnowledgeSearch for FixtureSearch {
    fn search(&self, query: &str) -> Result<Vec<SearchResult>, SearchError> {
        let terms: Vec<String> = query
            .to_lowercase()
            .split_whitespace()
            .filter(|t| t.len() >= 3)
            .map(String::from)
            .collect();
        if terms.is_empty() {
            return Ok(Vec::new());
        }
        let mut scored: Vec<(usize, &Article)> = Vec::new();
        for article in &self.articles {
            let haystack = format!("{}\n{}", article.title, article.body).to_lowercase();
            let mut total = 0usize;
            let mut all = true;
            for term in &terms {
                let count = haystack.matches(term.as_str()).count();
                if count == 0 {
                    all = false;
                    break;
                }
                total += count;
            }
            if all {
                scored.push((total, article));
            }
        }
        scored.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.title.cmp(&b.1.title)));
        Ok(scored.into_iter().map(|(_, a)| SearchResult::from_article(a)).collect())
    }

    fn fetch(&self, url: &str) -> Result<Option<Article>, SearchError> {
        Ok(self.by_url.get(url).map(|&i| self.articles[i].clone()))
    }
}

/// Test double that always fails, for degraded-mode paths.
pub struct FailingSearch;

impl KnowledgeSearch for FailingSearch {
    fn search(&self, _query: &str) -> Result<Vec<SearchResult>, SearchError> {
        Err(SearchError::Transport("backend unavailable".into()))
    }

    fn fetch(&self, _url: &str) -> Result<Option<Article>, SearchError> {
        Err(SearchError::Transport("backend unavailable".into()))
    }
}
