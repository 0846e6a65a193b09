//! HTTP interface over a loaded index and model set.
//!
//! | route              | purpose                                    |
//! |--------------------|--------------------------------------------|
//! | `POST /recommend`  | ranked lists for a query SLP               |
//! | `GET /healthz`     | liveness plus the number of indexed SLPs   |
//! | `GET /terms`       | typeahead over candidate types/properties  |

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::features::{load_index, BackgroundCorpus, FeatureError, FeatureVector};
use crate::ranker::{load_model, rank, ModelSet, RankError};
use crate::rdf::Iri;
use crate::slp::{Position, QuerySlp, Slp, SlpError};

pub const ENV_INDEX: &str = "TERMPICKER_INDEX";
pub const ENV_MODEL_STS: &str = "TERMPICKER_MODEL_STS";
pub const ENV_MODEL_PS: &str = "TERMPICKER_MODEL_PS";
pub const ENV_MODEL_OTS: &str = "TERMPICKER_MODEL_OTS";
pub const ENV_BIND: &str = "TERMPICKER_BIND";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";
pub const DEFAULT_LIMIT: usize = 10;
const DEFAULT_TERMS_LIMIT: usize = 20;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("index: {0}")]
    Index(#[from] FeatureError),
    #[error("model {path}: {source}")]
    Model { path: PathBuf, source: RankError },
    #[error("{0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Read-only state shared by all handlers.
pub struct AppState {
    pub index: BackgroundCorpus,
    pub models: ModelSet,
}

impl AppState {
    pub fn new(index: BackgroundCorpus, models: ModelSet) -> Self {
        AppState { index, models }
    }

    /// Loads an index directory and one model file per position (the same
    /// path may be given for all three).
    pub fn load(index_dir: &Path, sts: &Path, ps: &Path, ots: &Path) -> Result<Self, ServiceError> {
        let index = load_index(index_dir)?;
        let load = |p: &Path| {
            load_model(p).map_err(|source| ServiceError::Model {
                path: p.to_owned(),
                source,
            })
        };
        let models = if sts == ps && ps == ots {
            ModelSet::pooled(load(sts)?)
        } else {
            ModelSet::per_position(load(sts)?, load(ps)?, load(ots)?)
        };
        Ok(AppState { index, models })
    }

    /// Loads from `TERMPICKER_INDEX` and `TERMPICKER_MODEL_{STS,PS,OTS}`.
    pub fn from_env() -> Result<Self, ServiceError> {
        let var = |name: &str| {
            std::env::var_os(name)
                .map(PathBuf::from)
                .ok_or_else(|| ServiceError::Config(format!("{name} is not set")))
        };
        AppState::load(
            &var(ENV_INDEX)?,
            &var(ENV_MODEL_STS)?,
            &var(ENV_MODEL_PS)?,
            &var(ENV_MODEL_OTS)?,
        )
    }

    /// Answers one recommendation request.
    pub fn recommend(&self, req: &RecommendRequest) -> Result<RecommendResponse, ApiError> {
        if req.limit == 0 {
            return Err(ApiError::new("INVALID_LIMIT", "limit must be a positive integer"));
        }
        let positions = match &req.positions {
            None => Position::ALL.to_vec(),
            Some(p) if p.is_empty() => {
                return Err(ApiError::new("INVALID_POSITIONS", "positions must not be empty"))
            }
            Some(p) => p.clone(),
        };
        let query = req.query()?;
        let mut response = RecommendResponse::default();
        for pos in positions {
            let recs = rank(self.models.get(pos), &self.index, &query, pos, req.limit);
            let items = recs
                .into_iter()
                .enumerate()
                .map(|(i, r)| RankedTerm {
                    rank: i + 1,
                    term: r.term.to_string(),
                    score: r.score,
                    features: r.features,
                })
                .collect();
            *response.slot(pos) = Some(items);
        }
        Ok(response)
    }

    /// Candidate terms starting with `prefix`, either as a full IRI or by
    /// local name (case-insensitive), in IRI order.
    pub fn terms(&self, query: &TermsQuery) -> Vec<String> {
        let prefix = query.prefix.as_deref().unwrap_or("");
        let lower = prefix.to_lowercase();
        let pools: Vec<&[Iri]> = match query.kind {
            Some(TermKind::Type) => vec![self.index.candidates(Position::Sts)],
            Some(TermKind::Property) => vec![self.index.candidates(Position::Ps)],
            None => vec![self.index.candidates(Position::Sts), self.index.candidates(Position::Ps)],
        };
        let mut out: Vec<&str> = pools
            .into_iter()
            .flatten()
            .map(Iri::as_str)
            .filter(|t| t.starts_with(prefix) || local_name(t).to_lowercase().starts_with(&lower))
            .collect();
        out.sort_unstable();
        out.dedup();
        out.truncate(query.limit.unwrap_or(DEFAULT_TERMS_LIMIT));
        out.into_iter().map(str::to_owned).collect()
    }
}

fn local_name(term: &str) -> &str {
    let cut = term.rfind(['#', '/']).map_or(0, |i| i + 1);
    &term[cut..]
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecommendRequest {
    #[serde(default)]
    pub sts: Vec<String>,
    #[serde(default)]
    pub ps: Vec<String>,
    #[serde(default)]
    pub ots: Vec<String>,
    /// Positions to recommend for; all three when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<Position>>,
    #[serde(default = "default_limit")]
    pub limit: usize,
}

fn default_limit() -> usize {
    DEFAULT_LIMIT
}

impl RecommendRequest {
    pub fn query(&self) -> Result<QuerySlp, ApiError> {
        let parse = |terms: &[String]| {
            terms
                .iter()
                .map(|t| Iri::new(t).map_err(|e| ApiError::new("INVALID_IRI", e.to_string())))
                .collect::<Result<Vec<_>, _>>()
        };
        let slp = Slp::new(parse(&self.sts)?, parse(&self.ps)?, parse(&self.ots)?)
            .map_err(|e| ApiError::new("INVALID_SLP", e.to_string()))?;
        QuerySlp::new(slp).map_err(|e| match e {
            SlpError::EmptyQuery => ApiError::new("EMPTY_QUERY", e.to_string()),
            other => ApiError::new("INVALID_SLP", other.to_string()),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedTerm {
    pub rank: usize,
    pub term: String,
    pub score: f64,
    pub features: FeatureVector,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RecommendResponse {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sts: Option<Vec<RankedTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ps: Option<Vec<RankedTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ots: Option<Vec<RankedTerm>>,
}

impl RecommendResponse {
    fn slot(&mut self, pos: Position) -> &mut Option<Vec<RankedTerm>> {
        match pos {
            Position::Sts => &mut self.sts,
            Position::Ps => &mut self.ps,
            Position::Ots => &mut self.ots,
        }
    }

    pub fn get(&self, pos: Position) -> Option<&[RankedTerm]> {
        match pos {
            Position::Sts => self.sts.as_deref(),
            Position::Ps => self.ps.as_deref(),
            Position::Ots => self.ots.as_deref(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    Type,
    Property,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct TermsQuery {
    pub prefix: Option<String>,
    pub kind: Option<TermKind>,
    pub limit: Option<usize>,
}

/// A 400 response with a machine-readable code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApiError {
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            code,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (StatusCode::BAD_REQUEST, Json(body)).into_response()
    }
}

async fn recommend_handler(
    State(state): State<Arc<AppState>>,
    body: Result<Json<RecommendRequest>, JsonRejection>,
) -> Result<Json<RecommendResponse>, ApiError> {
    let Json(req) = body.map_err(|e| ApiError::new("INVALID_REQUEST", e.body_text()))?;
    state.recommend(&req).map(Json)
}

async fn healthz(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "slp_count": state.index.slp_count() }))
}

async fn terms_handler(
    State(state): State<Arc<AppState>>,
    query: Result<Query<TermsQuery>, QueryRejection>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let Query(q) = query.map_err(|e| ApiError::new("INVALID_REQUEST", e.body_text()))?;
    Ok(Json(json!({ "terms": state.terms(&q) })))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/recommend", post(recommend_handler))
        .route("/healthz", get(healthz))
        .route("/terms", get(terms_handler))
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(state: Arc<AppState>, bind: SocketAddr) -> Result<(), ServiceError> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranker::{FeatureMask, Hyperparams, ModelBody, RankingModel};
    use crate::rdf::PayLevelDomain;
    use crate::slp::realize_graph;
    use crate::slp::tests::{iri, slp};

    fn state() -> AppState {
        let g = realize_graph(
            &PayLevelDomain::from_domain("bg.org").unwrap(),
            &[
                slp(&["swrc:Publication"], &["dc:creator"], &["swrc:Person"]),
                slp(&["foaf:Document"], &["dc:title"], &[]),
            ],
        )
        .unwrap();
        let model = RankingModel::new(
            FeatureMask::SLP,
            0,
            Hyperparams::default(),
            ModelBody::Linear { weights: [0.0, 0.0, 0.0, 0.0, 1.0] },
        );
        AppState::new(BackgroundCorpus::build(&vec![g]), ModelSet::pooled(model))
    }

    fn request(sts: &[&str], ps: &[&str], ots: &[&str]) -> RecommendRequest {
        let s = |v: &[&str]| v.iter().map(|t| iri(t).to_string()).collect();
        RecommendRequest {
            sts: s(sts),
            ps: s(ps),
            ots: s(ots),
            positions: None,
            limit: DEFAULT_LIMIT,
        }
    }

    #[test]
    fn recommends_co_used_property() {
        let st = state();
        let res = st.recommend(&request(&["swrc:Publication"], &[], &["swrc:Person"])).unwrap();
        let ps = res.ps.unwrap();
        assert_eq!(ps[0].term, iri("dc:creator").as_str());
        assert_eq!(ps.iter().map(|r| r.rank).collect::<Vec<_>>(), [1, 2]);
        assert!(res.sts.is_some() && res.ots.is_some());
    }

    #[test]
    fn request_errors_have_codes() {
        let st = state();
        assert_eq!(st.recommend(&request(&[], &[], &[])).unwrap_err().code, "EMPTY_QUERY");
        let mut r = request(&["A"], &[], &[]);
        r.limit = 0;
        assert_eq!(st.recommend(&r).unwrap_err().code, "INVALID_LIMIT");
        let mut r = request(&["A"], &[], &[]);
        r.sts = vec!["not an iri".into()];
        assert_eq!(st.recommend(&r).unwrap_err().code, "INVALID_IRI");
        let mut r = request(&["A"], &[], &[]);
        r.ps = vec![crate::rdf::RDF_TYPE.into()];
        assert_eq!(st.recommend(&r).unwrap_err().code, "INVALID_SLP");
    }

    #[test]
    fn limit_and_positions() {
        let st = state();
        let mut r = request(&["foaf:Document"], &[], &[]);
        r.positions = Some(vec![Position::Ps]);
        r.limit = 1;
        let res = st.recommend(&r).unwrap();
        assert!(res.sts.is_none() && res.ots.is_none());
        assert_eq!(res.ps.unwrap().len(), 1);
    }

    #[test]
    fn typeahead() {
        let st = state();
        let q = |prefix: &str, kind| TermsQuery {
            prefix: Some(prefix.into()),
            kind,
            limit: None,
        };
        assert_eq!(st.terms(&q("pub", Some(TermKind::Type))), [iri("swrc:Publication").to_string()]);
        assert_eq!(st.terms(&q("http://purl.org/dc/", None)).len(), 2);
        assert!(st.terms(&q("Publication", Some(TermKind::Property))).is_empty());
    }
}
