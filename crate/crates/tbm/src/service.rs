//! JSON-over-HTTP front end for the decision engine.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::{json, Value};

use tbm_core::api::{self, FieldError, PredictRequest, RecommendRequest, ValidationError};
use tbm_core::model::{ModelBundle, Surrogate, Target};
use tbm_core::sabpnn::EvalReport;
use tbm_core::Error;

type Model = Arc<dyn Surrogate + Send>;

/// What `/api/v1/models` reports for one loaded surrogate.
#[derive(Debug, Clone, Serialize)]
pub struct ModelInfo {
    pub target: Target,
    pub kind: &'static str,
    pub schema_version: Option<String>,
    pub created_at: Option<String>,
    pub seed: Option<u64>,
    pub k_folds: Option<usize>,
    pub selected_fold: Option<usize>,
    pub validation: Option<EvalReport>,
    pub test: Option<EvalReport>,
    pub n_records: Option<usize>,
}

impl ModelInfo {
    pub fn from_bundle(b: &ModelBundle) -> Self {
        let m = &b.training_meta;
        ModelInfo {
            target: b.target,
            kind: "sa-bpnn",
            schema_version: Some(b.schema_version.clone()),
            created_at: b.created_at.clone(),
            seed: Some(m.seed),
            k_folds: Some(m.k_folds),
            selected_fold: Some(m.selected_fold),
            validation: Some(m.validation),
            test: m.test,
            n_records: Some(m.n_records),
        }
    }

    pub fn external(target: Target) -> Self {
        ModelInfo {
            target,
            kind: "external",
            schema_version: None,
            created_at: None,
            seed: None,
            k_folds: None,
            selected_fold: None,
            validation: None,
            test: None,
            n_records: None,
        }
    }
}

/// Immutable state shared by every request.
#[derive(Clone)]
pub struct AppState {
    pr: Model,
    ef: Model,
    models: Arc<[ModelInfo; 2]>,
}

impl AppState {
    pub fn from_bundles(pr: ModelBundle, ef: ModelBundle) -> tbm_core::Result<Self> {
        for (b, want) in [(&pr, Target::Pr), (&ef, Target::Ef)] {
            if b.target != want {
                return Err(Error::invalid(
                    format!("{}-model", want.name()),
                    format!("bundle predicts {}, expected {}", b.target.name(), want.name()),
                ));
            }
        }
        let models = Arc::new([ModelInfo::from_bundle(&pr), ModelInfo::from_bundle(&ef)]);
        Ok(AppState {
            pr: Arc::new(pr),
            ef: Arc::new(ef),
            models,
        })
    }

    /// Any pair of surrogates, e.g. stubs or the synthetic ground truth.
    pub fn from_surrogates(pr: impl Surrogate + Send + 'static, ef: impl Surrogate + Send + 'static) -> Self {
        AppState {
            pr: Arc::new(pr),
            ef: Arc::new(ef),
            models: Arc::new([ModelInfo::external(Target::Pr), ModelInfo::external(Target::Ef)]),
        }
    }
}

/// Error body: `{code, message, errors: [{field, message}]}` plus
/// `feasible_fraction` when no grid point was feasible.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: String, errors: Vec<FieldError>) -> Self {
        ApiError {
            status,
            body: json!({ "code": code, "message": message, "errors": errors }),
        }
    }
}

impl From<ValidationError> for ApiError {
    fn from(v: ValidationError) -> Self {
        let message = format!("{} invalid field(s)", v.errors.len());
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_input", message, v.errors)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        let status = match r {
            JsonRejection::MissingJsonContentType(_) => StatusCode::UNSUPPORTED_MEDIA_TYPE,
            _ => StatusCode::BAD_REQUEST,
        };
        let message = r.body_text();
        ApiError::new(
            status,
            "malformed_request",
            message.clone(),
            vec![FieldError {
                field: String::new(),
                message,
            }],
        )
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let code = e.code();
        let message = e.to_string();
        match e {
            Error::NoFeasiblePoint { feasible_fraction } => {
                let mut err = ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, code, message, Vec::new());
                err.body["feasible_fraction"] = json!(feasible_fraction);
                err
            }
            Error::InvalidInput { ref field, message: ref m } => {
                let errors = vec![FieldError {
                    field: field.clone(),
                    message: m.clone(),
                }];
                ApiError::new(StatusCode::BAD_REQUEST, code, message, errors)
            }
            ref other if other.is_validation() => ApiError::new(StatusCode::BAD_REQUEST, code, message, Vec::new()),
            _ => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, code, message, Vec::new()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") }))
}

async fn models(State(s): State<AppState>) -> Json<Value> {
    Json(json!({ "pr": s.models[0], "ef": s.models[1] }))
}

/// Runs CPU-bound work off the async workers.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce() -> tbm_core::Result<T> + Send + 'static,
{
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map_err(ApiError::from),
        Err(e) => Err(ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "internal",
            e.to_string(),
            Vec::new(),
        )),
    }
}

async fn predict(
    State(s): State<AppState>,
    body: Result<Json<PredictRequest>, JsonRejection>,
) -> ApiResult<api::PredictResponse> {
    let Json(req) = body?;
    req.validate()?;
    let out = blocking(move || api::predict(&req, s.pr.as_ref(), s.ef.as_ref())).await?;
    Ok(Json(out))
}

async fn recommend(
    State(s): State<AppState>,
    body: Result<Json<RecommendRequest>, JsonRejection>,
) -> ApiResult<api::RecommendResponse> {
    let Json(req) = body?;
    req.validate()?;
    let out = blocking(move || api::recommend(&req, s.pr.as_ref(), s.ef.as_ref())).await?;
    Ok(Json(out))
}

async fn surface(
    State(s): State<AppState>,
    body: Result<Json<RecommendRequest>, JsonRejection>,
) -> ApiResult<tbm_core::decision::CostSurface> {
    let Json(req) = body?;
    req.validate()?;
    let out = blocking(move || api::surface(&req, s.pr.as_ref(), s.ef.as_ref())).await?;
    Ok(Json(out))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint".into(), Vec::new())
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/v1/health", get(health))
        .route("/api/v1/models", get(models))
        .route("/api/v1/predict", post(predict))
        .route("/api/v1/recommend", post(recommend))
        .route("/api/v1/surface", post(surface))
        .fallback(not_found)
        .with_state(state)
}

/// Binds and serves until Ctrl-C.
pub async fn serve(state: AppState, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
