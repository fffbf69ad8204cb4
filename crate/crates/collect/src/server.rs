use std::io::Cursor;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::header;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use image::{ImageFormat, RgbImage};
use serde::Deserialize;
use serde_json::json;

use crate::error::CollectError;
use crate::render::{DisplayMode, Target};
use crate::store::{ClickSubmission, NewSession, Store};

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/session", post(create_session))
        .route("/session/{id}/task", get(next_task))
        .route("/task/{id}/image", get(task_image))
        .route("/task/{id}/target", get(task_target))
        .route("/task/{id}/click", post(submit_click))
        .route("/export.csv", get(export))
        .with_state(store)
}

/// Serves until the listener fails.
pub async fn serve(store: Arc<Store>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("collect service listening on {}", listener.local_addr()?);
    axum::serve(listener, router(store)).await
}

fn png(img: &RgbImage) -> Result<Response, CollectError> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)
        .map_err(|e| CollectError::Internal(e.to_string()))?;
    Ok(([(header::CONTENT_TYPE, "image/png")], buf.into_inner()).into_response())
}

async fn create_session(
    State(store): State<Arc<Store>>,
    Json(req): Json<NewSession>,
) -> Result<Response, CollectError> {
    Ok(Json(store.create_session(req)?).into_response())
}

async fn next_task(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
) -> Result<Response, CollectError> {
    Ok(Json(store.next_task(&id)?).into_response())
}

async fn task_image(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
) -> Result<Response, CollectError> {
    png(&store.image(&id)?)
}

#[derive(Deserialize)]
struct TargetQuery {
    mode: Option<String>,
}

async fn task_target(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(q): Query<TargetQuery>,
) -> Result<Response, CollectError> {
    let mode = q
        .mode
        .as_deref()
        .map(str::parse::<DisplayMode>)
        .transpose()?;
    match store.target(&id, mode)? {
        Target::Image(img) => png(&img),
        Target::Text(description) => {
            Ok(Json(json!({ "description": description })).into_response())
        }
    }
}

async fn submit_click(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Json(click): Json<ClickSubmission>,
) -> Result<Response, CollectError> {
    Ok(Json(store.submit_click(&id, click)?).into_response())
}

async fn export(State(store): State<Arc<Store>>) -> Result<Response, CollectError> {
    let mut buf = Vec::new();
    store.export_csv(&mut buf)?;
    Ok(([(header::CONTENT_TYPE, "text/csv")], buf).into_response())
}
