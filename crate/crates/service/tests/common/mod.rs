//! In-process server harness for API tests.
#![allow(dead_code)]

use std::path::PathBuf;

use rescue_core::runtime::{ScenarioBundle, Session};
use serde_json::Value;
use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

pub fn tehran_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/tehran")
}

pub fn tehran() -> Session {
    Session::load_dir(tehran_dir()).expect("tehran scenario loads")
}

pub const CRANE_GOAL: &str = "at(crane_1,'Saadi Sq.')";
pub const TRUCK_GOAL: &str = "at(truck_1,'Saadi Sq.')";

/// An `n` x `n` grid with `movers` trucks, large enough that an unreachable
/// goal keeps the planner busy until its time budget runs out.
pub fn grid(n: usize, movers: usize) -> Session {
    let mut site = String::new();
    let node = |r: usize, c: usize| format!("n{r}_{c}");
    for r in 0..n {
        for c in 0..n {
            site += &format!("node({}).\n", node(r, c));
            if c + 1 < n {
                site += &format!("link({},{}).\n", node(r, c), node(r, c + 1));
            }
            if r + 1 < n {
                site += &format!("link({},{}).\n", node(r, c), node(r + 1, c));
            }
        }
    }
    for m in 0..movers {
        site += &format!("truck(t{m},small).\nat(t{m},{}).\n", node(0, m % n));
    }
    let actions = "\
edge(X,Y) :- link(X,Y).
edge(X,Y) :- link(Y,X).
fluent(at/2).
action(move(A,F,T), [truck(A,_)], [at(A,F), edge(F,T), not fire(F,T)], [del(at(A,F)), add(at(A,T))]).
";
    Session::load(&ScenarioBundle::from_texts(&site, "", actions)).expect("grid scenario loads")
}

pub struct Server {
    pub base: String,
    pub client: reqwest::Client,
    stop: Option<oneshot::Sender<()>>,
    handle: Option<JoinHandle<()>>,
}

impl Server {
    pub async fn start(session: Session) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
        let addr = listener.local_addr().unwrap();
        let (tx, rx) = oneshot::channel::<()>();
        let handle = tokio::spawn(async move {
            rescue_service::serve(listener, session, async {
                let _ = rx.await;
            })
            .await
            .unwrap();
        });
        Self {
            base: format!("http://{addr}/api/v1"),
            client: reqwest::Client::new(),
            stop: Some(tx),
            handle: Some(handle),
        }
    }

    pub async fn get(&self, path: &str) -> (u16, Value) {
        let r = self.client.get(format!("{}{path}", self.base)).send().await.unwrap();
        let status = r.status().as_u16();
        (status, r.json().await.unwrap())
    }

    pub async fn post(&self, path: &str, body: Value) -> (u16, Value) {
        let r = self
            .client
            .post(format!("{}{path}", self.base))
            .json(&body)
            .send()
            .await
            .unwrap();
        let status = r.status().as_u16();
        (status, r.json().await.unwrap())
    }

    pub async fn post_empty(&self, path: &str) -> (u16, Value) {
        let r = self.client.post(format!("{}{path}", self.base)).send().await.unwrap();
        let status = r.status().as_u16();
        (status, r.json().await.unwrap())
    }

    pub async fn stop(mut self) {
        if let Some(tx) = self.stop.take() {
            let _ = tx.send(());
        }
        if let Some(h) = self.handle.take() {
            h.await.unwrap();
        }
    }
}
