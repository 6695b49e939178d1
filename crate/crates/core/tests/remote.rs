mod common;

use common::http::MockServer;
use qqoqcp_core::annotation::heuristic::HeuristicProvider;
use qqoqcp_core::annotation::qa::{run_qa_chain, QaGates, QaPromptSet, QaProvider};
use qqoqcp_core::annotation::remote::{RemoteConfig, RemoteProvider};
use qqoqcp_core::annotation::{annotate, AnnotationProvider, TemporalGrammar};
use qqoqcp_core::evaluate::CorpusArticle;
use qqoqcp_core::{Error, Pipeline, RawArticle};

fn fixture_article(id: &str) -> RawArticle {
    let src = std::fs::read_to_string(common::corpus_dir().join(format!("{id}.json"))).unwrap();
    CorpusArticle::parse(&src).unwrap().article
}

fn client(server: &MockServer, retries: u32) -> RemoteProvider {
    RemoteProvider::new(RemoteConfig {
        retries,
        timeout_ms: 5_000,
        ..RemoteConfig::new(server.base.clone())
    })
}

#[test]
fn annotate_posts_the_article_and_parses_layers() {
    let article = fixture_article("a02");
    let layers = HeuristicProvider::default().annotate(&article).unwrap();
    let server = MockServer::start();
    server.route("POST /annotate", vec![(200, serde_json::to_string(&layers).unwrap())]);
    let remote = client(&server, 0);
    assert_eq!(remote.annotate(&article).unwrap(), layers);

    let req = &server.recorded()[0];
    let body: serde_json::Value = serde_json::from_str(&req.body).unwrap();
    assert_eq!(body["id"], "a02");
    assert_eq!(body["title"], article.title.as_str());
    assert_eq!(body["body"], article.body.as_str());
    assert!(req.headers["content-type"].starts_with("application/json"));
}

#[test]
fn sidecar_and_local_layers_give_identical_answers() {
    let grammar = TemporalGrammar::builtin();
    let local = HeuristicProvider::default();
    let pipeline = Pipeline::heuristic();
    for id in ["a01", "a05", "a09"] {
        let article = fixture_article(id);
        let server = MockServer::start();
        let layers = local.annotate(&article).unwrap();
        server.route("POST /annotate", vec![(200, serde_json::to_string(&layers).unwrap())]);
        let remote = client(&server, 0);
        let via_remote = annotate(&article, &[&remote], &grammar).unwrap();
        let via_local = annotate(&article, &[&local], &grammar).unwrap();
        assert_eq!(via_remote, via_local);
        let a = pipeline.select(&qqoqcp_core::ScoredArticle {
            scored: pipeline.score_document(&via_remote),
            document: via_remote,
            qa_calls: vec![],
            warnings: vec![],
        });
        assert_eq!(a, pipeline.process(&article).unwrap());
    }
}

#[test]
fn qa_sends_context_and_question() {
    let server = MockServer::start();
    server.route("POST /qa", vec![(200, r#"{"answer":"Valérie Plante","score":0.81}"#.into())]);
    let (answer, score) = client(&server, 0).answer("context text", "Who?").unwrap();
    assert_eq!(answer, "Valérie Plante");
    assert_eq!(score, 0.81);
    let body: serde_json::Value = serde_json::from_str(&server.recorded()[0].body).unwrap();
    assert_eq!(body, serde_json::json!({"context": "context text", "question": "Who?"}));
}

#[test]
fn health_reports_loading_then_ready() {
    let server = MockServer::start();
    server.route(
        "GET /health",
        vec![(200, r#"{"status":"loading"}"#.into()), (200, r#"{"status":"ready"}"#.into())],
    );
    let c = client(&server, 0);
    assert_eq!(c.health().unwrap(), "loading");
    assert_eq!(c.health().unwrap(), "ready");
}

#[test]
fn server_errors_are_retried() {
    let server = MockServer::start();
    server.route(
        "POST /qa",
        vec![
            (503, r#"{"detail":"model not loaded"}"#.into()),
            (200, r#"{"answer":"x","score":0.5}"#.into()),
        ],
    );
    assert_eq!(client(&server, 2).answer("c", "q").unwrap().0, "x");
    assert_eq!(server.recorded().len(), 2);
}

#[test]
fn client_errors_are_not_retried() {
    let server = MockServer::start();
    server.route("POST /annotate", vec![(400, r#"{"detail":"empty body"}"#.into())]);
    let err = client(&server, 3).annotate(&fixture_article("a01")).unwrap_err();
    assert!(matches!(err, Error::Endpoint { .. }));
    assert!(err.to_string().contains("/annotate"), "{err}");
    assert_eq!(server.recorded().len(), 1);
}

#[test]
fn unreachable_endpoint_names_the_url() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    let remote = RemoteProvider::new(RemoteConfig {
        retries: 1,
        timeout_ms: 2_000,
        ..RemoteConfig::new(format!("http://{addr}"))
    });
    let err = remote.health().unwrap_err();
    assert!(err.to_string().contains(&format!("http://{addr}/health")), "{err}");
}

#[test]
fn chain_over_http_retains_confident_answers() {
    let server = MockServer::start();
    server.route("POST /qa", vec![(200, r#"{"answer":"La Société des ponts fédéraux","score":0.9}"#.into())]);
    let remote = client(&server, 0);
    let doc = annotate(&fixture_article("a02"), &[&HeuristicProvider::default()], &TemporalGrammar::builtin()).unwrap();
    let outcome = run_qa_chain(&doc, &remote, &QaPromptSet::builtin(), &QaGates::default());
    assert!(outcome.warning.is_none());
    assert_eq!(outcome.answers.len(), 6);
    assert_eq!(server.recorded().len(), 6);
    let first: serde_json::Value = serde_json::from_str(&server.recorded()[0].body).unwrap();
    assert!(first["context"].as_str().unwrap().starts_with(&doc.article.title));
}

#[test]
fn chain_failure_becomes_a_warning() {
    let server = MockServer::start();
    server.route("POST /qa", vec![(400, r#"{"detail":"empty question"}"#.into())]);
    let remote = client(&server, 0);
    let doc = annotate(&fixture_article("a03"), &[&HeuristicProvider::default()], &TemporalGrammar::builtin()).unwrap();
    let outcome = run_qa_chain(&doc, &remote, &QaPromptSet::builtin(), &QaGates::default());
    assert!(outcome.answers.is_empty());
    assert!(outcome.warning.unwrap().contains("a03"));
}
