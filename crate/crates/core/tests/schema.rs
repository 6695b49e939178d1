mod common;

use qqoqcp_core::evaluate::AnnotatedCorpus;
use qqoqcp_core::Pipeline;
use serde_json::Value;

fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(include_str!("../data/schema/annotated_document.schema.json")).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn errors(v: &jsonschema::Validator, doc: &Value) -> Vec<String> {
    v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect()
}

#[test]
fn fixture_document_conforms() {
    let v = validator();
    let doc: Value = serde_json::from_str(&common::coref_doc().to_json()).unwrap();
    assert_eq!(errors(&v, &doc), Vec::<String>::new());
}

#[test]
fn annotated_corpus_conforms() {
    let v = validator();
    let corpus = AnnotatedCorpus::load(&common::corpus_dir()).unwrap();
    let p = Pipeline::heuristic();
    for a in &corpus.articles {
        let (doc, _, _) = p.annotate(&a.article).unwrap();
        let json: Value = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(errors(&v, &json), Vec::<String>::new(), "{}", a.article.id);
        // the sidecar response is the same object without the article
        let (_, layers) = doc.into_parts();
        let layers = serde_json::to_value(&layers).unwrap();
        assert_eq!(errors(&v, &layers), Vec::<String>::new(), "{} layers", a.article.id);
    }
}

#[test]
fn schema_rejects_unknown_labels() {
    let v = validator();
    let mut doc: Value = serde_json::from_str(&common::coref_doc().to_json()).unwrap();
    doc["entities"][0]["label"] = "PERSON".into();
    assert!(!v.is_valid(&doc));
    let mut doc: Value = serde_json::from_str(&common::coref_doc().to_json()).unwrap();
    doc["tokens"][0]["pos"] = "noun".into();
    assert!(!v.is_valid(&doc));
}
