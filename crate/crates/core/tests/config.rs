use std::path::Path;

use qqoqcp_core::config::ProviderConfig;
use qqoqcp_core::RunConfig;

fn default_file() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/default.toml")
}

#[test]
fn shipped_default_file_equals_builtin_defaults() {
    let src = std::fs::read_to_string(default_file()).unwrap();
    assert_eq!(RunConfig::parse(&src).unwrap(), RunConfig::default());
}

#[test]
fn toml_round_trip() {
    let c = RunConfig::default();
    assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
}

#[test]
fn load_resolves_paths_against_the_file() {
    let c = RunConfig::load(&default_file()).unwrap();
    assert!(c.output.dir.ends_with("config/out"));
    assert_eq!(c.annotation.providers, vec![ProviderConfig::Heuristic]);
}

#[test]
fn syntax_errors_carry_a_position() {
    match RunConfig::parse("[thresholds]\nwho = \n") {
        Err(qqoqcp_core::Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn negative_threshold_is_a_config_error() {
    assert!(matches!(
        RunConfig::parse("[thresholds]\nwhat = -0.1\n"),
        Err(qqoqcp_core::Error::Config(_))
    ));
}

#[test]
fn remote_endpoint_must_be_http() {
    let src = "[[annotation.providers]]\nkind = \"remote\"\nendpoint = \"localhost:8000\"\n";
    assert!(matches!(RunConfig::parse(src), Err(qqoqcp_core::Error::Config(_))));
}
