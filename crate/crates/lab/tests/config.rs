use dicke_core::BasisKind;
use dicke_lab::config::{Grid, ParitySelection};
use dicke_lab::{LabError, Pipeline, RunConfig};

const MINIMAL: &str = r#"
[model]
omega = 1.0
omega0 = 1.0
gamma = 1.0
j = 5.0
"#;

fn config_path(err: LabError) -> String {
    match err {
        LabError::Config { path, .. } => path,
        other => panic!("expected a config error, got {other}"),
    }
}

#[test]
fn minimal_config_takes_defaults() {
    let cfg = RunConfig::from_toml(MINIMAL).unwrap();
    assert_eq!(cfg.parity, ParitySelection::Even);
    assert_eq!(cfg.basis.kind, BasisKind::Efficient);
    assert_eq!(cfg.basis().boson_cutoff, 40);
    assert_eq!(cfg.chaos_map.samples_per_cell, 200);
}

#[test]
fn unknown_keys_are_rejected_with_their_path() {
    let text = format!("{MINIMAL}\n[eth]\nrange = [0.5, 1.0]\nwindw = 20\n");
    let err = RunConfig::from_toml(&text).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert_eq!(config_path(err), "eth.windw");

    let err = RunConfig::from_toml(&format!("sed = 3\n{MINIMAL}")).unwrap_err();
    assert_eq!(config_path(err), "sed");
}

#[test]
fn type_errors_carry_the_field_path() {
    let text = MINIMAL.replace("gamma = 1.0", "gamma = \"strong\"");
    assert_eq!(config_path(RunConfig::from_toml(&text).unwrap_err()), "model.gamma");
}

#[test]
fn invalid_physics_is_a_config_error() {
    let text = MINIMAL.replace("j = 5.0", "j = 2.25");
    assert_eq!(RunConfig::from_toml(&text).unwrap_err().exit_code(), 2);
    let text = format!("{MINIMAL}\n[tc_compare]\nrange = [1.0, 0.5]\n");
    assert_eq!(config_path(RunConfig::from_toml(&text).unwrap_err()), "tc_compare.range");
    let text = format!("{MINIMAL}\n[r_map]\ngammas = [0.5, -0.1]\n");
    assert_eq!(config_path(RunConfig::from_toml(&text).unwrap_err()), "r_map.gammas");
}

#[test]
fn round_trips_losslessly() {
    let text = format!(
        "pipeline = \"eth-stats\"\nseed = 17\nparity = \"both\"\n{MINIMAL}\n[basis]\nkind = \"fock\"\ncutoff = 90\n\
         [chaos_map]\nepsilons = {{ start = -1.0, stop = 1.0, count = 5 }}\ngammas = [0.1, 1.0]\n\
         [eth]\nwindow = 30\nomega_max = 0.25\n[convergence]\nenergy = 1e-7\n"
    );
    let cfg = RunConfig::from_toml(&text).unwrap();
    assert_eq!(cfg.pipeline, Some(Pipeline::EthStats));
    assert_eq!(cfg.chaos_map.epsilons.points(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    assert_eq!(cfg.convergence.energy, 1e-7);
    assert_eq!(cfg.convergence.tail, 1e-3);
    let again = RunConfig::from_toml(&cfg.to_toml()).unwrap();
    assert_eq!(again, cfg);
}

#[test]
fn linear_grids_hit_both_ends() {
    let g = Grid::Linear { start: 0.1, stop: 1.5, count: 8 };
    let p = g.points();
    assert_eq!(p.len(), 8);
    assert_eq!(p[0], 0.1);
    assert!((p[7] - 1.5).abs() < 1e-15);
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert!(cfg.pipeline.is_some(), "{} names no pipeline", path.display());
            seen += 1;
        }
    }
    assert_eq!(seen, 7);
}
