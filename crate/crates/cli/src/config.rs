use std::fs;
use std::path::Path;

use screenant_core::ScenarioConfig;

use crate::error::{CliError, CliResult};

/// Parses and validates a scenario; missing keys take the defaults.
pub fn parse_config(text: &str, origin: &Path) -> CliResult<ScenarioConfig> {
    let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    cfg.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> CliResult<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text, path)
}

pub fn config_to_json(cfg: &ScenarioConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("config serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> CliResult<ScenarioConfig> {
        parse_config(text, Path::new("test.json"))
    }

    #[test]
    fn empty_object_is_default() {
        assert_eq!(parse("{}").unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn overrides_apply() {
        let cfg = parse(r#"{"run": {"trials": 100, "base_seed": 7}}"#).unwrap();
        assert_eq!(cfg.run.trials, 100);
        assert_eq!(cfg.run.base_seed, 7);
    }

    #[test]
    fn alpha_range_is_a_config_error() {
        let err = parse(r#"{"link": {"alpha": 1.5}}"#).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(err.to_string().contains("alpha"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse("{\n  \"link\": {\"alfa\": 1}\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alfa") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn round_trip() {
        let mut cfg = ScenarioConfig::default();
        cfg.link.tx_power_dbm = 17.3;
        cfg.screen.spacing_m = Some(0.004);
        cfg.blockage = Some(Default::default());
        assert_eq!(parse(&config_to_json(&cfg)).unwrap(), cfg);
    }
}
