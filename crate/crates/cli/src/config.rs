use std::path::Path;

use clustersync::experiments::ScenarioSpec;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, Result};

/// Parses a scenario document and applies defaults and range checks.
///
/// Accepts either a bare scenario or a run manifest, in which case the
/// manifest's config echo is used.
pub fn parse_config(document: &str) -> Result<ScenarioSpec> {
    parse_config_from(document, "config")
}

pub fn load_config(path: &Path) -> Result<ScenarioSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_from(&text, &path.display().to_string())
}

fn parse_config_from(document: &str, origin: &str) -> Result<ScenarioSpec> {
    let mut value: Value = serde_json::from_str(document).map_err(|e| CliError::Parse {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if is_manifest(&value) {
        value = value["config"].take();
    }
    let spec = ScenarioSpec::deserialize(value).map_err(|e| {
        let message = e.to_string();
        CliError::Config {
            field: field_of(&message).unwrap_or("config").to_string(),
            reason: message,
        }
    })?;
    spec.validate().map_err(|e| match e {
        clustersync::Error::Config { field, reason } => CliError::Config { field, reason },
        other => other.into(),
    })?;
    Ok(spec)
}

fn is_manifest(value: &Value) -> bool {
    value.get("tool_version").is_some() && value.get("config").is_some_and(Value::is_object)
}

// serde names the offending key in backticks: "missing field `gamma`"
fn field_of(message: &str) -> Option<&str> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(&message[start..start + len])
}

#[cfg(test)]
mod tests {
    use super::*;
    use clustersync::experiments::preset_small;

    #[test]
    fn preset_round_trips() {
        let text = serde_json::to_string_pretty(&preset_small()).unwrap();
        assert_eq!(parse_config(&text).unwrap(), preset_small());
    }

    #[test]
    fn out_of_range_gamma_names_field() {
        let mut v = serde_json::to_value(preset_small()).unwrap();
        v["gamma"] = 1.5.into();
        match parse_config(&v.to_string()) {
            Err(CliError::Config { field, .. }) => assert_eq!(field, "gamma"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_and_unknown_keys_name_field() {
        let mut v = serde_json::to_value(preset_small()).unwrap();
        v.as_object_mut().unwrap().remove("beta");
        assert!(
            matches!(parse_config(&v.to_string()), Err(CliError::Config { field, .. }) if field == "beta")
        );
        let mut v = serde_json::to_value(preset_small()).unwrap();
        v["betta"] = 0.1.into();
        assert!(
            matches!(parse_config(&v.to_string()), Err(CliError::Config { field, .. }) if field == "betta")
        );
    }

    #[test]
    fn omitted_tau_intra_defaults_to_zero() {
        let mut v = serde_json::to_value(preset_small().with_tau_intra(4)).unwrap();
        v.as_object_mut().unwrap().remove("tau_intra");
        assert_eq!(parse_config(&v.to_string()).unwrap().tau_intra, 0);
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_config("{\n  \"gamma\": 0.5,\n  oops\n}").unwrap_err();
        match err {
            CliError::Parse { line, column, .. } => assert_eq!((line, column), (3, 3)),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_config("{").unwrap_err().exit_code(), 3);
    }
}
