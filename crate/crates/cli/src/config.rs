//! Flat INI configuration: a `[global]` section plus one section per
//! subcommand, with keys spelled like the long flags (`nbar-min = 2`).
//! Values given on the command line win over the file, which wins over the
//! built-in defaults.

use std::path::Path;
use std::str::FromStr;

use ini::Ini;

use crate::error::CliError;

#[derive(Default)]
pub struct Settings {
    ini: Option<Ini>,
}

const SECTIONS: [&str; 10] = [
    "global",
    "synth",
    "verify-circuits",
    "sweep",
    "vacuum",
    "moments",
    "ft-bound",
    "twirl-density",
    "cache",
    "prewarm",
];

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let ini = Ini::load_from_file(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        for (section, _) in ini.iter() {
            match section {
                Some(s) if SECTIONS.contains(&s) => {}
                Some(s) => return Err(CliError::Validation(format!("unknown config section [{s}]"))),
                None => {}
            }
        }
        if !ini.general_section().is_empty() {
            return Err(CliError::Validation("config keys must live inside a [section]".into()));
        }
        Ok(Self { ini: Some(ini) })
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.ini.as_ref()?.section(Some(section))?.get(key)
    }

    fn parse<T: FromStr>(section: &str, key: &str, text: &str) -> Result<T, CliError> {
        text.trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("config [{section}] {key} = {text:?} is not valid")))
    }

    /// Flag, else config value, else `None`.
    pub fn opt<T: FromStr>(&self, flag: Option<T>, section: &str, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.raw(section, key).map(|t| Self::parse(section, key, t)).transpose(),
        }
    }

    /// Flag, else config value, else `default`.
    pub fn value<T: FromStr>(&self, flag: Option<T>, section: &str, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.opt(flag, section, key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(
        &self,
        flag: Option<Vec<T>>,
        section: &str,
        key: &str,
        default: Vec<T>,
    ) -> Result<Vec<T>, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(section, key) {
            Some(text) => text.split(',').map(|t| Self::parse(section, key, t)).collect(),
            None => Ok(default),
        }
    }

    /// Boolean switch: set by the flag or by `key = true` in the file.
    pub fn switch(&self, flag: bool, section: &str, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.opt::<bool>(None, section, key)?.unwrap_or(false))
    }
}
