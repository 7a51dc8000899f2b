//! Plain `key=value` config files merged under command-line flags.
//!
//! One pair per line, `#` starts a comment, blank lines ignored. Keys use
//! the long flag names of the active subcommand; an explicit flag always
//! wins over the file.

use std::collections::HashMap;
use std::path::Path;

use crate::UsageError;

#[derive(Default, Debug, Clone)]
pub struct ConfigMap {
    values: HashMap<String, String>,
}

impl ConfigMap {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                UsageError(format!(
                    "config {} line {}: expected key=value, got '{raw}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigMap { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value if given, else the config entry parsed with `parse`,
    /// else `default`.
    pub fn resolve<T, F>(
        &self,
        flag: Option<T>,
        key: &str,
        parse: F,
        default: T,
    ) -> Result<T, UsageError>
    where
        F: Fn(&str) -> Result<T, UsageError>,
    {
        match flag {
            Some(v) => Ok(v),
            None => match self.get(key) {
                Some(raw) => parse(raw),
                None => Ok(default),
            },
        }
    }

    /// As [`resolve`](Self::resolve) but without a default; `None` when
    /// neither flag nor config provides the key.
    pub fn resolve_opt<T, F>(
        &self,
        flag: Option<T>,
        key: &str,
        parse: F,
    ) -> Result<Option<T>, UsageError>
    where
        F: Fn(&str) -> Result<T, UsageError>,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key).map(parse).transpose(),
        }
    }
}

/// Parses `a,b,c` lists of positive integers.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, UsageError> {
    let vals: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
    let vals = vals.map_err(|e| UsageError(format!("bad integer list '{s}': {e}")))?;
    if vals.is_empty() {
        return Err(UsageError(format!("empty integer list '{s}'")));
    }
    Ok(vals)
}

pub fn parse_f64(s: &str) -> Result<f64, UsageError> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| UsageError(format!("bad number '{s}': {e}")))
}

pub fn parse_u64(s: &str) -> Result<u64, UsageError> {
    s.trim()
        .parse::<u64>()
        .map_err(|e| UsageError(format!("bad integer '{s}': {e}")))
}

pub fn parse_usize(s: &str) -> Result<usize, UsageError> {
    s.trim()
        .parse::<usize>()
        .map_err(|e| UsageError(format!("bad integer '{s}': {e}")))
}

/// SNR sweep: either `start:stop:step` (inclusive, dB) or a comma list.
pub fn parse_snr_spec(s: &str) -> Result<Vec<f64>, UsageError> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(UsageError(format!(
                "SNR range must be start:stop:step, got '{s}'"
            )));
        }
        let start = parse_f64(parts[0])?;
        let stop = parse_f64(parts[1])?;
        let step = parse_f64(parts[2])?;
        if step <= 0.0 || stop < start {
            return Err(UsageError(format!(
                "SNR range needs step > 0 and stop >= start, got '{s}'"
            )));
        }
        let mut out = Vec::new();
        let mut k = 0u32;
        loop {
            let v = start + step * k as f64;
            if v > stop + 1e-9 {
                break;
            }
            out.push(v);
            k += 1;
        }
        Ok(out)
    } else {
        let vals: Result<Vec<f64>, _> = s.split(',').map(parse_f64).collect();
        let vals = vals?;
        if vals.is_empty() {
            return Err(UsageError(format!("empty SNR list '{s}'")));
        }
        Ok(vals)
    }
}

/// A `lo:hi` dB window.
pub fn parse_window(s: &str) -> Result<(f64, f64), UsageError> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| UsageError(format!("window must be lo:hi, got '{s}'")))?;
    let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
    if hi < lo {
        return Err(UsageError(format!("window must have hi >= lo, got '{s}'")));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_specs() {
        assert_eq!(parse_snr_spec("10:25:3").unwrap(), vec![10.0, 13.0, 16.0, 19.0, 22.0, 25.0]);
        assert_eq!(parse_snr_spec("20,40,60").unwrap(), vec![20.0, 40.0, 60.0]);
        assert_eq!(parse_snr_spec("15").unwrap(), vec![15.0]);
        assert!(parse_snr_spec("25:10:3").is_err());
        assert!(parse_snr_spec("10:25:0").is_err());
    }

    #[test]
    fn config_lines() {
        let dir = std::env::temp_dir().join("marc-dmt-configtest");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.cfg");
        std::fs::write(&path, "# comment\ntrials = 500\nseed=9 # inline\n\n").unwrap();
        let cfg = ConfigMap::load(&path).unwrap();
        assert_eq!(cfg.get("trials"), Some("500"));
        assert_eq!(cfg.get("seed"), Some("9"));
        let v = cfg.resolve(None, "trials", parse_u64, 7).unwrap();
        assert_eq!(v, 500);
        let v = cfg.resolve(Some(3u64), "trials", parse_u64, 7).unwrap();
        assert_eq!(v, 3);
        let v = cfg.resolve(None, "missing", parse_u64, 7).unwrap();
        assert_eq!(v, 7);
    }
}
