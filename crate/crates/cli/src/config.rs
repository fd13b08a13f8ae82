//! Job settings from a TOML file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Clone, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub disc: Option<u64>,
    pub p: Option<u64>,
    pub weight: Option<[i64; 2]>,
    pub n: Option<usize>,
    pub m: Option<u32>,
    pub primes: Option<Vec<u64>>,
    pub kind: Option<String>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub level: Option<String>,
    pub d: Option<i64>,
    pub order: Option<u32>,
    pub extension: Option<String>,
    pub switch: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Fill every unset field of `self` from `base`.
    pub fn over(self, base: FileConfig) -> FileConfig {
        FileConfig {
            disc: self.disc.or(base.disc),
            p: self.p.or(base.p),
            weight: self.weight.or(base.weight),
            n: self.n.or(base.n),
            m: self.m.or(base.m),
            primes: self.primes.or(base.primes),
            kind: self.kind.or(base.kind),
            input: self.input.or(base.input),
            output: self.output.or(base.output),
            level: self.level.or(base.level),
            d: self.d.or(base.d),
            order: self.order.or(base.order),
            extension: self.extension.or(base.extension),
            switch: self.switch.or(base.switch),
        }
    }
}

pub fn parse_weight(s: &str) -> Result<[i64; 2], String> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("weight must be k1,k2, got '{s}'"));
    }
    let k1 = parts[0].trim().parse().map_err(|_| format!("bad weight entry '{}'", parts[0]))?;
    let k2 = parts[1].trim().parse().map_err(|_| format!("bad weight entry '{}'", parts[1]))?;
    Ok([k1, k2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str("disc = 2\np = 3\nweight = [0, 0]\nprimes = [5, 7]").unwrap();
        let flags = FileConfig { p: Some(5), primes: Some(vec![3]), ..Default::default() };
        let merged = flags.over(file);
        assert_eq!(merged.disc, Some(2));
        assert_eq!(merged.p, Some(5));
        assert_eq!(merged.primes, Some(vec![3]));
        assert_eq!(merged.weight, Some([0, 0]));
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(parse_weight("(2,0)").unwrap(), [2, 0]);
        assert_eq!(parse_weight("4, -1").unwrap(), [4, -1]);
        assert!(parse_weight("4").is_err());
    }
}
