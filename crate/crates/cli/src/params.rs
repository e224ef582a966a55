use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{CliError, Result};

/// `key=value` options of a suite or generator. Every key must be consumed.
#[derive(Debug)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    pub fn parse(raw: &[String]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for item in raw {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("parameter `{item}` is not KEY=VALUE")))?;
            if values.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(CliError::Usage(format!("parameter `{k}` given twice")));
            }
        }
        Ok(Self { values })
    }

    pub fn get<T: FromStr>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.remove(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e| CliError::Usage(format!("parameter `{key}={v}`: {e}"))),
        }
    }

    /// Comma-separated list.
    pub fn list<T: FromStr + Clone>(&mut self, key: &str, default: &[T]) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.remove(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|e| CliError::Usage(format!("parameter `{key}={v}`: {e}")))
                })
                .collect(),
        }
    }

    /// Fails on any key that no `get` asked for.
    pub fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            None => Ok(()),
            Some(k) => Err(CliError::Usage(format!("unknown parameter `{k}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let mut p = Params::parse(&["seeds=3".into(), "bogus=1".into()]).unwrap();
        assert_eq!(p.get("seeds", 20u64).unwrap(), 3);
        assert!(p.finish().is_err());
    }

    #[test]
    fn lists_split_on_commas() {
        let mut p = Params::parse(&["sizes=1, 2,3".into()]).unwrap();
        assert_eq!(p.list::<u32>("sizes", &[]).unwrap(), vec![1, 2, 3]);
        assert_eq!(p.list::<u32>("other", &[7]).unwrap(), vec![7]);
    }
}
