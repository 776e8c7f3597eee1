//! INI run configuration. Command-line flags override file values; unknown
//! sections and keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use ini::Ini;

use crate::error::{Error, Result};
use crate::lattice::{Direction, Edge, Site};

const KNOWN: &[(&str, &[&str])] = &[
    ("lattice", &["lx", "ly", "rho"]),
    ("model", &["t", "v", "n_f", "k", "potentials"]),
    ("trotter", &["dt", "tmax"]),
    ("vqe", &["ansatz", "layers", "granularity", "pairs", "init_width"]),
    (
        "optimizer",
        &[
            "learning_rate",
            "beta1",
            "beta2",
            "epsilon",
            "decay",
            "max_steps",
            "seed",
            "window",
            "tolerance",
            "restarts",
        ],
    ),
    ("depth", &["sizes"]),
    ("output", &["path"]),
];

/// Validated `section.key -> value` pairs.
#[derive(Clone, Debug, Default)]
pub struct RunConfigFile {
    values: BTreeMap<(String, String), String>,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut values = BTreeMap::new();
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(Error::Config(format!("key '{k}' outside any section")));
                }
                continue;
            };
            let keys = KNOWN
                .iter()
                .find(|(s, _)| *s == section)
                .map(|(_, k)| *k)
                .ok_or_else(|| Error::Config(format!("unknown section [{section}]")))?;
            for (k, v) in props.iter() {
                if !keys.contains(&k) {
                    return Err(Error::Config(format!("unknown key '{k}' in [{section}]")));
                }
                values.insert((section.to_string(), k.to_string()), v.trim().to_string());
            }
        }
        Ok(Self { values })
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.values.get(&(section.to_string(), key.to_string())).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        self.raw(section, key)
            .map(|v| v.parse::<T>().map_err(|_| Error::Config(format!("bad value '{v}' for {section}.{key}"))))
            .transpose()
    }

    /// Flag value, else file value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, section: &str, key: &str, default: T) -> Result<T> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(section, key)?.unwrap_or(default)),
        }
    }
}

/// `rx,ry,x` or `rx,ry,y`.
pub fn parse_edge(s: &str) -> Result<Edge> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::Config(format!("bad edge '{s}', expected rx,ry,x|y"));
    let [rx, ry, d] = parts[..] else { return Err(bad()) };
    let site = Site::new(rx.parse().map_err(|_| bad())?, ry.parse().map_err(|_| bad())?);
    match d {
        "x" => Ok(Edge { origin: site, direction: Direction::X }),
        "y" => Ok(Edge { origin: site, direction: Direction::Y }),
        _ => Err(bad()),
    }
}

/// Semicolon-separated edges.
pub fn parse_edges(s: &str) -> Result<Vec<Edge>> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_edge).collect()
}

/// `rx,ry:mu` entries separated by semicolons.
pub fn parse_potentials(s: &str) -> Result<Vec<(Site, f64)>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let bad = || Error::Config(format!("bad potential '{p}', expected rx,ry:mu"));
            let (site, mu) = p.split_once(':').ok_or_else(bad)?;
            let (rx, ry) = site.split_once(',').ok_or_else(bad)?;
            Ok((
                Site::new(rx.trim().parse().map_err(|_| bad())?, ry.trim().parse().map_err(|_| bad())?),
                mu.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

/// Comma-separated list.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse().map_err(|_| Error::Config(format!("bad list entry '{p}'"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_known_keys() {
        let c = RunConfigFile::parse("[lattice]\nlx = 2\nly = 4\n[model]\nv = 3.5\n").unwrap();
        assert_eq!(c.get::<usize>("lattice", "lx").unwrap(), Some(2));
        assert_eq!(c.pick(None, "model", "v", 0.0).unwrap(), 3.5);
        assert_eq!(c.pick(Some(1.0), "model", "v", 0.0).unwrap(), 1.0);
        assert_eq!(c.pick(None, "model", "t", 1.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_unknown_keys_and_sections() {
        assert!(RunConfigFile::parse("[lattice]\nlz = 2\n").is_err());
        assert!(RunConfigFile::parse("[weird]\nlx = 2\n").is_err());
        assert!(RunConfigFile::parse("lx = 2\n").is_err());
        let c = RunConfigFile::parse("[lattice]\nlx = two\n").unwrap();
        assert!(c.get::<usize>("lattice", "lx").is_err());
    }

    #[test]
    fn edge_and_potential_syntax() {
        let e = parse_edges("0,0,x; 1,2,y").unwrap();
        assert_eq!(e, vec![Edge::x(Site::new(0, 0)), Edge::y(Site::new(1, 2))]);
        assert!(parse_edge("0,0,z").is_err());
        let p = parse_potentials("0,0:-1; 0,1:-1").unwrap();
        assert_eq!(p, vec![(Site::new(0, 0), -1.0), (Site::new(0, 1), -1.0)]);
        assert_eq!(parse_list::<usize>("4, 6,8").unwrap(), vec![4, 6, 8]);
    }
}
