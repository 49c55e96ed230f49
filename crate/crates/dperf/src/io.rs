//! Text and JSON input formats: graphs, region specs and set families.
//!
//! Graph files hold a header `n m`, then `m` lines `a b r`, then one line
//! `K k1 k2 …`. Lines starting with `#` and blank lines are ignored. Edge
//! ids follow the order of appearance.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use dperf_core::{Edge, Network, RawRegionSets, RegionSpec};
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn parse_err(source: &str, line: usize, message: impl Into<String>) -> ParseError {
    ParseError { source_name: source.to_string(), line, message: message.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn field<T: FromStr>(source: &str, line: usize, token: Option<&str>, what: &str) -> Result<T, ParseError> {
    let token = token.ok_or_else(|| parse_err(source, line, format!("missing {what}")))?;
    token.parse().map_err(|_| parse_err(source, line, format!("bad {what} {token:?}")))
}

pub fn parse_graph(text: &str, source: &str) -> Result<Network> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(source, 0, "empty graph file"))?;
    let mut tok = header.split_whitespace();
    let n: usize = field(source, hl, tok.next(), "node count")?;
    let m: usize = field(source, hl, tok.next(), "edge count")?;
    if tok.next().is_some() {
        return Err(parse_err(source, hl, "header must be `n m`").into());
    }

    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = lines.next().ok_or_else(|| parse_err(source, 0, format!("expected {m} edge lines")))?;
        let mut tok = line.split_whitespace();
        let a = field(source, ln, tok.next(), "endpoint")?;
        let b = field(source, ln, tok.next(), "endpoint")?;
        let reliability = field(source, ln, tok.next(), "reliability")?;
        if tok.next().is_some() {
            return Err(parse_err(source, ln, "edge lines are `a b r`").into());
        }
        edges.push(Edge { a, b, reliability });
    }

    let (kl, kline) = lines.next().ok_or_else(|| parse_err(source, 0, "missing terminal line `K …`"))?;
    let mut tok = kline.split_whitespace();
    if tok.next() != Some("K") {
        return Err(parse_err(source, kl, "terminal line must start with `K`").into());
    }
    let terminals = tok.map(|t| field(source, kl, Some(t), "terminal")).collect::<Result<Vec<usize>, _>>()?;
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(source, ln, "unexpected content after terminal line").into());
    }
    Ok(Network::new(n, edges, terminals)?)
}

pub fn write_graph(net: &Network) -> String {
    let mut out = format!("{} {}\n", net.node_count(), net.edge_count());
    for e in net.edges() {
        let _ = writeln!(out, "{} {} {}", e.a, e.b, e.reliability);
    }
    out.push('K');
    for t in net.terminals() {
        let _ = write!(out, " {t}");
    }
    out.push('\n');
    out
}

/// One more Φ value than thresholds gives plain hop regions; two more adds
/// a final region for disconnection.
pub fn region_spec(thresholds: &[u32], phi: Vec<f64>) -> Result<RegionSpec> {
    if phi.len() == thresholds.len() + 2 {
        Ok(RegionSpec::with_disconnected_region(thresholds, phi)?)
    } else {
        Ok(RegionSpec::from_hops(thresholds, phi)?)
    }
}

#[derive(Debug, Deserialize)]
struct RegionsJson {
    thresholds: Vec<u32>,
    #[serde(alias = "fines")]
    phi: Vec<f64>,
}

/// JSON `{"thresholds": [...], "phi": [...]}` or text lines
/// `thresholds 5 7` and `phi 0 1 2 4`.
pub fn parse_regions(text: &str, source: &str) -> Result<RegionSpec> {
    if text.trim_start().starts_with('{') {
        let r: RegionsJson = serde_json::from_str(text).map_err(|e| parse_err(source, e.line(), e.to_string()))?;
        return region_spec(&r.thresholds, r.phi);
    }
    let mut thresholds = None;
    let mut phi = None;
    for (ln, line) in content_lines(text) {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("thresholds") => {
                thresholds =
                    Some(tok.map(|t| field(source, ln, Some(t), "threshold")).collect::<Result<Vec<u32>, _>>()?)
            }
            Some("phi" | "fines") => {
                phi = Some(tok.map(|t| field(source, ln, Some(t), "phi value")).collect::<Result<Vec<f64>, _>>()?)
            }
            Some(other) => return Err(parse_err(source, ln, format!("unknown key {other:?}")).into()),
            None => {}
        }
    }
    let phi = phi.ok_or_else(|| parse_err(source, 0, "missing `phi` line"))?;
    region_spec(&thresholds.unwrap_or_default(), phi)
}

/// Comma-separated list such as `5,7`.
pub fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Invalid(format!("bad {what} {t:?}"))))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RegionSetsJson {
    #[serde(default)]
    pub pathsets: Vec<Vec<usize>>,
    #[serde(default)]
    pub cutsets: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamiliesJson {
    pub regions: Vec<RegionSetsJson>,
}

impl From<&[RawRegionSets]> for FamiliesJson {
    fn from(raw: &[RawRegionSets]) -> Self {
        FamiliesJson {
            regions: raw
                .iter()
                .map(|r| RegionSetsJson { pathsets: r.pathsets.clone(), cutsets: r.cutsets.clone() })
                .collect(),
        }
    }
}

impl FamiliesJson {
    pub fn into_raw(self) -> Vec<RawRegionSets> {
        self.regions.into_iter().map(|r| RawRegionSets { pathsets: r.pathsets, cutsets: r.cutsets }).collect()
    }
}

/// JSON (`{"regions": [{"pathsets": …, "cutsets": …}, …]}`) or text lines
/// `<region> P|C e1 e2 …`. Text files leave unmentioned regions empty.
pub fn parse_families(text: &str, source: &str, regions: usize) -> Result<Vec<RawRegionSets>> {
    if text.trim_start().starts_with('{') {
        let f: FamiliesJson = serde_json::from_str(text).map_err(|e| parse_err(source, e.line(), e.to_string()))?;
        return Ok(f.into_raw());
    }
    let mut raw = vec![RawRegionSets::default(); regions];
    for (ln, line) in content_lines(text) {
        let mut tok = line.split_whitespace();
        let region: usize = field(source, ln, tok.next(), "region index")?;
        if region >= regions {
            return Err(parse_err(source, ln, format!("region {region} but only {regions} regions")).into());
        }
        let kind = tok.next();
        let edges = tok.map(|t| field(source, ln, Some(t), "edge id")).collect::<Result<Vec<usize>, _>>()?;
        match kind {
            Some("P" | "p") => raw[region].pathsets.push(edges),
            Some("C" | "c") => raw[region].cutsets.push(edges),
            _ => return Err(parse_err(source, ln, "expected `P` or `C` after the region index").into()),
        }
    }
    Ok(raw)
}

pub fn families_to_json(raw: &[RawRegionSets]) -> String {
    serde_json::to_string_pretty(&FamiliesJson::from(raw)).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{antel, antel_families};

    #[test]
    fn graph_round_trip() {
        let net = antel(0.95).unwrap();
        let text = write_graph(&net);
        assert_eq!(parse_graph(&text, "antel").unwrap(), net);
    }

    #[test]
    fn graph_errors_carry_lines() {
        let text = "# tiny\n2 1\n0 1 1.5\nK 0 1\n";
        assert!(matches!(parse_graph(text, "t"), Err(Error::Network(_))));
        let text = "2 1\n0 x 0.5\nK 0 1\n";
        match parse_graph(text, "t") {
            Err(Error::Parse(p)) => assert_eq!(p.line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_graph("2 2\n0 1 0.5\nK 0 1\n", "t").is_err());
    }

    #[test]
    fn regions_text_and_json() {
        let a = parse_regions("thresholds 5 7\nphi 0 5 10 20\n", "r").unwrap();
        let b = parse_regions(r#"{"thresholds": [5, 7], "fines": [0, 5, 10, 20]}"#, "r").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.region_count(), 4);
        assert_eq!(parse_regions("thresholds 3\nphi 1 2\n", "r").unwrap().region_count(), 2);
        assert!(matches!(parse_regions("thresholds 3\nphi 1\n", "r"), Err(Error::Region(_))));
    }

    #[test]
    fn families_round_trip() {
        let raw = antel_families();
        assert_eq!(parse_families(&families_to_json(&raw), "f", 4).unwrap(), raw);
        let text = "0 P 4 5 9 1\n0 P 11 12 2 8\n1 P 11 12 2 13 14 15\n1 C 1 8\n\
                    2 P 4 17 10 18 19 20 21 22 15\n2 C 1 8 13\n3 C 3 4 11\n3 C 1 8 15\n";
        assert_eq!(parse_families(text, "f", 4).unwrap(), raw);
        assert!(parse_families("7 P 1\n", "f", 4).is_err());
    }
}
