//! Map ingestion: built-in names and the JSON vertex format.

use std::fs;
use std::path::Path;

use conjlab_core::rational::{format_ratio, int, parse_rational, rat};
use conjlab_core::{PLUnimodalMap, Rational};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Vertex list as stored on disk: `{"vertices": [["0","0"], ["1/2","1"], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub vertices: Vec<[String; 2]>,
}

impl MapFile {
    pub fn from_map(map: &PLUnimodalMap) -> Self {
        let vertices = map.vertices().iter().map(|(x, y)| [format_ratio(x), format_ratio(y)]).collect();
        MapFile { vertices }
    }

    pub fn to_map(&self) -> Result<PLUnimodalMap, CliError> {
        let vertices = self
            .vertices
            .iter()
            .map(|[x, y]| Ok((parse_rational(x)?, parse_rational(y)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(PLUnimodalMap::new(vertices)?)
    }
}

/// The counterexample map through `(0,0)`, `(1/5,1/2)`, `(1/2,1)`, `(1,0)`.
pub fn thm5_map() -> PLUnimodalMap {
    PLUnimodalMap::new(vec![(int(0), int(0)), (rat(1, 5), rat(1, 2)), (rat(1, 2), int(1)), (int(1), int(0))])
        .expect("built-in map is valid")
}

/// Resolve a `--map` argument: `tent`, `skew:<v>`, `thm5`, or a JSON file.
pub fn load_map(spec: &str) -> Result<PLUnimodalMap, CliError> {
    match spec {
        "tent" => Ok(PLUnimodalMap::tent()),
        "thm5" => Ok(thm5_map()),
        _ => match spec.strip_prefix("skew:") {
            Some(v) => Ok(PLUnimodalMap::skew_tent(parse_rational(v)?)?),
            None => load_map_file(Path::new(spec)),
        },
    }
}

pub fn load_map_file(path: &Path) -> Result<PLUnimodalMap, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    parse_map_json(&text)
}

pub fn parse_map_json(text: &str) -> Result<PLUnimodalMap, CliError> {
    let file: MapFile = serde_json::from_str(text).map_err(|e| CliError::MapFormat(e.to_string()))?;
    file.to_map()
}

pub fn map_to_json(map: &PLUnimodalMap) -> String {
    serde_json::to_string(&MapFile::from_map(map)).expect("vertex lists serialize")
}

/// Positive fixed point of `map`; it lies on the decreasing branch.
pub fn positive_fixed_point(map: &PLUnimodalMap) -> Rational {
    let vertices = map.vertices();
    vertices
        .windows(2)
        .find_map(|w| {
            let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
            // g(x) - x changes sign on a decreasing segment exactly once
            if y1 >= y0 || !(y0 >= x0 && y1 <= x1) {
                return None;
            }
            let slope = (y1 - y0) / (x1 - x0);
            let one = Rational::from_integer(1.into());
            Some((y0 - &slope * x0) / (one - slope))
        })
        .expect("a unimodal map with g(v) = 1 has a positive fixed point past v")
}
