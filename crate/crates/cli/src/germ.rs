use std::path::Path;

use linkforge::{catalog, parse_polymap, ParseMode, PolyMap, PolyMapError};

use crate::Failure;

/// Resolves a catalog name, or a file holding a map source.
pub fn resolve(selector: &str, complex: bool, nvars: Option<usize>) -> Result<PolyMap, Failure> {
    match catalog::lookup(selector) {
        Ok(m) => return Ok(m),
        Err(PolyMapError::UnknownGerm(_)) => {}
        Err(e) => return Err(Failure::Input(format!("germ {selector}: {e}"))),
    }
    let path = Path::new(selector);
    if !path.is_file() {
        return Err(Failure::Input(format!(
            "unknown germ '{selector}': not a catalog name or a readable file (try `linkforge catalog`)"
        )));
    }
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("reading {selector}: {e}")))?;
    parse_source(src.trim(), complex, nvars).map(|m| m.with_name(selector))
}

pub fn parse_source(src: &str, complex: bool, nvars: Option<usize>) -> Result<PolyMap, Failure> {
    let mode = if complex {
        ParseMode::Complex
    } else {
        ParseMode::Real { nvars }
    };
    parse_polymap(src, mode).map_err(|e| Failure::Input(format!("parse: {e}")))
}

pub fn suspended(map: PolyMap, r: Option<u32>) -> Result<PolyMap, Failure> {
    match r {
        None => Ok(map),
        Some(r) => map
            .suspend(r)
            .map_err(|e| Failure::Input(format!("suspend: {e}"))),
    }
}
