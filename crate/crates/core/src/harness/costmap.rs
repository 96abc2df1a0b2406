//! Per-block gain/loss maps of coded residual bins.

use std::fmt::Write as _;

use crate::blocks::PixelPlane;
use crate::error::{Error, Result};
use crate::videocodec::SymbolCostMap;

/// Gray level of blocks where prediction neither saved nor cost bins.
pub const NEUTRAL_GRAY: f64 = 128.0;

fn max_magnitude(map: &SymbolCostMap) -> i64 {
    map.savings().map(i64::abs).max().unwrap_or(0).max(1)
}

/// Grayscale rendering at pixel resolution: gains brighten towards white,
/// losses darken towards black, intensity proportional to the bin delta.
pub fn costmap_pgm(map: &SymbolCostMap) -> Result<PixelPlane> {
    let n = map.block_size;
    let (w, h) = (map.blocks_x * n, map.blocks_y * n);
    let peak = max_magnitude(map) as f64;
    let mut plane = PixelPlane::filled(w, h, NEUTRAL_GRAY)?;
    for (idx, d) in map.savings().enumerate() {
        let v = (NEUTRAL_GRAY + 127.0 * d as f64 / peak).round();
        let (bx, by) = (idx % map.blocks_x, idx / map.blocks_x);
        for y in by * n..(by + 1) * n {
            for x in bx * n..(bx + 1) * n {
                plane.set(x, y, v);
            }
        }
    }
    Ok(plane)
}

/// Colour rendering: green where bins were saved, blue where bins were lost,
/// gray otherwise; opacity follows the magnitude.
pub fn costmap_svg(map: &SymbolCostMap) -> String {
    let n = map.block_size;
    let peak = max_magnitude(map) as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" shape-rendering="crispEdges">"#,
        w = map.blocks_x * n,
        h = map.blocks_y * n
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#808080"/>"##);
    for (idx, d) in map.savings().enumerate() {
        if d == 0 {
            continue;
        }
        let colour = if d > 0 { "#00a000" } else { "#0040ff" };
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{n}" height="{n}" fill="{colour}" fill-opacity="{:.3}"/>"#,
            (idx % map.blocks_x) * n,
            (idx / map.blocks_x) * n,
            0.25 + 0.75 * d.abs() as f64 / peak
        );
    }
    s.push_str("</svg>\n");
    s
}

#[derive(serde::Serialize, serde::Deserialize)]
struct CostRow {
    bx: usize,
    by: usize,
    block_size: usize,
    baseline: u32,
    coded: u32,
}

pub fn costmap_to_csv(map: &SymbolCostMap) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for idx in 0..map.baseline.len() {
        w.serialize(CostRow {
            bx: idx % map.blocks_x,
            by: idx / map.blocks_x,
            block_size: map.block_size,
            baseline: map.baseline[idx],
            coded: map.coded[idx],
        })
        .map_err(|e| Error::invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

pub fn costmap_from_csv(text: &str) -> Result<SymbolCostMap> {
    let rows: Vec<CostRow> = csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::invalid(format!("bad cost map CSV: {e}")))?;
    let first = rows.first().ok_or_else(|| Error::invalid("empty cost map CSV"))?;
    let n = first.block_size;
    let bx = rows.iter().map(|r| r.bx).max().unwrap_or(0) + 1;
    let by = rows.iter().map(|r| r.by).max().unwrap_or(0) + 1;
    let mut map = SymbolCostMap::new(bx, by, n);
    let mut seen = vec![false; bx * by];
    for r in &rows {
        let idx = r.by * bx + r.bx;
        if r.block_size != n || seen[idx] {
            return Err(Error::invalid(format!("inconsistent cost map row at block ({}, {})", r.bx, r.by)));
        }
        seen[idx] = true;
        map.baseline[idx] = r.baseline;
        map.coded[idx] = r.coded;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::invalid("cost map CSV does not cover the grid"));
    }
    Ok(map)
}
