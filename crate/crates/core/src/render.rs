//! Static figures: the planar tiling, planar slices of the 3D tiling, torus
//! cell maps and a quad mesh of 3D tiles.
//!
//! Geometry is computed exactly and collected in a [`Scene`]; the scene is
//! what the audits inspect. Only the final SVG text rounds, to six decimals.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ratlin::{rat, RatVec, Rational};
use crate::tiling::{TileBox, TileKind, TileRef, Tiling, TilingParams};
use crate::torus::{TorusTiling, UNASSIGNED};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Style {
    pub big_fill: String,
    pub small_fill: String,
    pub stroke: String,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            big_fill: "#4e79a7".into(),
            small_fill: "#f28e2b".into(),
            stroke: "#222222".into(),
        }
    }
}

impl Style {
    fn fill(&self, kind: TileKind) -> &str {
        match kind {
            TileKind::Big => &self.big_fill,
            TileKind::Small => &self.small_fill,
        }
    }
}

/// Window onto the tiling. For slices only the first two coordinates matter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Viewport {
    lo: RatVec,
    hi: RatVec,
    scale: Rational,
    style: Style,
}

impl Viewport {
    pub fn new(lo: RatVec, hi: RatVec, scale: Rational) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if !(2..=3).contains(&lo.len()) {
            return Err(Error::InvalidParams(format!(
                "viewport must be 2- or 3-dimensional, got {}",
                lo.len()
            )));
        }
        if (0..lo.len()).any(|i| lo[i] >= hi[i]) {
            return Err(Error::InvalidParams(format!("degenerate viewport {lo}..{hi}")));
        }
        if !scale.is_positive() {
            return Err(Error::InvalidParams("scale must be positive".into()));
        }
        Ok(Viewport {
            lo,
            hi,
            scale,
            style: Style::default(),
        })
    }

    pub fn with_style(mut self, style: Style) -> Self {
        self.style = style;
        self
    }

    pub fn lo(&self) -> &RatVec {
        &self.lo
    }

    pub fn hi(&self) -> &RatVec {
        &self.hi
    }

    fn window(&self) -> TileBox {
        TileBox {
            lo: RatVec::new(self.lo.entries()[..2].to_vec()),
            hi: RatVec::new(self.hi.entries()[..2].to_vec()),
        }
    }

    /// Area of the planar window.
    pub fn area(&self) -> Rational {
        self.window().volume()
    }
}

/// One emitted rectangle: the full square and its part inside the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SceneRect {
    pub tile: TileRef,
    pub square: TileBox,
    pub clipped: TileBox,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scene {
    pub window: TileBox,
    pub rects: Vec<SceneRect>,
}

impl Scene {
    pub fn clipped_area(&self) -> Rational {
        self.rects
            .iter()
            .fold(Rational::zero(), |acc, r| acc + r.clipped.volume())
    }

    /// Clipped areas sum to the window area and nothing overlaps: an exact cover.
    pub fn is_exact_cover(&self) -> bool {
        self.clipped_area() == self.window.volume() && self.first_overlap().is_none()
    }

    pub fn first_overlap(&self) -> Option<(&SceneRect, &SceneRect)> {
        for (i, a) in self.rects.iter().enumerate() {
            for b in &self.rects[i + 1..] {
                if a.clipped.intersect(&b.clipped).is_some() {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Two equal squares sharing a full edge, if any.
    pub fn same_size_edge_contact(&self) -> Option<(&SceneRect, &SceneRect)> {
        for (i, a) in self.rects.iter().enumerate() {
            for b in &self.rects[i + 1..] {
                if shares_full_facet(&a.square, &b.square) {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

/// Equal boxes offset by exactly one side length along a single axis.
pub fn shares_full_facet(a: &TileBox, b: &TileBox) -> bool {
    let n = a.lo.len();
    let side_a = &a.hi[0] - &a.lo[0];
    let side_b = &b.hi[0] - &b.lo[0];
    if side_a != side_b {
        return false;
    }
    let diff = &b.lo - &a.lo;
    let moved: Vec<usize> = (0..n).filter(|&i| !diff[i].is_zero()).collect();
    moved.len() == 1 && diff[moved[0]].abs() == side_a
}

fn check_dim(params: &TilingParams, n: usize) -> Result<()> {
    if params.n() != n {
        return Err(Error::InvalidParams(format!(
            "this figure needs dimension {n}, got {}",
            params.n()
        )));
    }
    Ok(())
}

pub fn layout_tiling_2d(params: &TilingParams, vp: &Viewport) -> Result<Scene> {
    check_dim(params, 2)?;
    if vp.lo.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: vp.lo.len(),
        });
    }
    let tiling = Tiling::new(params.clone());
    let window = vp.window();
    let rects = tiling
        .tiles_in_box(&vp.lo, &vp.hi)?
        .into_iter()
        .map(|tile| {
            let square = tiling.tile_box(&tile);
            let clipped = square.intersect(&window).expect("tiles_in_box filters by overlap");
            SceneRect {
                tile,
                square,
                clipped,
            }
        })
        .collect();
    Ok(Scene { window, rects })
}

pub fn render_tiling_2d(params: &TilingParams, vp: &Viewport) -> Result<String> {
    Ok(scene_to_svg(&layout_tiling_2d(params, vp)?, vp))
}

/// Planar section `x_3 = z`: a tile appears iff `a_3 <= z < a_3 + side`.
pub fn layout_slice_3d(params: &TilingParams, z: &Rational, vp: &Viewport) -> Result<Scene> {
    check_dim(params, 3)?;
    let tiling = Tiling::new(params.clone());
    let window = vp.window();
    let lo = RatVec::new(vec![window.lo[0].clone(), window.lo[1].clone(), z - rat(1)]);
    let hi = RatVec::new(vec![window.hi[0].clone(), window.hi[1].clone(), z + rat(1)]);
    let mut rects = Vec::new();
    for tile in tiling.tiles_in_box(&lo, &hi)? {
        let cube = tiling.tile_box(&tile);
        if !(cube.lo[2] <= *z && *z < cube.hi[2]) {
            continue;
        }
        let square = TileBox {
            lo: RatVec::new(cube.lo.entries()[..2].to_vec()),
            hi: RatVec::new(cube.hi.entries()[..2].to_vec()),
        };
        if let Some(clipped) = square.intersect(&window) {
            rects.push(SceneRect {
                tile,
                square,
                clipped,
            });
        }
    }
    Ok(Scene { window, rects })
}

pub fn render_slices_3d(params: &TilingParams, z_values: &[Rational], vp: &Viewport) -> Result<Vec<String>> {
    z_values
        .iter()
        .map(|z| layout_slice_3d(params, z, vp).map(|scene| scene_to_svg(&scene, vp)))
        .collect()
}

/// Fixed six-decimal rendering, rounded half away from zero.
pub fn fixed6(x: &Rational) -> String {
    let million = BigInt::from(1_000_000);
    let scaled = x * Rational::from_integer(million.clone());
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let rounded = if scaled.is_negative() {
        -((-scaled) + half).floor().to_integer()
    } else {
        (scaled + half).floor().to_integer()
    };
    let sign = if rounded.is_negative() { "-" } else { "" };
    let (int, frac) = rounded.abs().div_rem(&million);
    format!("{sign}{int}.{frac:06}")
}

fn svg_header(out: &mut String, width: &Rational, height: &Rational) {
    let (w, h) = (fixed6(width), fixed6(height));
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
}

fn scene_to_svg(scene: &Scene, vp: &Viewport) -> String {
    let s = &vp.scale;
    let w = &scene.window;
    let width = (&w.hi[0] - &w.lo[0]) * s;
    let height = (&w.hi[1] - &w.lo[1]) * s;
    let mut out = String::new();
    svg_header(&mut out, &width, &height);
    let stroke_width = fixed6(&(s / rat(50)));
    for r in &scene.rects {
        let c = &r.clipped;
        let x = (&c.lo[0] - &w.lo[0]) * s;
        // SVG y grows downward
        let y = (&w.hi[1] - &c.hi[1]) * s;
        let rw = (&c.hi[0] - &c.lo[0]) * s;
        let rh = (&c.hi[1] - &c.lo[1]) * s;
        let anchor: Vec<String> = r.tile.anchor.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(
            out,
            r#"  <rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="{}" stroke-width="{}" data-kind="{}" data-anchor="{}"/>"#,
            fixed6(&x),
            fixed6(&y),
            fixed6(&rw),
            fixed6(&rh),
            vp.style.fill(r.tile.kind),
            vp.style.stroke,
            stroke_width,
            r.tile.kind,
            anchor.join(","),
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Fill colour of tile `id` in a torus map; distinct for every id below `2^24`.
pub fn torus_tile_color(id: u32) -> String {
    if id == UNASSIGNED {
        return "#bbbbbb".into();
    }
    // odd multiplier: a bijection on 24-bit values
    let c = (id as u64).wrapping_mul(0x9E3779).wrapping_add(0x3C6EF3) & 0xFF_FFFF;
    format!("#{c:06x}")
}

/// Colour of each cell, row-major with `x_1` fastest.
pub fn torus_cell_colors(t: &TorusTiling) -> Result<Vec<String>> {
    if t.params().n() != 2 {
        return Err(Error::InvalidParams(format!(
            "torus maps need dimension 2, got {}",
            t.params().n()
        )));
    }
    Ok(t.assignment().iter().map(|&id| torus_tile_color(id)).collect())
}

/// `m × m` grid, cells coloured by owning tile, borders drawn between cells
/// with different owners. Never validates the tiling.
pub fn render_torus_map(t: &TorusTiling) -> Result<String> {
    let colors = torus_cell_colors(t)?;
    let m = t.params().m();
    let cell = 20i64;
    let size = rat(m * cell);
    let mut out = String::new();
    svg_header(&mut out, &size, &size);
    let owner = |x: i64, y: i64| t.owner_index(&[x.rem_euclid(m), y.rem_euclid(m)]);
    for y in 0..m {
        for x in 0..m {
            let _ = writeln!(
                out,
                r#"  <rect x="{}" y="{}" width="{cell}" height="{cell}" fill="{}"/>"#,
                x * cell,
                (m - 1 - y) * cell,
                colors[(y * m + x) as usize],
            );
        }
    }
    for y in 0..m {
        for x in 0..m {
            let (px, py) = (x * cell, (m - 1 - y) * cell);
            if owner(x, y) != owner(x + 1, y) {
                let _ = writeln!(
                    out,
                    r##"  <line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#000000" stroke-width="2"/>"##,
                    px + cell,
                    py,
                    py + cell
                );
            }
            if owner(x, y) != owner(x, y + 1) {
                let _ = writeln!(
                    out,
                    r##"  <line x1="{0}" y1="{2}" x2="{1}" y2="{2}" stroke="#000000" stroke-width="2"/>"##,
                    px,
                    px + cell,
                    py
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Quad mesh of cube surfaces.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Mesh {
    pub vertices: Vec<[Rational; 3]>,
    pub faces: Vec<[usize; 4]>,
}

impl Mesh {
    /// Wavefront OBJ text (1-based face indices).
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {} {} {}", fixed6(&v[0]), fixed6(&v[1]), fixed6(&v[2]));
        }
        for f in &self.faces {
            let _ = writeln!(out, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1);
        }
        out
    }
}

/// Every 3D tile meeting `[lo, hi]`, unclipped, six quads per cube.
pub fn mesh_3d(params: &TilingParams, lo: &RatVec, hi: &RatVec) -> Result<Mesh> {
    check_dim(params, 3)?;
    let tiling = Tiling::new(params.clone());
    let mut mesh = Mesh::default();
    // corner bit b: x from bit 0, y from bit 1, z from bit 2
    const FACES: [[usize; 4]; 6] = [
        [0, 2, 3, 1],
        [4, 5, 7, 6],
        [0, 1, 5, 4],
        [2, 6, 7, 3],
        [0, 4, 6, 2],
        [1, 3, 7, 5],
    ];
    for tile in tiling.tiles_in_box(lo, hi)? {
        let b = tiling.tile_box(&tile);
        let base = mesh.vertices.len();
        for corner in 0..8 {
            let pick = |axis: usize| {
                if corner >> axis & 1 == 1 {
                    b.hi[axis].clone()
                } else {
                    b.lo[axis].clone()
                }
            };
            mesh.vertices.push([pick(0), pick(1), pick(2)]);
        }
        for f in FACES {
            mesh.faces.push([base + f[0], base + f[1], base + f[2], base + f[3]]);
        }
    }
    Ok(mesh)
}
