//! SVG rendering of the tile layout. Rows are A levels, columns B levels.

use std::fmt::Write;

use tileupb::tiles::{Party, TileId, TileLayout};

pub const CELL: usize = 64;
const MARGIN: usize = 16;
const HEADER: usize = 32;

/// Fill colors by layer, innermost first; cycles past the end.
const PALETTE: [&str; 6] = ["#f4a261", "#2a9d8f", "#e9c46a", "#8ab17d", "#e76f51", "#6d8fc7"];

fn tile_letter(id: TileId) -> char {
    match id {
        TileId::Top => 'T',
        TileId::Bottom => 'B',
        TileId::Right => 'R',
        TileId::Left => 'L',
    }
}

pub fn layer_color(k: usize) -> &'static str {
    PALETTE[(k - 1) % PALETTE.len()]
}

pub fn render_svg(layout: &TileLayout) -> String {
    let d = layout.d;
    let side = d * CELL;
    let (w, h) = (side + 2 * MARGIN, side + 2 * MARGIN + HEADER);
    let members: usize = layout.layers.iter().map(|l| 4 * (2 * l.k - 1)).sum();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##);
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}" font-size="16">tiles UPB d = {d}: {members} members + stopper</text>"#,
        MARGIN + 12
    );
    let (x0, y0) = (MARGIN, MARGIN + HEADER);
    let _ = writeln!(s, r#"<g transform="translate({x0},{y0})">"#);
    for layer in layout.layers.iter().rev() {
        for t in &layer.tiles {
            let (lo, len) = (t.support.0, t.support_len());
            let (x, y, tw, th) = match t.fixed_side {
                Party::A => (lo * CELL, t.level * CELL, len * CELL, CELL),
                Party::B => (t.level * CELL, lo * CELL, CELL, len * CELL),
            };
            let _ = writeln!(
                s,
                r##"<rect class="tile" data-layer="{}" x="{x}" y="{y}" width="{tw}" height="{th}" fill="{}" stroke="#222222" stroke-width="2"/>"##,
                layer.k,
                layer_color(layer.k)
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="14" text-anchor="middle" dominant-baseline="middle">{}{} ({})</text>"#,
                x + tw / 2,
                y + th / 2,
                tile_letter(t.id),
                layer.k,
                len - 1
            );
        }
    }
    let c = layout.center * CELL;
    let _ = writeln!(
        s,
        r##"<rect class="center" x="{c}" y="{c}" width="{CELL}" height="{CELL}" fill="#ffffff" stroke="#222222" stroke-width="2"/>"##
    );
    let _ = writeln!(
        s,
        r##"<circle cx="{}" cy="{}" r="{}" fill="#222222"/>"##,
        c + CELL / 2,
        c + CELL / 2,
        CELL / 8
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{side}" height="{side}" fill="none" stroke="#000000" stroke-width="3"/>"##);
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use tileupb::tiles;

    #[test]
    fn region_counts() {
        for (d, regions) in [(3, 5), (5, 9), (7, 13)] {
            let svg = render_svg(&tiles::layout(d).unwrap());
            let tiles = svg.matches(r#"class="tile""#).count();
            let centers = svg.matches(r#"class="center""#).count();
            assert_eq!(tiles + centers, regions);
        }
    }

    #[test]
    fn labels_sum_to_member_count() {
        let svg = render_svg(&tiles::layout(5).unwrap());
        let total: usize = svg
            .match_indices(" (")
            .map(|(i, _)| {
                let rest = &svg[i + 2..];
                rest[..rest.find(')').unwrap()].parse::<usize>().unwrap()
            })
            .sum();
        assert_eq!(total, 16);
    }
}
