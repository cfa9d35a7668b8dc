//! Dot-matrix ship built from a text stencil.

/// Ground offsets of the `1` marks. Columns run along the ship's length,
/// which points along `heading`; rows run across it, top row to port.
/// The layout is centred on the scene centre.
pub fn stencil_offsets(stencil: &[String], spacing: f64, heading: f64) -> Vec<[f64; 3]> {
    let rows = stencil.len() as f64;
    let cols = stencil.iter().map(|r| r.len()).max().unwrap_or(0) as f64;
    let (along, across) = ([heading.cos(), heading.sin()], [-heading.sin(), heading.cos()]);
    let mut out = Vec::new();
    for (r, line) in stencil.iter().enumerate() {
        for (c, mark) in line.chars().enumerate() {
            if mark != '1' {
                continue;
            }
            let a = (c as f64 - 0.5 * (cols - 1.0)) * spacing;
            let b = (0.5 * (rows - 1.0) - r as f64) * spacing;
            out.push([a * along[0] + b * across[0], a * along[1] + b * across[1], 0.0]);
        }
    }
    out
}

/// Stencil rendered as an 8-bit image, `scale` pixels per mark.
pub fn stencil_image(stencil: &[String], scale: usize) -> (usize, usize, Vec<u8>) {
    let rows = stencil.len() * scale;
    let cols = stencil.iter().map(|r| r.len()).max().unwrap_or(0) * scale;
    let mut px = vec![0u8; rows * cols];
    for (r, line) in stencil.iter().enumerate() {
        for (c, mark) in line.chars().enumerate() {
            if mark == '1' {
                for i in 0..scale {
                    for j in 0..scale {
                        // dot in the middle of the cell
                        let inside = (2 * i + 1).abs_diff(scale) < scale / 2 + 1 && (2 * j + 1).abs_diff(scale) < scale / 2 + 1;
                        if inside {
                            px[(r * scale + i) * cols + c * scale + j] = 255;
                        }
                    }
                }
            }
        }
    }
    (rows, cols, px)
}
