//! SVG and Graphviz diagrams of geometric necklaces.
//!
//! Pearls sit on a regular (p+1)-gon. When Frobenius reflects the necklace,
//! the axis of the reflection is horizontal, so conjugate pearls are mirror
//! images. Frobenius moves are drawn as dashed arrows and an extra
//! automorphism fixing the necklace as dotted arrows.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write;

use super::{aut_on_kernel, elem_json, GeoNecklace};
use crate::ec::{extra_automorphisms, j_invariant};
use crate::error::Result;
use crate::ff::{make_ext, roots, Embedding, Field, Fq, Poly};
use crate::util::lcm;

/// Output format of a necklace diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagramFormat {
    /// Scalable vector graphics.
    Svg,
    /// Graphviz dot with pinned positions.
    Dot,
}

/// Positions moved to by an extra automorphism, if the curve has one and it fixes the necklace.
fn automorphism_positions(n: &GeoNecklace) -> Result<Option<Vec<usize>>> {
    let e = &n.curve;
    if e.is_special().is_none() {
        return Ok(None);
    }
    let aut = extra_automorphisms(e)?.remove(0);
    let base = &e.f;
    let big = make_ext(base.p(), lcm(aut.field().degree() as u64, n.field.degree() as u64) as usize)?;
    let base_big = Embedding::new(base, &big)?;
    let iso_big = Embedding::compatible(&Embedding::new(base, &n.field)?, &base_big)?;
    let minpoly = match aut.kind {
        crate::ec::AutKind::I => vec![big.one(), big.zero(), big.one()],
        crate::ec::AutKind::Zeta => vec![big.one(), big.one(), big.one()],
    };
    let root = roots(&big, &minpoly).remove(0);
    let ks: Vec<Poly<Fq>> = n.pearls.iter().map(|g| iso_big.forward_poly(&g.kernel.poly)).collect();
    let pos: HashMap<&Poly<Fq>, usize> = ks.iter().enumerate().map(|(i, g)| (g, i)).collect();
    Ok(ks.iter().map(|g| pos.get(&aut_on_kernel(&big, aut.kind, &root, g)).copied()).collect())
}

/// Pearl labels: codomain j-invariants when distinct, otherwise C0, C1, ….
fn labels(n: &GeoNecklace) -> Vec<String> {
    let js: Vec<String> = n.pearls.iter().map(|g| elem_json(&n.field, &g.j).to_string()).collect();
    let mut sorted = js.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() == js.len() {
        js
    } else {
        (0..js.len()).map(|i| format!("C{i}")).collect()
    }
}

/// Center of the reflection axis: c with Frobenius i ↦ c − i, else 0.
fn axis(frob: &[usize]) -> usize {
    let m = frob.len();
    let c = (frob[0]) % m;
    if m > 1 && (0..m).all(|i| frob[i] == (c + m - i) % m) && frob.iter().enumerate().any(|(i, &f)| f != i) {
        c
    } else {
        0
    }
}

/// A deterministic diagram of the necklace.
pub fn render_necklace(n: &GeoNecklace, format: DiagramFormat) -> Result<String> {
    let m = n.pearls.len();
    let frob = n.frobenius_positions()?;
    let aut = automorphism_positions(n)?;
    let c = axis(&frob) as f64;
    let (cx, cy, rad) = (220.0, 220.0, 160.0);
    let pos: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let th = 2.0 * PI * (i as f64 - c / 2.0) / m as f64;
            (cx + rad * th.cos(), cy - rad * th.sin())
        })
        .collect();
    let labels = labels(n);
    let title = format!(
        "p={} over F_{}^{} j={}",
        n.p(),
        n.curve.f.p(),
        n.curve.f.degree(),
        elem_json(&n.curve.f, &j_invariant(&n.curve))
    );
    let mut s = String::new();
    match format {
        DiagramFormat::Svg => {
            let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="440" height="460" viewBox="0 0 440 460">"#);
            let _ = writeln!(
                s,
                r#"<defs><marker id="arrow" markerWidth="8" markerHeight="8" refX="6" refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z"/></marker></defs>"#
            );
            let _ = writeln!(s, r#"<text x="220" y="450" text-anchor="middle" font-size="13">{title}</text>"#);
            for i in 0..m {
                let (a, b) = (pos[i], pos[(i + 1) % m]);
                let _ = writeln!(s, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#, a.0, a.1, b.0, b.1);
            }
            let arrows = |s: &mut String, perm: &[usize], dash: &str, color: &str| {
                for (i, &t) in perm.iter().enumerate().filter(|(i, t)| *i != **t) {
                    let (a, b) = (pos[i], pos[t]);
                    let _ = writeln!(
                        s,
                        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-dasharray="{dash}" marker-end="url(#arrow)"/>"#,
                        a.0, a.1, b.0, b.1
                    );
                }
            };
            arrows(&mut s, &frob, "6,4", "blue");
            if let Some(a) = &aut {
                arrows(&mut s, a, "2,3", "red");
            }
            for (i, (x, y)) in pos.iter().enumerate() {
                let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="9" fill="white" stroke="black"/>"#);
                let (lx, ly) = (cx + (x - cx) * 1.18, cy + (y - cy) * 1.18);
                let _ = writeln!(s, r#"<text x="{lx:.2}" y="{ly:.2}" text-anchor="middle" font-size="12">{}</text>"#, labels[i]);
            }
            s.push_str("</svg>\n");
        }
        DiagramFormat::Dot => {
            let _ = writeln!(s, "digraph necklace {{");
            let _ = writeln!(s, "  label=\"{title}\";");
            let _ = writeln!(s, "  node [shape=circle];");
            for (i, (x, y)) in pos.iter().enumerate() {
                let _ = writeln!(s, "  c{i} [label=\"{}\", pos=\"{:.2},{:.2}!\"];", labels[i].replace('"', "'"), x, 440.0 - y);
            }
            for i in 0..m {
                let _ = writeln!(s, "  c{i} -> c{} [dir=none];", (i + 1) % m);
            }
            for (i, &t) in frob.iter().enumerate() {
                if t != i {
                    let _ = writeln!(s, "  c{i} -> c{t} [style=dashed, color=blue];");
                }
            }
            if let Some(a) = &aut {
                for (i, &t) in a.iter().enumerate().filter(|(i, t)| *i != **t) {
                    let _ = writeln!(s, "  c{i} -> c{t} [style=dotted, color=red];");
                }
            }
            s.push_str("}\n");
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::rational_geo_necklaces;
    use crate::ec::Curve;
    use crate::ff::Fq;

    #[test]
    fn conjugates_are_mirrored() {
        let e = Curve::from_i64(&Fq::prime(13), 1, 4).unwrap();
        let mut reflected = 0;
        for n in rational_geo_necklaces(&e, 5).unwrap() {
            let dot = render_necklace(&n, DiagramFormat::Dot).unwrap();
            assert_eq!(dot.matches("[dir=none]").count(), 6);
            let svg = render_necklace(&n, DiagramFormat::Svg).unwrap();
            assert_eq!(svg.matches("<circle").count(), 6);
            assert_eq!(svg, render_necklace(&n, DiagramFormat::Svg).unwrap());
            let frob = n.frobenius_positions().unwrap();
            let c = axis(&frob);
            if (0..frob.len()).any(|i| frob[i] != (c + frob.len() - i) % frob.len()) {
                continue;
            }
            reflected += 1;
            let (c, m) = (c as f64, frob.len() as f64);
            for (i, &t) in frob.iter().enumerate() {
                let th = |k: usize| 2.0 * PI * (k as f64 - c / 2.0) / m;
                if t != i {
                    assert!((th(i).sin() + th(t).sin()).abs() < 1e-9 && (th(i).cos() - th(t).cos()).abs() < 1e-9);
                }
            }
        }
        assert_eq!(reflected, 3);
    }
}
