//! Static SVG rendering of a packing. Output depends only on the inputs, so it
//! can be compared byte for byte.

use std::fmt::Write;

use crate::classify::{classify, ItemClass, Params};
use crate::model::{Instance, Packing};

const PLAIN: &str = "#9ab";

fn color(c: ItemClass) -> &'static str {
    match c {
        ItemClass::Large => "#4878a8",
        ItemClass::Tall => "#c8553d",
        ItemClass::Vertical => "#e8a33d",
        ItemClass::MediumVertical => "#8c6bb1",
        ItemClass::Horizontal => "#5a9e6f",
        ItemClass::Small => "#b8b8b8",
        ItemClass::Medium => "#d17fa6",
    }
}

/// One `<rect>` per placed item; y grows upwards in the packing and downwards in
/// SVG, so rows are flipped. Items are coloured by class when `params` is given.
pub fn render_svg(instance: &Instance, packing: &Packing, scale: i64, params: Option<&Params>) -> String {
    let scale = scale.max(1);
    let height = packing.height.max(0);
    let (w, h) = (instance.strip_width * scale, height * scale);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="-1 -1 {} {}">"#,
        w + 2,
        h + 2,
        w + 2,
        h + 2
    );
    let _ = writeln!(s, r#"<rect class="strip" x="0" y="0" width="{w}" height="{h}" fill="none" stroke="black"/>"#);
    for (id, r) in packing.rects(instance) {
        let fill = match (params, instance.item(&id)) {
            (Some(p), Some(it)) => color(classify(it, p, instance.strip_width)),
            _ => PLAIN,
        };
        let _ = writeln!(
            s,
            r#"<rect id="{}" x="{}" y="{}" width="{}" height="{}" fill="{fill}" stroke="black"/>"#,
            escape(&id),
            r.x * scale,
            (height - r.top()) * scale,
            r.w * scale,
            r.h * scale
        );
    }
    if height > 0 {
        let _ = writeln!(
            s,
            r#"<line class="height" x1="0" y1="0" x2="{w}" y2="0" stroke="red" stroke-dasharray="4"/>"#
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Placement;

    #[test]
    fn empty_packing_is_outline_only() {
        let inst = Instance::new(5, Vec::new());
        let s = render_svg(&inst, &Packing::empty(), 3, None);
        assert_eq!(s.matches("<rect").count(), 1);
        assert!(!s.contains("<line"));
    }

    #[test]
    fn one_item() {
        let inst = Instance::from_dims(10, &[(4, 2)]);
        let p = Packing::new(&inst, vec![Placement::new("0", 3, 0)]);
        let s = render_svg(&inst, &p, 5, None);
        assert!(s.contains(r#"<rect id="0" x="15" y="0" width="20" height="10""#), "{s}");
    }
}
