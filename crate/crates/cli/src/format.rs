//! Number formatting shared by every command; output is locale independent.

use specasym_core::C;

/// Shortest round-trip decimal, switching to exponent form for very small or large values.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".into()
    } else if (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// `x` rounded to twelve significant digits.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    num(format!("{x:.11e}").parse::<f64>().expect("formatted float parses"))
}

/// `a`, `a+bi` or `a-bi` with twelve significant digits per part.
pub fn complex12(z: C) -> String {
    let re = sig12(z.re);
    let im = sig12(z.im);
    if im == "0" || im == "-0" {
        re
    } else if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

/// CSV builder with a fixed header.
pub struct Csv {
    out: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut out = header.join(",");
        out.push('\n');
        Self { out, width: header.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.width);
        self.out.push_str(&fields.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}
