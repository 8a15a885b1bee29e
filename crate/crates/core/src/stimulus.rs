// SPDX-License-Identifier: Apache-2.0
//! Fuzzer input representation: a port layout and multi-frame bit vectors
//! with a control/data annotation mask.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::netlist::{Netlist, PortRole};

/// One input port's slice of a frame. Bit `offset` is the port's MSB.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PortField {
    pub name: String,
    pub offset: usize,
    pub width: usize,
}

/// Frame layout over the fuzzable (non-clock, non-reset) input ports.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PortLayout {
    pub fields: Vec<PortField>,
    pub frame_width: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LayoutError {
    #[error("design has no fuzzable input bits")]
    NoFuzzableInputs,
    #[error("frame {frame} has {got} bits, layout needs {expected}")]
    FrameWidth { frame: usize, got: usize, expected: usize },
    #[error("control mask has {got} bits, layout needs {expected}")]
    MaskWidth { got: usize, expected: usize },
    #[error("unknown port `{0}` in annotation")]
    UnknownPort(String),
    #[error("bit {bit} out of range for `{port}`")]
    BitOutOfRange { port: String, bit: i64 },
    #[error("frame bit {0} is out of range")]
    OffsetOutOfRange(usize),
    #[error("line {line}: {msg}")]
    Annotation { line: usize, msg: String },
    #[error("layouts differ")]
    Mismatch,
}

/// Layout of the fuzzable inputs, in declaration order.
pub fn derive_layout(netlist: &Netlist) -> Result<PortLayout, LayoutError> {
    let mut fields = Vec::new();
    let mut offset = 0;
    for p in netlist.inputs().filter(|p| p.role == PortRole::Data) {
        let width = p.width();
        fields.push(PortField { name: p.name.clone(), offset, width });
        offset += width;
    }
    if offset == 0 {
        return Err(LayoutError::NoFuzzableInputs);
    }
    Ok(PortLayout { fields, frame_width: offset })
}

impl PortLayout {
    pub fn field(&self, name: &str) -> Option<&PortField> {
        self.fields.iter().find(|f| f.name == name)
    }

    /// The port and bit index (e.g. `a[2]`) at a frame offset, given the
    /// port's declared range.
    pub fn field_at(&self, offset: usize) -> Option<(usize, &PortField)> {
        self.fields.iter().enumerate().find(|(_, f)| offset >= f.offset && offset < f.offset + f.width)
    }

    /// Parse a control annotation file. Each non-empty line names a control
    /// port (`sel`), one port bit by declared index (`op[1]`), or one raw frame
    /// offset (`@6`). `#` starts a comment.
    pub fn parse_annotation(&self, netlist: &Netlist, text: &str) -> Result<Vec<bool>, LayoutError> {
        let mut mask = vec![false; self.frame_width];
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(off) = line.strip_prefix('@') {
                let off: usize = off
                    .trim()
                    .parse()
                    .map_err(|_| LayoutError::Annotation { line: n + 1, msg: format!("bad offset `{off}`") })?;
                if off >= self.frame_width {
                    return Err(LayoutError::OffsetOutOfRange(off));
                }
                mask[off] = true;
                continue;
            }
            let (name, bit) = match line.split_once('[') {
                Some((name, rest)) => {
                    let idx = rest.strip_suffix(']').and_then(|s| s.trim().parse::<i64>().ok()).ok_or_else(|| {
                        LayoutError::Annotation { line: n + 1, msg: format!("bad bit select `{line}`") }
                    })?;
                    (name.trim(), Some(idx))
                }
                None => (line, None),
            };
            let field = self.field(name).ok_or_else(|| LayoutError::UnknownPort(name.to_string()))?;
            match bit {
                None => mask[field.offset..field.offset + field.width].iter_mut().for_each(|b| *b = true),
                Some(idx) => {
                    let port = netlist.port(name).ok_or_else(|| LayoutError::UnknownPort(name.to_string()))?;
                    let bit_name = port
                        .bit_name(idx)
                        .ok_or_else(|| LayoutError::BitOutOfRange { port: name.to_string(), bit: idx })?;
                    let pos = port.bit_names().iter().position(|b| *b == bit_name).expect("bit of its own port");
                    mask[field.offset + pos] = true;
                }
            }
        }
        Ok(mask)
    }
}

/// A fuzzer seed: one bit vector of `frame_width` bits per simulated cycle.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NetInput {
    layout: Arc<PortLayout>,
    frames: Vec<Vec<bool>>,
    control_mask: Vec<bool>,
}

impl NetInput {
    pub fn new(layout: Arc<PortLayout>, frames: Vec<Vec<bool>>, control_mask: Vec<bool>) -> Result<Self, LayoutError> {
        let w = layout.frame_width;
        if control_mask.len() != w {
            return Err(LayoutError::MaskWidth { got: control_mask.len(), expected: w });
        }
        if let Some((i, f)) = frames.iter().enumerate().find(|(_, f)| f.len() != w) {
            return Err(LayoutError::FrameWidth { frame: i, got: f.len(), expected: w });
        }
        Ok(NetInput { layout, frames, control_mask })
    }

    /// All-data mask.
    pub fn with_frames(layout: Arc<PortLayout>, frames: Vec<Vec<bool>>) -> Result<Self, LayoutError> {
        let mask = vec![false; layout.frame_width];
        NetInput::new(layout, frames, mask)
    }

    pub fn empty(layout: Arc<PortLayout>) -> Self {
        let mask = vec![false; layout.frame_width];
        NetInput { layout, frames: Vec::new(), control_mask: mask }
    }

    pub fn layout(&self) -> &Arc<PortLayout> {
        &self.layout
    }

    pub fn frames(&self) -> &[Vec<bool>] {
        &self.frames
    }

    pub fn frames_mut(&mut self) -> &mut Vec<Vec<bool>> {
        &mut self.frames
    }

    pub fn control_mask(&self) -> &[bool] {
        &self.control_mask
    }

    pub fn set_control_mask(&mut self, mask: Vec<bool>) -> Result<(), LayoutError> {
        if mask.len() != self.layout.frame_width {
            return Err(LayoutError::MaskWidth { got: mask.len(), expected: self.layout.frame_width });
        }
        self.control_mask = mask;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Unsigned value of a port field; the field's first bit is its MSB.
    pub fn field_value(&self, frame: usize, field: &PortField) -> u64 {
        self.frames[frame][field.offset..field.offset + field.width].iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// Store `value` modulo 2^width into a port field.
    pub fn set_field_value(&mut self, frame: usize, field: &PortField, value: u64) {
        let bits = &mut self.frames[frame][field.offset..field.offset + field.width];
        let w = field.width;
        for (j, b) in bits.iter_mut().enumerate() {
            let shift = w - 1 - j;
            *b = shift < 64 && (value >> shift) & 1 == 1;
        }
    }

    /// Packed frames: `ceil(frame_width / 8)` bytes per frame, bit `i` in
    /// byte `i / 8` at position `i % 8`.
    pub fn to_packed(&self) -> Vec<u8> {
        let bytes = self.layout.frame_width.div_ceil(8);
        let mut out = Vec::with_capacity(bytes * self.frames.len());
        for f in &self.frames {
            let mut chunk = vec![0u8; bytes];
            for (i, &b) in f.iter().enumerate() {
                if b {
                    chunk[i / 8] |= 1 << (i % 8);
                }
            }
            out.extend(chunk);
        }
        out
    }

    pub fn from_packed(layout: Arc<PortLayout>, data: &[u8], control_mask: Vec<bool>) -> Result<Self, LayoutError> {
        let w = layout.frame_width;
        let bytes = w.div_ceil(8);
        if !data.len().is_multiple_of(bytes) {
            return Err(LayoutError::FrameWidth {
                frame: data.len() / bytes,
                got: (data.len() % bytes) * 8,
                expected: w,
            });
        }
        let frames =
            data.chunks(bytes).map(|chunk| (0..w).map(|i| chunk[i / 8] >> (i % 8) & 1 == 1).collect()).collect();
        NetInput::new(layout, frames, control_mask)
    }
}

/// Render bits with the highest index on the left.
pub fn render_bits(bits: &[bool]) -> String {
    bits.iter().rev().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Inverse of [`render_bits`].
pub fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .rev()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

impl fmt::Debug for NetInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NetInput")
            .field("frames", &self.frames.iter().map(|b| render_bits(b)).collect::<Vec<_>>())
            .field("control_mask", &render_bits(&self.control_mask))
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct NetInputRepr {
    frame_width: usize,
    frames: Vec<String>,
    control_mask: String,
}

impl Serialize for NetInput {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        NetInputRepr {
            frame_width: self.layout.frame_width,
            frames: self.frames.iter().map(|b| render_bits(b)).collect(),
            control_mask: render_bits(&self.control_mask),
        }
        .serialize(s)
    }
}

impl NetInput {
    /// Rebuild from the JSON form produced by `Serialize`.
    pub fn from_json(layout: Arc<PortLayout>, value: &serde_json::Value) -> Result<Self, LayoutError> {
        let bad = |msg: &str| LayoutError::Annotation { line: 0, msg: msg.to_string() };
        let repr: NetInputRepr = serde_json::from_value(value.clone()).map_err(|e| bad(&e.to_string()))?;
        let frames =
            repr.frames.iter().map(|f| parse_bits(f).ok_or_else(|| bad("bad frame bits"))).collect::<Result<_, _>>()?;
        let mask = parse_bits(&repr.control_mask).ok_or_else(|| bad("bad mask bits"))?;
        NetInput::new(layout, frames, mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_structural_verilog;

    fn abc() -> Netlist {
        parse_structural_verilog(
            "module t(a, b, sel, y); input [3:0] a; input [1:0] b; input sel; output y; buf g(.A(sel), .Y(y)); endmodule",
        )
        .unwrap()
    }

    #[test]
    fn layout_follows_declaration_order() {
        let l = derive_layout(&abc()).unwrap();
        let offs: Vec<_> = l.fields.iter().map(|f| (f.name.as_str(), f.offset, f.width)).collect();
        assert_eq!(offs, [("a", 0, 4), ("b", 4, 2), ("sel", 6, 1)]);
        assert_eq!(l.frame_width, 7);
    }

    #[test]
    fn clock_and_reset_are_excluded() {
        let n = parse_structural_verilog(
            "module t((* role = \"clock\" *) input clk, (* role = \"reset\" *) input rst, input d, output y); buf g(.A(d), .Y(y)); endmodule",
        )
        .unwrap();
        assert_eq!(derive_layout(&n).unwrap().frame_width, 1);
        let clock_only = parse_structural_verilog(
            "module t((* role = \"clock\" *) input clk, output y); buf g(.A(clk), .Y(y)); endmodule",
        )
        .unwrap();
        assert_eq!(derive_layout(&clock_only), Err(LayoutError::NoFuzzableInputs));
    }

    #[test]
    fn annotation_mask() {
        let n = abc();
        let l = derive_layout(&n).unwrap();
        assert_eq!(render_bits(&l.parse_annotation(&n, "sel\n").unwrap()), "1000000");
        assert_eq!(render_bits(&l.parse_annotation(&n, "@6 # the select").unwrap()), "1000000");
        // a[3] is the MSB, at offset 0.
        assert_eq!(render_bits(&l.parse_annotation(&n, "a[3]\nb").unwrap()), "0110001");
        assert!(l.parse_annotation(&n, "zz").is_err());
        assert!(l.parse_annotation(&n, "a[4]").is_err());
    }

    #[test]
    fn field_arithmetic_wraps() {
        let l = Arc::new(derive_layout(&abc()).unwrap());
        let mut ni = NetInput::with_frames(l.clone(), vec![vec![false; 7]]).unwrap();
        let a = l.field("a").unwrap().clone();
        ni.set_field_value(0, &a, 0b1111);
        assert_eq!(ni.field_value(0, &a), 15);
        let v = ni.field_value(0, &a);
        ni.set_field_value(0, &a, v.wrapping_add(1));
        assert_eq!(ni.field_value(0, &a), 0);
    }

    #[test]
    fn packed_round_trip() {
        let l = Arc::new(derive_layout(&abc()).unwrap());
        let frames = vec![vec![true, false, true, true, false, false, true], vec![false; 7]];
        let ni = NetInput::with_frames(l.clone(), frames).unwrap();
        let again = NetInput::from_packed(l.clone(), &ni.to_packed(), vec![false; 7]).unwrap();
        assert_eq!(again, ni);
        let json = serde_json::to_value(&ni).unwrap();
        assert_eq!(NetInput::from_json(l, &json).unwrap(), ni);
    }
}
