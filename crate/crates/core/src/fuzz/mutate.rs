// SPDX-License-Identifier: Apache-2.0
//! Seed generation and the control/data mutation engines.

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::Serialize;

use crate::stimulus::{NetInput, PortField, PortLayout};

/// Largest arithmetic step.
pub const ARITH_MAX: u64 = 35;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Control,
    Data,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationOp {
    ControlBitFlip,
    ControlMultiFlip,
    ControlSplice,
    DataBitFlip,
    Arith,
    InterestingValue,
    ByteSwap,
    FrameDup,
    FrameDelete,
    /// Only used on an empty input: append one random frame.
    FrameInsert,
}

impl MutationOp {
    pub fn engine(self) -> Engine {
        match self {
            MutationOp::ControlBitFlip | MutationOp::ControlMultiFlip | MutationOp::ControlSplice => Engine::Control,
            _ => Engine::Data,
        }
    }

    /// Whether the op keeps the frame count.
    pub fn keeps_length(self) -> bool {
        !matches!(self, MutationOp::FrameDup | MutationOp::FrameDelete | MutationOp::FrameInsert)
    }
}

/// Frame-count bounds for frame duplication and deletion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameBounds {
    pub min: usize,
    pub max: usize,
}

impl Default for FrameBounds {
    fn default() -> Self {
        FrameBounds { min: 1, max: 4 }
    }
}

/// Uniformly random frames. `mask` defaults to all data bits.
pub fn random_seed(layout: &Arc<PortLayout>, frames: usize, rng: &mut impl Rng, mask: Option<&[bool]>) -> NetInput {
    let w = layout.frame_width;
    let f = (0..frames).map(|_| (0..w).map(|_| rng.random::<bool>()).collect()).collect();
    let mask = mask.map(<[bool]>::to_vec).unwrap_or_else(|| vec![false; w]);
    NetInput::new(layout.clone(), f, mask).expect("frames and mask sized to layout")
}

/// One mutation, engine picked with probability proportional to the
/// number of bits under that engine's mask.
pub fn mutate(input: &NetInput, rng: &mut impl Rng, bounds: FrameBounds) -> (NetInput, MutationOp) {
    let w = input.layout().frame_width;
    let control = input.control_mask().iter().filter(|&&c| c).count();
    let engine = if control == 0 {
        Engine::Data
    } else if control == w || rng.random_range(0..w) < control {
        Engine::Control
    } else {
        Engine::Data
    };
    mutate_with(input, engine, rng, bounds)
}

/// One mutation from the given engine. Length-keeping ops never touch a
/// bit outside the engine's mask.
pub fn mutate_with(
    input: &NetInput,
    engine: Engine,
    rng: &mut impl Rng,
    bounds: FrameBounds,
) -> (NetInput, MutationOp) {
    let mut out = input.clone();
    if out.is_empty() {
        let w = out.layout().frame_width;
        out.frames_mut().push((0..w).map(|_| rng.random::<bool>()).collect());
        return (out, MutationOp::FrameInsert);
    }
    let want_control = engine == Engine::Control;
    let positions: Vec<usize> =
        (0..out.layout().frame_width).filter(|&i| out.control_mask()[i] == want_control).collect();
    if positions.is_empty() {
        // Nothing under this mask; the only safe edits are frame-level.
        return frame_op(out, rng, bounds).unwrap_or_else(|| (input.clone(), fallback_op(engine)));
    }
    let op = match engine {
        Engine::Control => control_op(&mut out, &positions, rng),
        Engine::Data => match rng.random_range(0..6) {
            0 => data_flip(&mut out, &positions, rng),
            1 => field_op(&mut out, MutationOp::Arith, rng),
            2 => field_op(&mut out, MutationOp::InterestingValue, rng),
            3 => field_op(&mut out, MutationOp::ByteSwap, rng),
            _ => match frame_op(out.clone(), rng, bounds) {
                Some((o, op)) => {
                    out = o;
                    op
                }
                None => data_flip(&mut out, &positions, rng),
            },
        },
    };
    (out, op)
}

fn fallback_op(engine: Engine) -> MutationOp {
    match engine {
        Engine::Control => MutationOp::ControlBitFlip,
        Engine::Data => MutationOp::DataBitFlip,
    }
}

fn control_op(out: &mut NetInput, positions: &[usize], rng: &mut impl Rng) -> MutationOp {
    let n = out.len();
    match rng.random_range(0..3) {
        0 => {
            let f = rng.random_range(0..n);
            let i = *positions.choose(rng).expect("non-empty");
            out.frames_mut()[f][i] ^= true;
            MutationOp::ControlBitFlip
        }
        1 => {
            let f = rng.random_range(0..n);
            let k = rng.random_range(2..=4).min(positions.len());
            for &i in positions.choose_multiple(rng, k) {
                out.frames_mut()[f][i] ^= true;
            }
            MutationOp::ControlMultiFlip
        }
        _ if n >= 2 => {
            // Copy the control bits of one frame into another.
            let src = rng.random_range(0..n);
            let dst = (src + rng.random_range(1..n)) % n;
            for &i in positions {
                let v = out.frames()[src][i];
                out.frames_mut()[dst][i] = v;
            }
            MutationOp::ControlSplice
        }
        _ => {
            let i = *positions.choose(rng).expect("non-empty");
            out.frames_mut()[0][i] ^= true;
            MutationOp::ControlBitFlip
        }
    }
}

fn data_flip(out: &mut NetInput, positions: &[usize], rng: &mut impl Rng) -> MutationOp {
    let f = rng.random_range(0..out.len());
    let i = *positions.choose(rng).expect("non-empty");
    out.frames_mut()[f][i] ^= true;
    MutationOp::DataBitFlip
}

fn wrap(v: u64, w: usize) -> u64 {
    if w >= 64 {
        v
    } else {
        v & ((1u64 << w) - 1)
    }
}

/// Overwrite a field's value, keeping control-mask bits intact.
fn store_data_bits(out: &mut NetInput, frame: usize, field: &PortField, value: u64) {
    let before: Vec<bool> = out.frames()[frame][field.offset..field.offset + field.width].to_vec();
    out.set_field_value(frame, field, value);
    for (j, b) in before.into_iter().enumerate() {
        let i = field.offset + j;
        if out.control_mask()[i] {
            out.frames_mut()[frame][i] = b;
        }
    }
}

fn field_op(out: &mut NetInput, op: MutationOp, rng: &mut impl Rng) -> MutationOp {
    let layout = out.layout().clone();
    let candidates: Vec<&PortField> =
        layout.fields.iter().filter(|f| (f.offset..f.offset + f.width).any(|i| !out.control_mask()[i])).collect();
    let field = *candidates.choose(rng).expect("data positions exist");
    let frame = rng.random_range(0..out.len());
    let w = field.width;
    let v = out.field_value(frame, field);
    match op {
        MutationOp::Arith => {
            let k = rng.random_range(1..=ARITH_MAX);
            let nv = if rng.random::<bool>() { v.wrapping_add(k) } else { v.wrapping_sub(k) };
            store_data_bits(out, frame, field, wrap(nv, w));
        }
        MutationOp::InterestingValue => {
            let all = wrap(u64::MAX, w);
            let msb = if w > 64 { 0 } else { 1u64 << (w - 1) };
            let choices = [0, 1, all, msb];
            store_data_bits(out, frame, field, wrap(*choices.choose(rng).expect("non-empty"), w));
        }
        _ => {
            if w >= 16 {
                let bytes = (w.min(64)) / 8;
                let a = rng.random_range(0..bytes);
                let b = (a + rng.random_range(1..bytes)) % bytes;
                let ba = (v >> (8 * a)) & 0xff;
                let bb = (v >> (8 * b)) & 0xff;
                let nv = (v & !(0xff << (8 * a)) & !(0xff << (8 * b))) | (ba << (8 * b)) | (bb << (8 * a));
                store_data_bits(out, frame, field, nv);
            } else if out.len() >= 2 {
                // Narrow field: exchange its value between two frames.
                let other = (frame + rng.random_range(1..out.len())) % out.len();
                let ov = out.field_value(other, field);
                store_data_bits(out, frame, field, ov);
                store_data_bits(out, other, field, v);
            } else {
                // Single narrow frame: swap the two halves of the field.
                let lo = w / 2;
                let hi = w - lo;
                let nv = ((v & wrap(u64::MAX, lo)) << hi) | (v >> lo);
                store_data_bits(out, frame, field, wrap(nv, w));
            }
        }
    }
    op
}

fn frame_op(mut out: NetInput, rng: &mut impl Rng, bounds: FrameBounds) -> Option<(NetInput, MutationOp)> {
    let n = out.len();
    let can_dup = n < bounds.max;
    let can_del = n > bounds.min.max(1);
    let dup = match (can_dup, can_del) {
        (false, false) => return None,
        (true, false) => true,
        (false, true) => false,
        (true, true) => rng.random::<bool>(),
    };
    let f = rng.random_range(0..n);
    if dup {
        let copy = out.frames()[f].clone();
        out.frames_mut().insert(f + 1, copy);
        Some((out, MutationOp::FrameDup))
    } else {
        out.frames_mut().remove(f);
        Some((out, MutationOp::FrameDelete))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_structural_verilog;
    use crate::stimulus::{derive_layout, parse_bits, render_bits};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn layout() -> Arc<PortLayout> {
        let n = parse_structural_verilog(
            "module m(input [3:0] a, input [1:0] b, input sel, output y); buf g(.A(sel), .Y(y)); endmodule",
        )
        .unwrap();
        Arc::new(derive_layout(&n).unwrap())
    }

    #[test]
    fn seeds_are_deterministic_and_sized() {
        let l = layout();
        let a = random_seed(&l, 4, &mut ChaCha8Rng::seed_from_u64(9), None);
        let b = random_seed(&l, 4, &mut ChaCha8Rng::seed_from_u64(9), None);
        assert_eq!(a, b);
        assert_eq!(a.frames().iter().map(Vec::len).sum::<usize>(), 28);
        assert!(a.control_mask().iter().all(|&c| !c));
    }

    #[test]
    fn arithmetic_wraps() {
        let l = layout();
        let mut x = NetInput::with_frames(l.clone(), vec![parse_bits("0001111").unwrap()]).unwrap();
        let a = l.field("a").unwrap().clone();
        let v = wrap(x.field_value(0, &a) + 1, 4);
        store_data_bits(&mut x, 0, &a, v);
        assert_eq!(x.field_value(0, &a), 0);
    }

    #[test]
    fn control_engine_only_touches_control_bits() {
        let l = layout();
        let mut mask = vec![false; 7];
        mask[6] = true;
        let x = NetInput::new(l, vec![vec![false; 7]], mask).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (m, op) = mutate_with(&x, Engine::Control, &mut rng, FrameBounds { min: 1, max: 1 });
            assert_eq!(op.engine(), Engine::Control);
            assert_eq!(render_bits(&m.frames()[0]), "1000000");
        }
    }

    #[test]
    fn frame_ops_respect_bounds() {
        let l = layout();
        let x = NetInput::with_frames(l, vec![vec![false; 7]; 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = FrameBounds { min: 2, max: 3 };
        for _ in 0..300 {
            let (m, _) = mutate(&x, &mut rng, b);
            assert!((2..=3).contains(&m.len()));
        }
    }

    #[test]
    fn empty_input_gains_a_frame() {
        let (m, op) = mutate(&NetInput::empty(layout()), &mut ChaCha8Rng::seed_from_u64(0), FrameBounds::default());
        assert_eq!(op, MutationOp::FrameInsert);
        assert_eq!(m.len(), 1);
    }
}
