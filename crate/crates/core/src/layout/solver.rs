use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::CoalescenceKind;
use crate::schema::{Issue, ValidationReport};

use super::geometry::{add, dist, dot, lerp, norm, perpendicular, scale, sub, unit_or, V3};
use super::scene::{Placement, Rule, Scene};
use super::{LayoutState, Mode};

/// Placement of a lyph: centre, unit axis `u`, unit width direction `w`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Frame {
    pub center: V3,
    pub u: V3,
    pub w: V3,
    pub length: f64,
    pub width: f64,
}

/// Smallest lyph length, used for zero-length links.
pub const EPSILON_SIZE: f64 = 1e-3;

impl Scene {
    /// Length/width ratio of a lyph with `layers` layers.
    pub(crate) fn aspect(layers: usize) -> f64 {
        1.0 + layers as f64
    }

    fn conveyed_size(&self, link_length: f64, layers: usize) -> (f64, f64) {
        let len = if link_length < 1e-9 {
            EPSILON_SIZE
        } else {
            self.config.link_fraction * link_length
        };
        (len, len / Self::aspect(layers))
    }

    /// Uniformly scaled size of a lyph fitting a `cell_l × cell_w` cell.
    fn fit(layers: usize, cell_l: f64, cell_w: f64) -> (f64, f64) {
        let a = Self::aspect(layers);
        let len = cell_l.min(cell_w * a).max(0.0);
        (len, len / a)
    }

    /// Grid cell `k` of `n` inside a box of the given extent (margin applied).
    fn grid_cell(&self, k: usize, n: usize, length: f64, width: f64) -> (f64, f64, f64, f64) {
        let cols = (n as f64).sqrt().ceil().max(1.0) as usize;
        let rows = n.div_ceil(cols).max(1);
        let inner_l = length * (1.0 - 2.0 * self.config.margin);
        let inner_w = width * (1.0 - 2.0 * self.config.margin);
        let (cl, cw) = (inner_l / cols as f64, inner_w / rows as f64);
        let (col, row) = (k % cols, k / cols);
        let x = -inner_l / 2.0 + (col as f64 + 0.5) * cl;
        let y = -inner_w / 2.0 + (row as f64 + 0.5) * cw;
        (x, y, cl, cw)
    }

    pub(crate) fn frames(&self, pos: &[V3]) -> Vec<Option<Frame>> {
        let mut frames: Vec<Option<Frame>> = vec![None; self.lyphs.len()];
        for (i, l) in self.lyphs.iter().enumerate() {
            match l.placement {
                Placement::Conveyed(li) => {
                    let link = &self.links[li];
                    let (s, t) = (pos[link.source], pos[link.target]);
                    let u = unit_or(sub(t, s), [1.0, 0.0, 0.0]);
                    let (length, width) = self.conveyed_size(dist(s, t), l.layers);
                    frames[i] = Some(Frame {
                        center: lerp(s, t, 0.5),
                        u,
                        w: perpendicular(u),
                        length,
                        width,
                    });
                }
                Placement::Region { min, max, k, n } => {
                    let (bl, bw) = (max[0] - min[0], max[1] - min[1]);
                    let (x, y, cl, cw) = self.grid_cell(k, n, bl, bw);
                    let (length, width) = Self::fit(l.layers, cl, cw);
                    frames[i] = Some(Frame {
                        center: [
                            (min[0] + max[0]) / 2.0 + x,
                            (min[1] + max[1]) / 2.0 + y,
                            0.0,
                        ],
                        u: [1.0, 0.0, 0.0],
                        w: [0.0, 1.0, 0.0],
                        length,
                        width,
                    });
                }
                _ => {}
            }
        }
        // Nested placements, outermost hosts first.
        for _ in 0..16 {
            let mut changed = false;
            for (i, l) in self.lyphs.iter().enumerate() {
                if frames[i].is_some() {
                    continue;
                }
                let f = match l.placement {
                    Placement::Internal { host, k, n } => frames[host].map(|h| {
                        let (x, y, cl, cw) = self.grid_cell(k, n, h.length, h.width);
                        let (length, width) = Self::fit(l.layers, cl, cw);
                        Frame {
                            center: add(h.center, add(scale(h.u, x), scale(h.w, y))),
                            u: h.u,
                            w: h.w,
                            length,
                            width,
                        }
                    }),
                    Placement::Embedded { host } => frames[host].map(|h| {
                        let layer = h.width / self.lyphs[host].layers as f64;
                        Frame {
                            center: add(h.center, scale(h.w, h.width / 2.0 - layer / 2.0)),
                            u: h.u,
                            w: h.w,
                            length: h.length / 2.0,
                            width: layer * 0.8,
                        }
                    }),
                    _ => None,
                };
                if f.is_some() {
                    frames[i] = f;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        frames
    }

    /// Applies every positioning rule once, in precedence order. Returns the
    /// largest displacement.
    pub(crate) fn project(&self, pos: &mut [V3]) -> f64 {
        let before = pos.to_vec();
        for (i, r) in self.rules.iter().enumerate() {
            if let Rule::Anchored(p) | Rule::Fixed(p) = r {
                pos[i] = *p;
            }
        }
        self.align(pos);
        let frames = self.frames(pos);
        for (i, r) in self.rules.iter().enumerate() {
            if let Rule::Hosted { link, offset } = r {
                let l = &self.links[*link];
                pos[i] = lerp(pos[l.source], pos[l.target], *offset);
            }
        }
        for (i, r) in self.rules.iter().enumerate() {
            if let Rule::Border { lyphs } = r {
                let Some(f) = frames[lyphs[0]] else { continue };
                let toward = lyphs
                    .get(1)
                    .and_then(|&o| frames[o])
                    .map(|o| o.center)
                    .unwrap_or(pos[i]);
                pos[i] = on_perimeter(&f, toward);
            }
        }
        for (i, r) in self.rules.iter().enumerate() {
            if let Rule::Internal { lyph, k, n } = r {
                let Some(f) = frames[*lyph] else { continue };
                pos[i] = self.internal_point(&f, *k, *n);
            }
        }
        for (i, r) in self.rules.iter().enumerate() {
            if let Rule::Control(c) = r {
                let sum = c.iter().fold([0.0; 3], |acc, &j| add(acc, pos[j]));
                pos[i] = scale(sum, 1.0 / c.len() as f64);
            }
        }
        if self.mode == Mode::TwoD {
            for p in pos.iter_mut() {
                p[2] = 0.0;
            }
        }
        before
            .iter()
            .zip(pos.iter())
            .map(|(a, b)| dist(*a, *b))
            .fold(0.0, f64::max)
    }

    fn internal_point(&self, f: &Frame, k: usize, n: usize) -> V3 {
        if n <= 1 {
            return f.center;
        }
        if n <= 6 {
            let r = 0.25 * f.length.min(f.width);
            let a = 2.0 * PI * k as f64 / n as f64;
            return add(
                f.center,
                add(scale(f.u, r * a.cos()), scale(f.w, r * a.sin())),
            );
        }
        let (x, y, _, _) = self.grid_cell(k, n, f.length, f.width);
        add(f.center, add(scale(f.u, x), scale(f.w, y)))
    }

    /// Moves the free links of coalescing lyphs next to the reference lyph.
    pub(crate) fn align(&self, pos: &mut [V3]) {
        for c in &self.coalescences {
            let Placement::Conveyed(l0) = self.lyphs[c.lyphs[0]].placement else {
                continue;
            };
            let link0 = &self.links[l0];
            let (s0, t0) = (pos[link0.source], pos[link0.target]);
            let len0 = dist(s0, t0);
            let u0 = unit_or(sub(t0, s0), [1.0, 0.0, 0.0]);
            let w0 = perpendicular(u0);
            let mid0 = lerp(s0, t0, 0.5);
            let layers0 = self.lyphs[c.lyphs[0]].layers;
            let (_, width0) = self.conveyed_size(len0, layers0);
            let mut offset = 0.0;
            let (mut prev_w, mut prev_outer) = (width0, width0 / layers0 as f64);
            for (k, &m) in c.lyphs.iter().enumerate().skip(1) {
                if !c.movable[k] {
                    continue;
                }
                let Placement::Conveyed(lm) = self.lyphs[m].placement else {
                    continue;
                };
                let link = &self.links[lm];
                let (s, t) = (pos[link.source], pos[link.target]);
                let dir = if dot(sub(t, s), u0) >= 0.0 {
                    u0
                } else {
                    scale(u0, -1.0)
                };
                let mut len = dist(s, t);
                if len < 1e-9 {
                    len = len0;
                }
                let layers = self.lyphs[m].layers;
                let center = match c.kind {
                    CoalescenceKind::Connecting => {
                        let (_, wm) = self.conveyed_size(len, layers);
                        let outer = wm / layers as f64;
                        offset += prev_w / 2.0 + wm / 2.0 - prev_outer.min(outer);
                        prev_w = wm;
                        prev_outer = outer;
                        add(mid0, scale(w0, offset))
                    }
                    CoalescenceKind::Embedding => {
                        len = len.min(len0);
                        let layer = width0 / layers0 as f64;
                        add(mid0, scale(w0, width0 / 2.0 - layer / 2.0))
                    }
                };
                pos[link.source] = sub(center, scale(dir, len / 2.0));
                pos[link.target] = add(center, scale(dir, len / 2.0));
            }
        }
    }

    /// Initial positions: layout coordinates where given, else uniform
    /// random in a cube sized to the node count.
    pub fn initial_state(&self) -> LayoutState {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let r = 5.0 * (self.nodes.len() as f64).sqrt() + 5.0;
        let mut state = LayoutState::new(self.config.seed);
        for (i, id) in self.nodes.iter().enumerate() {
            let mut p = [
                rng.gen_range(-r..r),
                rng.gen_range(-r..r),
                rng.gen_range(-r..r),
            ];
            if let Some(m) = self.magnets[i].or(match self.rules[i] {
                Rule::Anchored(p) | Rule::Fixed(p) => Some(p),
                _ => None,
            }) {
                p = m;
            }
            if self.mode == Mode::TwoD {
                p[2] = 0.0;
            }
            state.positions.insert(id.clone(), p);
        }
        state
    }

    pub(crate) fn positions(&self, state: &LayoutState) -> Vec<V3> {
        self.nodes
            .iter()
            .map(|n| state.positions.get(n).copied().unwrap_or([0.0; 3]))
            .collect()
    }

    pub(crate) fn store(&self, state: &mut LayoutState, pos: &[V3]) {
        for (id, p) in self.nodes.iter().zip(pos) {
            state.positions.insert(id.clone(), *p);
        }
    }

    /// One spring-electric step followed by one projection pass.
    pub(crate) fn step(&self, pos: &mut [V3], vel: &mut [V3]) {
        let cfg = &self.config;
        let n = pos.len();
        let mut force = vec![[0.0; 3]; n];
        for i in 0..n {
            for j in i + 1..n {
                let d = sub(pos[i], pos[j]);
                let d2 = dot(d, d).max(0.01);
                let f = scale(d, cfg.repulsion / (d2 * d2.sqrt()));
                force[i] = add(force[i], f);
                force[j] = sub(force[j], f);
            }
        }
        for l in &self.links {
            let d = sub(pos[l.target], pos[l.source]);
            let len = norm(d).max(1e-9);
            let f = scale(d, cfg.spring * (len - l.rest) / len);
            force[l.source] = add(force[l.source], f);
            force[l.target] = sub(force[l.target], f);
        }
        for (i, m) in self.magnets.iter().enumerate() {
            if let Some(m) = m {
                force[i] = add(force[i], scale(sub(*m, pos[i]), cfg.magnet));
            }
        }
        for i in 0..n {
            if self.rules[i] != Rule::Free {
                vel[i] = [0.0; 3];
                continue;
            }
            let mut v = scale(add(vel[i], scale(force[i], cfg.dt)), 1.0 - cfg.damping);
            let speed = norm(v);
            if speed > cfg.max_speed {
                v = scale(v, cfg.max_speed / speed);
            }
            if self.mode == Mode::TwoD {
                v[2] = 0.0;
            }
            vel[i] = v;
            pos[i] = add(pos[i], scale(v, cfg.dt));
        }
        self.project(pos);
    }

    /// Projects repeatedly until no node moves by more than `1e-12`.
    pub(crate) fn settle(&self, pos: &mut [V3]) {
        for _ in 0..200 {
            if self.project(pos) <= 1e-12 {
                break;
            }
        }
    }

    /// Lyph sizes, centres and rotation angles from the current positions.
    pub(crate) fn scaling(&self, state: &mut LayoutState, report: &mut ValidationReport) {
        let pos = self.positions(state);
        let frames = self.frames(&pos);
        state.sizes.clear();
        state.centers.clear();
        state.rotations.clear();
        state.axes.clear();
        for (i, l) in self.lyphs.iter().enumerate() {
            let Some(f) = frames[i] else { continue };
            if let Placement::Conveyed(li) = l.placement {
                let link = &self.links[li];
                if dist(pos[link.source], pos[link.target]) < 1e-9 {
                    report.push(
                        Issue::warning(
                            "zero-length-link",
                            format!(
                                "link {} has zero length; lyph {} gets a minimal size",
                                link.id, l.id
                            ),
                        )
                        .on(&link.id),
                    );
                }
            }
            state.sizes.insert(l.id.clone(), (f.length, f.width));
            state.centers.insert(l.id.clone(), f.center);
            state.axes.insert(l.id.clone(), f.u);
            state.rotations.insert(l.id.clone(), l.angle);
        }
        for c in &self.coalescences {
            if c.kind != CoalescenceKind::Connecting {
                continue;
            }
            let base = self.lyphs[c.lyphs[0]].angle;
            for (k, &m) in c.lyphs.iter().enumerate().skip(1) {
                let id = &self.lyphs[m].id;
                if state.rotations.contains_key(id) {
                    state
                        .rotations
                        .insert(id.clone(), (base + 180.0 * k as f64).rem_euclid(360.0));
                }
            }
        }
    }
}

/// Closest point of a frame's rectangle outline to `q`.
fn on_perimeter(f: &Frame, q: V3) -> V3 {
    let (hl, hw) = (f.length / 2.0, f.width / 2.0);
    let d = sub(q, f.center);
    let mut x = dot(d, f.u).clamp(-hl, hl);
    let mut y = dot(d, f.w).clamp(-hw, hw);
    if x.abs() < hl && y.abs() < hw {
        if hl - x.abs() <= hw - y.abs() {
            x = if x >= 0.0 { hl } else { -hl };
        } else {
            y = if y >= 0.0 { hw } else { -hw };
        }
    }
    add(f.center, add(scale(f.u, x), scale(f.w, y)))
}
