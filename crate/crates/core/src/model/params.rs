use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::config::ModelConfig;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockInfo {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl BlockInfo {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

/// Block indices of one decoder layer.
#[derive(Debug, Clone, Copy)]
pub struct LayerBlocks {
    pub attn_norm: usize,
    pub wq: usize,
    pub wk: usize,
    pub wv: usize,
    pub wo: usize,
    pub ffn_norm: usize,
    pub w_gate: usize,
    pub w_up: usize,
    pub w_down: usize,
}

/// Named row-major matrices packed into one flat buffer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub blocks: Vec<BlockInfo>,
    pub total: usize,
}

impl Layout {
    pub fn for_config(c: &ModelConfig) -> Self {
        let (d, f, m) = (c.d_model, c.ffn_dim, c.vocab_size);
        let mut shapes: Vec<(String, usize, usize)> = vec![("tok_emb".into(), m, d)];
        for l in 0..c.layers {
            for (name, r, k) in [
                ("attn_norm", 1, d),
                ("wq", d, d),
                ("wk", d, d),
                ("wv", d, d),
                ("wo", d, d),
                ("ffn_norm", 1, d),
                ("w_gate", d, f),
                ("w_up", d, f),
                ("w_down", f, d),
            ] {
                shapes.push((format!("layer{l}.{name}"), r, k));
            }
        }
        shapes.push(("final_norm".into(), 1, d));
        shapes.push(("out_proj".into(), d, m));
        let mut offset = 0;
        let blocks = shapes
            .into_iter()
            .map(|(name, rows, cols)| {
                let b = BlockInfo { name, rows, cols, offset };
                offset += rows * cols;
                b
            })
            .collect();
        Layout { blocks, total: offset }
    }

    pub const TOK_EMB: usize = 0;

    pub fn layer(&self, l: usize) -> LayerBlocks {
        let b = 1 + 9 * l;
        LayerBlocks {
            attn_norm: b,
            wq: b + 1,
            wk: b + 2,
            wv: b + 3,
            wo: b + 4,
            ffn_norm: b + 5,
            w_gate: b + 6,
            w_up: b + 7,
            w_down: b + 8,
        }
    }

    pub fn final_norm(&self) -> usize {
        self.blocks.len() - 2
    }

    pub fn out_proj(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.name == name)
    }

    pub fn is_norm(&self, i: usize) -> bool {
        self.blocks[i].name.ends_with("norm")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Params<T> {
    pub layout: Layout,
    pub data: Vec<T>,
}

impl<T: Scalar> Params<T> {
    pub fn zeros(layout: Layout) -> Self {
        let data = vec![T::zero(); layout.total];
        Params { layout, data }
    }

    /// Gains at 1; matrices from N(0, 0.02²), with the two projections that
    /// feed the residual stream further scaled by 1/√(2·layers).
    pub fn init(c: &ModelConfig, rng: &mut impl Rng) -> Self {
        let layout = Layout::for_config(c);
        let mut p = Self::zeros(layout);
        let normal = Normal::new(0.0, 0.02).unwrap();
        let residual = 1.0 / (2.0 * c.layers as f64).sqrt();
        for i in 0..p.layout.blocks.len() {
            let is_norm = p.layout.is_norm(i);
            let name = p.layout.blocks[i].name.clone();
            let scale = if name.ends_with(".wo") || name.ends_with(".w_down") { residual } else { 1.0 };
            for x in p.block_mut(i) {
                *x = if is_norm { T::one() } else { T::c(normal.sample(rng) * scale) };
            }
        }
        p
    }

    pub fn block(&self, i: usize) -> &[T] {
        &self.data[self.layout.blocks[i].range()]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut [T] {
        let r = self.layout.blocks[i].range();
        &mut self.data[r]
    }

    /// Three distinct blocks at once, in ascending order.
    pub fn three_mut(&mut self, a: usize, b: usize, c: usize) -> (&mut [T], &mut [T], &mut [T]) {
        let (ra, rb, rc) = (self.layout.blocks[a].range(), self.layout.blocks[b].range(), self.layout.blocks[c].range());
        assert!(ra.end <= rb.start && rb.end <= rc.start);
        let (head, rest) = self.data.split_at_mut(rb.start);
        let (mid, tail) = rest.split_at_mut(rc.start - rb.start);
        (&mut head[ra], &mut mid[..rb.len()], &mut tail[..rc.len()])
    }

    pub fn fill(&mut self, v: T) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    pub fn norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn cast<U: Scalar>(&self) -> Params<U> {
        Params { layout: self.layout.clone(), data: self.data.iter().map(|&x| U::c(x.f64())).collect() }
    }
}
