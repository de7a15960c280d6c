//! The hypergraph transformer: input projection, stacked two-phase
//! hypergraph attention layers with FFN/residual/LayerNorm, and a sentence
//! scoring head.
//!
//! Node matrices are `n × width` (one row per sentence). Edge-major
//! attention `α` is `m × n`, node-major attention `β` is `n × m`; both are
//! zero outside the incidence pattern.

use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{EdgeType, Hypergraph};
use crate::tensor::{Graph, Scalar, Tensor, Var};

/// Probabilities are clamped to `[BCE_EPS, 1 - BCE_EPS]` inside the loss.
pub const BCE_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub input_dim: usize,
    pub model_dim: usize,
    pub layers: usize,
    pub heads: usize,
    pub head_dim: usize,
    pub ffn_dim: usize,
    /// Width of the scoring head's hidden layer.
    pub hidden_dim: usize,
    pub dropout: f64,
    pub leaky_slope: f64,
    pub ln_eps: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            input_dim: 768,
            model_dim: 1024,
            layers: 2,
            heads: 8,
            head_dim: 128,
            ffn_dim: 4096,
            hidden_dim: 4096,
            dropout: 0.3,
            leaky_slope: 0.01,
            ln_eps: 1e-5,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("input_dim", self.input_dim),
            ("model_dim", self.model_dim),
            ("layers", self.layers),
            ("heads", self.heads),
            ("head_dim", self.head_dim),
            ("ffn_dim", self.ffn_dim),
            ("hidden_dim", self.hidden_dim),
        ];
        for (name, v) in dims {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.heads * self.head_dim != self.model_dim {
            return Err(Error::Config(format!(
                "heads × head_dim = {} but model_dim = {}",
                self.heads * self.head_dim,
                self.model_dim
            )));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!(
                "dropout {} outside [0, 1)",
                self.dropout
            )));
        }
        if !(self.leaky_slope >= 0.0 && self.ln_eps > 0.0) {
            return Err(Error::Config(
                "leaky_slope must be ≥ 0 and ln_eps > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadWeights<P> {
    /// `model_dim × head_dim`, shared by both attention phases.
    pub w_h: P,
    /// `head_dim × 1`.
    pub w_ah: P,
    /// `head_dim × head_dim`.
    pub w_e: P,
    /// `2·head_dim × 1`: edge half, then node half.
    pub w_ae: P,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerWeights<P> {
    pub heads: Vec<HeadWeights<P>>,
    pub w_o: P,
    pub ffn_w1: P,
    pub ffn_b1: P,
    pub ffn_w2: P,
    pub ffn_b2: P,
    pub ln1_gamma: P,
    pub ln1_beta: P,
    pub ln2_gamma: P,
    pub ln2_beta: P,
}

/// Every trainable weight, generic over storage (`Tensor<T>` for values,
/// [`Var`] once attached to a graph).
#[derive(Debug, Clone, PartialEq)]
pub struct Weights<P> {
    pub input_w: P,
    pub input_b: P,
    pub layers: Vec<LayerWeights<P>>,
    pub p1_w: P,
    pub p2_w: P,
}

impl<P> Weights<P> {
    pub fn map<Q>(&self, mut f: impl FnMut(&P) -> Q) -> Weights<Q> {
        Weights {
            input_w: f(&self.input_w),
            input_b: f(&self.input_b),
            layers: self
                .layers
                .iter()
                .map(|l| LayerWeights {
                    heads: l
                        .heads
                        .iter()
                        .map(|h| HeadWeights {
                            w_h: f(&h.w_h),
                            w_ah: f(&h.w_ah),
                            w_e: f(&h.w_e),
                            w_ae: f(&h.w_ae),
                        })
                        .collect(),
                    w_o: f(&l.w_o),
                    ffn_w1: f(&l.ffn_w1),
                    ffn_b1: f(&l.ffn_b1),
                    ffn_w2: f(&l.ffn_w2),
                    ffn_b2: f(&l.ffn_b2),
                    ln1_gamma: f(&l.ln1_gamma),
                    ln1_beta: f(&l.ln1_beta),
                    ln2_gamma: f(&l.ln2_gamma),
                    ln2_beta: f(&l.ln2_beta),
                })
                .collect(),
            p1_w: f(&self.p1_w),
            p2_w: f(&self.p2_w),
        }
    }

    /// Parameters with their dotted names, in canonical order.
    pub fn named(&self) -> Vec<(String, &P)> {
        let mut out = vec![
            ("input.w".into(), &self.input_w),
            ("input.b".into(), &self.input_b),
        ];
        for (li, l) in self.layers.iter().enumerate() {
            for (hi, h) in l.heads.iter().enumerate() {
                let p = format!("layers.{li}.heads.{hi}");
                out.push((format!("{p}.w_h"), &h.w_h));
                out.push((format!("{p}.w_ah"), &h.w_ah));
                out.push((format!("{p}.w_e"), &h.w_e));
                out.push((format!("{p}.w_ae"), &h.w_ae));
            }
            let p = format!("layers.{li}");
            out.push((format!("{p}.w_o"), &l.w_o));
            out.push((format!("{p}.ffn.w1"), &l.ffn_w1));
            out.push((format!("{p}.ffn.b1"), &l.ffn_b1));
            out.push((format!("{p}.ffn.w2"), &l.ffn_w2));
            out.push((format!("{p}.ffn.b2"), &l.ffn_b2));
            out.push((format!("{p}.ln1.gamma"), &l.ln1_gamma));
            out.push((format!("{p}.ln1.beta"), &l.ln1_beta));
            out.push((format!("{p}.ln2.gamma"), &l.ln2_gamma));
            out.push((format!("{p}.ln2.beta"), &l.ln2_beta));
        }
        out.push(("head.p1.w".into(), &self.p1_w));
        out.push(("head.p2.w".into(), &self.p2_w));
        out
    }

    /// Same order as [`Self::named`].
    pub fn values_mut(&mut self) -> Vec<&mut P> {
        let mut out = vec![&mut self.input_w, &mut self.input_b];
        for l in &mut self.layers {
            for h in &mut l.heads {
                out.extend([&mut h.w_h, &mut h.w_ah, &mut h.w_e, &mut h.w_ae]);
            }
            out.extend([
                &mut l.w_o,
                &mut l.ffn_w1,
                &mut l.ffn_b1,
                &mut l.ffn_w2,
                &mut l.ffn_b2,
                &mut l.ln1_gamma,
                &mut l.ln1_beta,
                &mut l.ln2_gamma,
                &mut l.ln2_beta,
            ]);
        }
        out.extend([&mut self.p1_w, &mut self.p2_w]);
        out
    }
}

#[derive(Debug, Clone, Copy)]
enum Init {
    Matrix,
    Zero,
    One,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    pub config: ModelConfig,
    pub weights: Weights<Tensor<T>>,
}

impl<T: Scalar> ModelParams<T> {
    /// Glorot-uniform matrices, zero biases, unit LayerNorm gains.
    pub fn init(config: ModelConfig, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::build(config, |kind, r, c| match kind {
            Init::Matrix => Tensor::glorot(r, c, &mut rng),
            Init::Zero => Tensor::zeros(r, c),
            Init::One => Tensor::filled(r, c, T::one()),
        })
    }

    /// Correctly shaped all-zero parameters (a target for loading).
    pub fn zeros(config: ModelConfig) -> Result<Self> {
        Self::build(config, |_, r, c| Tensor::zeros(r, c))
    }

    fn build(
        config: ModelConfig,
        mut make: impl FnMut(Init, usize, usize) -> Tensor<T>,
    ) -> Result<Self> {
        config.validate()?;
        let c = &config;
        let input_w = make(Init::Matrix, c.input_dim, c.model_dim);
        let input_b = make(Init::Zero, 1, c.model_dim);
        let mut layers = Vec::with_capacity(c.layers);
        for _ in 0..c.layers {
            let heads = (0..c.heads)
                .map(|_| HeadWeights {
                    w_h: make(Init::Matrix, c.model_dim, c.head_dim),
                    w_ah: make(Init::Matrix, c.head_dim, 1),
                    w_e: make(Init::Matrix, c.head_dim, c.head_dim),
                    w_ae: make(Init::Matrix, 2 * c.head_dim, 1),
                })
                .collect();
            layers.push(LayerWeights {
                heads,
                w_o: make(Init::Matrix, c.model_dim, c.model_dim),
                ffn_w1: make(Init::Matrix, c.model_dim, c.ffn_dim),
                ffn_b1: make(Init::Zero, 1, c.ffn_dim),
                ffn_w2: make(Init::Matrix, c.ffn_dim, c.model_dim),
                ffn_b2: make(Init::Zero, 1, c.model_dim),
                ln1_gamma: make(Init::One, 1, c.model_dim),
                ln1_beta: make(Init::Zero, 1, c.model_dim),
                ln2_gamma: make(Init::One, 1, c.model_dim),
                ln2_beta: make(Init::Zero, 1, c.model_dim),
            });
        }
        let p1_w = make(Init::Matrix, c.model_dim, c.hidden_dim);
        let p2_w = make(Init::Matrix, c.hidden_dim, 1);
        Ok(ModelParams {
            config,
            weights: Weights {
                input_w,
                input_b,
                layers,
                p1_w,
                p2_w,
            },
        })
    }

    /// Expected shapes in canonical order.
    pub fn shapes(config: &ModelConfig) -> Result<Vec<(String, (usize, usize))>> {
        let template = ModelParams::<T>::zeros(*config)?;
        Ok(template
            .weights
            .named()
            .into_iter()
            .map(|(n, t)| (n, t.shape()))
            .collect())
    }

    pub fn cast<U: Scalar>(&self) -> ModelParams<U> {
        ModelParams {
            config: self.config,
            weights: self.weights.map(Tensor::cast),
        }
    }

    pub fn n_params(&self) -> usize {
        self.weights.named().iter().map(|(_, t)| t.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.named().iter().all(|(_, t)| t.is_finite())
    }

    /// Puts every weight on `g`, trainable or frozen.
    pub fn attach(&self, g: &mut Graph<T>, trainable: bool) -> Weights<Var> {
        self.weights.map(|t| {
            if trainable {
                g.param(t.clone())
            } else {
                g.constant(t.clone())
            }
        })
    }

    /// Eval-mode scores for one document.
    pub fn score(
        &self,
        inputs: &Tensor<T>,
        graph: &Hypergraph,
    ) -> Result<(Vec<T>, ForwardTrace<T>)> {
        let topo = Topology::new(graph)?;
        let mut g = Graph::new();
        let w = self.attach(&mut g, false);
        let x = g.constant(inputs.clone());
        let out = forward(&mut g, &w, &self.config, x, &topo, None)?;
        Ok((g.value(out.scores).data().to_vec(), out.trace))
    }
}

/// Incidence masks in both orientations, checked once per document.
#[derive(Debug, Clone)]
pub struct Topology {
    n: usize,
    m: usize,
    /// `m × n`.
    edge_mask: Rc<[bool]>,
    /// `n × m`.
    node_mask: Rc<[bool]>,
}

impl Topology {
    pub fn new(graph: &Hypergraph) -> Result<Self> {
        let (n, m) = (graph.n(), graph.m());
        if let Some(j) = (0..m).find(|&j| graph.members(j).is_empty()) {
            return Err(Error::Graph(format!("hyperedge {j} has no members")));
        }
        if let Some(i) = (0..n).find(|&i| graph.incident_edges(i).is_empty()) {
            return Err(Error::Graph(format!("node {i} has no incident hyperedge")));
        }
        Ok(Topology {
            n,
            m,
            edge_mask: graph.edge_mask().into(),
            node_mask: graph.node_mask().into(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EdgeUpdate {
    /// `H W_h`, `n × head_dim`.
    pub projected: Var,
    /// `m × n`.
    pub alpha: Var,
    /// `m × head_dim`.
    pub edges: Var,
}

#[derive(Debug, Clone, Copy)]
pub struct NodeUpdate {
    /// `n × m`.
    pub beta: Var,
    /// `n × head_dim`.
    pub nodes: Var,
}

/// Nodes → hyperedges: `g_j = LReLU(Σ_k α_jk W_h h_k)` with `α` a softmax of
/// `w_ahᵀ LReLU(W_h h_k)` over the members of edge `j`.
pub fn hga_edge_update<T: Scalar>(
    g: &mut Graph<T>,
    head: &HeadWeights<Var>,
    h: Var,
    topo: &Topology,
    slope: T,
) -> Result<EdgeUpdate> {
    let projected = g.matmul(h, head.w_h)?;
    let u = g.leaky_relu(projected, slope);
    let s = g.matmul(u, head.w_ah)?;
    let s_row = g.transpose(s);
    let scores = g.broadcast_rows(s_row, topo.m)?;
    let alpha = g.masked_softmax(scores, topo.edge_mask.clone())?;
    let agg = g.matmul(alpha, projected)?;
    let edges = g.leaky_relu(agg, slope);
    Ok(EdgeUpdate {
        projected,
        alpha,
        edges,
    })
}

/// Hyperedges → nodes: `h_i = LReLU(Σ_k β_ki W_e g_k)` with `β` a softmax over
/// the edges incident to node `i` of `w_aeᵀ LReLU([W_e g_k ‖ W_h h_i])`.
///
/// LeakyReLU acts elementwise, so the score splits into an edge term plus a
/// node term and is assembled from two small products instead of an
/// `n·m × 2·head_dim` concatenation.
pub fn hga_node_update<T: Scalar>(
    g: &mut Graph<T>,
    head: &HeadWeights<Var>,
    edge: &EdgeUpdate,
    topo: &Topology,
    slope: T,
) -> Result<NodeUpdate> {
    let dh = g.shape(head.w_e).1;
    let e = g.matmul(edge.edges, head.w_e)?;
    let w_edge = g.slice_rows(head.w_ae, 0, dh)?;
    let w_node = g.slice_rows(head.w_ae, dh, dh)?;
    let e_act = g.leaky_relu(e, slope);
    let edge_term = g.matmul(e_act, w_edge)?;
    let p_act = g.leaky_relu(edge.projected, slope);
    let node_term = g.matmul(p_act, w_node)?;
    let edge_row = g.transpose(edge_term);
    let a = g.broadcast_rows(edge_row, topo.n)?;
    let b = g.broadcast_cols(node_term, topo.m)?;
    let scores = g.add(a, b)?;
    let beta = g.masked_softmax(scores, topo.node_mask.clone())?;
    let agg = g.matmul(beta, e)?;
    let nodes = g.leaky_relu(agg, slope);
    Ok(NodeUpdate { beta, nodes })
}

#[derive(Debug, Clone, Copy)]
pub struct HeadOutput {
    pub alpha: Var,
    pub beta: Var,
    pub out: Var,
}

pub fn hga<T: Scalar>(
    g: &mut Graph<T>,
    head: &HeadWeights<Var>,
    h: Var,
    topo: &Topology,
    slope: T,
) -> Result<HeadOutput> {
    let edge = hga_edge_update(g, head, h, topo, slope)?;
    let node = hga_node_update(g, head, &edge, topo, slope)?;
    Ok(HeadOutput {
        alpha: edge.alpha,
        beta: node.beta,
        out: node.nodes,
    })
}

/// `LReLU(concat(heads) W_O)`.
pub fn mh_hga<T: Scalar>(
    g: &mut Graph<T>,
    layer: &LayerWeights<Var>,
    h: Var,
    topo: &Topology,
    slope: T,
) -> Result<(Var, Vec<HeadOutput>)> {
    let heads = layer
        .heads
        .iter()
        .map(|hw| hga(g, hw, h, topo, slope))
        .collect::<Result<Vec<_>>>()?;
    let outs: Vec<Var> = heads.iter().map(|o| o.out).collect();
    let cat = if outs.len() == 1 {
        outs[0]
    } else {
        g.concat_cols(&outs)?
    };
    let proj = g.matmul(cat, layer.w_o)?;
    Ok((g.leaky_relu(proj, slope), heads))
}

fn layer_norm_affine<T: Scalar>(
    g: &mut Graph<T>,
    x: Var,
    gamma: Var,
    beta: Var,
    eps: T,
) -> Result<Var> {
    let n = g.layer_norm(x, eps);
    let s = g.mul_row(n, gamma)?;
    g.add_row(s, beta)
}

fn maybe_dropout<'r, T: Scalar>(
    g: &mut Graph<T>,
    x: Var,
    rate: f64,
    rng: &mut Option<&mut (dyn RngCore + 'r)>,
) -> Var {
    match rng {
        Some(r) => g.dropout(x, rate, *r),
        None => x,
    }
}

/// `H' = LN(MH-HGA(H) + H)`, `H_out = LN(FFN(H') + H')`. Dropout hits both
/// sub-block outputs when `rng` is given (training mode).
pub fn transformer_layer<'r, T: Scalar>(
    g: &mut Graph<T>,
    layer: &LayerWeights<Var>,
    h: Var,
    topo: &Topology,
    cfg: &ModelConfig,
    mut rng: Option<&mut (dyn RngCore + 'r)>,
) -> Result<(Var, Vec<HeadOutput>)> {
    let slope = T::from_f64(cfg.leaky_slope);
    let eps = T::from_f64(cfg.ln_eps);
    let (att, heads) = mh_hga(g, layer, h, topo, slope)?;
    let att = maybe_dropout(g, att, cfg.dropout, &mut rng);
    let res = g.add(att, h)?;
    let h1 = layer_norm_affine(g, res, layer.ln1_gamma, layer.ln1_beta, eps)?;

    let f = g.matmul(h1, layer.ffn_w1)?;
    let f = g.add_row(f, layer.ffn_b1)?;
    let f = g.leaky_relu(f, slope);
    let f = g.matmul(f, layer.ffn_w2)?;
    let f = g.add_row(f, layer.ffn_b2)?;
    let f = maybe_dropout(g, f, cfg.dropout, &mut rng);
    let res = g.add(f, h1)?;
    let out = layer_norm_affine(g, res, layer.ln2_gamma, layer.ln2_beta, eps)?;
    Ok((out, heads))
}

/// `ŷ = sigmoid(LReLU(H W_p1) W_p2)`, one probability per row.
pub fn predict_scores<T: Scalar>(
    g: &mut Graph<T>,
    w: &Weights<Var>,
    h: Var,
    slope: T,
) -> Result<Var> {
    let z = g.matmul(h, w.p1_w)?;
    let z = g.leaky_relu(z, slope);
    let logits = g.matmul(z, w.p2_w)?;
    Ok(g.sigmoid(logits))
}

pub fn bce_loss<T: Scalar>(g: &mut Graph<T>, scores: Var, labels: &[u8]) -> Result<Var> {
    if let Some(&bad) = labels.iter().find(|&&y| y > 1) {
        return Err(Error::Config(format!("label {bad} is not 0 or 1")));
    }
    let y: Vec<T> = labels.iter().map(|&y| T::from_f64(y as f64)).collect();
    g.bce_mean(scores, &y, T::from_f64(BCE_EPS))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadAttention<T> {
    /// `m × n`, rows sum to 1 over each edge's members.
    pub alpha: Tensor<T>,
    /// `n × m`, rows sum to 1 over each node's incident edges.
    pub beta: Tensor<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace<T> {
    /// Indexed `[layer][head]`.
    pub layers: Vec<Vec<HeadAttention<T>>>,
    pub scores: Vec<T>,
}

#[derive(Debug, Clone, Copy)]
pub struct Forward {
    pub hidden: Var,
    /// `n × 1` probabilities.
    pub scores: Var,
}

/// Full forward pass from node inputs (`n × input_dim`, positions already
/// added). Passing `rng` switches on dropout.
pub fn forward_vars<'r, T: Scalar>(
    g: &mut Graph<T>,
    w: &Weights<Var>,
    cfg: &ModelConfig,
    inputs: Var,
    topo: &Topology,
    mut rng: Option<&mut (dyn RngCore + 'r)>,
) -> Result<(Forward, Vec<Vec<HeadOutput>>)> {
    let (n, d) = g.shape(inputs);
    if n != topo.n {
        return Err(Error::shape("forward", topo.n, n));
    }
    if d != cfg.input_dim {
        return Err(Error::shape("forward input width", cfg.input_dim, d));
    }
    let slope = T::from_f64(cfg.leaky_slope);
    let h = g.matmul(inputs, w.input_w)?;
    let mut h = g.add_row(h, w.input_b)?;
    let mut heads = Vec::with_capacity(w.layers.len());
    for layer in &w.layers {
        let (out, hs) = transformer_layer(g, layer, h, topo, cfg, rng.as_deref_mut())?;
        h = out;
        heads.push(hs);
    }
    let scores = predict_scores(g, w, h, slope)?;
    Ok((Forward { hidden: h, scores }, heads))
}

#[derive(Debug, Clone)]
pub struct ForwardOutput<T> {
    pub scores: Var,
    pub trace: ForwardTrace<T>,
}

/// [`forward_vars`] plus a copy of every attention matrix.
pub fn forward<'r, T: Scalar>(
    g: &mut Graph<T>,
    w: &Weights<Var>,
    cfg: &ModelConfig,
    inputs: Var,
    topo: &Topology,
    rng: Option<&mut (dyn RngCore + 'r)>,
) -> Result<ForwardOutput<T>> {
    let (f, heads) = forward_vars(g, w, cfg, inputs, topo, rng)?;
    let layers = heads
        .iter()
        .map(|hs| {
            hs.iter()
                .map(|o| HeadAttention {
                    alpha: g.value(o.alpha).clone(),
                    beta: g.value(o.beta).clone(),
                })
                .collect()
        })
        .collect();
    Ok(ForwardOutput {
        scores: f.scores,
        trace: ForwardTrace {
            layers,
            scores: g.value(f.scores).data().to_vec(),
        },
    })
}

/// Mean β mass per edge type over the chosen nodes, all layers and heads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttentionShares {
    pub section: f64,
    pub topic: f64,
    pub keyword: f64,
    pub nodes: usize,
}

impl AttentionShares {
    pub fn get(&self, ty: EdgeType) -> f64 {
        match ty {
            EdgeType::Section => self.section,
            EdgeType::Topic => self.topic,
            EdgeType::Keyword => self.keyword,
        }
    }

    pub fn total(&self) -> f64 {
        self.section + self.topic + self.keyword
    }
}

/// Shares over `nodes`; an empty slice means every node.
pub fn attention_stats<T: Scalar>(
    trace: &ForwardTrace<T>,
    edge_types: &[EdgeType],
    nodes: &[usize],
) -> Result<AttentionShares> {
    let mut mass = [0.0f64; 3];
    let mut count = 0usize;
    let mut n_nodes = 0;
    for layer in &trace.layers {
        for head in layer {
            let (n, m) = head.beta.shape();
            if m != edge_types.len() {
                return Err(Error::shape("attention_stats", m, edge_types.len()));
            }
            let all: Vec<usize>;
            let chosen = if nodes.is_empty() {
                all = (0..n).collect();
                &all[..]
            } else {
                nodes
            };
            if let Some(&bad) = chosen.iter().find(|&&i| i >= n) {
                return Err(Error::shape("attention_stats node", n, bad));
            }
            n_nodes = chosen.len();
            for &i in chosen {
                for (j, &b) in head.beta.row(i).iter().enumerate() {
                    mass[edge_types[j].index()] += b.to_f64();
                }
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::Empty("attention trace"));
    }
    let c = count as f64;
    Ok(AttentionShares {
        section: mass[EdgeType::Section.index()] / c,
        topic: mass[EdgeType::Topic.index()] / c,
        keyword: mass[EdgeType::Keyword.index()] / c,
        nodes: n_nodes,
    })
}
