//! Weighted belief propagation for second-order codes `C^⊗[2,m]`.
//!
//! The factor graph has four node kinds:
//!
//! * variable nodes, one per code bit;
//! * degree-3 check nodes joining two code bits that differ only in one digit
//!   (position `p`, values `u < ũ`) with a hidden node carrying their sum;
//! * hidden nodes, the bits of the projected word, which only forward messages;
//! * generalized check nodes: one per projection `(p, u, ũ)` enforcing
//!   membership in `C^⊗[1,m-1]` through the max-log-MAP decoder, and, when
//!   the base code is not the full space, one per axis-parallel line enforcing
//!   membership in the base code.
//!
//! Hidden node `h` is identified with check node `h`, so the two share ids.

use crate::construction::SubproductCode;
use crate::error::{Error, Result};
use crate::fo_decoder::{max_log_map_exhaustive, FirstOrderDecoder};
use crate::gf2::{BitMatrix, BitVector};
use crate::projection::{enumerate_projections, puncture_set, ProjectionSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BoxplusMode {
    /// `2 atanh(tanh(a/2) tanh(b/2))` in its stable sign-magnitude form.
    #[default]
    Exact,
    /// `sign(a) sign(b) min(|a|, |b|)`.
    MinSum,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BpConfig {
    /// Weight on messages from degree-3 check nodes.
    pub gamma: f64,
    /// Weight on messages from base-code check nodes.
    pub gamma_g: f64,
    pub max_iterations: usize,
    pub llr_clamp: f64,
    pub boxplus: BoxplusMode,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig {
            gamma: 0.12,
            gamma_g: 0.25,
            max_iterations: 5,
            llr_clamp: 30.0,
            boxplus: BoxplusMode::Exact,
        }
    }
}

impl BpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma_g > 0.0) {
            return Err(Error::Config("gamma and gamma_g must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("tmax must be at least 1".into()));
        }
        if !(self.llr_clamp > 0.0) {
            return Err(Error::Config("llr clamp must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BpResult {
    pub hard_decision: BitVector,
    pub is_codeword: bool,
    pub iterations_used: usize,
    pub final_app: Vec<f64>,
}

/// `2 atanh(tanh(a/2) tanh(b/2))`, saturated to `±clamp`.
pub fn boxplus(a: f64, b: f64, clamp: f64) -> f64 {
    let (x, y) = (a.abs(), b.abs());
    let mag = x.min(y) + (-(x + y)).exp().ln_1p() - (-(x - y).abs()).exp().ln_1p();
    (a.signum() * b.signum() * mag).clamp(-clamp, clamp)
}

pub fn boxplus_min_sum(a: f64, b: f64, clamp: f64) -> f64 {
    (a.signum() * b.signum() * a.abs().min(b.abs())).clamp(-clamp, clamp)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckNode {
    /// The two code bits, with digit `u` and digit `ũ` respectively.
    pub vars: [usize; 2],
    /// Index of the first-order generalized node this check's hidden node feeds.
    pub projection: usize,
    /// Position `i'` of the hidden node inside that projection.
    pub slot: usize,
}

#[derive(Clone, Debug)]
pub struct FactorGraph {
    n: usize,
    m: usize,
    len: usize,
    checks: Vec<CheckNode>,
    projections: Vec<ProjectionSpec>,
    /// Check (= hidden node) ids attached to each first-order node, by slot.
    projection_members: Vec<Vec<usize>>,
    /// Code bits of each base-code node, in base-code coordinate order.
    local_nodes: Vec<Vec<usize>>,
    /// `(check id, side)` per code bit.
    var_checks: Vec<Vec<(usize, usize)>>,
    /// `(local node id, position)` per code bit.
    var_locals: Vec<Vec<(usize, usize)>>,
}

impl FactorGraph {
    pub fn build(code: &SubproductCode) -> Result<Self> {
        let (n, m, k) = (code.base().n(), code.factors(), code.base().k());
        if code.order() != 2 {
            return Err(Error::InvalidOrder {
                r: code.order(),
                m,
            });
        }
        let len = code.len();
        let projections = enumerate_projections(code, 1)?;
        let per = len / n;
        let mut checks = Vec::with_capacity(projections.len() * per);
        let mut projection_members = Vec::with_capacity(projections.len());
        let mut var_checks = vec![Vec::new(); len];
        for (s, spec) in projections.iter().enumerate() {
            let mut members = Vec::with_capacity(per);
            for (slot, (a, b)) in spec.pairs().into_iter().enumerate() {
                let id = checks.len();
                checks.push(CheckNode {
                    vars: [a, b],
                    projection: s,
                    slot,
                });
                var_checks[a].push((id, 0));
                var_checks[b].push((id, 1));
                members.push(id);
            }
            projection_members.push(members);
        }

        let mut local_nodes = Vec::new();
        let mut var_locals = vec![Vec::new(); len];
        if k < n {
            for axis in 0..m {
                let frozen: Vec<usize> = (0..m).filter(|&p| p != axis).collect();
                for value in 0..per {
                    let u = crate::projection::to_tuple(value, n, m - 1)?;
                    let line = puncture_set(n, m, &frozen, &u)?;
                    let id = local_nodes.len();
                    for (pos, &v) in line.iter().enumerate() {
                        var_locals[v].push((id, pos));
                    }
                    local_nodes.push(line);
                }
            }
        }
        Ok(FactorGraph {
            n,
            m,
            len,
            checks,
            projections,
            projection_members,
            local_nodes,
            var_checks,
            var_locals,
        })
    }

    /// Base code length `n`.
    pub fn base_len(&self) -> usize {
        self.n
    }

    pub fn num_variables(&self) -> usize {
        self.len
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn num_hidden(&self) -> usize {
        self.checks.len()
    }

    pub fn num_first_order_nodes(&self) -> usize {
        self.projections.len()
    }

    pub fn num_local_nodes(&self) -> usize {
        self.local_nodes.len()
    }

    pub fn num_generalized(&self) -> usize {
        self.projections.len() + self.local_nodes.len()
    }

    pub fn checks(&self) -> &[CheckNode] {
        &self.checks
    }

    pub fn projections(&self) -> &[ProjectionSpec] {
        &self.projections
    }

    pub fn projection_members(&self, s: usize) -> &[usize] {
        &self.projection_members[s]
    }

    pub fn local_node(&self, g: usize) -> &[usize] {
        &self.local_nodes[g]
    }

    /// Degree of code bit `v` (degree-3 checks plus base-code nodes).
    pub fn variable_degree(&self, v: usize) -> usize {
        self.var_checks[v].len() + self.var_locals[v].len()
    }

    /// Edges seen from the check side that end in a code bit.
    pub fn check_side_variable_edges(&self) -> usize {
        2 * self.checks.len() + self.local_nodes.iter().map(Vec::len).sum::<usize>()
    }
}

/// Reusable decoder bound to one code.
#[derive(Clone, Debug)]
pub struct BpDecoder {
    graph: FactorGraph,
    first_order: FirstOrderDecoder,
    base_codewords: Vec<BitVector>,
    parity_check: BitMatrix,
}

/// Messages of one decode call.
struct Messages {
    chk_to_var: Vec<[f64; 2]>,
    loc_to_var: Vec<Vec<f64>>,
    var_to_chk: Vec<[f64; 2]>,
    var_to_loc: Vec<Vec<f64>>,
    chk_to_hid: Vec<f64>,
    hid_to_chk: Vec<f64>,
}

impl BpDecoder {
    pub fn new(code: &SubproductCode) -> Result<Self> {
        let graph = FactorGraph::build(code)?;
        Ok(BpDecoder {
            graph,
            first_order: FirstOrderDecoder::new(code.base()),
            base_codewords: code.base().codewords(),
            parity_check: code.parity_check().clone(),
        })
    }

    pub fn graph(&self) -> &FactorGraph {
        &self.graph
    }

    fn new_messages(&self) -> Messages {
        let g = &self.graph;
        let nc = g.checks.len();
        Messages {
            chk_to_var: vec![[0.0; 2]; nc],
            loc_to_var: g.local_nodes.iter().map(|l| vec![0.0; l.len()]).collect(),
            var_to_chk: vec![[0.0; 2]; nc],
            var_to_loc: g.local_nodes.iter().map(|l| vec![0.0; l.len()]).collect(),
            chk_to_hid: vec![0.0; nc],
            hid_to_chk: vec![0.0; nc],
        }
    }

    /// Sums of incoming degree-3 and base-code messages per code bit.
    fn incoming_sums(&self, msg: &Messages) -> (Vec<f64>, Vec<f64>) {
        let g = &self.graph;
        let sum_c = g
            .var_checks
            .iter()
            .map(|edges| edges.iter().map(|&(c, side)| msg.chk_to_var[c][side]).sum())
            .collect();
        let sum_g = g
            .var_locals
            .iter()
            .map(|edges| edges.iter().map(|&(l, pos)| msg.loc_to_var[l][pos]).sum())
            .collect();
        (sum_c, sum_g)
    }

    /// Step 1: code bits to all their check nodes.
    fn variable_step(&self, llr: &[f64], cfg: &BpConfig, msg: &mut Messages) {
        let g = &self.graph;
        let (sum_c, sum_g) = self.incoming_sums(msg);
        let clamp = cfg.llr_clamp;
        for v in 0..g.len {
            for &(c, side) in &g.var_checks[v] {
                let out = llr[v]
                    + cfg.gamma * (sum_c[v] - msg.chk_to_var[c][side])
                    + cfg.gamma_g * sum_g[v];
                msg.var_to_chk[c][side] = out.clamp(-clamp, clamp);
            }
            for &(l, pos) in &g.var_locals[v] {
                let out = llr[v]
                    + cfg.gamma * sum_c[v]
                    + cfg.gamma_g * (sum_g[v] - msg.loc_to_var[l][pos]);
                msg.var_to_loc[l][pos] = out.clamp(-clamp, clamp);
            }
        }
    }

    fn combine(a: f64, b: f64, cfg: &BpConfig) -> f64 {
        match cfg.boxplus {
            BoxplusMode::Exact => boxplus(a, b, cfg.llr_clamp),
            BoxplusMode::MinSum => boxplus_min_sum(a, b, cfg.llr_clamp),
        }
    }

    /// Steps 2 to 6 of one iteration.
    fn check_steps(&self, cfg: &BpConfig, msg: &mut Messages) -> Result<()> {
        let g = &self.graph;
        let clamp = cfg.llr_clamp;
        for (c, out) in msg.chk_to_hid.iter_mut().enumerate() {
            let [a, b] = msg.var_to_chk[c];
            *out = Self::combine(a, b, cfg);
        }
        for members in &g.projection_members {
            let input: Vec<f64> = members.iter().map(|&c| msg.chk_to_hid[c]).collect();
            let app = self.first_order.max_log_map(g.m - 1, &input)?;
            for ((&c, a), x) in members.iter().zip(app).zip(&input) {
                msg.hid_to_chk[c] = (a.clamp(-clamp, clamp) - x).clamp(-clamp, clamp);
            }
        }
        for (l, input) in msg.var_to_loc.iter().enumerate() {
            let app = max_log_map_exhaustive(&self.base_codewords, input);
            for (pos, (a, x)) in app.into_iter().zip(input).enumerate() {
                msg.loc_to_var[l][pos] = (a.clamp(-clamp, clamp) - x).clamp(-clamp, clamp);
            }
        }
        for (c, out) in msg.chk_to_var.iter_mut().enumerate() {
            let [a, b] = msg.var_to_chk[c];
            let h = msg.hid_to_chk[c];
            *out = [Self::combine(b, h, cfg), Self::combine(a, h, cfg)];
        }
        Ok(())
    }

    fn app(&self, llr: &[f64], cfg: &BpConfig, msg: &Messages) -> Vec<f64> {
        let (sum_c, sum_g) = self.incoming_sums(msg);
        llr.iter()
            .zip(sum_c.iter().zip(&sum_g))
            .map(|(l, (c, g))| (l + cfg.gamma * c + cfg.gamma_g * g).clamp(-cfg.llr_clamp, cfg.llr_clamp))
            .collect()
    }

    pub fn decode(&self, llr: &[f64], cfg: &BpConfig) -> Result<BpResult> {
        if llr.len() != self.graph.len {
            return Err(Error::DimensionMismatch {
                expected: self.graph.len,
                found: llr.len(),
            });
        }
        cfg.validate()?;
        let mut msg = self.new_messages();
        let mut result = None;
        for t in 1..=cfg.max_iterations {
            self.variable_step(llr, cfg, &mut msg);
            self.check_steps(cfg, &mut msg)?;
            let app = self.app(llr, cfg, &msg);
            let hard = BitVector::from_bools(&app.iter().map(|&x| x < 0.0).collect::<Vec<_>>());
            let is_codeword = self.parity_check.annihilates(&hard);
            result = Some(BpResult {
                hard_decision: hard,
                is_codeword,
                iterations_used: t,
                final_app: app,
            });
            if is_codeword {
                break;
            }
        }
        Ok(result.expect("at least one iteration"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{binomial, dual_berman_code, hamming_code, rm_code, BaseCode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn boxplus_examples() {
        assert_eq!(boxplus(3.7, 0.0, 30.0), 0.0);
        assert!((boxplus(30.0, 1.3, 30.0) - 1.3).abs() < 1e-9);
        let oracle = 2.0 * ((1.0f64).tanh() * (1.5f64).tanh()).atanh();
        assert!((boxplus(2.0, 3.0, 30.0) - oracle).abs() < 1e-12);
        assert!((boxplus(2.0, 3.0, 30.0) - 1.6935).abs() < 1e-4);
        assert_eq!(boxplus(-2.0, 3.0, 30.0), -boxplus(2.0, 3.0, 30.0));
        assert_eq!(boxplus_min_sum(-2.0, 3.0, 30.0), -2.0);
        assert_eq!(boxplus(1e3, 1e3, 30.0), 30.0);
    }

    #[test]
    fn graph_counts_db_3_2_5() {
        let code = dual_berman_code(3, 2, 5).unwrap();
        let g = FactorGraph::build(&code).unwrap();
        assert_eq!(g.num_variables(), 243);
        assert_eq!(g.num_checks(), 1215);
        assert_eq!(g.num_hidden(), 1215);
        assert_eq!(g.num_generalized(), 15);
        assert_eq!(g.num_local_nodes(), 0);
    }

    #[test]
    fn graph_counts_hamming_2_3() {
        let code = hamming_code(2, 3).unwrap();
        let g = FactorGraph::build(&code).unwrap();
        assert_eq!(g.num_variables(), 343);
        assert_eq!(g.num_checks(), 3087);
        assert_eq!(g.num_first_order_nodes(), 63);
        assert_eq!(g.num_local_nodes(), 147);
        assert_eq!(g.num_generalized(), 210);
    }

    #[test]
    fn graph_counts_match_closed_forms() {
        let bases = [
            BaseCode::full_space(2).unwrap(),
            BaseCode::full_space(3).unwrap(),
            BaseCode::full_space(4).unwrap(),
            BaseCode::hamming_7_4(),
        ];
        for base in bases {
            for m in 2..=4usize {
                let (n, k) = (base.n(), base.k());
                if n.pow(m as u32) > 2401 {
                    continue;
                }
                let code = SubproductCode::build(base.clone(), 2, m).unwrap();
                let g = FactorGraph::build(&code).unwrap();
                let per = n.pow(m as u32 - 1);
                assert_eq!(g.num_checks(), m * binomial(n, 2) * per);
                assert_eq!(g.num_first_order_nodes(), m * binomial(n, 2));
                let locals = if k < n { m * per } else { 0 };
                assert_eq!(g.num_local_nodes(), locals);
                let var_side: usize = (0..g.num_variables()).map(|v| g.variable_degree(v)).sum();
                assert_eq!(var_side, g.check_side_variable_edges());
                for members in (0..g.num_first_order_nodes()).map(|s| g.projection_members(s)) {
                    assert_eq!(members.len(), per);
                }
                for l in 0..g.num_local_nodes() {
                    assert_eq!(g.local_node(l).len(), n);
                }
                let expected_degree = m * (n - 1) + if k < n { m } else { 0 };
                assert!((0..g.num_variables()).all(|v| g.variable_degree(v) == expected_degree));
            }
        }
    }

    #[test]
    fn graph_requires_order_two() {
        assert!(matches!(
            FactorGraph::build(&rm_code(1, 3).unwrap()),
            Err(Error::InvalidOrder { r: 1, m: 3 })
        ));
    }

    #[test]
    fn checks_join_projection_pairs() {
        let code = dual_berman_code(3, 2, 3).unwrap();
        let g = FactorGraph::build(&code).unwrap();
        for (s, spec) in g.projections().iter().enumerate() {
            let pairs = spec.pairs();
            for (slot, &c) in g.projection_members(s).iter().enumerate() {
                let node = g.checks()[c];
                assert_eq!(node.slot, slot);
                assert_eq!(node.projection, s);
                assert_eq!((node.vars[0], node.vars[1]), pairs[slot]);
            }
        }
    }

    fn random_codeword(code: &SubproductCode, rng: &mut ChaCha8Rng) -> BitVector {
        let msg = BitVector::from_bools(&(0..code.dim()).map(|_| rng.random()).collect::<Vec<_>>());
        code.encode(&msg).unwrap()
    }

    #[test]
    fn noiseless_input_converges_immediately() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for code in [dual_berman_code(3, 2, 4).unwrap(), hamming_code(2, 2).unwrap()] {
            let dec = BpDecoder::new(&code).unwrap();
            let c = random_codeword(&code, &mut rng);
            let llr: Vec<f64> = c.bipolar().iter().map(|s| 50.0 * s).collect();
            let r = dec.decode(&llr, &BpConfig::default()).unwrap();
            assert!(r.is_codeword);
            assert_eq!(r.iterations_used, 1);
            assert_eq!(r.hard_decision, c);
        }
    }

    #[test]
    fn zero_input_is_deterministic() {
        let code = dual_berman_code(3, 2, 3).unwrap();
        let dec = BpDecoder::new(&code).unwrap();
        let cfg = BpConfig {
            max_iterations: 4,
            ..BpConfig::default()
        };
        let a = dec.decode(&[0.0; 27], &cfg).unwrap();
        let b = dec.decode(&[0.0; 27], &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.final_app.iter().all(|&x| x == 0.0));
        assert!(dec.decode(&[0.0; 26], &cfg).is_err());
    }

    #[test]
    fn negated_channel_negates_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let code = hamming_code(2, 2).unwrap();
        let dec = BpDecoder::new(&code).unwrap();
        let cfg = BpConfig {
            gamma: 0.2,
            gamma_g: 0.3,
            max_iterations: 3,
            ..BpConfig::default()
        };
        for _ in 0..20 {
            let llr: Vec<f64> = (0..49).map(|_| rng.random_range(-4.0..4.0)).collect();
            let neg: Vec<f64> = llr.iter().map(|x| -x).collect();
            let a = dec.decode(&llr, &cfg).unwrap();
            let b = dec.decode(&neg, &cfg).unwrap();
            assert_eq!(a.iterations_used, b.iterations_used);
            for (x, y) in a.final_app.iter().zip(&b.final_app) {
                assert_eq!(*x, -*y);
            }
            if a.final_app.iter().all(|&x| x != 0.0) {
                assert_eq!(a.hard_decision.not(), b.hard_decision);
            }
        }
    }

    #[test]
    fn first_variable_messages_equal_channel_llrs() {
        let code = hamming_code(2, 2).unwrap();
        let dec = BpDecoder::new(&code).unwrap();
        let llr: Vec<f64> = (0..49).map(|i| (i as f64 - 20.0) * 0.25).collect();
        let mut msg = dec.new_messages();
        dec.variable_step(&llr, &BpConfig::default(), &mut msg);
        for (c, node) in dec.graph().checks().iter().enumerate() {
            assert_eq!(msg.var_to_chk[c], [llr[node.vars[0]], llr[node.vars[1]]]);
        }
        for (l, line) in dec.graph().local_nodes.iter().enumerate() {
            for (pos, &v) in line.iter().enumerate() {
                assert_eq!(msg.var_to_loc[l][pos], llr[v]);
            }
        }
    }

    #[test]
    fn generalized_extrinsic_ignores_own_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let base = BaseCode::hamming_7_4();
        let fo = FirstOrderDecoder::new(&base);
        let book = base.codewords();
        for _ in 0..50 {
            let x: Vec<f64> = (0..49).map(|_| rng.random_range(-3.0..3.0)).collect();
            let app = fo.max_log_map(2, &x).unwrap();
            let e = rng.random_range(0..49);
            let mut y = x.clone();
            y[e] += rng.random_range(-2.0..2.0);
            let app_y = fo.max_log_map(2, &y).unwrap();
            assert!(((app[e] - x[e]) - (app_y[e] - y[e])).abs() < 1e-9);

            let x: Vec<f64> = (0..7).map(|_| rng.random_range(-3.0..3.0)).collect();
            let app = max_log_map_exhaustive(&book, &x);
            let e = rng.random_range(0..7);
            let mut y = x.clone();
            y[e] += 1.7;
            let app_y = max_log_map_exhaustive(&book, &y);
            assert!(((app[e] - x[e]) - (app_y[e] - y[e])).abs() < 1e-9);
        }
    }

    #[test]
    fn config_validation() {
        let bad = BpConfig {
            gamma: 0.0,
            ..BpConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = BpConfig {
            max_iterations: 0,
            ..BpConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(BpConfig::default().validate().is_ok());
    }
}
