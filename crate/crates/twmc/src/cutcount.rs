//! Randomized decision engine for specifications whose side condition
//! constrains component counts of quantified sets.
//!
//! The engine decides satisfiability per cardinality branch by counting,
//! modulo two, *objects*: a set assignment satisfying the matrix, plus a
//! marker set inside each quantified set (at most the branch's component
//! bound), plus a two-sided cut of each quantified set with every marker on
//! side one and no edge crossing a cut. Assignments with an unmarked
//! component admit an even number of cuts and vanish mod 2, so an odd class
//! certifies an assignment whose every component holds a marker — which
//! forces the component bounds. Random weights (one per vertex and per
//! 0/1/2 membership-and-marker profile, likewise for edges) isolate a
//! single object with probability at least one half, which keeps a
//! satisfiable branch from cancelling with itself: the tables therefore
//! hold polynomials over the total weight with GF(2) coefficients.
//!
//! A YES answer is always sound. A NO answer is wrong with probability at
//! most the configured target error.

use arrayvec::ArrayVec;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::compile::Compiled;
use crate::count_dp::{
    count_solutions, enumerate_branches, Branch, BranchMode, CountOptions, KEY_CAP,
};
use crate::graph::{EdgeId, Instance, Vertex};
use crate::hash::FnvHashMap;
use crate::logic::Problem;
use crate::nice::{NiceDecomposition, NiceNode};
use crate::{Error, Result};

type Key = ArrayVec<u32, KEY_CAP>;
type Table = FnvHashMap<Key, WPoly>;

/// Hard cap on the highest possible total weight, in bits per polynomial.
const MAX_WEIGHT_BITS: usize = 1 << 22;

/// A polynomial over GF(2) in the total-weight variable; bit `w` is the
/// parity of the number of counted objects of weight `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WPoly {
    bits: Vec<u64>,
}

impl WPoly {
    pub fn zero(words: usize) -> Self {
        WPoly { bits: vec![0; words] }
    }

    /// The constant polynomial 1 (one object of weight zero).
    pub fn one(words: usize) -> Self {
        let mut p = Self::zero(words);
        p.bits[0] = 1;
        p
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &WPoly) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
    }

    /// `self ^= other << shift`; shifted-out bits must be zero.
    pub fn xor_shifted(&mut self, other: &WPoly, shift: usize) {
        let words = self.bits.len();
        let (wo, bo) = (shift / 64, shift % 64);
        for (i, &chunk) in other.bits.iter().enumerate() {
            if chunk == 0 {
                continue;
            }
            let lo = i + wo;
            if lo < words {
                self.bits[lo] ^= chunk << bo;
            } else {
                debug_assert_eq!(chunk, 0, "weight overflowed the polynomial capacity");
            }
            if bo != 0 {
                let hi = lo + 1;
                let carry = chunk >> (64 - bo);
                if hi < words {
                    self.bits[hi] ^= carry;
                } else {
                    debug_assert_eq!(carry, 0, "weight overflowed the polynomial capacity");
                }
            }
        }
    }

    /// Carry-less product, for joining two independently weighted halves.
    pub fn carryless_mul(&self, other: &WPoly) -> WPoly {
        let mut out = Self::zero(self.bits.len());
        for (i, &word) in self.bits.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let bit = w.trailing_zeros() as usize;
                out.xor_shifted(other, i * 64 + bit);
                w &= w - 1;
            }
        }
        out
    }

    /// The smallest weight with odd object count.
    pub fn min_set_bit(&self) -> Option<usize> {
        self.bits
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// The parity bit at weight `w` (false beyond the stored range).
    pub fn bit(&self, w: usize) -> bool {
        self.bits.get(w / 64).is_some_and(|&word| word >> (w % 64) & 1 == 1)
    }
}

/// One sampled weight function: a weight per vertex and membership/marker
/// profile (ternary code over the quantified vertex sets), and likewise per
/// edge. A side with no quantified sets carries no weights.
pub struct WeightAssignment {
    /// `2 |U|`: weights are uniform in `1..=n_value`.
    pub n_value: u64,
    vertex: Vec<Vec<u32>>,
    edge: Vec<Vec<u32>>,
    /// Highest possible total weight.
    pub wmax: usize,
}

impl WeightAssignment {
    /// The weight of vertex `v` under the ternary membership/marker profile.
    pub fn vertex_weight(&self, v: Vertex, profile: u32) -> u64 {
        u64::from(self.vertex[v as usize][profile as usize])
    }

    /// The weight of edge `e` under the ternary membership/marker profile.
    pub fn edge_weight(&self, e: EdgeId, profile: u32) -> u64 {
        u64::from(self.edge[e as usize][profile as usize])
    }
}

/// Samples weights in a fixed order: vertices ascending (each profile code
/// ascending), then edges ascending.
pub fn sample_weights(
    inst: &Instance,
    p1: usize,
    q1: usize,
    rng: &mut impl Rng,
) -> Result<WeightAssignment> {
    let (n, m) = (inst.graph().n() as usize, inst.graph().m() as usize);
    let profiles_v = if p1 > 0 { 3usize.pow(p1 as u32) } else { 0 };
    let profiles_e = if q1 > 0 { 3usize.pow(q1 as u32) } else { 0 };
    let universe = n * profiles_v + m * profiles_e;
    let n_value = 2 * universe as u64;
    let mut wmax = 0usize;
    let mut sample_side = |count: usize, profiles: usize| -> Vec<Vec<u32>> {
        (0..count)
            .map(|_| (0..profiles).map(|_| rng.gen_range(1..=n_value) as u32).collect())
            .collect()
    };
    let vertex = sample_side(n, profiles_v);
    let edge = sample_side(m, profiles_e);
    for side in [&vertex, &edge] {
        for weights in side {
            wmax += weights.iter().copied().max().unwrap_or(0) as usize;
        }
    }
    if wmax + 1 > MAX_WEIGHT_BITS {
        return Err(Error::BudgetExceeded(format!(
            "total weight range {wmax} exceeds the polynomial capacity"
        )));
    }
    Ok(WeightAssignment { n_value, vertex, edge, wmax })
}

/// Tuning for the randomized decision procedure.
#[derive(Debug, Clone)]
pub struct DecideOptions {
    /// Master seed; every trial derives its own stream from it.
    pub seed: u64,
    /// Upper bound on the probability of a false NO.
    pub target_error: f64,
    /// Maximum live entries in any one node table.
    pub max_table_entries: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { seed: 0, target_error: 0.5f64.powi(20), max_table_entries: 1 << 24 }
    }
}

/// The branch and isolating weight of the first succeeding trial.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    pub cx: Vec<u32>,
    pub cy: Vec<u32>,
    pub weight: u64,
}

/// Outcome of a decision run.
#[derive(Debug, Clone, Serialize)]
pub struct DecideReport {
    pub answer: bool,
    /// `exact-count` when the specification has no component-count side
    /// conditions (no randomness involved), `cut-and-count` otherwise.
    pub method: &'static str,
    pub seed: u64,
    pub branches: usize,
    /// Trials per branch within one outer round.
    pub reps_per_branch: u32,
    /// Outer rounds; each bounds the false-NO probability by one half.
    pub outer_rounds: u32,
    pub witness: Option<Witness>,
    pub rng: &'static str,
}

fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    64 - (x - 1).leading_zeros().min(63)
}

/// Decides whether any assignment satisfies `problem` on `inst`.
///
/// Specifications without component-count conditions are decided exactly by
/// the counting engine. Otherwise every admissible branch is tried
/// `reps_per_branch × outer_rounds` times with fresh weights; a YES is
/// certain, a NO is wrong with probability at most `target_error`.
pub fn decide(
    inst: &Instance,
    problem: &Problem,
    nice: &NiceDecomposition,
    opts: &DecideOptions,
) -> Result<DecideReport> {
    if !(opts.target_error > 0.0 && opts.target_error < 1.0) {
        return Err(Error::Unsupported(format!(
            "target error {} outside (0, 1)",
            opts.target_error
        )));
    }
    if !problem.uses_cc() {
        let report = count_solutions(
            inst,
            problem,
            nice,
            &CountOptions { max_table_entries: opts.max_table_entries },
        )?;
        return Ok(DecideReport {
            answer: !report.count.is_zero(),
            method: "exact-count",
            seed: opts.seed,
            branches: report.branches,
            reps_per_branch: 0,
            outer_rounds: 0,
            witness: None,
            rng: "chacha8",
        });
    }

    let branches = enumerate_branches(inst, problem, BranchMode::WithComponentBounds)?;
    nice.validate_for(inst.graph())?;
    let compiled = Compiled::new(problem)?;
    let ctx = EngineContext::new(inst, &compiled, nice)?;
    let no = |branch_count| DecideReport {
        answer: false,
        method: "cut-and-count",
        seed: opts.seed,
        branches: branch_count,
        reps_per_branch: 0,
        outer_rounds: 0,
        witness: None,
        rng: "chacha8",
    };
    if branches.is_empty() {
        return Ok(no(0));
    }

    let k = branches.len() as u64;
    let reps = ceil_log2(2 * k);
    let outer = (1.0 / opts.target_error).log2().ceil().max(1.0) as u32;
    let trials: Vec<(u32, u32, u32)> = (0..outer)
        .flat_map(|o| (0..k as u32).flat_map(move |b| (0..reps).map(move |r| (o, b, r))))
        .collect();

    let hit = trials
        .par_iter()
        .map(|&(o, b, r)| {
            let mut rng = trial_rng(opts.seed, o, b, r);
            let branch = &branches[b as usize];
            let weights =
                sample_weights(inst, compiled.p1, compiled.q1, &mut rng)?;
            let weight = run_trial(&ctx, branch, &weights, opts.max_table_entries)?.min_set_bit();
            Ok::<Option<(u32, usize)>, Error>(weight.map(|w| (b, w)))
        })
        .find_first(|outcome| !matches!(outcome, Ok(None)));

    match hit {
        None => {
            let mut report = no(branches.len());
            report.reps_per_branch = reps;
            report.outer_rounds = outer;
            Ok(report)
        }
        Some(Err(e)) => Err(e),
        Some(Ok(None)) => unreachable!("filtered by find_first"),
        Some(Ok(Some((b, weight)))) => {
            let branch = &branches[b as usize];
            Ok(DecideReport {
                answer: true,
                method: "cut-and-count",
                seed: opts.seed,
                branches: branches.len(),
                reps_per_branch: reps,
                outer_rounds: outer,
                witness: Some(Witness {
                    x: branch.x.clone(),
                    y: branch.y.clone(),
                    cx: branch.cx.clone(),
                    cy: branch.cy.clone(),
                    weight: weight as u64,
                }),
                rng: "chacha8",
            })
        }
    }
}

/// Derives an independent, platform-stable stream per trial.
fn trial_rng(master: u64, outer: u32, branch: u32, rep: u32) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master.to_le_bytes());
    seed[8..16].copy_from_slice(&u64::from(outer).to_le_bytes());
    seed[16..24].copy_from_slice(&u64::from(branch).to_le_bytes());
    seed[24..32].copy_from_slice(&u64::from(rep).to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

/// Everything about the instance and specification that trials share.
struct EngineContext<'a> {
    inst: &'a Instance,
    compiled: &'a Compiled,
    nice: &'a NiceDecomposition,
    pow3_v: u32,
    /// Ternary profile → binary membership bits.
    member_bits_v: Vec<u32>,
    /// Ternary profile → ternary membership base (digits collapsed to 0/1).
    chi_base_v: Vec<u32>,
    /// Ternary profile → bitmask of coordinates on cut side one.
    side1_mask_v: Vec<u32>,
    /// Binary mask → ternary code with the same set coordinates.
    tern_of_mask_v: Vec<u32>,
    tern_of_mask_e: Vec<u32>,
}

impl<'a> EngineContext<'a> {
    fn new(
        inst: &'a Instance,
        compiled: &'a Compiled,
        nice: &'a NiceDecomposition,
    ) -> Result<Self> {
        let (p1, q1, l) = (compiled.p1, compiled.q1, compiled.l);
        let pow3_v = 3u64.pow(p1 as u32);
        let pow3_e = 3u64.pow(q1 as u32);
        let code_space = pow3_v
            .checked_mul(pow3_e)
            .and_then(|x| x.checked_shl(l as u32))
            .and_then(|x| x.checked_mul(u64::from(compiled.h_space)));
        match code_space {
            Some(space) if space <= u64::from(u32::MAX) => {}
            _ => {
                return Err(Error::BudgetExceeded(
                    "per-vertex cut state space does not fit 32-bit codes".into(),
                ))
            }
        }
        let max_bag =
            (0..nice.nodes().len()).map(|i| nice.bag(i).len()).max().unwrap_or(0);
        if max_bag + 2 * (p1 + q1) > KEY_CAP {
            return Err(Error::BudgetExceeded(format!(
                "bag size {max_bag} plus {} totals exceeds the key capacity of {KEY_CAP}",
                2 * (p1 + q1)
            )));
        }

        let digits = |code: u32, len: usize| -> Vec<u32> {
            let mut c = code;
            (0..len)
                .map(|_| {
                    let d = c % 3;
                    c /= 3;
                    d
                })
                .collect()
        };
        let pow3_v = pow3_v as u32;
        let mut member_bits_v = Vec::with_capacity(pow3_v as usize);
        let mut chi_base_v = Vec::with_capacity(pow3_v as usize);
        let mut side1_mask_v = Vec::with_capacity(pow3_v as usize);
        for code in 0..pow3_v {
            let ds = digits(code, p1);
            let mut bits = 0u32;
            let mut base = 0u32;
            let mut side1 = 0u32;
            for (i, &d) in ds.iter().enumerate() {
                if d != 0 {
                    bits |= 1 << i;
                    base += 3u32.pow(i as u32);
                }
                if d == 1 {
                    side1 |= 1 << i;
                }
            }
            member_bits_v.push(bits);
            chi_base_v.push(base);
            side1_mask_v.push(side1);
        }
        let tern_of = |len: usize| -> Vec<u32> {
            (0..1u32 << len)
                .map(|mask| {
                    (0..len).filter(|&i| mask >> i & 1 == 1).map(|i| 3u32.pow(i as u32)).sum()
                })
                .collect()
        };
        Ok(EngineContext {
            inst,
            compiled,
            nice,
            pow3_v,
            member_bits_v,
            chi_base_v,
            side1_mask_v,
            tern_of_mask_v: tern_of(p1),
            tern_of_mask_e: tern_of(q1),
        })
    }

    #[inline]
    fn pack(&self, b3: u32, e3: u32, pi: u32, h: u32) -> u32 {
        (((e3 * self.pow3_v + b3) << self.compiled.l) | pi) * self.compiled.h_space + h
    }

    #[inline]
    fn unpack(&self, code: u32) -> (u32, u32, u32, u32) {
        let h = code % self.compiled.h_space;
        let rest = code / self.compiled.h_space;
        let pi_mask = (1u32 << self.compiled.l) - 1;
        let pi = rest & pi_mask;
        let align = rest >> self.compiled.l;
        (align % self.pow3_v, align / self.pow3_v, pi, h)
    }

    #[inline]
    fn tern_digit(code: u32, i: usize) -> u32 {
        code / 3u32.pow(i as u32) % 3
    }
}

/// Computes, for one cardinality branch and one weight assignment, the
/// parity of the number of counted objects at every total weight: bit `w`
/// of the result is `|{objects of weight w}| mod 2`.
///
/// Intended for direct verification against exhaustive object enumeration;
/// [`decide`] drives the same program internally.
pub fn mod2_object_count(
    inst: &Instance,
    problem: &Problem,
    nice: &NiceDecomposition,
    branch: &Branch,
    weights: &WeightAssignment,
    max_table_entries: usize,
) -> Result<WPoly> {
    nice.validate_for(inst.graph())?;
    let compiled = Compiled::new(problem)?;
    let ctx = EngineContext::new(inst, &compiled, nice)?;
    run_trial(&ctx, branch, weights, max_table_entries)
}

/// Runs the weighted mod-2 dynamic program for one branch; bit `w` of the
/// result is the object-count parity at total weight `w`.
fn run_trial(
    ctx: &EngineContext<'_>,
    branch: &Branch,
    weights: &WeightAssignment,
    max_entries: usize,
) -> Result<WPoly> {
    let compiled = ctx.compiled;
    let (p1, q1) = (compiled.p1, compiled.q1);
    // Flat modality bodies let the truth pattern be read off the final
    // history at forget time instead of being guessed per vertex.
    let guess_mask: u32 =
        if compiled.needs_promises() { (1u32 << compiled.l) - 1 } else { 0 };
    let words = weights.wmax / 64 + 1;
    let caps: Vec<u32> = branch
        .x
        .iter()
        .chain(&branch.y)
        .chain(&branch.cx)
        .chain(&branch.cy)
        .copied()
        .collect();
    let totals_len = caps.len();

    let mut tables: Vec<Option<Table>> = vec![None; ctx.nice.nodes().len()];
    for idx in 0..ctx.nice.nodes().len() {
        let bag: Vec<u32> = ctx.nice.bag(idx).to_vec();
        let mut table = match ctx.nice.nodes()[idx] {
            NiceNode::Leaf => {
                let mut t = Table::default();
                let mut key = Key::new();
                for _ in 0..totals_len {
                    key.push(0);
                }
                t.insert(key, WPoly::one(words));
                t
            }
            NiceNode::IntroduceVertex { vertex, child } => {
                let child_t = tables[child].take().expect("child table present");
                let pos = bag.binary_search(&vertex).expect("introduced vertex in bag");
                let mut t = Table::default();
                for (key, val) in &child_t {
                    let (codes, totals) = key.split_at(bag.len() - 1);
                    for b3 in 0..ctx.pow3_v {
                        let member = ctx.member_bits_v[b3 as usize];
                        let mut new_totals: ArrayVec<u32, KEY_CAP> =
                            totals.iter().copied().collect();
                        let mut ok = true;
                        for i in 0..p1 {
                            if member >> i & 1 == 1 {
                                new_totals[i] += 1;
                                if new_totals[i] > caps[i] {
                                    ok = false;
                                    break;
                                }
                            }
                        }
                        if !ok {
                            continue;
                        }
                        for pi in 0..=guess_mask {
                            let mut key2 = Key::new();
                            key2.try_extend_from_slice(&codes[..pos]).unwrap();
                            key2.push(ctx.pack(b3, 0, pi, compiled.h_identity()));
                            key2.try_extend_from_slice(&codes[pos..]).unwrap();
                            key2.try_extend_from_slice(&new_totals).unwrap();
                            t.entry(key2).or_insert_with(|| WPoly::zero(words)).xor_assign(val);
                        }
                    }
                }
                t
            }
            NiceNode::IntroduceEdge { edge, child } => {
                let child_t = tables[child].take().expect("child table present");
                introduce_edge(ctx, weights, words, &bag, edge, &child_t, &caps)?
            }
            NiceNode::Forget { vertex, child } => {
                let child_t = tables[child].take().expect("child table present");
                let child_bag = ctx.nice.bag(child);
                let pos = child_bag.binary_search(&vertex).expect("forgotten vertex in bag");
                let fx = ctx.inst.fx_bits(vertex);
                let mut t = Table::default();
                for (key, val) in &child_t {
                    let (b3, _e3, pi, h) = ctx.unpack(key[pos]);
                    let actual = compiled.accept_mask(h);
                    if compiled.needs_promises() && actual != u64::from(pi) {
                        continue;
                    }
                    let member = ctx.member_bits_v[b3 as usize];
                    if !compiled.depth0(member, fx, actual) {
                        continue;
                    }
                    let mut base = Key::new();
                    base.try_extend_from_slice(&key[..pos]).unwrap();
                    base.try_extend_from_slice(&key[pos + 1..]).unwrap();
                    // Choose which component bounds this vertex marks;
                    // markers must sit on cut side one.
                    let allowed = ctx.side1_mask_v[b3 as usize];
                    let mut m = allowed;
                    loop {
                        let mut key2 = base.clone();
                        let codes_len = bag.len();
                        let mut ok = true;
                        for i in 0..p1 {
                            if m >> i & 1 == 1 {
                                let slot = codes_len + p1 + q1 + i;
                                key2[slot] += 1;
                                if key2[slot] > caps[p1 + q1 + i] {
                                    ok = false;
                                    break;
                                }
                            }
                        }
                        if ok {
                            let shift = if p1 > 0 {
                                let chi = ctx.chi_base_v[b3 as usize]
                                    + ctx.tern_of_mask_v[m as usize];
                                weights.vertex[vertex as usize][chi as usize] as usize
                            } else {
                                0
                            };
                            t.entry(key2)
                                .or_insert_with(|| WPoly::zero(words))
                                .xor_shifted(val, shift);
                        }
                        if m == 0 {
                            break;
                        }
                        m = (m - 1) & allowed;
                    }
                }
                t
            }
            NiceNode::Join { left, right } => {
                let left_t = tables[left].take().expect("left table present");
                let right_t = tables[right].take().expect("right table present");
                join_tables(ctx, words, &bag, &left_t, &right_t, &caps)?
            }
        };
        table.retain(|_, v| !v.is_zero());
        if table.len() > max_entries {
            return Err(Error::BudgetExceeded(format!(
                "table at decomposition node {idx} reached {} entries, over the configured budget",
                table.len()
            )));
        }
        tables[idx] = Some(table);
    }

    let root = tables[ctx.nice.root()].take().expect("root table present");
    // Read off the branch: sum (mod 2) over marker counts up to the bounds.
    let mut acc = WPoly::zero(words);
    let mut nu = vec![0u32; p1];
    let mut mu = vec![0u32; q1];
    loop {
        let mut key = Key::new();
        for &x in branch.x.iter().chain(&branch.y).chain(&nu).chain(&mu) {
            key.push(x);
        }
        if let Some(poly) = root.get(&key) {
            acc.xor_assign(poly);
        }
        if !advance_bounded(&mut nu, &mut mu, &branch.cx, &branch.cy) {
            break;
        }
    }
    Ok(acc)
}

fn advance_bounded(nu: &mut [u32], mu: &mut [u32], cx: &[u32], cy: &[u32]) -> bool {
    for (v, &cap) in mu.iter_mut().zip(cy).rev() {
        if *v < cap {
            *v += 1;
            return true;
        }
        *v = 0;
    }
    for (v, &cap) in nu.iter_mut().zip(cx).rev() {
        if *v < cap {
            *v += 1;
            return true;
        }
        *v = 0;
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn introduce_edge(
    ctx: &EngineContext<'_>,
    weights: &WeightAssignment,
    words: usize,
    bag: &[u32],
    edge: u32,
    child_t: &Table,
    caps: &[u32],
) -> Result<Table> {
    let compiled = ctx.compiled;
    let (p1, q1) = (compiled.p1, compiled.q1);
    let g = ctx.inst.graph();
    let ends = g.endpoints(edge);
    let pa = bag.binary_search(&ends.u).expect("endpoint in bag");
    let pb = bag.binary_search(&ends.v).expect("endpoint in bag");
    let (fxa, fxb) = (ctx.inst.fx_bits(ends.u), ctx.inst.fx_bits(ends.v));
    let fy = ctx.inst.fy_bits(edge);
    let mut t = Table::default();

    for (key, val) in child_t {
        let codes = &key[..bag.len()];
        let (ba3, ea3, pia, ha) = ctx.unpack(codes[pa]);
        let (bb3, eb3, pib, hb) = ctx.unpack(codes[pb]);
        // The edge may not cross any vertex-set cut.
        let compatible = (0..p1).all(|i| {
            let (da, db) =
                (EngineContext::tern_digit(ba3, i), EngineContext::tern_digit(bb3, i));
            da == 0 || db == 0 || da == db
        });
        if !compatible {
            continue;
        }
        let (ma, mb) = (ctx.member_bits_v[ba3 as usize], ctx.member_bits_v[bb3 as usize]);

        for d in 0..1u32 << q1 {
            let mut new_totals: ArrayVec<u32, KEY_CAP> =
                key[bag.len()..].iter().copied().collect();
            let mut ok = true;
            for j in 0..q1 {
                if d >> j & 1 == 1 {
                    new_totals[p1 + j] += 1;
                    if new_totals[p1 + j] > caps[p1 + j] {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            // Both endpoints of an edge of Y_j land on the same side of
            // that set's cut; sides undecided so far may settle either way.
            let mut side_options: ArrayVec<(u32, bool, bool), 16> = ArrayVec::new();
            // Entries: (coordinate, allow side one, allow side two).
            let mut dead = false;
            for j in 0..q1 {
                if d >> j & 1 == 0 {
                    continue;
                }
                let (sa, sb) =
                    (EngineContext::tern_digit(ea3, j), EngineContext::tern_digit(eb3, j));
                let (one, two) = match (sa, sb) {
                    (0, 0) => (true, true),
                    (0, s) | (s, 0) => (s == 1, s == 2),
                    (x, y) if x == y => (x == 1, x == 2),
                    _ => (false, false),
                };
                if !one && !two {
                    dead = true;
                    break;
                }
                side_options.push((j as u32, one, two));
            }
            if dead {
                continue;
            }
            let mask_a = compiled.body_mask(mb, fxb, u64::from(pib), d, fy, true);
            let mask_b = compiled.body_mask(ma, fxa, u64::from(pia), d, fy, false);
            let (ha2, hb2) = (compiled.bump(ha, mask_a), compiled.bump(hb, mask_b));

            // Enumerate the side choices for every undecided coordinate.
            let n_opts = side_options.len();
            let mut choice = vec![0u8; n_opts];
            'choices: loop {
                let mut valid = true;
                let mut ea_new = ea3;
                let mut eb_new = eb3;
                let mut marker_allowed = 0u32;
                for (slot, &(j, one, two)) in side_options.iter().enumerate() {
                    let side = if choice[slot] == 0 {
                        if !one {
                            valid = false;
                            break;
                        }
                        1
                    } else {
                        if !two {
                            valid = false;
                            break;
                        }
                        2
                    };
                    let j = j as usize;
                    let p = 3u32.pow(j as u32);
                    ea_new = ea_new - EngineContext::tern_digit(ea_new, j) * p + side * p;
                    eb_new = eb_new - EngineContext::tern_digit(eb_new, j) * p + side * p;
                    if side == 1 {
                        marker_allowed |= 1 << j;
                    }
                }
                if valid {
                    let code_a = ctx.pack(ba3, ea_new, pia, ha2);
                    let code_b = ctx.pack(bb3, eb_new, pib, hb2);
                    let mut m = marker_allowed;
                    loop {
                        let mut totals2 = new_totals.clone();
                        let mut ok = true;
                        for j in 0..q1 {
                            if m >> j & 1 == 1 {
                                totals2[p1 + q1 + p1 + j] += 1;
                                if totals2[p1 + q1 + p1 + j] > caps[p1 + q1 + p1 + j] {
                                    ok = false;
                                    break;
                                }
                            }
                        }
                        if ok {
                            let shift = if q1 > 0 {
                                let chi = ctx.tern_of_mask_e[d as usize]
                                    + ctx.tern_of_mask_e[m as usize];
                                weights.edge[edge as usize][chi as usize] as usize
                            } else {
                                0
                            };
                            let mut key2 = Key::new();
                            key2.try_extend_from_slice(codes).unwrap();
                            key2[pa] = code_a;
                            key2[pb] = code_b;
                            key2.try_extend_from_slice(&totals2).unwrap();
                            t.entry(key2)
                                .or_insert_with(|| WPoly::zero(words))
                                .xor_shifted(val, shift);
                        }
                        if m == 0 {
                            break;
                        }
                        m = (m - 1) & marker_allowed;
                    }
                }
                // Advance the binary side-choice odometer.
                let mut s = 0;
                loop {
                    if s == n_opts {
                        break 'choices;
                    }
                    choice[s] += 1;
                    if choice[s] < 2 {
                        break;
                    }
                    choice[s] = 0;
                    s += 1;
                }
            }
        }
    }
    Ok(t)
}

fn join_tables(
    ctx: &EngineContext<'_>,
    words: usize,
    bag: &[u32],
    left_t: &Table,
    right_t: &Table,
    caps: &[u32],
) -> Result<Table> {
    let compiled = ctx.compiled;
    let (p1, q1) = (compiled.p1, compiled.q1);
    let bl = bag.len();
    let shape_of = |key: &Key| -> Key {
        key[..bl]
            .iter()
            .map(|&c| {
                let (b3, _e3, pi, _h) = ctx.unpack(c);
                (b3 << compiled.l) | pi
            })
            .collect()
    };
    let mut groups: FnvHashMap<Key, Vec<(&Key, &WPoly)>> = FnvHashMap::default();
    for (key, val) in right_t {
        groups.entry(shape_of(key)).or_default().push((key, val));
    }
    let mut t = Table::default();
    for (key, val) in left_t {
        let shape = shape_of(key);
        let Some(partners) = groups.get(&shape) else { continue };
        // Bag vertices were counted in both halves; subtract once.
        let mut dup = vec![0u32; p1];
        for &code in &key[..bl] {
            let (b3, _, _, _) = ctx.unpack(code);
            let member = ctx.member_bits_v[b3 as usize];
            for (i, slot) in dup.iter_mut().enumerate() {
                *slot += member >> i & 1;
            }
        }
        'partner: for &(rkey, rval) in partners {
            let mut key2 = Key::new();
            for pos in 0..bl {
                let (b3, e_l, pi, h_l) = ctx.unpack(key[pos]);
                let (_, e_r, _, h_r) = ctx.unpack(rkey[pos]);
                // Cut sides fixed by either half must agree.
                let mut e3 = 0u32;
                for j in 0..q1 {
                    let (sl, sr) = (
                        EngineContext::tern_digit(e_l, j),
                        EngineContext::tern_digit(e_r, j),
                    );
                    let merged = match (sl, sr) {
                        (0, s) | (s, 0) => s,
                        (a, b) if a == b => a,
                        _ => continue 'partner,
                    };
                    e3 += merged * 3u32.pow(j as u32);
                }
                key2.push(ctx.pack(b3, e3, pi, compiled.join_h(h_l, h_r)));
            }
            let mut ok = true;
            for i in 0..caps.len() {
                let mut total = key[bl + i] + rkey[bl + i];
                if i < p1 {
                    total -= dup[i];
                }
                if total > caps[i] {
                    ok = false;
                    break;
                }
                key2.push(total);
            }
            if !ok {
                continue;
            }
            let prod = val.carryless_mul(rval);
            t.entry(key2).or_insert_with(|| WPoly::zero(words)).xor_assign(&prod);
        }
    }
    Ok(t)
}
