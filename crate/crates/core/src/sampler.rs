//! State sampling over the (never materialized) search tree.
//!
//! Solvable states come from random walks that only take solution
//! preserving branch moves. Each walk state also spawns unsolvable
//! candidates by one deviating move: a dead-end child (rule-valid, no
//! solution below it) or a rule-violating fill. Candidates are then drawn
//! per class with equal quotas over depth deciles.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::{PathTrace, PuzzleDomain, StateLabel};
use crate::error::{Error, Result};

pub const DEPTH_BUCKETS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    /// A state on a solution-preserving walk.
    Walk,
    /// A rule-valid child of a walk state with no solution below it.
    DeadEnd,
    /// A walk state plus one fill that breaks a rule.
    RuleViolation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledState<S, M> {
    pub state: S,
    pub label: StateLabel,
    pub depth: usize,
    pub instance_id: String,
    pub seed_path: Vec<M>,
    pub kind: SampleKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionContext<S, M> {
    /// S(0) through the current state.
    pub trace: PathTrace<S>,
    /// Moves between consecutive trace states.
    pub moves: Vec<M>,
    pub current_label: StateLabel,
    pub explored_child: Option<(M, S)>,
    pub parent: Option<S>,
    /// Acceptable next states.
    pub gold: Vec<S>,
}

impl<S, M> TransitionContext<S, M> {
    pub fn current(&self) -> &S {
        self.trace.last().expect("trace holds at least S(0)")
    }

    pub fn depth(&self) -> usize {
        self.trace.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleTargets {
    pub solvable: usize,
    pub unsolvable: usize,
}

impl SampleTargets {
    pub fn balanced(n_per_class: usize) -> Self {
        Self {
            solvable: n_per_class,
            unsolvable: n_per_class,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub targets: SampleTargets,
    pub seed: u64,
    /// Share of unsolvable states drawn from rule-violating fills.
    pub violation_mix: f64,
    pub walks_per_instance: usize,
    /// Give a solvable shortfall to the unsolvable class so the total
    /// stays at `solvable + unsolvable`.
    pub rebalance: bool,
}

impl SamplerConfig {
    pub fn new(targets: SampleTargets, seed: u64) -> Self {
        Self {
            targets,
            seed,
            violation_mix: 0.5,
            walks_per_instance: 8,
            rebalance: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shortage {
    pub solvable: usize,
    pub unsolvable: usize,
}

#[derive(Debug, Clone)]
pub struct SampleSet<S, M> {
    pub states: Vec<LabeledState<S, M>>,
    pub shortage: Shortage,
    /// Count per (class, decile) of the selected states.
    pub buckets: BTreeMap<(StateLabel, usize), usize>,
}

/// Private random stream for one instance.
pub fn instance_rng(seed: u64, instance_id: &str) -> ChaCha8Rng {
    let digest = Sha256::digest(format!("{seed}:{instance_id}").as_bytes());
    let mut bytes = [0u8; 32];
    bytes.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(bytes)
}

pub fn depth_bucket(depth: usize, max_depth: usize) -> usize {
    if max_depth == 0 {
        return 0;
    }
    (DEPTH_BUCKETS * depth / max_depth).min(DEPTH_BUCKETS - 1)
}

pub fn label_state<D: PuzzleDomain>(domain: &D, state: &D::State) -> Result<StateLabel> {
    domain.label(state)
}

/// First rule-valid, unsolvable child in branch order.
pub fn find_unsolvable_child<D: PuzzleDomain>(
    domain: &D,
    state: &D::State,
) -> Result<Option<(D::Move, D::State)>> {
    for mv in domain.branch_moves(state) {
        let child = domain.apply(state, &mv)?;
        if domain.rule_valid(&child) && !domain.is_solvable(&child)? {
            return Ok(Some((mv, child)));
        }
    }
    Ok(None)
}

/// The explored child shown for an unsolvable state: its first branch
/// child, or its first forward child when the branch slot is stuck.
pub fn first_child<D: PuzzleDomain>(domain: &D, state: &D::State) -> Result<Option<(D::Move, D::State)>> {
    let mv = domain
        .branch_moves(state)
        .into_iter()
        .next()
        .or_else(|| domain.forward_moves(state).into_iter().next());
    match mv {
        Some(mv) => {
            let child = domain.apply(state, &mv)?;
            Ok(Some((mv, child)))
        }
        None => Ok(None),
    }
}

pub fn replay<D: PuzzleDomain>(domain: &D, path: &[D::Move]) -> Result<Vec<D::State>> {
    let mut states = vec![domain.initial()];
    for mv in path {
        let next = domain.apply(states.last().unwrap(), mv)?;
        states.push(next);
    }
    Ok(states)
}

/// All sampling candidates of one instance, deduplicated by state key.
pub fn collect_candidates<D: PuzzleDomain>(
    domain: &D,
    instance_id: &str,
    cfg: &SamplerConfig,
) -> Result<Vec<LabeledState<D::State, D::Move>>> {
    let mut rng = instance_rng(cfg.seed, instance_id);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let make = |state: D::State, label, path: &[D::Move], kind| LabeledState {
        state,
        label,
        depth: path.len(),
        instance_id: instance_id.to_string(),
        seed_path: path.to_vec(),
        kind,
    };

    for _ in 0..cfg.walks_per_instance.max(1) {
        let mut state = domain.initial();
        let mut path: Vec<D::Move> = Vec::new();
        if !domain.is_solvable(&state)? {
            return Err(Error::InvalidArgument(format!("instance {instance_id} has no solution")));
        }
        while !domain.is_solution(&state) {
            let mut good = Vec::new();
            let mut dead = Vec::new();
            for mv in domain.branch_moves(&state) {
                let child = domain.apply(&state, &mv)?;
                if !domain.rule_valid(&child) {
                    continue;
                }
                if domain.is_solvable(&child)? {
                    good.push((mv, child));
                } else {
                    dead.push((mv, child));
                }
            }
            if good.is_empty() {
                break;
            }
            if seen.insert(domain.state_key(&state)) {
                if !dead.is_empty() {
                    out.push(make(state.clone(), StateLabel::Solvable, &path, SampleKind::Walk));
                    let (mv, child) = dead[rng.random_range(0..dead.len())].clone();
                    if seen.insert(domain.state_key(&child)) && first_child(domain, &child)?.is_some() {
                        path.push(mv);
                        out.push(make(child, StateLabel::Unsolvable, &path, SampleKind::DeadEnd));
                        path.pop();
                    }
                }
                let bad = domain.violating_moves(&state);
                if !bad.is_empty() {
                    let mv = bad[rng.random_range(0..bad.len())].clone();
                    let child = domain.apply(&state, &mv)?;
                    if !domain.rule_valid(&child)
                        && seen.insert(domain.state_key(&child))
                        && first_child(domain, &child)?.is_some()
                    {
                        path.push(mv);
                        out.push(make(child, StateLabel::Unsolvable, &path, SampleKind::RuleViolation));
                        path.pop();
                    }
                }
            }
            let (mv, child) = good.swap_remove(rng.random_range(0..good.len()));
            path.push(mv);
            state = child;
        }
    }
    Ok(out)
}

/// Per-decile quotas for `n` states: equal shares, remainder to the lower
/// deciles, shortfalls moved to the nearest decile with spare states
/// (ties go to the lower one).
pub fn bucket_quotas(n: usize, available: &[usize; DEPTH_BUCKETS]) -> [usize; DEPTH_BUCKETS] {
    let mut take = [0usize; DEPTH_BUCKETS];
    let mut missing = 0;
    for b in 0..DEPTH_BUCKETS {
        let quota = n / DEPTH_BUCKETS + usize::from(b < n % DEPTH_BUCKETS);
        take[b] = quota.min(available[b]);
        missing += quota - take[b];
    }
    while missing > 0 {
        let mut moved = false;
        for b in 0..DEPTH_BUCKETS {
            if missing == 0 {
                break;
            }
            let short = n / DEPTH_BUCKETS + usize::from(b < n % DEPTH_BUCKETS) > available[b];
            if !short {
                continue;
            }
            let target = (1..DEPTH_BUCKETS).find_map(|dist| {
                let lo = b.checked_sub(dist).filter(|&x| take[x] < available[x]);
                let hi = Some(b + dist).filter(|&x| x < DEPTH_BUCKETS && take[x] < available[x]);
                lo.or(hi)
            });
            if let Some(t) = target {
                take[t] += 1;
                missing -= 1;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    take
}

/// Draw up to `n` candidates stratified by depth decile. Inside a decile,
/// instances take turns in a shuffled order. Returns (chosen, leftovers).
fn stratified<S: Clone, M: Clone>(
    cands: Vec<LabeledState<S, M>>,
    n: usize,
    max_depth: &dyn Fn(&str) -> usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<LabeledState<S, M>>, Vec<LabeledState<S, M>>) {
    let mut by_bucket: Vec<BTreeMap<String, Vec<LabeledState<S, M>>>> =
        (0..DEPTH_BUCKETS).map(|_| BTreeMap::new()).collect();
    for c in cands {
        let b = depth_bucket(c.depth, max_depth(&c.instance_id));
        by_bucket[b].entry(c.instance_id.clone()).or_default().push(c);
    }
    let mut ordered: Vec<Vec<LabeledState<S, M>>> = Vec::new();
    for groups in by_bucket {
        let mut groups: Vec<Vec<LabeledState<S, M>>> = groups.into_values().collect();
        groups.shuffle(rng);
        for g in &mut groups {
            g.shuffle(rng);
        }
        let mut round_robin = Vec::new();
        let longest = groups.iter().map(Vec::len).max().unwrap_or(0);
        let mut iters: Vec<_> = groups.into_iter().map(|g| g.into_iter()).collect();
        for _ in 0..longest {
            for it in &mut iters {
                if let Some(c) = it.next() {
                    round_robin.push(c);
                }
            }
        }
        ordered.push(round_robin);
    }
    let mut available = [0usize; DEPTH_BUCKETS];
    for (b, v) in ordered.iter().enumerate() {
        available[b] = v.len();
    }
    let take = bucket_quotas(n, &available);
    let mut chosen = Vec::new();
    let mut rest = Vec::new();
    for (b, v) in ordered.into_iter().enumerate() {
        for (i, c) in v.into_iter().enumerate() {
            if i < take[b] {
                chosen.push(c);
            } else {
                rest.push(c);
            }
        }
    }
    (chosen, rest)
}

/// Balanced sample over several instances of one puzzle family.
pub fn sample_balanced<D: PuzzleDomain>(
    instances: &[(String, D)],
    cfg: &SamplerConfig,
) -> Result<SampleSet<D::State, D::Move>> {
    let per_instance: Vec<Vec<LabeledState<D::State, D::Move>>> = instances
        .par_iter()
        .map(|(id, d)| collect_candidates(d, id, cfg))
        .collect::<Result<_>>()?;
    let depths: BTreeMap<&str, usize> = instances
        .iter()
        .map(|(id, d)| (id.as_str(), d.max_depth()))
        .collect();
    let max_depth = |id: &str| depths.get(id).copied().unwrap_or(0);

    let mut walk = Vec::new();
    let mut dead = Vec::new();
    let mut viol = Vec::new();
    for c in per_instance.into_iter().flatten() {
        match c.kind {
            SampleKind::Walk => walk.push(c),
            SampleKind::DeadEnd => dead.push(c),
            SampleKind::RuleViolation => viol.push(c),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (solvable, _) = stratified(walk, cfg.targets.solvable, &max_depth, &mut rng);
    let solvable_short = cfg.targets.solvable - solvable.len();
    let mut n_unsolvable = cfg.targets.unsolvable;
    if cfg.rebalance {
        n_unsolvable += solvable_short;
    }

    let n_viol = ((n_unsolvable as f64) * cfg.violation_mix.clamp(0.0, 1.0)).round() as usize;
    let n_dead = n_unsolvable - n_viol;
    let (mut dead_pick, dead_rest) = stratified(dead, n_dead, &max_depth, &mut rng);
    let (mut viol_pick, viol_rest) = stratified(viol, n_viol, &max_depth, &mut rng);
    let dead_gap = n_dead - dead_pick.len();
    let viol_gap = n_viol - viol_pick.len();
    if dead_gap > 0 {
        viol_pick.extend(stratified(viol_rest, dead_gap, &max_depth, &mut rng).0);
    } else if viol_gap > 0 {
        dead_pick.extend(stratified(dead_rest, viol_gap, &max_depth, &mut rng).0);
    }

    let mut states = solvable;
    states.extend(dead_pick);
    states.extend(viol_pick);
    let mut buckets = BTreeMap::new();
    for s in &states {
        *buckets
            .entry((s.label, depth_bucket(s.depth, max_depth(&s.instance_id))))
            .or_insert(0) += 1;
    }
    let n_solvable = states.iter().filter(|s| s.label.is_solvable()).count();
    let shortage = Shortage {
        solvable: cfg.targets.solvable.saturating_sub(n_solvable),
        unsolvable: cfg.targets.unsolvable.saturating_sub(states.len() - n_solvable),
    };
    if shortage != Shortage::default() {
        tracing::warn!(?shortage, "not enough candidate states");
    }
    Ok(SampleSet {
        states,
        shortage,
        buckets,
    })
}

/// Trace, explored child, parent and gold answers for a sampled state.
pub fn build_transition_context<D: PuzzleDomain>(
    domain: &D,
    labeled: &LabeledState<D::State, D::Move>,
) -> Result<TransitionContext<D::State, D::Move>> {
    let states = replay(domain, &labeled.seed_path)?;
    let mut trace = PathTrace::new(labeled.instance_id.clone());
    let last = states.len() - 1;
    for (i, s) in states.into_iter().enumerate() {
        let label = if i == last {
            labeled.label
        } else {
            domain.label(&s)?
        };
        trace.push(s, label);
    }
    let current = trace.last().unwrap().clone();
    if domain.state_key(&current) != domain.state_key(&labeled.state) {
        return Err(Error::InvalidArgument("seed path does not reproduce the state".into()));
    }
    let parent = (last > 0).then(|| trace.states[last - 1].clone());
    let (explored_child, gold) = if labeled.label.is_solvable() {
        let explored = find_unsolvable_child(domain, &current)?;
        let skip = explored.as_ref().map(|(_, s)| domain.state_key(s));
        let gold = domain
            .solvable_children(&current)?
            .into_iter()
            .map(|(_, s)| s)
            .filter(|s| Some(domain.state_key(s)) != skip)
            .collect();
        (explored, gold)
    } else {
        let parent = parent
            .clone()
            .ok_or_else(|| Error::InvalidArgument("an unsolvable sample needs a parent".into()))?;
        (first_child(domain, &current)?, vec![parent])
    };
    Ok(TransitionContext {
        trace,
        moves: labeled.seed_path.clone(),
        current_label: labeled.label,
        explored_child,
        parent,
        gold,
    })
}
