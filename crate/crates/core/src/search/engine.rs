//! The search loop: selection, expansion, simulation and backpropagation
//! over `(dataset, model)` states.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Expansion, SearchConfig};
use super::policy::{select_child, ChildView};
use super::tree::{Edge, NodeId, RewardStats, SearchNode, SearchTree};
use crate::actions::{
    apply_data_action, canonical_state_key, enumerate_templates, instantiate, ActionKind, GroundAction,
    ParamStatsStore, PreconditionContext,
};
use crate::error::{Error, Result};
use crate::interestingness::{intr, simulate_score};
use crate::mining::{fit_with, render_pattern, FittedModel, Pattern};
use crate::tabular::Dataset;

pub const ROOT: NodeId = 0;

/// One line of the iteration trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceEntry {
    pub iteration: u64,
    /// Canonical forms of the traversed edges, ending with the attempted
    /// action when one was instantiated.
    pub path: Vec<String>,
    pub kind: Option<ActionKind>,
    pub reward: f64,
    pub new_node: bool,
    /// A new edge was added at the last node of the path.
    pub expanded: bool,
    /// Visits and children of the node where the iteration stopped, before
    /// this iteration's update.
    pub parent_visits: u64,
    pub parent_children: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchResult {
    /// Patterns above the success threshold, in discovery order, one per
    /// state.
    pub patterns: Vec<Pattern>,
    pub iterations: u64,
    pub node_count: usize,
    pub model_action_count: u64,
    /// Seconds; only filled in by callers that time the run.
    pub wall_time: Option<f64>,
    #[serde(skip)]
    pub trace: Vec<TraceEntry>,
}

impl SearchResult {
    /// The result the same run would have produced with budget `s`.
    pub fn truncated(&self, s: u64) -> SearchResult {
        let trace: Vec<TraceEntry> = self.trace.iter().filter(|t| t.iteration <= s).cloned().collect();
        SearchResult {
            patterns: self.patterns.iter().filter(|p| p.iteration <= s).cloned().collect(),
            iterations: s.min(self.iterations),
            node_count: 1 + trace.iter().filter(|t| t.new_node).count(),
            model_action_count: trace.iter().filter(|t| t.kind.is_some_and(ActionKind::is_model)).count() as u64,
            wall_time: None,
            trace,
        }
    }

    /// The trace as JSON lines.
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for t in &self.trace {
            let line = serde_json::to_string(t).expect("trace entries serialize");
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

enum Outcome {
    Child { child: NodeId, edge: usize, reward: f64, new: bool },
    Failed,
}

/// A running search. `run_search` drives it to the budget; tests can step
/// it or force expansions.
pub struct Search {
    cfg: SearchConfig,
    tree: SearchTree,
    params: ParamStatsStore,
    rng: ChaCha8Rng,
    patterns: Vec<Pattern>,
    trace: Vec<TraceEntry>,
    iteration: u64,
    model_actions: u64,
}

impl Search {
    pub fn new(d0: &Dataset, cfg: SearchConfig) -> Result<Self> {
        cfg.validate()?;
        let mut search = Search {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg,
            tree: SearchTree::default(),
            params: ParamStatsStore::new(),
            patterns: Vec::new(),
            trace: Vec::new(),
            iteration: 0,
            model_actions: 0,
        };
        let root = d0.empty_state();
        let key = canonical_state_key(&root, None);
        let mut node = search.make_node(key, root, None, 0.0);
        // The root's own simulation is its first visit.
        node.stats.record(0.0);
        search.tree.insert(node);
        Ok(search)
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }

    pub fn tree(&self) -> &SearchTree {
        &self.tree
    }

    pub fn params(&self) -> &ParamStatsStore {
        &self.params
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// Runs the remaining iterations of the budget.
    pub fn run(mut self) -> SearchResult {
        while self.iteration < self.cfg.iterations {
            self.step();
        }
        self.into_result()
    }

    pub fn into_result(self) -> SearchResult {
        SearchResult {
            patterns: self.patterns,
            iterations: self.iteration,
            node_count: self.tree.len(),
            model_action_count: self.model_actions,
            wall_time: None,
            trace: self.trace,
        }
    }

    /// One iteration.
    pub fn step(&mut self) {
        self.iteration += 1;
        let entry = self.iterate();
        self.trace.push(entry);
    }

    /// Applies `a` at the last node of `path` (a root-anchored chain of
    /// existing edges), links or creates the child and backpropagates.
    /// Returns the child, or an error if the action cannot be applied.
    pub fn expand_with(&mut self, path: &[NodeId], a: GroundAction) -> Result<NodeId> {
        if path.first() != Some(&ROOT) {
            return Err(Error::InvalidArgument("path must start at the root".into()));
        }
        let mut edges = Vec::new();
        let mut forms = Vec::new();
        for w in path.windows(2) {
            let i = self.tree.node(w[0]).edges.iter().position(|e| e.child == w[1]).ok_or_else(|| {
                Error::InvalidArgument(format!("no edge from node {} to node {}", w[0], w[1]))
            })?;
            forms.push(self.tree.node(w[0]).edges[i].action.canonical_form().to_owned());
            edges.push(i);
        }
        let form = a.canonical_form().to_owned();
        self.iteration += 1;
        match self.apply_and_link(path, &forms, a) {
            Outcome::Child { child, edge, reward, .. } => {
                let mut path = path.to_vec();
                path.push(child);
                edges.push(edge);
                self.backprop(&path, &edges, reward);
                Ok(child)
            }
            Outcome::Failed => {
                self.backprop(path, &edges, 0.0);
                Err(Error::InvalidArgument(format!("{form} could not be applied")))
            }
        }
    }

    fn make_node(
        &self,
        key: crate::actions::StateKey,
        dataset: Dataset,
        model: Option<FittedModel>,
        base_score: f64,
    ) -> SearchNode {
        let active = enumerate_templates(&dataset, model.as_ref())
            .into_iter()
            .filter(|t| self.cfg.allows(t.kind()))
            .collect();
        SearchNode {
            key,
            dataset,
            model: model.map(Arc::new),
            edges: Vec::new(),
            active,
            inactive: Vec::new(),
            stats: RewardStats::default(),
            base_score,
            failed: HashSet::new(),
            exhausted: false,
        }
    }

    fn entry(&self, path: Vec<String>, kind: Option<ActionKind>, reward: f64, stop: NodeId) -> TraceEntry {
        let node = self.tree.node(stop);
        TraceEntry {
            iteration: self.iteration,
            path,
            kind,
            reward,
            new_node: false,
            expanded: false,
            parent_visits: node.stats.visits,
            parent_children: node.edges.len(),
        }
    }

    fn iterate(&mut self) -> TraceEntry {
        loop {
            if self.tree.node(ROOT).exhausted {
                return self.entry(Vec::new(), None, 0.0, ROOT);
            }
            let mut path = vec![ROOT];
            let mut edges: Vec<usize> = Vec::new();
            let mut forms: Vec<String> = Vec::new();
            loop {
                let n = *path.last().expect("non-empty path");
                let node = self.tree.node(n);
                if self.cfg.expansion.gate_open(node.stats.visits, node.edges.len()) && !node.active.is_empty() {
                    let mut entry = self.entry(forms.clone(), None, 0.0, n);
                    if let Some((a, outcome)) = self.expand(&path, &forms) {
                        entry.kind = Some(a.kind());
                        entry.path.push(a.canonical_form().to_owned());
                        match outcome {
                            Outcome::Child { child, edge, reward, new } => {
                                path.push(child);
                                edges.push(edge);
                                self.backprop(&path, &edges, reward);
                                entry.reward = reward;
                                entry.new_node = new;
                                entry.expanded = true;
                            }
                            Outcome::Failed => self.backprop(&path, &edges, 0.0),
                        }
                        return entry;
                    }
                }
                let node = self.tree.node(n);
                let open: Vec<usize> = (0..node.edges.len())
                    .filter(|&i| {
                        let c = node.edges[i].child;
                        !self.tree.node(c).exhausted && !path.contains(&c)
                    })
                    .collect();
                if !open.is_empty() {
                    let views: Vec<ChildView<'_>> = open
                        .iter()
                        .map(|&i| {
                            let e = &node.edges[i];
                            ChildView {
                                form: e.action.canonical_form(),
                                edge: e.stats,
                                child: self.tree.node(e.child).stats,
                            }
                        })
                        .collect();
                    let pick = open[select_child(node.stats.visits, &views, &self.cfg, &mut self.rng)];
                    forms.push(node.edges[pick].action.canonical_form().to_owned());
                    path.push(node.edges[pick].child);
                    edges.push(pick);
                    continue;
                }
                if !node.active.is_empty() && matches!(self.cfg.expansion, Expansion::ProgressiveWidening { .. }) {
                    // Closed gate over an exhausted frontier: re-evaluate the
                    // node so its visit count can reopen the gate.
                    let reward = node.base_score;
                    let entry = self.entry(forms, None, reward, n);
                    self.backprop(&path, &edges, reward);
                    return entry;
                }
                self.tree.node_mut(n).exhausted = true;
                break;
            }
        }
    }

    /// Instantiates an action at the end of `path` and applies it; `None`
    /// once every template is exhausted.
    fn expand(&mut self, path: &[NodeId], forms: &[String]) -> Option<(GroundAction, Outcome)> {
        let n = *path.last().expect("non-empty path");
        let policy = self.cfg.parameter_policy();
        loop {
            let node = self.tree.node(n);
            if node.active.is_empty() {
                return None;
            }
            let ti = self.rng.random_range(0..node.active.len());
            let template = node.active[ti];
            let mut taken: HashSet<String> = node.dataset.lineage_forms().into_iter().collect();
            taken.extend(node.edges.iter().map(|e| e.action.canonical_form().to_owned()));
            taken.extend(node.failed.iter().cloned());
            let ctx = PreconditionContext {
                taken,
                min_rows: self.cfg.min_rows,
            };
            match instantiate(&template, &node.dataset, &ctx, policy, &self.params, &mut self.rng) {
                Ok(a) => {
                    let outcome = self.apply_and_link(path, forms, a.clone());
                    return Some((a, outcome));
                }
                Err(_) => {
                    let node = self.tree.node_mut(n);
                    node.active.remove(ti);
                    node.inactive.push(template);
                }
            }
        }
    }

    fn apply_and_link(&mut self, path: &[NodeId], forms: &[String], a: GroundAction) -> Outcome {
        let n = *path.last().expect("non-empty path");
        let form = a.canonical_form().to_owned();
        let parent = &self.tree.node(n).dataset;
        let applied = if a.kind().is_model() {
            self.model_actions += 1;
            fit_with(parent, &a, &self.cfg.intr).and_then(|m| Ok((m.dataset_after(parent)?, Some(m))))
        } else {
            apply_data_action(parent, &a).map(|d| (d, None))
        };
        let Ok((dataset, model)) = applied else {
            self.tree.node_mut(n).failed.insert(form);
            return Outcome::Failed;
        };
        let key = canonical_state_key(&dataset, model.as_ref());
        let action = Arc::new(a);
        let (child, reward, new) = match self.tree.lookup(&key) {
            Some(existing) if path.contains(&existing) => {
                self.tree.node_mut(n).failed.insert(form);
                return Outcome::Failed;
            }
            Some(existing) => (existing, self.tree.node(existing).base_score, false),
            None => {
                let reward = match &model {
                    Some(m) => intr(m, &self.cfg.intr),
                    None if self.cfg.random_simulation => self.rng.random::<f64>(),
                    None => simulate_score(&dataset, &self.cfg.intr).map_or(0.0, |s| s.total),
                };
                if let Some(m) = &model {
                    if reward > self.cfg.intr.success_threshold {
                        let mut state_path = forms.to_vec();
                        state_path.push(form);
                        let mut p = render_pattern(m, reward, &state_path);
                        p.state_key = key.as_str().to_owned();
                        p.iteration = self.iteration;
                        self.patterns.push(p);
                    }
                }
                let node = self.make_node(key, dataset, model, reward);
                (self.tree.insert(node), reward, true)
            }
        };
        let edges = &mut self.tree.node_mut(n).edges;
        edges.push(Edge {
            action,
            child,
            stats: RewardStats::default(),
        });
        Outcome::Child {
            child,
            edge: edges.len() - 1,
            reward,
            new,
        }
    }

    fn backprop(&mut self, path: &[NodeId], edges: &[usize], reward: f64) {
        let reward = reward.clamp(0.0, 1.0);
        for &n in path {
            self.tree.node_mut(n).stats.record(reward);
        }
        for (i, &e) in edges.iter().enumerate() {
            self.tree.node_mut(path[i]).edges[e].stats.record(reward);
        }
        let backprop = self.cfg.backprop;
        for (i, &e) in edges.iter().enumerate() {
            let parent = self.tree.node(path[i]);
            let delta = self.tree.node(path[i + 1]).stats.q(backprop) - parent.stats.q(backprop);
            let action = Arc::clone(&parent.edges[e].action);
            self.params.record(&action, delta);
        }
    }
}

/// Runs `cfg.iterations` iterations from the empty state of `d0`.
pub fn run_search(d0: &Dataset, cfg: &SearchConfig) -> Result<SearchResult> {
    Ok(Search::new(d0, cfg.clone())?.run())
}
