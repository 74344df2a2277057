//! Decision procedure for `z₁c₁z₁⁻¹ ⋯ z_m c_m z_m⁻¹ = 1` in `M_n`.
//!
//! The equation is solvable iff there are `α₁ … α_m ∈ Z^n` such that the
//! shifted quotient chains `α_i · τ_Q(c_i)` cancel. A solution exists iff
//! one exists with every `|α_i|₁ ≤ B = 2 Σ |c_j|`, so both strategies search
//! that ball (up to `L_Q`-cosets, since shifting by `L_Q` is invisible in the
//! quotient).
//!
//! * [`Strategy::Exhaustive`] enumerates coset tuples directly; the last
//!   nontrivial constant is solved for by matching its support against the
//!   residual.
//! * [`Strategy::Backtracking`] grows zero-sum groups edge by edge: the least
//!   residual edge must be cancelled by a later placement, so it branches over
//!   every constant edge that can land on it with the opposite sign. When the
//!   residual empties the next constant is anchored at the origin, and a
//!   complete assignment is translated group by group into the ball.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{sigma, GridEdge, Point};
use crate::lattice::QuotientSpec;
use crate::quotient::QuotientChain;
use crate::words::GroupWord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphericalEquation {
    rank: usize,
    constants: Vec<GroupWord>,
}

impl SphericalEquation {
    pub fn new(rank: usize, constants: Vec<GroupWord>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        if constants.is_empty() {
            return Err(Error::EmptyEquation);
        }
        if let Some(c) = constants.iter().find(|c| c.rank() != rank) {
            return Err(Error::RankMismatch { left: rank, right: c.rank() });
        }
        Ok(SphericalEquation { rank, constants })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn constants(&self) -> &[GroupWord] {
        &self.constants
    }

    pub fn len(&self) -> usize {
        self.constants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constants.is_empty()
    }

    /// Sum of the lengths of the supplied representatives.
    pub fn total_length(&self) -> u64 {
        self.constants.iter().map(|c| c.len() as u64).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Certificate {
    pub alphas: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "VerdictRecord", try_from = "VerdictRecord")]
pub enum Verdict {
    Sat(Certificate),
    Unsat,
    /// The configured time limit ran out before the search finished.
    Timeout,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Sat(c) => Some(c),
            _ => None,
        }
    }

    pub fn status(&self) -> Status {
        match self {
            Verdict::Sat(_) => Status::Sat,
            Verdict::Unsat => Status::Unsat,
            Verdict::Timeout => Status::Timeout,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Sat,
    Unsat,
    Timeout,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::Timeout => "timeout",
        })
    }
}

/// Wire form: `{ "status": "sat"|"unsat"|"timeout", "certificate": ... }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub status: Status,
    pub certificate: Option<Certificate>,
}

impl From<Verdict> for VerdictRecord {
    fn from(v: Verdict) -> Self {
        let status = v.status();
        let certificate = match v {
            Verdict::Sat(c) => Some(c),
            _ => None,
        };
        VerdictRecord { status, certificate }
    }
}

impl TryFrom<VerdictRecord> for Verdict {
    type Error = String;

    fn try_from(r: VerdictRecord) -> std::result::Result<Self, String> {
        match (r.status, r.certificate) {
            (Status::Sat, Some(c)) => Ok(Verdict::Sat(c)),
            (Status::Sat, None) => Err("sat verdict without certificate".into()),
            (Status::Unsat, _) => Ok(Verdict::Unsat),
            (Status::Timeout, _) => Ok(Verdict::Timeout),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Exhaustive,
    #[default]
    Backtracking,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "backtracking" => Ok(Strategy::Backtracking),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::Backtracking => "backtracking",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub strategy: Strategy,
    pub timeout: Option<Duration>,
    /// Worker threads for the backtracking search; `None` or 1 runs inline.
    pub threads: Option<usize>,
}

impl SolveOptions {
    pub fn with_strategy(strategy: Strategy) -> Self {
        SolveOptions { strategy, ..Default::default() }
    }
}

/// Canonical coset representatives of the radius-`B` ball: for each coset
/// meeting the ball, its least point by `(|·|₁, lexicographic)`.
#[derive(Debug)]
struct BallCosets {
    reps: Vec<Point>,
    by_coset: HashMap<Point, usize>,
}

pub struct SolverInstance {
    equation: SphericalEquation,
    spec: Arc<QuotientSpec>,
    taus: Vec<QuotientChain>,
    bound: u64,
    ball: OnceLock<BallCosets>,
}

impl fmt::Debug for SolverInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolverInstance")
            .field("equation", &self.equation)
            .field("basis", &self.spec.basis())
            .field("bound", &self.bound)
            .finish()
    }
}

impl SolverInstance {
    pub fn new(equation: SphericalEquation) -> Result<Self> {
        let rank = equation.rank();
        let sigmas: Vec<_> = equation.constants().iter().map(sigma).collect();
        let gens: Vec<Point> = sigmas.iter().map(|s| s.endpoint.clone()).collect();
        let spec = Arc::new(QuotientSpec::build(&gens, rank)?);
        let taus = sigmas
            .iter()
            .map(|s| QuotientChain::tau(s, spec.clone()))
            .collect::<Result<Vec<_>>>()?;
        let bound = 2 * equation.total_length();
        Ok(SolverInstance { equation, spec, taus, bound, ball: OnceLock::new() })
    }

    pub fn equation(&self) -> &SphericalEquation {
        &self.equation
    }

    pub fn spec(&self) -> &Arc<QuotientSpec> {
        &self.spec
    }

    pub fn taus(&self) -> &[QuotientChain] {
        &self.taus
    }

    /// `B = 2 Σ_j |c_j|`.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn rank(&self) -> usize {
        self.equation.rank()
    }

    /// `Σ_i α_i · τ_Q(c_i)`.
    pub fn shifted_sum(&self, alphas: &[Point]) -> Result<QuotientChain> {
        if alphas.len() != self.taus.len() {
            return Err(Error::LengthMismatch { expected: self.taus.len(), got: alphas.len() });
        }
        let mut acc: BTreeMap<GridEdge, i64> = BTreeMap::new();
        for (t, a) in self.taus.iter().zip(alphas) {
            for (e, c) in t.shift(a)?.terms() {
                accumulate(&mut acc, e, *c);
            }
        }
        Ok(QuotientChain::from_sorted_terms(self.spec.clone(), acc.into_iter().collect()))
    }

    fn ball(&self) -> &BallCosets {
        self.ball.get_or_init(|| {
            let mut pts = Vec::new();
            let mut cur = vec![0i64; self.rank()];
            ball_points(&mut cur, 0, self.bound as i64, &mut pts);
            pts.sort_by(|a, b| a.l1_norm().cmp(&b.l1_norm()).then_with(|| a.cmp(b)));
            let mut reps = Vec::new();
            let mut by_coset = HashMap::new();
            for p in pts {
                let c = self.canon(&p);
                if let std::collections::hash_map::Entry::Vacant(slot) = by_coset.entry(c) {
                    slot.insert(reps.len());
                    reps.push(p);
                }
            }
            BallCosets { reps, by_coset }
        })
    }

    fn canon(&self, p: &Point) -> Point {
        let mut c = p.clone();
        self.spec.reduce_in_place(&mut c);
        c
    }

    /// The representative of `coset` inside the ball, if the coset meets it.
    fn ball_rep(&self, coset: &Point) -> Option<Point> {
        if self.spec.is_trivial() {
            return (coset.l1_norm() <= self.bound).then(|| coset.clone());
        }
        let ball = self.ball();
        ball.by_coset.get(&self.canon(coset)).map(|&i| ball.reps[i].clone())
    }

    /// Number of cosets of `L_Q` meeting the radius-`B` ball.
    pub fn ball_coset_count(&self) -> usize {
        self.ball().reps.len()
    }
}

fn ball_points(cur: &mut Vec<i64>, i: usize, budget: i64, out: &mut Vec<Point>) {
    if i == cur.len() {
        out.push(Point::new(cur.clone()));
        return;
    }
    for x in -budget..=budget {
        cur[i] = x;
        ball_points(cur, i + 1, budget - x.abs(), out);
    }
    cur[i] = 0;
}

/// Adds `c` at `e`; returns the change in total absolute mass.
fn accumulate(acc: &mut BTreeMap<GridEdge, i64>, e: &GridEdge, c: i64) -> i64 {
    use std::collections::btree_map::Entry;
    match acc.entry(e.clone()) {
        Entry::Vacant(slot) => {
            slot.insert(c);
            c.abs()
        }
        Entry::Occupied(mut slot) => {
            let old = *slot.get();
            let v = old.checked_add(c).expect("chain coefficient overflow");
            if v == 0 {
                slot.remove();
            } else {
                *slot.get_mut() = v;
            }
            v.abs() - old.abs()
        }
    }
}

fn mass(t: &QuotientChain) -> i64 {
    t.terms().iter().map(|(_, c)| c.abs()).sum()
}

pub fn build_instance(eq: SphericalEquation) -> Result<SolverInstance> {
    SolverInstance::new(eq)
}

/// Accepts iff every `|α_i|₁ ≤ B` and the shifted chains cancel.
pub fn verify_certificate(inst: &SolverInstance, cert: &Certificate) -> Result<bool> {
    if cert.alphas.len() != inst.taus.len() {
        return Err(Error::LengthMismatch { expected: inst.taus.len(), got: cert.alphas.len() });
    }
    for a in &cert.alphas {
        a.check_rank(inst.rank())?;
    }
    if cert.alphas.iter().any(|a| a.l1_norm() > inst.bound) {
        return Ok(false);
    }
    Ok(inst.shifted_sum(&cert.alphas)?.is_zero())
}

pub fn solve(inst: &SolverInstance, opts: &SolveOptions) -> Verdict {
    let deadline = opts.timeout.map(|t| Instant::now() + t);
    let verdict = match opts.strategy {
        Strategy::Exhaustive => Exhaustive::new(inst, deadline).run(),
        Strategy::Backtracking => Backtrack::new(inst, deadline).run(opts.threads.unwrap_or(1)),
    };
    if let Verdict::Sat(cert) = &verdict {
        debug_assert!(verify_certificate(inst, cert).unwrap_or(false), "emitted certificate must verify");
    }
    verdict
}

/// Conjugacy in `M_n` as the two-constant equation with constants `(u, w⁻¹)`.
pub fn solve_conjugacy(u: &GroupWord, w: &GroupWord) -> Result<bool> {
    let eq = SphericalEquation::new(u.rank(), vec![u.clone(), w.inverse()])?;
    let inst = SolverInstance::new(eq)?;
    Ok(solve(&inst, &SolveOptions::default()).is_sat())
}

struct Clock {
    deadline: Option<Instant>,
    ticks: AtomicU64,
    expired: AtomicBool,
}

impl Clock {
    fn new(deadline: Option<Instant>) -> Self {
        Clock { deadline, ticks: AtomicU64::new(0), expired: AtomicBool::new(false) }
    }

    fn expired(&self) -> bool {
        if self.expired.load(Ordering::Relaxed) {
            return true;
        }
        let Some(deadline) = self.deadline else { return false };
        if self.ticks.fetch_add(1, Ordering::Relaxed) % 256 == 0 && Instant::now() >= deadline {
            self.expired.store(true, Ordering::Relaxed);
        }
        self.expired.load(Ordering::Relaxed)
    }
}

/// Indices of constants with nonempty `τ`; the rest sit at the origin.
fn active_constants(inst: &SolverInstance) -> Vec<usize> {
    (0..inst.taus.len()).filter(|&i| !inst.taus[i].is_zero()).collect()
}

struct Exhaustive<'a> {
    inst: &'a SolverInstance,
    active: Vec<usize>,
    clock: Clock,
}

impl<'a> Exhaustive<'a> {
    fn new(inst: &'a SolverInstance, deadline: Option<Instant>) -> Self {
        Exhaustive { inst, active: active_constants(inst), clock: Clock::new(deadline) }
    }

    fn run(self) -> Verdict {
        let m = self.inst.taus.len();
        let mut alphas = vec![Point::zero(self.inst.rank()); m];
        if self.active.is_empty() {
            return Verdict::Sat(Certificate { alphas });
        }
        if self.active.len() == 1 {
            return Verdict::Unsat;
        }
        let residual = BTreeMap::new();
        match self.descend(0, residual, &mut alphas) {
            Some(true) => Verdict::Sat(Certificate { alphas }),
            Some(false) => Verdict::Unsat,
            None => Verdict::Timeout,
        }
    }

    /// `None` on timeout.
    fn descend(&self, depth: usize, residual: BTreeMap<GridEdge, i64>, alphas: &mut [Point]) -> Option<bool> {
        if self.clock.expired() {
            return None;
        }
        let idx = self.active[depth];
        let tau = &self.inst.taus[idx];
        if depth + 1 == self.active.len() {
            return Some(self.close(tau, &residual).map(|a| alphas[idx] = a).is_some());
        }
        for rep in &self.inst.ball().reps {
            let mut next = residual.clone();
            for (e, c) in tau.shift(rep).expect("rank checked").terms() {
                accumulate(&mut next, e, *c);
            }
            alphas[idx] = rep.clone();
            if self.descend(depth + 1, next, alphas)? {
                return Some(true);
            }
        }
        Some(false)
    }

    /// A ball coset `α` with `α · tau = -residual`. Any such shift maps some
    /// support edge of `tau` onto the least residual edge.
    fn close(&self, tau: &QuotientChain, residual: &BTreeMap<GridEdge, i64>) -> Option<Point> {
        let (target, _) = residual.first_key_value()?;
        let want: Vec<(GridEdge, i64)> = residual.iter().map(|(e, c)| (e.clone(), -c)).collect();
        let mut seen = HashSet::new();
        let mut found: Option<Point> = None;
        for (f, _) in tau.terms().iter().filter(|(f, _)| f.dir == target.dir) {
            let coset = self.inst.canon(&(&target.base - &f.base));
            if !seen.insert(coset.clone()) {
                continue;
            }
            let Some(rep) = self.inst.ball_rep(&coset) else { continue };
            if tau.shift(&rep).expect("rank checked").terms() == want.as_slice() {
                // Deterministic choice among matches: least in ball order.
                let better = match &found {
                    None => true,
                    Some(cur) => (rep.l1_norm(), &rep) < (cur.l1_norm(), cur),
                };
                if better {
                    found = Some(rep);
                }
            }
        }
        found
    }
}

#[derive(Clone)]
struct SearchState {
    /// Canonical coset of each placed constant.
    placed: Vec<Option<Point>>,
    residual: BTreeMap<GridEdge, i64>,
    residual_mass: i64,
    /// Total mass of the unplaced constants; one placement cancels at most
    /// its own mass.
    open_mass: i64,
    /// Placement order; `true` marks an anchor that starts a new zero-sum group.
    order: Vec<(usize, bool)>,
}

struct Backtrack<'a> {
    inst: &'a SolverInstance,
    active: Vec<usize>,
    /// For each constant, the least index with an identical `τ`.
    class: Vec<usize>,
    clock: Clock,
}

enum Step {
    Found(Vec<Point>),
    Exhausted,
    TimedOut,
}

impl<'a> Backtrack<'a> {
    fn new(inst: &'a SolverInstance, deadline: Option<Instant>) -> Self {
        let class = (0..inst.taus.len())
            .map(|i| (0..=i).find(|&j| inst.taus[j] == inst.taus[i]).unwrap())
            .collect();
        Backtrack { inst, active: active_constants(inst), class, clock: Clock::new(deadline) }
    }

    fn run(self, threads: usize) -> Verdict {
        let m = self.inst.taus.len();
        if self.active.is_empty() {
            return Verdict::Sat(Certificate { alphas: vec![Point::zero(self.inst.rank()); m] });
        }
        let open_mass = self.active.iter().map(|&i| mass(&self.inst.taus[i])).sum();
        let mut state = SearchState {
            placed: vec![None; m],
            residual: BTreeMap::new(),
            residual_mass: 0,
            open_mass,
            order: Vec::new(),
        };
        self.place(&mut state, self.active[0], Point::zero(self.inst.rank()), true);
        let step = if threads > 1 {
            self.run_parallel(state, threads)
        } else {
            self.dfs(&mut state)
        };
        match step {
            Step::Found(alphas) => Verdict::Sat(Certificate { alphas }),
            Step::Exhausted if self.clock.expired.load(Ordering::Relaxed) => Verdict::Timeout,
            Step::Exhausted => Verdict::Unsat,
            Step::TimedOut => Verdict::Timeout,
        }
    }

    /// Sibling branches below the root anchor run on a pool; the first hit
    /// in branch order wins, so the certificate matches the serial search.
    fn run_parallel(&self, state: SearchState, threads: usize) -> Step {
        if state.residual.is_empty() {
            let mut state = state;
            return self.dfs(&mut state);
        }
        let branches = self.branches(&state);
        let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(p) => p,
            Err(_) => {
                let mut state = state;
                return self.dfs(&mut state);
            }
        };
        let results: Vec<Step> = pool.install(|| {
            branches
                .par_iter()
                .map(|(i, alpha)| {
                    let mut st = state.clone();
                    self.place(&mut st, *i, alpha.clone(), false);
                    self.dfs(&mut st)
                })
                .collect()
        });
        let mut timed_out = false;
        for r in results {
            match r {
                Step::Found(a) => return Step::Found(a),
                Step::TimedOut => timed_out = true,
                Step::Exhausted => {}
            }
        }
        if timed_out {
            Step::TimedOut
        } else {
            Step::Exhausted
        }
    }

    fn place(&self, st: &mut SearchState, i: usize, alpha: Point, anchor: bool) {
        for (e, c) in self.inst.taus[i].shift(&alpha).expect("rank checked").terms() {
            st.residual_mass += accumulate(&mut st.residual, e, *c);
        }
        st.open_mass -= mass(&self.inst.taus[i]);
        st.placed[i] = Some(alpha);
        st.order.push((i, anchor));
    }

    fn unplace(&self, st: &mut SearchState) {
        let (i, _) = st.order.pop().expect("nonempty placement stack");
        let alpha = st.placed[i].take().expect("placed");
        for (e, c) in self.inst.taus[i].shift(&alpha).expect("rank checked").terms() {
            st.residual_mass += accumulate(&mut st.residual, e, -c);
        }
        st.open_mass += mass(&self.inst.taus[i]);
    }

    /// Unplaced active constants, one per class of identical chains.
    fn remaining(&self, st: &SearchState) -> Vec<usize> {
        let mut seen = HashSet::new();
        self.active
            .iter()
            .copied()
            .filter(|&i| st.placed[i].is_none() && seen.insert(self.class[i]))
            .collect()
    }

    fn branches(&self, st: &SearchState) -> Vec<(usize, Point)> {
        let (target, &coef) = st.residual.first_key_value().expect("nonempty residual");
        let mut out = Vec::new();
        for i in self.remaining(st) {
            let mut seen = HashSet::new();
            for (f, c) in self.inst.taus[i].terms() {
                if f.dir != target.dir || c.signum() == coef.signum() {
                    continue;
                }
                let alpha = self.inst.canon(&(&target.base - &f.base));
                if seen.insert(alpha.clone()) {
                    out.push((i, alpha));
                }
            }
        }
        out
    }

    fn dfs(&self, st: &mut SearchState) -> Step {
        if self.clock.expired() {
            return Step::TimedOut;
        }
        if st.residual.is_empty() {
            let remaining = self.remaining(st);
            let Some(&next) = remaining.first() else {
                return match self.fit_into_ball(st) {
                    Some(a) => Step::Found(a),
                    None => Step::Exhausted,
                };
            };
            self.place(st, next, Point::zero(self.inst.rank()), true);
            let r = self.dfs(st);
            self.unplace(st);
            return r;
        }
        if st.residual_mass > st.open_mass {
            return Step::Exhausted;
        }
        for (i, alpha) in self.branches(st) {
            self.place(st, i, alpha, false);
            let r = self.dfs(st);
            self.unplace(st);
            match r {
                Step::Exhausted => {}
                other => return other,
            }
        }
        Step::Exhausted
    }

    /// Each zero-sum group may be translated independently; look for a
    /// translation putting every member inside the ball.
    fn fit_into_ball(&self, st: &SearchState) -> Option<Vec<Point>> {
        let m = self.inst.taus.len();
        let mut alphas = vec![Point::zero(self.inst.rank()); m];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &(i, anchor) in &st.order {
            if anchor {
                groups.push(Vec::new());
            }
            groups.last_mut().expect("first placement is an anchor").push(i);
        }
        for group in groups {
            let coset = |i: usize| st.placed[i].clone().expect("placed");
            let translate = |beta: &Point| -> Option<Vec<Point>> {
                group.iter().map(|&i| self.inst.ball_rep(&(&coset(i) + beta))).collect()
            };
            let zero = Point::zero(self.inst.rank());
            let fitted = translate(&zero).or_else(|| {
                let head = coset(group[0]);
                self.inst.ball().reps.iter().find_map(|g| translate(&(g - &head)))
            })?;
            for (&i, a) in group.iter().zip(fitted) {
                alphas[i] = a;
            }
        }
        Some(alphas)
    }
}
