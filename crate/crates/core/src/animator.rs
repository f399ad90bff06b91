//! Deterministic scheduler for multi-tick operations.
//!
//! An operation is an explicit state machine ([`Step`]) that, each time it is
//! advanced, either yields a [`YieldPoint`] or completes with a [`Value`].
//! Ops are queued per owner sketch; only the head of an owner's queue runs,
//! and it is advanced at most once per tick. Each advance is transactional:
//! if a step faults, the owner's state is rolled back to what it was at the
//! previous yield.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::value::Value;
use crate::{SketchId, Tick};

/// Longest single pause, in ticks (10 s at 60 ticks/s).
pub const MAX_PAUSE: u32 = 600;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum YieldPoint {
    /// Resume after this many ticks.
    Pause(u32),
    /// Redraw now, resume next tick.
    Frame,
    /// Hold until the user resumes.
    Breakpoint(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Advance {
    Yield(YieldPoint),
    Complete(Value),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct OpFault(pub String);

impl OpFault {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

/// One suspendable operation over a target state `S`.
pub trait Step<S>: Send {
    fn label(&self) -> String;
    fn advance(&mut self, target: &mut S, now: Tick) -> Result<Advance, OpFault>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpStatus {
    Queued,
    Running,
    PausedUntil(Tick),
    AtBreakpoint(String),
    Done,
}

pub type OpId = u64;

pub struct ResumableOp<S> {
    pub id: OpId,
    pub owner: SketchId,
    pub status: OpStatus,
    step: Box<dyn Step<S>>,
}

impl<S> ResumableOp<S> {
    pub fn label(&self) -> String {
        self.step.label()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpOutcome {
    Completed(Value),
    Faulted(OpFault),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinishedOp {
    pub id: OpId,
    pub owner: SketchId,
    pub label: String,
    pub tick: Tick,
    pub outcome: OpOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnimatorError {
    #[error("sketch {0} has no operation waiting at a breakpoint")]
    NoBreakpointActive(SketchId),
}

/// Resolves an owner id to the state its ops mutate.
pub trait OpHost<S> {
    fn op_target(&mut self, owner: SketchId) -> Option<&mut S>;
}

impl<S> OpHost<S> for BTreeMap<SketchId, S> {
    fn op_target(&mut self, owner: SketchId) -> Option<&mut S> {
        self.get_mut(&owner)
    }
}

/// Per-owner FIFO queues of resumable ops.
pub struct OpQueue<S> {
    lanes: BTreeMap<SketchId, VecDeque<ResumableOp<S>>>,
    next_id: OpId,
    finished: Vec<FinishedOp>,
}

impl<S> Default for OpQueue<S> {
    fn default() -> Self {
        Self {
            lanes: BTreeMap::new(),
            next_id: 1,
            finished: Vec::new(),
        }
    }
}

impl<S: Clone> OpQueue<S> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends an op to its owner's queue; it starts once it reaches the head.
    pub fn enqueue(&mut self, owner: SketchId, step: Box<dyn Step<S>>) -> OpId {
        let id = self.next_id;
        self.next_id += 1;
        self.lanes.entry(owner).or_default().push_back(ResumableOp {
            id,
            owner,
            status: OpStatus::Queued,
            step,
        });
        id
    }

    /// Advances every owner's head op that is due at `now`.
    pub fn tick_ops(&mut self, now: Tick, host: &mut impl OpHost<S>) {
        let owners: Vec<SketchId> = self.lanes.keys().copied().collect();
        for owner in owners {
            let lane = self.lanes.get_mut(&owner).expect("owner listed");
            let Some(head) = lane.front_mut() else {
                self.lanes.remove(&owner);
                continue;
            };
            let due = match head.status {
                OpStatus::Queued | OpStatus::Running => true,
                OpStatus::PausedUntil(t) => t <= now,
                OpStatus::AtBreakpoint(_) | OpStatus::Done => false,
            };
            if !due {
                continue;
            }
            let Some(target) = host.op_target(owner) else {
                // Owner vanished; its queued work goes with it.
                self.lanes.remove(&owner);
                continue;
            };
            head.status = OpStatus::Running;
            let checkpoint = target.clone();
            let result = match head.step.advance(target, now) {
                Ok(Advance::Yield(YieldPoint::Pause(k))) if k == 0 || k > MAX_PAUSE => Err(
                    OpFault::new(format!("pause of {k} ticks outside 1..={MAX_PAUSE}")),
                ),
                other => other,
            };
            let outcome = match result {
                Ok(Advance::Yield(y)) => {
                    head.status = match y {
                        YieldPoint::Pause(k) => OpStatus::PausedUntil(now + k as Tick),
                        YieldPoint::Frame => OpStatus::PausedUntil(now + 1),
                        YieldPoint::Breakpoint(tag) => OpStatus::AtBreakpoint(tag),
                    };
                    None
                }
                Ok(Advance::Complete(v)) => Some(OpOutcome::Completed(v)),
                Err(fault) => {
                    *target = checkpoint;
                    Some(OpOutcome::Faulted(fault))
                }
            };
            if let Some(outcome) = outcome {
                let mut op = lane.pop_front().expect("head exists");
                op.status = OpStatus::Done;
                self.finished.push(FinishedOp {
                    id: op.id,
                    owner,
                    label: op.label(),
                    tick: now,
                    outcome,
                });
                if lane.is_empty() {
                    self.lanes.remove(&owner);
                }
            }
        }
    }

    /// Releases the owner's head op from a breakpoint; it advances on the
    /// next call to [`tick_ops`](Self::tick_ops).
    pub fn resume_breakpoint(&mut self, owner: SketchId) -> Result<(), AnimatorError> {
        match self.lanes.get_mut(&owner).and_then(|l| l.front_mut()) {
            Some(op) if matches!(op.status, OpStatus::AtBreakpoint(_)) => {
                op.status = OpStatus::Running;
                Ok(())
            }
            _ => Err(AnimatorError::NoBreakpointActive(owner)),
        }
    }
}

impl<S> OpQueue<S> {
    pub fn is_idle(&self, owner: SketchId) -> bool {
        self.lanes.get(&owner).map_or(true, |l| l.is_empty())
    }

    pub fn head_status(&self, owner: SketchId) -> Option<&OpStatus> {
        self.lanes.get(&owner)?.front().map(|op| &op.status)
    }

    pub fn head(&self, owner: SketchId) -> Option<&ResumableOp<S>> {
        self.lanes.get(&owner)?.front()
    }

    pub fn pending(&self, owner: SketchId) -> usize {
        self.lanes.get(&owner).map_or(0, |l| l.len())
    }

    pub fn is_empty(&self) -> bool {
        self.lanes.values().all(|l| l.is_empty())
    }

    /// Drops every op belonging to `owner`.
    pub fn drop_owner(&mut self, owner: SketchId) {
        self.lanes.remove(&owner);
    }

    /// Drains the log of completed and faulted ops.
    pub fn take_finished(&mut self) -> Vec<FinishedOp> {
        std::mem::take(&mut self.finished)
    }
}

/// Smoothstep blend from `a` to `b`; `t` is clamped to [0, 1].
pub fn interpolate(a: f64, b: f64, t: f64) -> f64 {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    a + (b - a) * (t * t * (3.0 - 2.0 * t))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Replays a fixed list of yields, bumping a counter each advance.
    struct Scripted {
        yields: Vec<YieldPoint>,
        at: usize,
    }

    impl Scripted {
        fn new(yields: Vec<YieldPoint>) -> Box<Self> {
            Box::new(Self { yields, at: 0 })
        }
    }

    impl Step<u32> for Scripted {
        fn label(&self) -> String {
            "scripted".into()
        }
        fn advance(&mut self, target: &mut u32, _now: Tick) -> Result<Advance, OpFault> {
            *target += 1;
            let y = self.yields.get(self.at).cloned();
            self.at += 1;
            Ok(match y {
                Some(y) => Advance::Yield(y),
                None => Advance::Complete(Value::Int(*target as i64)),
            })
        }
    }

    fn run_until_idle(q: &mut OpQueue<u32>, host: &mut BTreeMap<SketchId, u32>, from: Tick) -> Tick {
        let mut now = from;
        while !q.is_empty() {
            q.tick_ops(now, host);
            now += 1;
            assert!(now < from + 10_000);
        }
        now - 1
    }

    #[test]
    fn five_frames_take_five_ticks() {
        let mut q = OpQueue::new();
        let mut host = BTreeMap::from([(1, 0u32)]);
        q.enqueue(1, Scripted::new(vec![YieldPoint::Frame; 5]));
        let done = run_until_idle(&mut q, &mut host, 10);
        assert_eq!(done, 15);
        assert_eq!(host[&1], 6);
    }

    #[test]
    fn pause_sets_resume_tick() {
        let mut q = OpQueue::new();
        let mut host = BTreeMap::from([(1, 0u32)]);
        q.enqueue(1, Scripted::new(vec![YieldPoint::Pause(30)]));
        q.tick_ops(100, &mut host);
        assert_eq!(q.head_status(1), Some(&OpStatus::PausedUntil(130)));
        q.tick_ops(129, &mut host);
        assert_eq!(host[&1], 1);
        q.tick_ops(130, &mut host);
        assert!(q.is_idle(1));
    }

    #[test]
    fn per_owner_fifo() {
        let mut q = OpQueue::new();
        let mut host = BTreeMap::from([(1, 0u32), (2, 0u32)]);
        let first = q.enqueue(1, Scripted::new(vec![YieldPoint::Pause(3)]));
        let second = q.enqueue(1, Scripted::new(vec![]));
        let other = q.enqueue(2, Scripted::new(vec![]));
        q.tick_ops(0, &mut host);
        // Both owners advance in the same tick; owner 1's second op waits.
        assert_eq!(host[&1], 1);
        assert_eq!(host[&2], 1);
        assert_eq!(q.head(1).unwrap().id, first);
        q.tick_ops(3, &mut host);
        assert_eq!(q.head(1).unwrap().id, second);
        assert_eq!(q.head(1).unwrap().status, OpStatus::Queued);
        q.tick_ops(4, &mut host);
        let ids: Vec<_> = q.take_finished().iter().map(|f| f.id).collect();
        assert_eq!(ids, vec![other, first, second]);
    }

    #[test]
    fn breakpoints_need_one_resume_each() {
        let mut q = OpQueue::new();
        let mut host = BTreeMap::from([(7, 0u32)]);
        q.enqueue(
            7,
            Scripted::new(vec![
                YieldPoint::Breakpoint("a".into()),
                YieldPoint::Breakpoint("b".into()),
            ]),
        );
        q.tick_ops(0, &mut host);
        for t in 1..50 {
            q.tick_ops(t, &mut host);
        }
        assert_eq!(host[&7], 1);
        q.resume_breakpoint(7).unwrap();
        q.tick_ops(50, &mut host);
        assert_eq!(q.head_status(7), Some(&OpStatus::AtBreakpoint("b".into())));
        q.resume_breakpoint(7).unwrap();
        q.tick_ops(51, &mut host);
        assert!(q.is_idle(7));
    }

    #[test]
    fn resume_without_breakpoint_errors() {
        let mut q: OpQueue<u32> = OpQueue::new();
        assert_eq!(q.resume_breakpoint(3), Err(AnimatorError::NoBreakpointActive(3)));
        q.enqueue(3, Scripted::new(vec![]));
        assert_eq!(q.resume_breakpoint(3), Err(AnimatorError::NoBreakpointActive(3)));
    }

    struct Faulty;
    impl Step<u32> for Faulty {
        fn label(&self) -> String {
            "faulty".into()
        }
        fn advance(&mut self, target: &mut u32, _now: Tick) -> Result<Advance, OpFault> {
            *target = 999;
            Err(OpFault::new("boom"))
        }
    }

    #[test]
    fn fault_rolls_back_and_pops() {
        let mut q = OpQueue::new();
        let mut host = BTreeMap::from([(1, 5u32)]);
        q.enqueue(1, Box::new(Faulty));
        q.enqueue(1, Scripted::new(vec![]));
        q.tick_ops(0, &mut host);
        assert_eq!(host[&1], 5);
        let f = q.take_finished();
        assert_eq!(f[0].outcome, OpOutcome::Faulted(OpFault::new("boom")));
        q.tick_ops(1, &mut host);
        assert_eq!(host[&1], 6);
    }

    #[test]
    fn oversized_pause_faults() {
        let mut q = OpQueue::new();
        let mut host = BTreeMap::from([(1, 0u32)]);
        q.enqueue(1, Scripted::new(vec![YieldPoint::Pause(601)]));
        q.tick_ops(0, &mut host);
        assert_eq!(host[&1], 0);
        assert!(matches!(q.take_finished()[0].outcome, OpOutcome::Faulted(_)));
    }

    #[test]
    fn missing_owner_drops_lane() {
        let mut q = OpQueue::new();
        let mut host: BTreeMap<SketchId, u32> = BTreeMap::new();
        q.enqueue(4, Scripted::new(vec![]));
        q.tick_ops(0, &mut host);
        assert!(q.is_empty());
    }

    #[test]
    fn smoothstep_values() {
        assert_eq!(interpolate(0.0, 10.0, 0.0), 0.0);
        assert_eq!(interpolate(0.0, 10.0, 1.0), 10.0);
        assert_eq!(interpolate(0.0, 10.0, 0.5), 5.0);
        assert_eq!(interpolate(0.0, 10.0, -3.0), 0.0);
        assert_eq!(interpolate(0.0, 10.0, 7.0), 10.0);
    }
}
