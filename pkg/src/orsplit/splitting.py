"""Labels, common-frontier detection, stack splitting and share payloads.

Choice-points are ordered *bottom-first* in this module: the newest
(deepest) choice-point comes first, matching a search tree drawn with the
root on top. A giver always keeps its own running branch, so under
vertical-block splitting the receiver's work is strictly older than, and
therefore to the right of, everything the giver keeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .engine import ChoicePoint, CorruptionError, Engine

HORIZONTAL = "horizontal"
VERTICAL_ALTERNATE = "vertical_alternate"
VERTICAL_BLOCK = "vertical_block"
STRATEGIES = (HORIZONTAL, VERTICAL_ALTERNATE, VERTICAL_BLOCK)

FULL = "full"
INCREMENTAL = "incremental"


class Label(NamedTuple):
    rank: int
    counter: int
    cp_index: int


@dataclass
class LabelStack:
    labels: list
    counter: int


def label_stack(engine: Engine) -> LabelStack:
    """Labels of the parallel choice-points, oldest first, up to the first unlabeled one."""
    labels = []
    for cp in engine.cps:
        if cp.parallel:
            if cp.label is None:
                break
            labels.append(cp.label)
    return LabelStack(labels, engine.label_counter)


def label_parallel_choicepoints(engine: Engine, rank: int) -> LabelStack:
    created = False
    index = 0
    for cp in engine.cps:
        if cp.parallel:
            if cp.label is None:
                cp.label = Label(rank, engine.label_counter, index)
                created = True
            index += 1
    if created:
        engine.label_counter += 1
    return label_stack(engine)


def invalidate_labels(engine: Engine) -> LabelStack:
    for cp in engine.cps:
        cp.label = None
    return LabelStack([], engine.label_counter)


def find_common_frontier(giver_labels, receiver_labels) -> Optional[Label]:
    """Deepest label of the longest common prefix, or None."""
    common = None
    for a, b in zip(giver_labels, receiver_labels):
        if a != b:
            break
        common = a
    return common


# ---------------------------------------------------------------- splitting


def split(strategy: str, alternatives: list, ratio: float = 0.5):
    """Divide per-choice-point alternatives between giver (keep) and receiver (give).

    ``alternatives`` is a bottom-first list of alternative lists. Returns two
    lists aligned with it.
    """
    n = len(alternatives)
    keep: list = []
    give: list = []
    if strategy == HORIZONTAL:
        for i, alts in enumerate(alternatives):
            half = len(alts) // 2
            if len(alts) % 2 and i % 2 == 0:
                half += 1
            keep.append(list(alts[:half]))
            give.append(list(alts[half:]))
    elif strategy == VERTICAL_ALTERNATE:
        for i, alts in enumerate(alternatives):
            if i % 2 == 0:
                keep.append(list(alts))
                give.append([])
            else:
                keep.append([])
                give.append(list(alts))
    elif strategy == VERTICAL_BLOCK:
        if not 0 < ratio <= 1:
            raise ValueError(f"ratio must be in (0, 1], got {ratio}")
        kept = min(math.ceil(ratio * n - 1e-9), n - 1) if n else 0
        for i, alts in enumerate(alternatives):
            if i < kept:
                keep.append(list(alts))
                give.append([])
            else:
                keep.append([])
                give.append(list(alts))
    else:
        raise ValueError(f"unknown splitting strategy {strategy!r}")
    return keep, give


@dataclass
class SharePlan:
    depths: list  # bottom-first depths of the choice-points being split
    keep: list
    give: list

    @property
    def top_depth(self) -> int:
        """Deepest choice-point the receiver gets alternatives of."""
        return max(d for d, g in zip(self.depths, self.give) if g)

    def given(self) -> dict:
        return {d: g for d, g in zip(self.depths, self.give) if g}


def eligible_choicepoints(engine: Engine, osc: bool = False) -> list:
    """Owned parallel choice-points, bottom-first.

    Under OSC only choice-points older than every owned sequential
    choice-point are eligible: the giver keeps sequential alternatives, and
    they must stay to the left of what it gives away.
    """
    cps = engine.cps
    limit = len(cps)
    if osc:
        for cp in cps:
            if not cp.parallel and cp.alts and not cp.schedule:
                limit = cp.depth
                break
    return [cp for cp in reversed(cps[:limit]) if cp.parallel and cp.alts and not cp.schedule]


def plan_share(engine: Engine, strategy: str, ratio: float = 0.5, top_most: bool = False, osc: bool = False):
    """Split decision for one sharing event, or None when nothing can be given."""
    cands = eligible_choicepoints(engine, osc)
    if not cands:
        return None
    if top_most:
        oldest = cands[-1]
        if strategy == HORIZONTAL:
            keep, give = split(HORIZONTAL, [oldest.alts])
            if not give[0]:
                keep, give = [[]], [list(oldest.alts)]
        else:
            keep, give = [[]], [list(oldest.alts)]
        plan = SharePlan([oldest.depth], keep, give)
    else:
        keep, give = split(strategy, [cp.alts for cp in cands], ratio)
        plan = SharePlan([cp.depth for cp in cands], keep, give)
    if not any(plan.give):
        return None
    return plan


# ---------------------------------------------------------------- payload


@dataclass
class CPRecord:
    site: int
    env: list
    cont: object
    alts: list
    taken: int
    trail_mark: int
    var_mark: int
    parallel: bool
    creation_id: tuple
    label: Optional[Label]


@dataclass
class SharePayload:
    mode: str
    common: Optional[Label]
    common_depth: int  # -1 in full mode
    cp_segment: list  # CPRecord, depths common_depth+1 .. top
    trail_start: int
    binding_installs: list  # (trail index, var id, value); conditional w.r.t. the common choice-point
    segment_bindings: list  # (trail index, var id, value); variables created inside the segment
    nextclause_repairs: list  # (parallel index, alts, taken) for parallel cps up to the common one
    split_assignment: list  # (depth, keep, give)
    load_after: int
    receiver_key: tuple = ()
    next_var: int = 0
    receiver_epoch: int = 0

    @property
    def top_depth(self) -> int:
        return self.common_depth + len(self.cp_segment)


def _record(engine: Engine, cp: ChoicePoint, alts) -> CPRecord:
    return CPRecord(
        engine.db.site_id(cp.gcode),
        cp.genv,
        cp.cont,
        list(alts),
        cp.taken,
        cp.trail_mark,
        cp.var_mark,
        cp.parallel,
        cp.creation_id,
        cp.label,
    )


def receiver_key(engine: Engine, plan: SharePlan) -> tuple:
    """Branch path of the leftmost alternative handed over: orders agents left to right."""
    top = plan.top_depth
    first = plan.given()[top][0]
    return tuple(cp.taken for cp in engine.cps[:top]) + (first,)


def build_share_payload(engine: Engine, plan: SharePlan, receiver_labels=None, incremental: bool = True) -> SharePayload:
    """Serialize the giver side of ``plan``; does not modify the giver."""
    cps = engine.cps
    top = plan.top_depth
    given = plan.given()
    common = None
    common_depth = -1
    if incremental and receiver_labels:
        giver_labels = label_stack(engine).labels
        lcp = []
        for a, b in zip(giver_labels, receiver_labels):
            if a != b:
                break
            lcp.append(a)
        # the common choice-point must not lie above the top of the shared segment
        pos = {cp.label: cp.depth for cp in cps if cp.parallel and cp.label is not None}
        for lab in reversed(lcp):
            d = pos.get(lab)
            if d is None:
                raise CorruptionError(f"common label {lab} not on the giver's stack")
            if d <= top:
                common, common_depth = lab, d
                break
    start = common_depth + 1
    segment = [_record(engine, cps[d], given.get(d, ()) if cps[d].parallel else ()) for d in range(start, top + 1)]
    trail_start = cps[common_depth].trail_mark if common is not None else 0
    trail_end = cps[top].trail_mark
    installs = []
    seg_bindings = []
    var_mark = cps[common_depth].var_mark if common is not None else 0
    for i in range(trail_start, trail_end):
        vid, value = engine.trail[i]
        if vid < var_mark:
            installs.append((i, vid, value))
        else:
            seg_bindings.append((i, vid, value))
    repairs = []
    if common is not None:
        pidx = 0
        for cp in cps[: common_depth + 1]:
            if cp.parallel:
                repairs.append((pidx, list(given.get(cp.depth, ())), cp.taken))
                pidx += 1
    keep_by_depth = dict(zip(plan.depths, plan.keep))
    load_after = 0
    for cp in cps:
        if cp.parallel and not cp.schedule:
            alts = keep_by_depth.get(cp.depth, cp.alts)
            if alts:
                load_after += 1
    return SharePayload(
        mode=INCREMENTAL if common is not None else FULL,
        common=common,
        common_depth=common_depth,
        cp_segment=segment,
        trail_start=trail_start,
        binding_installs=installs,
        segment_bindings=seg_bindings,
        nextclause_repairs=repairs,
        split_assignment=[(d, list(k), list(g)) for d, k, g in zip(plan.depths, plan.keep, plan.give)],
        load_after=load_after,
        receiver_key=receiver_key(engine, plan),
        next_var=engine.next_var,
    )


def apply_split(engine: Engine, plan: SharePlan):
    """Giver side: keep only the alternatives assigned to the giver."""
    for d, keep in zip(plan.depths, plan.keep):
        engine.cps[d].alts = list(keep)
    normalize_sentinels(engine)


def normalize_sentinels(engine: Engine):
    """Put SCHEDULE just below the oldest owned choice-point so the shared prefix survives backtracking."""
    cps = engine.cps
    oldest = None
    for cp in cps:
        cp.schedule = False
        if oldest is None and cp.alts:
            oldest = cp.depth
    if oldest is None:
        if cps:
            cps[-1].schedule = True
    elif oldest > 0:
        cps[oldest - 1].schedule = True


def install_payload(engine: Engine, payload: SharePayload):
    """Receiver side; afterwards ``engine.resume()`` backtracks into the assigned work."""
    db = engine.db
    if payload.mode == FULL:
        answer_vars = engine.answer_vars
        query_env = engine.query_env
        since_poll = engine._since_poll
        engine.reset()
        engine.answer_vars = answer_vars
        engine.query_env = query_env
        engine._since_poll = since_poll  # the poll clock belongs to the agent, not the branch
        if payload.trail_start != 0 or payload.binding_installs:
            raise CorruptionError("full payload must start at the trail origin")
    else:
        depth = None
        for cp in engine.cps:
            if cp.parallel and cp.label == payload.common:
                depth = cp.depth
                break
        if depth is None:
            raise CorruptionError(f"common choice-point {payload.common} absent on receiver")
        if depth != payload.common_depth:
            raise CorruptionError(f"common choice-point at depth {depth}, giver says {payload.common_depth}")
        engine.backtrack_to(depth)
        if len(engine.trail) != payload.trail_start:
            raise CorruptionError(
                f"trail length {len(engine.trail)} at the common choice-point, giver has {payload.trail_start}"
            )
        parallel = [cp for cp in engine.cps if cp.parallel]
        if len(payload.nextclause_repairs) != len(parallel):
            raise CorruptionError("next-clause repairs do not match the receiver's parallel choice-points")
        for (pidx, alts, taken), cp in zip(payload.nextclause_repairs, parallel):
            cp.alts = list(alts)
            cp.taken = taken
    for i, rec in enumerate(payload.cp_segment):
        gcode, proc = db.sites[rec.site]
        cp = ChoicePoint(
            payload.common_depth + 1 + i,
            gcode,
            rec.env,
            proc,
            rec.cont,
            list(rec.alts),
            rec.taken,
            rec.trail_mark,
            rec.var_mark,
            rec.parallel,
            rec.creation_id,
        )
        cp.label = rec.label
        engine.cps.append(cp)
    entries = sorted(payload.binding_installs + payload.segment_bindings)
    expected = payload.trail_start
    store = engine.store
    trail = engine.trail
    for index, vid, value in entries:
        if index != expected:
            raise CorruptionError(f"trail gap at index {expected}")
        store[vid] = value
        trail.append((vid, value))
        expected += 1
    for cp in engine.cps:
        if not cp.parallel:
            cp.alts = []
    given = {d: g for d, _, g in payload.split_assignment if g}
    for cp in engine.cps:
        if cp.alts != given.get(cp.depth, []):
            raise CorruptionError(f"choice-point {cp.depth} owns {cp.alts}, split assigned {given.get(cp.depth, [])}")
    normalize_sentinels(engine)
    engine.next_var = payload.next_var
    engine.goals = None
    engine.stopped = None
