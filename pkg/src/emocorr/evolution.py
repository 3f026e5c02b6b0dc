"""Directed evolution mining: misjudgment pairs, max-product traces, cycles,
and most-reliable transfer paths.

A step is always a misjudgment between two different emotions, so the
diagonal of a correlation matrix is excluded throughout (re-admit it with
``allow_self_steps`` for sensitivity checks). Path probabilities multiply
along the steps; all search happens in log space, with log 0 = -inf so a
zero-probability step is never chosen while any finite path exists.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .emotions import NUM_EMOTIONS
from .errors import ConfigurationError, UnreachableError


class TraceCondition(str, Enum):
    GIVEN_INITIAL = "given_initial"
    GIVEN_ULTIMATE = "given_ultimate"
    GIVEN_BOTH = "given_both"


@dataclass(frozen=True)
class Trace:
    """A directed emotion path with per-step probabilities."""

    path: tuple
    step_probs: tuple
    log_prob: float
    condition: TraceCondition

    @property
    def steps(self) -> int:
        return len(self.path) - 1


@dataclass(frozen=True)
class TopShift:
    target: int
    prob: float
    tie: bool  # another emotion reached the same probability; lowest index won


def one_step_top(values, source: int) -> TopShift:
    """Most probable single misjudgment out of ``source`` (diagonal excluded)."""
    row = np.asarray(values, dtype=float)[source]
    best_j, best_p, tie = -1, -math.inf, False
    for j in range(len(row)):
        if j == source:
            continue
        p = float(row[j])
        if p > best_p:
            best_j, best_p, tie = j, p, False
        elif p == best_p:
            tie = True
    return TopShift(target=best_j, prob=best_p, tie=tie)


@dataclass(frozen=True)
class MisjudgmentPair:
    source: int
    target: int
    endorsers: tuple      # tags of the matrices whose top shift this is
    mean_prob: float


def misjudgment_law(matrices: Sequence, quorum: int = 2) -> list:
    """Top one-step misjudgments endorsed by at least ``quorum`` matrices.

    Takes the six view-model matrices (the mean matrix stays out, since
    endorsement counts are fractions of the six). Each matrix nominates one
    top target per source; pairs meeting the quorum are reported with the
    endorsers' mean probability, ordered by (source, target). A source row
    with no off-diagonal mass nominates nothing: a zero-probability "top
    misjudgment" is no misjudgment.
    """
    matrices = tuple(matrices)
    if len(matrices) != 6:
        raise ConfigurationError(f"expected the 6 view-model matrices, got {len(matrices)}")
    if quorum < 1:
        raise ConfigurationError("quorum must be at least 1")
    votes: dict = {}
    for matrix in matrices:
        for source in range(NUM_EMOTIONS):
            top = one_step_top(matrix.values, source)
            if top.prob <= 0.0:
                continue
            votes.setdefault((source, top.target), []).append((matrix.tag, top.prob))
    pairs = []
    for (source, target) in sorted(votes):
        endorsements = votes[(source, target)]
        if len(endorsements) < quorum:
            continue
        pairs.append(MisjudgmentPair(
            source=source,
            target=target,
            endorsers=tuple(tag for tag, _ in endorsements),
            mean_prob=float(np.mean([p for _, p in endorsements])),
        ))
    return pairs


def _log_matrix(values, allow_self_steps: bool) -> np.ndarray:
    probs = np.asarray(values, dtype=float)
    if probs.ndim != 2 or probs.shape[0] != probs.shape[1]:
        raise ConfigurationError("expected a square probability matrix")
    with np.errstate(divide="ignore"):
        logs = np.log(probs)
    if not allow_self_steps:
        np.fill_diagonal(logs, -np.inf)
    return logs


def _path_trace(values, logs, path, condition) -> Trace:
    probs = np.asarray(values, dtype=float)
    step_probs = tuple(float(probs[path[t], path[t + 1]]) for t in range(len(path) - 1))
    log_prob = 0.0
    for t in range(len(path) - 1):
        log_prob += float(logs[path[t], path[t + 1]])
    return Trace(path=tuple(int(p) for p in path), step_probs=step_probs,
                 log_prob=log_prob, condition=condition)


def best_trace(values, steps: int, condition: TraceCondition,
               initial: Optional[int] = None, ultimate: Optional[int] = None,
               allow_self_steps: bool = False) -> Trace:
    """Globally optimal fixed-length path by dynamic programming in log space.

    The recurrence tracks, per step count and per end emotion, the best log
    probability of any path reaching it, then backtracks. Conditions: a given
    initial emotion maximizes over end emotions, a given ultimate emotion over
    start emotions, and given both pins the endpoints. Exact ties take the
    lowest emotion index.
    """
    condition = TraceCondition(condition)
    if steps < 1:
        raise ConfigurationError("steps must be at least 1")
    n = np.asarray(values).shape[0]
    need_initial = condition in (TraceCondition.GIVEN_INITIAL, TraceCondition.GIVEN_BOTH)
    need_ultimate = condition in (TraceCondition.GIVEN_ULTIMATE, TraceCondition.GIVEN_BOTH)
    if need_initial and (initial is None or not 0 <= initial < n):
        raise ConfigurationError("condition requires a valid initial emotion")
    if need_ultimate and (ultimate is None or not 0 <= ultimate < n):
        raise ConfigurationError("condition requires a valid ultimate emotion")

    logs = _log_matrix(values, allow_self_steps)
    best = np.full(n, -np.inf)
    if need_initial:
        best[initial] = 0.0
    else:
        best[:] = 0.0  # free start
    back = np.empty((steps, n), dtype=int)
    for t in range(steps):
        candidates = best[:, None] + logs  # (from, to)
        back[t] = np.argmax(candidates, axis=0)
        best = candidates[back[t], np.arange(n)]

    end = int(ultimate) if need_ultimate else int(np.argmax(best))
    if not np.isfinite(best[end]):
        raise UnreachableError(f"unreachable under {steps} steps")
    path = [end]
    for t in reversed(range(steps)):
        path.append(int(back[t, path[-1]]))
    path.reverse()
    return _path_trace(values, logs, path, condition)


def greedy_trace(values, steps: int, initial: int,
                 allow_self_steps: bool = False) -> Trace:
    """Comparison mode: repeatedly take the locally best next misjudgment.

    Unlike best_trace this can miss the global optimum when a large first
    step leads into a low-probability region.
    """
    probs = np.asarray(values, dtype=float)
    n = probs.shape[0]
    if not 0 <= initial < n:
        raise ConfigurationError("initial emotion out of range")
    logs = _log_matrix(values, allow_self_steps)
    path = [initial]
    for _ in range(steps):
        row = logs[path[-1]]
        nxt = int(np.argmax(row))
        if not np.isfinite(row[nxt]):
            raise UnreachableError(f"unreachable under {steps} steps")
        path.append(nxt)
    return _path_trace(values, logs, path, TraceCondition.GIVEN_INITIAL)


def detect_circulations(trace: Trace) -> list:
    """Every minimal cycle closed by revisiting an emotion along the path.

    Each revisit closes a cycle over the segment since that emotion's last
    occurrence. Cycles are canonicalized by rotating the smallest emotion to
    the front (a 2-cycle therefore reads as an unordered pair) and reported
    once each, in order of first appearance.
    """
    last_seen: dict = {}
    found: list = []
    seen_forms: set = set()
    for pos, emotion in enumerate(trace.path):
        if emotion in last_seen:
            segment = trace.path[last_seen[emotion]:pos]
            k = segment.index(min(segment))
            form = tuple(segment[k:] + segment[:k])
            if form not in seen_forms:
                seen_forms.add(form)
                found.append(form)
        last_seen[emotion] = pos
    return found


def shortest_path(values, initial: int, ultimate: int) -> Trace:
    """Most reliable transfer path over any number of steps.

    Dijkstra with edge cost -log p over the off-diagonal entries; zero
    probabilities are absent edges. Costs are non-negative because every
    entry of a row-stochastic matrix is at most 1, so the optimum is a simple
    path and equals the best fixed-length result maximized over lengths.
    """
    probs = np.asarray(values, dtype=float)
    n = probs.shape[0]
    if not (0 <= initial < n and 0 <= ultimate < n):
        raise ConfigurationError("emotion index out of range")
    if initial == ultimate:
        raise ConfigurationError("initial and ultimate emotions must differ")
    dist = [math.inf] * n
    parent = [-1] * n
    dist[initial] = 0.0
    heap = [(0.0, initial)]
    settled = [False] * n
    while heap:
        d, node = heapq.heappop(heap)
        if settled[node]:
            continue
        settled[node] = True
        if node == ultimate:
            break
        for nxt in range(n):
            if nxt == node or probs[node, nxt] <= 0.0:
                continue
            nd = d - math.log(probs[node, nxt])
            if nd < dist[nxt]:
                dist[nxt] = nd
                parent[nxt] = node
                heapq.heappush(heap, (nd, nxt))
    if not settled[ultimate]:
        raise UnreachableError("no transfer path")
    path = [ultimate]
    while path[-1] != initial:
        path.append(parent[path[-1]])
    path.reverse()
    logs = _log_matrix(values, allow_self_steps=False)
    return _path_trace(values, logs, path, TraceCondition.GIVEN_BOTH)
