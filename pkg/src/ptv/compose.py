"""Combining periodic kernels: parallel stacks, series chains, LTI lifting,
and reduction of feed-forward block circuits to a single kernel.

Two periodic systems combined in any feed-forward arrangement are again
periodic, with period the least common multiple of the component periods;
the combinators here realize that closure on discretized kernels.  Phase is
always referenced to the shared global time origin — component ``h`` is read
at phase ``mod(p, K_h)`` of the composite phase ``p`` — so combining never
re-aligns anything implicitly.
"""

from __future__ import annotations

import math
from collections import deque
from typing import Mapping, Sequence

import numpy as np

from .continuous import ContinuousSpec, discretize
from .errors import (CyclicGraph, DimensionMismatch, IncommensuratePeriods, IncommensurateRate,
                     InvalidArgument, RateMismatch)
from .kernel import PeriodicKernel, identity_kernel


def lcm_period(k_h: int, k_g: int) -> int:
    """Least common multiple of two discrete periods."""
    k_h, k_g = int(k_h), int(k_g)
    if k_h < 1 or k_g < 1:
        raise InvalidArgument(f"periods must be >= 1, got {k_h} and {k_g}")
    return math.lcm(k_h, k_g)


def _common_rate(h: PeriodicKernel, g: PeriodicKernel) -> float | None:
    if (h.sample_period_s is not None and g.sample_period_s is not None
            and h.sample_period_s != g.sample_period_s):
        raise RateMismatch(
            f"sample periods differ: {h.sample_period_s} vs {g.sample_period_s}")
    return h.sample_period_s if h.sample_period_s is not None else g.sample_period_s


def parallel(h: PeriodicKernel, g: PeriodicKernel) -> PeriodicKernel:
    """Side-by-side combination: block-diagonal kernel with ``h`` feeding the
    first output/input block and ``g`` the second; no cross coupling."""
    rate = _common_rate(h, g)
    period = lcm_period(h.period, g.period)
    lag_min = min(h.lag_min, g.lag_min)
    lag_max = max(h.lag_max, g.lag_max)
    taps = np.zeros((h.n_out + g.n_out, h.n_in + g.n_in, period, lag_max - lag_min + 1))
    idx = np.arange(period)
    taps[:h.n_out, :h.n_in, :, h.lag_min - lag_min:h.lag_max - lag_min + 1] = \
        h.taps[:, :, idx % h.period, :]
    taps[h.n_out:, h.n_in:, :, g.lag_min - lag_min:g.lag_max - lag_min + 1] = \
        g.taps[:, :, idx % g.period, :]
    return PeriodicKernel(taps, lag_min, rate)


def series(h: PeriodicKernel, g: PeriodicKernel) -> PeriodicKernel:
    """Chain ``h`` into ``g`` (``h`` acts first): the kernel of ``x ->
    g(h(x))``.

    The composite tap at phase ``p`` and lag ``m`` sums over the
    intermediate channel ``l`` and the lag split ``mu``:

        s[i, j, p, m] = sum_l sum_mu g[i, l, mod(p, K_g), mu]
                                   * h[l, j, mod(p - mu, K_h), m - mu]

    — the inner system is read at the phase of the sample it produced,
    ``p - mu``.  The lag window is the Minkowski sum of the operand windows
    and the period the lcm of the operand periods.
    """
    if g.n_in != h.n_out:
        raise DimensionMismatch(
            f"series needs inner outputs == outer inputs, got {h.n_out} vs {g.n_in}")
    rate = _common_rate(h, g)
    period = lcm_period(h.period, g.period)
    lag_min = h.lag_min + g.lag_min
    lag_max = h.lag_max + g.lag_max
    n_h = h.taps.shape[3]
    taps = np.zeros((g.n_out, h.n_in, period, lag_max - lag_min + 1))
    for p in range(period):
        g_phase = g.taps[:, :, p % g.period, :]
        for mu_i, mu in enumerate(range(g.lag_min, g.lag_max + 1)):
            h_phase = h.taps[:, :, (p - mu) % h.period, :]
            taps[:, :, p, mu_i:mu_i + n_h] += np.einsum("il,ljm->ijm", g_phase[:, :, mu_i], h_phase)
    return PeriodicKernel(taps, lag_min, rate)


def lift_lti(fir, period: int, lag_min: int = 0,
             sample_period_s: float | None = None) -> PeriodicKernel:
    """Wrap a single-channel FIR as a periodic kernel of the given period:
    identical taps at every phase.  Any period works — the kernel stays
    time-invariant — which is what lets LTI stages join circuits whose
    period is dictated by the other components."""
    fir = np.asarray(fir, dtype=np.float64)
    if fir.ndim != 1 or fir.size == 0:
        raise InvalidArgument("fir must be a non-empty 1-D tap list")
    if period < 1:
        raise InvalidArgument(f"period must be >= 1, got {period}")
    taps = np.broadcast_to(fir, (1, 1, period, fir.size)).copy()
    return PeriodicKernel(taps, lag_min, sample_period_s)


def _routing_kernel(pattern: np.ndarray, rate: float | None) -> PeriodicKernel:
    """Memoryless phase-constant kernel with 0/1 taps from an (out, in)
    incidence pattern; used for splits, sums and channel reordering."""
    return PeriodicKernel(pattern[:, :, np.newaxis, np.newaxis], 0, rate)


def _as_node_kernel(node, sample_period_s, lag_window, tail_tol, node_id):
    """Accept the kinds a circuit node may hold: a finished kernel, a
    continuous spec (discretized here at the circuit rate), or a bare FIR
    tap sequence (lifted as time-invariant)."""
    if isinstance(node, PeriodicKernel):
        return node
    if isinstance(node, ContinuousSpec):
        if sample_period_s is None or lag_window is None:
            raise InvalidArgument(
                f"node {node_id!r} is a continuous spec; reduce_circuit needs "
                f"sample_period_s and lag_window to discretize it")
        try:
            return discretize(node, sample_period_s, lag_window, tail_tol)
        except IncommensurateRate as exc:
            raise IncommensuratePeriods(
                f"node {node_id!r}: period {node.period_s} s does not fit the circuit "
                f"rate (sample period {sample_period_s} s)") from exc
    if isinstance(node, (list, tuple, np.ndarray)):
        return lift_lti(node, 1, 0, sample_period_s)
    raise InvalidArgument(f"node {node_id!r} has unsupported type {type(node).__name__}")


def reduce_circuit(nodes: Mapping[str, object], edges: Sequence[tuple[str, str]],
                   sample_period_s: float | None = None,
                   lag_window: tuple[int, int] | None = None,
                   tail_tol: float = 1e-6) -> PeriodicKernel:
    """Fold a feed-forward circuit of single-channel blocks into one kernel.

    ``nodes`` maps ids to blocks (kernels, continuous specs, or FIR tap
    sequences); ``edges`` are directed (from, to) connections.  Fan-out of
    a block's output duplicates the signal to every successor; fan-in sums
    every predecessor.  The duplications and sums are materialized as
    explicit memoryless one-to-many and many-to-one kernels, so the whole
    reduction is a pure chain of ``series``/``parallel`` calls and inherits
    their exactness.  Nodes with no predecessors read the circuit inputs
    (in ``nodes`` order); nodes with no successors drive the circuit
    outputs (same order).

    The graph must be acyclic (feedback is out of scope) and every block
    single-input single-output; rectangular blocks would need typed ports,
    which nothing in this package's source material requires.
    """
    node_ids = list(nodes.keys())
    if not node_ids:
        raise InvalidArgument("circuit has no nodes")
    kernels = {nid: _as_node_kernel(nodes[nid], sample_period_s, lag_window, tail_tol, nid)
               for nid in node_ids}
    for nid, k in kernels.items():
        if k.n_in != 1 or k.n_out != 1:
            raise InvalidArgument(
                f"node {nid!r} is {k.n_out}x{k.n_in}; circuit blocks must be 1x1")
    edges = [(str(a), str(b)) for a, b in edges]
    for a, b in edges:
        if a not in kernels or b not in kernels:
            raise InvalidArgument(f"edge ({a!r}, {b!r}) references an unknown node")
    preds = {nid: [] for nid in node_ids}
    succs = {nid: [] for nid in node_ids}
    for a, b in edges:
        preds[b].append(a)
        succs[a].append(b)

    indegree = {nid: len(preds[nid]) for nid in node_ids}
    ready = deque(nid for nid in node_ids if indegree[nid] == 0)
    topo = []
    while ready:
        nid = ready.popleft()
        topo.append(nid)
        for nxt in succs[nid]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                ready.append(nxt)
    if len(topo) != len(node_ids):
        stuck = sorted(set(node_ids) - set(topo))
        raise CyclicGraph(f"circuit graph has a cycle through {stuck}")

    entries = [nid for nid in node_ids if not preds[nid]]
    exits = [nid for nid in node_ids if not succs[nid]]
    rate = None
    for k in kernels.values():
        if k.sample_period_s is not None:
            rate = k.sample_period_s
            break

    # The frontier tracks the live signals as an ordered list of tokens:
    # ("in", node) feeds a source node, ("edge", a, b, i) is the i-th wire
    # out of a, and ("out", node) is a finished circuit output.
    frontier = [("in", nid) for nid in entries]
    composite = identity_kernel(len(frontier), 1, rate)
    for nid in topo:
        if not preds[nid]:
            wanted = [("in", nid)]
        else:
            taken: dict[str, int] = {}
            wanted = []
            for p in preds[nid]:
                pos = succs[p].index(nid, taken.get(p, 0))
                taken[p] = pos + 1
                wanted.append(("edge", p, nid, pos))
        in_pos = [frontier.index(tok) for tok in wanted]
        rest = [tok for tok in frontier if tok not in wanted]
        new_order = rest + [frontier[i] for i in sorted(in_pos)]
        if new_order != frontier:
            pattern = np.zeros((len(frontier), len(frontier)))
            for row, tok in enumerate(new_order):
                pattern[row, frontier.index(tok)] = 1.0
            composite = series(composite, _routing_kernel(pattern, rate))
        k_in = len(wanted)
        k_out = max(1, len(succs[nid]))
        block = kernels[nid]
        if k_in > 1:
            block = series(_routing_kernel(np.ones((1, k_in)), rate), block)
        if k_out > 1:
            block = series(block, _routing_kernel(np.ones((k_out, 1)), rate))
        if rest:
            stage = parallel(identity_kernel(len(rest), 1, rate), block)
        else:
            stage = block
        composite = series(composite, stage)
        out_tokens = ([("out", nid)] if not succs[nid]
                      else [("edge", nid, s, i) for i, s in enumerate(succs[nid])])
        frontier = rest + out_tokens
    final_order = [("out", nid) for nid in exits]
    if frontier != final_order:
        pattern = np.zeros((len(frontier), len(frontier)))
        for row, tok in enumerate(final_order):
            pattern[row, frontier.index(tok)] = 1.0
        composite = series(composite, _routing_kernel(pattern, rate))
    return composite
