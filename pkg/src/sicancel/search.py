"""Deterministic noiseless code search (the "ideal tuner").

Used as the upper-envelope reference for what the balance network can reach.
Stage-1 states near the target are taken from the full coverage table; for
each, the stage-2 codes come from a nearest-neighbour lookup on the load
impedance that stage 1 would need, and a final coordinate descent over all
eight codes polishes the winner.  Lookup tables depend only on (network,
frequency) and are cached.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from .coupler import CouplerSpec, si_to_db, si_transfer
from .network import (
    N_CAPS,
    CapCodes,
    NetworkSpec,
    code_grid,
    coverage_enumeration,
    gamma_from_parts,
    stage1_load,
    stage_abcd,
)


@lru_cache(maxsize=4)
def _stage1_tree(net: NetworkSpec, f: float):
    """Full-resolution stage-1 reflections (stage 2 at midpoint) in a KD-tree."""
    codes, gammas = coverage_enumeration(net, f, 1)
    return codes, gammas, cKDTree(np.column_stack([gammas.real, gammas.imag]))


@lru_cache(maxsize=4)
def _stage2_tree(net: NetworkSpec, f: float):
    """Full-resolution stage-1 load impedances in a KD-tree.

    The load seen by stage 1 depends only on the stage-2 codes, so one table
    serves every stage-1 state.
    """
    grid = code_grid(net.cap.steps, 1)
    z = stage1_load(grid, net, f)
    return grid, z, cKDTree(np.column_stack([z.real, z.imag]))


@dataclass
class SearchResult:
    codes: CapCodes
    gamma: complex
    cancellation_db: float


def _coordinate_descent(codes, score, steps):
    """Greedy single-code +-1 moves on ``codes`` (array) until no move improves ``score``."""
    codes = np.array(codes, dtype=np.int64)
    best = score(codes)
    n = codes.size
    while True:
        moves = []
        for i in range(n):
            for d in (-1, 1):
                c = codes.copy()
                c[i] += d
                if 0 <= c[i] < steps:
                    moves.append(c)
        moves = np.array(moves)
        vals = score(moves)
        j = int(np.argmin(vals))
        if vals[j] >= best:
            return codes, best
        codes, best = moves[j], vals[j]


def _full_gamma(codes, net, f):
    c = np.atleast_2d(codes)
    return gamma_from_parts(c[:, :N_CAPS], stage1_load(c[:, N_CAPS:], net, f), net, f)


def match_stage2(stage1, target: complex, net: NetworkSpec, f: float, neighbors: int = 4):
    """Best stage-2 codes for each stage-1 state in ``stage1`` (shape (K, 4)).

    Inverts the stage-1 two-port to get the load impedance that would put the
    input reflection exactly on ``target``, then checks the ``neighbors``
    closest realizable loads.  Returns (codes (K, 8), distance (K,)).
    """
    stage1 = np.atleast_2d(stage1)
    grid, z2, tree = _stage2_tree(net, f)
    m = stage_abcd(stage1, net.l1, net.l2, net.cap, f, net.topology)
    z_in = net.z0 * (1 + target) / (1 - target)
    z_req = (m.d * z_in - m.b) / (m.a - m.c * z_in)
    _, j = tree.query(np.column_stack([z_req.real, z_req.imag]), k=neighbors)
    j = j.reshape(len(stage1), -1)
    g = gamma_from_parts(stage1[:, None, :], z2[j], net, f)
    err = np.abs(g - target)
    k = np.argmin(err, axis=1)
    rows = np.arange(len(stage1))
    return np.hstack([stage1, grid[j[rows, k]]]), err[rows, k]


def ideal_search(
    target: complex,
    net: NetworkSpec | None = None,
    f: float = 915e6,
    candidates: int = 64,
    neighbors: int = 4,
) -> tuple[CapCodes, complex]:
    """Codes whose balance reflection lies as close as possible to ``target``.

    The ``candidates`` stage-1 states nearest the target each get their best
    stage-2 match; the winner is polished by coordinate descent over all
    eight codes.  Returns the codes and their reflection coefficient.
    """
    net = net or NetworkSpec()
    codes1, _, tree1 = _stage1_tree(net, f)
    _, idx = tree1.query([target.real, target.imag], k=candidates)
    full, err = match_stage2(codes1[np.atleast_1d(idx)], target, net, f, neighbors)

    def score(c):
        d = np.abs(_full_gamma(c, net, f) - target)
        return d if np.ndim(c) > 1 else float(d[0])

    codes, _ = _coordinate_descent(full[int(np.argmin(err))], score, net.cap.steps)
    return CapCodes.from_sequence(codes), complex(_full_gamma(codes, net, f)[0])


def ideal_tune(g_ant: complex, net: NetworkSpec | None = None, coupler: CouplerSpec | None = None, f: float = 915e6, **kw) -> SearchResult:
    """Best noiseless cancellation the search finds for an antenna reflection."""
    coupler = coupler or CouplerSpec()
    target = g_ant + coupler.leakage / coupler.path_gain
    codes, gamma = ideal_search(target, net, f, **kw)
    return SearchResult(codes, gamma, si_to_db(si_transfer(g_ant, gamma, coupler)))


@lru_cache(maxsize=4)
def _stage1_band(net: NetworkSpec, f0: float, offset: float):
    """Full-resolution stage-1 table at ``f0`` plus its worst reflection drift at ``f0 +- offset``."""
    codes, g0 = coverage_enumeration(net, f0, 1)
    _, g_hi = coverage_enumeration(net, f0 + offset, 1)
    _, g_lo = coverage_enumeration(net, f0 - offset, 1)
    return codes, g0, np.maximum(np.abs(g_hi - g0), np.abs(g_lo - g0))


def flattest_tune(
    g_ant: complex,
    net: NetworkSpec | None = None,
    coupler: CouplerSpec | None = None,
    f0: float = 915e6,
    offset: float = 3e6,
    required_db: float = 78.0,
    radius: float = 0.02,
    candidates: int = 24,
) -> SearchResult:
    """Among states meeting ``required_db`` at ``f0``, the one holding up best at ``f0 +- offset``.

    Stage-1 states within ``radius`` of the balance point are ranked by how
    far their reflection drifts across the offset; the least-drifting
    ``candidates`` are fine-tuned with stage 2 and the one with the highest
    worst-side offset cancellation wins.  Falls back to :func:`ideal_tune`
    when no candidate meets the carrier requirement.
    """
    net = net or NetworkSpec()
    coupler = coupler or CouplerSpec()
    target = g_ant + coupler.leakage / coupler.path_gain
    codes1, g0, drift = _stage1_band(net, f0, offset)
    steps = net.cap.steps

    near = np.flatnonzero(np.abs(g0 - target) < radius)
    near = near[np.argsort(drift[near], kind="stable")][:candidates]

    def score(c):
        d = np.abs(_full_gamma(c, net, f0) - target)
        return d if np.ndim(c) > 1 else float(d[0])

    best, best_off = None, -np.inf
    if near.size:
        starts, _ = match_stage2(codes1[near], target, net, f0)
    else:
        starts = []
    for start in starts:
        full, _ = _coordinate_descent(start, score, steps)
        gamma = complex(_full_gamma(full, net, f0)[0])
        if si_to_db(si_transfer(g_ant, gamma, coupler)) < required_db:
            continue
        worst = min(si_to_db(si_transfer(g_ant, _full_gamma(full, net, f)[0], coupler)) for f in (f0 - offset, f0 + offset))
        if worst > best_off:
            best, best_off = (full, gamma), worst
    if best is None:
        return ideal_tune(g_ant, net, coupler, f0)
    codes, gamma = best
    return SearchResult(CapCodes.from_sequence(codes), gamma, si_to_db(si_transfer(g_ant, gamma, coupler)))
