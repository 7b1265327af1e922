from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from hexforge import kernels
from hexforge.groupaction import default_generators
from hexforge.stabchain import StabChain

needs_compiled = pytest.mark.skipif(kernels.compiled is None, reason="compiled extension not built")


def _walk_args(H, ga, seed, budget, filt):
    gens = default_generators(ga)
    gp = np.ascontiguousarray(np.stack([g.point_perm for g in gens]).astype(np.int32))
    choices = np.random.default_rng(seed).integers(0, len(gens), size=budget + 50).astype(np.int32)
    return (gp, choices, np.arange(H.n_points, dtype=np.int32), 50, filt,
            H.opp_points.view(np.uint8), H.opp_lines.view(np.uint8),
            ga._lp1.astype(np.int32), ga._lp2.astype(np.int32), H.line_of,
            H.chamber_points.astype(np.int32), H.chamber_lines.astype(np.int32))


@needs_compiled
@pytest.mark.parametrize("name", ["h12", "h43", "h22"])
def test_bfs_backends_agree(name, request):
    H = request.getfixturevalue(name)
    indptr, indices = H.csr()
    a = kernels.compiled.bfs_distances(indptr, indices, H.n_vertices)
    b = kernels.fallback.bfs_distances(indptr, indices, H.n_vertices)
    assert a.dtype == b.dtype == np.uint8
    assert np.array_equal(a, b)


@needs_compiled
@pytest.mark.parametrize("seed,filt", [(1, True), (2, True), (3, False)])
def test_walk_backends_agree(h12, ga12, seed, filt):
    args = _walk_args(h12, ga12, seed, 5000, filt)
    s1, p1, n1 = kernels.compiled.walk_search(*args)
    s2, p2, n2 = kernels.fallback.walk_search(*args)
    assert (s1, n1) == (s2, n2) and s1 >= 0
    assert np.array_equal(np.asarray(p1), np.asarray(p2))


@needs_compiled
def test_walk_backends_agree_on_miss(h22, ga22):
    args = _walk_args(h22, ga22, 1, 300, True)
    s1, _, n1 = kernels.compiled.walk_search(*args)
    s2, _, n2 = kernels.fallback.walk_search(*args)
    assert s1 == s2 == -1 and n1 == n2


def test_forced_fallback_selection():
    env = dict(os.environ, HEXFORGE_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from hexforge import kernels; print(kernels.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


def test_stabchain_orders(ga12, ga43):
    chain = StabChain([g.point_perm for g in default_generators(ga12)])
    assert chain.order() == 12096
    listed = np.concatenate(list(chain.blocks()))
    assert len(np.unique(listed, axis=0)) == 12096
    assert chain.contains(ga12.realize("x1(1);s1;x4(1)").point_perm)
    big = StabChain([g.point_perm for g in default_generators(ga43)])
    assert big.order() == 4245696
    assert big.contains(ga43.realize("s6;x3(1);s1").point_perm)
    transposition = np.arange(364, dtype=np.int32)
    transposition[[0, 1]] = [1, 0]
    assert not big.contains(transposition)
