"""Deterministic Schreier-Sims stabiliser chains for permutation groups.

Used where a group is too large to list (G2(3) on 364 points has order
4245696): the chain gives the exact order and lets every element be produced
as a product t_0 t_1 ... t_k of coset representatives, in blocks.
"""
from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np


def _inv(p: np.ndarray) -> np.ndarray:
    q = np.empty_like(p)
    q[p] = np.arange(len(p), dtype=p.dtype)
    return q


class Level:
    def __init__(self, base: int, n: int):
        self.base = base
        self.gens: list[np.ndarray] = []
        self.trans: dict[int, np.ndarray] = {}
        self.n = n

    def rebuild(self, gens: Sequence[np.ndarray]) -> None:
        ident = np.arange(self.n, dtype=np.int32)
        trans = {self.base: ident}
        frontier = [self.base]
        while frontier:
            nxt = []
            for beta in frontier:
                u = trans[beta]
                for s in gens:
                    img = int(s[beta])
                    if img not in trans:
                        trans[img] = s[u]  # s o u sends base to img
                        nxt.append(img)
            frontier = nxt
        self.trans = trans


class StabChain:
    def __init__(self, gens: Sequence[np.ndarray]):
        gens = [np.asarray(g, dtype=np.int32) for g in gens]
        self.n = len(gens[0])
        self.levels: list[Level] = []
        self._inv_cache: dict[bytes, np.ndarray] = {}
        for g in gens:
            h, k = self.sift(g)
            if not self._is_id(h):
                self._add(k, h)
        self._complete()

    # a strong generating set for level j is everything added at levels >= j
    def _gens_from(self, j: int) -> list[np.ndarray]:
        out = []
        for L in self.levels[j:]:
            out.extend(L.gens)
        return out

    @staticmethod
    def _is_id(p: np.ndarray) -> bool:
        return bool((p == np.arange(len(p))).all())

    def _inv_of(self, p: np.ndarray) -> np.ndarray:
        key = p.tobytes()
        q = self._inv_cache.get(key)
        if q is None:
            q = _inv(p)
            self._inv_cache[key] = q
        return q

    def sift(self, g: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        h = g
        for j in range(start, len(self.levels)):
            L = self.levels[j]
            beta = int(h[L.base])
            u = L.trans.get(beta)
            if u is None:
                return h, j
            h = self._inv_of(u)[h]
        return h, len(self.levels)

    def _add(self, k: int, h: np.ndarray) -> None:
        if k == len(self.levels):
            moved = np.nonzero(h != np.arange(self.n))[0]
            self.levels.append(Level(int(moved[0]), self.n))
        self.levels[k].gens.append(h)
        for j in range(k, -1, -1):
            self.levels[j].rebuild(self._gens_from(j))

    def _complete(self) -> None:
        changed = True
        while changed:
            changed = False
            for j in range(len(self.levels) - 1, -1, -1):
                L = self.levels[j]
                for beta, u in list(L.trans.items()):
                    for s in self._gens_from(j):
                        v = L.trans[int(s[beta])]
                        sg = self._inv_of(v)[s[u]]
                        h, k = self.sift(sg, j + 1)
                        if not self._is_id(h):
                            self._add(k, h)
                            changed = True
                            break
                    if changed:
                        break
                if changed:
                    break

    def order(self) -> int:
        out = 1
        for L in self.levels:
            out *= len(L.trans)
        return out

    def contains(self, g) -> bool:
        h, k = self.sift(np.asarray(g, dtype=np.int32))
        return k == len(self.levels) and self._is_id(h)

    def blocks(self, inner_levels: int | None = None) -> Iterator[np.ndarray]:
        """All elements in blocks ``outer o inner``; each element appears exactly once."""
        levels = self.levels
        if inner_levels is None:
            inner_levels = 0
            size = 1
            for L in reversed(levels):
                if size * len(L.trans) > 50_000:
                    break
                size *= len(L.trans)
                inner_levels += 1
        split = len(levels) - inner_levels
        inner = np.arange(self.n, dtype=np.int32)[None, :]
        for L in reversed(levels[split:]):
            T = np.stack([L.trans[b] for b in sorted(L.trans)])
            # t o inner for every t in T
            inner = T[:, inner].reshape(-1, self.n)
        outer_levels = levels[:split]

        def rec(j: int, acc: np.ndarray) -> Iterator[np.ndarray]:
            if j == len(outer_levels):
                yield acc[inner]
                return
            L = outer_levels[j]
            for b in sorted(L.trans):
                yield from rec(j + 1, acc[L.trans[b]])

        yield from rec(0, np.arange(self.n, dtype=np.int32))
