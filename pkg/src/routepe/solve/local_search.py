"""First-improvement local search over a granular neighbourhood.

Operators: intra-route 2-opt, segment relocation of 1-3 customers (covers
relocate and or-opt, with optional segment reversal), inter-route swap,
2-opt* tail exchange, and for PCVRP dropping or adding customers by prize.
Every candidate passes the variant's constraints before it is applied.
"""

from __future__ import annotations

import numpy as np

from ..core import Instance, Solution, Variant
from ._routes import RouteOps, best_insertion

EPS = 1e-10


class _Search:
    def __init__(self, inst: Instance, sol: Solution, n_neighbors: int):
        self.inst = inst
        self.ops = RouteOps(inst)
        self.d = inst.dist_list
        self.routes = [list(r) for r in sol.routes]
        self.loads = [self.ops.load(r) for r in self.routes]
        k = max(1, min(n_neighbors, inst.n_customers - 1))
        order = np.argsort(inst.dist[1:, 1:], axis=1, kind="stable") + 1
        self.neigh = [[]] + [[int(v) for v in row if v != i + 1][:k] for i, row in enumerate(order)]
        self.where: dict[int, tuple[int, int]] = {}
        for ri in range(len(self.routes)):
            self._reindex(ri)

    def _reindex(self, ri: int) -> None:
        r = self.routes[ri]
        for k in range(1, len(r) - 1):
            self.where[r[k]] = (ri, k)

    def _set(self, ri: int, route: list[int]) -> None:
        self.routes[ri] = route
        self.loads[ri] = self.ops.load(route)
        self._reindex(ri)

    def _customers(self) -> list[int]:
        return [v for r in self.routes for v in r[1:-1]]

    # -- operators -------------------------------------------------------
    def two_opt(self) -> bool:
        d, ops = self.d, self.ops
        improved = False
        for ri in range(len(self.routes)):
            r = self.routes[ri]
            n = len(r)
            for i in range(1, n - 2):
                for j in range(i + 1, n - 1):
                    a, b, c, e = r[i - 1], r[i], r[j], r[j + 1]
                    delta = d[a][c] + d[b][e] - d[a][b] - d[c][e]
                    if delta < -EPS:
                        cand = r[:i] + r[i:j + 1][::-1] + r[j + 1:]
                        if ops.order_ok(cand):
                            self._set(ri, cand)
                            r = cand
                            improved = True
        return improved

    def relocate(self) -> bool:
        d, ops = self.d, self.ops
        improved = False
        for u in self._customers():
            for seg_len in (1, 2, 3):
                if u not in self.where:
                    break
                ra, i = self.where[u]
                src = self.routes[ra]
                if i + seg_len > len(src) - 1:
                    break
                seg = src[i:i + seg_len]
                s0, sl = seg[0], seg[-1]
                prev, nxt = src[i - 1], src[i + seg_len]
                gain = d[prev][s0] + d[sl][nxt] - d[prev][nxt]
                seg_dem = sum(ops.dem[v] for v in seg)
                done = False
                for v in self.neigh[s0] + (self.neigh[sl] if seg_len > 1 else []):
                    if v in seg or v not in self.where:
                        continue
                    rb, k = self.where[v]
                    dst = self.routes[rb]
                    if rb != ra and ops.has_cap and self.loads[rb] + seg_dem > ops.cap:
                        continue
                    for x, y in ((dst[k - 1], v), (v, dst[k + 1])):
                        if x in seg or y in seg:
                            continue
                        fwd = d[x][s0] + d[sl][y]
                        rev = d[x][sl] + d[s0][y]
                        add = min(fwd, rev) - d[x][y]
                        if add - gain >= -EPS:
                            continue
                        piece = seg if fwd <= rev else seg[::-1]
                        if self._try_move(ra, i, seg_len, rb, x, piece):
                            improved = done = True
                            break
                    if done:
                        break
        return improved

    def _try_move(self, ra, i, seg_len, rb, x, piece) -> bool:
        ops = self.ops
        src = self.routes[ra]
        reduced = src[:i] + src[i + seg_len:]
        if ra == rb:
            p = reduced.index(x) + 1
            cand = reduced[:p] + piece + reduced[p:]
            if not ops.order_ok(cand):
                return False
            self._set(ra, cand)
            return True
        dst = self.routes[rb]
        p = dst.index(x) + 1
        cand = dst[:p] + piece + dst[p:]
        if not (ops.order_ok(cand) and ops.order_ok(reduced)):
            return False
        self._set(ra, reduced)
        self._set(rb, cand)
        return True

    def swap(self) -> bool:
        d, ops = self.d, self.ops
        improved = False
        for u in self._customers():
            for v in self.neigh[u]:
                if v not in self.where:
                    continue
                ra, i = self.where[u]
                rb, j = self.where[v]
                if ra == rb:
                    continue
                A, B = self.routes[ra], self.routes[rb]
                pu, nu, pv, nv = A[i - 1], A[i + 1], B[j - 1], B[j + 1]
                delta = (d[pu][v] + d[v][nu] - d[pu][u] - d[u][nu]
                         + d[pv][u] + d[u][nv] - d[pv][v] - d[v][nv])
                if delta >= -EPS:
                    continue
                if ops.has_cap:
                    du, dv = ops.dem[u], ops.dem[v]
                    if self.loads[ra] - du + dv > ops.cap or self.loads[rb] - dv + du > ops.cap:
                        continue
                ca = A[:i] + [v] + A[i + 1:]
                cb = B[:j] + [u] + B[j + 1:]
                if ops.order_ok(ca) and ops.order_ok(cb):
                    self._set(ra, ca)
                    self._set(rb, cb)
                    improved = True
                    break
        return improved

    def two_opt_star(self) -> bool:
        """Exchange route tails so that ``u`` is followed by its neighbour ``v``."""
        d, ops = self.d, self.ops
        improved = False
        for u in self._customers():
            for v in self.neigh[u]:
                if v not in self.where:
                    continue
                ra, i = self.where[u]
                rb, j = self.where[v]
                if ra == rb:
                    continue
                A, B = self.routes[ra], self.routes[rb]
                delta = d[u][v] + d[B[j - 1]][A[i + 1]] - d[u][A[i + 1]] - d[B[j - 1]][v]
                if delta >= -EPS:
                    continue
                ca = A[:i + 1] + B[j:]
                cb = B[:j] + A[i + 1:]
                if ops.has_cap and (ops.load(ca) > ops.cap or ops.load(cb) > ops.cap):
                    continue
                if ops.order_ok(ca) and ops.order_ok(cb):
                    self._set(ra, ca)
                    self._set(rb, cb)
                    improved = True
                    break
        return improved

    def prize_moves(self) -> bool:
        d, ops = self.d, self.ops
        prizes = ops.prizes
        improved = False
        for u in self._customers():
            ra, i = self.where[u]
            r = self.routes[ra]
            gain = d[r[i - 1]][u] + d[u][r[i + 1]] - d[r[i - 1]][r[i + 1]]
            if gain - prizes[u] > EPS:
                self._set(ra, r[:i] + r[i + 1:])
                del self.where[u]
                improved = True
        for c in range(1, self.inst.n_nodes):
            if c in self.where:
                continue
            best = best_insertion(ops, self.routes, c, self.loads)
            if best is not None and prizes[c] - best[0] > EPS:
                _, ri, pos = best
                if ri < 0:
                    self.routes.append([0, c, 0])
                    self.loads.append(0)
                    ri = len(self.routes) - 1
                    self._set(ri, self.routes[ri])
                else:
                    r = self.routes[ri]
                    self._set(ri, r[:pos] + [c] + r[pos:])
                improved = True
        return improved

    def run(self, max_rounds: int) -> Solution:
        variant = self.inst.variant
        operators = [self.two_opt, self.relocate]
        if variant is not Variant.PDTSP:
            operators += [self.swap, self.two_opt_star]
        if variant is Variant.PCVRP:
            operators.append(self.prize_moves)
        for _ in range(max_rounds):
            changed = False
            for op in operators:
                changed |= op()
            if not changed:
                break
        routes = self.routes
        if variant is not Variant.PDTSP:
            routes = [r for r in routes if len(r) > 2]
        return Solution(routes)


def local_search(inst: Instance, sol: Solution, *, n_neighbors: int = 20, max_rounds: int = 1000) -> Solution:
    """Improve ``sol`` to a local optimum; the objective never increases."""
    return _Search(inst, sol, n_neighbors).run(max_rounds)
