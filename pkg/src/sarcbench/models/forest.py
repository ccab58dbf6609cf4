"""Random forest of Gini decision trees on sparse features.

Trees are grown to purity on bootstrap samples.  At each node candidate
features are drawn without replacement until ``max_features`` of them have
turned out to be non-constant on the node (constant ones do not count), so
a node only becomes an impure leaf when every feature is constant on it.

Small nodes draw candidates only among the features present in their rows.
Absent features are constant zero and would be skipped anyway, so the set
of candidates has the same distribution either way.

Randomness comes from a splitmix64 stream per tree.  Tree ``t`` of a forest
seeded with ``s`` starts from ``mix(mix(s) + t)`` where ``mix`` is the
splitmix64 finalizer, so trees can be grown in any order or in parallel
with identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..sparse import CsrMatrix, ShapeError
from .linear import TrainingError

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64_mix(z: int) -> int:
    z = (z + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def tree_seed(seed: int, index: int) -> int:
    return splitmix64_mix((splitmix64_mix(seed & MASK64) + index) & MASK64)


@njit(cache=True)
def _next_u64(state):
    state[0] += np.uint64(GOLDEN)
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _below(state, n):
    # top 53 bits as a double in [0, 1), scaled to [0, n)
    u = np.float64(_next_u64(state) >> np.uint64(11)) * (1.0 / 9007199254740992.0)
    return np.int64(u * n)


@njit(cache=True)
def _bootstrap_counts(state, n):
    w = np.zeros(n, dtype=np.float64)
    for _ in range(n):
        w[_below(state, n)] += 1.0
    return w


@njit(cache=True)
def _row_value(csr_ptr, csr_cols, csr_vals, r, f):
    lo = csr_ptr[r]
    hi = csr_ptr[r + 1]
    k = lo + np.searchsorted(csr_cols[lo:hi], f)
    if k < hi and csr_cols[k] == f:
        return csr_vals[k]
    return 0.0


@njit(cache=True)
def _gather(f, start, end, node, samples, stamp, csc_ptr, csc_rows, csc_vals,
            csr_ptr, csr_cols, csr_vals, out_val, out_row):
    """Nonzero values of feature ``f`` among the samples of ``node``."""
    cnt = 0
    if csc_ptr[f + 1] - csc_ptr[f] <= 16 * (end - start):
        for p in range(csc_ptr[f], csc_ptr[f + 1]):
            r = csc_rows[p]
            if stamp[r] == node:
                out_val[cnt] = csc_vals[p]
                out_row[cnt] = r
                cnt += 1
    else:
        for k in range(start, end):
            r = samples[k]
            v = _row_value(csr_ptr, csr_cols, csr_vals, r, f)
            if v != 0.0:
                out_val[cnt] = v
                out_row[cnt] = r
                cnt += 1
    return cnt


@njit(cache=True)
def _gini_sum(l0, l1, r0, r1):
    wl = l0 + l1
    wr = r0 + r1
    return (wl - (l0 * l0 + l1 * l1) / wl) + (wr - (r0 * r0 + r1 * r1) / wr)


@njit(cache=True)
def _best_threshold(vals, rows, y, weights, w0, w1):
    """Lowest weighted Gini split of one feature: (score, threshold, found)."""
    cnt = vals.shape[0]
    nz0 = 0.0
    nz1 = 0.0
    for k in range(cnt):
        if y[rows[k]] == 1:
            nz1 += weights[rows[k]]
        else:
            nz0 += weights[rows[k]]
    z0 = w0 - nz0
    z1 = w1 - nz1
    has_zero = z0 + z1 > 0.0

    order = np.argsort(vals, kind="mergesort")
    # distinct values in ascending order with per-class weights; zeros slot in between
    g_val = np.empty(cnt + 1)
    g0 = np.zeros(cnt + 1)
    g1 = np.zeros(cnt + 1)
    G = 0
    zero_done = not has_zero
    for k in range(cnt):
        v = vals[order[k]]
        if not zero_done and v > 0.0:
            g_val[G] = 0.0
            g0[G] = z0
            g1[G] = z1
            G += 1
            zero_done = True
        if G == 0 or g_val[G - 1] != v:
            g_val[G] = v
            g0[G] = 0.0
            g1[G] = 0.0
            G += 1
        r = rows[order[k]]
        if y[r] == 1:
            g1[G - 1] += weights[r]
        else:
            g0[G - 1] += weights[r]
    if not zero_done:
        g_val[G] = 0.0
        g0[G] = z0
        g1[G] = z1
        G += 1

    if G < 2:
        return np.inf, 0.0, False
    best = np.inf
    best_thr = 0.0
    l0 = 0.0
    l1 = 0.0
    for k in range(G - 1):
        l0 += g0[k]
        l1 += g1[k]
        score = _gini_sum(l0, l1, w0 - l0, w1 - l1)
        if score < best:
            best = score
            a = g_val[k]
            b = g_val[k + 1]
            thr = a + (b - a) / 2.0
            if thr >= b:
                thr = a
            best_thr = thr
    return best, best_thr, True


@njit(cache=True, nogil=True)
def _build_tree(csc_ptr, csc_rows, csc_vals, csr_ptr, csr_cols, csr_vals,
                y, weights, max_features, state, local_cap):
    n = y.shape[0]
    D = csc_ptr.shape[0] - 1
    samples = np.nonzero(weights)[0]
    m_total = samples.shape[0]
    cap = 2 * m_total + 1

    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    counts = np.zeros((cap, 2))

    features = np.arange(D)
    stamp = np.full(n, -1, dtype=np.int64)
    xval = np.zeros(n)
    nz_val = np.empty(m_total)
    nz_row = np.empty(m_total, dtype=np.int64)
    buf = np.empty(m_total, dtype=np.int64)

    # per-node column index, used when the node holds at most local_cap entries
    total_nnz = 0
    for k in range(m_total):
        r = samples[k]
        total_nnz += csr_ptr[r + 1] - csr_ptr[r]
    lcap = min(local_cap, total_nnz)
    f_stamp = np.full(D, -1, dtype=np.int64)
    f_count = np.zeros(D, dtype=np.int64)
    f_end = np.zeros(D, dtype=np.int64)
    u_list = np.empty(D, dtype=np.int64)
    l_row = np.empty(lcap, dtype=np.int64)
    l_val = np.empty(lcap)

    st_start = np.empty(cap, dtype=np.int64)
    st_end = np.empty(cap, dtype=np.int64)
    st_node = np.empty(cap, dtype=np.int64)
    top = 0
    st_start[0] = 0
    st_end[0] = m_total
    st_node[0] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        start = st_start[top]
        end = st_end[top]
        node = st_node[top]

        w0 = 0.0
        w1 = 0.0
        for k in range(start, end):
            r = samples[k]
            if y[r] == 1:
                w1 += weights[r]
            else:
                w0 += weights[r]
        counts[node, 0] = w0
        counts[node, 1] = w1
        if w0 == 0.0 or w1 == 0.0:
            continue

        for k in range(start, end):
            stamp[samples[k]] = node

        node_nnz = 0
        for k in range(start, end):
            r = samples[k]
            node_nnz += csr_ptr[r + 1] - csr_ptr[r]
        local = node_nnz <= lcap

        best_score = np.inf
        best_f = -1
        best_thr = 0.0
        found = 0
        if local:
            # Features absent from every row of the node are constant zero and
            # would be skipped anyway, so drawing from the features present
            # gives the same distribution over candidate sets.
            U = 0
            for k in range(start, end):
                r = samples[k]
                for p in range(csr_ptr[r], csr_ptr[r + 1]):
                    c = csr_cols[p]
                    if f_stamp[c] != node:
                        f_stamp[c] = node
                        f_count[c] = 0
                        u_list[U] = c
                        U += 1
                    f_count[c] += 1
            pos = 0
            for u in range(U):
                c = u_list[u]
                f_end[c] = pos
                pos += f_count[c]
            for k in range(start, end):
                r = samples[k]
                for p in range(csr_ptr[r], csr_ptr[r + 1]):
                    c = csr_cols[p]
                    l_row[f_end[c]] = r
                    l_val[f_end[c]] = csr_vals[p]
                    f_end[c] += 1
            i = 0
            while i < U and found < max_features:
                j = i + _below(state, U - i)
                f = u_list[j]
                u_list[j] = u_list[i]
                u_list[i] = f
                i += 1
                lo = f_end[f] - f_count[f]
                score, thr, ok = _best_threshold(l_val[lo:f_end[f]], l_row[lo:f_end[f]],
                                                 y, weights, w0, w1)
                if not ok:
                    continue
                found += 1
                if score < best_score or (score == best_score and f < best_f):
                    best_score = score
                    best_f = f
                    best_thr = thr
        else:
            i = 0
            while i < D and found < max_features:
                j = i + _below(state, D - i)
                f = features[j]
                features[j] = features[i]
                features[i] = f
                i += 1
                cnt = _gather(f, start, end, node, samples, stamp, csc_ptr, csc_rows, csc_vals,
                              csr_ptr, csr_cols, csr_vals, nz_val, nz_row)
                score, thr, ok = _best_threshold(nz_val[:cnt], nz_row[:cnt], y, weights, w0, w1)
                if not ok:
                    continue
                found += 1
                if score < best_score or (score == best_score and f < best_f):
                    best_score = score
                    best_f = f
                    best_thr = thr

        if best_f < 0:
            continue

        for k in range(start, end):
            xval[samples[k]] = 0.0
        if local:
            for p in range(f_end[best_f] - f_count[best_f], f_end[best_f]):
                xval[l_row[p]] = l_val[p]
        else:
            cnt = _gather(best_f, start, end, node, samples, stamp, csc_ptr, csc_rows, csc_vals,
                          csr_ptr, csr_cols, csr_vals, nz_val, nz_row)
            for k in range(cnt):
                xval[nz_row[k]] = nz_val[k]

        # stable partition: left block keeps x <= threshold
        nl = 0
        for k in range(start, end):
            if xval[samples[k]] <= best_thr:
                buf[nl] = samples[k]
                nl += 1
        nr = nl
        for k in range(start, end):
            if xval[samples[k]] > best_thr:
                buf[nr] = samples[k]
                nr += 1
        for k in range(end - start):
            samples[start + k] = buf[k]
        mid = start + nl

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = lid
        right[node] = rid

        st_start[top] = mid
        st_end[top] = end
        st_node[top] = rid
        top += 1
        st_start[top] = start
        st_end[top] = mid
        st_node[top] = lid
        top += 1

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), counts[:n_nodes].copy())


@njit(cache=True, nogil=True)
def _apply(csr_ptr, csr_cols, csr_vals, feature, threshold, left, right):
    n = csr_ptr.shape[0] - 1
    leaves = np.empty(n, dtype=np.int64)
    for r in range(n):
        node = 0
        while feature[node] >= 0:
            x = _row_value(csr_ptr, csr_cols, csr_vals, r, feature[node])
            if x <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        leaves[r] = node
    return leaves


@dataclass
class Tree:
    feature: np.ndarray    # -1 marks a leaf
    threshold: np.ndarray  # go left when x <= threshold
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray     # (n_nodes, 2) bootstrap-weighted class counts

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: CsrMatrix) -> np.ndarray:
        return _apply(X.row_offsets, X.col_indices, X.values,
                      self.feature, self.threshold, self.left, self.right)

    def predict_proba(self, X: CsrMatrix) -> np.ndarray:
        c = self.counts[self.apply(X)]
        return c / c.sum(axis=1, keepdims=True)


@dataclass
class ForestModel:
    trees: list[Tree]
    seed: int
    n_features: int
    max_features: int
    bootstrap: bool = True

    def predict_proba(self, X: CsrMatrix) -> np.ndarray:
        if X.n_cols != self.n_features:
            raise ShapeError(f"model expects {self.n_features} features, got {X.n_cols}")
        total = np.zeros((X.n_rows, 2))
        for t in self.trees:
            total += t.predict_proba(X)
        return total / len(self.trees)

    def predict(self, X: CsrMatrix) -> np.ndarray:
        p = self.predict_proba(X)
        return (p[:, 1] > p[:, 0]).astype(np.int64)


def default_max_features(n_features: int) -> int:
    return max(1, math.ceil(math.sqrt(n_features)))


# Nodes holding at most LOCAL_FACTOR * n_features stored entries get their own
# column index; bigger ones read columns of the whole matrix.  Small nodes are
# where most features are constant, so the index saves futile draws there.
LOCAL_FACTOR = 4


def grow_tree(X: CsrMatrix, y, seed: int, max_features: int | None = None,
              bootstrap: bool = True, csc=None, local_cap: int | None = None) -> Tree:
    """Grow one tree from a splitmix64 stream started at ``seed``."""
    y = np.asarray(y, dtype=np.int64)
    if max_features is None:
        max_features = default_max_features(X.n_cols)
    if csc is None:
        csc = X.to_csc()
    if local_cap is None:
        local_cap = LOCAL_FACTOR * X.n_cols
    state = np.array([seed & MASK64], dtype=np.uint64)
    if bootstrap:
        weights = _bootstrap_counts(state, X.n_rows)
    else:
        weights = np.ones(X.n_rows)
    parts = _build_tree(csc[0], csc[1], csc[2], X.row_offsets, X.col_indices, X.values,
                        y, weights, min(max_features, X.n_cols), state, local_cap)
    return Tree(*parts)


def train_random_forest(X: CsrMatrix, y, n_trees: int = 150, seed: int = 42,
                        max_features: int | None = None, bootstrap: bool = True,
                        n_jobs: int = 1) -> ForestModel:
    y = np.asarray(y, dtype=np.int64)
    if X.n_rows != len(y):
        raise ShapeError("X and y differ in length")
    if set(np.unique(y).tolist()) != {0, 1}:
        raise TrainingError("need both classes 0 and 1 to train")
    if max_features is None:
        max_features = default_max_features(X.n_cols)
    csc = X.to_csc()

    def grow(t):
        return grow_tree(X, y, tree_seed(seed, t), max_features, bootstrap, csc)

    if n_jobs == 1:
        trees = [grow(t) for t in range(n_trees)]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs if n_jobs > 0 else None) as pool:
            trees = list(pool.map(grow, range(n_trees)))
    return ForestModel(trees, seed, X.n_cols, max_features, bootstrap)


def forest_predict_proba(m: ForestModel, X: CsrMatrix) -> np.ndarray:
    return m.predict_proba(X)
