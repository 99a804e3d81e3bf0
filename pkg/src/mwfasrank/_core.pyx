# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.  Mirrors ``_pycore`` operation for operation."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64

cdef enum:
    WHITE = 0
    GRAY = 1
    BLACK = 2


def cancel_cycles(const i64[::1] indptr, const i64[::1] indices,
                  const double[::1] weights, double zero_threshold,
                  bint incremental=True):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t m = indices.shape[0]
    cdef double[::1] resid = np.array(weights, dtype=np.float64, copy=True)
    cdef cnp.uint8_t[::1] removed = np.zeros(m, dtype=np.uint8)
    cdef cnp.uint8_t[::1] color = np.zeros(n, dtype=np.uint8)
    cdef i64[::1] it = np.array(indptr[:n], dtype=np.int64, copy=True)
    cdef i64[::1] disc = np.zeros(n, dtype=np.int64)
    cdef i64[::1] depth = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] visit = np.empty(n, dtype=np.int64)
    cdef i64[::1] stack = np.empty(n, dtype=np.int64)
    cdef i64[::1] stack_edge = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t nvisit = 0, sp = 0, root = 0
    cdef Py_ssize_t v, w, x, e, end, top, k, first_cut, ncyc, cut_depth, keep
    cdef double delta

    while True:
        if sp == 0:
            while root < n and color[root] != WHITE:
                root += 1
            if root == n:
                break
            color[root] = GRAY
            disc[root] = nvisit
            visit[nvisit] = root
            nvisit += 1
            depth[root] = 0
            stack[0] = root
            stack_edge[0] = -1
            sp = 1
        v = stack[sp - 1]
        e = it[v]
        end = indptr[v + 1]
        while e < end and removed[e]:
            e += 1
        it[v] = e
        if e == end:
            color[v] = BLACK
            depth[v] = -1
            sp -= 1
            continue
        w = indices[e]
        if color[w] == WHITE:
            it[v] = e + 1
            color[w] = GRAY
            disc[w] = nvisit
            visit[nvisit] = w
            nvisit += 1
            depth[w] = sp
            stack[sp] = w
            stack_edge[sp] = e
            sp += 1
            continue
        if color[w] == BLACK:
            it[v] = e + 1
            continue

        # back edge v -> w; cycle edges are stack_edge[top+1:sp] then e
        top = depth[w]
        ncyc = sp - top
        delta = resid[e]
        for k in range(top + 1, sp):
            if resid[stack_edge[k]] < delta:
                delta = resid[stack_edge[k]]
        # same visiting order as the Python kernel: tree edges first
        first_cut = -1
        for k in range(ncyc):
            if k < ncyc - 1:
                x = stack_edge[top + 1 + k]
            else:
                x = e
            resid[x] = resid[x] - delta
            if resid[x] <= zero_threshold:
                removed[x] = 1
                if first_cut < 0:
                    first_cut = k

        if not incremental:
            for x in range(n):
                color[x] = WHITE
                it[x] = indptr[x]
                depth[x] = -1
            nvisit = 0
            sp = 0
            root = 0
            continue

        if first_cut == ncyc - 1:
            it[v] = e + 1
            continue
        cut_depth = top + 1 + first_cut
        keep = disc[stack[cut_depth]]
        while nvisit > keep:
            nvisit -= 1
            x = visit[nvisit]
            color[x] = WHITE
            it[x] = indptr[x]
            depth[x] = -1
        sp = cut_depth

    return np.asarray(removed)


def reinsert(const i64[::1] indptr, const i64[::1] indices,
             cnp.uint8_t[::1] alive, const i64[::1] candidates):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t m = indices.shape[0]
    cdef i64[::1] src = np.empty(m, dtype=np.int64)
    cdef i64[::1] stamp = np.zeros(n, dtype=np.int64)
    cdef i64[::1] todo = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t u, k, c, e, target, x, y, top
    cdef i64 token = 0
    cdef bint found

    for u in range(n):
        for k in range(indptr[u], indptr[u + 1]):
            src[k] = u

    for c in range(candidates.shape[0]):
        e = candidates[c]
        u = src[e]
        target = indices[e]
        token += 1
        stamp[target] = token
        todo[0] = target
        top = 1
        found = False
        while top > 0 and not found:
            top -= 1
            x = todo[top]
            for k in range(indptr[x], indptr[x + 1]):
                if not alive[k]:
                    continue
                y = indices[k]
                if y == u:
                    found = True
                    break
                if stamp[y] != token:
                    stamp[y] = token
                    todo[top] = y
                    top += 1
        if not found:
            alive[e] = 1
    return np.asarray(alive)


cdef inline double _local(const i64[::1] pair_indptr, const i64[::1] pair_nbr,
                          const double[::1] pair_target, double[::1] r,
                          Py_ssize_t index, double x, double loss_eps) noexcept nogil:
    cdef double acc = 0.0, rj, d
    cdef Py_ssize_t k
    for k in range(pair_indptr[index], pair_indptr[index + 1]):
        rj = r[pair_nbr[k]]
        d = (x - rj) / (x + rj + loss_eps) - pair_target[k]
        acc += d * d
    return acc


cdef double _ternary(const i64[::1] pair_indptr, const i64[::1] pair_nbr,
                     const double[::1] pair_target, double[::1] r, Py_ssize_t index,
                     double lower, double upper, Py_ssize_t steps, double eps_stop,
                     double loss_eps) noexcept nogil:
    cdef double third, mid1, mid2, loss1, loss2
    cdef Py_ssize_t s
    for s in range(steps):
        third = (upper - lower) / 3.0
        mid1 = lower + third
        mid2 = upper - third
        loss1 = _local(pair_indptr, pair_nbr, pair_target, r, index, mid1, loss_eps)
        loss2 = _local(pair_indptr, pair_nbr, pair_target, r, index, mid2, loss_eps)
        if loss1 < loss2:
            upper = mid2
        elif loss1 > loss2:
            lower = mid1
        else:
            lower = mid1
            upper = mid2
        if upper - lower < eps_stop:
            break
    return (lower + upper) / 2.0


def local_ratio_loss(const i64[::1] pair_indptr, const i64[::1] pair_nbr,
                     const double[::1] pair_target, double[::1] scores,
                     Py_ssize_t index, double x, double loss_eps):
    return _local(pair_indptr, pair_nbr, pair_target, scores, index, x, loss_eps)


def ternary_search(const i64[::1] pair_indptr, const i64[::1] pair_nbr,
                   const double[::1] pair_target, double[::1] scores, Py_ssize_t index,
                   double lower, double upper, Py_ssize_t steps, double eps_stop,
                   double loss_eps):
    return _ternary(pair_indptr, pair_nbr, pair_target, scores, index,
                    lower, upper, steps, eps_stop, loss_eps)


cdef inline double r_at(double[::1] scores, i64[::1] order, Py_ssize_t p) noexcept nogil:
    return scores[order[p]]


def ratio_sweeps(const i64[::1] pair_indptr, const i64[::1] pair_nbr,
                 const double[::1] pair_target, double[::1] scores,
                 Py_ssize_t num_iterations, Py_ssize_t steps, double eps_stop,
                 double loss_eps, bint guard, double margin):
    cdef Py_ssize_t n = scores.shape[0]
    cdef Py_ssize_t it, p, k, j
    cdef i64[::1] order
    cdef double prev_s, next_s, lower, upper, shrink, lo, hi, old, new, top_s
    cdef bint has_prev, has_next

    for it in range(num_iterations):
        order = np.argsort(np.asarray(scores), kind="stable").astype(np.int64)
        with nogil:
            for p in range(n):
                k = order[p]
                has_prev = p > 0
                has_next = p < n - 1
                prev_s = r_at(scores, order, p - 1) if has_prev else 0.0
                next_s = r_at(scores, order, p + 1) if has_next else 0.0
                lower = prev_s if has_prev else 0.0
                if has_next:
                    upper = next_s
                else:
                    top_s = scores[0]
                    for j in range(1, n):
                        if scores[j] > top_s:
                            top_s = scores[j]
                    upper = top_s + 1.0
                if not lower < upper:
                    continue
                shrink = (upper - lower) * margin
                lo = lower + shrink
                hi = upper - shrink
                if not lo < hi:
                    continue
                old = scores[k]
                new = _ternary(pair_indptr, pair_nbr, pair_target, scores, k,
                               lo, hi, steps, eps_stop, loss_eps)
                if has_prev and not new > prev_s:
                    continue
                if has_next and not new < next_s:
                    continue
                if guard:
                    if (_local(pair_indptr, pair_nbr, pair_target, scores, k, new, loss_eps)
                            > _local(pair_indptr, pair_nbr, pair_target, scores, k, old, loss_eps)):
                        continue
                scores[k] = new
    return np.asarray(scores)
