"""Pure-Python kernels.  Same signatures and arithmetic order as ``_core.pyx``.

Graphs arrive as CSR arrays (``indptr``, ``indices``) whose rows are sorted
by destination; an edge is identified by its CSR position.
"""

import numpy as np

WHITE, GRAY, BLACK = 0, 1, 2


def cancel_cycles(indptr, indices, weights, zero_threshold, incremental=True):
    """Local-ratio cycle cancellation.

    Returns a uint8 mask over edge ids marking the edges deleted because
    their residual weight dropped to ``zero_threshold`` or below.
    """
    n = len(indptr) - 1
    ptr = [int(x) for x in indptr]
    dst = [int(x) for x in indices]
    resid = [float(x) for x in weights]
    alive = [True] * len(dst)

    color = [WHITE] * n
    it = ptr[:n]
    disc = [0] * n
    visit = []
    stack = []
    stack_edge = []
    depth = [-1] * n
    root = 0

    def reset_all():
        for v in range(n):
            color[v] = WHITE
            it[v] = ptr[v]
            depth[v] = -1
        visit.clear()
        stack.clear()
        stack_edge.clear()

    while True:
        if not stack:
            while root < n and color[root] != WHITE:
                root += 1
            if root == n:
                break
            color[root] = GRAY
            disc[root] = len(visit)
            visit.append(root)
            depth[root] = 0
            stack.append(root)
            stack_edge.append(-1)
        v = stack[-1]
        e = it[v]
        end = ptr[v + 1]
        while e < end and not alive[e]:
            e += 1
        it[v] = e
        if e == end:
            color[v] = BLACK
            depth[v] = -1
            stack.pop()
            stack_edge.pop()
            continue
        w = dst[e]
        if color[w] == WHITE:
            it[v] = e + 1
            color[w] = GRAY
            disc[w] = len(visit)
            visit.append(w)
            depth[w] = len(stack)
            stack.append(w)
            stack_edge.append(e)
            continue
        if color[w] == BLACK:
            it[v] = e + 1
            continue

        # back edge v -> w closes the cycle stack[depth[w]:] + [w]
        top = depth[w]
        cyc = stack_edge[top + 1:]
        cyc.append(e)
        delta = resid[cyc[0]]
        for c in cyc:
            if resid[c] < delta:
                delta = resid[c]
        first_cut = -1
        for k, c in enumerate(cyc):
            resid[c] = resid[c] - delta
            if resid[c] <= zero_threshold:
                alive[c] = False
                if first_cut < 0:
                    first_cut = k

        if not incremental:
            reset_all()
            root = 0
            continue

        # Rewind to the state a fresh DFS reaches just before it would have
        # explored the first deleted edge.
        if first_cut == len(cyc) - 1:
            it[v] = e + 1
            continue
        cut_depth = top + 1 + first_cut
        b = stack[cut_depth]
        keep = disc[b]
        while len(visit) > keep:
            x = visit.pop()
            color[x] = WHITE
            it[x] = ptr[x]
            depth[x] = -1
        del stack[cut_depth:]
        del stack_edge[cut_depth:]

    return np.array([0 if a else 1 for a in alive], dtype=np.uint8)


def reinsert(indptr, indices, alive, candidates):
    """Greedily re-add ``candidates`` (edge ids, in order) that keep the graph acyclic.

    ``alive`` is updated in place and returned.
    """
    n = len(indptr) - 1
    ptr = [int(x) for x in indptr]
    dst = [int(x) for x in indices]
    live = [bool(a) for a in alive]
    src = [0] * len(dst)
    for u in range(n):
        for k in range(ptr[u], ptr[u + 1]):
            src[k] = u
    stamp = [0] * n
    token = 0
    for e in candidates:
        e = int(e)
        u, target = src[e], dst[e]
        # does dst reach src?
        token += 1
        stamp[target] = token
        todo = [target]
        found = False
        while todo and not found:
            x = todo.pop()
            for k in range(ptr[x], ptr[x + 1]):
                if not live[k]:
                    continue
                y = dst[k]
                if y == u:
                    found = True
                    break
                if stamp[y] != token:
                    stamp[y] = token
                    todo.append(y)
        if not found:
            live[e] = True
            alive[e] = 1
    return alive


def local_ratio_loss(pair_indptr, pair_nbr, pair_target, scores, index, x, loss_eps):
    """Ratio-loss terms of the unordered pairs touching ``index`` with its score set to ``x``."""
    acc = 0.0
    for k in range(pair_indptr[index], pair_indptr[index + 1]):
        rj = scores[pair_nbr[k]]
        d = (x - rj) / (x + rj + loss_eps) - pair_target[k]
        acc += d * d
    return acc


def ternary_search(pair_indptr, pair_nbr, pair_target, scores, index, lower, upper,
                   steps, eps_stop, loss_eps):
    for _ in range(steps):
        third = (upper - lower) / 3.0
        mid1 = lower + third
        mid2 = upper - third
        loss1 = local_ratio_loss(pair_indptr, pair_nbr, pair_target, scores, index, mid1, loss_eps)
        loss2 = local_ratio_loss(pair_indptr, pair_nbr, pair_target, scores, index, mid2, loss_eps)
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


def ratio_sweeps(pair_indptr, pair_nbr, pair_target, scores, num_iterations, steps,
                 eps_stop, loss_eps, guard, margin):
    """Order-preserving per-vertex ternary refinement of ``scores`` (updated in place)."""
    n = len(scores)
    pi = [int(x) for x in pair_indptr]
    nb = [int(x) for x in pair_nbr]
    tg = [float(x) for x in pair_target]
    r = [float(x) for x in scores]
    for _ in range(num_iterations):
        order = [int(x) for x in np.argsort(np.asarray(r), kind="stable")]
        for p in range(n):
            k = order[p]
            prev_s = r[order[p - 1]] if p > 0 else None
            next_s = r[order[p + 1]] if p < n - 1 else None
            lower = 0.0 if prev_s is None else prev_s
            if next_s is None:
                upper = max(r) + 1.0
            else:
                upper = next_s
            if not lower < upper:
                continue
            shrink = (upper - lower) * margin
            lo = lower + shrink
            hi = upper - shrink
            if not lo < hi:
                continue
            old = r[k]
            new = ternary_search(pi, nb, tg, r, k, lo, hi, steps, eps_stop, loss_eps)
            if prev_s is not None and not new > prev_s:
                continue
            if next_s is not None and not new < next_s:
                continue
            if guard:
                before = local_ratio_loss(pi, nb, tg, r, k, old, loss_eps)
                after = local_ratio_loss(pi, nb, tg, r, k, new, loss_eps)
                if after > before:
                    continue
            r[k] = new
    for i in range(n):
        scores[i] = r[i]
    return scores
