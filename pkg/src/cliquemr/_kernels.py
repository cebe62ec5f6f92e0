"""Hot loops, each in a compiled (``*_nb``) and a pure-numpy (``*_np``) form.

Graphs reach these kernels as an *oriented* CSR: vertex ``v`` lists only
its higher-ranked neighbors, sorted ascending.  Every clique is then found
exactly once, starting from its lowest-ranked vertex, by repeatedly
intersecting sorted out-lists.

Optional features share one code path:

* ``inc`` (length n, or empty): per-vertex clique incidence accumulator;
* ``bucket``/``remaining`` (length n / b, or empty): only cliques whose
  multiset of vertex buckets equals the multiset encoded in ``remaining``
  are counted; branches that overdraw a bucket are pruned immediately.

The public dispatchers at the bottom pick the numba or numpy variant
according to ``CLIQUEMR_DISABLE_NUMBA``.
"""
import numpy as np

from ._jit import USE_NUMBA, njit

INT64_MAX = np.iinfo(np.int64).max


# ------------------------------------------------------------------ numba

@njit
def _intersect_into(a, b, out):
    i = 0
    j = 0
    m = 0
    while i < len(a) and j < len(b):
        x = a[i]
        y = b[j]
        if x == y:
            out[m] = x
            m += 1
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return m


@njit
def _intersect_count(a, b):
    i = 0
    j = 0
    m = 0
    while i < len(a) and j < len(b):
        x = a[i]
        y = b[j]
        if x == y:
            m += 1
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return m


@njit
def _count_dag_nb(indptr, indices, k, inc, bucket, remaining):
    """Number of ``k``-cliques (k >= 3) of an oriented CSR graph.

    Depth-first over an explicit stack: ``buf[d][:clen[d]]`` are the common
    out-neighbors of the ``d`` vertices in ``chosen[:d]``.
    """
    n = len(indptr) - 1
    use_inc = len(inc) > 0
    use_b = len(bucket) > 0
    plain = not use_inc and not use_b
    maxdeg = 0
    for v in range(n):
        d = indptr[v + 1] - indptr[v]
        if d > maxdeg:
            maxdeg = d
    buf = np.empty((k + 1, maxdeg + 1), dtype=np.int64)
    clen = np.zeros(k + 1, dtype=np.int64)
    pos = np.zeros(k + 1, dtype=np.int64)
    chosen = np.empty(k + 1, dtype=np.int64)
    total = 0
    for v in range(n):
        lo = indptr[v]
        hi = indptr[v + 1]
        if hi - lo < k - 1:
            continue
        if use_b:
            if remaining[bucket[v]] == 0:
                continue
            remaining[bucket[v]] -= 1
        chosen[0] = v
        for i in range(hi - lo):
            buf[1, i] = indices[lo + i]
        clen[1] = hi - lo
        pos[1] = 0
        sub = 0
        d = 1
        while d >= 1:
            need = k - d
            c = clen[d]
            if need == 1 or (need == 2 and plain):
                cnt = 0
                if need == 2:
                    for i in range(c - 1):
                        w = buf[d, i]
                        cnt += _intersect_count(indices[indptr[w]:indptr[w + 1]], buf[d, i + 1:c])
                else:
                    for i in range(c):
                        w = buf[d, i]
                        if use_b and remaining[bucket[w]] == 0:
                            continue
                        cnt += 1
                        if use_inc:
                            inc[w] += 1
                    if use_inc and cnt > 0:
                        for j in range(d):
                            inc[chosen[j]] += cnt
                sub += cnt
                d -= 1
                if use_b and d >= 1:
                    remaining[bucket[chosen[d]]] += 1
                continue
            i = pos[d]
            if i > c - need:
                d -= 1
                if use_b and d >= 1:
                    remaining[bucket[chosen[d]]] += 1
                continue
            pos[d] = i + 1
            w = buf[d, i]
            if use_b and remaining[bucket[w]] == 0:
                continue
            m = _intersect_into(indices[indptr[w]:indptr[w + 1]], buf[d, i + 1:c], buf[d + 1])
            if m >= need - 1:
                if use_b:
                    remaining[bucket[w]] -= 1
                chosen[d] = w
                clen[d + 1] = m
                pos[d + 1] = 0
                d += 1
        if use_b:
            remaining[bucket[v]] += 1
        if sub > INT64_MAX - total:
            raise OverflowError("clique count exceeds 64-bit range")
        total += sub
    return total


@njit
def _local_csr_nb(ex, ey):
    """Relabel rank-ordered edges ``ex < ey`` to a compact oriented CSR."""
    both = np.concatenate((ex, ey))
    nodes = np.unique(both)
    s = len(nodes)
    lx = np.searchsorted(nodes, ex)
    ly = np.searchsorted(nodes, ey)
    order = np.argsort(lx * s + ly)
    indptr = np.zeros(s + 1, dtype=np.int64)
    for i in range(len(lx)):
        indptr[lx[i] + 1] += 1
    for i in range(s):
        indptr[i + 1] += indptr[i]
    indices = ly[order].astype(np.int64)
    return nodes, indptr, indices


@njit
def _count_groups_nb(offsets, ex, ey, k, per_node):
    """Count ``k``-cliques (k >= 2) in the edge set of every group.

    Returns per-group counts plus, when ``per_node``, flattened
    ``(node, incidence)`` rows and their per-group offsets.
    """
    g = len(offsets) - 1
    counts = np.zeros(g, dtype=np.int64)
    cap = 2 * len(ex) if per_node else 0
    inc_nodes = np.empty(cap, dtype=np.int64)
    inc_vals = np.empty(cap, dtype=np.int64)
    inc_off = np.zeros(g + 1, dtype=np.int64)
    empty = np.zeros(0, dtype=np.int64)
    pos = 0
    for gi in range(g):
        a = offsets[gi]
        b = offsets[gi + 1]
        if b > a:
            nodes, indptr, indices = _local_csr_nb(ex[a:b], ey[a:b])
            s = len(nodes)
            inc = np.zeros(s if per_node else 0, dtype=np.int64)
            if k == 2:
                c = b - a
                if per_node:
                    for i in range(s):
                        inc[i] = indptr[i + 1] - indptr[i]
                    for i in range(len(indices)):
                        inc[indices[i]] += 1
            elif k > s:
                c = 0
            else:
                c = _count_dag_nb(indptr, indices, k, inc, empty, empty)
            counts[gi] = c
            if per_node:
                for i in range(s):
                    if inc[i] > 0:
                        inc_nodes[pos] = nodes[i]
                        inc_vals[pos] = inc[i]
                        pos += 1
        inc_off[gi + 1] = pos
    return counts, inc_nodes[:pos], inc_vals[:pos], inc_off


@njit
def _count_bucket_groups_nb(offsets, ex, ey, k, node_bucket, targets):
    """Per group, count ``k``-cliques whose bucket multiset equals ``targets[g]``."""
    g = len(offsets) - 1
    counts = np.zeros(g, dtype=np.int64)
    empty = np.zeros(0, dtype=np.int64)
    for gi in range(g):
        a = offsets[gi]
        b = offsets[gi + 1]
        if b - a == 0:
            continue
        nodes, indptr, indices = _local_csr_nb(ex[a:b], ey[a:b])
        if k > len(nodes):
            continue
        bucket = node_bucket[nodes]
        remaining = targets[gi].copy()
        counts[gi] = _count_dag_nb(indptr, indices, k, empty, bucket, remaining)
    return counts


@njit
def _segment_pairs_nb(offsets, members):
    """All ``(members[i], members[j], segment)`` with i < j inside each segment."""
    g = len(offsets) - 1
    total = 0
    for s in range(g):
        d = offsets[s + 1] - offsets[s]
        total += d * (d - 1) // 2
    xs = np.empty(total, dtype=members.dtype)
    ys = np.empty(total, dtype=members.dtype)
    seg = np.empty(total, dtype=np.int64)
    p = 0
    for s in range(g):
        a = offsets[s]
        b = offsets[s + 1]
        for i in range(a, b):
            for j in range(i + 1, b):
                xs[p] = members[i]
                ys[p] = members[j]
                seg[p] = s
                p += 1
    return xs, ys, seg


# ------------------------------------------------------------------ numpy

def _gather_rows(indptr, indices, rows):
    starts = indptr[rows]
    lens = indptr[rows + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=indices.dtype), lens
    base = np.repeat(starts - (np.cumsum(lens) - lens), lens)
    return indices[np.arange(total) + base], lens


def _extend_np(indptr, indices, cand, need, chosen, inc, bucket, remaining):
    use_inc = len(inc) > 0
    use_b = len(bucket) > 0
    if use_b:
        cand = cand[remaining[bucket[cand]] > 0]
    if need == 1:
        cnt = len(cand)
        if use_inc and cnt:
            np.add.at(inc, cand, 1)
            inc[np.asarray(chosen, dtype=np.int64)] += cnt
        return cnt
    if need == 2 and not use_inc and not use_b:
        neigh, _ = _gather_rows(indptr, indices, cand)
        return int(np.isin(neigh, cand, assume_unique=False).sum())
    total = 0
    for i in range(len(cand) - need + 1):
        w = int(cand[i])
        if use_b:
            if remaining[bucket[w]] == 0:
                continue
            remaining[bucket[w]] -= 1
        nxt = np.intersect1d(indices[indptr[w]:indptr[w + 1]], cand[i + 1:], assume_unique=True)
        if len(nxt) >= need - 1:
            total += _extend_np(indptr, indices, nxt, need - 1, chosen + [w], inc, bucket, remaining)
        if use_b:
            remaining[bucket[w]] += 1
    return total


def _count_dag_np(indptr, indices, k, inc, bucket, remaining):
    use_b = len(bucket) > 0
    out_deg = np.diff(indptr)
    total = 0
    for v in np.flatnonzero(out_deg >= k - 1):
        v = int(v)
        if use_b:
            if remaining[bucket[v]] == 0:
                continue
            remaining[bucket[v]] -= 1
        total += _extend_np(indptr, indices, indices[indptr[v]:indptr[v + 1]], k - 1, [v],
                            inc, bucket, remaining)
        if use_b:
            remaining[bucket[v]] += 1
    if total > INT64_MAX:
        raise OverflowError("clique count exceeds 64-bit range")
    return total


def _local_csr_np(ex, ey):
    nodes = np.unique(np.concatenate((ex, ey)))
    s = len(nodes)
    lx = np.searchsorted(nodes, ex)
    ly = np.searchsorted(nodes, ey)
    order = np.argsort(lx * s + ly, kind="stable")
    indptr = np.zeros(s + 1, dtype=np.int64)
    np.cumsum(np.bincount(lx, minlength=s), out=indptr[1:])
    return nodes, indptr, ly[order].astype(np.int64)


def _count_groups_np(offsets, ex, ey, k, per_node):
    g = len(offsets) - 1
    counts = np.zeros(g, dtype=np.int64)
    nodes_out, vals_out = [], []
    inc_off = np.zeros(g + 1, dtype=np.int64)
    empty = np.zeros(0, dtype=np.int64)
    pos = 0
    for gi in range(g):
        a, b = int(offsets[gi]), int(offsets[gi + 1])
        if b > a:
            nodes, indptr, indices = _local_csr_np(ex[a:b], ey[a:b])
            s = len(nodes)
            inc = np.zeros(s if per_node else 0, dtype=np.int64)
            if k == 2:
                c = b - a
                if per_node:
                    inc += np.diff(indptr)
                    inc += np.bincount(indices, minlength=s)
            elif k > s:
                c = 0
            else:
                c = _count_dag_np(indptr, indices, k, inc, empty, empty)
            counts[gi] = c
            if per_node:
                hit = inc > 0
                nodes_out.append(nodes[hit])
                vals_out.append(inc[hit])
                pos += int(hit.sum())
        inc_off[gi + 1] = pos
    if nodes_out:
        return counts, np.concatenate(nodes_out), np.concatenate(vals_out), inc_off
    return counts, empty, empty, inc_off


def _count_bucket_groups_np(offsets, ex, ey, k, node_bucket, targets):
    g = len(offsets) - 1
    counts = np.zeros(g, dtype=np.int64)
    empty = np.zeros(0, dtype=np.int64)
    for gi in range(g):
        a, b = int(offsets[gi]), int(offsets[gi + 1])
        if b == a:
            continue
        nodes, indptr, indices = _local_csr_np(ex[a:b], ey[a:b])
        if k > len(nodes):
            continue
        counts[gi] = _count_dag_np(indptr, indices, k, empty, node_bucket[nodes],
                                   targets[gi].copy())
    return counts


def _segment_pairs_np(offsets, members):
    sizes = np.diff(offsets)
    xs, ys, segs = [], [], []
    for d in np.unique(sizes[sizes >= 2]):
        d = int(d)
        which = np.flatnonzero(sizes == d)
        iu, ju = np.triu_indices(d, k=1)
        starts = offsets[which][:, None]
        xs.append(members[(starts + iu).ravel()])
        ys.append(members[(starts + ju).ravel()])
        segs.append(np.repeat(which, len(iu)))
    if not xs:
        empty = np.empty(0, dtype=members.dtype)
        return empty, empty.copy(), np.empty(0, dtype=np.int64)
    seg = np.concatenate(segs)
    # restore segment-major order to match the compiled variant
    order = np.argsort(seg, kind="stable")
    return np.concatenate(xs)[order], np.concatenate(ys)[order], seg[order]


# ------------------------------------------------------------------ dispatch

if USE_NUMBA:
    count_dag = _count_dag_nb
    local_csr = _local_csr_nb
    count_groups = _count_groups_nb
    count_bucket_groups = _count_bucket_groups_nb
    segment_pairs = _segment_pairs_nb
else:
    count_dag = _count_dag_np
    local_csr = _local_csr_np
    count_groups = _count_groups_np
    count_bucket_groups = _count_bucket_groups_np
    segment_pairs = _segment_pairs_np

VARIANTS = {
    "numba": dict(count_dag=_count_dag_nb, count_groups=_count_groups_nb,
                  count_bucket_groups=_count_bucket_groups_nb, segment_pairs=_segment_pairs_nb),
    "numpy": dict(count_dag=_count_dag_np, count_groups=_count_groups_np,
                  count_bucket_groups=_count_bucket_groups_np, segment_pairs=_segment_pairs_np),
}
