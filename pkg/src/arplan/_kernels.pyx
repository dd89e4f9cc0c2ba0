# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same contract and results as ``arplan._pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memmove
from libc.math cimport INFINITY

cnp.import_array()

ctypedef cnp.int64_t i64


cdef struct SearchCtx:
    int n
    int k
    int p
    int m_count
    int obj
    const i64* order
    const double* eff
    const double* cap_slack
    const double* cap_exact
    const double* vals          # (M, N, P)
    const double* gains_rel     # (M, K, N)
    const double* pooled        # (M, N)
    const i64* pooled_order     # (M, N)
    const i64* rel_order        # (M, K, N)
    const double* suffix_post   # (M, N+1)
    const double* thr           # (M,)
    const i64* prec_ptr
    const i64* prec_other
    const i64* prec_sign
    const i64* coup_ptr
    const i64* coup_other
    i64 node_limit
    i64 nodes
    int status
    int done
    int found
    double best
    i64* assign
    i64* best_assign
    double* load
    double* partial
    double* rem
    double* exact
    int* active
    int n_active
    double* saved               # (N+1, M) per-depth copies of partial


cdef inline double frac_knapsack(const i64* sorted_idx, const double* gains, const double* eff,
                                 const i64* assign, int n, double capacity) noexcept nogil:
    cdef double total = 0.0
    cdef double g, e
    cdef int t
    cdef i64 j
    for t in range(n):
        j = sorted_idx[t]
        if assign[j] >= 0:
            continue
        g = gains[j]
        if g <= 0.0:
            break
        e = eff[j]
        if e <= capacity:
            total += g
            capacity -= e
        else:
            total += g * capacity / e
            break
    return total


cdef double bound(SearchCtx* c, int m, int depth) noexcept nogil:
    cdef int r
    cdef double total_rem = 0.0
    cdef double v
    for r in range(c.k):
        v = c.cap_slack[r] - c.load[r]
        if v < 0.0:
            v = 0.0
        c.rem[r] = v
        total_rem += v
    cdef double pooled_b = frac_knapsack(c.pooled_order + m * c.n, c.pooled + m * c.n,
                                         c.eff, c.assign, c.n, total_rem)
    cdef double per_rel = 0.0
    for r in range(c.k):
        per_rel += frac_knapsack(c.rel_order + (m * c.k + r) * c.n,
                                 c.gains_rel + (m * c.k + r) * c.n,
                                 c.eff, c.assign, c.n, c.rem[r])
    if per_rel < pooled_b:
        pooled_b = per_rel
    return c.partial[m] + c.suffix_post[m * (c.n + 1) + depth] + pooled_b


cdef void leaf(SearchCtx* c) noexcept nogil:
    cdef int j, r, m
    for r in range(c.k):
        c.exact[r] = 0.0
    for j in range(c.n):
        r = <int>c.assign[j]
        if r < c.k:
            c.exact[r] += c.eff[j]
    for r in range(c.k):
        if c.exact[r] > c.cap_exact[r]:
            return
    for m in range(c.m_count):
        if c.partial[m] < c.thr[m]:
            return
    if c.obj < 0:
        for j in range(c.n):
            if c.assign[j] != c.best_assign[j]:
                if c.assign[j] < c.best_assign[j]:
                    for r in range(c.n):
                        c.best_assign[r] = c.assign[r]
                break
    elif c.partial[c.obj] > c.best:
        c.best = c.partial[c.obj]
        for j in range(c.n):
            c.best_assign[j] = c.assign[j]
        c.found = 1


cdef inline int deps_ok(SearchCtx* c, i64 j, int r) noexcept nogil:
    cdef i64 e, ro
    for e in range(c.prec_ptr[j], c.prec_ptr[j + 1]):
        ro = c.assign[c.prec_other[e]]
        if ro < 0:
            continue
        if c.prec_sign[e] > 0 and r > ro:
            return 0
        if c.prec_sign[e] < 0 and r < ro:
            return 0
    for e in range(c.coup_ptr[j], c.coup_ptr[j + 1]):
        ro = c.assign[c.coup_other[e]]
        if ro >= 0 and ro != r:
            return 0
    return 1


cdef inline int lex_prunable(SearchCtx* c) noexcept nogil:
    # smallest completion puts every open feature into release 0
    cdef int j
    cdef i64 a
    for j in range(c.n):
        a = c.assign[j]
        if a < 0:
            a = 0
        if a != c.best_assign[j]:
            return a > c.best_assign[j]
    return 1


cdef void visit(SearchCtx* c, int depth) noexcept nogil:
    if c.done:
        return
    if depth == c.n:
        leaf(c)
        return
    cdef i64 j = c.order[depth]
    cdef int r, m, a, pruned
    cdef double saved_load = 0.0
    cdef double b
    cdef double* saved_partial = c.saved + depth * c.m_count
    for r in range(c.p):
        if c.nodes >= c.node_limit:
            c.status = 1
            c.done = 1
            break
        if r < c.k and c.load[r] + c.eff[j] > c.cap_slack[r]:
            continue
        if not deps_ok(c, j, r):
            continue
        c.nodes += 1
        if r < c.k:
            saved_load = c.load[r]
        for m in range(c.m_count):
            saved_partial[m] = c.partial[m]
        c.assign[j] = r
        if r < c.k:
            c.load[r] = c.load[r] + c.eff[j]
        for m in range(c.m_count):
            c.partial[m] = c.partial[m] + c.vals[(m * c.n + j) * c.p + r]
        pruned = 0
        if c.obj < 0 and lex_prunable(c):
            pruned = 1
        for a in range(c.n_active if not pruned else 0):
            m = c.active[a]
            b = bound(c, m, depth + 1)
            if b < c.thr[m] or (m == c.obj and b <= c.best):
                pruned = 1
                break
        if not pruned:
            visit(c, depth + 1)
        c.assign[j] = -1
        if r < c.k:
            c.load[r] = saved_load
        for m in range(c.m_count):
            c.partial[m] = saved_partial[m]
        if c.done:
            break


def search(order, eff, cap_slack, cap_exact, vals, gains, pooled, pooled_order, rel_order,
           suffix_post, obj, thr, prec_ptr, prec_other, prec_sign, coup_ptr, coup_other,
           node_limit, incumbent=None):
    cdef cnp.ndarray[i64, ndim=1] a_order = np.ascontiguousarray(order, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] a_eff = np.ascontiguousarray(eff, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] a_cap_slack = np.ascontiguousarray(cap_slack, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] a_cap_exact = np.ascontiguousarray(cap_exact, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=3] a_vals = np.ascontiguousarray(vals, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=3] a_gains_rel = np.ascontiguousarray(
        np.transpose(np.asarray(gains, dtype=np.float64), (0, 2, 1)))
    cdef cnp.ndarray[double, ndim=2] a_pooled = np.ascontiguousarray(pooled, dtype=np.float64)
    cdef cnp.ndarray[i64, ndim=2] a_pooled_order = np.ascontiguousarray(pooled_order, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=3] a_rel_order = np.ascontiguousarray(rel_order, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=2] a_suffix = np.ascontiguousarray(suffix_post, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] a_thr = np.ascontiguousarray(thr, dtype=np.float64)
    cdef cnp.ndarray[i64, ndim=1] a_prec_ptr = np.ascontiguousarray(prec_ptr, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] a_prec_other = np.ascontiguousarray(prec_other, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] a_prec_sign = np.ascontiguousarray(prec_sign, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] a_coup_ptr = np.ascontiguousarray(coup_ptr, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] a_coup_other = np.ascontiguousarray(coup_other, dtype=np.int64)

    cdef int m_count = a_vals.shape[0]
    cdef int n = a_vals.shape[1]
    cdef int p = a_vals.shape[2]
    cdef int k = p - 1
    # empty arrays still need valid pointers
    cdef cnp.ndarray[i64, ndim=1] assign = np.full(max(n, 1), -1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] best_assign = np.full(max(n, 1), -1, dtype=np.int64)
    if obj < 0:
        best_assign[:n] = np.asarray(incumbent, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] load = np.zeros(max(k, 1))
    cdef cnp.ndarray[double, ndim=1] rem = np.zeros(max(k, 1))
    cdef cnp.ndarray[double, ndim=1] exact = np.zeros(max(k, 1))
    cdef cnp.ndarray[double, ndim=1] partial = np.zeros(max(m_count, 1))
    cdef cnp.ndarray[int, ndim=1] active = np.zeros(max(m_count, 1), dtype=np.intc)
    cdef cnp.ndarray[double, ndim=1] saved = np.zeros((n + 1) * max(m_count, 1))
    cdef int n_active = 0
    cdef int mi
    for mi in range(m_count):
        if mi == obj or a_thr[mi] > -INFINITY:
            active[n_active] = mi
            n_active += 1

    # zero-size arrays can report a NULL data pointer; pad them
    if a_order.shape[0] == 0:
        a_order = np.zeros(1, dtype=np.int64)
    if a_prec_other.shape[0] == 0:
        a_prec_other = np.zeros(1, dtype=np.int64)
        a_prec_sign = np.zeros(1, dtype=np.int64)
    if a_coup_other.shape[0] == 0:
        a_coup_other = np.zeros(1, dtype=np.int64)
    if a_eff.shape[0] == 0:
        a_eff = np.zeros(1)
    if a_vals.size == 0:
        a_vals = np.zeros((1, 1, 1))
    if a_gains_rel.size == 0:
        a_gains_rel = np.zeros((1, 1, 1))
    if a_pooled.size == 0:
        a_pooled = np.zeros((1, 1))
    if a_pooled_order.size == 0:
        a_pooled_order = np.zeros((1, 1), dtype=np.int64)
    if a_rel_order.size == 0:
        a_rel_order = np.zeros((1, 1, 1), dtype=np.int64)

    cdef SearchCtx c
    c.n = n
    c.k = k
    c.p = p
    c.m_count = m_count
    c.obj = obj
    c.order = &a_order[0]
    c.eff = &a_eff[0]
    c.cap_slack = &a_cap_slack[0]
    c.cap_exact = &a_cap_exact[0]
    c.vals = &a_vals[0, 0, 0]
    c.gains_rel = &a_gains_rel[0, 0, 0]
    c.pooled = &a_pooled[0, 0]
    c.pooled_order = &a_pooled_order[0, 0]
    c.rel_order = &a_rel_order[0, 0, 0]
    c.suffix_post = &a_suffix[0, 0]
    c.thr = &a_thr[0]
    c.prec_ptr = &a_prec_ptr[0]
    c.prec_other = &a_prec_other[0]
    c.prec_sign = &a_prec_sign[0]
    c.coup_ptr = &a_coup_ptr[0]
    c.coup_other = &a_coup_other[0]
    c.node_limit = node_limit
    c.nodes = 0
    c.status = 0
    c.done = 0
    c.found = 1 if obj < 0 else 0
    c.best = 0.0 if obj < 0 else -INFINITY
    c.assign = &assign[0]
    c.best_assign = &best_assign[0]
    c.load = &load[0]
    c.partial = &partial[0]
    c.rem = &rem[0]
    c.exact = &exact[0]
    c.active = &active[0]
    c.n_active = n_active
    c.saved = &saved[0]

    with nogil:
        visit(&c, 0)

    result = best_assign[:n].copy() if c.found else None
    return result, c.best, c.status, c.nodes


# ---------------------------------------------------------------- enumeration

cdef struct EnumCtx:
    int n
    int k
    int p
    const double* eff
    const double* cap
    const double* ts_tab
    const double* tds_tab
    const i64* prec_ptr
    const i64* prec_other
    const i64* prec_sign
    const i64* coup_ptr
    const i64* coup_other
    i64* digit
    double* loads      # (N+1, K) prefix loads
    double* ts         # (N+1,)
    double* tds        # (N+1,)
    # pass 1
    int n_lambda
    const double* lambdas
    double* lam_best
    i64 feasible
    double* front_ts
    double* front_tds
    i64 front_size
    i64 front_cap
    # pass 2
    int collect
    const double* f_ts
    const double* f_tds
    i64 f_size
    i64* codes
    i64 n_codes
    i64 codes_cap
    int oom


cdef inline int enum_deps_ok(EnumCtx* c, i64 j, i64 r) noexcept nogil:
    # only features < j are assigned during the index-order enumeration
    cdef i64 e, o
    for e in range(c.prec_ptr[j], c.prec_ptr[j + 1]):
        o = c.prec_other[e]
        if o >= j:
            continue
        if c.prec_sign[e] > 0 and r > c.digit[o]:
            return 0
        if c.prec_sign[e] < 0 and r < c.digit[o]:
            return 0
    for e in range(c.coup_ptr[j], c.coup_ptr[j + 1]):
        o = c.coup_other[e]
        if o < j and c.digit[o] != r:
            return 0
    return 1


cdef void front_insert(EnumCtx* c, double t, double d) noexcept nogil:
    # front is sorted by TS ascending with TDS strictly ascending
    cdef i64 lo = 0, hi = c.front_size, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if c.front_ts[mid] < t:
            lo = mid + 1
        else:
            hi = mid
    cdef i64 i = lo
    if i < c.front_size and c.front_tds[i] <= d:
        return
    cdef i64 first = i
    while first > 0 and c.front_tds[first - 1] >= d:
        first -= 1
    cdef i64 last = i
    if i < c.front_size and c.front_ts[i] == t:
        last = i + 1
    cdef i64 removed = last - first
    cdef i64 tail = c.front_size - last
    cdef double* nts
    cdef double* ntds
    if removed == 0:
        if c.front_size == c.front_cap:
            nts = <double*>realloc(c.front_ts, 2 * c.front_cap * sizeof(double))
            ntds = <double*>realloc(c.front_tds, 2 * c.front_cap * sizeof(double))
            if nts == NULL or ntds == NULL:
                c.oom = 1
                return
            c.front_ts = nts
            c.front_tds = ntds
            c.front_cap *= 2
        memmove(c.front_ts + first + 1, c.front_ts + last, tail * sizeof(double))
        memmove(c.front_tds + first + 1, c.front_tds + last, tail * sizeof(double))
        c.front_size += 1
    else:
        memmove(c.front_ts + first + 1, c.front_ts + last, tail * sizeof(double))
        memmove(c.front_tds + first + 1, c.front_tds + last, tail * sizeof(double))
        c.front_size -= removed - 1
    c.front_ts[first] = t
    c.front_tds[first] = d


cdef void enum_leaf(EnumCtx* c) noexcept nogil:
    cdef double t = c.ts[c.n]
    cdef double d = c.tds[c.n]
    cdef int li
    cdef double lam, v
    cdef i64 lo, hi, mid, code, j
    cdef i64* ncodes
    if c.collect:
        lo = 0
        hi = c.f_size
        while lo < hi:
            mid = (lo + hi) >> 1
            if c.f_ts[mid] < t:
                lo = mid + 1
            else:
                hi = mid
        if lo < c.f_size and c.f_ts[lo] == t and c.f_tds[lo] == d:
            code = 0
            for j in range(c.n):
                code = code * c.p + c.digit[j]
            if c.n_codes == c.codes_cap:
                ncodes = <i64*>realloc(c.codes, 2 * c.codes_cap * sizeof(i64))
                if ncodes == NULL:
                    c.oom = 1
                    return
                c.codes = ncodes
                c.codes_cap *= 2
            c.codes[c.n_codes] = code
            c.n_codes += 1
        return
    c.feasible += 1
    for li in range(c.n_lambda):
        lam = c.lambdas[li]
        v = lam * t - (1.0 - lam) * d
        if v > c.lam_best[li]:
            c.lam_best[li] = v
    front_insert(c, t, d)


cdef void enum_visit(EnumCtx* c, int j) noexcept nogil:
    if c.oom:
        return
    if j == c.n:
        enum_leaf(c)
        return
    cdef int r, q
    cdef const double* prev = c.loads + j * c.k
    cdef double* nxt = c.loads + (j + 1) * c.k
    cdef double e = c.eff[j]
    for r in range(c.p):
        for q in range(c.k):
            nxt[q] = prev[q]
        if r < c.k:
            nxt[r] = prev[r] + e
            if nxt[r] > c.cap[r]:
                continue
        if not enum_deps_ok(c, j, r):
            continue
        c.digit[j] = r
        c.ts[j + 1] = c.ts[j] + c.ts_tab[j * c.p + r]
        c.tds[j + 1] = c.tds[j] + c.tds_tab[j * c.p + r]
        enum_visit(c, j + 1)
    c.digit[j] = -1


cdef void enum_init(EnumCtx* c, tuple arrays):
    # arrays: output of _prep(); the caller keeps it alive
    cdef cnp.ndarray eff = arrays[0], cap = arrays[1], ts_tab = arrays[2], tds_tab = arrays[3]
    cdef cnp.ndarray prec_ptr = arrays[4], prec_other = arrays[5], prec_sign = arrays[6]
    cdef cnp.ndarray coup_ptr = arrays[7], coup_other = arrays[8]
    cdef cnp.ndarray digit = arrays[9], loads = arrays[10], ts = arrays[11], tds = arrays[12]
    c.eff = <const double*>cnp.PyArray_DATA(eff)
    c.cap = <const double*>cnp.PyArray_DATA(cap)
    c.ts_tab = <const double*>cnp.PyArray_DATA(ts_tab)
    c.tds_tab = <const double*>cnp.PyArray_DATA(tds_tab)
    c.prec_ptr = <const i64*>cnp.PyArray_DATA(prec_ptr)
    c.prec_other = <const i64*>cnp.PyArray_DATA(prec_other)
    c.prec_sign = <const i64*>cnp.PyArray_DATA(prec_sign)
    c.coup_ptr = <const i64*>cnp.PyArray_DATA(coup_ptr)
    c.coup_other = <const i64*>cnp.PyArray_DATA(coup_other)
    c.digit = <i64*>cnp.PyArray_DATA(digit)
    c.loads = <double*>cnp.PyArray_DATA(loads)
    c.ts = <double*>cnp.PyArray_DATA(ts)
    c.tds = <double*>cnp.PyArray_DATA(tds)
    c.ts[0] = 0.0
    c.tds[0] = 0.0
    c.oom = 0
    c.collect = 0
    c.n_lambda = 0
    c.feasible = 0
    c.front_size = 0
    c.n_codes = 0


def _prep(eff, cap, ts_tab, tds_tab, prec, coup):
    n, p = np.shape(ts_tab)
    k = p - 1
    prec = np.asarray(prec, dtype=np.int64).reshape(-1, 2)
    coup = np.asarray(coup, dtype=np.int64).reshape(-1, 2)
    prec_adj = [[] for _ in range(n)]
    for a, b in prec:
        prec_adj[a].append((b, 1))
        prec_adj[b].append((a, -1))
    coup_adj = [[] for _ in range(n)]
    for a, b in coup:
        coup_adj[a].append(b)
        coup_adj[b].append(a)
    prec_ptr = np.zeros(n + 1, dtype=np.int64)
    coup_ptr = np.zeros(n + 1, dtype=np.int64)
    for j in range(n):
        prec_ptr[j + 1] = prec_ptr[j] + len(prec_adj[j])
        coup_ptr[j + 1] = coup_ptr[j] + len(coup_adj[j])
    prec_other = np.array([o for adj in prec_adj for o, _ in adj] or [0], dtype=np.int64)
    prec_sign = np.array([s for adj in prec_adj for _, s in adj] or [0], dtype=np.int64)
    coup_other = np.array([o for adj in coup_adj for o in adj] or [0], dtype=np.int64)
    return (
        np.ascontiguousarray(np.append(np.asarray(eff, dtype=np.float64), 0.0)),
        np.ascontiguousarray(np.append(np.asarray(cap, dtype=np.float64), 0.0)),
        np.ascontiguousarray(ts_tab, dtype=np.float64).reshape(-1).copy() if n else np.zeros(1),
        np.ascontiguousarray(tds_tab, dtype=np.float64).reshape(-1).copy() if n else np.zeros(1),
        prec_ptr, prec_other, prec_sign, coup_ptr, coup_other,
        np.full(n + 1, -1, dtype=np.int64),
        np.zeros((n + 1) * max(k, 1) + 1),
        np.zeros(n + 1),
        np.zeros(n + 1),
    )


def enumerate_front(eff, cap, ts_tab, tds_tab, prec, coup, lambdas):
    ts_tab = np.asarray(ts_tab, dtype=np.float64)
    arrays = _prep(eff, cap, ts_tab, tds_tab, prec, coup)
    cdef cnp.ndarray[double, ndim=1] lam = np.ascontiguousarray(
        np.append(np.asarray(lambdas, dtype=np.float64), 0.0))
    cdef int n_lambda = len(lambdas)
    cdef cnp.ndarray[double, ndim=1] lam_best = np.full(n_lambda + 1, -np.inf)
    cdef EnumCtx c
    enum_init(&c, arrays)
    c.n = ts_tab.shape[0]
    c.p = ts_tab.shape[1]
    c.k = c.p - 1
    c.n_lambda = n_lambda
    c.lambdas = &lam[0]
    c.lam_best = &lam_best[0]
    c.front_cap = 64
    c.front_ts = <double*>malloc(c.front_cap * sizeof(double))
    c.front_tds = <double*>malloc(c.front_cap * sizeof(double))
    if c.front_ts == NULL or c.front_tds == NULL:
        free(c.front_ts)
        free(c.front_tds)
        raise MemoryError()
    try:
        with nogil:
            enum_visit(&c, 0)
        if c.oom:
            raise MemoryError()
        size = c.front_size
        front_ts = np.empty(size)
        front_tds = np.empty(size)
        for i in range(size):
            front_ts[i] = c.front_ts[i]
            front_tds[i] = c.front_tds[i]
    finally:
        free(c.front_ts)
        free(c.front_tds)
    return front_ts, front_tds, lam_best[:n_lambda].copy(), c.feasible


def collect_ties(eff, cap, ts_tab, tds_tab, prec, coup, front_ts, front_tds):
    ts_tab = np.asarray(ts_tab, dtype=np.float64)
    arrays = _prep(eff, cap, ts_tab, tds_tab, prec, coup)
    cdef cnp.ndarray[double, ndim=1] f_ts = np.ascontiguousarray(np.append(front_ts, 0.0), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] f_tds = np.ascontiguousarray(np.append(front_tds, 0.0), dtype=np.float64)
    cdef EnumCtx c
    enum_init(&c, arrays)
    c.n = ts_tab.shape[0]
    c.p = ts_tab.shape[1]
    c.k = c.p - 1
    c.collect = 1
    c.f_ts = &f_ts[0]
    c.f_tds = &f_tds[0]
    c.f_size = len(front_ts)
    c.codes_cap = 64
    c.codes = <i64*>malloc(c.codes_cap * sizeof(i64))
    if c.codes == NULL:
        raise MemoryError()
    try:
        with nogil:
            enum_visit(&c, 0)
        if c.oom:
            raise MemoryError()
        out = np.empty(c.n_codes, dtype=np.int64)
        for i in range(c.n_codes):
            out[i] = c.codes[i]
    finally:
        free(c.codes)
    return out
