# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: prime-orbit statistics and backward enumeration.

Orbit bases are exact int64 values j with x = j/(ell^n - 1); the base map is
the exact shift j -> ell*j mod (ell^n - 1). Roof values along orbits come
from per-harmonic angle-addition tables over the 16-bit halves of j, which
keeps the hot loop free of libm calls; the backward walk uses libm directly
(its trees are orders of magnitude smaller).
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, log2, sin

from suspflow.budget import WorkBudgetExceeded

cnp.import_array()

cdef double TWO_PI = 6.283185307179586476925286766559

DEF TABLE_BITS = 16
DEF TABLE_SIZE = 65536  # 1 << TABLE_BITS


# ---------------------------------------------------------------------------
# orbit statistics
# ---------------------------------------------------------------------------

cdef class OrbitCtx:
    cdef int ell, n, K, G
    cdef long long M
    cdef double c0, collect_cap, min_mean, max_mean
    cdef bint use_tables
    cdef double* ca
    cdef double* sb
    cdef double* cos_hi
    cdef double* sin_hi
    cdef double* cos_lo
    cdef double* sin_lo
    cdef double* thresholds
    cdef long long* buckets
    cdef int* a                   # word buffer, 1-indexed, a[0] = 0 sentinel
    cdef list coll_j
    cdef list coll_period
    # numpy owners of the pointers above
    cdef object _tables, _buckets_arr, _word_arr, _ca_arr, _sb_arr, _thr_arr


cdef inline double roof_tables(OrbitCtx ctx, long long jj):
    cdef int hi = <int>(jj >> TABLE_BITS)
    cdef int lo = <int>(jj & (TABLE_SIZE - 1))
    cdef double v = ctx.c0
    cdef double ch, sh, cl, sl
    cdef int k
    for k in range(ctx.K):
        ch = ctx.cos_hi[k * TABLE_SIZE + hi]
        sh = ctx.sin_hi[k * TABLE_SIZE + hi]
        cl = ctx.cos_lo[k * TABLE_SIZE + lo]
        sl = ctx.sin_lo[k * TABLE_SIZE + lo]
        if ctx.ca[k] != 0.0:
            v += ctx.ca[k] * (ch * cl - sh * sl)
        if ctx.sb[k] != 0.0:
            v += ctx.sb[k] * (sh * cl + ch * sl)
    return v


cdef inline double roof_direct(OrbitCtx ctx, long long jj):
    cdef double x = (<double>jj) / (<double>ctx.M)
    cdef double v = ctx.c0
    cdef double w
    cdef int k
    for k in range(ctx.K):
        w = TWO_PI * (k + 1) * x
        if ctx.ca[k] != 0.0:
            v += ctx.ca[k] * cos(w)
        if ctx.sb[k] != 0.0:
            v += ctx.sb[k] * sin(w)
    return v


cdef int process_word(OrbitCtx ctx) except -1:
    """Classify the orbit of the current word buffer."""
    cdef int n = ctx.n
    cdef int d, lo_idx, hi_idx, mid
    cdef long long j = 0, jj
    cdef double total, comp, term, tmp, mean
    if n == 1 and ctx.a[1] == ctx.ell - 1:
        return 0  # duplicates the fixed point x = 0
    for d in range(1, n + 1):
        j = j * ctx.ell + ctx.a[d]
    jj = j
    total = 0.0
    comp = 0.0
    if ctx.use_tables:
        for d in range(n):
            term = roof_tables(ctx, jj) - comp
            tmp = total + term
            comp = (tmp - total) - term
            total = tmp
            jj = (jj * ctx.ell) % ctx.M
    else:
        for d in range(n):
            term = roof_direct(ctx, jj) - comp
            tmp = total + term
            comp = (tmp - total) - term
            total = tmp
            jj = (jj * ctx.ell) % ctx.M
    # first threshold >= period, by binary search
    lo_idx = 0
    hi_idx = ctx.G
    while lo_idx < hi_idx:
        mid = (lo_idx + hi_idx) // 2
        if ctx.thresholds[mid] < total:
            lo_idx = mid + 1
        else:
            hi_idx = mid
    if lo_idx < ctx.G:
        ctx.buckets[lo_idx] += 1
    mean = total / n
    if mean < ctx.min_mean:
        ctx.min_mean = mean
    if mean > ctx.max_mean:
        ctx.max_mean = mean
    if total <= ctx.collect_cap:
        ctx.coll_j.append(j)
        ctx.coll_period.append(total)
    return 0


cdef int gen_words(OrbitCtx ctx, int t, int p) except -1:
    """Fixed-length Lyndon generation; emits words of length exactly n."""
    cdef int v
    if t > ctx.n:
        if p == ctx.n:
            process_word(ctx)
        return 0
    ctx.a[t] = ctx.a[t - p]
    gen_words(ctx, t + 1, p)
    for v in range(ctx.a[t - p] + 1, ctx.ell):
        ctx.a[t] = v
        gen_words(ctx, t + 1, t)
    return 0


cdef void build_tables(OrbitCtx ctx):
    cdef int k, i
    cdef long long r
    cdef double ang
    for k in range(ctx.K):
        for i in range(TABLE_SIZE):
            r = ((<long long>(k + 1)) * ((<long long>i) << TABLE_BITS)) % ctx.M
            ang = TWO_PI * (<double>r) / (<double>ctx.M)
            ctx.cos_hi[k * TABLE_SIZE + i] = cos(ang)
            ctx.sin_hi[k * TABLE_SIZE + i] = sin(ang)
            r = ((<long long>(k + 1)) * (<long long>i)) % ctx.M
            ang = TWO_PI * (<double>r) / (<double>ctx.M)
            ctx.cos_lo[k * TABLE_SIZE + i] = cos(ang)
            ctx.sin_lo[k * TABLE_SIZE + i] = sin(ang)


def orbit_counts(int ell, double c0, ca, sb, lengths, thresholds,
                 double collect_cap, double budget):
    """Per-length orbit statistics; see the fallback backend for the contract."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ca_arr = np.ascontiguousarray(ca, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sb_arr = np.ascontiguousarray(sb, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] thr = np.ascontiguousarray(thresholds, dtype=np.float64)
    lengths = [int(n) for n in lengths]
    cdef double work = 0.0
    for n in lengths:
        work += float(ell) ** n
    if work > budget:
        raise WorkBudgetExceeded(work, budget, "orbit enumeration")

    cdef int L = len(lengths)
    cdef int G = thr.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] counts = np.zeros((L, G), dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] min_means = np.full(L, np.inf)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] max_means = np.full(L, -np.inf)
    coll_n, coll_j, coll_period = [], [], []

    cdef OrbitCtx ctx = OrbitCtx()
    ctx.ell = ell
    ctx.K = <int>ca_arr.shape[0]
    ctx.c0 = c0
    ctx._ca_arr = ca_arr
    ctx._sb_arr = sb_arr
    ctx._thr_arr = thr
    ctx.ca = <double*>cnp.PyArray_DATA(ca_arr)
    ctx.sb = <double*>cnp.PyArray_DATA(sb_arr)
    ctx.G = G
    ctx.thresholds = <double*>cnp.PyArray_DATA(thr)
    ctx.collect_cap = collect_cap

    cdef cnp.ndarray[cnp.int64_t, ndim=1] buckets
    cdef cnp.ndarray[cnp.int32_t, ndim=1] word_buf
    cdef cnp.ndarray[cnp.float64_t, ndim=2] tables
    cdef int i, n_len, g
    cdef long long acc
    for i in range(L):
        n_len = lengths[i]
        if n_len < 1:
            raise ValueError("word lengths must be >= 1")
        if n_len * log2(<double>ell) > 62.0:
            raise ValueError("ell^n exceeds exact int64 arithmetic")
        ctx.n = n_len
        ctx.M = 1
        for g in range(n_len):
            ctx.M *= ell
        ctx.M -= 1
        if ctx.M < 1:
            continue
        buckets = np.zeros(G, dtype=np.int64)
        word_buf = np.zeros(n_len + 2, dtype=np.int32)
        ctx._buckets_arr = buckets
        ctx._word_arr = word_buf
        ctx.buckets = <long long*>cnp.PyArray_DATA(buckets)
        ctx.a = <int*>cnp.PyArray_DATA(word_buf)
        ctx.use_tables = ctx.M < (<long long>1 << 32) and ctx.K > 0
        if ctx.use_tables:
            tables = np.empty((4 * ctx.K, TABLE_SIZE), dtype=np.float64)
            ctx._tables = tables
            ctx.cos_hi = <double*>cnp.PyArray_DATA(tables)
            ctx.sin_hi = ctx.cos_hi + ctx.K * TABLE_SIZE
            ctx.cos_lo = ctx.sin_hi + ctx.K * TABLE_SIZE
            ctx.sin_lo = ctx.cos_lo + ctx.K * TABLE_SIZE
            build_tables(ctx)
        ctx.min_mean = np.inf
        ctx.max_mean = -np.inf
        ctx.coll_j = []
        ctx.coll_period = []
        gen_words(ctx, 1, 1)
        acc = 0
        for g in range(G):
            acc += ctx.buckets[g]
            counts[i, g] = acc
        min_means[i] = ctx.min_mean
        max_means[i] = ctx.max_mean
        coll_n.extend([n_len] * len(ctx.coll_j))
        coll_j.extend(ctx.coll_j)
        coll_period.extend(ctx.coll_period)

    return (counts, min_means, max_means,
            np.array(coll_n, dtype=np.int32),
            np.array(coll_j, dtype=np.int64),
            np.array(coll_period, dtype=np.float64))


# ---------------------------------------------------------------------------
# backward enumeration
# ---------------------------------------------------------------------------

cdef struct BwCtx:
    int ell
    int K
    double c0
    double* ca
    double* sb
    double x, y, t
    double budget
    long long nodes
    int limit
    long long n_branches
    long long n_slots
    double partial[64]
    # fill-pass cursors and buffers (unused during the count pass)
    cnp.int32_t* out_k
    cnp.int64_t* out_j
    double* out_y
    double* out_shear
    double* out_times
    long long ib
    long long it


cdef inline double bw_roof(BwCtx* ctx, double x) nogil:
    cdef double v = ctx.c0
    cdef double w
    cdef int k
    for k in range(ctx.K):
        w = TWO_PI * (k + 1) * x
        if ctx.ca[k] != 0.0:
            v += ctx.ca[k] * cos(w)
        if ctx.sb[k] != 0.0:
            v += ctx.sb[k] * sin(w)
    return v


cdef inline double bw_roof_deriv(BwCtx* ctx, double x) nogil:
    cdef double v = 0.0
    cdef double w
    cdef int k
    for k in range(ctx.K):
        w = TWO_PI * (k + 1) * x
        if ctx.ca[k] != 0.0:
            v -= TWO_PI * (k + 1) * ctx.ca[k] * sin(w)
        if ctx.sb[k] != 0.0:
            v += TWO_PI * (k + 1) * ctx.sb[k] * cos(w)
    return v


cdef int bw_walk(BwCtx* ctx, int d, long long j, long long pow_d,
                 double scale, double total, double comp, double shear,
                 bint fill) except -1:
    """Visit children at depth d+1; scale = ell^(d+1) as a double."""
    cdef int digit, m
    cdef long long jc
    cdef double xc, term, tmp, sc, yw
    for digit in range(ctx.ell):
        ctx.nodes += 1
        if ctx.nodes > ctx.budget:
            raise WorkBudgetExceeded(<double>ctx.nodes, ctx.budget,
                                     "backward enumeration")
        jc = j + digit * pow_d
        xc = (ctx.x + jc) / scale
        term = bw_roof(ctx, xc) - comp
        tmp = total + term
        sc = shear - bw_roof_deriv(ctx, xc) / scale
        ctx.partial[d + 1] = tmp
        yw = ctx.y + tmp - ctx.t
        if yw >= 0.0:
            if fill:
                ctx.out_k[ctx.ib] = d + 1
                ctx.out_j[ctx.ib] = jc
                ctx.out_y[ctx.ib] = yw
                ctx.out_shear[ctx.ib] = sc
                ctx.ib += 1
                for m in range(d + 1):
                    ctx.out_times[ctx.it] = ctx.t - ctx.y - ctx.partial[m]
                    ctx.it += 1
            else:
                ctx.n_branches += 1
                ctx.n_slots += d + 1
        else:
            if d + 1 >= ctx.limit:
                raise OverflowError("backward depth exceeds exact digit paths")
            bw_walk(ctx, d + 1, jc, pow_d * ctx.ell, scale * ctx.ell,
                    tmp, (tmp - total) - term, sc, fill)
    return 0


cdef void bw_init(BwCtx* ctx, int ell, double* ca, double* sb, int K,
                  double c0, double x, double y, double t, double budget):
    ctx.ell = ell
    ctx.K = K
    ctx.c0 = c0
    ctx.ca = ca
    ctx.sb = sb
    ctx.x = x
    ctx.y = y
    ctx.t = t
    ctx.budget = budget
    ctx.nodes = 0
    ctx.limit = <int>(52.0 / log2(<double>ell))
    if ctx.limit > 62:
        ctx.limit = 62
    ctx.n_branches = 0
    ctx.n_slots = 0
    ctx.partial[0] = 0.0
    ctx.ib = 0
    ctx.it = 0


def backward_branches(int ell, double c0, ca, sb, double x, double y,
                      double t, double budget):
    """First-passage DFS; returns (k, j, y_w, shear, times_flat) in DFS order."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ca_arr = np.ascontiguousarray(ca, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sb_arr = np.ascontiguousarray(sb, dtype=np.float64)
    cdef BwCtx ctx
    bw_init(&ctx, ell, <double*>cnp.PyArray_DATA(ca_arr),
            <double*>cnp.PyArray_DATA(sb_arr), <int>ca_arr.shape[0],
            c0, x, y, t, budget)
    bw_walk(&ctx, 0, 0, 1, <double>ell, 0.0, 0.0, 0.0, False)

    cdef cnp.ndarray[cnp.int32_t, ndim=1] k_out = np.empty(ctx.n_branches, dtype=np.int32)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] j_out = np.empty(ctx.n_branches, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y_out = np.empty(ctx.n_branches, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s_out = np.empty(ctx.n_branches, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] t_out = np.empty(ctx.n_slots, dtype=np.float64)
    ctx.out_k = <cnp.int32_t*>cnp.PyArray_DATA(k_out)
    ctx.out_j = <cnp.int64_t*>cnp.PyArray_DATA(j_out)
    ctx.out_y = <double*>cnp.PyArray_DATA(y_out)
    ctx.out_shear = <double*>cnp.PyArray_DATA(s_out)
    ctx.out_times = <double*>cnp.PyArray_DATA(t_out)
    ctx.nodes = 0  # the fill pass repeats the identical traversal
    bw_walk(&ctx, 0, 0, 1, <double>ell, 0.0, 0.0, 0.0, True)
    return k_out, j_out, y_out, s_out, t_out


def backward_count(int ell, double c0, ca, sb, double x, double y,
                   double t, double budget):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ca_arr = np.ascontiguousarray(ca, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sb_arr = np.ascontiguousarray(sb, dtype=np.float64)
    cdef BwCtx ctx
    bw_init(&ctx, ell, <double*>cnp.PyArray_DATA(ca_arr),
            <double*>cnp.PyArray_DATA(sb_arr), <int>ca_arr.shape[0],
            c0, x, y, t, budget)
    bw_walk(&ctx, 0, 0, 1, <double>ell, 0.0, 0.0, 0.0, False)
    return int(ctx.n_branches)
