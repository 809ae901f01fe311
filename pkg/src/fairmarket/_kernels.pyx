# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.

Operation-for-operation mirror of ``_kernels_py``; see that module for
the shared contracts.  Iteration order, floating-point expression shapes
and libm calls are kept identical so both backends are bit-exact (the
extension is compiled with -ffp-contract=off to rule out FMA fusion).
"""

from cpython cimport array
from libc.math cimport cos, exp, log, sin, sqrt
from libc.stdlib cimport free, malloc, qsort
from libc.string cimport memset

import array

MASK64 = (1 << 64) - 1

cdef double _INV_2_53 = 1.0 / 9007199254740992.0
cdef double _TWO_PI = 6.283185307179586476925287
cdef unsigned long long _GAMMA = 0x9E3779B97F4A7C15ULL
cdef unsigned long long _MIX1 = 0xBF58476D1CE4E5B9ULL
cdef unsigned long long _MIX2 = 0x94D049BB133111EBULL


cdef inline unsigned long long _next(unsigned long long *state) noexcept nogil:
    cdef unsigned long long z
    state[0] = state[0] + _GAMMA
    z = state[0]
    z = (z ^ (z >> 30)) * _MIX1
    z = (z ^ (z >> 27)) * _MIX2
    return z ^ (z >> 31)


cdef inline double _uniform(unsigned long long *state) noexcept nogil:
    return <double>(_next(state) >> 11) * _INV_2_53


def splitmix64_next(state):
    """Advance splitmix64 once.  Returns (new_state, output)."""
    cdef unsigned long long s = state
    cdef unsigned long long z = _next(&s)
    return s, z


def uniform_block(state, n):
    """Draw n uniforms in [0, 1).  Returns (new_state, array('d'))."""
    cdef unsigned long long s = state
    cdef Py_ssize_t i, cn = n
    cdef array.array out = array.array("d", bytes(8 * cn))
    cdef double[::1] view = out
    for i in range(cn):
        view[i] = _uniform(&s)
    return s, out


def normal_block(state, n):
    """Draw n standard normals via Box-Muller (see _kernels_py)."""
    cdef unsigned long long s = state
    cdef Py_ssize_t i = 0, cn = n
    cdef double u1, u2, r, theta
    cdef array.array out = array.array("d", bytes(8 * cn))
    cdef double[::1] view = out
    while i < cn:
        u1 = _uniform(&s)
        u2 = _uniform(&s)
        if u1 == 0.0:
            u1 = _INV_2_53
        r = sqrt(-2.0 * log(u1))
        theta = _TWO_PI * u2
        view[i] = r * cos(theta)
        i += 1
        if i < cn:
            view[i] = r * sin(theta)
            i += 1
    return s, out


def interaction_sample(state, u_vec, item_vecs, d, beta_eff, outcomes, m):
    """Weighted sampling without replacement; see _kernels_py twin."""
    cdef unsigned long long s = state
    cdef double[::1] u = u_vec
    cdef double[::1] v = item_vecs
    cdef double[::1] outc = outcomes
    cdef Py_ssize_t cd = d, cm = m, n_items = outc.shape[0]
    cdef double cbeta = beta_eff
    cdef Py_ssize_t i, t, base, draw, pick
    cdef double acc, total, r, cum
    if cm > n_items:
        raise ValueError("cannot sample more items than exist")
    cdef array.array chosen = array.array("q", bytes(8 * cm))
    cdef long long[::1] out = chosen
    cdef double *weights = <double *>malloc(n_items * sizeof(double))
    cdef char *taken = <char *>malloc(n_items)
    if weights == NULL or taken == NULL:
        free(weights)
        free(taken)
        raise MemoryError()
    try:
        memset(taken, 0, n_items)
        for i in range(n_items):
            acc = 0.0
            base = i * cd
            for t in range(cd):
                acc += u[t] * v[base + t]
            weights[i] = exp(acc + cbeta * outc[i])
        for draw in range(cm):
            total = 0.0
            for i in range(n_items):
                if not taken[i]:
                    total += weights[i]
            r = _uniform(&s) * total
            pick = -1
            cum = 0.0
            for i in range(n_items):
                if taken[i]:
                    continue
                cum += weights[i]
                if cum > r:
                    pick = i
                    break
            if pick < 0:
                for i in range(n_items - 1, -1, -1):
                    if not taken[i]:
                        pick = i
                        break
            taken[pick] = 1
            out[draw] = pick
    finally:
        free(weights)
        free(taken)
    return s, chosen


def similarity_csr(train_flat, offsets, n_items):
    """Cosine similarity CSR over the binary train matrix; see twin.

    Uses a dense n_items x n_items co-occurrence buffer, sized for
    desk-scale catalogs.
    """
    cdef long long[::1] flat = train_flat
    cdef long long[::1] offs = offsets
    cdef Py_ssize_t n = n_items
    cdef Py_ssize_t n_consumers = offs.shape[0] - 1
    cdef Py_ssize_t c, a, b, lo, hi, i, j, nnz, ptr
    cdef long long ia
    cdef int *co = <int *>malloc(n * n * sizeof(int))
    cdef long long *pop = <long long *>malloc(n * sizeof(long long))
    if co == NULL or pop == NULL:
        free(co)
        free(pop)
        raise MemoryError()
    cdef array.array indptr_a, indices_a, values_a
    cdef long long[::1] indptr
    cdef long long[::1] indices
    cdef double[::1] values
    try:
        memset(co, 0, n * n * sizeof(int))
        memset(pop, 0, n * sizeof(long long))
        for c in range(n_consumers):
            lo = offs[c]
            hi = offs[c + 1]
            for a in range(lo, hi):
                ia = flat[a]
                pop[ia] += 1
                for b in range(a + 1, hi):
                    co[ia * n + flat[b]] += 1
        # count entries: unit diagonal plus every nonzero co-occurrence
        nnz = n
        for i in range(n):
            for j in range(i + 1, n):
                if co[i * n + j] > 0:
                    nnz += 2
        indptr_a = array.array("q", bytes(8 * (n + 1)))
        indices_a = array.array("q", bytes(8 * nnz))
        values_a = array.array("d", bytes(8 * nnz))
        indptr = indptr_a
        indices = indices_a
        values = values_a
        ptr = 0
        for i in range(n):
            for j in range(i):
                if co[j * n + i] > 0:
                    indices[ptr] = j
                    values[ptr] = <double>co[j * n + i] / sqrt(<double>(pop[i] * pop[j]))
                    ptr += 1
            indices[ptr] = i
            values[ptr] = 1.0
            ptr += 1
            for j in range(i + 1, n):
                if co[i * n + j] > 0:
                    indices[ptr] = j
                    values[ptr] = <double>co[i * n + j] / sqrt(<double>(pop[i] * pop[j]))
                    ptr += 1
            indptr[i + 1] = ptr
    finally:
        free(co)
        free(pop)
    return indptr_a, indices_a, values_a


def accumulate_scores(train_items, indptr, indices, values, n_items):
    """Item-kNN score accumulation; see _kernels_py twin."""
    cdef long long[::1] train = train_items
    cdef long long[::1] iptr = indptr
    cdef long long[::1] idx = indices
    cdef double[::1] vals = values
    cdef Py_ssize_t n = n_items
    cdef Py_ssize_t a, ptr
    cdef long long j
    cdef array.array out = array.array("d", bytes(8 * n))
    cdef double[::1] scores = out
    for a in range(train.shape[0]):
        j = train[a]
        for ptr in range(iptr[j], iptr[j + 1]):
            scores[idx[ptr]] += vals[ptr]
    return out


cdef struct _ScoredItem:
    double score
    long long item


cdef int _cmp_scored(const void *pa, const void *pb) noexcept nogil:
    cdef _ScoredItem a = (<const _ScoredItem *>pa)[0]
    cdef _ScoredItem b = (<const _ScoredItem *>pb)[0]
    if a.score > b.score:
        return -1
    if a.score < b.score:
        return 1
    if a.item < b.item:
        return -1
    return 1


def top_n_by_score(scores, exclude, n_top):
    """Top-N selection ordered by (score desc, id asc); see twin."""
    cdef double[::1] sc = scores
    cdef long long[::1] exc = exclude
    cdef Py_ssize_t n = sc.shape[0]
    cdef Py_ssize_t i, count, take
    cdef char *banned = <char *>malloc(n)
    cdef _ScoredItem *items = <_ScoredItem *>malloc(n * sizeof(_ScoredItem))
    if banned == NULL or items == NULL:
        free(banned)
        free(items)
        raise MemoryError()
    cdef array.array ids_a, vals_a
    cdef long long[::1] ids
    cdef double[::1] vals
    try:
        memset(banned, 0, n)
        for i in range(exc.shape[0]):
            banned[exc[i]] = 1
        count = 0
        for i in range(n):
            if not banned[i]:
                items[count].score = sc[i]
                items[count].item = i
                count += 1
        qsort(items, count, sizeof(_ScoredItem), _cmp_scored)
        take = n_top if n_top < count else count
        ids_a = array.array("q", bytes(8 * take))
        vals_a = array.array("d", bytes(8 * take))
        if take > 0:
            ids = ids_a
            vals = vals_a
            for i in range(take):
                ids[i] = items[i].item
                vals[i] = items[i].score
    finally:
        free(banned)
        free(items)
    return ids_a, vals_a
