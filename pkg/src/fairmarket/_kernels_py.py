"""Pure-Python kernels.

Reference implementation of the numeric core.  The compiled twin in
``_kernels.pyx`` mirrors every loop here operation for operation: same
iteration order, same floating-point expression shapes, same libm calls.
Both backends therefore produce bit-identical results, which the test
suite asserts.  Keep the two files in sync when changing either.

Conventions shared by both backends:

* PRNG state is a single unsigned 64-bit integer advanced by splitmix64.
* A uniform double in [0, 1) is ``(x >> 11) * 2**-53`` where x is one
  splitmix64 output.
* Standard normals come from Box-Muller: two uniform draws per pair of
  normals, cosine variate emitted before the sine variate.
* All bulk loops run in ascending index order.
"""

from array import array
from math import cos, exp, log, sin, sqrt

MASK64 = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53, exact
_TWO_PI = 6.283185307179586476925287  # rounds to the double 2*pi


def splitmix64_next(state):
    """Advance splitmix64 once.  Returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    z = z ^ (z >> 31)
    return state, z


def uniform_block(state, n):
    """Draw n uniforms in [0, 1).  Returns (new_state, array('d'))."""
    out = array("d", bytes(8 * n))
    for i in range(n):
        state, z = splitmix64_next(state)
        out[i] = (z >> 11) * _INV_2_53
    return state, out


def normal_block(state, n):
    """Draw n standard normals via Box-Muller.

    Consumes two uniforms per pair; for odd n the sine variate of the
    final pair is discarded (the stream still advances by two).
    """
    out = array("d", bytes(8 * n))
    i = 0
    while i < n:
        state, z1 = splitmix64_next(state)
        u1 = (z1 >> 11) * _INV_2_53
        state, z2 = splitmix64_next(state)
        u2 = (z2 >> 11) * _INV_2_53
        if u1 == 0.0:
            u1 = _INV_2_53  # log(0) guard, probability 2**-53
        r = sqrt(-2.0 * log(u1))
        theta = _TWO_PI * u2
        out[i] = r * cos(theta)
        i += 1
        if i < n:
            out[i] = r * sin(theta)
            i += 1
    return state, out


def interaction_sample(state, u_vec, item_vecs, d, beta_eff, outcomes, m):
    """Sample m distinct items for one consumer, weighted without replacement.

    Weight of item i is exp(dot(u_vec, v_i) + beta_eff * outcomes[i]).
    Each draw consumes one uniform; the remaining-weight total is re-summed
    from scratch every draw (repeated renormalization).  Returns
    (new_state, array('q') of chosen item ids in draw order).
    """
    n_items = len(outcomes)
    if m > n_items:
        raise ValueError("cannot sample more items than exist")
    weights = array("d", bytes(8 * n_items))
    for i in range(n_items):
        acc = 0.0
        base = i * d
        for t in range(d):
            acc += u_vec[t] * item_vecs[base + t]
        weights[i] = exp(acc + beta_eff * outcomes[i])
    taken = bytearray(n_items)
    chosen = array("q", bytes(8 * m))
    for draw in range(m):
        total = 0.0
        for i in range(n_items):
            if not taken[i]:
                total += weights[i]
        state, z = splitmix64_next(state)
        r = ((z >> 11) * _INV_2_53) * total
        pick = -1
        cum = 0.0
        for i in range(n_items):
            if taken[i]:
                continue
            cum += weights[i]
            if cum > r:
                pick = i
                break
        if pick < 0:  # float edge: r landed at or past the final cumsum
            for i in range(n_items - 1, -1, -1):
                if not taken[i]:
                    pick = i
                    break
        taken[pick] = 1
        chosen[draw] = pick
    return state, chosen


def similarity_csr(train_flat, offsets, n_items):
    """Item-item cosine similarity over the binary consumer-item matrix.

    train_flat/offsets hold each consumer's train items (ascending ids)
    concatenated; consumer c owns train_flat[offsets[c]:offsets[c+1]].
    Returns CSR arrays (indptr, indices, values) of the full symmetric
    table including the unit diagonal.  Rows and in-row columns ascend.
    """
    pop = [0] * n_items
    co = {}
    n_consumers = len(offsets) - 1
    for c in range(n_consumers):
        lo, hi = offsets[c], offsets[c + 1]
        for a in range(lo, hi):
            ia = train_flat[a]
            pop[ia] += 1
            for b in range(a + 1, hi):
                key = (ia, train_flat[b])
                co[key] = co.get(key, 0) + 1
    neighbors = [[] for _ in range(n_items)]
    for (i, j), cnt in co.items():
        neighbors[i].append((j, cnt))
        neighbors[j].append((i, cnt))
    indptr = array("q", bytes(8 * (n_items + 1)))
    indices = array("q")
    values = array("d")
    for i in range(n_items):
        row = sorted(neighbors[i])
        placed_diag = False
        for j, cnt in row:
            if not placed_diag and j > i:
                indices.append(i)
                values.append(1.0)
                placed_diag = True
            indices.append(j)
            values.append(cnt / sqrt(float(pop[i] * pop[j])))
        if not placed_diag:
            indices.append(i)
            values.append(1.0)
        indptr[i + 1] = len(indices)
    return indptr, indices, values


def accumulate_scores(train_items, indptr, indices, values, n_items):
    """Item-kNN scores: score[i] = sum of sim(i, j) over train items j.

    Iterates train items in the order given (callers pass ascending ids)
    so per-target addition order is fixed.  Returns array('d') scores.
    """
    scores = array("d", bytes(8 * n_items))
    for j in train_items:
        for ptr in range(indptr[j], indptr[j + 1]):
            scores[indices[ptr]] += values[ptr]
    return scores


def top_n_by_score(scores, exclude, n_top):
    """Top n_top item ids ordered by (score desc, id asc), skipping exclude.

    Returns (array('q') ids, array('d') scores); shorter than n_top when
    fewer candidates exist.
    """
    n_items = len(scores)
    banned = bytearray(n_items)
    for e in exclude:
        banned[e] = 1
    candidates = [i for i in range(n_items) if not banned[i]]
    candidates.sort(key=lambda i: (-scores[i], i))
    top = candidates[:n_top]
    ids = array("q", top)
    vals = array("d", [scores[i] for i in top])
    return ids, vals
