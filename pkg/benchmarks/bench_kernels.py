"""Benchmark the compiled kernels against the pure-Python reference.

Runs the hot numeric kernels on desk-scale inputs with both backends,
checks that the outputs are bit-identical, and prints a timing table.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time
from array import array

import fairmarket._kernels_py as pure

try:
    import fairmarket._kernels as compiled
except ImportError:
    compiled = None

N_CONSUMERS = 500
N_ITEMS = 1000
LATENT_DIM = 8
DRAWS = 20
SEED = 7


def _inputs():
    """Deterministic desk-scale inputs shared by both backends."""
    state = SEED
    state, consumer_vecs = pure.normal_block(state, N_CONSUMERS * LATENT_DIM)
    state, item_vecs = pure.normal_block(state, N_ITEMS * LATENT_DIM)
    state, outcomes = pure.uniform_block(state, N_ITEMS)
    return consumer_vecs, item_vecs, outcomes


def _sample_all(kernels, consumer_vecs, item_vecs, outcomes):
    state = SEED
    flat = array("q")
    offsets = array("q", [0])
    for c in range(N_CONSUMERS):
        u_vec = consumer_vecs[c * LATENT_DIM : (c + 1) * LATENT_DIM]
        state, drawn = kernels.interaction_sample(
            state, u_vec, item_vecs, LATENT_DIM, 2.0, outcomes, DRAWS
        )
        flat.extend(sorted(drawn))
        offsets.append(len(flat))
    return flat, offsets


def _score_all(kernels, flat, offsets, indptr, indices, values):
    out = []
    for c in range(N_CONSUMERS):
        train = flat[offsets[c] : offsets[c + 1]]
        scores = kernels.accumulate_scores(
            train, indptr, indices, values, N_ITEMS
        )
        out.append(kernels.top_n_by_score(scores, train, 50))
    return out


def _bench(label, variants, repeats):
    """Time each backend on one kernel stage and check equal outputs."""
    results = {}
    timings = {}
    for name, fn in variants:
        best = None
        for _ in range(repeats):
            start = time.perf_counter()
            results[name] = fn()
            elapsed = time.perf_counter() - start
            best = elapsed if best is None else min(best, elapsed)
        timings[name] = best
    names = [name for name, _ in variants]
    if len(names) == 2:
        a, b = (_canonical(results[n]) for n in names)
        match = "bit-identical" if a == b else "MISMATCH"
        speedup = timings[names[0]] / timings[names[1]]
        print(
            f"{label:<24} {timings[names[0]] * 1e3:>10.1f} ms "
            f"{timings[names[1]] * 1e3:>10.1f} ms {speedup:>8.1f}x  {match}"
        )
    else:
        print(f"{label:<24} {timings[names[0]] * 1e3:>10.1f} ms          (single backend)")
    return results[names[-1]]


def _canonical(value):
    if isinstance(value, array):
        return list(value)
    if isinstance(value, tuple):
        return tuple(_canonical(v) for v in value)
    if isinstance(value, list):
        return [_canonical(v) for v in value]
    return value


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if compiled is None:
        print("compiled backend unavailable; timing pure Python only\n")
        backends = [("python", pure)]
    else:
        backends = [("python", pure), ("cython", compiled)]

    consumer_vecs, item_vecs, outcomes = _inputs()
    header = f"{'kernel':<24} {'python':>13} {'cython':>13} {'speedup':>8}"
    print(header)
    print("-" * len(header))

    _bench(
        "normal_block (1e6)",
        [
            (name, lambda k=k: k.normal_block(SEED, 1_000_000))
            for name, k in backends
        ],
        args.repeats,
    )
    sampled = _bench(
        "interaction_sample",
        [
            (
                name,
                lambda k=k: _sample_all(k, consumer_vecs, item_vecs, outcomes),
            )
            for name, k in backends
        ],
        args.repeats,
    )
    flat, offsets = sampled
    similarity = _bench(
        "similarity_csr",
        [
            (name, lambda k=k: k.similarity_csr(flat, offsets, N_ITEMS))
            for name, k in backends
        ],
        args.repeats,
    )
    indptr, indices, values = similarity
    _bench(
        "score+top_n (500 c.)",
        [
            (
                name,
                lambda k=k: _score_all(k, flat, offsets, indptr, indices, values),
            )
            for name, k in backends
        ],
        args.repeats,
    )


if __name__ == "__main__":
    main()
