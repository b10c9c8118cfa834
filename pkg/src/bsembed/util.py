"""Shared plumbing: seed derivation and a deterministic worker pool."""

import hashlib
from concurrent.futures import ProcessPoolExecutor


def derive_seed(root, *labels):
    """Derive a stable 64-bit child seed from a root seed and a label path.

    Hashing the textual path makes every component of a run independently
    re-runnable: the same (root, labels) always yields the same child seed,
    and distinct label paths yield unrelated streams.
    """
    h = hashlib.sha256()
    h.update(str(int(root)).encode())
    for part in labels:
        h.update(b"/")
        h.update(str(part).encode())
    return int.from_bytes(h.digest()[:8], "little")


def pmap(fn, items, workers=1):
    """Map ``fn`` over ``items``, optionally across worker processes.

    Results are always returned in input order, so the reduction step
    downstream sees the same sequence at any worker count.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
