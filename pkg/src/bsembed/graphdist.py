"""All-pairs shortest-path hop counts over a connected graph, plus a binary cache.

Distances are computed by level-synchronous BFS, batched over sources so the
per-level frontier expansion runs as one sparse-matrix product. Hop counts are
stored as 16-bit unsigned integers; an overflow is a hard error, never a wrap.
"""

import struct

import numpy as np
import scipy.sparse as sp

MAX_HOPS = np.iinfo(np.uint16).max  # 65535

CACHE_MAGIC = b"BSED"
CACHE_VERSION = 1


class CacheIntegrityError(ValueError):
    """Distance cache failed a magic/version/size/checksum check."""


def adjacency_matrix(graph):
    """Boolean CSR adjacency matrix of the graph."""
    n = graph.n_nodes
    indptr = np.zeros(n + 1, dtype=np.int64)
    for i, neigh in enumerate(graph.adjacency):
        indptr[i + 1] = indptr[i] + len(neigh)
    indices = np.concatenate(graph.adjacency) if n else np.array([], dtype=np.int32)
    # int32 payload: frontier expansion sums entries, int8 would wrap on hubs
    data = np.ones(len(indices), dtype=np.int32)
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


def node_degrees(graph):
    """Per-node degree counts (index order)."""
    return graph.degrees()


def single_source_distances(graph, source):
    """Hop counts from one source by plain queue BFS.

    Independent of the batched code path; also serves as the streaming
    mode for memory-constrained runs (recompute rows on demand).
    Raises on disconnected graphs and on hop counts beyond 16 bits.
    """
    n = graph.n_nodes
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = [source]
    level = 0
    while frontier:
        level += 1
        if level > MAX_HOPS:
            raise OverflowError(f"hop count exceeds 16-bit range at level {level}")
        nxt = []
        for u in frontier:
            for v in graph.adjacency[u]:
                if dist[v] < 0:
                    dist[v] = level
                    nxt.append(int(v))
        frontier = nxt
    if (dist < 0).any():
        raise ValueError("graph is disconnected; pass the largest connected component")
    return dist


def all_pairs_shortest_paths(graph, batch_size=128):
    """Dense n x n matrix of minimum hop counts (dtype uint16).

    BFS runs level-synchronously for batches of sources at once; each batch
    fills disjoint rows, so the result is identical at any batch size.
    Raises ValueError on disconnected input.
    """
    n = graph.n_nodes
    if n == 0:
        raise ValueError("empty graph")
    A = adjacency_matrix(graph)
    D = np.empty((n, n), dtype=np.uint16)
    for start in range(0, n, batch_size):
        stop = min(start + batch_size, n)
        b = stop - start
        dist = np.full((n, b), -1, dtype=np.int32)
        frontier = np.zeros((n, b), dtype=np.int32)
        frontier[np.arange(start, stop), np.arange(b)] = 1
        visited = frontier > 0
        dist[visited] = 0
        level = 0
        while frontier.any():
            level += 1
            if level > MAX_HOPS:
                raise OverflowError(f"hop count exceeds 16-bit range at level {level}")
            new = ((A @ frontier) > 0) & ~visited
            dist[new] = level
            visited |= new
            frontier = new.astype(np.int32)
        if (dist < 0).any():
            raise ValueError("graph is disconnected; pass the largest connected component")
        D[start:stop] = dist.T.astype(np.uint16)
    return D


def write_distance_cache(D, path):
    """Write the cache file: magic, version, n (u32le), hop counts (u16le), checksum.

    The checksum is the sum of all hop counts modulo 2**64.
    """
    if D.dtype != np.uint16:
        raise ValueError("distance matrix must be uint16")
    n = D.shape[0]
    checksum = int(D.sum(dtype=np.uint64))
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<B", CACHE_VERSION))
        fh.write(struct.pack("<I", n))
        fh.write(np.ascontiguousarray(D, dtype="<u2").tobytes())
        fh.write(struct.pack("<Q", checksum))


def read_distance_cache(path):
    """Read and verify a distance cache; raises CacheIntegrityError on mismatch."""
    with open(path, "rb") as fh:
        blob = fh.read()
    head = len(CACHE_MAGIC) + 1 + 4
    if len(blob) < head + 8 or blob[:4] != CACHE_MAGIC:
        raise CacheIntegrityError(f"{path}: not a distance cache")
    version = blob[4]
    if version != CACHE_VERSION:
        raise CacheIntegrityError(f"{path}: unsupported cache version {version}")
    (n,) = struct.unpack_from("<I", blob, 5)
    body = n * n * 2
    if len(blob) != head + body + 8:
        raise CacheIntegrityError(f"{path}: truncated cache (expected {head + body + 8} bytes)")
    D = np.frombuffer(blob, dtype="<u2", count=n * n, offset=head).reshape(n, n)
    (stored,) = struct.unpack_from("<Q", blob, head + body)
    checksum = int(D.sum(dtype=np.uint64))
    if checksum != stored:
        raise CacheIntegrityError(f"{path}: checksum mismatch")
    return np.ascontiguousarray(D).astype(np.uint16)
