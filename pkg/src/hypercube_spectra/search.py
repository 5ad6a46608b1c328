"""Deterministic extremal search over truth-table space.

The index space (all 2^(2^n) tables for exhaustive mode, [0, count) for
sampled mode) is split into fixed-size chunks.  Chunk results merge by a
per-metric max (min for jensen_slack) with ties broken toward the smaller
table integer, so any execution order - serial, pooled, interrupted and
resumed - produces identical records.  Sampled tables are drawn by
hashing (seed, index), never from shared RNG state, so the worker count
cannot change what gets sampled.

Constant functions are skipped everywhere: every metric here divides by,
or is undefined at, zero influence.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .boolfn import MAX_N, BooleanFunction, from_sign_bits
from .entropy import AnalysisReport, analyze
from .spectrum import hadamard_inplace

LN2 = math.log(2.0)
LN4 = math.log(4.0)

METRICS = ("ent_over_I", "ent_over_bound", "minent_over_I", "q31_worst", "jensen_slack")

# jensen_slack records the tightest cap, everything else the largest ratio.
_MINIMIZED = frozenset({"jensen_slack"})

DEFAULT_BUDGET = 1 << 16
CHECKPOINT_FORMAT = 1


@dataclass(frozen=True)
class SearchJob:
    """One reproducible sweep: what to enumerate and which records to keep."""

    n: int
    mode: str
    count: int | None = None
    seed: int | None = None
    metrics: tuple[str, ...] = METRICS
    checkpoint_every: int | None = None
    chunk_size: int = 4096
    symmetry: bool = False
    max_tables: int = DEFAULT_BUDGET

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"dimension n must be in [1, {MAX_N}], got {self.n}")
        if self.mode not in ("exhaustive", "sample"):
            raise ValueError(f"mode must be 'exhaustive' or 'sample', got {self.mode!r}")
        if not self.metrics:
            raise ValueError("at least one metric is required")
        for m in self.metrics:
            if m not in METRICS:
                raise ValueError(f"unknown metric {m!r}; known: {', '.join(METRICS)}")
        if len(set(self.metrics)) != len(self.metrics):
            raise ValueError("metrics must not repeat")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")
        if self.checkpoint_every is not None and self.checkpoint_every < 1:
            raise ValueError("checkpoint_every must be positive")
        if self.mode == "exhaustive":
            cap = 5 if self.symmetry else 4
            if self.n > cap:
                raise ValueError(
                    f"exhaustive mode supports n <= {cap} "
                    f"({'with' if self.symmetry else 'without'} symmetry reduction)"
                )
            if (1 << (1 << self.n)) > self.max_tables:
                raise ValueError(
                    f"exhaustive n={self.n} needs {1 << (1 << self.n)} tables, "
                    f"over the budget of {self.max_tables}"
                )
            if self.count is not None or self.seed is not None:
                raise ValueError("exhaustive mode takes neither count nor seed")
        else:
            if self.count is None or self.count < 1:
                raise ValueError("sample mode requires a positive count")
            if self.seed is None:
                raise ValueError("sample mode requires a seed")

    @property
    def total_indices(self) -> int:
        return (1 << (1 << self.n)) if self.mode == "exhaustive" else self.count

    @property
    def total_chunks(self) -> int:
        return -(-self.total_indices // self.chunk_size)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "count": self.count,
            "seed": self.seed,
            "metrics": list(self.metrics),
            "checkpoint_every": self.checkpoint_every,
            "chunk_size": self.chunk_size,
            "symmetry": self.symmetry,
            "max_tables": self.max_tables,
        }

    def job_hash(self) -> str:
        canon = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


@dataclass(frozen=True)
class ExtremalRecord:
    """The extremal witness found for one metric."""

    metric: str
    value: float
    n: int
    witness_hex: str
    context: AnalysisReport

    def as_dict(self) -> dict:
        return {
            "metric": self.metric,
            "value": self.value,
            "n": self.n,
            "witness": self.witness_hex,
            "context": self.context.as_dict(),
        }


def batch_stats(bits: np.ndarray) -> dict[str, np.ndarray]:
    """Spectral statistics for a (batch, 2^n) sign-bit matrix, vectorised.

    Influence numerators and Parseval sums stay integral; everything else
    is float.  Rows for constant functions carry zeros in the ratio
    columns and False in 'nonconstant'.
    """
    batch, size = bits.shape
    n = size.bit_length() - 1
    coeffs = hadamard_inplace(1 - 2 * bits.astype(np.int64))
    squared = coeffs * coeffs
    scale = 4.0**n

    col = np.arange(size, dtype=np.int64)
    inf_num = np.empty((batch, n), dtype=np.int64)
    # int64 keeps the cross-term sums exact while 3n-1 <= 62; beyond that the
    # products (< 2^53) stay exact in float64 and only the sum rounds.
    q31_num = np.empty((batch, n), dtype=np.int64 if 3 * n - 1 <= 62 else np.float64)
    for k in range(n):
        sel = ((col >> k) & 1) == 1
        inf_num[:, k] = squared[:, sel].sum(axis=1)
        lo = col[~sel]
        pairs = coeffs[:, lo].astype(q31_num.dtype) * coeffs[:, lo | (1 << k)]
        q31_num[:, k] = np.abs(pairs).sum(axis=1)

    sq = squared.astype(np.float64)
    ent = 2.0 * n - (sq * np.log2(np.maximum(sq, 1.0))).sum(axis=1) / scale
    minent = 2.0 * n - np.log2(squared.max(axis=1))

    inf = inf_num / scale
    total = inf_num.sum(axis=1) / scale
    with np.errstate(divide="ignore", invalid="ignore"):
        log_inf = np.where(inf > 0.0, np.log(np.maximum(inf, 1e-300)), 0.0)
        terms = np.where(inf > 0.0, inf * (LN4 - log_inf), 0.0)
        bound = (3.0 * total + terms.sum(axis=1)) / LN2
        bound_drop = (3.0 * total + (terms.sum(axis=1) - terms.max(axis=1))) / LN2
        term_sum = np.where(inf > 0.0, -inf * log_inf, 0.0).sum(axis=1) / LN2
        cap = np.where(total > 0.0, total * np.log2(np.where(total > 0.0, n / total, 1.0)), 0.0)
        ratio = np.where(inf_num > 0, q31_num / np.maximum(inf_num, 1), -np.inf)
    return {
        "n": n,
        "nonconstant": inf_num.sum(axis=1) > 0,
        "entropy": ent,
        "min_entropy": minent,
        "influence_total": total,
        "bound": bound,
        "bound_drop_one": bound_drop,
        "term_sum": term_sum,
        "jensen_cap": cap,
        "q31_worst": ratio.max(axis=1),
        "parseval": squared.sum(axis=1),
        "influence_num": inf_num,
    }


def metric_columns(stats: dict) -> dict[str, np.ndarray]:
    """Assemble the five search metrics from batch_stats output."""
    with np.errstate(divide="ignore", invalid="ignore"):
        total = stats["influence_total"]
        safe = np.where(total > 0.0, total, 1.0)
        bound = np.where(stats["bound"] > 0.0, stats["bound"], 1.0)
        return {
            "ent_over_I": stats["entropy"] / safe,
            "ent_over_bound": stats["entropy"] / bound,
            "minent_over_I": stats["min_entropy"] / safe,
            "q31_worst": stats["q31_worst"],
            "jensen_slack": stats["jensen_cap"] - stats["term_sum"],
        }


def metric_value(metric: str, f: BooleanFunction) -> float:
    """Recompute one metric for one function (witness round-trips)."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    if f.is_constant():
        raise ValueError("metrics are undefined for constant functions")
    stats = batch_stats(f.bits().reshape(1, -1))
    return float(metric_columns(stats)[metric][0])


def _exhaustive_bits(n: int, start: int, stop: int) -> tuple[list[int], np.ndarray]:
    tables = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(1 << n, dtype=np.int64)
    bits = ((tables[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    return [int(t) for t in tables], bits


def _sample_bits(n: int, seed: int, start: int, stop: int) -> tuple[list[int], np.ndarray]:
    key = hashlib.sha256(str(seed).encode()).digest()[:32]
    size = 1 << n
    nbytes = max(1, size // 8)
    blocks = -(-nbytes // 64)
    rows = []
    for index in range(start, stop):
        raw = b"".join(
            hashlib.blake2b(struct.pack("<QI", index, blk), key=key).digest()
            for blk in range(blocks)
        )[:nbytes]
        rows.append(np.unpackbits(np.frombuffer(raw, np.uint8), bitorder="little")[:size])
    bits = np.stack(rows)
    packed = [
        int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")
        for row in bits
    ]
    return packed, bits


def _symmetry_index_maps(n: int) -> list[np.ndarray]:
    """Index gather maps for every coordinate permutation + input negation."""
    idx = np.arange(1 << n, dtype=np.int64)
    maps = []
    for perm in permutations(range(n)):
        permuted = np.zeros_like(idx)
        for j, old in enumerate(perm):
            permuted |= ((idx >> j) & 1) << old
        for flip in range(1 << n):
            maps.append(permuted ^ flip)
    return maps


def _canonical_tables(bits: np.ndarray, maps: list[np.ndarray]) -> np.ndarray:
    weights = (np.int64(1) << np.arange(bits.shape[1], dtype=np.int64))
    full = np.int64((1 << bits.shape[1]) - 1)
    best = np.full(bits.shape[0], full, dtype=np.int64)
    for gather in maps:
        packed = bits[:, gather].astype(np.int64) @ weights
        np.minimum(best, packed, out=best)
        np.minimum(best, full ^ packed, out=best)  # output negation
    return best


def _chunk_best(job: SearchJob, chunk_index: int, maps) -> dict[str, tuple[float, int]]:
    start = chunk_index * job.chunk_size
    stop = min(start + job.chunk_size, job.total_indices)
    if job.mode == "exhaustive":
        tables, bits = _exhaustive_bits(job.n, start, stop)
    else:
        tables, bits = _sample_bits(job.n, job.seed, start, stop)
    keep = np.ones(len(tables), dtype=bool)
    if job.symmetry and job.mode == "exhaustive":
        canonical = _canonical_tables(bits, maps)
        keep &= canonical == np.asarray(tables, dtype=np.int64)
    stats = batch_stats(bits)
    keep &= stats["nonconstant"]
    if not keep.any():
        return {}
    columns = metric_columns(stats)
    out = {}
    table_arr = np.asarray(tables, dtype=object)
    for metric in job.metrics:
        vals = columns[metric]
        masked = vals[keep]
        target = masked.min() if metric in _MINIMIZED else masked.max()
        tied = keep & (vals == target)
        witness = min(table_arr[tied])
        out[metric] = (float(target), int(witness))
    return out


def _pool_chunk(args) -> dict:
    job_dict, chunk_index = args
    job = SearchJob(**{**job_dict, "metrics": tuple(job_dict["metrics"])})
    maps = _symmetry_index_maps(job.n) if job.symmetry else None
    return _chunk_best(job, chunk_index, maps)


def _better(metric: str, cand: tuple[float, int], best: tuple[float, int] | None) -> bool:
    if best is None:
        return True
    if metric in _MINIMIZED:
        if cand[0] != best[0]:
            return cand[0] < best[0]
    else:
        if cand[0] != best[0]:
            return cand[0] > best[0]
    return cand[1] < best[1]


def _write_checkpoint(path: str, job: SearchJob, cursor: int, best: dict) -> None:
    doc = {
        "format": CHECKPOINT_FORMAT,
        "job": job.as_dict(),
        "job_hash": job.job_hash(),
        "next_chunk": cursor,
        "total_chunks": job.total_chunks,
        "best": {
            m: None if b is None else {"value": b[0], "table_hex": format(b[1], "x")}
            for m, b in best.items()
        },
        "complete": cursor >= job.total_chunks,
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(doc, fh)
    os.replace(tmp, path)


def _finalize(job: SearchJob, best: dict) -> list[ExtremalRecord]:
    records = []
    for metric in sorted(job.metrics):
        found = best.get(metric)
        if found is None:
            continue
        f = BooleanFunction(job.n, found[1])
        records.append(
            ExtremalRecord(
                metric=metric,
                value=found[0],
                n=job.n,
                witness_hex=f.to_hex(),
                context=analyze(f),
            )
        )
    return records


def _sweep(
    job: SearchJob,
    best: dict,
    first_chunk: int,
    checkpoint_path: str | None,
    workers: int,
    max_chunks: int | None,
) -> list[ExtremalRecord] | None:
    cursor = first_chunk
    todo = job.total_chunks - cursor
    if max_chunks is not None:
        todo = min(todo, max_chunks)
    pending = list(range(cursor, cursor + todo))
    save_every = job.checkpoint_every or job.total_chunks

    def merge(result: dict) -> None:
        for metric, cand in result.items():
            if _better(metric, cand, best.get(metric)):
                best[metric] = cand

    if workers > 1 and len(pending) > 1:
        job_dict = job.as_dict()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batch_start = 0
            while batch_start < len(pending):
                batch = pending[batch_start : batch_start + save_every]
                for result in pool.map(_pool_chunk, [(job_dict, c) for c in batch]):
                    merge(result)
                cursor = batch[-1] + 1
                if checkpoint_path:
                    _write_checkpoint(checkpoint_path, job, cursor, best)
                batch_start += len(batch)
    else:
        maps = _symmetry_index_maps(job.n) if job.symmetry else None
        for done, chunk in enumerate(pending, start=1):
            merge(_chunk_best(job, chunk, maps))
            cursor = chunk + 1
            if checkpoint_path and (done % save_every == 0 or done == len(pending)):
                _write_checkpoint(checkpoint_path, job, cursor, best)

    if cursor < job.total_chunks:
        if checkpoint_path:
            _write_checkpoint(checkpoint_path, job, cursor, best)
        return None
    if checkpoint_path:
        _write_checkpoint(checkpoint_path, job, cursor, best)
    return _finalize(job, best)


def run(
    job: SearchJob,
    checkpoint_path: str | None = None,
    workers: int = 1,
    max_chunks: int | None = None,
) -> list[ExtremalRecord] | None:
    """Execute a job from the start.  Returns None if stopped early."""
    best: dict[str, tuple[float, int] | None] = {m: None for m in job.metrics}
    return _sweep(job, best, 0, checkpoint_path, workers, max_chunks)


def resume(
    checkpoint_path: str,
    workers: int = 1,
    max_chunks: int | None = None,
) -> list[ExtremalRecord] | None:
    """Continue a checkpointed job; requires a matching job hash."""
    with open(checkpoint_path) as fh:
        doc = json.load(fh)
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"unsupported checkpoint format {doc.get('format')!r}")
    stored = doc["job"]
    job = SearchJob(**{**stored, "metrics": tuple(stored["metrics"])})
    if job.job_hash() != doc["job_hash"]:
        raise ValueError("checkpoint job hash does not match its job description")
    best = {}
    for metric in job.metrics:
        entry = doc["best"].get(metric)
        best[metric] = None if entry is None else (entry["value"], int(entry["table_hex"], 16))
    if doc["complete"]:
        return _finalize(job, best)
    return _sweep(job, best, doc["next_chunk"], checkpoint_path, workers, max_chunks)
