"""Exhaustive search for involutory MDS class representatives.

The search space is every tuple (p, q, r, c, d) of units with d != 1,
linearized lexicographically by generator exponent with d innermost:

    index = (((ip * n + iq) * n + ir) * n + ic) * (n - 1) + (id - 1)

where n = 2^m - 1 and id in 1..n-1 (exponent 0 is d = 1, which never gives
an MDS matrix). Tuples with r = pq are skipped before the MDS test for the
same reason. The scan kernel is compiled with numba and releases the GIL,
so chunks of the index space run on a thread pool and are merged in order.
"""
from __future__ import annotations

import hashlib
import logging
import os
import struct
import time
import zlib
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field, replace
from itertools import product
from pathlib import Path
from typing import Callable, Iterator, Optional

import numba
import numpy as np

from .errors import CorruptCheckpointError, VersionMismatchError
from .field import GF
from .forms import (DiagTriple, RepTuple, build_representative, check_representative,
                    expand)
from .matrix import Matrix, from_flat, is_mds_fast_involutory

log = logging.getLogger(__name__)

ORDERING_VERSION = 1
MODES = ("count", "reps", "all")
DEFAULT_CHECKPOINT_INTERVAL = 1 << 30
COUNT_CHUNK = 1 << 22
STREAM_CHUNK = 1 << 18

# Counts of class representatives reported for m = 3..8.
TABLE1 = {3: 48, 4: 71856, 5: 10188240, 6: 612203760,
          7: 26149708368, 8: 961006331376}


def space_size(F: GF) -> int:
    n = F.n_units
    return n ** 4 * (n - 1)


def block_size(F: GF) -> int:
    """Number of tuples sharing one leading (p, q) pair."""
    n = F.n_units
    return n * n * (n - 1)


def exponents_at(F: GF, index: int) -> tuple[int, int, int, int, int]:
    n = F.n_units
    index, jd = divmod(index, n - 1)
    index, ic = divmod(index, n)
    index, ir = divmod(index, n)
    ip, iq = divmod(index, n)
    if ip >= n:
        raise IndexError("tuple index out of range")
    return ip, iq, ir, ic, jd + 1


def tuple_at(F: GF, index: int) -> RepTuple:
    return RepTuple(*(F.antilog(k) for k in exponents_at(F, index)))


def index_of(F: GF, t: RepTuple) -> int:
    if t.d == 1:
        raise ValueError("d = 1 is outside the search space")
    n = F.n_units
    ip, iq, ir, ic, id_ = (F.log(x) for x in t)
    return (((ip * n + iq) * n + ir) * n + ic) * (n - 1) + id_ - 1


# -- scan kernel ---------------------------------------------------------

def _minor_pairs() -> np.ndarray:
    # flat indices (a, b, c, e) of each 2x2 minor: R[a]*R[e] + R[b]*R[c]
    masks = sorted(((i, j) for i in range(4) for j in range(i + 1, 4)),
                   key=lambda s: (1 << s[0]) | (1 << s[1]))
    out = []
    for r0, r1 in masks:
        for c0, c1 in masks:
            out.append((4 * r0 + c0, 4 * r0 + c1, 4 * r1 + c0, 4 * r1 + c1))
    return np.array(out, dtype=np.int64)


MINOR_PAIRS = _minor_pairs()


@numba.njit(nogil=True, cache=True)
def _scan(mt, units, n, start, stop, record, out_idx, out_mat, pairs):  # pragma: no cover
    ip = start // (n * n * n * (n - 1))
    rem = start % (n * n * n * (n - 1))
    iq = rem // (n * n * (n - 1))
    rem = rem % (n * n * (n - 1))
    ir = rem // (n * (n - 1))
    rem = rem % (n * (n - 1))
    ic = rem // (n - 1)
    jd = rem % (n - 1) + 1

    R = np.empty(16, dtype=np.int64)
    hits = 0
    candidates = 0
    for idx in range(start, stop):
        p = units[ip]
        q = units[iq]
        r = units[ir]
        pq = mt[p, q]
        if r != pq:
            candidates += 1
            c = units[ic]
            d = units[jd]
            e = d ^ 1
            s = pq ^ r
            c11 = mt[c, s]
            c12 = mt[c, p]
            c21 = mt[c, q]
            c22 = c
            a11 = mt[e, c11] ^ mt[d, c21]
            a12 = mt[e, c12] ^ mt[d, c22]
            a21 = mt[d, c11] ^ mt[e, c21]
            a22 = mt[d, c12] ^ mt[e, c22]
            R[0] = a11 ^ 1
            R[1] = a12
            R[2] = mt[a11, e] ^ mt[a12, d]
            R[3] = mt[a11, d] ^ mt[a12, e]
            R[4] = a21
            R[5] = a22 ^ 1
            R[6] = mt[a21, e] ^ mt[a22, d]
            R[7] = mt[a21, d] ^ mt[a22, e]
            R[8] = c11
            R[9] = c12
            R[10] = mt[c11, e] ^ mt[c12, d] ^ 1
            R[11] = mt[c11, d] ^ mt[c12, e]
            R[12] = c21
            R[13] = c22
            R[14] = mt[c21, e] ^ mt[c22, d]
            R[15] = mt[c21, d] ^ mt[c22, e] ^ 1
            ok = True
            for k in range(16):
                if R[k] == 0:
                    ok = False
                    break
            if ok:
                for k in range(36):
                    if mt[R[pairs[k, 0]], R[pairs[k, 3]]] == mt[R[pairs[k, 1]], R[pairs[k, 2]]]:
                        ok = False
                        break
            if ok:
                if record:
                    out_idx[hits] = idx
                    for k in range(16):
                        out_mat[hits, k] = R[k]
                hits += 1
        # odometer over (ip, iq, ir, ic, jd), jd innermost in 1..n-1
        jd += 1
        if jd == n:
            jd = 1
            ic += 1
            if ic == n:
                ic = 0
                ir += 1
                if ir == n:
                    ir = 0
                    iq += 1
                    if iq == n:
                        iq = 0
                        ip += 1
    return hits, candidates


class _Kernel:
    """Per-field arrays handed to the compiled scan."""

    def __init__(self, F: GF):
        self.F = F
        self.mt = np.ascontiguousarray(F.mul_table, dtype=np.int64)
        self.units = np.array(list(F.units()), dtype=np.int64)
        self.n = F.n_units

    def run(self, start: int, stop: int, record: bool):
        size = stop - start if record else 0
        out_idx = np.empty(size, dtype=np.int64)
        out_mat = np.empty((size, 16), dtype=np.uint8)
        hits, candidates = _scan(self.mt, self.units, self.n, start, stop, record,
                                 out_idx, out_mat, MINOR_PAIRS)
        return start, stop, int(hits), int(candidates), out_idx[:hits], out_mat[:hits]


def scan_python(F: GF, start: int, stop: int) -> Iterator[tuple[int, RepTuple, Matrix]]:
    """Reference scan built from the library constructors (slow, for cross-checks)."""
    for idx in range(start, stop):
        t = tuple_at(F, idx)
        if t.r == F.mul(t.p, t.q):
            continue
        R = build_representative(F, t)
        if is_mds_fast_involutory(F, R):
            yield idx, t, R


# -- jobs and reports ----------------------------------------------------

@dataclass(frozen=True)
class SearchJob:
    field: GF
    mode: str = "count"
    start: int = 0
    stop: Optional[int] = None
    cursor: Optional[int] = None
    checkpoint_interval: int = DEFAULT_CHECKPOINT_INTERVAL
    prior_reps: int = 0
    prior_candidates: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        total = space_size(self.field)
        if self.stop is None:
            object.__setattr__(self, "stop", total)
        if self.cursor is None:
            object.__setattr__(self, "cursor", self.start)
        if not 0 <= self.start <= self.cursor <= self.stop <= total:
            raise ValueError(f"bad range start={self.start} cursor={self.cursor} "
                             f"stop={self.stop} (space {total})")

    def param_hash(self) -> bytes:
        key = (f"{self.field.m}:{self.field.poly:#x}:{ORDERING_VERSION}:"
               f"{self.mode}:{self.start}:{self.stop}")
        return hashlib.sha256(key.encode()).digest()[:8]


def partition(job: SearchJob, parts: int) -> list[SearchJob]:
    """Split the job's remaining range into contiguous pieces on (p, q) boundaries."""
    bs = block_size(job.field)
    lo, hi = job.cursor, job.stop
    bounds = [lo]
    for i in range(1, parts):
        cut = lo + (hi - lo) * i // parts
        cut = min(hi, -(-cut // bs) * bs)
        if cut > bounds[-1]:
            bounds.append(cut)
    if hi > bounds[-1] or len(bounds) == 1:
        bounds.append(hi)
    return [replace(job, start=a, stop=b, cursor=a, prior_reps=0, prior_candidates=0)
            for a, b in zip(bounds, bounds[1:])]


@dataclass
class EnumerationReport:
    m: int
    poly: int
    rep_count: int = 0
    candidates_tested: int = 0
    tuples_scanned: int = 0
    elapsed: float = 0.0
    start: int = 0
    stop: int = 0
    cursor: int = 0
    complete: bool = False
    per_rep_class: int = dc_field(init=False)

    def __post_init__(self):
        self.per_rep_class = ((1 << self.m) - 1) ** 3

    @property
    def total_count(self) -> int:
        return self.rep_count * self.per_rep_class

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("per_rep_class")
        d["poly"] = f"{self.poly:#x}"
        d["total_count"] = self.total_count
        d["elapsed"] = round(self.elapsed, 3)
        return d


# -- checkpoints ---------------------------------------------------------

CHECKPOINT_MAGIC = b"IMDS"
CHECKPOINT_VERSION = 1
_CKPT = struct.Struct("<4sBBH8sQQQQQ")
_CRC = struct.Struct("<I")


def checkpoint_save(job: SearchJob, path, cursor: int, rep_count: int,
                    candidates: int) -> None:
    """Atomically write the resumable state of ``job`` at ``cursor``."""
    body = _CKPT.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, job.field.m, job.field.poly,
                      job.param_hash(), job.start, job.stop, cursor, rep_count, candidates)
    data = body + _CRC.pack(zlib.crc32(body))
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def read_checkpoint(path) -> dict:
    data = Path(path).read_bytes()
    if len(data) != _CKPT.size + _CRC.size:
        raise CorruptCheckpointError(f"{path}: unexpected size {len(data)}")
    body, (crc,) = data[:_CKPT.size], _CRC.unpack(data[_CKPT.size:])
    if zlib.crc32(body) != crc:
        raise CorruptCheckpointError(f"{path}: CRC mismatch")
    magic, version, m, poly, phash, start, stop, cursor, reps, cands = _CKPT.unpack(body)
    if magic != CHECKPOINT_MAGIC:
        raise CorruptCheckpointError(f"{path}: bad magic {magic!r}")
    return dict(version=version, m=m, poly=poly, param_hash=phash, start=start, stop=stop,
                cursor=cursor, rep_count=reps, candidates=cands)


def checkpoint_resume(job: SearchJob, path) -> SearchJob:
    """Return ``job`` advanced to the cursor stored in ``path``."""
    st = read_checkpoint(path)
    if st["version"] != CHECKPOINT_VERSION:
        raise VersionMismatchError(f"checkpoint version {st['version']}, "
                                   f"expected {CHECKPOINT_VERSION}")
    if (st["m"], st["poly"]) != (job.field.m, job.field.poly):
        raise VersionMismatchError(f"checkpoint is for m={st['m']} poly={st['poly']:#x}, "
                                   f"job is {job.field!r}")
    if st["param_hash"] != job.param_hash():
        raise VersionMismatchError("checkpoint parameters differ from job (mode/range/ordering)")
    return replace(job, cursor=st["cursor"], prior_reps=st["rep_count"],
                   prior_candidates=st["candidates"])


# -- driver --------------------------------------------------------------

RepSink = Callable[[RepTuple, Matrix], None]


def enumerate_representatives(job: SearchJob, sink: Optional[RepSink] = None, *,
                              jobs: int = 1, checkpoint=None,
                              max_tuples: Optional[int] = None,
                              verify: bool = False,
                              chunk: Optional[int] = None) -> EnumerationReport:
    """Scan ``job``'s range and report (and optionally emit) MDS representatives.

    In ``count`` mode nothing is materialized and ``sink`` is ignored. In the
    streaming modes ``sink(tuple, R)`` is called for every hit in index
    order regardless of ``jobs``. With ``checkpoint`` set, progress is saved
    every ``job.checkpoint_interval`` tuples, when ``max_tuples`` stops the
    run early, and before any exception propagates.
    """
    F = job.field
    kernel = _Kernel(F)
    record = job.mode != "count" and sink is not None
    if chunk is None:
        chunk = STREAM_CHUNK if record else COUNT_CHUNK
    end = job.stop if max_tuples is None else min(job.stop, job.cursor + max_tuples)

    report = EnumerationReport(m=F.m, poly=F.poly, start=job.start, stop=job.stop,
                               rep_count=job.prior_reps,
                               candidates_tested=job.prior_candidates)
    cursor = job.cursor
    last_saved = cursor
    t0 = time.perf_counter()

    def save():
        if checkpoint is not None:
            checkpoint_save(job, checkpoint, cursor, report.rep_count,
                            report.candidates_tested)

    bounds = ((a, min(a + chunk, end)) for a in range(cursor, end, chunk))
    pending: deque = deque()
    try:
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            def refill():
                while len(pending) < 2 * max(1, jobs):
                    nxt = next(bounds, None)
                    if nxt is None:
                        return
                    pending.append(pool.submit(kernel.run, nxt[0], nxt[1], record))

            refill()
            while pending:
                a, b, hits, cands, idxs, mats = pending.popleft().result()
                refill()
                if record:
                    for idx, row in zip(idxs.tolist(), mats.tolist()):
                        t = tuple_at(F, idx)
                        R = from_flat(row)
                        if verify:
                            check_representative(F, R)
                        sink(t, R)
                report.rep_count += hits
                report.candidates_tested += cands
                report.tuples_scanned += b - a
                cursor = b
                if cursor - last_saved >= job.checkpoint_interval:
                    save()
                    last_saved = cursor
    except BaseException:
        for fut in pending:
            fut.cancel()
        save()
        raise
    report.cursor = cursor
    report.complete = cursor == job.stop
    report.elapsed = time.perf_counter() - t0
    save()
    log.info("m=%d scanned %d tuples in %.2fs, %d reps", F.m, report.tuples_scanned,
             report.elapsed, report.rep_count)
    return report


def iter_class(F: GF, R: Matrix) -> Iterator[tuple[DiagTriple, Matrix]]:
    """(D, D^-1 R D) for every D = Diag(1, b1, b2, b3), b's in unit order."""
    units = list(F.units())
    for b1, b2, b3 in product(units, repeat=3):
        D = DiagTriple(b1, b2, b3)
        yield D, expand(F, R, D)


def expand_class(F: GF, R: Matrix, sink: Callable[[Matrix], None]) -> int:
    count = 0
    for _, M in iter_class(F, R):
        sink(M)
        count += 1
    return count


def count_table(ms=(3, 4, 5), polys: Optional[dict] = None, jobs: int = 1,
                **kwargs) -> list[EnumerationReport]:
    polys = polys or {}
    reports = []
    for m in ms:
        F = GF(m, polys.get(m))
        reports.append(enumerate_representatives(SearchJob(F), jobs=jobs, **kwargs))
    return reports


__all__ = [
    "SearchJob", "EnumerationReport", "enumerate_representatives", "expand_class",
    "iter_class", "count_table", "checkpoint_save", "checkpoint_resume", "read_checkpoint",
    "partition", "space_size", "block_size", "tuple_at", "index_of", "exponents_at",
    "scan_python", "TABLE1",
]
