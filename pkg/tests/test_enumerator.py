import pytest

from imds.enumerator import (TABLE1, EnumerationReport, SearchJob, block_size,
                             checkpoint_resume, checkpoint_save, enumerate_representatives,
                             expand_class, index_of, iter_class, partition, read_checkpoint,
                             scan_python, space_size, tuple_at)
from imds.errors import CorruptCheckpointError, VersionMismatchError
from imds.field import GF
from imds.forms import RepTuple, build_representative, check_representative
from imds.matrix import flatten, is_mds_full


def collect(job, **kw):
    out = []
    report = enumerate_representatives(job, lambda t, R: out.append((t, R)), **kw)
    return report, out


def test_space_size_and_indexing(F3):
    n = 7
    assert space_size(F3) == n ** 4 * (n - 1) == 14406
    assert tuple_at(F3, 0) == RepTuple(1, 1, 1, 1, F3.alpha(1))
    assert tuple_at(F3, space_size(F3) - 1) == RepTuple(*(F3.alpha(6),) * 5)
    for i in (0, 1, 5, 6, 293, 294, 9999, 14405):
        assert index_of(F3, tuple_at(F3, i)) == i
    with pytest.raises(IndexError):
        tuple_at(F3, 14406)


def test_example1_is_first_hit_m4(F4, example1_R):
    _, out = collect(SearchJob(F4, mode="reps", stop=5000))
    assert out[0] == (RepTuple(1, 1, 2, 2, 2), example1_R)


def test_m3_count_and_report(F3):
    r = enumerate_representatives(SearchJob(F3))
    assert r.rep_count == 48
    assert r.total_count == 48 * 343 == 16464
    assert r.complete and r.tuples_scanned == 14406
    # r = pq removes one r per (p, q, c, d)
    n = 7
    assert r.candidates_tested == n ** 3 * (n - 1) ** 2


def test_kernel_matches_python_scan_m3(F3):
    _, out = collect(SearchJob(F3, mode="reps"))
    ref = [(t, R) for _, t, R in scan_python(F3, 0, space_size(F3))]
    assert out == ref


@pytest.mark.parametrize("m", [4, 5, 7, 8])
def test_kernel_matches_python_scan_subrange(m):
    F = GF(m)
    start = block_size(F) * 3 + 17
    stop = start + 3000
    _, out = collect(SearchJob(F, mode="reps", start=start, stop=stop))
    ref = [(t, R) for _, t, R in scan_python(F, start, stop)]
    assert out == ref


def test_pruned_tuples_never_mds(F3):
    units = list(F3.units())
    for p in units:
        for q in units:
            for c in units:
                for d in units:
                    r = F3.mul(p, q)
                    assert not is_mds_full(F3, build_representative(F3, RepTuple(p, q, r, c, d)))
                    assert not is_mds_full(F3, build_representative(F3, RepTuple(p, q, d, c, 1)))


def test_every_rep_passes_structural_checks(F3, pipeline_reps_m3):
    assert len(pipeline_reps_m3) == 48
    for t, R in pipeline_reps_m3:
        assert t.r != F3.mul(t.p, t.q) and t.d != 1
        check_representative(F3, R)


def test_verify_mode_m4(F4):
    r, out = collect(SearchJob(F4, mode="reps"), verify=True)
    assert r.rep_count == len(out) == 71856


def test_partition_covers(F4):
    job = SearchJob(F4)
    for k in (1, 2, 3, 7, 16, 300):
        parts = partition(job, k)
        assert parts[0].start == 0 and parts[-1].stop == job.stop
        for a, b in zip(parts, parts[1:]):
            assert a.stop == b.start
        bs = block_size(F4)
        assert all(p.start % bs == 0 for p in parts)


@pytest.mark.parametrize("m", [3, 4])
def test_count_independent_of_partitions_and_jobs(m):
    F = GF(m)
    job = SearchJob(F)
    expected = TABLE1[m]
    for k in (2, 5):
        assert sum(enumerate_representatives(p).rep_count for p in partition(job, k)) == expected
    for jobs in (1, 3):
        assert enumerate_representatives(job, jobs=jobs, chunk=997).rep_count == expected


def test_stream_order_deterministic(F3):
    _, single = collect(SearchJob(F3, mode="reps"))
    _, threaded = collect(SearchJob(F3, mode="reps"), jobs=4, chunk=101)
    assert single == threaded
    split = []
    for part in partition(SearchJob(F3, mode="reps"), 2):
        split.extend(collect(part)[1])
    assert sorted(split) == sorted(single)
    assert split == single


def test_checkpoint_resume_m4(F4, tmp_path):
    ck = tmp_path / "m4.ckpt"
    job = SearchJob(F4)
    half = space_size(F4) // 2
    first = enumerate_representatives(job, checkpoint=ck, max_tuples=half, chunk=4096)
    assert not first.complete
    state = read_checkpoint(ck)
    assert state["cursor"] == first.cursor >= half
    assert state["rep_count"] == first.rep_count

    resumed = checkpoint_resume(job, ck)
    assert resumed.cursor == first.cursor
    second = enumerate_representatives(resumed, checkpoint=ck)
    assert second.complete
    assert second.rep_count == 71856
    assert second.tuples_scanned == space_size(F4) - first.cursor
    assert first.tuples_scanned + second.tuples_scanned == space_size(F4)
    assert read_checkpoint(ck)["cursor"] == space_size(F4)


def test_resume_streams_without_gaps(F3, tmp_path):
    ck = tmp_path / "m3.ckpt"
    job = SearchJob(F3, mode="reps")
    r1, a = collect(job, checkpoint=ck, max_tuples=5000, chunk=512)
    r2, b = collect(checkpoint_resume(job, ck), checkpoint=ck, chunk=512)
    _, full = collect(job)
    assert a + b == full
    assert r2.rep_count == 48


def test_periodic_checkpoints(F3, tmp_path):
    ck = tmp_path / "p.ckpt"
    seen = []

    def sink(t, R):
        if ck.exists():
            seen.append(read_checkpoint(ck)["cursor"])

    job = SearchJob(F3, mode="reps", checkpoint_interval=1000)
    enumerate_representatives(job, sink, checkpoint=ck, chunk=500)
    assert len(set(seen)) > 3
    assert seen == sorted(seen)


def test_sink_failure_saves_resumable_state(F3, tmp_path):
    ck = tmp_path / "f.ckpt"
    calls = []

    def sink(t, R):
        calls.append(t)
        if len(calls) == 20:
            raise RuntimeError("disk full")

    job = SearchJob(F3, mode="reps")
    with pytest.raises(RuntimeError, match="disk full"):
        enumerate_representatives(job, sink, checkpoint=ck, chunk=300)
    resumed = checkpoint_resume(job, ck)
    assert 0 < resumed.cursor < job.stop
    r, rest = collect(resumed)
    assert r.rep_count == 48
    # hits of the failed chunk are delivered again; nothing is lost
    _, full = collect(job)
    assert set(calls[:-1]) | {t for t, _ in rest} == {t for t, _ in full}


def test_checkpoint_wrong_field(F4, tmp_path):
    ck = tmp_path / "x.ckpt"
    job = SearchJob(F4)
    enumerate_representatives(job, checkpoint=ck, max_tuples=1000)
    with pytest.raises(VersionMismatchError):
        checkpoint_resume(SearchJob(GF(4, 0b11001)), ck)
    with pytest.raises(VersionMismatchError):
        checkpoint_resume(SearchJob(F4, stop=1000), ck)
    with pytest.raises(VersionMismatchError):
        checkpoint_resume(SearchJob(F4, mode="reps"), ck)


def test_checkpoint_corrupt(F4, tmp_path):
    ck = tmp_path / "c.ckpt"
    job = SearchJob(F4)
    checkpoint_save(job, ck, cursor=100, rep_count=3, candidates=90)
    data = bytearray(ck.read_bytes())
    assert data[:4] == b"IMDS" and data[4] == 1
    data[30] ^= 0xFF
    ck.write_bytes(bytes(data))
    with pytest.raises(CorruptCheckpointError):
        checkpoint_resume(job, ck)
    ck.write_bytes(b"IMDS")
    with pytest.raises(CorruptCheckpointError):
        checkpoint_resume(job, ck)


def test_checkpoint_version_byte(F4, tmp_path):
    import struct
    import zlib

    ck = tmp_path / "v.ckpt"
    job = SearchJob(F4)
    checkpoint_save(job, ck, cursor=0, rep_count=0, candidates=0)
    body = bytearray(ck.read_bytes()[:-4])
    body[4] = 99
    ck.write_bytes(bytes(body) + struct.pack("<I", zlib.crc32(bytes(body))))
    with pytest.raises(VersionMismatchError):
        checkpoint_resume(job, ck)


def test_expand_class_m3(F3, pipeline_reps_m3):
    everything = set()
    for _, R in pipeline_reps_m3:
        emitted = []
        assert expand_class(F3, R, emitted.append) == 343
        assert len(set(emitted)) == 343
        everything.update(emitted)
    assert len(everything) == 48 * 343 == 16464


def test_expand_class_m4(F4, example1_R):
    mats = [M for _, M in iter_class(F4, example1_R)]
    assert len(mats) == len(set(mats)) == 15 ** 3
    assert mats[0] == example1_R


@pytest.mark.parametrize("m", [7, 8])
def test_spot_run_reproducible(m):
    F = GF(m)
    bs = block_size(F)
    job = SearchJob(F, start=5 * bs, stop=5 * bs + min(bs, 1 << 22))
    a = enumerate_representatives(job)
    b = enumerate_representatives(job, jobs=2, chunk=1 << 18)
    assert a.rep_count == b.rep_count > 0
    assert a.candidates_tested == b.candidates_tested


def test_report_dict(F3):
    r = EnumerationReport(m=3, poly=0xB, rep_count=48)
    d = r.to_dict()
    assert d["total_count"] == 16464 and d["poly"] == "0xb"


def test_bad_job():
    with pytest.raises(ValueError):
        SearchJob(GF(3), mode="bogus")
    with pytest.raises(ValueError):
        SearchJob(GF(3), start=10, stop=5)
