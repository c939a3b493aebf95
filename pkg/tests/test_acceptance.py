"""Acceptance suite: ten criteria, one test each, one pass/fail line each.

Every quantitative threshold lives next to the assertion that enforces
it.  Criterion 10 needs externally supplied benchmark data and is
skipped unless the HISEG_BSDS_DIR environment variable points at it.
"""

import glob
import os
import time

import numpy as np
import pytest

from hiseg import (
    EdgeConfidenceMap,
    GroundTruth,
    Image,
    PnmParseError,
    Segmentation,
    asa,
    boundary_recall,
    build_grid_graph,
    build_hierarchy,
    evaluate,
    extract,
    extract_many,
    read_edge_map,
    read_image,
    under_seg_error,
    write_image,
)

from conftest import (
    all_regions_connected,
    is_nested,
    kruskal_mst_weights,
    naive_asa,
    naive_br,
    naive_ue,
    random_image,
    two_halves_image,
)


def report(criterion, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[acceptance] criterion {criterion}: {status}{suffix}")
    assert ok


def test_criterion_1_kruskal_oracle_equivalence():
    """Frozen-weight builds log exactly an MST's edge-weight multiset."""
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    mismatches = 0
    for case in range(100):
        h_, w_ = rng.integers(2, 17, 2)
        img = random_image(rng, h_, w_)
        g = build_grid_graph(img)
        h = build_hierarchy(img, aggregate=False)
        expected = kruskal_mst_weights(g.n, g.edge_a, g.edge_b, g.weight)
        if np.sort(h.weight).tolist() != expected:
            mismatches += 1
    elapsed = time.perf_counter() - t0
    report(1, mismatches == 0 and elapsed < 10.0,
           f"0 mismatches required, got {mismatches}; {elapsed:.1f}s < 10s")


def test_criterion_2_iteration_bound():
    """Rounds never exceed ceil(log2 n); tree count at least halves."""
    rng = np.random.default_rng(102)
    ok = True
    for h_, w_ in [(1, 2), (3, 3), (16, 16), (64, 64), (7, 31)]:
        img = random_image(rng, h_, w_)
        h = build_hierarchy(img)
        n = h_ * w_
        if h.iteration_count() > int(np.ceil(np.log2(n))):
            ok = False
        counts = [n] + [v for v, _ in h.round_stats]
        if any(cur > (prev + 1) // 2 for prev, cur in zip(counts, counts[1:])):
            ok = False
    report(2, ok, "rounds <= ceil(log2 n) and halving on all images")


def test_criterion_3_euler_bound():
    """After every flatten, m <= 3n whenever n >= 3."""
    rng = np.random.default_rng(103)
    ok = True
    for h_, w_ in [(4, 4), (16, 16), (32, 48), (64, 64)]:
        h = build_hierarchy(random_image(rng, h_, w_))
        for n, m in h.round_stats:
            if n >= 3 and m > 3 * n:
                ok = False
    report(3, ok, "m <= 3n after every flatten")


def test_criterion_4_hierarchy_contracts():
    """Connectivity, nesting, identity extremes, byte-identical rebuilds."""
    rng = np.random.default_rng(104)
    t0 = time.perf_counter()
    img = random_image(rng, 64, 64)
    h = build_hierarchy(img)
    h2 = build_hierarchy(img)
    ok = h == h2
    n = 4096
    ks = sorted(set(rng.integers(2, n, 6).tolist()) | {1, n}, reverse=True)
    segs = extract_many(h, ks)
    for k, seg in zip(ks, segs):
        if not all_regions_connected(seg.labels, k):
            ok = False
    for fine, coarse in zip(segs, segs[1:]):
        if not is_nested(fine.labels, coarse.labels):
            ok = False
    if not np.array_equal(segs[0].labels.ravel(), np.arange(n)):
        ok = False
    if not np.all(segs[-1].labels == 0):
        ok = False
    elapsed = time.perf_counter() - t0
    report(4, ok and elapsed < 30.0,
           f"ladder {ks} on 64x64; {elapsed:.1f}s < 30s")


def test_criterion_5_metrics_oracle():
    """ASA/UE/BR match naive references; hand-derived cases hold."""
    rng = np.random.default_rng(105)
    ok = True
    for _ in range(50):
        h_, w_ = rng.integers(2, 17, 2)
        s = Segmentation.from_raw_labels(rng.integers(0, 6, (h_, w_)))
        g = GroundTruth(rng.integers(0, 4, (h_, w_)))
        if abs(asa(s, g) - naive_asa(s.labels, g.labels)) > 1e-12:
            ok = False
        if abs(under_seg_error(s, g) - naive_ue(s.labels, g.labels)) > 1e-12:
            ok = False
        for eps in (0, 1, 2):
            if abs(boundary_recall(s, g, eps)
                   - naive_br(s.labels, g.labels, eps)) > 1e-12:
                ok = False
    # orthogonal halves: UE exactly 1.0
    g = GroundTruth(np.repeat([[0, 0, 1, 1]], 4, axis=0).T)
    s_labels = np.zeros((4, 4), dtype=np.int64)
    s_labels[:, 2:] = 1
    if under_seg_error(Segmentation(s_labels), g) != 1.0:
        ok = False
    # shifted split: BR 1.0 at eps=2, 0.0 at eps=1
    g_split = np.zeros((8, 8), dtype=np.int64)
    g_split[:, 4:] = 1
    s_split = np.zeros((8, 8), dtype=np.int64)
    s_split[:, 6:] = 1
    g2, s2 = GroundTruth(g_split), Segmentation(s_split)
    if boundary_recall(s2, g2, 2) != 1.0 or boundary_recall(s2, g2, 1) != 0.0:
        ok = False
    report(5, ok, "50 random cases plus hand-derived UE and BR cases")


def test_criterion_6_synthetic_recovery():
    """Two-halves at k=2 and three color bands at k=3, exact."""
    ok = True
    for size in (4, 64):
        seg = extract(build_hierarchy(two_halves_image(size, size)), 2)
        expected = np.zeros((size, size), dtype=np.int64)
        expected[:, size // 2:] = 1
        if not np.array_equal(seg.labels, expected):
            ok = False
    bands = np.zeros((12, 12, 3))
    bands[:, 4:8] = (0.0, 1.0, 0.0)
    bands[:, 8:] = (0.0, 0.0, 1.0)
    bands[:, :4] = (1.0, 0.0, 0.0)
    expected = np.repeat(np.arange(12) // 4, 12).reshape(12, 12, order="F")
    img = Image(bands)
    conf = np.zeros((12, 12))
    conf[:, [3, 4, 7, 8]] = 1.0  # confident only along the true boundaries
    for edge_map in (None, EdgeConfidenceMap(conf)):
        seg = extract(build_hierarchy(img, edge_map), 3)
        if not np.array_equal(seg.labels, expected):
            ok = False
    report(6, ok, "halves k=2 (4x4 and 64x64), bands k=3 with/without edges")


def test_criterion_7_monotonicity():
    """ASA non-decreasing and UE non-increasing along each k-ladder."""
    rng = np.random.default_rng(107)
    ok = True
    for case in range(10):
        gt_grid = np.zeros((16, 16), dtype=np.int64)
        cut_r, cut_c = rng.integers(4, 13, 2)
        gt_grid[cut_r:, :] = 1
        gt_grid[:, cut_c:] += 2
        noise = rng.normal(0, 0.05, (16, 16, 3))
        img = Image(np.clip(gt_grid[..., None] * np.array([0.3, 0.1, 0.2]) / 3
                            + 0.2 + noise, 0, 1))
        h = build_hierarchy(img)
        g = GroundTruth(gt_grid)
        ks = [2, 4, 8, 16, 32, 64, 128, 256]
        asas = [asa(extract(h, k), g) for k in ks]
        ues = [under_seg_error(extract(h, k), g) for k in ks]
        if any(b < a for a, b in zip(asas, asas[1:])):
            ok = False
        if any(b > a for a, b in zip(ues, ues[1:])):
            ok = False
    report(7, ok, "10 images, k in {2,...,256}")


def test_criterion_8_performance_contract():
    """Desk-scale speed: 500 ms build, cheap extra scales, near-linear."""
    rng = np.random.default_rng(108)

    # single-threaded contract: CPU time, immune to machine load; best of
    # a few runs to shed cache and allocator warm-up effects
    def best_of(fn, runs=5):
        samples = []
        for _ in range(runs):
            t0 = time.process_time()
            fn()
            samples.append(time.process_time() - t0)
        return min(samples)

    img = random_image(rng, 321, 481)
    build_hierarchy(img)  # warm-up (JIT compilation, allocator)
    build_s = best_of(lambda: build_hierarchy(img))
    h = build_hierarchy(img)
    extract(h, 600)  # warm the extraction kernel on this size
    extract_s = best_of(lambda: extract_many(h, [100, 200, 400, 800, 1600]))

    times = {}
    for mp, (h_, w_) in {0.25: (500, 500), 0.5: (707, 707), 1.0: (1000, 1000)}.items():
        big = random_image(rng, h_, w_)
        times[mp] = best_of(lambda: build_hierarchy(big), runs=3)
    # 4x the pixels may cost at most 2 * 4 = 8x the time
    scaling_ok = (times[1.0] <= 8.0 * times[0.25]
                  and times[0.5] <= 4.0 * times[0.25])
    ok = build_s <= 0.5 and extract_s < 0.25 * build_s and scaling_ok
    report(8, ok,
           f"build {build_s * 1000:.0f}ms <= 500ms, "
           f"5 scales {extract_s / build_s:.1%} < 25%, "
           f"1.0MP/0.25MP {times[1.0] / times[0.25]:.1f}x <= 8x")


def test_criterion_9_pnm_round_trip_and_fuzz(tmp_path):
    """Byte-exact round-trips; 1000 fuzzed files fail cleanly."""
    rng = np.random.default_rng(109)
    ok = True
    for channels in (1, 3):
        img = Image(rng.integers(0, 256, (9, 13, channels)) / 255.0)
        path = tmp_path / f"rt{channels}.pnm"
        write_image(img, path)
        blob = path.read_bytes()
        if read_image(path) != img:
            ok = False
        write_image(read_image(path), path)
        if path.read_bytes() != blob:
            ok = False

    crashes = 0
    path = tmp_path / "fuzz.pnm"
    for case in range(1000):
        kind = case % 4
        if kind == 0:  # random garbage
            blob = bytes(rng.integers(0, 256, int(rng.integers(0, 64))))
        elif kind == 1:  # valid magic, mangled header
            blob = b"P5" + bytes(rng.integers(0, 256, int(rng.integers(0, 32))))
        elif kind == 2:  # valid header, truncated payload
            blob = b"P6\n8 8\n255\n" + bytes(int(rng.integers(0, 192)))
        else:  # header with hostile numbers
            w, h_ = rng.integers(0, 10**6, 2)
            blob = b"P5\n%d %d\n%d\n" % (w, h_, rng.integers(0, 10**6))
        path.write_bytes(blob)
        try:
            read_image(path)
        except PnmParseError:
            pass
        except MemoryError:
            crashes += 1
        except Exception:
            crashes += 1
    report(9, ok and crashes == 0,
           f"round-trips byte-exact, {1000 - crashes}/1000 fuzz cases clean")


@pytest.mark.skipif("HISEG_BSDS_DIR" not in os.environ,
                    reason="optional: set HISEG_BSDS_DIR to benchmark images")
def test_criterion_10_optional_dataset_floor():
    """Mean ASA at 600 superpixels over 20 benchmark images >= 0.93.

    Expects <stem>.ppm images with matching <stem>.gt.pgm label maps and
    optional <stem>.edges.pgm confidence maps under HISEG_BSDS_DIR.
    """
    root = os.environ["HISEG_BSDS_DIR"]
    images = sorted(glob.glob(os.path.join(root, "*.ppm")))[:20]
    if not images:
        pytest.skip(f"no .ppm images under {root}")
    scores = []
    for path in images:
        stem = path[:-4]
        img = read_image(path)
        edge_path = f"{stem}.edges.pgm"
        edge_map = read_edge_map(edge_path) if os.path.exists(edge_path) else None
        gt = GroundTruth(np.asarray(read_image(f"{stem}.gt.pgm").data[..., 0] * 255,
                                    dtype=np.int64))
        h = build_hierarchy(img, edge_map)
        scores.append(evaluate(extract(h, 600), gt).asa)
    mean_asa = float(np.mean(scores))
    report(10, mean_asa >= 0.93, f"mean ASA {mean_asa:.3f} over {len(scores)} images")
