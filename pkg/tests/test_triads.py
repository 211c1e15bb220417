import io

import mpmath
import numpy as np
import pytest

from rswe_triads.spectral_core import GridSpec, OutOfGridError, PhysicalParams, WaveIndex
from rswe_triads.triads import (
    ACRONYMS,
    INTERACTION_TYPES,
    PERMUTATION_COUNTS,
    classify,
    enumerate_triads,
    expand_type_filter,
    frequency_range,
    frequency_ranges,
    make_triad,
    mode_permutations,
    triad_frequency,
)


def test_permutation_counts_cover_all_27():
    # counts column of the interaction table
    assert PERMUTATION_COUNTS == {"i": 1, "ii-a": 2, "ii-b": 4, "iii-a": 2, "iii-b": 4,
                                  "iv-a": 2, "iv-b": 4, "v-a": 2, "v-b": 4, "vi": 2}
    assert sum(PERMUTATION_COUNTS.values()) == 27
    assert ACRONYMS["ii-a"] == "FSF" and ACRONYMS["iii-b"] == "FFF"


@pytest.mark.parametrize("modes,label", [
    ((0, 0, 0), "i"), ((1, -1, 0), "ii-a"), ((1, 0, 1), "ii-b"), ((0, -1, -1), "ii-b"),
    ((1, 1, 1), "iii-a"), ((1, -1, 1), "iii-b"), ((-1, 1, 1), "iii-b"), ((0, 0, 1), "iv-a"),
    ((1, 0, 0), "iv-b"), ((1, 1, 0), "v-a"), ((0, 1, -1), "v-b"), ((1, 0, -1), "v-b"), ((1, 1, -1), "vi"),
])
def test_classification(modes, label):
    assert classify(modes) == label


def test_classify_rejects_bad_mode():
    with pytest.raises(ValueError):
        classify((2, 0, 0))


def test_mode_permutations_partition():
    perms = [p for t in INTERACTION_TYPES for p in mode_permutations(t)]
    assert len(perms) == len(set(perms)) == 27
    with pytest.raises(ValueError):
        mode_permutations("vii")


def test_expand_type_filter():
    assert expand_type_filter(["ii"]) == ("ii-a", "ii-b")
    assert expand_type_filter(None) == INTERACTION_TYPES[1:]
    assert expand_type_filter("all") == INTERACTION_TYPES
    assert expand_type_filter("iii-a, vi") == ("iii-a", "vi")
    with pytest.raises(ValueError):
        expand_type_filter(["x"])


def test_triad_frequency_values(nd_params, grid32):
    t = make_triad(nd_params, grid32, (5, 0, 1), (-5, 5, 0), (0, 5, 1))
    assert t.omega == 0.0 and t.interaction_type == "ii-b"
    sss = make_triad(nd_params, grid32, (1, 2, 0), (3, -1, 0), 0)
    assert sss.omega == 0.0 and sss.interaction_type == "i"
    # 20 sqrt(26) - 10 sqrt(101), evaluated independently at 30 digits
    with mpmath.workdps(30):
        expect = float(20 * mpmath.sqrt(26) - 10 * mpmath.sqrt(101))
    t = make_triad(nd_params, grid32, (5, 0, 1), (5, 0, 1), 1)
    assert t.omega == pytest.approx(expect, rel=1e-13)
    assert t.omega == pytest.approx(1.48163, abs=1e-5)


def test_triad_constraint_and_resolvability(nd_params, grid32):
    with pytest.raises(ValueError):
        triad_frequency(nd_params, grid32, WaveIndex(1, 0, 1), WaveIndex(1, 0, 1), WaveIndex(3, 0, 1))
    with pytest.raises(OutOfGridError):
        make_triad(nd_params, grid32, (10, 0, 1), (10, 0, 1), 1)


def test_triad_mirror_flips_frequency(nd_params, grid32):
    t = make_triad(nd_params, grid32, (2, 1, 1), (3, -1, -1), 1)
    m = t.mirror()
    assert m.omega == -t.omega
    assert triad_frequency(nd_params, grid32, m.wave_a, m.wave_b, m.wave_out) == pytest.approx(m.omega, abs=1e-12)


def test_enumeration_matches_brute_force():
    params = PhysicalParams.nondimensional(0.1)
    g = GridSpec.square(4)
    sub = enumerate_triads(params, g, types="all")
    # brute force over ordered pairs, then deduplicate the unordered ones
    waves = [WaveIndex(x, y, a) for x in range(-2, 2) for y in range(-2, 2) for a in (-1, 0, 1)]
    seen = set()
    for wa in waves:
        for wb in waves:
            if not g.resolvable(wa.zx + wb.zx, wa.zy + wb.zy):
                continue
            key = tuple(sorted([wa, wb]))
            for ao in (-1, 0, 1):
                seen.add(key + (ao,))
    assert len(sub) == len(seen)
    for t in sub:
        assert t.wave_a <= t.wave_b
        assert t.omega == pytest.approx(triad_frequency(params, g, t.wave_a, t.wave_b, t.wave_out), abs=1e-12)


def test_enumeration_parallel_is_identical(nd_params):
    g = GridSpec.square(8)
    a = enumerate_triads(nd_params, g, omega_cutoff=30.0, jobs=1, block=7)
    b = enumerate_triads(nd_params, g, omega_cutoff=30.0, jobs=3, block=5)
    for name in ("za", "zb", "zo", "alpha", "omega"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))


def test_enumeration_sorted_and_filtered(nd_params):
    g = GridSpec.square(8)
    sub = enumerate_triads(nd_params, g, omega_cutoff=40.0)
    om = np.abs(sub.omega)
    assert np.all(np.diff(om) >= 0) and om.max() <= 40.0
    assert sub.counts()["i"] == 0
    with pytest.raises(ValueError):
        enumerate_triads(nd_params, g, omega_cutoff=-1)


def test_cutoff_is_monotone(nd_params):
    g = GridSpec.square(8)
    sizes = [len(enumerate_triads(nd_params, g, omega_cutoff=c)) for c in (0.1, 5, 20, 100)]
    assert sizes == sorted(sizes)


def test_dominant_subset_small_cutoff_is_fsf(nd_params, grid32):
    counts = enumerate_triads(nd_params, grid32, omega_cutoff=0.1).counts()
    assert set(t for t, n in counts.items() if n) == {"ii-a", "ii-b"}


def test_no_direct_fff_resonances(nd_params, grid32):
    assert len(enumerate_triads(nd_params, grid32, types=["iii"], omega_cutoff=0.0)) == 0


def test_dominant_subset_cutoff_five(nd_params, grid32):
    counts = enumerate_triads(nd_params, grid32, omega_cutoff=5.0).counts()
    present = {t for t, n in counts.items() if n}
    assert {"ii-a", "ii-b"} <= present and present & {"iii-a", "iii-b"}
    assert not present & {"iv-a", "iv-b", "v-a", "v-b", "vi"}


def test_frequency_ranges_selected_rows(nd_params, grid32):
    # published interaction table, epsilon = 0.1, 32^2
    assert frequency_range(nd_params, grid32, "i") == (0.0, 0.0)
    lo, hi = frequency_range(nd_params, grid32, "iii-a")
    assert lo == pytest.approx(0.66, abs=0.01) and hi == pytest.approx(421.77, abs=0.01)
    lo, hi = frequency_range(nd_params, grid32, "vi")
    assert lo == pytest.approx(30.0, abs=0.01) and hi == pytest.approx(547.12, abs=0.01)


def test_frequency_ranges_agree_with_enumeration(nd_params):
    g = GridSpec.square(8)
    sub = enumerate_triads(nd_params, g, types="all")
    ranges = frequency_ranges(nd_params, g, types="all")
    types = sub.types
    for t in INTERACTION_TYPES[1:]:
        om = np.abs(sub.omega[types == t])
        assert ranges[t] == pytest.approx((om.min(), om.max()), abs=1e-12)


def test_csv_columns(nd_params):
    sub = enumerate_triads(nd_params, GridSpec.square(4), types=["ii-a"], omega_cutoff=1.0)
    buf = io.StringIO()
    sub.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "zx_a,zy_a,alpha_a,zx_b,zy_b,alpha_b,zx,zy,alpha,omega,type"
    assert len(lines) == len(sub) + 1
    assert all(ln.endswith(",ii-a") for ln in lines[1:])
