import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vizrec.discretize import Discretizer, MdlpConfig, fit, mdlp_cuts

from oracles import mdlp_cuts_oracle

PERMISSIVE = MdlpConfig(min_split_fraction=0.01, min_interval_fraction=0.01)


class TestMdlpCuts:
    def test_two_separated_blocks_single_cut(self):
        values = [1, 2, 3, 101, 102, 103]
        labels = ["bar"] * 3 + ["line"] * 3
        assert mdlp_cuts(values, labels, PERMISSIVE) == [52.0]
        # brute force confirms 52.0 is the max-gain boundary and is accepted
        assert mdlp_cuts_oracle(values, labels, 0.01, 0.01) == [52.0]

    def test_identical_labels_no_cuts(self):
        assert mdlp_cuts([1, 2, 3, 4], ["bar"] * 4, PERMISSIVE) == []

    def test_child_fraction_constraint(self):
        strict = MdlpConfig(min_split_fraction=0.5, min_interval_fraction=0.5)
        # 3/3 children are exactly half of N=6: allowed
        assert mdlp_cuts([1, 2, 3, 101, 102, 103], ["bar"] * 3 + ["line"] * 3, strict) == [52.0]
        # a 2/4 split candidate is rejected by the child constraint
        assert mdlp_cuts([1, 2, 101, 102, 103, 104], ["bar"] * 2 + ["line"] * 4, strict) == []

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            mdlp_cuts([1.0, 2.0], ["bar"], PERMISSIVE)

    def test_empty_input(self):
        with pytest.raises(ValueError, match="empty"):
            mdlp_cuts([], [], PERMISSIVE)

    def test_oracle_equivalence_on_random_instances(self):
        rng = np.random.default_rng(2024)
        configs = [
            MdlpConfig(0.1, 0.05),
            MdlpConfig(0.2, 0.1),
            MdlpConfig(0.3, 0.05),
        ]
        start = time.perf_counter()
        for trial in range(200):
            n = int(rng.integers(1, 65))
            n_classes = int(rng.integers(1, 4))
            # small value grid so ties and boundary groups actually occur
            values = rng.integers(0, 12, size=n).astype(float)
            labels = [f"c{int(i)}" for i in rng.integers(0, n_classes, size=n)]
            cfg = configs[trial % len(configs)]
            got = mdlp_cuts(values, labels, cfg)
            want = mdlp_cuts_oracle(
                values, labels, cfg.min_split_fraction, cfg.min_interval_fraction
            )
            assert got == pytest.approx(want), "trial %d: %s vs %s" % (trial, got, want)
        assert time.perf_counter() - start < 10.0


class TestFit:
    def test_separable_plus_constant(self):
        labels = ["bar"] * 6 + ["line"] * 6
        matrix = {
            "sep": np.array([1, 2, 3, 1, 2, 3, 50, 51, 52, 50, 51, 52], dtype=float),
            "const": np.zeros(12),
        }
        disc = fit(matrix, labels, PERMISSIVE)
        assert disc.n_intervals("sep") == 2
        assert disc.n_intervals("const") == 1

    def test_empty_matrix(self):
        disc = fit({}, [], PERMISSIVE)
        assert disc.feature_ids() == []

    def test_interval_cap_from_fraction(self):
        # 40 well-separated label blocks cannot produce more than 20 intervals
        # when every interval must hold 5% of the samples
        rng = np.random.default_rng(1)
        values, labels = [], []
        for block in range(40):
            values.extend([block * 10.0 + d for d in range(5)])
            labels.extend(["bar" if block % 2 else "line"] * 5)
        disc = fit({"f": np.asarray(values)}, labels, MdlpConfig(0.1, 0.05))
        assert disc.n_intervals("f") <= 20

    @given(
        frac=st.sampled_from([0.05, 0.1, 0.25, 0.5]),
        seed=st.integers(0, 1000),
    )
    @settings(max_examples=25, deadline=None)
    def test_interval_count_bounded_by_fraction(self, frac, seed):
        rng = np.random.default_rng(seed)
        n = 60
        values = rng.integers(0, 30, size=n).astype(float)
        labels = ["c%d" % int(i) for i in rng.integers(0, 3, size=n)]
        cfg = MdlpConfig(min_split_fraction=frac, min_interval_fraction=frac)
        cuts = mdlp_cuts(values, labels, cfg)
        assert len(cuts) + 1 <= math.floor(1 / frac)


class TestAssign:
    def _disc(self, cuts):
        return Discretizer(cuts={"f": tuple(cuts)})

    def test_below_cut(self):
        assert self._disc([52.0]).assign(3.0, "f") == 0

    def test_on_cut_goes_right(self):
        assert self._disc([52.0]).assign(52.0, "f") == 1

    def test_open_upper_tail(self):
        assert self._disc([10.0, 20.0]).assign(1e9, "f") == 2

    def test_unknown_feature(self):
        with pytest.raises(KeyError, match="not fitted"):
            self._disc([1.0]).assign(0.0, "g")

    def test_interval_bounds_cover_line(self):
        disc = self._disc([10.0, 20.0])
        assert disc.interval_bounds("f", 0) == (-math.inf, 10.0)
        assert disc.interval_bounds("f", 1) == (10.0, 20.0)
        assert disc.interval_bounds("f", 2) == (20.0, math.inf)

    @given(
        cuts=st.lists(st.floats(-100, 100), min_size=0, max_size=6, unique=True),
        values=st.lists(st.floats(allow_nan=False, allow_infinity=False, width=32), min_size=2, max_size=10),
    )
    @settings(max_examples=80, deadline=None)
    def test_total_and_monotone(self, cuts, values):
        disc = Discretizer(cuts={"f": tuple(sorted(cuts))})
        m = disc.n_intervals("f")
        assigned = [disc.assign(v, "f") for v in sorted(values)]
        assert all(0 <= a < m for a in assigned)
        assert assigned == sorted(assigned)

    def test_json_round_trip(self):
        disc = Discretizer(cuts={"a": (1.5, 2.5), "b": ()})
        again = Discretizer.from_json(disc.to_json())
        assert again.cuts == disc.cuts
