"""Clocking, relaxation, simulation, measurement, and truth checking."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

import frozen
from oracle import brute_fixed_point
from qcasim import (
    Cell,
    ClockConfig,
    ClockShape,
    ConvergenceFailure,
    GeometryParams,
    InputSchedule,
    Layout,
    Measurement,
    NoOutputError,
    OutputReading,
    Role,
    TRUTH_MARGIN,
    bistable_response,
    coupling_map,
    gamma_at,
    gen_majority,
    gen_minimal_inverter,
    gen_wire,
    measure,
    relax,
    simulate,
    truth_check,
)

CLOCK = ClockConfig()
GAMMA_LOW4 = (CLOCK.gamma_low,) * 4


def pair_layout(x, y, pinned=+1):
    """Fixed driver at the origin plus one free cell at (x, y)."""
    return Layout(
        GeometryParams(),
        [
            Cell("drv", 0.0, 0.0, Role.fixed(pinned)),
            Cell("fol", float(x), float(y), Role.normal()),
        ],
    )


class TestClockConfig:
    def test_defaults(self):
        assert CLOCK.gamma_high == 9.8e-22
        assert CLOCK.gamma_low == 3.8e-23
        assert CLOCK.samples_per_cycle == 128
        assert CLOCK.shape is ClockShape.TRAPEZOID

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"gamma_high": 3.8e-23, "gamma_low": 3.8e-23},
            {"gamma_high": 1e-23, "gamma_low": 9.8e-22},
            {"gamma_low": 0.0},
            {"gamma_low": -1e-23},
            {"samples_per_cycle": 4},
            {"samples_per_cycle": 126},
            {"samples_per_cycle": 128.0},
        ],
    )
    def test_rejects_bad_config(self, kwargs):
        with pytest.raises(ValueError):
            ClockConfig(**kwargs)


class TestGammaAt:
    def test_phase_plateaus_and_ramps(self):
        gh, gl = CLOCK.gamma_high, CLOCK.gamma_low
        assert gamma_at(CLOCK, 0, 0) == gh
        assert gamma_at(CLOCK, 0, 16) == gh + (gl - gh) * 0.5
        assert gamma_at(CLOCK, 0, 32) == gl
        assert gamma_at(CLOCK, 0, 63) == gl
        assert gamma_at(CLOCK, 0, 80) == gl + (gh - gl) * 0.5
        assert gamma_at(CLOCK, 0, 96) == gh
        assert gamma_at(CLOCK, 0, 127) == gh

    def test_zone_is_a_quarter_cycle_delay(self):
        for zone in range(4):
            for sample in range(0, 128, 7):
                assert gamma_at(CLOCK, zone, sample) == gamma_at(
                    CLOCK, 0, sample - zone * 32
                )

    def test_wraps_mod_cycle(self):
        for sample in (-5, 3, 200, 128):
            assert gamma_at(CLOCK, 2, sample) == gamma_at(CLOCK, 2, sample % 128)

    def test_monotone_on_ramps(self):
        down = [gamma_at(CLOCK, 0, s) for s in range(0, 33)]
        up = [gamma_at(CLOCK, 0, s) for s in range(64, 97)]
        assert down == sorted(down, reverse=True)
        assert up == sorted(up)

    @pytest.mark.parametrize("zone", [-1, 4, 7])
    def test_rejects_bad_zone(self, zone):
        with pytest.raises(ValueError):
            gamma_at(CLOCK, zone, 0)


class TestBistableResponse:
    def test_zero_and_reference_point(self):
        assert bistable_response(0.0) == 0.0
        assert bistable_response(1.0) == 1.0 / math.sqrt(2.0)

    @given(st.floats(min_value=-1e7, max_value=1e7, allow_nan=False))
    def test_odd_and_strictly_bounded(self, x):
        f = bistable_response(x)
        assert bistable_response(-x) == -f
        assert -1.0 < f < 1.0

    @given(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
    )
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert bistable_response(lo) <= bistable_response(hi)

    def test_matches_closed_form_oracle(self):
        for x in (-50.0, -2.0, -0.3, 0.1, 1.0, 7.2, 1e4):
            assert bistable_response(x) == brute_fixed_point(x)


class TestInputSchedule:
    def test_exhaustive_binary_order_first_label_msb(self):
        sched = InputSchedule.exhaustive(["b", "a"])
        assert sched.labels == ("a", "b")
        assert sched.vectors == (
            (("a", -1), ("b", -1)),
            (("a", -1), ("b", 1)),
            (("a", 1), ("b", -1)),
            (("a", 1), ("b", 1)),
        )

    def test_exhaustive_three_labels(self):
        sched = InputSchedule.exhaustive(["a", "b", "c"])
        assert len(sched.vectors) == 8
        assert sched.vectors[0] == (("a", -1), ("b", -1), ("c", -1))
        assert sched.vectors[-1] == (("a", 1), ("b", 1), ("c", 1))

    def test_exhaustive_needs_labels(self):
        with pytest.raises(ValueError):
            InputSchedule.exhaustive([])

    def test_explicit_orders_labels_within_vectors(self):
        sched = InputSchedule.explicit(["b", "a"], [{"b": -1, "a": 1}])
        assert sched.vectors == ((("a", 1), ("b", -1)),)

    @pytest.mark.parametrize(
        "vectors",
        [
            [{"a": 1}],                # missing b
            [{"a": 1, "b": 1, "c": 1}],  # extra label
            [{"a": 0, "b": 1}],        # bad value
            [],
        ],
    )
    def test_explicit_rejects_bad_vectors(self, vectors):
        with pytest.raises(ValueError):
            InputSchedule.explicit(["a", "b"], vectors)


class TestCouplingMap:
    def test_wire_neighbor_lists(self):
        layout = gen_wire(5)
        couplings = coupling_map(layout)
        assert [sorted(j for j, _ in row) for row in couplings] == [
            [1, 2, 3],
            [0, 2, 3, 4],
            [0, 1, 3, 4],
            [0, 1, 2, 4],
            [1, 2, 3],
        ]
        # symmetric energies
        as_dict = [{j: e for j, e in row} for row in couplings]
        assert as_dict[0][1] == as_dict[1][0] == frozen.KINK_HORIZ_20_0

    def test_respects_radius(self):
        g = GeometryParams(radius_of_effect=20.0)
        layout = Layout(
            g,
            [
                Cell("c0", 0.0, 0.0, Role.fixed(1)),
                Cell("c1", 20.0, 0.0, Role.normal()),
                Cell("c2", 40.0, 0.0, Role.normal()),
            ],
        )
        couplings = coupling_map(layout)
        assert [sorted(j for j, _ in row) for row in couplings] == [[1], [0, 2], [1]]


class TestRelax:
    def test_wire_follower_fixed_point(self):
        p, sweeps = relax(gen_wire(2), {"c0": +1}, GAMMA_LOW4)
        assert p[0] == 1.0
        assert p[1] == frozen.WIRE2_FOLLOWER_AT_GAMMA_LOW
        assert sweeps == 2

    def test_diagonal_follower_antialigns(self):
        p, _ = relax(pair_layout(20.0, 20.0), {}, GAMMA_LOW4)
        assert p[1] == frozen.DIAG_FOLLOWER_AT_GAMMA_LOW
        assert p[1] < -0.99

    def test_long_offset_follower_is_weaker(self):
        p, _ = relax(pair_layout(40.0, 20.0), {}, GAMMA_LOW4)
        assert p[1] == frozen.TWO_CELL_INVERTER_FOLLOWER
        assert -0.99 < p[1] < -TRUTH_MARGIN

    def test_all_pinned_converges_in_one_sweep(self):
        layout = Layout(
            GeometryParams(),
            [
                Cell("c0", 0.0, 0.0, Role.fixed(-1)),
                Cell("c1", 20.0, 0.0, Role.fixed(1)),
            ],
        )
        p, sweeps = relax(layout, {}, GAMMA_LOW4)
        assert (p, sweeps) == ([-1.0, 1.0], 1)

    def test_long_wire_settles_quickly(self):
        p, sweeps = relax(gen_wire(20), {"c0": +1}, GAMMA_LOW4)
        assert sweeps <= 5
        assert all(v > 0.99 for v in p)

    def test_precomputed_couplings_change_nothing(self):
        layout = gen_wire(6)
        baseline = relax(layout, {"c0": -1}, GAMMA_LOW4)
        reused = relax(layout, {"c0": -1}, GAMMA_LOW4, couplings=coupling_map(layout))
        assert reused == baseline

    def test_initial_p_must_match_length(self):
        with pytest.raises(ValueError):
            relax(gen_wire(3), {"c0": 1}, GAMMA_LOW4, initial_p=[0.0, 0.0])

    @pytest.mark.parametrize("gammas", [(1e-22,) * 3, (1e-22,) * 5, (1e-22, 0.0, 1e-22, 1e-22)])
    def test_gamma_vector_validation(self, gammas):
        with pytest.raises(ValueError):
            relax(gen_wire(2), {"c0": 1}, gammas)

    def test_assignment_validation(self):
        wire = gen_wire(3)
        with pytest.raises(ValueError):
            relax(wire, {"nope": 1}, GAMMA_LOW4)
        with pytest.raises(ValueError):
            relax(wire, {"c0": 0}, GAMMA_LOW4)
        with pytest.raises(ValueError):
            relax(wire, {}, GAMMA_LOW4)  # input c0 unassigned

    def test_assignment_may_not_contradict_fixed(self):
        layout = pair_layout(20.0, 0.0, pinned=+1)
        p, _ = relax(layout, {"drv": +1}, GAMMA_LOW4)  # agreeing is fine
        assert p[0] == 1.0
        with pytest.raises(ValueError):
            relax(layout, {"drv": -1}, GAMMA_LOW4)

    def test_failure_carries_residual(self):
        with pytest.raises(ConvergenceFailure) as exc:
            relax(gen_wire(20), {"c0": +1}, GAMMA_LOW4, max_iters=1)
        assert exc.value.residual > 0.0
        assert exc.value.vector_index is None
        assert exc.value.sample_index is None


def anti_ordered_chain(n_cells: int) -> Layout:
    """Wire listed farthest-from-driver first, coupled only pitch-to-pitch.

    Gauss-Seidel in layout order can move the polarization front only one
    cell per sweep here, so long chains exhaust max_iters honestly.
    """
    g = GeometryParams(radius_of_effect=20.0)
    cells = [
        Cell(f"c{i}", (n_cells - 1 - i) * 20.0, 0.0, Role.normal())
        for i in range(n_cells - 1)
    ]
    cells.append(Cell("drv", 0.0, 0.0, Role.input("a")))
    return Layout(g, cells)


class TestSimulate:
    def test_wire_follows_input(self):
        layout = gen_wire(5)
        trace = simulate(layout, CLOCK, InputSchedule.exhaustive(["a"]))
        assert len(trace.samples) == 256
        assert trace.cell_ids == ("c0", "c1", "c2", "c3", "c4")
        steady0 = trace.samples[63].polarizations
        steady1 = trace.samples[128 + 63].polarizations
        assert all(p < -0.99 for p in steady0)
        assert all(p > 0.99 for p in steady1)

    def test_minimal_inverter_inverts(self):
        layout = gen_minimal_inverter(0)
        trace = simulate(layout, CLOCK, InputSchedule.exhaustive(["a"]))
        m = measure(trace, layout)
        assert m.reading("b", 0).steady == frozen.MINIMAL_STEADY[3]
        assert m.reading("b", 1).steady == -frozen.MINIMAL_STEADY[3]

    def test_majority_vote(self):
        layout = gen_majority()
        sched = InputSchedule.explicit(
            ["a", "b", "c"],
            [{"a": 1, "b": 1, "c": -1}, {"a": -1, "b": 1, "c": -1}],
        )
        m = measure(simulate(layout, CLOCK, sched), layout)
        assert m.reading("m", 0).steady > 0.99
        assert m.reading("m", 1).steady < -0.99

    def test_vector_negation_negates_every_sample(self):
        # the update rule is odd in the polarization vector, exactly, so
        # flipping the one input mirrors the whole trace bit for bit
        layout = gen_minimal_inverter(1)
        trace = simulate(layout, CLOCK, InputSchedule.exhaustive(["a"]))
        n = CLOCK.samples_per_cycle
        for s in range(n):
            lo, hi = trace.samples[s], trace.samples[n + s]
            assert hi.polarizations == tuple(-p for p in lo.polarizations)
            assert hi.iterations == lo.iterations

    def test_free_cells_stay_strictly_inside_unit_interval(self):
        layout = gen_minimal_inverter(0)
        trace = simulate(layout, CLOCK, InputSchedule.exhaustive(["a"]))
        for sample in trace.samples:
            pinned, *free = sample.polarizations
            assert abs(pinned) == 1.0
            assert all(-1.0 < p < 1.0 for p in free)

    def test_trace_records_clock_state(self):
        layout = gen_wire(2)
        trace = simulate(layout, CLOCK, InputSchedule.exhaustive(["a"]))
        for sample in trace.samples:
            assert sample.gammas == tuple(
                gamma_at(CLOCK, z, sample.sample_index) for z in range(4)
            )
            assert sample.iterations >= 1
        assert [s.vector_index for s in trace.samples] == [0] * 128 + [1] * 128

    def test_is_deterministic(self):
        layout = gen_majority()
        sched = InputSchedule.exhaustive(["a", "b", "c"])
        assert simulate(layout, CLOCK, sched) == simulate(layout, CLOCK, sched)

    def test_schedule_labels_must_match_layout(self):
        with pytest.raises(ValueError):
            simulate(gen_wire(3), CLOCK, InputSchedule.exhaustive(["z"]))
        with pytest.raises(ValueError):
            simulate(gen_majority(), CLOCK, InputSchedule.exhaustive(["a", "b"]))

    def test_failure_reports_vector_and_sample(self):
        layout = anti_ordered_chain(1101)
        sched = InputSchedule.explicit(["a"], [{"a": 1}])
        with pytest.raises(ConvergenceFailure) as exc:
            simulate(layout, CLOCK, sched)
        assert exc.value.vector_index == 0
        assert exc.value.sample_index == 0
        assert exc.value.residual > 0.1
        assert "vector 0" in str(exc.value)


class TestMeasure:
    def test_steady_reads_last_hold_sample_of_output_zone(self):
        layout = gen_wire(4)
        trace = simulate(layout, CLOCK, InputSchedule.exhaustive(["a"]))
        m = measure(trace, layout)
        out_index = 3
        for vi in range(2):
            r = m.reading("b", vi)
            assert r.steady == trace.samples[vi * 128 + 63].polarizations[out_index]
            assert r.max_abs >= abs(r.steady)

    def test_zone_shifts_the_steady_sample(self):
        # an output in zone 3 holds around the wrap, so its last hold
        # sample lands a quarter cycle into the vector
        layout = Layout(
            GeometryParams(),
            [
                Cell("c0", 0.0, 0.0, Role.input("a")),
                Cell("c1", 20.0, 0.0, Role.output("q"), zone=3),
            ],
        )
        trace = simulate(layout, CLOCK, InputSchedule.exhaustive(["a"]))
        m = measure(trace, layout)
        assert m.reading("q", 0).steady == trace.samples[31].polarizations[1]
        assert m.reading("q", 1).steady == trace.samples[128 + 31].polarizations[1]

    def test_requires_an_output(self):
        layout = Layout(
            GeometryParams(),
            [
                Cell("c0", 0.0, 0.0, Role.input("a")),
                Cell("c1", 20.0, 0.0, Role.normal()),
            ],
        )
        trace = simulate(layout, CLOCK, InputSchedule.exhaustive(["a"]))
        with pytest.raises(NoOutputError):
            measure(trace, layout)

    def test_reading_lookup_raises_on_unknown(self):
        layout = gen_wire(2)
        m = measure(simulate(layout, CLOCK, InputSchedule.exhaustive(["a"])), layout)
        with pytest.raises(KeyError):
            m.reading("b", 5)
        with pytest.raises(KeyError):
            m.reading("zz", 0)


class TestTruthCheck:
    def run(self, layout, labels):
        trace = simulate(layout, CLOCK, InputSchedule.exhaustive(labels))
        return measure(trace, layout)

    def test_wire_is_identity_not_inversion(self):
        m = self.run(gen_wire(3), ["a"])
        as_id = truth_check(m, lambda bits: bits["a"])
        as_not = truth_check(m, lambda bits: not bits["a"])
        assert as_id.passed
        assert not as_not.passed
        assert [v.passed for v in as_not.verdicts] == [False, False]

    def test_two_cell_inverter_clears_the_margin(self):
        m = self.run(gen_minimal_inverter(-1), ["a"])
        result = truth_check(m, lambda bits: not bits["a"])
        assert result.passed
        steadies = [v.outputs[0].steady for v in result.verdicts]
        assert steadies == [
            frozen.MINIMAL_STEADY[2],
            -frozen.MINIMAL_STEADY[2],
        ]

    def test_majority_truth_table(self):
        m = self.run(gen_majority(), ["a", "b", "c"])
        result = truth_check(m, lambda bits: sum(bits.values()) >= 2)
        assert result.passed
        assert len(result.verdicts) == 8
        for verdict in result.verdicts:
            want = sum(v > 0 for _, v in verdict.inputs) >= 2
            assert verdict.outputs[0].expected is want

    def test_margin_rule(self):
        vectors = ((("a", -1),), (("a", 1),))
        readings = (
            OutputReading("b", 0, 0.49, 0.8),   # right sign, under margin
            OutputReading("b", 1, -0.51, 0.9),  # clears margin
        )
        m = Measurement(vectors=vectors, readings=readings)
        result = truth_check(m, lambda bits: not bits["a"])
        assert [v.passed for v in result.verdicts] == [False, True]
        assert result.verdicts[0].outputs[0].steady == 0.49
        assert not result.passed
