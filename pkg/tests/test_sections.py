"""The published seven-trajectory section-time table, loaded verbatim."""

import math

import pytest

import ringsync as rs
from conftest import CASE_STUDY_CYCLES, paper_section_plan
from ringsync.errors import InfeasibleSectionTimesError


def test_period_sums_exact():
    T = 1.0
    plan = paper_section_plan(T)
    for traj, times in plan.times.items():
        assert abs(math.fsum(times) - T) <= 1e-12 * T


def test_both_cycles_close_with_z_two():
    plan = paper_section_plan(1.0)
    zs = rs.validate_section_plan(plan, CASE_STUDY_CYCLES, tol=1e-12)
    assert zs == [2, 2]


def test_cycle_sums_exact_values():
    T = 1.0
    plan = paper_section_plan(T)
    # 4-cycle: t2(7->5) + t7(8->2) + t8(5->7) + t5(2->8)
    s1 = (plan.time_between(2, 7, 5) + plan.time_between(7, 8, 2)
          + plan.time_between(8, 5, 7) + plan.time_between(5, 2, 8))
    assert abs(s1 - 2.0 * T) <= 1e-12 * T
    # 6-cycle: t2(5->3) + t5(8->2) + t8(6->5) + t6(4->8) + t4(3->6) + t3(2->4)
    s2 = (plan.time_between(2, 5, 3) + plan.time_between(5, 8, 2)
          + plan.time_between(8, 6, 5) + plan.time_between(6, 4, 8)
          + plan.time_between(4, 3, 6) + plan.time_between(3, 2, 4))
    assert abs(s2 - 2.0 * T) <= 1e-12 * T


def test_complement_equations():
    # the reverse-direction sums must close with (k - z) periods
    T = 1.0
    plan = paper_section_plan(T)
    s1c = (plan.time_between(2, 5, 7) + plan.time_between(7, 2, 8)
           + plan.time_between(8, 7, 5) + plan.time_between(5, 8, 2))
    assert abs(s1c - (4 - 2) * T) <= 1e-12 * T
    s2c = (plan.time_between(2, 3, 5) + plan.time_between(5, 2, 8)
           + plan.time_between(8, 5, 6) + plan.time_between(6, 8, 4)
           + plan.time_between(4, 6, 3) + plan.time_between(3, 4, 2))
    assert abs(s2c - (6 - 2) * T) <= 1e-12 * T


def test_validator_rejects_broken_period():
    plan = paper_section_plan(1.0)
    plan.times[3][0] += 0.05
    with pytest.raises(InfeasibleSectionTimesError):
        rs.validate_section_plan(plan, CASE_STUDY_CYCLES)


def test_validator_rejects_broken_cycle():
    plan = paper_section_plan(1.0)
    # shuffle time between sections of trajectory 2: period sum is kept but
    # the 4-cycle equation breaks
    plan.times[2][0] += 0.05
    plan.times[2][1] -= 0.05
    with pytest.raises(InfeasibleSectionTimesError) as exc:
        rs.validate_section_plan(plan, CASE_STUDY_CYCLES)
    assert exc.value.cycles == [CASE_STUDY_CYCLES[0]]


def test_period_scales_linearly():
    plan = paper_section_plan(250.0)
    zs = rs.validate_section_plan(plan, CASE_STUDY_CYCLES, tol=1e-12)
    assert zs == [2, 2]
