import pytest

import ringsync as rs


@pytest.fixture(scope="session")
def grid33():
    return rs.grid(3, 3)


@pytest.fixture(scope="session")
def grid33_graph(grid33):
    return grid33.graph()


@pytest.fixture(scope="session")
def triangle():
    """Three mutually adjacent unit circles (odd cycle)."""
    import math
    from ringsync import Circle, Instance, Point2
    d = 2.4
    centers = [(0.0, 0.0), (d, 0.0), (d / 2.0, d * math.sqrt(3) / 2.0)]
    return Instance(mode="circle",
                    circles=[Circle(Point2(x, y)) for x, y in centers],
                    comm_range=0.5, label="triangle")


def paper_section_plan(period: float = 1.0):
    """The published seven-trajectory section-time assignment (nodes 2..8)."""
    from ringsync import SectionPlan
    T = period
    return SectionPlan(
        period=T,
        link_order={2: [7, 5, 3], 8: [5, 7, 6], 3: [4, 2], 4: [3, 6],
                    5: [8, 2], 6: [8, 4], 7: [2, 8]},
        times={2: [0.40 * T, 0.18 * T, 0.42 * T],
               8: [0.28 * T, 0.50 * T, 0.22 * T],
               3: [0.40 * T, 0.60 * T],
               4: [0.30 * T, 0.70 * T],
               5: [0.34 * T, 0.66 * T],
               6: [0.64 * T, 0.36 * T],
               7: [0.34 * T, 0.66 * T]})


CASE_STUDY_CYCLES = [[2, 7, 8, 5], [2, 5, 8, 6, 4, 3]]
