"""
Test point process sampling and JM cell geometry
"""
import math
from unittest import mock

import numpy as np

from jm_uplink import geometry
from jm_uplink.exceptions import DomainError, RejectionBudgetExceeded, WindowTooSmall
from jm_uplink.geometry import (
    ORIGIN,
    BsProcess,
    Point2,
    SimulationWindow,
    disk_inside_cell,
    estimate_cell_area,
    is_in_jm_cell,
    jm_membership,
    nearest_neighbour_distance,
    sample_ppp,
    sample_uniform_in_disk,
    sample_uniform_in_jm_cell,
    sample_uniform_in_jm_cells,
)
from jm_uplink.streams import Purpose, stream

from .base import LAMBDA0, NumericTestCase


def pair(distance=100.0):
    return BsProcess(np.array([[distance, 0.0], [0.0, 0.0]]), LAMBDA0)


class TestPoint2(NumericTestCase):
    def test_non_finite__rejected(self):
        with self.assertRaises(ValueError):
            Point2(math.inf, 0.0)

    def test_distance__euclidean(self):
        self.assertEqual(Point2(3.0, 0.0).distance_to(Point2(0.0, 4.0)), 5.0)


class TestSimulationWindow(NumericTestCase):
    def test_for_density__ten_spacings(self):
        window = SimulationWindow.for_density(LAMBDA0)
        self.assertAlmostEqual(window.half_width, 5000.0)
        self.assertAlmostEqual(window.area, 1e8)

    def test_check_density__small_window__raises(self):
        window = SimulationWindow(4000.0)
        with self.assertRaises(WindowTooSmall):
            window.check_density(LAMBDA0)

    def test_check_density__large_window__passes(self):
        SimulationWindow(6000.0).check_density(LAMBDA0)

    def test_contains__boundary_inclusive(self):
        window = SimulationWindow(1.0)
        inside = window.contains(np.array([[1.0, -1.0], [1.5, 0.0]]))
        self.assertEqual(list(inside), [True, False])


class TestBsProcess(NumericTestCase):
    def test_origin__moved_last(self):
        process = BsProcess(np.array([[0.0, 0.0], [10.0, 0.0]]), LAMBDA0)
        self.assertEqual(process.points[-1].tolist(), [0.0, 0.0])
        self.assertEqual(process.others.tolist(), [[10.0, 0.0]])

    def test_tree__built_on_creation(self):
        process = BsProcess(np.array([[10.0, 0.0], [0.0, 0.0]]), LAMBDA0)
        self.assertIn("tree", vars(process))
        self.assertEqual(process.tree.n, 2)
        self.assertEqual(process.tree.data.tolist(), process.points.tolist())
        self.assertNotIn("tree", repr(process))

    def test_no_origin__rejected(self):
        with self.assertRaises(ValueError):
            BsProcess(np.array([[1.0, 0.0]]), LAMBDA0)

    def test_two_origins__rejected(self):
        with self.assertRaises(ValueError):
            BsProcess(np.zeros((2, 2)), LAMBDA0)

    def test_index_of__unknown_point__raises(self):
        with self.assertRaises(DomainError):
            pair().index_of(Point2(5.0, 5.0))

    def test_index_of__origin(self):
        process = pair()
        self.assertEqual(process.index_of(ORIGIN), process.origin_index)


class TestSamplePpp(NumericTestCase):
    def test_count__near_expected(self):
        window = SimulationWindow.for_density(LAMBDA0)
        process = sample_ppp(LAMBDA0, window, seed=(3, 0, Purpose.BASE_STATIONS))
        # 400 expected; six standard deviations either side
        self.assertWithin(len(process) - 1, 400, 120)
        self.assertTrue(window.contains(process.points).all())

    def test_same_key__same_points(self):
        window = SimulationWindow.for_density(LAMBDA0)
        first = sample_ppp(LAMBDA0, window, seed=(9, 4, Purpose.BASE_STATIONS))
        second = sample_ppp(LAMBDA0, window, seed=(9, 4, Purpose.BASE_STATIONS))
        np.testing.assert_array_equal(first.points, second.points)

    def test_small_window__raises(self):
        with self.assertRaises(WindowTooSmall):
            sample_ppp(LAMBDA0, SimulationWindow(1000.0), seed=1)

    def test_zero_density__raises(self):
        with self.assertRaises(DomainError):
            sample_ppp(0.0, SimulationWindow(1000.0), seed=1)


class TestMembership(NumericTestCase):
    def test_beyond_radius__outside(self):
        self.assertFalse(is_in_jm_cell(Point2(0.0, 60.0), ORIGIN, pair(), 50.0))

    def test_closer_to_other_bs__outside(self):
        self.assertFalse(is_in_jm_cell(Point2(60.0, 0.0), ORIGIN, pair(), 100.0))

    def test_own_side__inside(self):
        self.assertTrue(is_in_jm_cell(Point2(40.0, 10.0), ORIGIN, pair(), 100.0))

    def test_bisector__in_both_cells(self):
        process = pair()
        point = Point2(50.0, 20.0)
        self.assertTrue(is_in_jm_cell(point, ORIGIN, process, 100.0))
        self.assertTrue(is_in_jm_cell(point, Point2(100.0, 0.0), process, 100.0))

    def test_vectorised__matches_scalar(self):
        process = pair()
        points = np.array([[10.0, 0.0], [70.0, 0.0], [-99.0, 0.0], [0.0, -101.0]])
        flags = jm_membership(points, (0.0, 0.0), process, 100.0)
        self.assertEqual(flags.tolist(), [True, False, True, False])


class TestUniformSampling(NumericTestCase):
    def test_disk__mean_square_radius(self):
        rng = stream(5)
        points = sample_uniform_in_disk((0.0, 0.0), 2.0, 200000, rng)
        radii = np.hypot(points[:, 0], points[:, 1])
        self.assertTrue((radii <= 2.0).all())
        self.assertWithin(np.mean(radii ** 2), 2.0, 0.02)

    def test_jm_cell__point_inside(self):
        process = pair()
        for seed in range(20):
            point = sample_uniform_in_jm_cell(ORIGIN, process, 100.0, seed)
            self.assertTrue(is_in_jm_cell(point, ORIGIN, process, 100.0))

    def test_jm_cells__every_cell_sampled(self):
        window = SimulationWindow.for_density(LAMBDA0)
        process = sample_ppp(LAMBDA0, window, seed=11)
        r_c = 0.5 / math.sqrt(LAMBDA0)
        points = sample_uniform_in_jm_cells(process, r_c, stream(11, purpose=1))
        self.assertEqual(points.shape, (len(process), 2))
        for index in (0, len(process) // 2, process.origin_index):
            bs = Point2.from_array(process.points[index])
            self.assertTrue(is_in_jm_cell(Point2.from_array(points[index]), bs, process, r_c))

    def test_jm_cells__indices_subset(self):
        process = pair()
        points = sample_uniform_in_jm_cells(process, 100.0, stream(2), indices=[1])
        self.assertEqual(points.shape, (1, 2))
        self.assertLessEqual(points[0, 0], 50.0)

    def test_jm_cells__single_bs__uniform_in_disk(self):
        process = BsProcess(np.zeros((1, 2)), LAMBDA0)
        points = sample_uniform_in_jm_cells(
            process, 100.0, stream(5), indices=np.zeros(4000, dtype=int)
        )
        distances = np.hypot(points[:, 0], points[:, 1])
        self.assertLessEqual(distances.max(), 100.0)
        self.assertWithin(distances.mean(), 200.0 / 3, 1.5)

    @mock.patch.object(geometry, "REJECTION_BUDGET", 0)
    def test_jm_cell__budget_exhausted__raises(self):
        with self.assertRaises(RejectionBudgetExceeded):
            sample_uniform_in_jm_cell(ORIGIN, pair(), 100.0, 1)

    @mock.patch.object(geometry, "REJECTION_BUDGET", 0)
    def test_jm_cells__budget_exhausted__raises(self):
        with self.assertRaises(RejectionBudgetExceeded):
            sample_uniform_in_jm_cells(pair(), 100.0, stream(1))


class TestCellArea(NumericTestCase):
    def test_isolated_bs__full_disk(self):
        area = estimate_cell_area(ORIGIN, pair(1000.0), 100.0, 1024, seed=1)
        self.assertEqual(area, math.pi * 100.0 ** 2)

    def test_segment_cut__matches_geometry(self):
        # Disk of radius 100 less the cap beyond x = 50: 25274 m^2
        area = estimate_cell_area(ORIGIN, pair(100.0), 100.0, 65536, seed=4)
        self.assertWithin(area, 25274.0, 250.0)

    def test_no_probes__raises(self):
        with self.assertRaises(DomainError):
            estimate_cell_area(ORIGIN, pair(), 100.0, 0, seed=1)


class TestNearestNeighbour(NumericTestCase):
    def test_distance(self):
        self.assertEqual(nearest_neighbour_distance(ORIGIN, pair(250.0)), 250.0)

    def test_disk_inside__strictly_beyond_twice_radius(self):
        self.assertTrue(disk_inside_cell(ORIGIN, pair(250.0), 100.0))
        self.assertFalse(disk_inside_cell(ORIGIN, pair(200.0), 100.0))
