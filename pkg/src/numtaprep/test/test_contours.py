import unittest
import numpy as np

from collections import deque

from numtaprep.contours import (Contour, Rect, SpotCriteria, approx_polygon, bounding_box,
                                contour_area, detect_quad_spots, fill_contour, find_contours,
                                largest_contour_bbox, polygon_area)
from numtaprep.errors import ConfigError, EmptyContour, NoForeground, OutOfBounds


def flood_components(fg):
    """
    8-connected components by breadth-first search, in the order
    their first pixel is met by a raster scan.
    """
    h, w = fg.shape
    seen = np.zeros_like(fg, dtype=bool)
    components = []
    for y in range(h):
        for x in range(w):
            if not fg[y, x] or seen[y, x]:
                continue
            seen[y, x] = True
            queue, pixels = deque([(x, y)]), []
            while queue:
                cx, cy = queue.popleft()
                pixels.append((cx, cy))
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        nx, ny = cx + dx, cy + dy
                        if 0 <= nx < w and 0 <= ny < h and fg[ny, nx] and not seen[ny, nx]:
                            seen[ny, nx] = True
                            queue.append((nx, ny))
            components.append(pixels)
    return components

def binary(mask):
    return np.where(mask, 255, 0).astype(np.uint8)


class TestFindContours(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(21)

    def test_empty(self):
        self.assertEqual(find_contours(np.zeros((6, 6), dtype=np.uint8)), [])

    def test_filled_square(self):
        mask = np.zeros((8, 8), dtype=bool)
        mask[2:5, 3:6] = True
        contours = find_contours(binary(mask))
        self.assertEqual(len(contours), 1)
        self.assertEqual(bounding_box(contours[0]), Rect(3, 2, 3, 3))
        self.assertEqual(len(contours[0]), 8)

    def test_single_pixel(self):
        img = np.zeros((3, 3), dtype=np.uint8)
        img[1, 1] = 255
        contours = find_contours(img)
        self.assertEqual([c.as_tuples() for c in contours], [[(1, 1)]])

    def test_matches_flood_fill_oracle(self):
        for _ in range(500):
            h, w = self.rng.integers(1, 21, 2)
            mask = self.rng.random((h, w)) < self.rng.uniform(0.1, 0.9)
            contours = find_contours(binary(mask))
            components = flood_components(mask)
            self.assertEqual(len(contours), len(components))
            for c, pixels in zip(contours, components):
                members = set(pixels)
                path = c.as_tuples()
                self.assertEqual(path[0], pixels[0])
                self.assertTrue(set(path) <= members)

                xs, ys = zip(*pixels)
                self.assertEqual(bounding_box(c),
                                 Rect(min(xs), min(ys), max(xs) - min(xs) + 1, max(ys) - min(ys) + 1))
                rect = bounding_box(c)
                self.assertLessEqual(contour_area(c), rect.w * rect.h)

                if len(path) > 1:
                    pts = np.asarray(path + path[:1])
                    steps = np.abs(np.diff(pts, axis=0)).max(axis=1)
                    self.assertTrue(np.all(steps == 1))


class TestGeometry(unittest.TestCase):
    def test_area_examples(self):
        self.assertEqual(contour_area(Contour([(4, 4)])), 0.0)
        self.assertEqual(contour_area(Contour([(0, 0), (3, 0), (3, 2), (0, 2)])), 6.0)

    def test_traced_rectangle_area(self):
        mask = np.zeros((10, 10), dtype=bool)
        mask[3:7, 2:7] = True
        c, = find_contours(binary(mask))
        self.assertEqual(contour_area(c), 12.0)
        self.assertEqual(contour_area(c), polygon_area(c.as_tuples()))

    def test_bounding_box(self):
        c = Contour([(2, 3), (5, 3), (5, 7)])
        self.assertEqual(bounding_box(c), Rect(2, 3, 4, 5))
        self.assertEqual(bounding_box(c).x2, 6)
        with self.assertRaises(EmptyContour):
            bounding_box(Contour([]))


class TestApproxPolygon(unittest.TestCase):
    def test_collinear_points(self):
        c = Contour([(i, 0) for i in range(10)])
        self.assertEqual(approx_polygon(c, 1.0), [(0, 0), (9, 0)])
        self.assertEqual(approx_polygon(c, 0.0), [(0, 0), (9, 0)])

    def test_zero_epsilon_drops_collinear_midpoints(self):
        c = Contour([(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)])
        self.assertEqual(approx_polygon(c, 0.0), [(0, 0), (2, 0), (2, 2), (0, 2)])

    def test_traced_rectangle_corners(self):
        mask = np.zeros((12, 12), dtype=bool)
        mask[3:9, 2:10] = True
        c, = find_contours(binary(mask))
        self.assertEqual(set(approx_polygon(c, 0.5)), {(2, 3), (9, 3), (9, 8), (2, 8)})

    def test_vertices_shrink_with_epsilon(self):
        yy, xx = np.mgrid[:30, :30]
        mask = (xx - 14) ** 2 + (yy - 15) ** 2 <= 100
        c, = find_contours(binary(mask))
        previous = None
        for eps in (0.0, 0.3, 0.7, 1.0, 2.0, 4.0, 8.0):
            kept = set(approx_polygon(c, eps))
            self.assertTrue(kept <= set(c.as_tuples()))
            if previous is not None:
                self.assertTrue(kept <= previous)
            previous = kept

    def test_negative_epsilon(self):
        with self.assertRaises(ValueError):
            approx_polygon(Contour([(0, 0), (1, 1), (2, 0)]), -1.0)


class TestSpots(unittest.TestCase):
    def test_blank_image(self):
        self.assertEqual(detect_quad_spots(np.full((28, 28), 230, dtype=np.uint8)), [])

    def test_dark_square(self):
        img = np.full((28, 28), 230, dtype=np.uint8)
        img[10:18, 10:18] = 20
        spots = detect_quad_spots(img)
        self.assertEqual(len(spots), 1)
        self.assertEqual(bounding_box(spots[0]), Rect(10, 10, 8, 8))
        # shoelace over pixel centers: 7 x 7
        self.assertEqual(contour_area(spots[0]), 49.0)

    def test_thin_stroke_is_not_a_spot(self):
        img = np.full((28, 28), 230, dtype=np.uint8)
        img[5:7, 4:21] = 20
        img[5:21, 19:21] = 20
        img[19:21, 6:21] = 20
        img[12:21, 6:8] = 20
        self.assertEqual(detect_quad_spots(img), [])

    def test_straight_bar_is_not_a_spot(self):
        img = np.full((28, 28), 230, dtype=np.uint8)
        img[4:24, 12:16] = 20
        self.assertEqual(detect_quad_spots(img), [])

    def test_area_window(self):
        rng = np.random.default_rng(4)
        criteria = SpotCriteria()
        for _ in range(50):
            img = rng.integers(0, 256, (20, 20), dtype=np.uint8)
            for c in detect_quad_spots(img, criteria):
                frac = contour_area(c) / img.size
                self.assertGreaterEqual(frac, criteria.min_area_frac)
                self.assertLessEqual(frac, criteria.max_area_frac)

    def test_criteria_validation(self):
        with self.assertRaises(ConfigError):
            SpotCriteria(min_area_frac=0.6, max_area_frac=0.5).validate()
        with self.assertRaises(ConfigError):
            SpotCriteria(min_vertices=9).validate()


class TestFill(unittest.TestCase):
    def test_square(self):
        img = np.full((10, 10), 100, dtype=np.uint8)
        img[3:6, 3:6] = 50
        c, = find_contours(binary(img == 50))
        out = fill_contour(img, c, 255)
        expected = np.full((10, 10), 100, dtype=np.uint8)
        expected[3:6, 3:6] = 255
        np.testing.assert_array_equal(out, expected)
        self.assertTrue(np.all(img[3:6, 3:6] == 50))

    def test_fill_with_existing_value(self):
        img = np.full((10, 10), 100, dtype=np.uint8)
        img[2:7, 4:8] = 50
        c, = find_contours(binary(img == 50))
        np.testing.assert_array_equal(fill_contour(img, c, 50), img)

    def test_fills_exactly_convex_shapes(self):
        mask = np.zeros((24, 24), dtype=bool)
        for y in range(5, 15):
            x0 = 5 + (y - 5) // 2
            mask[y, x0:x0 + 8] = True
        shapes = [mask]
        rng = np.random.default_rng(6)
        yy, xx = np.mgrid[:30, :30]
        for _ in range(20):
            cx, cy = rng.integers(9, 21, 2)
            r = rng.integers(3, 9)
            shapes.append((xx - cx) ** 2 + (yy - cy) ** 2 <= r * r)
        for shape in shapes:
            c, = find_contours(binary(shape))
            out = fill_contour(np.zeros(shape.shape, dtype=np.uint8), c, 255)
            np.testing.assert_array_equal(out == 255, shape)

    def test_filled_spot_disappears(self):
        img = np.full((28, 28), 230, dtype=np.uint8)
        img[10:18, 10:18] = 20
        spot, = detect_quad_spots(img)
        self.assertEqual(detect_quad_spots(fill_contour(img, spot, 255)), [])

    def test_out_of_bounds(self):
        with self.assertRaises(OutOfBounds):
            fill_contour(np.zeros((5, 5), dtype=np.uint8), Contour([(0, 0), (10, 0)]), 255)


class TestLargestContour(unittest.TestCase):
    def test_single_square(self):
        img = np.zeros((16, 16), dtype=np.uint8)
        img[5:11, 5:11] = 255
        self.assertEqual(largest_contour_bbox(img), Rect(5, 5, 6, 6))

    def test_picks_larger_blob(self):
        img = np.zeros((20, 20), dtype=np.uint8)
        img[1:4, 1:4] = 255
        img[10:15, 8:13] = 255
        self.assertEqual(largest_contour_bbox(img), Rect(8, 10, 5, 5))

    def test_no_foreground(self):
        with self.assertRaises(NoForeground):
            largest_contour_bbox(np.zeros((5, 5), dtype=np.uint8))

if __name__ == '__main__':
    unittest.main()
