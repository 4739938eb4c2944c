import os
import tempfile
import unittest
import numpy as np
import yaml

from numtaprep.contours import Rect
from numtaprep.dataset import SynthConfig, generate_synthetic, spot_region_mask
from numtaprep.errors import BlankImage, ConfigError, ItemError
from numtaprep.pipeline import (PipelineConfig, preprocess, preprocess_batch, raw_baseline,
                                write_trace)
from numtaprep.raster import invert, is_binary

# 3 px strokes drawn at 64 px come out about one pixel wide at 28 px,
# and the 3x3 median erases lines that thin
BOLD_STROKE = 6.0


def bold_synth(**kwargs) -> SynthConfig:
    return SynthConfig(stroke_width=BOLD_STROKE, **kwargs)


def hidden_stroke_fixture():
    """
    Light page with a 12x12 dark square covering part of a stroke,
    and an uncovered hook of the same stroke next to it.
    """
    img = np.full((28, 28), 230, dtype=np.uint8)
    stroke = np.zeros((28, 28), dtype=bool)
    stroke[9:19, 12:14] = True
    stroke[3:13, 22:24] = True
    stroke[3:5, 19:22] = True
    square = np.zeros((28, 28), dtype=bool)
    square[8:20, 8:20] = True
    img[stroke | square] = 20
    return img, stroke, square

def cross_image(size=40):
    img = np.full((size, size), 235, dtype=np.uint8)
    img[8:32, 18:22] = 15
    img[18:22, 8:32] = 15
    return img

def fg_extent(binary):
    ys, xs = np.nonzero(binary)
    return xs.max() - xs.min() + 1, ys.max() - ys.min() + 1


class TestConfig(unittest.TestCase):
    def test_defaults(self):
        cfg = PipelineConfig()
        self.assertEqual(cfg.target_size, 28)
        self.assertEqual(cfg.median_k, 3)
        self.assertTrue(cfg.spot_removal_enabled)

    def test_validation(self):
        with self.assertRaises(ConfigError):
            PipelineConfig(median_k=4)
        with self.assertRaises(ConfigError):
            PipelineConfig(target_size=4)
        with self.assertRaises(ConfigError):
            PipelineConfig(threshold_mode='adaptive')
        with self.assertRaises(ConfigError):
            PipelineConfig.from_dict({'target_sise': 28})

    def test_dict_round_trip(self):
        cfg = PipelineConfig.from_dict({'median_k': 5}, {'max_aspect': 2.5})
        self.assertEqual(PipelineConfig.from_dict(**cfg.to_dict()), cfg)


class TestPreprocess(unittest.TestCase):
    def test_cross(self):
        out, trace = preprocess(cross_image())
        self.assertEqual(out.shape, (28, 28))
        self.assertTrue(is_binary(out))
        self.assertEqual(max(fg_extent(out)), 24)
        # margin stays background
        self.assertFalse(out[:2].any() or out[-2:].any() or out[:, :2].any() or out[:, -2:].any())
        self.assertEqual(trace.spots, [])
        self.assertIsInstance(trace.crop, Rect)

    def test_rgb_and_gray_agree(self):
        gray = cross_image()
        rgb = np.repeat(gray[:, :, None], 3, axis=2)
        np.testing.assert_array_equal(preprocess(rgb)[0], preprocess(gray)[0])

    def test_deterministic(self):
        img = np.random.default_rng(1).integers(0, 256, (50, 37, 3), dtype=np.uint8)
        first, _ = preprocess(img)
        second, _ = preprocess(img)
        np.testing.assert_array_equal(first, second)

    def test_random_inputs_meet_contract(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            h, w = rng.integers(8, 90, 2)
            shape = (h, w, 3) if rng.random() < 0.5 else (h, w)
            try:
                out, _ = preprocess(rng.integers(0, 256, shape, dtype=np.uint8))
            except BlankImage:
                continue
            self.assertEqual(out.shape, (28, 28))
            self.assertTrue(is_binary(out))

    def test_blank_page(self):
        with self.assertRaises(BlankImage):
            preprocess(np.full((28, 28), 230, dtype=np.uint8))

    def test_otsu_mode(self):
        out, trace = preprocess(cross_image(), PipelineConfig(threshold_mode='otsu'))
        self.assertGreater(trace.threshold.level, 15)
        self.assertLessEqual(trace.threshold.level, 235)
        self.assertEqual(max(fg_extent(out)), 24)

    def test_snapshots(self):
        _, trace = preprocess(cross_image())
        names = [name for name, _ in trace.snapshots()]
        self.assertEqual(names, ['00_resize', '01_gray', '02_blur', '03_spots', '04_binary', '05_final'])
        _, trace = preprocess(cross_image(), snapshots=False)
        self.assertEqual(trace.snapshots(), [])

    def test_write_trace(self):
        _, trace = preprocess(cross_image())
        with tempfile.TemporaryDirectory() as tmp:
            write_trace(trace, os.path.join(tmp, 'item'))
            files = sorted(os.listdir(os.path.join(tmp, 'item')))
            self.assertIn('05_final.pgm', files)
            self.assertIn('trace.yaml', files)
            with open(os.path.join(tmp, 'item', 'trace.yaml')) as f:
                summary = yaml.safe_load(f)
            self.assertEqual(summary['threshold_level'], 127)
            self.assertEqual(summary['spots'], [])


class TestHiddenStroke(unittest.TestCase):
    def test_spot_erased_stroke_kept(self):
        img, stroke, square = hidden_stroke_fixture()
        self.assertGreaterEqual(np.count_nonzero(stroke & square) / np.count_nonzero(stroke), 0.4)

        out, trace = preprocess(img)
        self.assertEqual(len(trace.spots), 1)
        self.assertTrue(np.all(trace.despotted[9:19, 12:14] == 255))
        self.assertTrue(out.any())
        # only the uncovered hook is left as foreground
        self.assertFalse(trace.binary[8:20, 8:20].any())
        self.assertTrue(trace.binary[5:11, 22:24].all())

    def test_without_spot_removal_the_square_wins(self):
        img, _, _ = hidden_stroke_fixture()
        _, trace = preprocess(img, PipelineConfig(spot_removal_enabled=False))
        self.assertEqual(trace.spots, [])
        self.assertEqual(trace.crop.w, 12)


class TestRawBaseline(unittest.TestCase):
    def test_shapes(self):
        rng = np.random.default_rng(0)
        rgb = rng.integers(0, 256, (40, 30, 3), dtype=np.uint8)
        self.assertEqual(raw_baseline(rgb).shape, (28, 28))
        gray = rng.integers(0, 256, (28, 28), dtype=np.uint8)
        np.testing.assert_array_equal(raw_baseline(gray), gray)

    def test_constant(self):
        img = np.full((33, 20, 3), 90, dtype=np.uint8)
        self.assertTrue(np.all(raw_baseline(img) == 90))


class TestBatch(unittest.TestCase):
    def test_empty(self):
        self.assertEqual(preprocess_batch([]), [])

    def test_failures_keep_their_place(self):
        blank = np.full((28, 28), 230, dtype=np.uint8)
        results = preprocess_batch([cross_image(), blank, cross_image(30)], names=['a', 'b', 'c'])
        self.assertEqual(len(results), 3)
        self.assertIsInstance(results[1], ItemError)
        self.assertEqual(results[1].index, 1)
        self.assertEqual(results[1].filename, 'b')
        self.assertEqual(results[1].kind, 'BlankImage')
        np.testing.assert_array_equal(results[0], preprocess(cross_image())[0])
        np.testing.assert_array_equal(results[2], preprocess(cross_image(30))[0])

    def test_workers_do_not_change_results(self):
        ds = generate_synthetic(bold_synth(count=24, seed=3))
        single = preprocess_batch(ds.images)
        pooled = preprocess_batch(ds.images, workers=2)
        self.assertEqual(len(single), len(pooled))
        for a, b in zip(single, pooled):
            if isinstance(a, ItemError):
                self.assertEqual(a, b)
            else:
                np.testing.assert_array_equal(a, b)

    def test_traces(self):
        results = preprocess_batch([cross_image()], with_traces=True, snapshots=True)
        out, trace = results[0]
        np.testing.assert_array_equal(out, trace.final)


class TestSyntheticCorpus(unittest.TestCase):
    def test_output_contract(self):
        ds = generate_synthetic(bold_synth(count=1000, seed=101))
        results = preprocess_batch(ds.images)
        ok = [r for r in results if not isinstance(r, ItemError)]
        self.assertGreaterEqual(len(ok), 950)
        for out in ok:
            self.assertEqual(out.shape, (28, 28))
            self.assertTrue(is_binary(out))
            self.assertGreaterEqual(max(fg_extent(out)), 24)

    def test_clean_glyphs_are_never_blank(self):
        cfg = bold_synth(count=100, seed=5, salt_pepper_rate=0, spot_probability=0,
                         invert_probability=0, grid_lines_probability=0)
        results = preprocess_batch(generate_synthetic(cfg).images)
        self.assertFalse(any(isinstance(r, ItemError) for r in results))

    def test_inversion_does_not_change_output(self):
        cfg = bold_synth(count=200, seed=17, size=28, spot_probability=0)
        pipeline = PipelineConfig(spot_removal_enabled=False)
        for it in generate_synthetic(cfg):
            try:
                expected, _ = preprocess(it.image, pipeline)
            except BlankImage:
                with self.assertRaises(BlankImage):
                    preprocess(invert(it.image), pipeline)
                continue
            actual, _ = preprocess(invert(it.image), pipeline)
            np.testing.assert_array_equal(actual, expected, err_msg=it.filename)

    def test_spot_removal(self):
        spotted = generate_synthetic(bold_synth(count=200, seed=29, spot_probability=1.0))
        control = generate_synthetic(bold_synth(count=200, seed=29, spot_probability=0.0))
        no_removal = PipelineConfig(spot_removal_enabled=False)

        spot_px = spot_bg = kept = control_fg = 0
        for it, ref in zip(spotted, control):
            self.assertIsNotNone(it.spot)
            try:
                _, trace = preprocess(it.image)
                _, ref_trace = preprocess(ref.image, no_removal)
            except BlankImage:
                continue
            region = spot_region_mask(it.spot, it.image.shape, trace.binary.shape)
            spot_px += np.count_nonzero(region)
            spot_bg += np.count_nonzero(trace.binary[region] == 0)

            ref_fg = (ref_trace.binary == 255) & ~region
            control_fg += np.count_nonzero(ref_fg)
            kept += np.count_nonzero(trace.binary[ref_fg] == 255)

        self.assertGreater(spot_px, 0)
        self.assertGreaterEqual(spot_bg / spot_px, 0.95)
        self.assertGreaterEqual(kept / control_fg, 0.80)

if __name__ == '__main__':
    unittest.main()
