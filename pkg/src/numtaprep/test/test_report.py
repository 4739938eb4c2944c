import os
import tempfile
import unittest

from numtaprep.report import COLUMNS, BenchReport, BenchRow


def sample_report():
    report = BenchReport(reserved=['svm'], meta={'seed': 0})
    report.add(BenchRow('knn', 'raw', 0.5, 0.01, 0.2, 85, 15, 'abc'))
    report.add(BenchRow('knn', 'preprocessed', 0.75, 0.01, 0.1, 85, 15, 'abc'))
    return report


class TestReport(unittest.TestCase):
    def test_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'report.csv')
            sample_report().write_csv(path)
            with open(path) as f:
                lines = f.read().splitlines()
            self.assertEqual(lines[0], '# schema=1')
            self.assertEqual(lines[1], ','.join(COLUMNS))
            back = BenchReport.read_csv(path)
            self.assertEqual(back.accuracy('knn', 'preprocessed'), 0.75)
            self.assertEqual(back.rows[0].config_hash, 'abc')

    def test_add_checks(self):
        report = sample_report()
        with self.assertRaises(ValueError):
            report.add(BenchRow('knn', 'raw', 0.5, 0.0, 0.0, 1, 1, 'abc'))
        with self.assertRaises(ValueError):
            report.add(BenchRow('tree', 'cooked', 0.5, 0.0, 0.0, 1, 1, 'abc'))
        with self.assertRaises(ValueError):
            report.add(BenchRow('tree', 'raw', 1.5, 0.0, 0.0, 1, 1, 'abc'))

    def test_text(self):
        text = sample_report().to_text()
        lines = text.splitlines()
        self.assertIn('accuracy (raw)', lines[0])
        self.assertIn('0.75000', text)
        self.assertTrue(any(line.startswith('svm') and 'not implemented' in line for line in lines))

    def test_meta_and_plot(self):
        with tempfile.TemporaryDirectory() as tmp:
            report = sample_report()
            report.write_meta(os.path.join(tmp, 'report.meta.yaml'))
            report.plot(os.path.join(tmp, 'report.png'))
            self.assertTrue(os.path.getsize(os.path.join(tmp, 'report.png')) > 0)
            with open(os.path.join(tmp, 'report.meta.yaml')) as f:
                self.assertIn('seed: 0', f.read())

if __name__ == '__main__':
    unittest.main()
