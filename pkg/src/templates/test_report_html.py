import unittest

from src.harness.records import AGREEMENT, CheckRecord
from src.templates.report_html import ReportTemplate, format_number


class TestCheckReport(unittest.TestCase):
    def setUp(self):
        self.records = [
            CheckRecord.compare('thm1.1', 'sphere:r=1', 1.0, 1.0, 1e-6),
            CheckRecord.compare('thm1.1', 'ellipsoid:a=1,c=1.2', 0.9, 1.0, 1e-6),
            CheckRecord.compare('cor1.6', 'spaceform:k=1', 7.0, 6.2, 0.01, kind=AGREEMENT),
            CheckRecord.inconclusive('bar', 'bump<a&b>', 'solver failed'),
            CheckRecord.not_applicable('dual-solver', 'rotated', 'shooting needs an axisymmetric metric'),
        ]

    def test_summary_orders_violations_first(self):
        data = ReportTemplate.summary_data(self.records, 'thm1', 'dirac-lab 1.0.0', 'abc', {'tol': 1e-6})
        self.assertEqual(data['total'], 5)
        self.assertEqual(
            dict(data['counts']),
            {'violated': 1, 'inconclusive': 1, 'holds': 1, 'equality': 1, 'not-applicable': 1},
        )
        self.assertEqual(data['records'][0]['theorem'], 'cor1.6')
        self.assertEqual(data['records'][-2]['verdict'], 'equality')
        self.assertEqual(data['records'][-1]['verdict'], 'not-applicable')

    def test_rendered_html(self):
        data = ReportTemplate.summary_data(self.records, 'thm1', 'dirac-lab 1.0.0', 'abc', {'tol': 1e-6})
        html = ReportTemplate.generate_report(data)
        self.assertIn('<title>thm1</title>', html)
        self.assertIn('content="abc"', html)
        self.assertIn('dirac-lab 1.0.0', html)
        self.assertIn('violated: 1', html)
        self.assertIn('bump&lt;a&amp;b&gt;', html)
        self.assertEqual(html, ReportTemplate.generate_report(data))

    def test_format_number(self):
        self.assertEqual(format_number(None), '')
        self.assertEqual(format_number(0.1 + 0.2), '0.3')
        self.assertEqual(format_number('x'), 'x')


if __name__ == '__main__':
    unittest.main()
