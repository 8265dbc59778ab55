# fv_system/reports/__init__.py
from fv_system.reports.csv_generator import CSVGenerator
from fv_system.reports.report_builder import ReportBuilder

__all__ = ['CSVGenerator', 'ReportBuilder']
