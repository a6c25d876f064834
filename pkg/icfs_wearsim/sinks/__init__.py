from .base import ResultSink
from .csv_files import CsvSink, write_frame
