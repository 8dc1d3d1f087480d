# Make generate_report available from the report package
from .markdown_generator import generate_report
from .writers import output_paths, write_json, write_trace

__all__ = ["generate_report", "output_paths", "write_json", "write_trace"]
