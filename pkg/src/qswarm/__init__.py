# This file makes 'qswarm' a package inside 'src'
__version__ = "0.1.0"
