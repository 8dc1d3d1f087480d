# This file makes 'utils' a subpackage of 'qswarm'
