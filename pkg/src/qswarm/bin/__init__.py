# This file makes 'bin' a subpackage of 'qswarm'
