"""
mmshare.utils includes utility functions used across the simulator: argument checks for
configuration validation, naming and initialising the experiment loggers, and reading and
writing the result files.
"""
