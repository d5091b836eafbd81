"""
mmshare simulates multi-operator mmWave cellular deployments and compares exclusive chunk
licensing of the band with dynamic, load-proportional sharing of it.
"""

try:
    from ._version import __version__
except ImportError:  # running from a source tree that was never installed
    __version__ = "0.0.0"
