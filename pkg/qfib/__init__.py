"""
qfib - Exact analysis of real quadric-surface bundles over the projective line
"""
__version__ = '0.1.0'
