"""
This package handles invariant negation and payload synthesis
"""
