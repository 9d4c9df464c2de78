"""
This package handles extraction of safety invariants and PID configurations
"""
