"""
This package handles the closed-loop tank-pump simulation and its monitor
"""
