"""
This package stores the invflip toolkit: structured-text front end, invariant
extraction, attack payload synthesis and the closed-loop plant simulator
"""
