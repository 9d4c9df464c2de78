"""
This package handles end-to-end attack scenarios and their impact reports
"""
