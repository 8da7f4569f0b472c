"""
Test package for the UMWE credit-cycle engine.
"""
