"""
Test suite for Baulkham & Castle Property Tracker.
"""
