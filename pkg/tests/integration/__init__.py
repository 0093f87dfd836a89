"""Integration tests for end-to-end functionality."""
