"""Test suite for the multi-state engine."""
