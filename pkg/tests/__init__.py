"""Test suite for oos-infer."""
