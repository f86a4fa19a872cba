"""Scenario-driven command line for the laboratory."""
